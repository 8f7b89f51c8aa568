#pragma once

#include "bvpair/bv.hpp"
#include "bvpair/measure.hpp"

#include <string>
#include <vector>

namespace bvpair {

// Bounded field on an interval whose derivative (the divergence) is a
// finite measure. In 1D the field is its scalar profile.
class DMField1D {
public:
    DMField1D() : DMField1D(PiecewiseBV()) {}
    explicit DMField1D(PiecewiseBV profile);

    const PiecewiseBV& profile() const { return profile_; }
    const Measure1D& divergence() const { return divergence_; }
    const Approx& sup_norm() const { return sup_norm_; }
    const Rational& lo() const { return profile_.lo(); }
    const Rational& hi() const { return profile_.hi(); }
    // Continuous at x (no jump of the profile there).
    bool continuous_at(const Rational& x) const { return profile_.left_limit(x) == profile_.right_limit(x); }

private:
    PiecewiseBV profile_;
    Measure1D divergence_;
    Approx sup_norm_;
};

struct OrientedPoint {
    Rational x;
    int nu = 1;
};

// Normal traces of the field on {x} oriented by nu, and their mean.
struct TraceTriple {
    Rational minus;
    Rational plus;
    Rational star;
    friend bool operator==(const TraceTriple& a, const TraceTriple& b) {
        return a.minus == b.minus && a.plus == b.plus && a.star == b.star;
    }
};

// nu = +1: Tr^- = A(x-), Tr^+ = A(x+); nu = -1: Tr^- = -A(x+), Tr^+ = -A(x-).
TraceTriple normal_trace(const DMField1D& a, const Rational& x, int nu);
std::vector<TraceTriple> normal_traces(const DMField1D& a, const std::vector<OrientedPoint>& sigma);

struct FieldClassification {
    BorelSet1D positive;          // Omega^+_A
    BorelSet1D negative;          // Omega^-_A
    std::vector<Rational> theta;  // atoms of Div A
};
FieldClassification classify(const DMField1D& a);

enum class SelectorClass { Lsc, Usc, Both, Neither };
const char* to_string(SelectorClass c);
SelectorClass selector_class(const LambdaSelector& lambda, const DMField1D& a);
// Selector in the lsc (resp. usc) family that agrees with `base` off the
// atoms of Div A.
LambdaSelector lsc_selector(const DMField1D& a, const LambdaSelector& base = LambdaSelector());
LambdaSelector usc_selector(const DMField1D& a, const LambdaSelector& base = LambdaSelector());

DMField1D product_field(const PiecewiseBV& u, const DMField1D& a);
// Traces of uA predicted from those of A: Tr^-(uA) = u^e Tr^-(A) and
// Tr^+(uA) = u^i Tr^+(A), u^i being the limit on the side nu points to.
TraceTriple product_trace_formula(const PiecewiseBV& u, const DMField1D& a, const Rational& x, int nu);

// Convolution with rho_eps(y) = (15 / 16 eps) (1 - (y / eps)^2)^2 on [-eps, eps],
// the field being extended by its boundary limits outside the domain. Exact.
// Throws SupportOverflow unless eps is below the distance from every
// interior breakpoint of A to the boundary.
DMField1D mollify(const DMField1D& a, const Rational& eps);
Polynomial mollifier_kernel(const Rational& eps);

} // namespace bvpair
