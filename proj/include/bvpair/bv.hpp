#pragma once

#include "bvpair/measure.hpp"
#include "bvpair/piecewise_poly.hpp"
#include "bvpair/stair_poly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bvpair {

// Borel selector: a default value in [0, 1] plus finitely many point overrides.
class LambdaSelector {
public:
    LambdaSelector() = default;
    explicit LambdaSelector(Rational default_value, std::map<Rational, Rational> overrides = {});

    static LambdaSelector constant(const Rational& c) { return LambdaSelector(c); }

    const Rational& default_value() const { return default_; }
    const std::map<Rational, Rational>& overrides() const { return overrides_; }
    Rational at(const Rational& x) const;
    LambdaSelector with(const Rational& x, const Rational& value) const;
    std::string to_string() const;

private:
    Rational default_ = Rational(1, 2);
    std::map<Rational, Rational> overrides_;
};

struct JumpPoint {
    Rational x;
    Rational left;
    Rational right;
    Rational lower() const { return min_q(left, right); }
    Rational upper() const { return max_q(left, right); }
    // Orientation with u^i = u^+: +1 for upward jumps, -1 for downward ones.
    int nu() const { return right > left ? 1 : -1; }
};

struct ApproxLimits {
    Rational lower;
    Rational upper;
    std::optional<Rational> precise;  // set off the jump set
    Rational left;
    Rational right;
};

class PiecewiseBV;

// {u > t} as a finite union of open intervals together with its reduced
// boundary, each point carrying the interior normal (+1 when the set lies
// to its right).
struct LevelSet {
    Rational lo;
    Rational hi;
    BorelSet1D set;
    std::vector<std::pair<Rational, int>> boundary;

    std::size_t perimeter() const { return boundary.size(); }
    PiecewiseBV indicator() const;
};

// BV function on (lo, hi) given by StairPoly pieces between breakpoints.
// Jumps are the interior breakpoints where the one-sided limits differ;
// pieces are kept in canonical form (equal neighbours merged), so the
// approximate discontinuity set coincides with the jump set.
class PiecewiseBV {
public:
    PiecewiseBV() : PiecewiseBV({Rational(0), Rational(1)}, {StairPoly()}) {}
    PiecewiseBV(std::vector<Rational> breakpoints, std::vector<StairPoly> pieces);

    static PiecewiseBV constant(const Rational& lo, const Rational& hi, const Rational& c);
    static PiecewiseBV from_poly(const PiecewisePoly& p);
    // Characteristic function of the interval between a and b, inside (lo, hi).
    static PiecewiseBV indicator(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b);

    // Adds mass * F, F the Cantor staircase rising from 0 at a to 1 at b.
    PiecewiseBV with_staircase(const Rational& a, const Rational& b, const Rational& mass) const;

    const Rational& lo() const { return bps_.front(); }
    const Rational& hi() const { return bps_.back(); }
    const std::vector<Rational>& breakpoints() const { return bps_; }
    const std::vector<StairPoly>& pieces() const { return pieces_; }
    bool has_staircase() const;
    int max_degree() const;
    bool piecewise_linear() const { return !has_staircase() && max_degree() <= 1; }

    Rational left_limit(const Rational& x) const;
    Rational right_limit(const Rational& x) const;
    std::vector<JumpPoint> jumps() const;
    ApproxLimits limits(const Rational& x) const;
    // u^lambda(x) = (1 - lambda(x)) u^-(x) + lambda(x) u^+(x).
    Rational lambda_value(const Rational& x, const LambdaSelector& lambda) const;

    Measure1D derivative() const;
    // The L^1 class as a density (for integrals of u itself).
    Measure1D as_density() const;
    // Throws Unsupported when a piece carries a staircase.
    PiecewisePoly as_piecewise_poly() const;

    PiecewiseBV operator-() const;
    friend PiecewiseBV operator+(const PiecewiseBV& a, const PiecewiseBV& b);
    friend PiecewiseBV operator-(const PiecewiseBV& a, const PiecewiseBV& b);
    friend PiecewiseBV operator*(const PiecewiseBV& a, const PiecewiseBV& b);
    friend PiecewiseBV operator*(const PiecewiseBV& a, const Rational& s);
    friend bool operator==(const PiecewiseBV& a, const PiecewiseBV& b) {
        return a.bps_ == b.bps_ && a.pieces_ == b.pieces_;
    }
    friend bool operator!=(const PiecewiseBV& a, const PiecewiseBV& b) { return !(a == b); }

    // h o u for a continuous piecewise polynomial h defined on the range of u.
    PiecewiseBV compose(const PiecewisePoly& h) const;
    // T_k(u) = max(min(u, k), -k).
    PiecewiseBV truncate(const Rational& k) const;
    LevelSet level_set(const Rational& t) const;
    // Refinement onto extra breakpoints (values unchanged).
    PiecewiseBV refined(const std::vector<Rational>& points) const;

    Approx sup_norm() const;
    Approx l1_norm() const;
    Approx total_variation() const;
    // Critical levels: every one-sided limit at a breakpoint and every
    // critical value of the pieces.
    std::vector<Rational> critical_values() const;

    std::string to_string() const;

private:
    void normalize();
    std::size_t piece_index(const Rational& x) const;

    std::vector<Rational> bps_;
    std::vector<StairPoly> pieces_;
};

PiecewiseBV parse_bv(const std::string& text);

// u^lambda * mu. Atoms of mu take the lambda-representative, diffuse parts the
// piece values. Throws Unsupported for staircase pieces against Cantor parts.
Measure1D lambda_times(const PiecewiseBV& u, const LambdaSelector& lambda, const Measure1D& mu);

// Points where the piece p (on (l, r)) crosses the level c, in order. For
// polynomial pieces these are the rational roots of p - c (DegreeUnsupported
// on an irrational crossing); for monotone staircase pieces, the ends of the
// preimage of c.
std::vector<Rational> level_crossings(const StairPoly& p, const Rational& l, const Rational& r, const Rational& c);

} // namespace bvpair
