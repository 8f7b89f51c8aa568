#pragma once

#include "bvpair/bv.hpp"
#include "bvpair/dm_field.hpp"
#include "bvpair/theorems.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bvpair {

// Closed-form generators: radii r_j (r_0 = 1) and ring values v_j.
enum class RadiusRuleKind { InvSq, Geometric };     // (j + 1)^-2, q^j
enum class ValueRuleKind { AltSign, Const, Index };  // (-1)^j, c, j

struct RadiusRule {
    RadiusRuleKind kind = RadiusRuleKind::InvSq;
    Rational q;
    Rational at(long j) const;
    // Closed form of the sum over j >= 1, or a rational upper bound for it.
    Rational tail_bound() const;
    bool tail_bound_exact() const { return kind == RadiusRuleKind::Geometric; }
    std::string to_string() const;
};

struct ValueRule {
    ValueRuleKind kind = ValueRuleKind::AltSign;
    Rational c;
    Rational at(long j) const;
    std::string to_string() const;
};

// Radial datum on the unit ball of R^N truncated after J spheres: ring j
// (1 <= j <= J) is r_j <= |x| < r_{j-1} and carries ring_values()[j - 1]; the
// core |x| < r_J carries ring_values()[J]. Values are polynomials in rho.
// Read as a field it is a(|x|) x/|x|, read as a function u(|x|).
//
// All N-dimensional measures are reported on the radius line (0, 1) in
// units of the area of the unit sphere, so a sphere of radius r carries
// weight r^(N-1) and a density f(rho) carries f(rho) rho^(N-1).
class RadialProfile {
public:
    RadialProfile(int dimension, std::vector<Rational> radii, std::vector<Polynomial> ring_values);
    static RadialProfile from_rules(int dimension, const RadiusRule& r, const ValueRule& v, long depth);

    int dimension() const { return n_; }
    long depth() const { return static_cast<long>(radii_.size()) - 1; }
    const std::vector<Rational>& radii() const { return radii_; }
    const std::vector<Polynomial>& ring_values() const { return values_; }
    // Value of ring j (1 <= j <= J + 1) at its constant term.
    Rational ring(long j) const { return values_.at(static_cast<std::size_t>(j - 1))(0); }
    const std::optional<RadiusRule>& radius_rule() const { return radius_rule_; }
    const std::optional<ValueRule>& value_rule() const { return value_rule_; }

    // The profile as a function of rho on (0, 1).
    PiecewiseBV profile() const;
    // rho^(N-1) a(rho): its 1D derivative is the weighted divergence.
    PiecewiseBV weighted() const;
    Polynomial area_factor() const;
    // "(N, rule_r, rule_a, J)" when built from rules.
    std::string to_string() const;

private:
    int n_;
    std::vector<Rational> radii_;
    std::vector<Polynomial> values_;
    std::optional<RadiusRule> radius_rule_;
    std::optional<ValueRule> value_rule_;
};

RadialProfile parse_radial_profile(const std::string& text);

struct RadialDivergence {
    Measure1D weighted;  // density (a' + (N-1) a / rho) rho^(N-1) plus sphere atoms
    std::map<Rational, Rational> spheres;  // r_j -> (outer - inner) r_j^(N-1)
    Approx total_variation;
    // sup|a| * (surface-normalized integral of |x|^{-1} times N - 1) + sum |jumps| r^(N-1);
    // set for ring-constant fields.
    std::optional<Rational> bound;
};
RadialDivergence radial_divergence(const RadialProfile& a);

struct SummabilityRow {
    long depth = 0;
    Rational sum_r;                // sum_{j <= J} r_j
    Rational sum_jr;               // sum_{j <= J} j r_j
    Rational lower_trace_inner;    // sum u^- |Tr^i| r_j^(N-1)
    Rational lower_trace_outer;    // sum u^- |Tr^e| r_j^(N-1)
    Rational upper_trace_jump;     // sum u^+ |Tr^i - Tr^e| r_j^(N-1)
    Rational lower_trace_jump;     // sum u^- |Tr^i - Tr^e| r_j^(N-1)
    Rational jump_mass;            // sum (u^+ - u^-) |Tr^i - Tr^e| r_j^(N-1)
    Rational jump_mass_bound;      // 2 sup|a| |D^j u|
    bool bounded() const { return jump_mass <= jump_mass_bound; }
};

struct SummabilityTable {
    std::vector<SummabilityRow> rows;
    std::optional<Rational> sum_r_limit;  // closed form or certified bound of sum r_j
    bool sum_r_limit_exact = false;
};
// One row per truncation depth 1..J of the common sphere sequence.
SummabilityTable summability_diagnostics(const RadialProfile& a, const RadialProfile& u, long depth);

// Smallest J with sum_{1 <= j <= J} j r_j > threshold, searching up to max_depth.
std::optional<long> divergence_certificate(const RadiusRule& rule, const Rational& threshold, long max_depth);

struct RadialPairing {
    Measure1D definition;    // Div(uA) - u^lambda Div A on the reduction
    Measure1D jump_formula;  // traces times jumps on the spheres plus a u' rho^(N-1)
    std::map<Rational, Rational> spheres;
    bool agree() const { return definition == jump_formula; }
};
// lambda is indexed by radius. Traces are taken with the normal pointing
// to the u^+ side of each sphere.
RadialPairing radial_pairing(const RadialProfile& a, const RadialProfile& u, const LambdaSelector& lambda);

// Both Gauss-Green balances on the ball B_rho, interior normal.
CheckReport radial_gauss_green(const RadialProfile& a, const RadialProfile& u, const LambdaSelector& lambda,
                               const Rational& rho, const CheckOptions& opt = {});

// Largest depth accepted by the exact reduction.
constexpr long kMaxRadialDepth = 4096;

} // namespace bvpair
