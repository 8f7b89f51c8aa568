#pragma once

#include "bvpair/bv.hpp"
#include "bvpair/dm_field.hpp"
#include "bvpair/measure.hpp"
#include "bvpair/pairing.hpp"

#include "json.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bvpair {

// Outcome of one mechanical verification. Exact checks use tolerance 0 and
// pass iff the rational residual vanishes; checks that go through Cantor
// quadrature or extrapolation carry a floating tolerance.
struct CheckReport {
    std::string name;
    Rational residual;
    std::optional<Measure1D> residual_measure;
    bool exact = true;
    double tolerance = 0;
    bool pass = false;
    std::vector<std::pair<std::string, std::string>> witnesses;
    std::vector<std::string> series_header;
    std::vector<std::vector<std::string>> series;

    void witness(const std::string& key, const std::string& value) { witnesses.emplace_back(key, value); }
    // Accumulates |r| into the residual.
    void add(const Rational& r);
    void add(const Approx& r);
    // Accumulates the total variation of m into the residual.
    void add(const Measure1D& m);
    // Sets pass from residual and tolerance.
    void settle(double quadrature_tolerance);

    std::string to_text() const;
    nlohmann::json to_json() const;
};

struct CheckOptions {
    double tolerance = 1e-9;  // used only by non-exact checks
};

// Two-route comparison of the lambda-pairing.
CheckReport verify_two_path(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                            const CheckOptions& opt = {});
// pairing_lambda - pairing_{1/2} equals the jump correction.
CheckReport verify_resto(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                         const CheckOptions& opt = {});
// P(u) + P(-u) = 2 (1/2 - lambda)(u^+ - u^-) Div A on J_u.
CheckReport verify_nonlinearity(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                                const CheckOptions& opt = {});
// Extremal forms against the lattice of the lambda = 0 and lambda = 1 pairings.
CheckReport verify_extremal(const DMField1D& a, const PiecewiseBV& u, const CheckOptions& opt = {});
// |pairing| <= ||A||_inf |Du| on every feature interval and atom.
CheckReport verify_domination(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                              const CheckOptions& opt = {});

// <P(u), phi> against the integral over t of <P(chi_{u > t}), phi>, the
// integrand being interpolated exactly on each cell of the critical-level
// partition. u must be piecewise linear (DegreeUnsupported otherwise).
CheckReport verify_coarea(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                          const std::vector<PiecewisePoly>& phis, const CheckOptions& opt = {});
// theta of the level-set pairings against theta of the pairing of u at the
// boundary points of {u > t}. Without explicit levels, one level per cell.
CheckReport verify_theta_slicing(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                                 const std::vector<Rational>& levels = {}, const CheckOptions& opt = {});
// Chain rule for h(u): diffuse part independent of lambda, a.c. part
// h'(u) A u', and for non-decreasing h the jump factor and theta invariance.
CheckReport verify_chain_rule(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                              const PiecewisePoly& h, const CheckOptions& opt = {});
// Leibniz formula for the pairing of vA with Du.
CheckReport verify_leibniz(const DMField1D& a, const PiecewiseBV& u, const PiecewiseBV& v,
                           const LambdaSelector& lambda, const CheckOptions& opt = {});
// Both Gauss-Green balances on E = (c, d), normals pointing into E.
CheckReport gauss_green(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda, const Rational& c,
                        const Rational& d, const CheckOptions& opt = {});
// A_eps at every jump of A approaches Tr^* (equal to it where A is locally
// constant), and <Div A_eps, phi> approaches <Div A, phi>; both errors at
// least halve each time eps halves, starting from eps0 until they drop
// below `floor`.
CheckReport verify_mollification(const DMField1D& a, const PiecewisePoly& phi, const Rational& eps0,
                                 double floor = 1e-9, const CheckOptions& opt = {});

enum class Side { Upper, Lower };
const char* to_string(Side s);

// W^{1,1} approximation of u by ramps of width min(1/n, gap / 2) at each
// jump, gap being the smallest distance between breakpoints. Upper ramps
// leave u^+ at the jump point, lower ramps u^-.
PiecewiseBV one_sided_sequence(const PiecewiseBV& u, Side side, int n);
PiecewiseBV one_sided_ramps(const PiecewiseBV& u, Side side, const Rational& width);

enum class SequenceKind { Upper, Lower, Hat };
const char* to_string(SequenceKind k);

// Upper / Lower: one-sided ramps of u. Hat: u + height * max(1 - n|x - center|, 0),
// which converges to u only weak*. negate replaces u_n and u by their negatives.
struct SequenceSpec {
    SequenceKind kind = SequenceKind::Upper;
    bool negate = false;
    Rational center = 0;
    Rational height = 1;
    std::string to_string() const;
};

// Limit as n -> infinity of f(n), f being a polynomial in 1/n of degree at
// most `degree` for n >= n0. Exact when the fit is confirmed on two extra
// samples; otherwise Richardson extrapolation along n0 2^k.
struct TailLimit {
    Rational value;
    bool exact = true;
    Rational uncertainty;
    int n_max = 0;
};
TailLimit tail_limit(const std::function<Approx(int)>& f, int n0, int degree);

struct PhiOutcome {
    Rational target;  // <P(u), phi>
    TailLimit limit;  // lim <P(u_n), phi>
    bool lsc_violated = false;
    bool usc_violated = false;
};

struct SemicontinuityOutcome {
    CheckReport report;
    SelectorClass selector_class = SelectorClass::Neither;
    bool strict = false;
    bool lahti_holds = true;
    std::vector<PhiOutcome> per_phi;
    bool lsc_violated() const;
    bool usc_violated() const;
};

// Evaluates the pairings along the sequence and compares the limits with
// the pairing of the limit function in the direction(s) implied by the
// selector class (both directions for Neither and Both). Throws
// NonStrictSequence for a non-strict sequence unless allow_weak_star.
SemicontinuityOutcome semicontinuity_experiment(const DMField1D& a, const LambdaSelector& lambda,
                                                const PiecewiseBV& u, const SequenceSpec& seq,
                                                const std::vector<PiecewisePoly>& phis, bool allow_weak_star = false,
                                                const CheckOptions& opt = {});

// Helpers shared with the radial module.
Polynomial interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys);
StairPoly piece_at(const PiecewiseBV& f, const Rational& l, const Rational& r);

} // namespace bvpair
