#include "families.hpp"
#include "generators.hpp"

#include "bvpair/pairing.hpp"
#include "bvpair/radial.hpp"
#include "bvpair/scenario.hpp"
#include "bvpair/theorems.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

using namespace bvpair;

namespace {

// Pinned tolerances and budgets.
constexpr double kCantorTolerance = 1e-9;
constexpr double kMollificationFloor = 1e-9;
constexpr double kExampleBudgetMs = 1000;
constexpr double kTwoPathBudgetMs = 10000;
constexpr double kAnnulusBudgetMs = 5000;
constexpr int kPropertyInstances = 120;

const std::filesystem::path kSource = BVPAIR_SOURCE_DIR;

Rational q(const char* s) { return parse_rational(s); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Tally {
public:
    void expect(bool ok, const std::string& what) {
        ++checked_;
        if (!ok && failures_++ == 0) first_ = what;
    }
    int checked() const { return checked_; }
    int failures() const { return failures_; }
    std::string first() const { return first_; }

private:
    int checked_ = 0;
    int failures_ = 0;
    std::string first_;
};

std::string witness(const CheckReport& r, const std::string& key) {
    for (const auto& [k, v] : r.witnesses)
        if (k == key) return v;
    return "";
}

std::vector<Scenario> interval_corpus() {
    std::vector<Scenario> out;
    for (const auto& e : std::filesystem::directory_iterator(kSource / "scenarios")) {
        if (e.path().extension() != ".json") continue;
        Scenario s = load_scenario(e.path().string());
        if (!s.ball && s.field && s.function) out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
    return out;
}

DMField1D box_field() { return DMField1D(PiecewiseBV::indicator(-2, 2, -1, 1)); }
PiecewiseBV box_function() { return PiecewiseBV::indicator(-2, 2, -1, 1); }

struct Triple {
    DMField1D a;
    PiecewiseBV u;
    LambdaSelector lambda;
};

Triple generated(gen::Rng& r, int max_degree, bool cantor) {
    const gen::Domain d = gen::domain(r);
    const DMField1D a(gen::piecewise(r, d, static_cast<int>(r.uniform(1, 4)), max_degree, 0.7));
    PiecewiseBV u = gen::piecewise(r, d, static_cast<int>(r.uniform(2, 5)), max_degree, 0.7);
    if (cantor) {
        std::vector<Rational> avoid;
        for (const auto& j : u.jumps()) avoid.push_back(j.x);
        for (const auto& j : a.profile().jumps()) avoid.push_back(j.x);
        u = gen::with_cantor(r, d, u, avoid);
    }
    return {a, u, gen::selector(r, u, a)};
}

// ------------------------------------------------------------------ criteria

Outcome example_exactness() {
    Tally t;
    const std::vector<Rational> values{0, q("1/7"), q("1/3"), q("1/2"), q("3/4"), q("9/10"), 1};
    const DMField1D a = box_field();
    const PiecewiseBV u = box_function();
    for (const auto& lm : values)
        for (const auto& lp : values) {
            const LambdaSelector lam(q("1/2"), {{Rational(-1), lm}, {Rational(1), lp}});
            const Measure1D expected(-2, 2, {}, {{Rational(-1), Rational(1 - lm)}, {Rational(1), Rational(lp - 1)}}, {});
            const std::string tag = "lambda(-1)=" + to_string(lm) + " lambda(1)=" + to_string(lp);
            t.expect(pairing_by_definition(a, u, lam).measure == expected, "definition route, " + tag);
            t.expect(pairing_by_decomposition(a, u, lam).measure == expected, "decomposition route, " + tag);
        }
    return {t.failures() == 0, std::to_string(t.checked() / 2) + " selector pairs, both routes exact" +
                                   (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome two_path() {
    Tally t;
    int triples = 0, cantor = 0;
    auto run = [&](const Triple& x, const std::string& tag) {
        ++triples;
        cantor += x.u.has_staircase() || x.a.profile().has_staircase();
        const CheckReport r = verify_two_path(x.a, x.u, x.lambda, CheckOptions{kCantorTolerance});
        t.expect(r.pass, tag + " residual " + to_string(r.residual));
    };
    for (const auto& s : interval_corpus()) run({*s.field, *s.function, s.resolved_selector()}, s.name);
    run({box_field(), box_function(), LambdaSelector(q("1/3"))}, "box 1/3");
    run({DMField1D(PiecewiseBV::from_poly(PiecewisePoly::linear_interpolant({0, 1}, {1, 2}))),
         PiecewiseBV::constant(0, 1, 0).with_staircase(0, 1, 1), LambdaSelector()},
        "Cantor staircase against a linear field");
    run({DMField1D(PiecewiseBV::indicator(0, 1, q("1/2"), 1)), PiecewiseBV::constant(0, 1, 0).with_staircase(0, q("1/3"), 2),
         LambdaSelector(q("1/4"))},
        "Cantor staircase left of a field jump");
    for (int k = 0; k < 30; ++k) {
        gen::Rng r(static_cast<std::uint64_t>(50000 + k));
        run(generated(r, 2, k % 3 == 0), "generated " + std::to_string(k));
    }
    const bool enough = triples >= 25 && cantor >= 3;
    return {t.failures() == 0 && enough,
            std::to_string(triples) + " triples (" + std::to_string(cantor) + " with a Cantor part, tolerance 1e-9)" +
                (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome coarea() {
    Tally t;
    int scenarios = 0, phis = 0;
    auto run = [&](const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lam,
                   const std::vector<PiecewisePoly>& ps, const std::string& tag) {
        ++scenarios;
        phis += static_cast<int>(ps.size());
        const CheckReport r = verify_coarea(a, u, lam, ps);
        t.expect(r.exact && r.residual == 0 && r.pass, tag + " residual " + to_string(r.residual));
    };
    for (const auto& s : interval_corpus())
        if (s.function->piecewise_linear() && s.test_functions.size() >= 3) {
            std::vector<PiecewisePoly> ps = s.test_functions;
            gen::Rng r(60000);
            const gen::Domain d{s.lo, s.hi, 8};
            while (ps.size() < 5) ps.push_back(gen::test_function(r, d));
            run(*s.field, *s.function, s.resolved_selector(), ps, s.name);
        }
    for (int k = 0; scenarios < 12; ++k) {
        gen::Rng r(static_cast<std::uint64_t>(61000 + k));
        const Triple x = generated(r, 1, false);
        const gen::Domain d{x.u.lo(), x.u.hi(), 8};
        std::vector<PiecewisePoly> ps;
        for (int j = 0; j < 5; ++j) ps.push_back(gen::test_function(r, d));
        run(x.a, x.u, x.lambda, ps, "generated " + std::to_string(k));
    }
    const bool enough = scenarios >= 10 && phis >= 5 * scenarios;
    return {t.failures() == 0 && enough, std::to_string(scenarios) + " piecewise linear scenarios, " +
                                             std::to_string(phis) + " test functions, all residuals exactly 0" +
                                             (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome gauss_green_balances() {
    Tally t;
    int cases = 0, on_atoms = 0, balls = 0, nonzero_boundary = 0;
    auto interval = [&](const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lam, const Rational& c,
                        const Rational& d, const std::string& tag) {
        ++cases;
        const CheckReport r = gauss_green(a, u, lam, c, d);
        t.expect(r.pass && r.exact, tag + " residual " + to_string(r.residual));
        const Measure1D& div = a.divergence();
        const bool atom = div.atom(c) != 0 || div.atom(d) != 0;
        on_atoms += atom;
        nonzero_boundary += witness(r, "boundary_terms") != "0";
    };
    const LambdaSelector ex(q("1/2"), {{Rational(-1), q("1/3")}, {Rational(1), q("3/4")}});
    interval(box_field(), box_function(), ex, -1, 1, "box on (-1,1)");
    interval(box_field(), box_function(), ex, -1, q("1/2"), "box on (-1,1/2)");
    interval(box_field(), box_function(), ex, q("-3/2"), 1, "box on (-3/2,1)");
    interval(box_field(), box_function(), ex, q("-1/2"), q("1/2"), "box on (-1/2,1/2)");
    for (int k = 0; k < 8; ++k) {
        gen::Rng r(static_cast<std::uint64_t>(62000 + k));
        const Triple x = generated(r, 2, k % 4 == 3);
        const gen::Domain d{x.u.lo(), x.u.hi(), 8};
        std::vector<Rational> ends = gen::cuts(r, d, 2);
        const auto jumps = x.a.profile().jumps();
        if (!jumps.empty() && k % 2 == 0) ends[0] = jumps.front().x;
        if (ends[0] == ends[1]) ends[1] = (ends[0] + d.hi) / 2;
        interval(x.a, x.u, x.lambda, min_q(ends[0], ends[1]), max_q(ends[0], ends[1]), "generated " + std::to_string(k));
    }
    const RadialProfile af = parse_radial_profile("(2, inv_sq, alt_sign, 50)");
    const RadialProfile uf = parse_radial_profile("(2, inv_sq, index, 50)");
    const RadialProfile bf = parse_radial_profile("(3, geometric 1/2, const 3/4, 6)");
    const RadialProfile bu = parse_radial_profile("(3, geometric 1/2, alt_sign, 6)");
    for (const auto& [a, u, rho] : std::vector<std::tuple<RadialProfile, RadialProfile, Rational>>{
             {af, uf, q("1/4")}, {af, uf, q("1/5")}, {af, uf, q("1/9")}, {bf, bu, q("1/4")}, {bf, bu, q("3/5")}}) {
        ++cases;
        ++balls;
        const CheckReport r = radial_gauss_green(a, u, LambdaSelector(q("1/3")), rho);
        t.expect(r.pass && r.exact, "ball of radius " + to_string(rho) + " residual " + to_string(r.residual));
        on_atoms += witness(r, "on_jump_sphere") == "yes";
        nonzero_boundary += witness(r, "boundary_terms") != "0";
    }
    const bool enough = cases >= 10 && on_atoms >= 1 && nonzero_boundary >= 1;
    return {t.failures() == 0 && enough,
            std::to_string(cases) + " sets (" + std::to_string(balls) + " balls, " + std::to_string(on_atoms) +
                " with boundary on an atom, " + std::to_string(nonzero_boundary) +
                " where the formulas differ by boundary terms), both balances exact" +
                (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome chain_and_leibniz() {
    Tally t;
    int chain = 0, leibniz = 0, truncations = 0, shared = 0;
    for (int k = 0; k < 10; ++k) {
        gen::Rng r(static_cast<std::uint64_t>(63000 + k));
        const Triple x = generated(r, 1, false);
        const Rational bound = x.u.sup_norm().value + 1;
        PiecewisePoly h;
        if (k % 2 == 0) {
            const Rational kk = Rational(1 + k) / 4;
            h = PiecewisePoly({Rational(-bound - kk), Rational(-kk), kk, Rational(bound + kk)},
                              {Polynomial(Rational(-kk)), Polynomial::x(), Polynomial(kk)});
            t.expect(x.u.compose(h) == x.u.truncate(kk), "T_k differs from truncate, case " + std::to_string(k));
            ++truncations;
        } else {
            h = gen::lipschitz_map(r, bound, k % 4 == 1);
        }
        ++chain;
        t.expect(verify_chain_rule(x.a, x.u, x.lambda, h).pass, "chain rule case " + std::to_string(k));

        PiecewiseBV v = gen::piecewise(r, {x.u.lo(), x.u.hi(), 8}, 3, 1, 0.7);
        if (k % 2 == 0 && !x.u.jumps().empty()) {
            v = v + PiecewiseBV::indicator(x.u.lo(), x.u.hi(), x.u.jumps().front().x, x.u.hi());
            ++shared;
        }
        ++leibniz;
        t.expect(verify_leibniz(x.a, x.u, v, x.lambda).pass, "Leibniz case " + std::to_string(k));
    }
    const bool enough = chain >= 8 && leibniz >= 8 && truncations >= 1 && shared >= 1;
    return {t.failures() == 0 && enough,
            std::to_string(chain) + " chain rule cases (" + std::to_string(truncations) + " truncations), " +
                std::to_string(leibniz) + " Leibniz cases (" + std::to_string(shared) + " shared jumps), residuals 0" +
                (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome semicontinuity() {
    Tally t;
    // (a) lsc selectors along one-sided strict sequences.
    int runs = 0;
    for (const auto& s : interval_corpus()) {
        if (s.function->has_staircase() || s.field->profile().has_staircase()) continue;
        std::vector<PiecewisePoly> phis;
        for (const auto& phi : s.test_functions)
            if (phi.nonnegative()) phis.push_back(phi);
        if (phis.empty()) continue;
        const LambdaSelector lam = lsc_selector(*s.field, s.selector);
        for (const SequenceKind kind : {SequenceKind::Upper, SequenceKind::Lower})
            for (const bool neg : {false, true}) {
                SequenceSpec seq;
                seq.kind = kind;
                seq.negate = neg;
                const auto out = semicontinuity_experiment(*s.field, lam, *s.function, seq, phis);
                ++runs;
                t.expect(out.strict && !out.lsc_violated(), "(a) " + s.name + " " + seq.to_string());
            }
    }
    // (b) the constant selector 1/2 on the box example.
    const DMField1D a = box_field();
    const PiecewiseBV u = box_function();
    const std::vector<PiecewisePoly> phis{PiecewisePoly::bump(-2, 2, -2, 0), PiecewisePoly::bump(-2, 2, 0, 2),
                                          PiecewisePoly::bump(-2, 2, q("-3/2"), q("3/2"))};
    bool lsc_bad = false, usc_bad = false;
    for (const SequenceKind kind : {SequenceKind::Upper, SequenceKind::Lower}) {
        SequenceSpec seq;
        seq.kind = kind;
        const auto out = semicontinuity_experiment(a, LambdaSelector(q("1/2")), u, seq, phis);
        for (const auto& p : out.per_phi) {
            lsc_bad = lsc_bad || (p.lsc_violated && p.limit.exact);
            usc_bad = usc_bad || (p.usc_violated && p.limit.exact);
        }
    }
    t.expect(lsc_bad, "(b) no exact lsc violation for lambda = 1/2");
    t.expect(usc_bad, "(b) no exact usc violation for lambda = 1/2");
    // (c) weak* counterexample.
    const DMField1D half(PiecewiseBV::indicator(-1, 1, 0, 1));
    const std::vector<PiecewisePoly> ws{PiecewisePoly::bump(-1, 1, q("-1/2"), q("1/2")), PiecewisePoly::bump(-1, 1, -1, 1),
                                        PiecewisePoly::bump(-1, 1, q("-1/3"), q("2/3")) * Rational(5)};
    SequenceSpec hat;
    hat.kind = SequenceKind::Hat;
    const auto w = semicontinuity_experiment(half, LambdaSelector(), PiecewiseBV::constant(-1, 1, 0), hat, ws, true);
    t.expect(!w.strict, "(c) hat sequence reported strict");
    for (std::size_t k = 0; k < ws.size(); ++k)
        t.expect(w.per_phi[k].limit.exact && w.per_phi[k].limit.value == -ws[k](0) && w.per_phi[k].target == 0,
                 "(c) liminf differs from -phi(0) for phi_" + std::to_string(k));
    return {t.failures() == 0 && runs > 0,
            "(a) " + std::to_string(runs) + " lsc runs without violation; (b) exact lsc and usc violations at 1/2; " +
                "(c) liminf = -phi(0) for " + std::to_string(ws.size()) + " test functions" +
                (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome annulus() {
    Tally t;
    const RadiusRule rule{RadiusRuleKind::InvSq, 0};
    const auto cert = divergence_certificate(rule, 5, 100000);
    t.expect(cert.has_value(), "no certificate below 10^5");
    long depth = cert.value_or(50);
    const RadialProfile a = RadialProfile::from_rules(2, rule, ValueRule{ValueRuleKind::AltSign, 0}, depth);
    const RadialProfile u = RadialProfile::from_rules(2, rule, ValueRule{ValueRuleKind::Index, 0}, depth);
    const SummabilityTable tab = summability_diagnostics(a, u, depth);
    t.expect(tab.sum_r_limit.has_value(), "no bound for the radii sum");
    // pi^2/6 - 1 < 6449340668482265 / 10^16 - 1; the radii sum starts at j = 1.
    const Rational pi2_over_6_upper = q("16449340668482265/10000000000000000");
    for (const auto& row : tab.rows) {
        t.expect(row.sum_r < pi2_over_6_upper - 1, "radii sum above its bound at J = " + std::to_string(row.depth));
        t.expect(row.bounded(), "pairing mass bound fails at J = " + std::to_string(row.depth));
    }
    t.expect(tab.rows.back().sum_jr > 5, "sum j r_j not above 5");
    t.expect(tab.rows[static_cast<std::size_t>(depth - 2)].sum_jr <= 5, "certificate not minimal");
    return {t.failures() == 0, "sum j r_j > 5 first at J = " + std::to_string(depth) +
                                   ", sum r_j < pi^2/6 - 1 and the mass bound hold at every J <= " + std::to_string(depth) +
                                   (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome mollification() {
    Tally t;
    const DMField1D a = box_field();
    std::vector<Rational> eps{q("3/4"), q("1/2"), q("1/3"), q("2/7"), q("1/10")};
    for (int k = 2; k <= 30; ++k) eps.push_back(Rational(1) / Rational(mpz_class(1) << k));
    for (const auto& e : eps) {
        const DMField1D m = mollify(a, e);
        for (const Rational x : {Rational(-1), Rational(1)})
            t.expect(m.profile().right_limit(x) == q("1/2") && normal_trace(a, x, 1).star == q("1/2"),
                     "A_eps differs from Tr^* at " + to_string(x) + " for eps = " + to_string(e));
    }
    // Bumps tilted by (x + 2) so that neither is symmetric about an atom.
    auto tilted = [](const Rational& a, const Rational& b) {
        const Polynomial p = Polynomial::linear(-a, 1).pow(2) * Polynomial::linear(b, -1).pow(2) * Polynomial::linear(2, 1);
        return PiecewisePoly({Rational(-2), a, b, Rational(2)}, {Polynomial(0), p, Polynomial(0)});
    };
    const std::vector<PiecewisePoly> phis{tilted(q("-3/2"), q("1/2")), tilted(q("-1/2"), q("3/2")),
                                          tilted(q("-7/4"), q("5/4"))};
    std::string steps;
    for (std::size_t k = 0; k < phis.size(); ++k) {
        const CheckReport r = verify_mollification(a, phis[k], q("1/2"), kMollificationFloor);
        t.expect(r.pass, "error halving fails for phi_" + std::to_string(k));
        steps += (k ? ", " : "") + std::to_string(r.series.size());
    }
    return {t.failures() == 0, "A_eps = 1/2 at both atoms for " + std::to_string(eps.size()) +
                                   " values of eps; error halves down to 1e-9 in " + steps + " steps" +
                                   (t.failures() ? "; first failure: " + t.first() : "")};
}

Outcome properties() {
    Tally t;
    int fams = 0;
    for (const auto& f : families::all()) {
        const families::Result r = f.run(kPropertyInstances);
        ++fams;
        t.expect(r.instances >= 100 && r.failures == 0, f.name + ": " + r.first_failure);
    }
    return {t.failures() == 0, std::to_string(fams) + " families x " + std::to_string(kPropertyInstances) +
                                   " instances, zero failures" + (t.failures() ? "; first failure: " + t.first() : "")};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget_ms;
    };
    const std::vector<Criterion> criteria{
        {1, "example pairing exactness", example_exactness, kExampleBudgetMs},
        {2, "two-path equality", two_path, kTwoPathBudgetMs},
        {3, "coarea formula", coarea, 0},
        {4, "Gauss-Green formulas", gauss_green_balances, 0},
        {5, "chain rule and Leibniz formula", chain_and_leibniz, 0},
        {6, "semicontinuity", semicontinuity, 0},
        {7, "annulus summability", annulus, kAnnulusBudgetMs},
        {8, "mollification", mollification, 0},
        {9, "property suites", properties, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = c.budget_ms <= 0 || ms < c.budget_ms;
        const bool pass = o.pass && in_budget;
        failed += !pass;
        char timing[64];
        if (c.budget_ms > 0) std::snprintf(timing, sizeof timing, "%.0f ms, budget %.0f ms", ms, c.budget_ms);
        else std::snprintf(timing, sizeof timing, "%.0f ms", ms);
        std::printf("criterion %d %s: %s | %s | %s\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(), timing);
    }
    return failed == 0 ? 0 : 1;
}
