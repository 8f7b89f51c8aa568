#include "families.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include "bvpair/pairing.hpp"
#include "bvpair/theorems.hpp"

namespace families {

using namespace bvpair;

namespace {

class Recorder {
public:
    Recorder(Result& res, long seed) : res_(res), seed_(seed) {}
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        if (res_.failures == 0) res_.first_failure = "seed " + std::to_string(seed_) + ": " + what;
        ++res_.failures;
    }

private:
    Result& res_;
    long seed_;
};

// body returns false when the generated instance does not qualify.
using Body = std::function<bool(gen::Rng&, Recorder&)>;

Result run_family(const std::string& name, int instances, long base, const Body& body) {
    Result res;
    res.name = name;
    for (long seed = base; res.instances < instances && seed < base + 4 * instances; ++seed) {
        gen::Rng r(static_cast<std::uint64_t>(seed));
        Recorder rec(res, seed);
        try {
            if (body(r, rec)) ++res.instances;
        } catch (const std::exception& e) {
            rec.expect(false, std::string("threw ") + e.what());
            ++res.instances;
        }
    }
    return res;
}

std::vector<Rational> jump_points(const PiecewiseBV& f) {
    std::vector<Rational> out;
    for (const auto& j : f.jumps()) out.push_back(j.x);
    return out;
}

std::vector<Rational> special_points(const DMField1D& a, const PiecewiseBV& u) {
    std::vector<Rational> out = jump_points(u);
    const auto more = jump_points(a.profile());
    out.insert(out.end(), more.begin(), more.end());
    return out;
}

struct Triple {
    gen::Domain d;
    DMField1D a;
    PiecewiseBV u;
    LambdaSelector lambda;
};

Triple triple(gen::Rng& r, int max_degree = 2) {
    const gen::Domain d = gen::domain(r);
    const DMField1D a(gen::piecewise(r, d, static_cast<int>(r.uniform(1, 4)), max_degree, 0.7));
    const PiecewiseBV u = gen::piecewise(r, d, static_cast<int>(r.uniform(1, 5)), max_degree, 0.7);
    return {d, a, u, gen::selector(r, u, a)};
}

bool two_routes(gen::Rng& r, Recorder& rec) {
    Triple t = triple(r);
    if (r.coin(1.0 / 3)) t.u = gen::with_cantor(r, t.d, t.u, special_points(t.a, t.u));
    rec.expect(pairing_by_definition(t.a, t.u, t.lambda).measure ==
                   pairing_by_decomposition(t.a, t.u, t.lambda).measure,
               "definition and decomposition differ");
    return true;
}

bool integration_by_parts(gen::Rng& r, Recorder& rec) {
    const Triple t = triple(r);
    const PiecewisePoly phi = gen::test_function(r, t.d);
    const Approx got = pairing_by_definition(t.a, t.u, t.lambda).measure.act(phi);
    rec.expect(got.exact, "inexact action");
    rec.expect(got.value == oracle::pairing_action(t.a.profile(), t.u, t.lambda, phi), "action differs from the oracle");
    return true;
}

bool domination(gen::Rng& r, Recorder& rec) {
    Triple t = triple(r);
    if (r.coin(0.25)) t.u = gen::with_cantor(r, t.d, t.u, special_points(t.a, t.u));
    const Measure1D p = total_variation(pairing_by_definition(t.a, t.u, t.lambda).measure);
    const Measure1D du = total_variation(t.u.derivative());
    const Rational sup = t.a.sup_norm().value;
    for (int k = 0; k < 3; ++k) {
        const BorelSet1D b = gen::borel_set(r, t.d, special_points(t.a, t.u));
        const Approx lhs = p.eval(b), rhs = du.eval(b);
        const Rational slack = lhs.exact && rhs.exact ? Rational(0) : Rational(1, 1000000000);
        rec.expect(lhs.value <= sup * rhs.value + slack, "|P|(B) exceeds ||A|| |Du|(B) on " + b.to_string());
    }
    rec.expect(verify_domination(t.a, t.u, t.lambda).pass, "verify_domination failed");
    return true;
}

bool selector_independence(gen::Rng& r, Recorder& rec) {
    const Triple t = triple(r);
    const LambdaSelector other = gen::selector(r, t.u, t.a);
    bool differs = false;
    for (const auto& x : jump_points(t.u))
        differs = differs || (t.a.divergence().atom(x) != 0 && t.lambda.at(x) != other.at(x));
    const bool equal =
        pairing_by_definition(t.a, t.u, t.lambda).measure == pairing_by_definition(t.a, t.u, other).measure;
    rec.expect(equal == !differs, "selector dependence does not match the atoms of Div A on the jump set");
    return true;
}

bool sobolev(gen::Rng& r, Recorder& rec) {
    const gen::Domain d = gen::domain(r);
    const DMField1D a(gen::piecewise(r, d, static_cast<int>(r.uniform(1, 4)), 2, 0.8));
    const PiecewiseBV u = gen::continuous_linear(r, d, static_cast<int>(r.uniform(1, 5)));
    const Measure1D expected = oracle::absolutely_continuous_part(a.profile(), u);
    for (int k = 0; k < 2; ++k)
        rec.expect(pairing_by_definition(a, u, gen::selector(r, u, a)).measure == expected, "pairing is not A u' dx");
    return true;
}

bool continuous_field(gen::Rng& r, Recorder& rec) {
    const gen::Domain d = gen::domain(r);
    const DMField1D a(gen::continuous_linear(r, d, static_cast<int>(r.uniform(1, 4))));
    const PiecewiseBV u = gen::piecewise(r, d, static_cast<int>(r.uniform(2, 5)), 2, 0.8);
    Measure1D expected = oracle::absolutely_continuous_part(a.profile(), u);
    for (const auto& j : u.jumps())
        expected += Measure1D::dirac(d.lo, d.hi, j.x, a.profile().right_limit(j.x) * (j.right - j.left));
    const LambdaSelector lam = gen::selector(r, u, a);
    rec.expect(pairing_by_definition(a, u, lam).measure == expected, "pairing is not A Du");
    rec.expect(jump_correction(a, u, lam).is_zero(), "nonzero jump correction");
    return true;
}

bool nonlinearity(gen::Rng& r, Recorder& rec) {
    Triple t = triple(r);
    if (r.coin(1.0 / 3)) t.u = gen::with_cantor(r, t.d, t.u, special_points(t.a, t.u));
    const Measure1D sum =
        pairing_by_definition(t.a, t.u, t.lambda).measure + pairing_by_definition(t.a, -t.u, t.lambda).measure;
    std::map<Rational, Rational> atoms;
    if (!t.u.has_staircase()) {
        atoms = oracle::nonlinearity_atoms(t.a.profile(), t.u, t.lambda);
    } else {
        for (const auto& j : t.u.jumps()) {
            const Rational w = (1 - 2 * t.lambda.at(j.x)) * (j.upper() - j.lower()) * t.a.divergence().atom(j.x);
            if (w != 0) atoms[j.x] = w;
        }
    }
    rec.expect(sum == Measure1D(t.d.lo, t.d.hi, {}, atoms, {}), "P(u) + P(-u) differs from the jump term");
    rec.expect(verify_nonlinearity(t.a, t.u, t.lambda).pass, "verify_nonlinearity failed");
    return true;
}

bool lattice(gen::Rng& r, Recorder& rec) {
    const Triple t = triple(r, 1);
    const ExtremalPairings ex = extremal_pairings(t.a, t.u);
    for (int k = 0; k < 2; ++k) {
        const BorelSet1D b = gen::borel_set(r, t.d, special_points(t.a, t.u));
        const auto [lo, hi] = oracle::extremal_by_enumeration(t.a, t.u, b);
        rec.expect(ex.lsc.eval(b).value == lo, "lsc pairing is not the minimum on " + b.to_string());
        rec.expect(ex.usc.eval(b).value == hi, "usc pairing is not the maximum on " + b.to_string());
    }
    const Measure1D p = pairing_by_definition(t.a, t.u, t.lambda).measure;
    rec.expect(lattice_min(ex.lsc, p) == ex.lsc, "lsc pairing above another pairing");
    rec.expect(lattice_max(ex.usc, p) == ex.usc, "usc pairing below another pairing");
    return true;
}

bool pointwise_limits(gen::Rng& r, Recorder& rec) {
    const gen::Domain d = gen::domain(r);
    const PiecewiseBV u = gen::piecewise(r, d, static_cast<int>(r.uniform(2, 5)), 1, 0.8);
    const Side side = r.coin() ? Side::Upper : Side::Lower;
    const Rational tv = u.total_variation().value;
    Rational prev_l1 = -1, prev_gap = -1;
    for (int n : {2, 5, 17, 40}) {
        const PiecewiseBV un = one_sided_sequence(u, side, n);
        for (const auto& j : u.jumps()) {
            const ApproxLimits lim = un.limits(j.x);
            rec.expect(j.lower() <= lim.lower && lim.lower <= lim.upper && lim.upper <= j.upper(),
                       "u^- <= u_n^- <= u_n^+ <= u^+ fails at " + to_string(j.x));
        }
        const Rational l1 = (un - u).l1_norm().value;
        if (prev_l1 >= 0) rec.expect(l1 <= prev_l1, "L1 distance grows");
        prev_l1 = l1;
        const Rational gap = tv - un.total_variation().value;
        rec.expect(gap >= 0, "total variation grows");
        if (prev_gap >= 0) rec.expect(gap <= prev_gap, "total variation gap grows");
        prev_gap = gap;
    }
    return true;
}

bool lsc_family(gen::Rng& r, Recorder& rec) {
    const gen::Domain d = gen::domain(r);
    const DMField1D a(gen::piecewise(r, d, static_cast<int>(r.uniform(1, 3)), 1, 0.9));
    const PiecewiseBV u = gen::piecewise(r, d, static_cast<int>(r.uniform(2, 4)), 1, 0.9);
    const LambdaSelector lam = lsc_selector(a, gen::selector(r, u, a));
    SequenceSpec seq;
    seq.kind = r.coin() ? SequenceKind::Upper : SequenceKind::Lower;
    seq.negate = r.coin();
    const std::vector<PiecewisePoly> phis{gen::nonnegative_test_function(r, d), gen::nonnegative_test_function(r, d)};
    const auto out = semicontinuity_experiment(a, lam, u, seq, phis);
    rec.expect(out.strict, "sequence not certified strict");
    rec.expect(out.lahti_holds, "pointwise bounds fail");
    rec.expect(!out.lsc_violated(), "lower semicontinuity violated");
    rec.expect(out.report.pass, "semicontinuity report failed");
    return true;
}

bool coarea(gen::Rng& r, Recorder& rec) {
    const Triple t = triple(r, 1);
    const std::vector<PiecewisePoly> phis{gen::test_function(r, t.d), gen::test_function(r, t.d)};
    const CheckReport rep = verify_coarea(t.a, t.u, t.lambda, phis);
    rec.expect(rep.exact && rep.pass, "coarea residual " + to_string(rep.residual));
    rec.expect(verify_theta_slicing(t.a, t.u, t.lambda).pass, "theta slicing failed");
    return true;
}

bool gauss_green_family(gen::Rng& r, Recorder& rec) {
    Triple t = triple(r);
    if (r.coin(0.25)) t.u = gen::with_cantor(r, t.d, t.u, special_points(t.a, t.u));
    std::vector<Rational> ends = gen::cuts(r, t.d, 2);
    if (ends.size() < 2) return false;
    const auto sp = special_points(t.a, t.u);
    if (!sp.empty() && r.coin()) ends[0] = sp[static_cast<std::size_t>(r.uniform(0, static_cast<long>(sp.size()) - 1))];
    if (ends[0] == ends[1]) return false;
    const Rational c = min_q(ends[0], ends[1]), d = max_q(ends[0], ends[1]);
    const CheckReport rep = gauss_green(t.a, t.u, t.lambda, c, d, CheckOptions{1e-9});
    rec.expect(rep.pass, "Gauss-Green residual " + to_string(rep.residual));
    return true;
}

bool chain_rule(gen::Rng& r, Recorder& rec) {
    const Triple t = triple(r, 1);
    const Rational bound = t.u.sup_norm().value + 1;
    const PiecewisePoly h = gen::lipschitz_map(r, bound, r.coin());
    rec.expect(verify_chain_rule(t.a, t.u, t.lambda, h).pass, "chain rule failed for h = " + h.to_string());
    Rational k(r.uniform(1, 6), 2);
    k.canonicalize();
    const PiecewisePoly tk({-bound - k, -k, k, bound + k}, {Polynomial(-k), Polynomial::x(), Polynomial(k)});
    rec.expect(t.u.compose(tk) == t.u.truncate(k), "T_k(u) differs from the truncation operator");
    rec.expect(verify_chain_rule(t.a, t.u, t.lambda, tk).pass, "chain rule failed for T_k");
    return true;
}

bool leibniz(gen::Rng& r, Recorder& rec) {
    const Triple t = triple(r, 1);
    PiecewiseBV v = gen::piecewise(r, t.d, static_cast<int>(r.uniform(1, 4)), 1, 0.7);
    if (r.coin() && !t.u.jumps().empty())
        v = v + PiecewiseBV::indicator(t.d.lo, t.d.hi, t.u.jumps().front().x, t.d.hi);
    rec.expect(verify_leibniz(t.a, t.u, v, t.lambda).pass, "Leibniz failed");
    return true;
}

bool resto(gen::Rng& r, Recorder& rec) {
    Triple t = triple(r);
    if (r.coin(1.0 / 3)) t.u = gen::with_cantor(r, t.d, t.u, special_points(t.a, t.u));
    rec.expect(resto_identity(t.a, t.u, t.lambda).is_zero(), "resto identity nonzero");
    rec.expect(verify_resto(t.a, t.u, t.lambda).pass, "verify_resto failed");
    rec.expect(verify_two_path(t.a, t.u, t.lambda, CheckOptions{1e-9}).pass, "verify_two_path failed");
    return true;
}

Family make(const std::string& name, long base, bool (*body)(gen::Rng&, Recorder&)) {
    return {name, [name, base, body](int n) { return run_family(name, n, base, body); }};
}

} // namespace

const std::vector<Family>& all() {
    static const std::vector<Family> fams{
        make("two routes agree", 1000, two_routes),
        make("action matches integration by parts", 2000, integration_by_parts),
        make("domination by the sup norm", 3000, domination),
        make("selector independence without atoms", 4000, selector_independence),
        make("Sobolev functions pair as A u' dx", 5000, sobolev),
        make("continuous fields pair as A Du", 6000, continuous_field),
        make("nonlinearity identity", 7000, nonlinearity),
        make("lattice min and max by enumeration", 8000, lattice),
        make("pointwise bounds along one-sided sequences", 9000, pointwise_limits),
        make("lower semicontinuity for the lsc family", 10000, lsc_family),
        make("coarea and theta slicing", 11000, coarea),
        make("Gauss-Green balances", 12000, gauss_green_family),
        make("chain rule", 13000, chain_rule),
        make("Leibniz formula", 14000, leibniz),
        make("jump correction identity", 15000, resto),
    };
    return fams;
}

} // namespace families
