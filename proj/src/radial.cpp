#include "bvpair/radial.hpp"

#include "bvpair/error.hpp"
#include "text_scan.hpp"

#include <algorithm>

namespace bvpair {

namespace {

std::string str(const Rational& r) { return bvpair::to_string(r); }

Rational power(const Rational& r, int k) {
    Rational out = 1;
    for (int i = 0; i < k; ++i) out *= r;
    return out;
}

void check_depth(long depth) {
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "radial depth must be at least 1");
    if (depth > kMaxRadialDepth)
        throw Error(ErrorCode::Unsupported, "depth " + std::to_string(depth) +
                                                " exceeds the exact reduction; use the summability diagnostics");
}

} // namespace

// ------------------------------------------------------------------ rules

Rational RadiusRule::at(long j) const {
    switch (kind) {
    case RadiusRuleKind::InvSq: return Rational(1) / ((j + 1) * (j + 1));
    case RadiusRuleKind::Geometric: {
        Rational out = 1;
        for (long k = 0; k < j; ++k) out *= q;
        return out;
    }
    }
    return 0;
}

Rational RadiusRule::tail_bound() const {
    if (kind == RadiusRuleKind::Geometric) return q / (1 - q);
    // pi^2 / 6 - 1 = 0.64493406684822643647..., rounded up.
    return Rational(6449340668482265, 10000000000000000);
}

std::string RadiusRule::to_string() const {
    return kind == RadiusRuleKind::InvSq ? std::string("inv_sq") : "geometric " + str(q);
}

Rational ValueRule::at(long j) const {
    switch (kind) {
    case ValueRuleKind::AltSign: return j % 2 == 0 ? 1 : -1;
    case ValueRuleKind::Const: return c;
    case ValueRuleKind::Index: return j;
    }
    return 0;
}

std::string ValueRule::to_string() const {
    switch (kind) {
    case ValueRuleKind::AltSign: return "alt_sign";
    case ValueRuleKind::Const: return "const " + str(c);
    case ValueRuleKind::Index: return "index";
    }
    return "";
}

// ------------------------------------------------------------------ profile

RadialProfile::RadialProfile(int dimension, std::vector<Rational> radii, std::vector<Polynomial> ring_values)
    : n_(dimension), radii_(std::move(radii)), values_(std::move(ring_values)) {
    if (n_ < 2) throw Error(ErrorCode::InvalidArgument, "radial profiles need dimension >= 2");
    if (radii_.size() < 2 || radii_.front() != 1) throw Error(ErrorCode::InvalidArgument, "radii must start at r_0 = 1");
    for (std::size_t k = 0; k + 1 < radii_.size(); ++k)
        if (!(radii_[k + 1] < radii_[k]) || !(radii_[k + 1] > 0))
            throw Error(ErrorCode::InvalidArgument, "radii must decrease strictly and stay positive");
    if (values_.size() != radii_.size())
        throw Error(ErrorCode::InvalidArgument, "need one value per ring plus the core");
    check_depth(depth());
}

RadialProfile RadialProfile::from_rules(int dimension, const RadiusRule& r, const ValueRule& v, long depth) {
    check_depth(depth);
    if (r.kind == RadiusRuleKind::Geometric && !(r.q > 0 && r.q < 1))
        throw Error(ErrorCode::InvalidArgument, "geometric radii need 0 < q < 1");
    std::vector<Rational> radii;
    std::vector<Polynomial> values;
    for (long j = 0; j <= depth; ++j) {
        radii.push_back(r.at(j));
        values.emplace_back(v.at(j + 1));
    }
    RadialProfile out(dimension, std::move(radii), std::move(values));
    out.radius_rule_ = r;
    out.value_rule_ = v;
    return out;
}

Polynomial RadialProfile::area_factor() const { return Polynomial::x().pow(static_cast<unsigned>(n_ - 1)); }

PiecewiseBV RadialProfile::profile() const {
    std::vector<Rational> bps{0};
    std::vector<StairPoly> pieces;
    for (std::size_t k = radii_.size(); k-- > 0;) {
        bps.push_back(radii_[k]);
        pieces.emplace_back(values_[k]);
    }
    return PiecewiseBV(std::move(bps), std::move(pieces));
}

PiecewiseBV RadialProfile::weighted() const {
    const Polynomial w = area_factor();
    std::vector<Rational> bps{0};
    std::vector<StairPoly> pieces;
    for (std::size_t k = radii_.size(); k-- > 0;) {
        bps.push_back(radii_[k]);
        pieces.emplace_back(values_[k] * w);
    }
    return PiecewiseBV(std::move(bps), std::move(pieces));
}

std::string RadialProfile::to_string() const {
    if (radius_rule_ && value_rule_)
        return "(" + std::to_string(n_) + ", " + radius_rule_->to_string() + ", " + value_rule_->to_string() + ", " +
               std::to_string(depth()) + ")";
    std::string s = "(" + std::to_string(n_) + ", radii [";
    for (std::size_t k = 0; k < radii_.size(); ++k) s += (k ? " " : "") + str(radii_[k]);
    s += "], values [";
    for (std::size_t k = 0; k < values_.size(); ++k) s += (k ? " " : "") + values_[k].to_string();
    return s + "])";
}

RadialProfile parse_radial_profile(const std::string& text) {
    detail::Scanner sc(text);
    sc.expect('(');
    const long n = sc.integer();
    sc.expect(',');
    RadiusRule r;
    if (sc.accept_word("inv_sq")) {
        r.kind = RadiusRuleKind::InvSq;
    } else if (sc.accept_word("geometric")) {
        r.kind = RadiusRuleKind::Geometric;
        r.q = sc.rational();
    } else {
        sc.fail("expected a radius rule (inv_sq | geometric q)");
    }
    sc.expect(',');
    ValueRule v;
    if (sc.accept_word("alt_sign")) {
        v.kind = ValueRuleKind::AltSign;
    } else if (sc.accept_word("const")) {
        v.kind = ValueRuleKind::Const;
        v.c = sc.rational();
    } else if (sc.accept_word("index")) {
        v.kind = ValueRuleKind::Index;
    } else {
        sc.fail("expected a value rule (alt_sign | const c | index)");
    }
    sc.expect(',');
    if (sc.accept_word("inf")) throw Error(ErrorCode::Unsupported, "infinite depth; use the summability diagnostics");
    const long depth = sc.integer();
    sc.expect(')');
    if (!sc.at_end()) sc.fail("trailing input");
    if (n < 2 || n > 64) throw Error(ErrorCode::Parse, "dimension must lie in [2, 64]");
    try {
        return RadialProfile::from_rules(static_cast<int>(n), r, v, depth);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Unsupported) throw;
        throw Error(ErrorCode::Parse, e.what());
    }
}

// ------------------------------------------------------------------ divergence

RadialDivergence radial_divergence(const RadialProfile& a) {
    RadialDivergence out;
    out.weighted = a.weighted().derivative();
    out.spheres = out.weighted.atoms();
    out.total_variation = total_variation(out.weighted).mass();
    const bool constant_rings =
        std::all_of(a.ring_values().begin(), a.ring_values().end(), [](const Polynomial& p) { return p.degree() <= 0; });
    if (constant_rings) {
        Rational sup = 0, jumps = 0;
        for (const auto& v : a.ring_values()) sup = max_q(sup, abs_q(v(0)));
        for (const auto& [r, w] : out.spheres) jumps += abs_q(w);
        out.bound = sup + jumps;
    }
    return out;
}

// ------------------------------------------------------------------ summability

SummabilityTable summability_diagnostics(const RadialProfile& a, const RadialProfile& u, long depth) {
    if (a.dimension() != u.dimension()) throw Error(ErrorCode::InvalidArgument, "field and function dimensions differ");
    if (depth < 1 || depth > a.depth() || depth > u.depth())
        throw Error(ErrorCode::InvalidArgument, "diagnostic depth exceeds the profiles");
    for (long j = 0; j <= depth; ++j)
        if (a.radii()[j] != u.radii()[j]) throw Error(ErrorCode::InvalidArgument, "field and function spheres differ");
    const int np = a.dimension() - 1;
    Rational sup = 0;
    for (long j = 1; j <= depth + 1; ++j) sup = max_q(sup, abs_q(a.ring(j)));

    SummabilityTable out;
    SummabilityRow acc;
    Rational jump_variation = 0;
    for (long j = 1; j <= depth; ++j) {
        const Rational r = a.radii()[j];
        const Rational w = power(r, np);
        const Rational ui = u.ring(j + 1), ue = u.ring(j);
        const Rational ai = a.ring(j + 1), ae = a.ring(j);
        const bool upper_inside = ui >= ue;
        const Rational up = max_q(ui, ue), um = min_q(ui, ue);
        const Rational t_plus = abs_q(upper_inside ? ai : ae), t_minus = abs_q(upper_inside ? ae : ai);
        const Rational dt = abs_q(ai - ae);
        acc.depth = j;
        acc.sum_r += r;
        acc.sum_jr += j * r;
        acc.lower_trace_inner += um * t_plus * w;
        acc.lower_trace_outer += um * t_minus * w;
        acc.upper_trace_jump += up * dt * w;
        acc.lower_trace_jump += um * dt * w;
        acc.jump_mass += (up - um) * dt * w;
        jump_variation += (up - um) * w;
        acc.jump_mass_bound = 2 * sup * jump_variation;
        out.rows.push_back(acc);
    }
    const auto& rule = u.radius_rule() ? u.radius_rule() : a.radius_rule();
    if (rule) {
        out.sum_r_limit = rule->tail_bound();
        out.sum_r_limit_exact = rule->tail_bound_exact();
    }
    return out;
}

std::optional<long> divergence_certificate(const RadiusRule& rule, const Rational& threshold, long max_depth) {
    Rational sum = 0;
    for (long j = 1; j <= max_depth; ++j) {
        sum += j * rule.at(j);
        if (sum > threshold) return j;
    }
    return std::nullopt;
}

// ------------------------------------------------------------------ pairing

RadialPairing radial_pairing(const RadialProfile& a, const RadialProfile& u, const LambdaSelector& lambda) {
    if (a.dimension() != u.dimension()) throw Error(ErrorCode::InvalidArgument, "field and function dimensions differ");
    const PiecewiseBV ap = a.profile(), up = u.profile();
    const Polynomial w = a.area_factor();
    RadialPairing out{pairing_by_definition(DMField1D(a.weighted()), up, lambda).measure, Measure1D(0, 1), {}};

    std::vector<Rational> cuts = ap.breakpoints();
    cuts.insert(cuts.end(), up.breakpoints().begin(), up.breakpoints().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<AcPiece> ac;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Rational &l = cuts[k], &r = cuts[k + 1];
        const StairPoly du = piece_at(up, l, r).derivative();
        if (du.is_zero()) continue;
        ac.push_back(AcPiece{l, r, piece_at(ap, l, r) * du * StairPoly(w)});
    }
    std::map<Rational, Rational> atoms;
    for (const auto& j : up.jumps()) {
        const bool upper_inside = j.left > j.right;
        const Rational ai = ap.left_limit(j.x), ae = ap.right_limit(j.x);
        // Normal toward the u^+ side: inward when u^+ is inside.
        const Rational tr_plus = upper_inside ? -ai : ae;
        const Rational tr_minus = upper_inside ? -ae : ai;
        const Rational l = lambda.at(j.x);
        atoms.emplace(j.x, ((1 - l) * tr_plus + l * tr_minus) * (j.upper() - j.lower()) * w(j.x));
    }
    out.spheres = atoms;
    out.jump_formula = Measure1D(0, 1, std::move(ac), std::move(atoms), {});
    return out;
}

CheckReport radial_gauss_green(const RadialProfile& a, const RadialProfile& u, const LambdaSelector& lambda,
                               const Rational& rho, const CheckOptions& opt) {
    if (!(rho > 0 && rho < 1)) throw Error(ErrorCode::InvalidArgument, "ball radius must lie in (0, 1)");
    CheckReport r;
    r.name = "radial_gauss_green";
    const DMField1D aw(a.weighted());
    const PiecewiseBV up = u.profile();
    const Measure1D pd = lambda_times(up, lambda, aw.divergence());
    const Measure1D p = pairing_by_definition(aw, up, lambda).measure;
    auto integrate_over = [&](const BorelSet1D& e) {
        const Approx x = pd.eval(e), y = p.eval(e);
        return Approx{x.value + y.value, x.exact && y.exact};
    };
    const Approx lhs1 = integrate_over(BorelSet1D::interval(0, rho));
    const Approx lhs2 = integrate_over(BorelSet1D({{Rational(0), rho}}, {rho}));
    // Interior normal of the ball points toward the origin.
    const TraceTriple t = normal_trace(aw, rho, -1);
    const Rational rhs1 = -t.plus * up.left_limit(rho);
    const Rational rhs2 = -t.minus * up.right_limit(rho);
    r.add(Approx{lhs1.value - rhs1, lhs1.exact});
    r.add(Approx{lhs2.value - rhs2, lhs2.exact});
    const bool on_sphere = std::find(u.radii().begin(), u.radii().end(), rho) != u.radii().end() ||
                           std::find(a.radii().begin(), a.radii().end(), rho) != a.radii().end();
    r.series_header = {"formula", "lhs", "rhs"};
    r.series.push_back({"interior", str(lhs1.value), str(rhs1)});
    r.series.push_back({"closure", str(lhs2.value), str(rhs2)});
    r.witness("rho", str(rho));
    r.witness("on_jump_sphere", on_sphere ? "yes" : "no");
    r.witness("interior_lhs", str(lhs1.value));
    r.witness("closure_lhs", str(lhs2.value));
    r.witness("boundary_terms", str(lhs2.value - lhs1.value));
    r.witness("units", "area of the unit sphere");
    r.settle(opt.tolerance);
    return r;
}

} // namespace bvpair
