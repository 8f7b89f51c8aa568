#include "bvpair/theorems.hpp"

#include "bvpair/error.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace bvpair {

namespace {

std::string str(const Rational& r) { return bvpair::to_string(r); }

std::string list(const std::vector<Rational>& xs) {
    std::string s = "[";
    for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? " " : "") + str(xs[k]);
    return s + "]";
}

Approx diff(const Approx& a, const Approx& b) { return {a.value - b.value, a.exact && b.exact}; }

void check_domains(const DMField1D& a, const PiecewiseBV& u) {
    if (a.lo() != u.lo() || a.hi() != u.hi()) throw Error(ErrorCode::InvalidArgument, "field and function domains differ");
}

void check_phi(const PiecewisePoly& phi, const PiecewiseBV& u) {
    if (phi.lo() != u.lo() || phi.hi() != u.hi())
        throw Error(ErrorCode::InvalidArgument, "test function domain differs from the function domain");
}

void sort_unique(std::vector<Rational>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Diffuse part (a.c. plus Cantor) of a pairing.
Measure1D diffuse_part(const PairingResult& p) { return p.ac + p.diffuse; }

int degree0(int d) { return d < 0 ? 0 : d; }

} // namespace

// ------------------------------------------------------------------ reports

void CheckReport::add(const Rational& r) { residual += abs_q(r); }

void CheckReport::add(const Approx& r) {
    residual += abs_q(r.value);
    exact = exact && r.exact;
}

void CheckReport::add(const Measure1D& m) {
    if (m.is_zero()) return;
    const Approx tv = total_variation(m).mass();
    add(tv);
    residual_measure = residual_measure ? *residual_measure + m : m;
}

void CheckReport::settle(double quadrature_tolerance) {
    if (exact) {
        tolerance = 0;
        pass = residual == 0;
    } else {
        tolerance = quadrature_tolerance;
        pass = residual.get_d() <= quadrature_tolerance;
    }
}

std::string CheckReport::to_text() const {
    std::ostringstream os;
    os << "check " << name << ": " << (pass ? "PASS" : "FAIL") << " residual=" << str(residual);
    if (!exact) os << " (~" << residual.get_d() << ")";
    os << " tolerance=" << tolerance << (exact ? " exact" : " approximate") << '\n';
    for (const auto& [k, v] : witnesses) os << "  " << k << ": " << v << '\n';
    if (residual_measure) os << "  residual measure: " << residual_measure->to_string() << '\n';
    return os.str();
}

nlohmann::json CheckReport::to_json() const {
    nlohmann::json w = nlohmann::json::object();
    for (const auto& [k, v] : witnesses) w[k] = v;
    nlohmann::json j = {{"name", name},          {"residual", str(residual)}, {"exact", exact},
                        {"tolerance", tolerance}, {"pass", pass},              {"witnesses", w}};
    if (residual_measure) j["residual_measure"] = residual_measure->to_string();
    return j;
}

// ------------------------------------------------------------------ helpers

Polynomial interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
    if (xs.size() != ys.size() || xs.empty()) throw Error(ErrorCode::InvalidArgument, "interpolation needs matching nodes");
    Polynomial out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Polynomial basis(1);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            const Rational den = xs[i] - xs[j];
            if (den == 0) throw Error(ErrorCode::InvalidArgument, "repeated interpolation node");
            basis *= Polynomial::linear(-xs[j] / den, 1 / den);
        }
        out += basis * ys[i];
    }
    return out;
}

StairPoly piece_at(const PiecewiseBV& f, const Rational& l, const Rational& r) {
    const auto& bps = f.breakpoints();
    for (std::size_t k = 0; k + 1 < bps.size(); ++k)
        if (bps[k] <= l && r <= bps[k + 1]) return f.pieces()[k].restrict_to(l, r);
    throw Error(ErrorCode::InvalidArgument, "interval (" + str(l) + "," + str(r) + ") straddles a breakpoint");
}

// ------------------------------------------------------------------ identities

CheckReport verify_two_path(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                            const CheckOptions& opt) {
    CheckReport r;
    r.name = "two_path";
    const auto def = pairing_by_definition(a, u, lambda);
    const auto dec = pairing_by_decomposition(a, u, lambda);
    r.add(def.measure - dec.measure);
    r.witness("selector", lambda.to_string());
    r.witness("pairing", def.measure.to_string());
    r.settle(opt.tolerance);
    return r;
}

CheckReport verify_resto(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda, const CheckOptions& opt) {
    CheckReport r;
    r.name = "resto";
    r.add(resto_identity(a, u, lambda));
    r.witness("jump_correction", jump_correction(a, u, lambda).to_string());
    r.settle(opt.tolerance);
    return r;
}

CheckReport verify_nonlinearity(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                                const CheckOptions& opt) {
    CheckReport r;
    r.name = "nonlinearity";
    const Measure1D p = pairing_by_definition(a, u, lambda).measure;
    const Measure1D m = pairing_by_definition(a, -u, lambda).measure;
    const Measure1D corr = jump_correction(a, u, lambda) * Rational(2);
    r.add(p + m - corr);
    r.witness("sum", (p + m).to_string());
    r.settle(opt.tolerance);
    return r;
}

CheckReport verify_extremal(const DMField1D& a, const PiecewiseBV& u, const CheckOptions& opt) {
    CheckReport r;
    r.name = "extremal";
    const auto ex = extremal_pairings(a, u);
    const Measure1D p0 = pairing_by_definition(a, u, LambdaSelector::constant(0)).measure;
    const Measure1D p1 = pairing_by_definition(a, u, LambdaSelector::constant(1)).measure;
    r.add(ex.lsc - lattice_min(p0, p1));
    r.add(ex.usc - lattice_max(p0, p1));
    r.add(pairing_by_definition(a, u, lsc_selector(a)).measure - ex.lsc);
    r.add(pairing_by_definition(a, u, usc_selector(a)).measure - ex.usc);
    r.witness("lsc", ex.lsc.to_string());
    r.witness("usc", ex.usc.to_string());
    r.settle(opt.tolerance);
    return r;
}

CheckReport verify_domination(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                              const CheckOptions& opt) {
    CheckReport r;
    r.name = "domination";
    const Measure1D p = pairing_by_definition(a, u, lambda).measure;
    const Approx bound = a.sup_norm();
    const Measure1D slack = total_variation(u.derivative()) * bound.value - total_variation(p);
    r.add(jordan(slack).second);
    if (!bound.exact) r.witness("sup_norm", "upper bound " + str(bound.value));
    r.settle(opt.tolerance);
    return r;
}

// ------------------------------------------------------------------ coarea

namespace {

std::vector<Rational> level_partition(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                                      const std::vector<PiecewisePoly>& phis) {
    if (!u.piecewise_linear()) throw Error(ErrorCode::DegreeUnsupported, "level-set slicing needs piecewise linear u");
    if (a.profile().has_staircase()) throw Error(ErrorCode::Unsupported, "level-set slicing of a staircase field");
    std::vector<Rational> levels = u.critical_values();
    std::vector<Rational> points = a.profile().breakpoints();
    for (const auto& phi : phis) points.insert(points.end(), phi.breakpoints().begin(), phi.breakpoints().end());
    for (const auto& [x, l] : lambda.overrides()) points.push_back(x);
    for (const auto& x : points) {
        if (x > u.lo()) levels.push_back(u.left_limit(x));
        if (x < u.hi()) levels.push_back(u.right_limit(x));
    }
    sort_unique(levels);
    return levels;
}

} // namespace

CheckReport verify_coarea(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                          const std::vector<PiecewisePoly>& phis, const CheckOptions& opt) {
    check_domains(a, u);
    for (const auto& phi : phis) check_phi(phi, u);
    CheckReport r;
    r.name = "coarea";
    const std::vector<Rational> levels = level_partition(a, u, lambda, phis);
    int phi_degree = 0;
    for (const auto& phi : phis) phi_degree = std::max(phi_degree, phi.max_degree());
    const int degree = degree0(a.profile().max_degree()) + phi_degree;

    const Measure1D whole = pairing_by_definition(a, u, lambda).measure;
    std::vector<Rational> rhs(phis.size());
    for (std::size_t c = 0; c + 1 < levels.size(); ++c) {
        const Rational &t0 = levels[c], &t1 = levels[c + 1];
        std::vector<Rational> ts;
        std::vector<std::vector<Rational>> gs(phis.size());
        for (int i = 1; i <= degree + 2; ++i) {
            const Rational t = t0 + (t1 - t0) * Rational(i, degree + 3);
            ts.push_back(t);
            const Measure1D slice = pairing_by_definition(a, u.level_set(t).indicator(), lambda).measure;
            for (std::size_t k = 0; k < phis.size(); ++k) {
                const Approx g = slice.act(phis[k]);
                if (!g.exact) r.exact = false;
                gs[k].push_back(g.value);
            }
        }
        const std::vector<Rational> fit_t(ts.begin(), ts.end() - 1);
        for (std::size_t k = 0; k < phis.size(); ++k) {
            const Polynomial g = interpolate(fit_t, std::vector<Rational>(gs[k].begin(), gs[k].end() - 1));
            const Rational mismatch = g(ts.back()) - gs[k].back();
            if (mismatch != 0) {
                r.add(mismatch);
                r.witness("interpolation_mismatch_" + std::to_string(c) + "_" + std::to_string(k), str(mismatch));
            }
            rhs[k] += g.integrate(t0, t1);
        }
    }
    r.series_header = {"phi", "lhs", "rhs"};
    for (std::size_t k = 0; k < phis.size(); ++k) {
        const Approx lhs = whole.act(phis[k]);
        r.add(diff(lhs, Approx{rhs[k], true}));
        r.series.push_back({std::to_string(k), str(lhs.value), str(rhs[k])});
        r.witness("phi_" + std::to_string(k), phis[k].to_string());
        r.witness("lhs_" + std::to_string(k), str(lhs.value));
        r.witness("rhs_" + std::to_string(k), str(rhs[k]));
    }
    r.witness("t_partition", list(levels));
    r.settle(opt.tolerance);
    return r;
}

CheckReport verify_theta_slicing(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                                 const std::vector<Rational>& levels, const CheckOptions& opt) {
    check_domains(a, u);
    CheckReport r;
    r.name = "theta_slicing";
    std::vector<Rational> ts = levels;
    if (ts.empty()) {
        const auto cells = level_partition(a, u, lambda, {});
        for (std::size_t c = 0; c + 1 < cells.size(); ++c) ts.push_back((cells[c] + cells[c + 1]) / 2);
    } else if (!u.piecewise_linear()) {
        throw Error(ErrorCode::DegreeUnsupported, "level-set slicing needs piecewise linear u");
    }
    const ThetaTable theta = pairing_by_definition(a, u, lambda).theta;
    r.series_header = {"t", "x", "theta_level", "theta_u"};
    std::size_t compared = 0;
    for (const auto& t : ts) {
        const LevelSet ls = u.level_set(t);
        if (ls.boundary.empty()) continue;
        const ThetaTable slice = pairing_by_definition(a, ls.indicator(), lambda).theta;
        for (const auto& [x, nu] : ls.boundary) {
            try {
                const Rational lhs = slice.at(x), rhs = theta.at(x);
                r.add(lhs - rhs);
                r.series.push_back({str(t), str(x), str(lhs), str(rhs)});
                ++compared;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::UndefinedDensity) throw;
                r.witness("skipped_" + str(t) + "_" + str(x), e.what());
            }
        }
    }
    r.witness("levels", list(ts));
    r.witness("compared_points", std::to_string(compared));
    r.settle(opt.tolerance);
    return r;
}

// ------------------------------------------------------------------ chain rule

CheckReport verify_chain_rule(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda,
                              const PiecewisePoly& h, const CheckOptions& opt) {
    check_domains(a, u);
    CheckReport r;
    r.name = "chain_rule";
    const PiecewiseBV hu = u.compose(h);
    const auto p = pairing_by_definition(a, u, lambda);
    const auto ph = pairing_by_definition(a, hu, lambda);
    const auto ph_std = pairing_by_definition(a, hu, LambdaSelector());

    // (i) the diffuse part does not see lambda; the a.c. part is h'(u) A u'.
    r.add(diffuse_part(ph) - diffuse_part(ph_std));
    std::vector<Rational> cuts = u.breakpoints();
    cuts.insert(cuts.end(), a.profile().breakpoints().begin(), a.profile().breakpoints().end());
    const auto& hb = h.breakpoints();
    for (std::size_t k = 0; k + 1 < u.breakpoints().size(); ++k) {
        const Rational &l = u.breakpoints()[k], &rr = u.breakpoints()[k + 1];
        for (std::size_t j = 1; j + 1 < hb.size(); ++j)
            for (const auto& x : level_crossings(u.pieces()[k], l, rr, hb[j])) cuts.push_back(x);
    }
    sort_unique(cuts);
    std::vector<AcPiece> expected;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Rational &l = cuts[k], &rr = cuts[k + 1];
        const StairPoly piece = piece_at(u, l, rr);
        const StairPoly slope = piece.derivative();
        if (slope.is_zero()) continue;
        Rational mid = (l + rr) / 2;
        Rational level = piece(mid);
        if (std::binary_search(hb.begin(), hb.end(), level)) level = piece((l + 2 * rr) / 3);
        const Polynomial dh = h.pieces()[h.piece_index(level)].derivative();
        StairPoly factor;
        if (piece.is_polynomial()) {
            factor = StairPoly(dh.compose(piece.base()));
        } else {
            if (dh.degree() > 0) throw Error(ErrorCode::Unsupported, "nonlinear map applied to a staircase piece");
            factor = StairPoly(dh(0));
        }
        expected.push_back(AcPiece{l, rr, factor * piece_at(a.profile(), l, rr) * slope});
    }
    r.add(ph.ac - Measure1D(u.lo(), u.hi(), std::move(expected), {}, {}));

    const bool monotone = h.derivative().nonnegative();
    r.witness("non_decreasing", monotone ? "yes" : "no");
    if (monotone) {
        // (ii) jump part rescaled by the difference quotient of h.
        std::map<Rational, Rational> atoms;
        for (const auto& j : u.jumps()) {
            const Rational factor = (h(j.upper()) - h(j.lower())) / (j.upper() - j.lower());
            atoms.emplace(j.x, factor * p.jump.atom(j.x));
        }
        r.add(ph.jump - Measure1D(u.lo(), u.hi(), {}, std::move(atoms), {}));
        // (iii) theta is unchanged where |D h(u)| lives.
        for (const auto& [x, v] : ph.theta.atoms) r.add(v - p.theta.at(x));
        for (const auto& pc : ph.theta.diffuse)
            for (const auto& pu : p.theta.diffuse) {
                if (pc.cantor != pu.cantor) continue;
                const Rational l = max_q(pc.lo, pu.lo), rr = min_q(pc.hi, pu.hi);
                if (!(l < rr)) continue;
                const StairPoly d = pc.value.restrict_to(l, rr) - pu.value.restrict_to(l, rr);
                if (!d.is_zero()) r.add(PiecewiseBV({l, rr}, {d}).l1_norm());
            }
    }
    r.witness("h", h.to_string());
    r.witness("pairing_h", ph.measure.to_string());
    r.settle(opt.tolerance);
    return r;
}

// ------------------------------------------------------------------ Leibniz

CheckReport verify_leibniz(const DMField1D& a, const PiecewiseBV& u, const PiecewiseBV& v, const LambdaSelector& lambda,
                           const CheckOptions& opt) {
    check_domains(a, u);
    check_domains(a, v);
    CheckReport r;
    r.name = "leibniz";
    const auto p = pairing_by_definition(a, u, lambda);
    const auto pv = pairing_by_definition(product_field(v, a), u, lambda);
    r.add(diffuse_part(pv) - lambda_times(v, LambdaSelector(), diffuse_part(p)));
    std::map<Rational, Rational> atoms;
    for (const auto& j : u.jumps()) {
        const int nu = j.nu();
        const TraceTriple t = normal_trace(a, j.x, nu);
        const Rational vi = nu == 1 ? v.right_limit(j.x) : v.left_limit(j.x);
        const Rational ve = nu == 1 ? v.left_limit(j.x) : v.right_limit(j.x);
        const Rational l = lambda.at(j.x);
        atoms.emplace(j.x, ((1 - l) * t.plus * vi + l * t.minus * ve) * (j.upper() - j.lower()));
    }
    const Measure1D expected_jump(u.lo(), u.hi(), {}, std::move(atoms), {});
    r.add(pv.jump - expected_jump);
    r.witness("v", v.to_string());
    r.witness("jump_part", pv.jump.to_string());
    r.settle(opt.tolerance);
    return r;
}

// ------------------------------------------------------------------ Gauss-Green

CheckReport gauss_green(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda, const Rational& c,
                        const Rational& d, const CheckOptions& opt) {
    check_domains(a, u);
    if (!(u.lo() < c && c < d && d < u.hi()))
        throw Error(ErrorCode::InvalidArgument, "Gauss-Green needs lo < c < d < hi");
    CheckReport r;
    r.name = "gauss_green";
    const Measure1D pd = lambda_times(u, lambda, a.divergence());
    const Measure1D p = pairing_by_definition(a, u, lambda).measure;
    const BorelSet1D interior = BorelSet1D::interval(c, d), closure = BorelSet1D::closed(c, d);
    auto integrate_over = [&](const BorelSet1D& e) {
        const Approx x = pd.eval(e), y = p.eval(e);
        return Approx{x.value + y.value, x.exact && y.exact};
    };
    const TraceTriple tc = normal_trace(a, c, 1), td = normal_trace(a, d, -1);
    const Rational ui_c = u.right_limit(c), ui_d = u.left_limit(d);
    const Rational ue_c = u.left_limit(c), ue_d = u.right_limit(d);
    const Approx lhs1 = integrate_over(interior), lhs2 = integrate_over(closure);
    const Rational rhs1 = -(tc.plus * ui_c + td.plus * ui_d);
    const Rational rhs2 = -(tc.minus * ue_c + td.minus * ue_d);
    r.add(diff(lhs1, Approx{rhs1, true}));
    r.add(diff(lhs2, Approx{rhs2, true}));
    r.series_header = {"formula", "lhs", "rhs"};
    r.series.push_back({"interior", str(lhs1.value), str(rhs1)});
    r.series.push_back({"closure", str(lhs2.value), str(rhs2)});
    r.witness("E", "(" + str(c) + "," + str(d) + ")");
    r.witness("interior_lhs", str(lhs1.value));
    r.witness("interior_rhs", str(rhs1));
    r.witness("closure_lhs", str(lhs2.value));
    r.witness("closure_rhs", str(rhs2));
    r.witness("boundary_terms", str(lhs2.value - lhs1.value));
    r.settle(opt.tolerance);
    return r;
}

// ------------------------------------------------------------------ mollification

CheckReport verify_mollification(const DMField1D& a, const PiecewisePoly& phi, const Rational& eps0, double floor,
                                 const CheckOptions& opt) {
    check_phi(phi, a.profile());
    CheckReport r;
    r.name = "mollification";
    const Approx target = a.divergence().act(phi);
    r.exact = target.exact;
    r.series_header = {"eps", "error", "ratio", "trace_deviation"};
    Rational eps = eps0;
    std::optional<Rational> prev, prev_dev;
    for (int k = 0; k < 64; ++k, eps /= 2) {
        const DMField1D m = mollify(a, eps);
        // A_eps at a jump tends to Tr^*; equality is exact for locally constant fields.
        Rational dev = 0;
        for (const auto& j : a.profile().jumps())
            dev = max_q(dev, abs_q(m.profile().right_limit(j.x) - normal_trace(a, j.x, 1).star));
        if (prev_dev && dev > *prev_dev / 2) r.add(dev - *prev_dev / 2);
        const Approx got = m.divergence().act(phi);
        const Rational err = abs_q(got.value - target.value);
        if (prev && err > *prev / 2) r.add(err - *prev / 2);
        r.series.push_back({str(eps), str(err), prev && *prev != 0 ? std::to_string(Rational(err / *prev).get_d()) : std::string(),
                            str(dev)});
        prev = err;
        prev_dev = dev;
        if (err.get_d() < floor && dev.get_d() < floor) break;
    }
    r.witness("eps_final", str(eps));
    r.witness("error_final", prev ? std::to_string(prev->get_d()) : "");
    r.witness("trace_deviation_final", prev_dev ? std::to_string(prev_dev->get_d()) : "");
    if (prev_dev && prev_dev->get_d() >= floor) r.add(*prev_dev);
    if (prev && prev->get_d() >= floor) r.add(*prev);
    r.settle(opt.tolerance);
    return r;
}

// ------------------------------------------------------------------ sequences

const char* to_string(Side s) { return s == Side::Upper ? "upper" : "lower"; }

const char* to_string(SequenceKind k) {
    switch (k) {
    case SequenceKind::Upper: return "upper";
    case SequenceKind::Lower: return "lower";
    case SequenceKind::Hat: return "hat";
    }
    return "upper";
}

std::string SequenceSpec::to_string() const {
    std::string s = bvpair::to_string(kind);
    if (kind == SequenceKind::Hat) s += "(" + str(center) + "," + str(height) + ")";
    if (negate) s = "-" + s;
    return s;
}

namespace {

Rational min_gap(std::vector<Rational> pts) {
    sort_unique(pts);
    Rational gap = pts.back() - pts.front();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) gap = min_q(gap, pts[k + 1] - pts[k]);
    return gap;
}

struct Ramp {
    Rational l;
    Rational r;
    Polynomial p;
};

PiecewiseBV apply_ramps(const PiecewiseBV& u, const std::vector<Ramp>& ramps) {
    std::vector<Rational> cuts = u.breakpoints();
    for (const auto& rp : ramps) {
        cuts.push_back(rp.l);
        cuts.push_back(rp.r);
    }
    sort_unique(cuts);
    std::vector<StairPoly> pieces;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Rational &l = cuts[k], &r = cuts[k + 1];
        const Ramp* hit = nullptr;
        for (const auto& rp : ramps)
            if (rp.l <= l && r <= rp.r) hit = &rp;
        pieces.push_back(hit ? StairPoly(hit->p) : piece_at(u, l, r));
    }
    return PiecewiseBV(std::move(cuts), std::move(pieces));
}

Polynomial through(const Rational& x0, const Rational& y0, const Rational& x1, const Rational& y1) {
    const Rational slope = (y1 - y0) / (x1 - x0);
    return Polynomial::linear(y0 - slope * x0, slope);
}

} // namespace

PiecewiseBV one_sided_ramps(const PiecewiseBV& u, Side side, const Rational& h) {
    if (u.has_staircase()) throw Error(ErrorCode::Unsupported, "ramp approximation of a staircase function");
    if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "ramp width must be positive");
    std::vector<Ramp> ramps;
    for (const auto& j : u.jumps()) {
        const bool rising = j.right > j.left;
        // Upper ramps sit on the low side, lower ramps on the high side.
        const bool left_side = (side == Side::Upper) == rising;
        if (left_side) {
            const Rational l = j.x - h;
            if (!(l > u.lo())) throw Error(ErrorCode::InvalidArgument, "ramp leaves the domain");
            const Rational y0 = piece_at(u, l, j.x)(l);
            ramps.push_back({l, j.x, through(l, y0, j.x, j.right)});
        } else {
            const Rational r = j.x + h;
            if (!(r < u.hi())) throw Error(ErrorCode::InvalidArgument, "ramp leaves the domain");
            const Rational y1 = piece_at(u, j.x, r)(r);
            ramps.push_back({j.x, r, through(j.x, j.left, r, y1)});
        }
    }
    if (ramps.empty()) return u;
    return apply_ramps(u, ramps);
}

namespace {

// Largest width below `cap` for which no ramp changes monotonicity and no
// critical point of the replaced piece enters a ramp; beyond it the
// sequence quantities are polynomial in the width.
Rational ramp_shape_width(const PiecewiseBV& u, Side side, const Rational& cap) {
    Rational width = cap;
    for (const auto& j : u.jumps()) {
        const bool rising = j.right > j.left;
        const bool left_side = (side == Side::Upper) == rising;
        const Polynomial p = left_side ? piece_at(u, j.x - cap, j.x).base() : piece_at(u, j.x, j.x + cap).base();
        const Rational target = left_side ? j.right : j.left;
        const Polynomial along = p.compose(Polynomial::linear(j.x, left_side ? -1 : 1));
        Polynomial shape = along - Polynomial(target);
        if (p.degree() >= 2) shape *= along.derivative();
        if (shape.is_zero()) continue;
        const auto roots = isolate_roots(shape, 0, cap, Rational(1, 1 << 20));
        if (!roots.empty()) width = min_q(width, roots.front().lo);
    }
    return width;
}

} // namespace

PiecewiseBV one_sided_sequence(const PiecewiseBV& u, Side side, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "sequence index must be positive");
    const Rational h = min_q(Rational(1, n), min_gap(u.breakpoints()) / 2);
    return one_sided_ramps(u, side, h);
}

TailLimit tail_limit(const std::function<Approx(int)>& f, int n0, int degree) {
    std::vector<Rational> hs, ys;
    bool exact = true;
    for (int n = n0; n <= n0 + degree + 2; ++n) {
        const Approx v = f(n);
        exact = exact && v.exact;
        hs.emplace_back(1, n);
        ys.push_back(v.value);
    }
    const std::size_t fit = static_cast<std::size_t>(degree) + 1;
    const Polynomial p = interpolate(std::vector<Rational>(hs.begin(), hs.begin() + fit),
                                     std::vector<Rational>(ys.begin(), ys.begin() + fit));
    bool confirmed = exact;
    for (std::size_t k = fit; k < hs.size(); ++k) confirmed = confirmed && p(hs[k]) == ys[k];
    for (int far : {16, 256}) {
        if (!confirmed) break;
        const int n = (n0 + degree + 2) * far;
        const Approx v = f(n);
        confirmed = v.exact && p(Rational(1, n)) == v.value;
    }
    if (confirmed) return {p(0), true, 0, n0 + degree + 2};

    // Richardson along n0 2^k: polynomial extrapolation of the tail to h = 0.
    std::vector<Rational> rh, ry;
    int n = n0;
    for (int k = 0; k < 6; ++k, n *= 2) {
        rh.emplace_back(1, n);
        ry.push_back(f(n).value);
    }
    const Rational best = interpolate(rh, ry)(0);
    const Rational prev = interpolate(std::vector<Rational>(rh.begin() + 1, rh.end()),
                                      std::vector<Rational>(ry.begin() + 1, ry.end()))(0);
    return {best, false, abs_q(best - prev), n / 2};
}

bool SemicontinuityOutcome::lsc_violated() const {
    return std::any_of(per_phi.begin(), per_phi.end(), [](const PhiOutcome& p) { return p.lsc_violated; });
}

bool SemicontinuityOutcome::usc_violated() const {
    return std::any_of(per_phi.begin(), per_phi.end(), [](const PhiOutcome& p) { return p.usc_violated; });
}

SemicontinuityOutcome semicontinuity_experiment(const DMField1D& a, const LambdaSelector& lambda, const PiecewiseBV& u,
                                                const SequenceSpec& seq, const std::vector<PiecewisePoly>& phis,
                                                bool allow_weak_star, const CheckOptions& opt) {
    check_domains(a, u);
    for (const auto& phi : phis) {
        check_phi(phi, u);
        if (!phi.nonnegative()) throw Error(ErrorCode::InvalidArgument, "semicontinuity needs nonnegative test functions");
    }
    if (u.has_staircase() || a.profile().has_staircase())
        throw Error(ErrorCode::Unsupported, "sequence experiments need staircase-free data");

    SemicontinuityOutcome out;
    CheckReport& r = out.report;
    r.name = "semicontinuity";
    const PiecewiseBV limit_u = seq.negate ? -u : u;

    std::vector<Rational> pts = u.breakpoints();
    pts.insert(pts.end(), a.profile().breakpoints().begin(), a.profile().breakpoints().end());
    for (const auto& phi : phis) pts.insert(pts.end(), phi.breakpoints().begin(), phi.breakpoints().end());
    if (seq.kind == SequenceKind::Hat) {
        if (!(u.lo() < seq.center && seq.center < u.hi())) throw Error(ErrorCode::InvalidArgument, "hat center outside the domain");
        pts.push_back(seq.center);
    }
    const Rational gap = min_gap(pts);
    Rational width = gap / 2;
    if (seq.kind != SequenceKind::Hat) width = min_q(width, ramp_shape_width(u, seq.kind == SequenceKind::Upper ? Side::Upper : Side::Lower, width));
    int n0 = 2;
    while (Rational(1, n0) >= width) ++n0;

    std::map<int, PiecewiseBV> cache;
    auto term = [&](int n) -> const PiecewiseBV& {
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
        PiecewiseBV un;
        if (seq.kind == SequenceKind::Hat) {
            const Rational h(1, n);
            un = u + PiecewiseBV::from_poly(PiecewisePoly::linear_interpolant(
                         {u.lo(), seq.center - h, seq.center, seq.center + h, u.hi()}, {0, 0, seq.height, 0, 0}));
        } else {
            un = one_sided_ramps(u, seq.kind == SequenceKind::Upper ? Side::Upper : Side::Lower, Rational(1, n));
        }
        if (seq.negate) un = -un;
        return cache.emplace(n, std::move(un)).first->second;
    };
    std::map<int, Measure1D> pairings;
    auto pairing_at = [&](int n) -> const Measure1D& {
        auto it = pairings.find(n);
        if (it != pairings.end()) return it->second;
        return pairings.emplace(n, pairing_by_definition(a, term(n), lambda).measure).first->second;
    };

    const int du = degree0(u.max_degree());
    int dphi = 0;
    for (const auto& phi : phis) dphi = std::max(dphi, phi.max_degree());
    const int degree = du + degree0(a.profile().max_degree()) + dphi + 2;

    // Strict convergence certificate.
    const TailLimit l1 = tail_limit([&](int n) { return (term(n) - limit_u).l1_norm(); }, n0, 2 * du + 2);
    const TailLimit tv = tail_limit([&](int n) { return term(n).total_variation(); }, n0, 2 * du + 2);
    const Approx tv_u = limit_u.total_variation();
    const Rational tv_gap = abs_q(tv.value - tv_u.value);
    const bool certified = l1.exact && tv.exact && tv_u.exact;
    out.strict = certified ? (l1.value == 0 && tv_gap == 0)
                           : (abs_q(l1.value).get_d() <= opt.tolerance && tv_gap.get_d() <= opt.tolerance);
    r.witness("sequence", seq.to_string());
    r.witness("n0", std::to_string(n0));
    r.witness("l1_limit", str(l1.value));
    r.witness("tv_limit", str(tv.value));
    r.witness("tv_u", str(tv_u.value));
    r.witness("strict", out.strict ? "yes" : "no");
    if (!out.strict && !allow_weak_star)
        throw Error(ErrorCode::NonStrictSequence, "L1 distance -> " + str(l1.value) + ", |Du_n| -> " + str(tv.value) +
                                                      " against |Du| = " + str(tv_u.value));
    r.witness("sup_u_n", str(term(n0).sup_norm().value));

    out.selector_class = selector_class(lambda, a);
    const bool check_lsc = out.selector_class != SelectorClass::Usc;
    const bool check_usc = out.selector_class != SelectorClass::Lsc;
    r.witness("selector_class", to_string(out.selector_class));

    const Measure1D target = pairing_by_definition(a, limit_u, lambda).measure;
    for (std::size_t k = 0; k < phis.size(); ++k) {
        PhiOutcome po;
        po.target = target.act(phis[k]).value;
        po.limit = tail_limit([&](int n) { return pairing_at(n).act(phis[k]); }, n0, degree);
        const Rational slack = po.limit.exact ? Rational(0) : po.limit.uncertainty;
        po.lsc_violated = po.target > po.limit.value + slack;
        po.usc_violated = po.target < po.limit.value - slack;
        if (!po.limit.exact) r.exact = false;
        if (check_lsc && po.target > po.limit.value) r.add(po.target - po.limit.value);
        if (check_usc && po.target < po.limit.value) r.add(po.limit.value - po.target);
        const std::string key = "phi_" + std::to_string(k);
        r.witness(key, phis[k].to_string());
        r.witness(key + "_pairing", str(po.target));
        r.witness(key + "_limit", str(po.limit.value));
        if (po.lsc_violated) r.witness(key + "_violates", "lsc");
        if (po.usc_violated) r.witness(key + "_violates", "usc");
        out.per_phi.push_back(po);
    }

    // Pointwise behaviour of the one-sided values at every breakpoint.
    std::vector<Rational> probe(limit_u.breakpoints().begin() + 1, limit_u.breakpoints().end() - 1);
    if (seq.kind == SequenceKind::Hat) probe.push_back(seq.center);
    sort_unique(probe);
    for (const auto& x : probe) {
        const ApproxLimits lim = limit_u.limits(x);
        const TailLimit lo = tail_limit([&](int n) { return Approx{term(n).limits(x).lower, true}; }, n0, du + 1);
        const TailLimit hi = tail_limit([&](int n) { return Approx{term(n).limits(x).upper, true}; }, n0, du + 1);
        if (!(lim.lower <= lo.value && lo.value <= hi.value && hi.value <= lim.upper)) {
            out.lahti_holds = false;
            r.witness("pointwise_violation_" + str(x),
                      str(lim.lower) + " <= " + str(lo.value) + " <= " + str(hi.value) + " <= " + str(lim.upper));
            if (out.strict) r.add(Rational(1));
        }
    }
    r.witness("pointwise_bounds", out.lahti_holds ? "hold" : "fail");

    r.series_header = {"n"};
    for (std::size_t k = 0; k < phis.size(); ++k) r.series_header.push_back("phi_" + std::to_string(k));
    for (int n = n0; n <= n0 + degree + 2; ++n) {
        std::vector<std::string> row{std::to_string(n)};
        for (const auto& phi : phis) row.push_back(str(pairing_at(n).act(phi).value));
        r.series.push_back(std::move(row));
    }
    r.settle(opt.tolerance);
    return out;
}

} // namespace bvpair
