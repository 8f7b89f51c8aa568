#include "bvpair/dm_field.hpp"

#include "bvpair/error.hpp"

#include <algorithm>

namespace bvpair {

DMField1D::DMField1D(PiecewiseBV profile)
    : profile_(std::move(profile)), divergence_(profile_.derivative()), sup_norm_(profile_.sup_norm()) {}

TraceTriple normal_trace(const DMField1D& a, const Rational& x, int nu) {
    if (nu != 1 && nu != -1) throw Error(ErrorCode::InvalidArgument, "orientation must be +1 or -1");
    if (!(a.lo() < x && x < a.hi())) throw Error(ErrorCode::InvalidArgument, "trace point outside the open domain");
    const Rational l = a.profile().left_limit(x), r = a.profile().right_limit(x);
    TraceTriple t;
    if (nu == 1) {
        t.minus = l;
        t.plus = r;
    } else {
        t.minus = -r;
        t.plus = -l;
    }
    t.star = (t.minus + t.plus) / 2;
    return t;
}

std::vector<TraceTriple> normal_traces(const DMField1D& a, const std::vector<OrientedPoint>& sigma) {
    std::vector<TraceTriple> out;
    out.reserve(sigma.size());
    for (const auto& p : sigma) out.push_back(normal_trace(a, p.x, p.nu));
    return out;
}

namespace {

BorelSet1D support_set(const Measure1D& m) {
    std::vector<std::pair<Rational, Rational>> iv;
    std::vector<Rational> pts;
    for (const auto& p : m.ac()) iv.emplace_back(p.lo, p.hi);
    for (const auto& [x, w] : m.atoms()) pts.push_back(x);
    for (const auto& c : m.cantor_parts()) {
        iv.emplace_back(c.lo, c.hi);
        pts.push_back(c.lo);
        pts.push_back(c.hi);
    }
    return BorelSet1D(std::move(iv), std::move(pts));
}

} // namespace

FieldClassification classify(const DMField1D& a) {
    const auto [pos, neg] = jordan(a.divergence());
    FieldClassification out{support_set(pos), support_set(neg), {}};
    for (const auto& [x, w] : a.divergence().atoms()) out.theta.push_back(x);
    return out;
}

const char* to_string(SelectorClass c) {
    switch (c) {
    case SelectorClass::Lsc: return "lsc";
    case SelectorClass::Usc: return "usc";
    case SelectorClass::Both: return "both";
    case SelectorClass::Neither: return "neither";
    }
    return "neither";
}

SelectorClass selector_class(const LambdaSelector& lambda, const DMField1D& a) {
    const auto& atoms = a.divergence().atoms();
    if (atoms.empty()) return SelectorClass::Both;
    bool lsc = true, usc = true;
    for (const auto& [x, w] : atoms) {
        const Rational l = lambda.at(x);
        const Rational want_lsc = w > 0 ? 1 : 0;
        if (l != want_lsc) lsc = false;
        if (l != 1 - want_lsc) usc = false;
    }
    if (lsc) return SelectorClass::Lsc;
    if (usc) return SelectorClass::Usc;
    return SelectorClass::Neither;
}

LambdaSelector lsc_selector(const DMField1D& a, const LambdaSelector& base) {
    LambdaSelector out = base;
    for (const auto& [x, w] : a.divergence().atoms()) out = out.with(x, w > 0 ? Rational(1) : Rational(0));
    return out;
}

LambdaSelector usc_selector(const DMField1D& a, const LambdaSelector& base) {
    LambdaSelector out = base;
    for (const auto& [x, w] : a.divergence().atoms()) out = out.with(x, w > 0 ? Rational(0) : Rational(1));
    return out;
}

DMField1D product_field(const PiecewiseBV& u, const DMField1D& a) { return DMField1D(u * a.profile()); }

TraceTriple product_trace_formula(const PiecewiseBV& u, const DMField1D& a, const Rational& x, int nu) {
    const TraceTriple t = normal_trace(a, x, nu);
    const Rational ui = nu == 1 ? u.right_limit(x) : u.left_limit(x);
    const Rational ue = nu == 1 ? u.left_limit(x) : u.right_limit(x);
    TraceTriple out{ue * t.minus, ui * t.plus, Rational(0)};
    out.star = (out.minus + out.plus) / 2;
    return out;
}

// ---------------------------------------------------------------- mollifier

namespace {

// Polynomial in z whose coefficients are polynomials in x.
using Bivariate = std::vector<Polynomial>;

Bivariate mul(const Bivariate& a, const Bivariate& b) {
    if (a.empty() || b.empty()) return {};
    Bivariate r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// Antiderivative in z evaluated at z = w(x), w affine.
Polynomial antiderivative_at(const Bivariate& f, const Polynomial& w) {
    Polynomial acc;
    Polynomial power = w;
    for (std::size_t k = 0; k < f.size(); ++k) {
        acc += f[k] * power * Rational(1, static_cast<long>(k + 1));
        power *= w;
    }
    return acc;
}

struct ExtPiece {
    bool lo_inf;
    bool hi_inf;
    Rational c;
    Rational d;
    Polynomial p;
};

} // namespace

Polynomial mollifier_kernel(const Rational& eps) {
    const Polynomial y2 = Polynomial{0, 0, 1} * (1 / (eps * eps));
    return (Polynomial(1) - y2).pow(2) * (Rational(15, 16) / eps);
}

DMField1D mollify(const DMField1D& a, const Rational& eps) {
    if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "mollification radius must be positive");
    const PiecewiseBV& prof = a.profile();
    if (prof.has_staircase()) throw Error(ErrorCode::Unsupported, "mollification of a staircase field");
    const auto& bps = prof.breakpoints();
    const Rational lo = prof.lo(), hi = prof.hi();
    for (std::size_t k = 1; k + 1 < bps.size(); ++k)
        if (eps >= bps[k] - lo || eps >= hi - bps[k])
            throw Error(ErrorCode::SupportOverflow, "eps = " + to_string(eps) + " reaches the boundary from breakpoint " +
                                                        to_string(bps[k]));

    std::vector<ExtPiece> ext;
    ext.push_back({true, false, Rational(0), lo, Polynomial(prof.right_limit(lo))});
    for (std::size_t k = 0; k + 1 < bps.size(); ++k) ext.push_back({false, false, bps[k], bps[k + 1], prof.pieces()[k].base()});
    ext.push_back({false, true, hi, Rational(0), Polynomial(prof.left_limit(hi))});

    // rho_eps(x - z) as a polynomial in z.
    const Polynomial kernel = mollifier_kernel(eps);
    const Bivariate diff{Polynomial::x(), Polynomial(-1)};
    Bivariate rho;
    {
        Bivariate power{Polynomial(1)};
        for (std::size_t k = 0; k < kernel.coeffs().size(); ++k) {
            Bivariate term = power;
            for (auto& c : term) c *= kernel.coeffs()[k];
            if (rho.size() < term.size()) rho.resize(term.size());
            for (std::size_t j = 0; j < term.size(); ++j) rho[j] += term[j];
            power = mul(power, diff);
        }
    }

    std::vector<Rational> cuts{lo, hi};
    for (const auto& b : bps)
        for (const Rational& c : {Rational(b - eps), Rational(b + eps)})
            if (lo < c && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<StairPoly> pieces;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Rational m = (cuts[k] + cuts[k + 1]) / 2;
        Polynomial value;
        for (const auto& e : ext) {
            // Integration window in z: [max(c, x - eps), min(d, x + eps)].
            const bool lower_is_c = !e.lo_inf && e.c > m - eps;
            const bool upper_is_d = !e.hi_inf && e.d < m + eps;
            const Rational lo_z = lower_is_c ? e.c : Rational(m - eps);
            const Rational hi_z = upper_is_d ? e.d : Rational(m + eps);
            if (!(lo_z < hi_z)) continue;
            const Polynomial lower = lower_is_c ? Polynomial(e.c) : Polynomial::linear(-eps, 1);
            const Polynomial upper = upper_is_d ? Polynomial(e.d) : Polynomial::linear(eps, 1);
            Bivariate f;
            for (const auto& c : e.p.coeffs()) f.push_back(Polynomial(c));
            f = mul(f, rho);
            value += antiderivative_at(f, upper) - antiderivative_at(f, lower);
        }
        pieces.emplace_back(value);
    }
    return DMField1D(PiecewiseBV(std::move(cuts), std::move(pieces)));
}

} // namespace bvpair
