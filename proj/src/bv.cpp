#include "bvpair/bv.hpp"

#include "bvpair/error.hpp"
#include "text_scan.hpp"

#include <algorithm>
#include <sstream>

namespace bvpair {

// ---------------------------------------------------------------- LambdaSelector

namespace {
void check_unit(const Rational& v) {
    if (v < 0 || v > 1) throw Error(ErrorCode::InvalidArgument, "selector value " + to_string(v) + " outside [0,1]");
}
} // namespace

LambdaSelector::LambdaSelector(Rational default_value, std::map<Rational, Rational> overrides)
    : default_(std::move(default_value)), overrides_(std::move(overrides)) {
    check_unit(default_);
    for (const auto& [x, v] : overrides_) check_unit(v);
}

Rational LambdaSelector::at(const Rational& x) const {
    auto it = overrides_.find(x);
    return it == overrides_.end() ? default_ : it->second;
}

LambdaSelector LambdaSelector::with(const Rational& x, const Rational& value) const {
    auto o = overrides_;
    o[x] = value;
    return LambdaSelector(default_, std::move(o));
}

std::string LambdaSelector::to_string() const {
    std::ostringstream os;
    os << "default: " << bvpair::to_string(default_) << "; overrides: [";
    bool first = true;
    for (const auto& [x, v] : overrides_) {
        os << (first ? "" : " ") << '(' << bvpair::to_string(x) << ',' << bvpair::to_string(v) << ')';
        first = false;
    }
    os << ']';
    return os.str();
}

// ---------------------------------------------------------------- construction

PiecewiseBV::PiecewiseBV(std::vector<Rational> breakpoints, std::vector<StairPoly> pieces)
    : bps_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    normalize();
}

void PiecewiseBV::normalize() {
    if (bps_.size() < 2 || pieces_.size() + 1 != bps_.size())
        throw Error(ErrorCode::InvalidArgument, "BV function needs n+1 breakpoints for n pieces");
    for (std::size_t k = 0; k + 1 < bps_.size(); ++k) {
        if (!(bps_[k] < bps_[k + 1])) throw Error(ErrorCode::InvalidArgument, "breakpoints must increase strictly");
        pieces_[k] = pieces_[k].restrict_to(bps_[k], bps_[k + 1]);
    }
    std::vector<Rational> bps{bps_.front()};
    std::vector<StairPoly> pieces;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        if (!pieces.empty() && pieces_[k] == pieces.back()) {
            bps.back() = bps_[k + 1];
            continue;
        }
        pieces.push_back(pieces_[k]);
        bps.push_back(bps_[k + 1]);
    }
    bps_ = std::move(bps);
    pieces_ = std::move(pieces);
}

PiecewiseBV PiecewiseBV::constant(const Rational& lo, const Rational& hi, const Rational& c) {
    return PiecewiseBV({lo, hi}, {StairPoly(c)});
}

PiecewiseBV PiecewiseBV::from_poly(const PiecewisePoly& p) {
    std::vector<StairPoly> pieces(p.pieces().begin(), p.pieces().end());
    return PiecewiseBV(p.breakpoints(), std::move(pieces));
}

PiecewiseBV PiecewiseBV::indicator(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b) {
    if (!(lo <= a && a < b && b <= hi)) throw Error(ErrorCode::InvalidArgument, "indicator interval outside domain");
    std::vector<Rational> bps{lo};
    std::vector<StairPoly> pieces;
    if (lo < a) {
        bps.push_back(a);
        pieces.emplace_back(0);
    }
    bps.push_back(b);
    pieces.emplace_back(1);
    if (b < hi) {
        bps.push_back(hi);
        pieces.emplace_back(0);
    }
    return PiecewiseBV(std::move(bps), std::move(pieces));
}

PiecewiseBV PiecewiseBV::refined(const std::vector<Rational>& points) const {
    std::vector<Rational> bps = bps_;
    for (const auto& p : points)
        if (lo() < p && p < hi()) bps.push_back(p);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    PiecewiseBV out;
    out.bps_ = bps;
    out.pieces_.clear();
    for (std::size_t k = 0; k + 1 < bps.size(); ++k)
        out.pieces_.push_back(pieces_[piece_index(bps[k])].restrict_to(bps[k], bps[k + 1]));
    return out;
}

PiecewiseBV PiecewiseBV::with_staircase(const Rational& a, const Rational& b, const Rational& mass) const {
    if (!(lo() <= a && a < b && b <= hi())) throw Error(ErrorCode::InvalidArgument, "staircase support outside domain");
    PiecewiseBV r = refined({a, b});
    const StairPoly add = StairPoly::staircase(Staircase{a, b}, Polynomial(mass));
    std::vector<StairPoly> pieces;
    for (std::size_t k = 0; k < r.pieces_.size(); ++k)
        pieces.push_back(r.pieces_[k] + add.restrict_to(r.bps_[k], r.bps_[k + 1]));
    return PiecewiseBV(r.bps_, std::move(pieces));
}

bool PiecewiseBV::has_staircase() const {
    return std::any_of(pieces_.begin(), pieces_.end(), [](const StairPoly& p) { return !p.is_polynomial(); });
}

int PiecewiseBV::max_degree() const {
    int d = -1;
    for (const auto& p : pieces_) d = std::max(d, p.degree());
    return d;
}

std::size_t PiecewiseBV::piece_index(const Rational& x) const {
    if (x < lo() || x > hi()) throw Error(ErrorCode::InvalidArgument, "point " + bvpair::to_string(x) + " outside domain");
    auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - bps_.begin());
    return k == 0 ? 0 : std::min(k - 1, pieces_.size() - 1);
}

// ---------------------------------------------------------------- pointwise data

Rational PiecewiseBV::left_limit(const Rational& x) const {
    std::size_t k = piece_index(x);
    if (k > 0 && bps_[k] == x) --k;
    return pieces_[k](x);
}

Rational PiecewiseBV::right_limit(const Rational& x) const { return pieces_[piece_index(x)](x); }

std::vector<JumpPoint> PiecewiseBV::jumps() const {
    std::vector<JumpPoint> out;
    for (std::size_t k = 1; k + 1 < bps_.size(); ++k) {
        const Rational l = pieces_[k - 1](bps_[k]), r = pieces_[k](bps_[k]);
        if (l != r) out.push_back(JumpPoint{bps_[k], l, r});
    }
    return out;
}

ApproxLimits PiecewiseBV::limits(const Rational& x) const {
    ApproxLimits out;
    out.left = left_limit(x);
    out.right = right_limit(x);
    out.lower = min_q(out.left, out.right);
    out.upper = max_q(out.left, out.right);
    if (out.left == out.right) out.precise = out.left;
    return out;
}

Rational PiecewiseBV::lambda_value(const Rational& x, const LambdaSelector& lambda) const {
    const auto l = limits(x);
    if (l.precise) return *l.precise;
    const Rational t = lambda.at(x);
    return (1 - t) * l.lower + t * l.upper;
}

Measure1D PiecewiseBV::derivative() const {
    std::vector<AcPiece> ac;
    std::vector<CantorPart> cantor;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const Rational &l = bps_[k], &r = bps_[k + 1];
        ac.push_back(AcPiece{l, r, pieces_[k].derivative()});
        for (const auto& [f, q] : pieces_[k].terms()) cantor.push_back(CantorPart{f, l, r, q});
    }
    std::map<Rational, Rational> atoms;
    for (const auto& j : jumps()) atoms.emplace(j.x, j.right - j.left);
    return Measure1D(lo(), hi(), std::move(ac), std::move(atoms), std::move(cantor));
}

Measure1D PiecewiseBV::as_density() const {
    std::vector<AcPiece> ac;
    for (std::size_t k = 0; k < pieces_.size(); ++k) ac.push_back(AcPiece{bps_[k], bps_[k + 1], pieces_[k]});
    return Measure1D(lo(), hi(), std::move(ac), {}, {});
}

PiecewisePoly PiecewiseBV::as_piecewise_poly() const {
    std::vector<Polynomial> pieces;
    for (const auto& p : pieces_) {
        if (!p.is_polynomial()) throw Error(ErrorCode::Unsupported, "function carries a Cantor staircase");
        pieces.push_back(p.base());
    }
    return PiecewisePoly(bps_, std::move(pieces));
}

// ---------------------------------------------------------------- algebra

namespace {

template <class Op>
PiecewiseBV combine(const PiecewiseBV& a, const PiecewiseBV& b, Op op) {
    if (a.lo() != b.lo() || a.hi() != b.hi()) throw Error(ErrorCode::InvalidArgument, "functions on different domains");
    const PiecewiseBV ra = a.refined(b.breakpoints());
    const PiecewiseBV rb = b.refined(a.breakpoints());
    std::vector<StairPoly> pieces;
    for (std::size_t k = 0; k < ra.pieces().size(); ++k) pieces.push_back(op(ra.pieces()[k], rb.pieces()[k]));
    return PiecewiseBV(ra.breakpoints(), std::move(pieces));
}

} // namespace

PiecewiseBV PiecewiseBV::operator-() const { return *this * Rational(-1); }

PiecewiseBV operator+(const PiecewiseBV& a, const PiecewiseBV& b) {
    return combine(a, b, [](const StairPoly& x, const StairPoly& y) { return x + y; });
}

PiecewiseBV operator-(const PiecewiseBV& a, const PiecewiseBV& b) {
    return combine(a, b, [](const StairPoly& x, const StairPoly& y) { return x - y; });
}

PiecewiseBV operator*(const PiecewiseBV& a, const PiecewiseBV& b) {
    return combine(a, b, [](const StairPoly& x, const StairPoly& y) { return x * y; });
}

PiecewiseBV operator*(const PiecewiseBV& a, const Rational& s) {
    std::vector<StairPoly> pieces;
    for (const auto& p : a.pieces_) pieces.push_back(p * s);
    return PiecewiseBV(a.bps_, std::move(pieces));
}

// ---------------------------------------------------------------- level structure

std::vector<Rational> level_crossings(const StairPoly& p, const Rational& l, const Rational& r, const Rational& c) {
    std::vector<Rational> out;
    if (p.is_polynomial()) {
        const Polynomial d = p.base() - Polynomial(c);
        if (d.is_zero()) return out;
        for (const auto& root : isolate_roots(d, l, r, Rational(1, 1024))) {
            if (!root.exact())
                throw Error(ErrorCode::DegreeUnsupported, "irrational level crossing of " + d.to_string() + " near " +
                                                              to_string(root.point()));
            out.push_back(root.lo);
        }
        return out;
    }
    if (!p.is_simple_staircase() || p.terms().size() != 1)
        throw Error(ErrorCode::DegreeUnsupported, "level crossings of a staircase-coupled piece");
    const auto& [f, q] = *p.terms().begin();
    const Rational s = (c - p.base().coeff(0)) / q.coeff(0);
    const Rational fl = f(l), fr = f(r);
    if (s < fl || s > fr) return out;
    for (const Rational& n : {cantor::inverse_min(s), cantor::inverse_max(s)}) {
        const Rational x = f.a + (f.b - f.a) * n;
        if (l < x && x < r && (out.empty() || out.back() != x)) out.push_back(x);
    }
    return out;
}

namespace {

// Sub-intervals of piece k cut at the crossings of the given levels.
std::vector<Rational> cut_piece(const StairPoly& p, const Rational& l, const Rational& r,
                                const std::vector<Rational>& levels) {
    std::vector<Rational> cuts{l, r};
    for (const auto& c : levels) {
        auto xs = level_crossings(p, l, r, c);
        cuts.insert(cuts.end(), xs.begin(), xs.end());
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

} // namespace

PiecewiseBV PiecewiseBV::compose(const PiecewisePoly& h) const {
    if (!h.continuous()) throw Error(ErrorCode::NonLipschitz, "composed map must be continuous (Lipschitz)");
    const std::vector<Rational>& levels = h.breakpoints();
    std::vector<Rational> bps{lo()};
    std::vector<StairPoly> pieces;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const StairPoly& p = pieces_[k];
        if (!p.is_polynomial() && !p.is_simple_staircase())
            throw Error(ErrorCode::Unsupported, "composition with a staircase-coupled piece");
        const auto cuts = cut_piece(p, bps_[k], bps_[k + 1], levels);
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const Rational &a = cuts[j], &b = cuts[j + 1];
            for (const Rational& v : {p(a), p((a + b) / 2), p(b)})
                if (v < h.lo() || v > h.hi())
                    throw Error(ErrorCode::InvalidArgument, "value " + bvpair::to_string(v) + " outside the domain of h");
            const Polynomial& hp = h.pieces()[h.piece_index(p((a + b) / 2))];
            StairPoly piece;
            if (p.is_polynomial()) {
                piece = StairPoly(hp.compose(p.base()));
            } else if (hp.degree() <= 1) {
                piece = StairPoly(Polynomial(hp.coeff(0))) + p * hp.coeff(1);
            } else {
                throw Error(ErrorCode::Unsupported, "nonlinear map applied to a Cantor staircase");
            }
            bps.push_back(b);
            pieces.push_back(std::move(piece));
        }
    }
    return PiecewiseBV(std::move(bps), std::move(pieces));
}

PiecewiseBV PiecewiseBV::truncate(const Rational& k) const {
    if (!(k > 0)) throw Error(ErrorCode::InvalidArgument, "truncation level must be positive");
    std::vector<Rational> bps{lo()};
    std::vector<StairPoly> pieces;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const StairPoly& p = pieces_[i];
        const auto cuts = cut_piece(p, bps_[i], bps_[i + 1], {k, Rational(-k)});
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const Rational v = p((cuts[j] + cuts[j + 1]) / 2);
            bps.push_back(cuts[j + 1]);
            if (v > k) pieces.emplace_back(k);
            else if (v < -k) pieces.emplace_back(Rational(-k));
            else pieces.push_back(p.restrict_to(cuts[j], cuts[j + 1]));
        }
    }
    return PiecewiseBV(std::move(bps), std::move(pieces));
}

LevelSet PiecewiseBV::level_set(const Rational& t) const {
    std::vector<std::pair<Rational, Rational>> runs;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const StairPoly& p = pieces_[i];
        const auto cuts = cut_piece(p, bps_[i], bps_[i + 1], {t});
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            if (!(p((cuts[j] + cuts[j + 1]) / 2) > t)) continue;
            // Neighbouring runs share an endpoint of density one; merge them.
            if (!runs.empty() && runs.back().second == cuts[j]) runs.back().second = cuts[j + 1];
            else runs.emplace_back(cuts[j], cuts[j + 1]);
        }
    }
    LevelSet out{lo(), hi(), BorelSet1D(runs, {}), {}};
    for (const auto& [a, b] : runs) {
        if (a > lo()) out.boundary.emplace_back(a, +1);
        if (b < hi()) out.boundary.emplace_back(b, -1);
    }
    return out;
}

PiecewiseBV LevelSet::indicator() const {
    std::vector<Rational> bps{lo};
    std::vector<StairPoly> pieces;
    Rational cursor = lo;
    for (const auto& [a, b] : set.intervals()) {
        if (cursor < a) {
            bps.push_back(a);
            pieces.emplace_back(0);
        }
        bps.push_back(b);
        pieces.emplace_back(1);
        cursor = b;
    }
    if (cursor < hi) {
        bps.push_back(hi);
        pieces.emplace_back(0);
    }
    return PiecewiseBV(std::move(bps), std::move(pieces));
}

std::vector<Rational> PiecewiseBV::critical_values() const {
    std::vector<Rational> out;
    for (std::size_t k = 0; k + 1 < bps_.size(); ++k) {
        const StairPoly& p = pieces_[k];
        out.push_back(p(bps_[k]));
        out.push_back(p(bps_[k + 1]));
        if (p.is_polynomial()) {
            const Polynomial d = p.base().derivative();
            if (d.is_zero()) continue;
            for (const auto& root : isolate_roots(d, bps_[k], bps_[k + 1], Rational(1, 1024))) {
                if (!root.exact()) throw Error(ErrorCode::DegreeUnsupported, "irrational critical point");
                out.push_back(p(root.lo));
            }
        } else if (!p.is_simple_staircase()) {
            throw Error(ErrorCode::DegreeUnsupported, "critical values of a staircase-coupled piece");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------- norms

namespace {

// Bound on |p'| over [a, b].
Rational derivative_bound(const Polynomial& p, const Rational& a, const Rational& b) {
    const Rational m = max_q(abs_q(a), abs_q(b));
    Rational bound = 0;
    const auto& c = p.coeffs();
    for (std::size_t k = 1; k < c.size(); ++k) bound += abs_q(c[k]) * static_cast<long>(k) * pow_q(m, static_cast<long>(k - 1));
    return bound;
}

Approx poly_sup(const Polynomial& p, const Rational& l, const Rational& r) {
    Approx out{max_q(abs_q(p(l)), abs_q(p(r))), true};
    const Polynomial d = p.derivative();
    if (d.is_zero()) return out;
    for (const auto& root : isolate_roots(d, l, r, root_tolerance())) {
        if (root.exact()) {
            out.value = max_q(out.value, abs_q(p(root.lo)));
        } else {
            const Rational v = max_q(abs_q(p(root.lo)), abs_q(p(root.hi))) +
                               (root.hi - root.lo) * derivative_bound(p, root.lo, root.hi);
            out.value = max_q(out.value, v);
            out.exact = false;
        }
    }
    return out;
}

} // namespace

Approx PiecewiseBV::sup_norm() const {
    Approx out{Rational(0), true};
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const StairPoly& p = pieces_[k];
        const Rational &l = bps_[k], &r = bps_[k + 1];
        Approx s;
        if (p.is_polynomial()) {
            s = poly_sup(p.base(), l, r);
        } else if (p.is_simple_staircase() && p.terms().size() == 1) {
            s = {max_q(abs_q(p(l)), abs_q(p(r))), true};
        } else {
            s = poly_sup(p.base(), l, r);
            for (const auto& [f, q] : p.terms()) s.value += poly_sup(q, l, r).value;
            s.exact = false;
        }
        out.value = max_q(out.value, s.value);
        out.exact = out.exact && s.exact;
    }
    return out;
}

Approx PiecewiseBV::l1_norm() const { return bvpair::total_variation(as_density()).mass(); }

Approx PiecewiseBV::total_variation() const { return bvpair::total_variation(derivative()).mass(); }

// ---------------------------------------------------------------- serialization

std::string PiecewiseBV::to_string() const {
    std::ostringstream os;
    os << "omega: (" << bvpair::to_string(lo()) << ',' << bvpair::to_string(hi()) << "); pieces: [";
    for (std::size_t k = 0; k < pieces_.size(); ++k)
        os << (k ? " " : "") << '(' << bvpair::to_string(bps_[k]) << ',' << bvpair::to_string(bps_[k + 1]) << ','
           << pieces_[k].to_string() << ')';
    os << "]; jumps: [";
    const auto js = jumps();
    for (std::size_t k = 0; k < js.size(); ++k)
        os << (k ? " " : "") << '(' << bvpair::to_string(js[k].x) << ',' << bvpair::to_string(js[k].left) << ','
           << bvpair::to_string(js[k].right) << ')';
    os << ']';
    return os.str();
}

PiecewiseBV parse_bv(const std::string& text) {
    detail::Scanner sc(text);
    sc.expect_word("omega:");
    sc.expect('(');
    const Rational lo = sc.rational();
    sc.expect(',');
    const Rational hi = sc.rational();
    sc.expect(')');
    sc.expect(';');
    sc.expect_word("pieces:");
    sc.expect('[');
    std::vector<Rational> bps{lo};
    std::vector<StairPoly> pieces;
    while (sc.accept('(')) {
        const Rational a = sc.rational();
        sc.expect(',');
        const Rational b = sc.rational();
        sc.expect(',');
        std::size_t pos = sc.pos();
        pieces.push_back(parse_stair_poly(text, pos));
        sc.seek(pos);
        sc.expect(')');
        if (a != bps.back()) sc.fail("pieces must be contiguous from omega's left end");
        bps.push_back(b);
    }
    sc.expect(']');
    if (bps.back() != hi) sc.fail("pieces must end at omega's right end");
    std::vector<JumpPoint> listed;
    if (sc.accept(';')) {
        sc.expect_word("jumps:");
        sc.expect('[');
        while (sc.accept('(')) {
            JumpPoint j;
            j.x = sc.rational();
            sc.expect(',');
            j.left = sc.rational();
            sc.expect(',');
            j.right = sc.rational();
            sc.expect(')');
            listed.push_back(j);
        }
        sc.expect(']');
    }
    if (!sc.at_end()) sc.fail("trailing input");
    try {
        PiecewiseBV u(std::move(bps), std::move(pieces));
        const auto js = u.jumps();
        bool same = js.size() == listed.size();
        for (std::size_t k = 0; same && k < js.size(); ++k)
            same = js[k].x == listed[k].x && js[k].left == listed[k].left && js[k].right == listed[k].right;
        if (!same) throw Error(ErrorCode::Parse, "jump table does not match the piece limits");
        return u;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        throw Error(ErrorCode::Parse, e.what());
    }
}

// ---------------------------------------------------------------- u^lambda * mu

Measure1D lambda_times(const PiecewiseBV& u, const LambdaSelector& lambda, const Measure1D& mu) {
    if (u.lo() != mu.lo() || u.hi() != mu.hi()) throw Error(ErrorCode::InvalidArgument, "function and measure domains differ");
    const auto& bps = u.breakpoints();
    auto piece_on = [&](const Rational& l) -> const StairPoly& {
        auto it = std::upper_bound(bps.begin(), bps.end(), l);
        std::size_t k = static_cast<std::size_t>(it - bps.begin()) - 1;
        return u.pieces()[std::min(k, u.pieces().size() - 1)];
    };
    auto cuts = [&](const Rational& l, const Rational& r) {
        std::vector<Rational> out{l};
        for (const auto& b : bps)
            if (l < b && b < r) out.push_back(b);
        out.push_back(r);
        return out;
    };
    std::vector<AcPiece> ac;
    for (const auto& piece : mu.ac()) {
        const auto cs = cuts(piece.lo, piece.hi);
        for (std::size_t k = 0; k + 1 < cs.size(); ++k)
            ac.push_back(AcPiece{cs[k], cs[k + 1], piece.density.restrict_to(cs[k], cs[k + 1]) * piece_on(cs[k])});
    }
    std::map<Rational, Rational> atoms;
    for (const auto& [x, w] : mu.atoms()) atoms.emplace(x, w * u.lambda_value(x, lambda));
    std::vector<CantorPart> cantor;
    for (const auto& c : mu.cantor_parts()) {
        const auto cs = cuts(c.lo, c.hi);
        for (std::size_t k = 0; k + 1 < cs.size(); ++k) {
            const StairPoly& p = piece_on(cs[k]);
            if (!p.is_polynomial())
                throw Error(ErrorCode::Unsupported, "staircase function against a Cantor part of the measure");
            cantor.push_back(CantorPart{c.geometry, cs[k], cs[k + 1], c.weight * p.base()});
        }
    }
    return Measure1D(mu.lo(), mu.hi(), std::move(ac), std::move(atoms), std::move(cantor));
}

} // namespace bvpair
