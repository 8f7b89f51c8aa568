#include "bvpair/measure.hpp"

#include "bvpair/error.hpp"
#include "text_scan.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace bvpair {

// ---------------------------------------------------------------- BorelSet1D

BorelSet1D::BorelSet1D(std::vector<std::pair<Rational, Rational>> intervals, std::vector<Rational> points)
    : intervals_(std::move(intervals)), points_(std::move(points)) {
    for (const auto& [a, b] : intervals_)
        if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "open interval needs lo < hi");
    normalize();
}

BorelSet1D BorelSet1D::interval(const Rational& lo, const Rational& hi) { return BorelSet1D({{lo, hi}}, {}); }

BorelSet1D BorelSet1D::closed(const Rational& lo, const Rational& hi) {
    if (lo == hi) return point(lo);
    return BorelSet1D({{lo, hi}}, {lo, hi});
}

BorelSet1D BorelSet1D::point(const Rational& x) { return BorelSet1D({}, {x}); }

void BorelSet1D::normalize() {
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    std::sort(intervals_.begin(), intervals_.end());
    std::vector<std::pair<Rational, Rational>> merged;
    for (const auto& iv : intervals_) {
        if (!merged.empty()) {
            auto& last = merged.back();
            const bool overlap = iv.first < last.second;
            const bool bridged = iv.first == last.second && std::binary_search(points_.begin(), points_.end(), iv.first);
            if (overlap || bridged) {
                last.second = max_q(last.second, iv.second);
                continue;
            }
        }
        merged.push_back(iv);
    }
    intervals_ = std::move(merged);
    std::vector<Rational> kept;
    for (const auto& p : points_) {
        bool inside = false;
        for (const auto& [a, b] : intervals_)
            if (a < p && p < b) inside = true;
        if (!inside) kept.push_back(p);
    }
    points_ = std::move(kept);
}

bool BorelSet1D::contains(const Rational& x) const {
    for (const auto& [a, b] : intervals_)
        if (a < x && x < b) return true;
    return std::binary_search(points_.begin(), points_.end(), x);
}

BorelSet1D BorelSet1D::unite(const BorelSet1D& other) const {
    auto iv = intervals_;
    iv.insert(iv.end(), other.intervals_.begin(), other.intervals_.end());
    auto pts = points_;
    pts.insert(pts.end(), other.points_.begin(), other.points_.end());
    return BorelSet1D(std::move(iv), std::move(pts));
}

BorelSet1D BorelSet1D::intersect(const BorelSet1D& other) const {
    std::vector<std::pair<Rational, Rational>> iv;
    for (const auto& [a, b] : intervals_)
        for (const auto& [c, d] : other.intervals_) {
            Rational lo = max_q(a, c), hi = min_q(b, d);
            if (lo < hi) iv.emplace_back(lo, hi);
        }
    std::vector<Rational> pts;
    for (const auto& p : points_)
        if (other.contains(p)) pts.push_back(p);
    for (const auto& p : other.points_)
        if (contains(p)) pts.push_back(p);
    return BorelSet1D(std::move(iv), std::move(pts));
}

BorelSet1D BorelSet1D::complement(const Rational& lo, const Rational& hi) const {
    std::vector<Rational> cuts{lo, hi};
    for (const auto& [a, b] : intervals_) {
        cuts.push_back(a);
        cuts.push_back(b);
    }
    cuts.insert(cuts.end(), points_.begin(), points_.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<std::pair<Rational, Rational>> iv;
    std::vector<Rational> pts;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const Rational& c = cuts[k];
        if (c < lo || c > hi) continue;
        if (lo < c && c < hi && !contains(c)) pts.push_back(c);
        if (k + 1 < cuts.size() && cuts[k + 1] <= hi && c >= lo) {
            const Rational mid = (c + cuts[k + 1]) / 2;
            if (!contains(mid)) iv.emplace_back(c, cuts[k + 1]);
        }
    }
    return BorelSet1D(std::move(iv), std::move(pts));
}

std::string BorelSet1D::to_string() const {
    std::ostringstream os;
    os << "intervals: [";
    for (std::size_t k = 0; k < intervals_.size(); ++k)
        os << (k ? " " : "") << '(' << bvpair::to_string(intervals_[k].first) << ','
           << bvpair::to_string(intervals_[k].second) << ')';
    os << "]; points: [";
    for (std::size_t k = 0; k < points_.size(); ++k) os << (k ? " " : "") << bvpair::to_string(points_[k]);
    os << ']';
    return os.str();
}

// ---------------------------------------------------------------- helpers

namespace {

Approx& accumulate(Approx& acc, const Approx& term) {
    acc.value += term.value;
    acc.exact = acc.exact && term.exact;
    return acc;
}

// Integral of g against the unit Cantor measure of `f`, restricted to [s, t].
Approx cantor_integral(const Staircase& f, const Polynomial& g, const Rational& s, const Rational& t,
                       unsigned cap) {
    if (!(s < t) || g.is_zero()) return {Rational(0), true};
    const Rational ns = max_q(Rational(0), f.normalize(s));
    const Rational nt = min_q(Rational(1), f.normalize(t));
    if (!(ns < nt)) return {Rational(0), true};
    const Polynomial h = g.compose(f.chart());
    if (h.is_constant()) return {h.coeff(0) * (cantor::cdf(nt) - cantor::cdf(ns)), true};
    const auto q = cantor::integrate(h, ns, nt, cap);
    return {q.value, q.exact};
}

// Integral over (l, r) of mult * d dx. Staircase terms are integrated by
// parts: int q F = [Q F] - int Q dC.
Approx stair_integral(const StairPoly& d, const Polynomial& mult, const Rational& l, const Rational& r,
                      unsigned cap) {
    Approx acc{(mult * d.base()).integrate(l, r), true};
    for (const auto& [f, q] : d.terms()) {
        const Polynomial anti = (mult * q).antiderivative();
        acc.value += anti(r) * f(r) - anti(l) * f(l);
        Approx c = cantor_integral(f, anti, l, r, cap);
        c.value = -c.value;
        accumulate(acc, c);
    }
    return acc;
}

std::vector<Rational> sorted_unique(std::vector<Rational> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Breakpoints of f strictly inside (l, r), with l and r at the ends.
std::vector<Rational> cuts_within(const std::vector<Rational>& bps, const Rational& l, const Rational& r) {
    std::vector<Rational> out{l};
    for (const auto& b : bps)
        if (l < b && b < r) out.push_back(b);
    out.push_back(r);
    return out;
}

} // namespace

Rational root_tolerance() { return Rational(1, mpz_class(1) << 48); }

Rational CantorPart::base_mass() const {
    return cantor::cdf(geometry.normalize(hi)) - cantor::cdf(geometry.normalize(lo));
}

// ---------------------------------------------------------------- Measure1D

Measure1D::Measure1D(const Rational& lo, const Rational& hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "domain needs lo < hi");
}

Measure1D::Measure1D(const Rational& lo, const Rational& hi, std::vector<AcPiece> ac,
                     std::map<Rational, Rational> atoms, std::vector<CantorPart> cantor)
    : Measure1D(lo, hi) {
    ac_ = std::move(ac);
    atoms_ = std::move(atoms);
    cantor_ = std::move(cantor);
    normalize();
}

Measure1D Measure1D::dirac(const Rational& lo, const Rational& hi, const Rational& x, const Rational& w) {
    return Measure1D(lo, hi, {}, {{x, w}}, {});
}

Measure1D Measure1D::density(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b,
                             const StairPoly& d) {
    return Measure1D(lo, hi, {AcPiece{a, b, d}}, {}, {});
}

Measure1D Measure1D::cantor(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b,
                            const Rational& m) {
    if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "Cantor support needs a < b");
    return Measure1D(lo, hi, {}, {}, {CantorPart{Staircase{a, b}, a, b, Polynomial(m)}});
}

Rational Measure1D::atom(const Rational& x) const {
    auto it = atoms_.find(x);
    return it == atoms_.end() ? Rational(0) : it->second;
}

void Measure1D::normalize() {
    // Absolutely continuous part: sum on the common refinement, merge equal neighbours.
    std::vector<Rational> cuts;
    for (auto& p : ac_) {
        if (!(p.lo < p.hi) || p.lo < lo_ || p.hi > hi_)
            throw Error(ErrorCode::InvalidArgument, "density piece outside the domain");
        p.density = p.density.restrict_to(p.lo, p.hi);
        cuts.push_back(p.lo);
        cuts.push_back(p.hi);
    }
    cuts = sorted_unique(std::move(cuts));
    std::vector<AcPiece> ac;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Rational &l = cuts[k], &r = cuts[k + 1];
        StairPoly sum;
        for (const auto& p : ac_)
            if (p.lo <= l && r <= p.hi) sum += p.density.restrict_to(l, r);
        if (sum.is_zero()) continue;
        if (!ac.empty() && ac.back().hi == l && ac.back().density == sum) {
            ac.back().hi = r;
        } else {
            ac.push_back(AcPiece{l, r, std::move(sum)});
        }
    }
    ac_ = std::move(ac);

    for (auto it = atoms_.begin(); it != atoms_.end();) {
        if (!(lo_ < it->first && it->first < hi_))
            throw Error(ErrorCode::InvalidArgument, "atom " + bvpair::to_string(it->first) + " outside the open domain");
        if (it->second == 0) it = atoms_.erase(it); else ++it;
    }

    std::map<Staircase, std::vector<CantorPart>> groups;
    for (auto& c : cantor_) {
        if (!(c.geometry.a < c.geometry.b)) throw Error(ErrorCode::InvalidArgument, "Cantor support needs a < b");
        if (c.lo < lo_ || c.hi > hi_) throw Error(ErrorCode::InvalidArgument, "Cantor window outside the domain");
        c.lo = max_q(c.lo, c.geometry.a);
        c.hi = min_q(c.hi, c.geometry.b);
        if (c.lo < c.hi && !c.weight.is_zero()) groups[c.geometry].push_back(c);
    }
    std::vector<CantorPart> out;
    for (const auto& [g, parts] : groups) {
        std::vector<Rational> ends;
        for (const auto& c : parts) {
            ends.push_back(c.lo);
            ends.push_back(c.hi);
        }
        ends = sorted_unique(std::move(ends));
        std::vector<CantorPart> elem;
        for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
            Polynomial w;
            for (const auto& c : parts)
                if (c.lo <= ends[k] && ends[k + 1] <= c.hi) w += c.weight;
            if (w.is_zero()) continue;
            const Rational ns = cantor::snap_up(g.normalize(ends[k]));
            const Rational nt = cantor::snap_down(g.normalize(ends[k + 1]));
            if (!(ns < nt) || cantor::cdf(ns) == cantor::cdf(nt)) continue;
            const Rational s = g.a + (g.b - g.a) * ns, t = g.a + (g.b - g.a) * nt;
            if (!elem.empty() && elem.back().weight == w &&
                cantor::cdf(g.normalize(elem.back().hi)) == cantor::cdf(ns)) {
                elem.back().hi = t;
            } else {
                elem.push_back(CantorPart{g, s, t, w});
            }
        }
        out.insert(out.end(), elem.begin(), elem.end());
    }
    cantor_ = std::move(out);
}

void Measure1D::check_same_domain(const Measure1D& o) const {
    if (lo_ != o.lo_ || hi_ != o.hi_) throw Error(ErrorCode::InvalidArgument, "measures live on different domains");
}

Measure1D& Measure1D::operator+=(const Measure1D& o) {
    check_same_domain(o);
    ac_.insert(ac_.end(), o.ac_.begin(), o.ac_.end());
    for (const auto& [x, w] : o.atoms_) atoms_[x] += w;
    cantor_.insert(cantor_.end(), o.cantor_.begin(), o.cantor_.end());
    normalize();
    return *this;
}

Measure1D& Measure1D::operator-=(const Measure1D& o) { return *this += -o; }

Measure1D Measure1D::scaled(const Rational& s) const {
    Measure1D m(lo_, hi_);
    if (s == 0) return m;
    m.ac_ = ac_;
    for (auto& p : m.ac_) p.density *= s;
    m.atoms_ = atoms_;
    for (auto& [x, w] : m.atoms_) w *= s;
    m.cantor_ = cantor_;
    for (auto& c : m.cantor_) c.weight *= s;
    return m;
}

bool operator==(const Measure1D& a, const Measure1D& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.ac_ == b.ac_ && a.atoms_ == b.atoms_ && a.cantor_ == b.cantor_;
}

Approx Measure1D::eval(const BorelSet1D& e, unsigned depth_cap) const {
    Approx acc{Rational(0), true};
    for (const auto& [p, q] : e.intervals()) {
        for (const auto& piece : ac_) {
            const Rational l = max_q(p, piece.lo), r = min_q(q, piece.hi);
            if (l < r) accumulate(acc, stair_integral(piece.density, Polynomial(1), l, r, depth_cap));
        }
        for (const auto& [x, w] : atoms_)
            if (p < x && x < q) acc.value += w;
        for (const auto& c : cantor_)
            accumulate(acc, cantor_integral(c.geometry, c.weight, max_q(p, c.lo), min_q(q, c.hi), depth_cap));
    }
    for (const auto& x : e.points()) acc.value += atom(x);
    return acc;
}

Approx Measure1D::act(const PiecewisePoly& phi, unsigned depth_cap) const {
    if (phi.lo() > lo_ || phi.hi() < hi_)
        throw Error(ErrorCode::InvalidArgument, "test function does not cover the domain");
    Approx acc{Rational(0), true};
    for (const auto& piece : ac_) {
        const auto cuts = cuts_within(phi.breakpoints(), piece.lo, piece.hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            accumulate(acc, stair_integral(piece.density, phi.piece_on(cuts[k], cuts[k + 1]), cuts[k], cuts[k + 1],
                                           depth_cap));
    }
    for (const auto& [x, w] : atoms_) acc.value += w * phi(x);
    for (const auto& c : cantor_) {
        const auto cuts = cuts_within(phi.breakpoints(), c.lo, c.hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            accumulate(acc, cantor_integral(c.geometry, c.weight * phi.piece_on(cuts[k], cuts[k + 1]), cuts[k],
                                            cuts[k + 1], depth_cap));
    }
    return acc;
}

Approx Measure1D::mass(unsigned depth_cap) const { return eval(BorelSet1D::interval(lo_, hi_), depth_cap); }

Measure1D Measure1D::restrict(const BorelSet1D& e) const {
    std::vector<AcPiece> ac;
    std::vector<CantorPart> cantor;
    for (const auto& [p, q] : e.intervals()) {
        for (const auto& piece : ac_) {
            const Rational l = max_q(p, piece.lo), r = min_q(q, piece.hi);
            if (l < r) ac.push_back(AcPiece{l, r, piece.density});
        }
        for (const auto& c : cantor_) {
            const Rational l = max_q(p, c.lo), r = min_q(q, c.hi);
            if (l < r) cantor.push_back(CantorPart{c.geometry, l, r, c.weight});
        }
    }
    std::map<Rational, Rational> atoms;
    for (const auto& [x, w] : atoms_)
        if (e.contains(x)) atoms.emplace(x, w);
    return Measure1D(lo_, hi_, std::move(ac), std::move(atoms), std::move(cantor));
}

Measure1D Measure1D::times(const PiecewisePoly& f) const {
    if (f.lo() > lo_ || f.hi() < hi_) throw Error(ErrorCode::InvalidArgument, "multiplier does not cover the domain");
    std::vector<AcPiece> ac;
    for (const auto& piece : ac_) {
        const auto cuts = cuts_within(f.breakpoints(), piece.lo, piece.hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            ac.push_back(AcPiece{cuts[k], cuts[k + 1], piece.density * f.piece_on(cuts[k], cuts[k + 1])});
    }
    std::map<Rational, Rational> atoms;
    for (const auto& [x, w] : atoms_) atoms.emplace(x, w * f(x));
    std::vector<CantorPart> cantor;
    for (const auto& c : cantor_) {
        const auto cuts = cuts_within(f.breakpoints(), c.lo, c.hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            cantor.push_back(CantorPart{c.geometry, cuts[k], cuts[k + 1], c.weight * f.piece_on(cuts[k], cuts[k + 1])});
    }
    return Measure1D(lo_, hi_, std::move(ac), std::move(atoms), std::move(cantor));
}

std::string Measure1D::to_string() const {
    std::ostringstream os;
    os << "omega: (" << bvpair::to_string(lo_) << ',' << bvpair::to_string(hi_) << "); ac: [";
    for (std::size_t k = 0; k < ac_.size(); ++k)
        os << (k ? " " : "") << '(' << bvpair::to_string(ac_[k].lo) << ',' << bvpair::to_string(ac_[k].hi) << ','
           << ac_[k].density.to_string() << ')';
    os << "]; atoms: [";
    bool first = true;
    for (const auto& [x, w] : atoms_) {
        os << (first ? "" : " ") << '(' << bvpair::to_string(x) << ',' << bvpair::to_string(w) << ')';
        first = false;
    }
    os << "]; cantor: [";
    for (std::size_t k = 0; k < cantor_.size(); ++k) {
        const auto& c = cantor_[k];
        os << (k ? " " : "") << '(' << bvpair::to_string(c.geometry.a) << ',' << bvpair::to_string(c.geometry.b) << ',';
        if (c.lo == c.geometry.a && c.hi == c.geometry.b && c.weight.is_constant()) {
            os << bvpair::to_string(c.weight.coeff(0));
        } else {
            os << c.weight.to_string() << ',' << bvpair::to_string(c.lo) << ',' << bvpair::to_string(c.hi);
        }
        os << ')';
    }
    os << ']';
    return os.str();
}

Measure1D parse_measure(const std::string& text) {
    detail::Scanner sc(text);
    sc.expect_word("omega:");
    sc.expect('(');
    const Rational lo = sc.rational();
    sc.expect(',');
    const Rational hi = sc.rational();
    sc.expect(')');
    sc.expect(';');
    sc.expect_word("ac:");
    sc.expect('[');
    std::vector<AcPiece> ac;
    while (sc.accept('(')) {
        AcPiece p;
        p.lo = sc.rational();
        sc.expect(',');
        p.hi = sc.rational();
        sc.expect(',');
        std::size_t pos = sc.pos();
        p.density = parse_stair_poly(text, pos);
        sc.seek(pos);
        sc.expect(')');
        ac.push_back(std::move(p));
    }
    sc.expect(']');
    sc.expect(';');
    sc.expect_word("atoms:");
    sc.expect('[');
    std::map<Rational, Rational> atoms;
    while (sc.accept('(')) {
        const Rational x = sc.rational();
        sc.expect(',');
        atoms[x] += sc.rational();
        sc.expect(')');
    }
    sc.expect(']');
    sc.expect(';');
    sc.expect_word("cantor:");
    sc.expect('[');
    std::vector<CantorPart> cantor;
    while (sc.accept('(')) {
        CantorPart c;
        c.geometry.a = sc.rational();
        sc.expect(',');
        c.geometry.b = sc.rational();
        sc.expect(',');
        if (sc.peek() == '[') {
            std::size_t pos = sc.pos();
            c.weight = parse_polynomial(text, pos);
            sc.seek(pos);
            sc.expect(',');
            c.lo = sc.rational();
            sc.expect(',');
            c.hi = sc.rational();
        } else {
            c.weight = Polynomial(sc.rational());
            c.lo = c.geometry.a;
            c.hi = c.geometry.b;
        }
        sc.expect(')');
        cantor.push_back(std::move(c));
    }
    sc.expect(']');
    if (!sc.at_end()) sc.fail("trailing input");
    try {
        return Measure1D(lo, hi, std::move(ac), std::move(atoms), std::move(cantor));
    } catch (const Error& e) {
        throw Error(ErrorCode::Parse, e.what());
    }
}

// ---------------------------------------------------------------- decompositions

namespace {

// Cut points of (l, r) at which p changes sign; irrational roots are cut at
// a rational point within root_tolerance().
std::vector<Rational> sign_cuts(const Polynomial& p, const Rational& l, const Rational& r) {
    std::vector<Rational> cuts{l};
    if (!p.is_zero())
        for (const auto& root : isolate_roots(p, l, r, root_tolerance())) cuts.push_back(root.point());
    cuts.push_back(r);
    return cuts;
}

struct SignSplit {
    Measure1D pos;
    Measure1D neg;
};

SignSplit split_signs(const Measure1D& mu) {
    std::vector<AcPiece> pos_ac, neg_ac;
    for (const auto& piece : mu.ac()) {
        if (!piece.density.is_polynomial()) {
            // p + sum q F has a fixed sign when p and all q share one on the piece.
            const Polynomial& b = piece.density.base();
            int s = b.is_zero() ? 0 : sgn(b((piece.lo + piece.hi) / 2));
            bool fixed = b.is_zero() || sign_cuts(b, piece.lo, piece.hi).size() == 2;
            for (const auto& [f, q] : piece.density.terms()) {
                const int sq = sgn(q((piece.lo + piece.hi) / 2));
                fixed = fixed && sign_cuts(q, piece.lo, piece.hi).size() == 2 && (s == 0 || sq == s);
                if (s == 0) s = sq;
            }
            if (!fixed)
                throw Error(ErrorCode::Unsupported, "sign analysis of a staircase-coupled density");
            (s > 0 ? pos_ac : neg_ac).push_back(AcPiece{piece.lo, piece.hi, s > 0 ? piece.density : -piece.density});
            continue;
        }
        const Polynomial& p = piece.density.base();
        const auto cuts = sign_cuts(p, piece.lo, piece.hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const int s = sgn(p((cuts[k] + cuts[k + 1]) / 2));
            if (s > 0) pos_ac.push_back(AcPiece{cuts[k], cuts[k + 1], StairPoly(p)});
            if (s < 0) neg_ac.push_back(AcPiece{cuts[k], cuts[k + 1], StairPoly(-p)});
        }
    }
    std::map<Rational, Rational> pos_at, neg_at;
    for (const auto& [x, w] : mu.atoms()) {
        if (w > 0) pos_at.emplace(x, w);
        else neg_at.emplace(x, -w);
    }
    std::vector<CantorPart> pos_c, neg_c;
    for (const auto& c : mu.cantor_parts()) {
        const auto cuts = sign_cuts(c.weight, c.lo, c.hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const int s = sgn(c.weight((cuts[k] + cuts[k + 1]) / 2));
            if (s > 0) pos_c.push_back(CantorPart{c.geometry, cuts[k], cuts[k + 1], c.weight});
            if (s < 0) neg_c.push_back(CantorPart{c.geometry, cuts[k], cuts[k + 1], -c.weight});
        }
    }
    return {Measure1D(mu.lo(), mu.hi(), std::move(pos_ac), std::move(pos_at), std::move(pos_c)),
            Measure1D(mu.lo(), mu.hi(), std::move(neg_ac), std::move(neg_at), std::move(neg_c))};
}

int sign_of_stair(const StairPoly& d, const Rational& x, int side) {
    if (d.is_polynomial()) return sign_near(d.base(), x, side);
    const int s = sgn(d(x));
    if (s != 0) return s;
    throw Error(ErrorCode::Unsupported, "polar density of a staircase-coupled density at a zero");
}

} // namespace

Measure1D total_variation(const Measure1D& mu) {
    auto s = split_signs(mu);
    return s.pos + s.neg;
}

std::pair<Measure1D, Measure1D> jordan(const Measure1D& mu) {
    auto s = split_signs(mu);
    return {std::move(s.pos), std::move(s.neg)};
}

int polar_density(const Measure1D& mu, const Rational& x) {
    if (!(mu.lo() < x && x < mu.hi())) throw Error(ErrorCode::NotInSupport, "point outside the domain");
    const Rational w = mu.atom(x);
    if (w != 0) return sgn(w);
    std::set<int> signs;
    for (const auto& c : mu.cantor_parts()) {
        if (x < c.lo || x > c.hi || !cantor::contains(c.geometry.normalize(x))) continue;
        // Sides of x carrying Cantor mass inside the window.
        const Rational nx = c.geometry.normalize(x);
        const bool left_charged = x > c.lo && cantor::cdf(nx) > cantor::cdf(c.geometry.normalize(c.lo));
        const bool right_charged = x < c.hi && cantor::cdf(nx) < cantor::cdf(c.geometry.normalize(c.hi));
        if (left_charged) signs.insert(sign_near(c.weight, x, -1));
        if (right_charged) signs.insert(sign_near(c.weight, x, +1));
    }
    for (const auto& piece : mu.ac()) {
        if (piece.lo < x && x < piece.hi) {
            signs.insert(sign_of_stair(piece.density, x, -1));
            signs.insert(sign_of_stair(piece.density, x, +1));
        } else if (piece.hi == x) {
            signs.insert(sign_of_stair(piece.density, x, -1));
        } else if (piece.lo == x) {
            signs.insert(sign_of_stair(piece.density, x, +1));
        }
    }
    signs.erase(0);
    if (signs.empty()) throw Error(ErrorCode::NotInSupport, "point " + to_string(x) + " is outside supp|mu|");
    if (signs.size() > 1)
        throw Error(ErrorCode::NotInSupport, "point " + to_string(x) + " is not a Lebesgue point of the polar density");
    return *signs.begin();
}

Measure1D lattice_min(const Measure1D& a, const Measure1D& b) { return a - jordan(a - b).first; }

Measure1D lattice_max(const Measure1D& a, const Measure1D& b) { return b + jordan(a - b).first; }

LebesgueParts lebesgue_decompose(const Measure1D& mu) {
    return {Measure1D(mu.lo(), mu.hi(), mu.ac(), {}, {}), Measure1D(mu.lo(), mu.hi(), {}, mu.atoms(), {}),
            Measure1D(mu.lo(), mu.hi(), {}, {}, mu.cantor_parts())};
}

std::vector<Rational> feature_points(const Measure1D& mu) {
    std::vector<Rational> out;
    for (const auto& p : mu.ac()) {
        out.push_back(p.lo);
        out.push_back(p.hi);
        for (const auto& [f, q] : p.density.terms()) {
            out.push_back(f.a);
            out.push_back(f.b);
        }
    }
    for (const auto& [x, w] : mu.atoms()) out.push_back(x);
    for (const auto& c : mu.cantor_parts()) {
        out.push_back(c.lo);
        out.push_back(c.hi);
    }
    return sorted_unique(std::move(out));
}

} // namespace bvpair
