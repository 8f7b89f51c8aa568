#include "bvpair/piecewise_poly.hpp"

#include "bvpair/error.hpp"
#include "bvpair/stair_poly.hpp"
#include "text_scan.hpp"

#include <algorithm>
#include <sstream>

namespace bvpair {

PiecewisePoly::PiecewisePoly(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces)
    : bps_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (bps_.size() < 2 || pieces_.size() + 1 != bps_.size())
        throw Error(ErrorCode::InvalidArgument, "piecewise polynomial needs n+1 breakpoints for n pieces");
    for (std::size_t k = 0; k + 1 < bps_.size(); ++k)
        if (!(bps_[k] < bps_[k + 1])) throw Error(ErrorCode::InvalidArgument, "breakpoints must increase strictly");
}

PiecewisePoly PiecewisePoly::constant(const Rational& lo, const Rational& hi, const Rational& c) {
    return PiecewisePoly({lo, hi}, {Polynomial(c)});
}

PiecewisePoly PiecewisePoly::polynomial(const Rational& lo, const Rational& hi, const Polynomial& p) {
    return PiecewisePoly({lo, hi}, {p});
}

PiecewisePoly PiecewisePoly::bump(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b) {
    if (!(lo <= a && a < b && b <= hi)) throw Error(ErrorCode::InvalidArgument, "bump support outside domain");
    const Polynomial body = Polynomial::linear(-a, 1).pow(2) * Polynomial::linear(b, -1).pow(2);
    std::vector<Rational> bps{lo};
    std::vector<Polynomial> pieces;
    if (lo < a) {
        bps.push_back(a);
        pieces.emplace_back();
    }
    bps.push_back(b);
    pieces.push_back(body);
    if (b < hi) {
        bps.push_back(hi);
        pieces.emplace_back();
    }
    return PiecewisePoly(std::move(bps), std::move(pieces));
}

PiecewisePoly PiecewisePoly::linear_interpolant(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "interpolant needs matching node lists of length >= 2");
    std::vector<Polynomial> pieces;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        if (!(xs[k] < xs[k + 1])) throw Error(ErrorCode::InvalidArgument, "interpolation nodes must increase strictly");
        const Rational slope = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
        pieces.push_back(Polynomial::linear(ys[k] - slope * xs[k], slope));
    }
    return PiecewisePoly(xs, std::move(pieces));
}

std::size_t PiecewisePoly::piece_index(const Rational& x) const {
    if (x < lo() || x > hi()) throw Error(ErrorCode::InvalidArgument, "point " + bvpair::to_string(x) + " outside domain");
    auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - bps_.begin());
    if (k == 0) return 0;
    return std::min(k - 1, pieces_.size() - 1);
}

Rational PiecewisePoly::left(const Rational& x) const {
    std::size_t k = piece_index(x);
    if (k > 0 && bps_[k] == x) --k;
    return pieces_[k](x);
}

Rational PiecewisePoly::right(const Rational& x) const { return pieces_[piece_index(x)](x); }

Rational PiecewisePoly::operator()(const Rational& x) const {
    const Rational r = right(x), l = left(x);
    if (r != l) throw Error(ErrorCode::InvalidArgument, "discontinuity at " + bvpair::to_string(x));
    return r;
}

const Polynomial& PiecewisePoly::piece_on(const Rational& l, const Rational& r) const {
    const std::size_t k = piece_index(l);
    if (r > bps_[k + 1]) throw Error(ErrorCode::InvalidArgument, "interval spans a breakpoint");
    return pieces_[k];
}

bool PiecewisePoly::continuous_at(const Rational& x) const { return left(x) == right(x); }

bool PiecewisePoly::continuous() const {
    for (std::size_t k = 1; k + 1 < bps_.size(); ++k)
        if (pieces_[k - 1](bps_[k]) != pieces_[k](bps_[k])) return false;
    return true;
}

bool PiecewisePoly::nonnegative() const {
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const Polynomial& p = pieces_[k];
        if (p.is_zero()) continue;
        const Rational& a = bps_[k];
        const Rational& b = bps_[k + 1];
        if (sign_near(p, a, +1) < 0) return false;
        std::vector<Rational> cuts{a};
        for (const auto& root : isolate_roots(p, a, b, Rational(1, 1 << 20))) {
            if (!root.exact()) {
                // A simple irrational root always changes sign.
                if (sgn(p(root.lo)) != sgn(p(root.hi))) return false;
            }
            cuts.push_back(root.point());
        }
        cuts.push_back(b);
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
            if (p((cuts[j] + cuts[j + 1]) / 2) < 0) return false;
        if (p(a) < 0 || p(b) < 0) return false;
    }
    return true;
}

int PiecewisePoly::max_degree() const {
    int d = -1;
    for (const auto& p : pieces_) d = std::max(d, p.degree());
    return d;
}

PiecewisePoly PiecewisePoly::derivative() const {
    std::vector<Polynomial> d;
    d.reserve(pieces_.size());
    for (const auto& p : pieces_) d.push_back(p.derivative());
    return PiecewisePoly(bps_, std::move(d));
}

PiecewisePoly PiecewisePoly::operator*(const Rational& s) const {
    std::vector<Polynomial> out;
    for (const auto& p : pieces_) out.push_back(p * s);
    return PiecewisePoly(bps_, std::move(out));
}

std::string PiecewisePoly::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        if (k) os << ' ';
        os << '(' << bvpair::to_string(bps_[k]) << ',' << bvpair::to_string(bps_[k + 1]) << ','
           << pieces_[k].to_string() << ')';
    }
    os << ']';
    return os.str();
}

PiecewisePoly parse_piecewise_poly(const std::string& text) {
    detail::Scanner sc(text);
    sc.expect('[');
    std::vector<Rational> bps;
    std::vector<Polynomial> pieces;
    while (sc.accept('(')) {
        Rational a = sc.rational();
        sc.expect(',');
        Rational b = sc.rational();
        sc.expect(',');
        std::size_t p = sc.pos();
        pieces.push_back(parse_polynomial(text, p));
        sc.seek(p);
        sc.expect(')');
        if (bps.empty()) bps.push_back(a);
        else if (bps.back() != a) sc.fail("pieces must be contiguous");
        bps.push_back(b);
    }
    sc.expect(']');
    if (!sc.at_end()) sc.fail("trailing input");
    return PiecewisePoly(std::move(bps), std::move(pieces));
}

} // namespace bvpair
