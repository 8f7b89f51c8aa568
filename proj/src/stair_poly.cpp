#include "bvpair/stair_poly.hpp"

#include "bvpair/cantor.hpp"
#include "bvpair/error.hpp"
#include "text_scan.hpp"

#include <sstream>

namespace bvpair {

Rational Staircase::operator()(const Rational& x) const { return cantor::cdf(normalize(x)); }

StairPoly StairPoly::staircase(const Staircase& f, const Polynomial& coeff) {
    if (!(f.a < f.b)) throw Error(ErrorCode::InvalidArgument, "staircase support must satisfy a < b");
    StairPoly s;
    if (!coeff.is_zero()) s.terms_.emplace(f, coeff);
    return s;
}

bool StairPoly::is_simple_staircase() const {
    if (!base_.is_constant()) return false;
    for (const auto& [f, q] : terms_)
        if (!q.is_constant()) return false;
    return true;
}

int StairPoly::degree() const {
    int d = base_.degree();
    for (const auto& [f, q] : terms_) d = std::max(d, q.degree());
    return d;
}

Rational StairPoly::operator()(const Rational& x) const {
    Rational v = base_(x);
    for (const auto& [f, q] : terms_) v += q(x) * f(x);
    return v;
}

StairPoly StairPoly::derivative() const {
    StairPoly d(base_.derivative());
    for (const auto& [f, q] : terms_) {
        auto dq = q.derivative();
        if (!dq.is_zero()) d.terms_.emplace(f, dq);
    }
    return d;
}

StairPoly StairPoly::restrict_to(const Rational& l, const Rational& r) const {
    StairPoly out(base_);
    for (const auto& [f, q] : terms_) {
        if (r <= f.a) continue;
        if (l >= f.b) {
            out.base_ += q;
            continue;
        }
        if (f.a <= l && r <= f.b) {
            out.terms_[f] += q;
            continue;
        }
        throw Error(ErrorCode::InvalidArgument,
                    "piece (" + bvpair::to_string(l) + "," + bvpair::to_string(r) + ") straddles a staircase end");
    }
    out.prune();
    return out;
}

void StairPoly::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.is_zero()) it = terms_.erase(it); else ++it;
    }
}

StairPoly& StairPoly::operator+=(const StairPoly& o) {
    base_ += o.base_;
    for (const auto& [f, q] : o.terms_) terms_[f] += q;
    prune();
    return *this;
}

StairPoly& StairPoly::operator-=(const StairPoly& o) {
    base_ -= o.base_;
    for (const auto& [f, q] : o.terms_) terms_[f] -= q;
    prune();
    return *this;
}

StairPoly& StairPoly::operator*=(const Rational& s) {
    base_ *= s;
    for (auto& [f, q] : terms_) q *= s;
    prune();
    return *this;
}

StairPoly& StairPoly::operator*=(const Polynomial& p) {
    base_ *= p;
    for (auto& [f, q] : terms_) q *= p;
    prune();
    return *this;
}

StairPoly operator*(const StairPoly& a, const StairPoly& b) {
    if (!a.is_polynomial() && !b.is_polynomial())
        throw Error(ErrorCode::Unsupported, "product of two staircase-carrying functions");
    if (a.is_polynomial()) return b * a.base();
    return a * b.base();
}

std::optional<StairPoly> StairPoly::divide_exact(const Polynomial& d) const {
    auto b = base_.divide_exact(d);
    if (!b) return std::nullopt;
    StairPoly out(*b);
    for (const auto& [f, q] : terms_) {
        auto qq = q.divide_exact(d);
        if (!qq) return std::nullopt;
        out.terms_.emplace(f, *qq);
    }
    out.prune();
    return out;
}

std::string StairPoly::to_string() const {
    std::ostringstream os;
    os << base_.to_string();
    for (const auto& [f, q] : terms_)
        os << "+F(" << bvpair::to_string(f.a) << ',' << bvpair::to_string(f.b) << ')' << q.to_string();
    return os.str();
}

Polynomial parse_polynomial(const std::string& text, std::size_t& pos) {
    detail::Scanner sc(text, pos);
    sc.expect('[');
    std::vector<Rational> coeffs;
    if (!sc.accept(']')) {
        do {
            coeffs.push_back(sc.rational());
        } while (sc.accept(','));
        sc.expect(']');
    }
    pos = sc.pos();
    return Polynomial(std::move(coeffs));
}

StairPoly parse_stair_poly(const std::string& text, std::size_t& pos) {
    StairPoly out(parse_polynomial(text, pos));
    detail::Scanner sc(text, pos);
    while (sc.accept_word("+F(")) {
        Staircase f;
        f.a = sc.rational();
        sc.expect(',');
        f.b = sc.rational();
        sc.expect(')');
        std::size_t p = sc.pos();
        Polynomial q = parse_polynomial(text, p);
        sc.seek(p);
        out += StairPoly::staircase(f, q);
    }
    pos = sc.pos();
    return out;
}

} // namespace bvpair
