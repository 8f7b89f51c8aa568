#pragma once

#include "bvpair/polynomial.hpp"
#include "bvpair/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace bvpair {

// Affine image of the Cantor staircase: F(x) = cantor::cdf((x - a) / (b - a)).
struct Staircase {
    Rational a;
    Rational b;

    Rational operator()(const Rational& x) const;
    // Position of x in the normalized [0, 1] picture.
    Rational normalize(const Rational& x) const { return (x - a) / (b - a); }
    // The affine map [0, 1] -> [a, b] as a polynomial.
    Polynomial chart() const { return Polynomial::linear(a, b - a); }

    friend bool operator==(const Staircase& l, const Staircase& r) { return l.a == r.a && l.b == r.b; }
    friend bool operator!=(const Staircase& l, const Staircase& r) { return !(l == r); }
    friend bool operator<(const Staircase& l, const Staircase& r) {
        return l.a < r.a || (l.a == r.a && l.b < r.b);
    }
};

// A function of the form p(x) + sum_k q_k(x) F_k(x) with polynomial p, q_k
// and staircases F_k. This is the smallest class closed under the products
// and derivatives the pairing needs once a Cantor staircase appears in a BV
// function: d(q F) = q' F dx + q dC.
//
// A StairPoly is always interpreted on one piece (l, r). Inside a piece each
// staircase either varies ([l, r] inside [a, b]) or is constant (0 left of
// a, 1 right of b); restrict_to folds the constant ones into p.
class StairPoly {
public:
    StairPoly() = default;
    StairPoly(Polynomial base) : base_(std::move(base)) {}  // NOLINT(google-explicit-constructor)
    StairPoly(const Rational& c) : base_(c) {}  // NOLINT(google-explicit-constructor)
    StairPoly(int c) : base_(Rational(c)) {}  // NOLINT(google-explicit-constructor)

    static StairPoly staircase(const Staircase& f, const Polynomial& coeff);

    const Polynomial& base() const { return base_; }
    const std::map<Staircase, Polynomial>& terms() const { return terms_; }
    bool is_polynomial() const { return terms_.empty(); }
    bool is_zero() const { return base_.is_zero() && terms_.empty(); }
    // Constant base and constant staircase coefficients: monotone between its ends.
    bool is_simple_staircase() const;
    int degree() const;

    Rational operator()(const Rational& x) const;

    // Density part of the derivative on a piece inside every staircase support;
    // the singular part is sum_k q_k dC_k, read off terms() directly.
    StairPoly derivative() const;

    StairPoly restrict_to(const Rational& l, const Rational& r) const;

    StairPoly& operator+=(const StairPoly& o);
    StairPoly& operator-=(const StairPoly& o);
    StairPoly& operator*=(const Rational& s);
    StairPoly& operator*=(const Polynomial& p);
    friend StairPoly operator+(StairPoly a, const StairPoly& b) { return a += b; }
    friend StairPoly operator-(StairPoly a, const StairPoly& b) { return a -= b; }
    friend StairPoly operator*(StairPoly a, const Rational& s) { return a *= s; }
    friend StairPoly operator*(StairPoly a, const Polynomial& p) { return a *= p; }
    StairPoly operator-() const { return *this * Rational(-1); }
    // Throws Unsupported when both factors carry staircase terms.
    friend StairPoly operator*(const StairPoly& a, const StairPoly& b);

    std::optional<StairPoly> divide_exact(const Polynomial& d) const;

    friend bool operator==(const StairPoly& l, const StairPoly& r) {
        return l.base_ == r.base_ && l.terms_ == r.terms_;
    }
    friend bool operator!=(const StairPoly& l, const StairPoly& r) { return !(l == r); }

    // "[c0,...]" optionally followed by "+F(a,b)[q0,...]" per staircase term.
    std::string to_string() const;

private:
    void prune();
    Polynomial base_;
    std::map<Staircase, Polynomial> terms_;
};

// Parses the to_string() form; `pos` is advanced past the consumed text.
StairPoly parse_stair_poly(const std::string& text, std::size_t& pos);
Polynomial parse_polynomial(const std::string& text, std::size_t& pos);

} // namespace bvpair
