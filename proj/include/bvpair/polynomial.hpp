#pragma once

#include "bvpair/rational.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bvpair {

// Dense univariate polynomial with rational coefficients, lowest degree
// first. Trailing zero coefficients are always trimmed, so the zero
// polynomial has an empty coefficient vector.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(const Rational& constant);  // NOLINT(google-explicit-constructor)
    Polynomial(int constant) : Polynomial(Rational(constant)) {}  // NOLINT
    Polynomial(std::initializer_list<Rational> coeffs);
    explicit Polynomial(std::vector<Rational> coeffs);

    static Polynomial x();
    // a + b x
    static Polynomial linear(const Rational& a, const Rational& b);

    const std::vector<Rational>& coeffs() const { return c_; }
    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    Rational operator()(const Rational& t) const;
    double eval_d(double t) const;

    Polynomial derivative() const;
    // Antiderivative vanishing at 0.
    Polynomial antiderivative() const;
    Rational integrate(const Rational& a, const Rational& b) const;
    // this(inner(x))
    Polynomial compose(const Polynomial& inner) const;
    Polynomial pow(unsigned k) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o);
    Polynomial& operator*=(const Rational& s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
    Polynomial operator-() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    // Quotient and remainder of Euclidean division; divisor must be nonzero.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;
    std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;
    Polynomial monic() const;

    // "[c0,c1,...]" with canonical rational literals.
    std::string to_string() const;

private:
    void trim();
    std::vector<Rational> c_;
};

Polynomial gcd(Polynomial a, Polynomial b);
Polynomial squarefree_part(const Polynomial& p);

// A real root located either exactly (lo == hi) or inside an isolating
// interval (lo, hi) whose width is at most the requested tolerance.
struct RootInterval {
    Rational lo;
    Rational hi;
    bool exact() const { return lo == hi; }
    // The exact root, or the interval midpoint.
    Rational point() const { return exact() ? lo : Rational((lo + hi) / 2); }
};

// Distinct real roots of p strictly inside (a, b), sorted. Every rational
// root is returned exactly; irrational roots are enclosed in intervals of
// width at most `width`. p must not be the zero polynomial.
std::vector<RootInterval> isolate_roots(const Polynomial& p, const Rational& a, const Rational& b,
                                        const Rational& width);

// Sign of p on the right (side = +1) or left (side = -1) of t, i.e. the sign
// of p(t + s) for all sufficiently small s with sign(s) = side.
int sign_near(const Polynomial& p, const Rational& t, int side);

// Sign of p on the open interval (a, b), assuming p has no roots there.
int sign_between(const Polynomial& p, const Rational& a, const Rational& b);

} // namespace bvpair
