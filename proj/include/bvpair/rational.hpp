#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace bvpair {

using Rational = mpq_class;

// Accepts "p", "-p", "p/q". Decimal and exponent forms are rejected: every
// exact-mode input is a ratio of integers.
Rational parse_rational(std::string_view text);

// Canonical form: "p" for integers, "p/q" otherwise (lowest terms, q > 0).
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs_q(const Rational& r) { return r < 0 ? Rational(-r) : r; }
inline int sign_q(const Rational& r) { return sgn(r); }
inline Rational min_q(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max_q(const Rational& a, const Rational& b) { return a < b ? b : a; }

// base^exponent, exponent may be negative.
Rational pow_q(const Rational& base, long exponent);

// Exact binary value of a double; turns user-facing float tolerances into
// exact thresholds.
Rational from_double(double value);

} // namespace bvpair
