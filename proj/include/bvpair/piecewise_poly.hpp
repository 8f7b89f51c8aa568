#pragma once

#include "bvpair/polynomial.hpp"
#include "bvpair/rational.hpp"

#include <string>
#include <vector>

namespace bvpair {

// Piecewise polynomial on [lo, hi]: pieces()[k] lives on
// (breakpoints()[k], breakpoints()[k + 1]). Used for test functions and
// scalar maps; values at breakpoints come from the one-sided limits.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces);

    static PiecewisePoly constant(const Rational& lo, const Rational& hi, const Rational& c);
    static PiecewisePoly polynomial(const Rational& lo, const Rational& hi, const Polynomial& p);
    // (x - a)^2 (b - x)^2 on [a, b], zero elsewhere in [lo, hi]; a C^1 bump.
    static PiecewisePoly bump(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b);
    // Continuous piecewise linear interpolant of the given nodes (xs increasing).
    static PiecewisePoly linear_interpolant(const std::vector<Rational>& xs, const std::vector<Rational>& ys);

    const std::vector<Rational>& breakpoints() const { return bps_; }
    const std::vector<Polynomial>& pieces() const { return pieces_; }
    const Rational& lo() const { return bps_.front(); }
    const Rational& hi() const { return bps_.back(); }

    // Index of the piece whose closure contains x, preferring the right one.
    std::size_t piece_index(const Rational& x) const;
    Rational left(const Rational& x) const;
    Rational right(const Rational& x) const;
    // Value at x; throws InvalidArgument at a discontinuity.
    Rational operator()(const Rational& x) const;
    // Polynomial agreeing with this on (l, r); the interval must lie in one piece.
    const Polynomial& piece_on(const Rational& l, const Rational& r) const;

    bool continuous() const;
    bool continuous_at(const Rational& x) const;
    // Exact: p >= 0 on every piece, decided by root isolation.
    bool nonnegative() const;
    int max_degree() const;

    PiecewisePoly derivative() const;
    PiecewisePoly operator*(const Rational& s) const;
    friend bool operator==(const PiecewisePoly& a, const PiecewisePoly& b) {
        return a.bps_ == b.bps_ && a.pieces_ == b.pieces_;
    }

    // "[(a,b,[c0,...]) ...]"
    std::string to_string() const;

private:
    std::vector<Rational> bps_;
    std::vector<Polynomial> pieces_;
};

PiecewisePoly parse_piecewise_poly(const std::string& text);

} // namespace bvpair
