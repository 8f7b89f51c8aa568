#pragma once

#include "bvpair/polynomial.hpp"
#include "bvpair/rational.hpp"

namespace bvpair::cantor {

// Primitives for the middle-thirds Cantor measure C on [0, 1] and its
// distribution function (the Cantor-Vitali staircase).
//
// Rational points have eventually periodic ternary expansions, so the
// staircase value, set membership and the nearest points of the Cantor set
// are all computed exactly by detecting the period.

// F(t) = C([0, t]); 0 for t <= 0 and 1 for t >= 1.
Rational cdf(const Rational& t);

bool contains(const Rational& t);

// Smallest point of the Cantor set >= t, largest point <= t. t in [0, 1].
Rational snap_up(const Rational& t);
Rational snap_down(const Rational& t);

// max / min of the preimage F^{-1}(s), s in [0, 1]. The preimage is a single
// point unless s is dyadic, in which case it is the closure of a removed gap.
Rational inverse_max(const Rational& s);
Rational inverse_min(const Rational& s);

// k-th moment of C, computed from the self-similarity recursion.
Rational moment(unsigned k);

// Integral of p against the Cantor measure of the cell [c, c + 3^-depth]
// scaled to mass 2^-depth; exact.
Rational integrate_cell(const Polynomial& p, const Rational& cell_left, unsigned depth);

struct Quadrature {
    Rational value;
    bool exact = true;
};

// Integral of p against C restricted to [s, t] (0 <= s <= t <= 1). Cells of
// the self-similar subdivision lying inside the window are integrated
// exactly through the moments; cells still straddling a window endpoint at
// `depth_cap` are approximated by p(midpoint) times their exact mass.
Quadrature integrate(const Polynomial& p, const Rational& s, const Rational& t, unsigned depth_cap);

inline constexpr unsigned kDefaultDepthCap = 20;

} // namespace bvpair::cantor
