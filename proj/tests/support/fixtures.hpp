#pragma once

#include "bvpair/bv.hpp"
#include "bvpair/dm_field.hpp"
#include "bvpair/measure.hpp"
#include "bvpair/rational.hpp"

namespace fixtures {

using bvpair::Rational;

inline Rational q(const char* s) { return bvpair::parse_rational(s); }

// Field chi_(-1,1) and function chi_[-1,1] on (-2, 2).
inline bvpair::DMField1D box_field() { return bvpair::DMField1D(bvpair::PiecewiseBV::indicator(-2, 2, -1, 1)); }
inline bvpair::PiecewiseBV box_function() { return bvpair::PiecewiseBV::indicator(-2, 2, -1, 1); }

inline bvpair::Measure1D atoms(const Rational& lo, const Rational& hi, std::map<Rational, Rational> w) {
    return bvpair::Measure1D(lo, hi, {}, std::move(w), {});
}

inline bvpair::PiecewiseBV linear(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b) {
    return bvpair::PiecewiseBV({lo, hi}, {bvpair::StairPoly(bvpair::Polynomial::linear(a, b))});
}

} // namespace fixtures
