#include "doctest.h"

#include "bvpair/cantor.hpp"
#include "bvpair/error.hpp"
#include "bvpair/polynomial.hpp"
#include "bvpair/rational.hpp"
#include "bvpair/stair_poly.hpp"

#include <cmath>

using namespace bvpair;

namespace {
Rational q(const char* s) { return parse_rational(s); }

// Float reference for the staircase: ternary digits walked to a fixed depth.
double cdf_float(double t, int depth = 60) {
    double value = 0, scale = 0.5;
    for (int k = 0; k < depth; ++k) {
        t *= 3;
        const int d = static_cast<int>(t);
        t -= d;
        if (d == 1) return value + scale;
        if (d == 2) value += scale;
        scale /= 2;
    }
    return value;
}
} // namespace

TEST_CASE("rational literals") {
    CHECK(q("3/6") == Rational(1, 2));
    CHECK(q("-4") == -4);
    CHECK(q("+2/3") == Rational(2, 3));
    CHECK_THROWS_AS(q("0.5"), Error);
    CHECK_THROWS_AS(q("1/0"), Error);
    CHECK_THROWS_AS(q("1/-2"), Error);
    CHECK(to_string(q("6/4")) == "3/2");
    CHECK(pow_q(Rational(2), -3) == Rational(1, 8));
    CHECK(from_double(0.5) == Rational(1, 2));
}

TEST_CASE("polynomial arithmetic and calculus") {
    const Polynomial p{1, -3, 0, 2};  // 1 - 3x + 2x^3
    CHECK(p(Rational(2)) == 11);
    CHECK(p.derivative() == Polynomial{-3, 0, 6});
    CHECK(p.integrate(0, 1) == Rational(1) - Rational(3, 2) + Rational(1, 2));
    CHECK(p.compose(Polynomial::linear(1, 1))(0) == p(1));
    auto [quot, rem] = p.divmod(Polynomial{-1, 1});
    CHECK(quot * Polynomial{-1, 1} + rem == p);
    CHECK(rem == Polynomial(p(1)));
    CHECK(Polynomial().degree() == -1);
    CHECK(Polynomial{0, 0}.is_zero());
}

TEST_CASE("root isolation returns rational roots exactly") {
    // (x - 1/3)(x + 2/5)(x - 7/2)
    const Polynomial p = Polynomial{q("-1/3"), 1} * Polynomial{q("2/5"), 1} * Polynomial{q("-7/2"), 1};
    auto roots = isolate_roots(p, -10, 10, Rational(1, 1000));
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].exact());
    CHECK(roots[0].lo == q("-2/5"));
    CHECK(roots[1].lo == q("1/3"));
    CHECK(roots[2].lo == q("7/2"));
    // Degree 5 with a repeated rational root.
    const Polynomial r = Polynomial{q("-3/7"), 1}.pow(3) * Polynomial{-5, 0, 1};
    auto rr = isolate_roots(r, -3, 3, Rational(1, 1 << 30));
    REQUIRE(rr.size() == 3);
    CHECK(rr[1].exact());
    CHECK(rr[1].lo == q("3/7"));
    CHECK(!rr[0].exact());
    CHECK(std::abs(rr[0].point().get_d() + std::sqrt(5.0)) < 1e-8);
    CHECK(std::abs(rr[2].point().get_d() - std::sqrt(5.0)) < 1e-8);
    // Roots on the interval ends are excluded.
    CHECK(isolate_roots(Polynomial{0, 1} * Polynomial{-1, 1}, 0, 1, Rational(1, 8)).empty());
}

TEST_CASE("one-sided signs") {
    const Polynomial p = Polynomial{0, 1}.pow(3);
    CHECK(sign_near(p, 0, +1) == 1);
    CHECK(sign_near(p, 0, -1) == -1);
    CHECK(sign_near(Polynomial{0, 0, 1}, 0, -1) == 1);
    CHECK(sign_near(Polynomial(), 0, 1) == 0);
}

TEST_CASE("Cantor staircase values") {
    CHECK(cantor::cdf(q("1/4")) == q("1/3"));
    CHECK(cantor::cdf(q("1/3")) == q("1/2"));
    CHECK(cantor::cdf(q("2/3")) == q("1/2"));
    CHECK(cantor::cdf(q("1/2")) == q("1/2"));
    CHECK(cantor::cdf(q("3/4")) == q("2/3"));
    CHECK(cantor::cdf(q("1/9")) == q("1/4"));
    for (int den = 2; den < 40; ++den)
        for (int num = 1; num < den; ++num) {
            const Rational t(num, den);
            CHECK(std::abs(cantor::cdf(t).get_d() - cdf_float(t.get_d())) < 1e-9);
        }
}

TEST_CASE("Cantor set membership and snapping") {
    CHECK(cantor::contains(q("1/4")));
    CHECK(cantor::contains(q("1/3")));
    CHECK(!cantor::contains(q("1/2")));
    CHECK(cantor::snap_up(q("1/2")) == q("2/3"));
    CHECK(cantor::snap_down(q("1/2")) == q("1/3"));
    CHECK(cantor::snap_up(q("1/4")) == q("1/4"));
    CHECK(cantor::inverse_max(q("1/2")) == q("2/3"));
    CHECK(cantor::inverse_min(q("1/2")) == q("1/3"));
    CHECK(cantor::inverse_max(q("1/3")) == q("1/4"));
    CHECK(cantor::inverse_min(q("1/3")) == q("1/4"));
}

TEST_CASE("Cantor moments and windows") {
    CHECK(cantor::moment(0) == 1);
    CHECK(cantor::moment(1) == q("1/2"));
    CHECK(cantor::moment(2) == q("3/8"));
    // Mass of [0, 1/3] by self-similarity.
    auto w = cantor::integrate(Polynomial(1), 0, q("1/3"), 20);
    CHECK(w.exact);
    CHECK(w.value == q("1/2"));
    // First moment of the left half: (1/3) * (1/2) * (1/2).
    auto m = cantor::integrate(Polynomial::x(), 0, q("1/2"), 20);
    CHECK(m.exact);
    CHECK(m.value == q("1/12"));
    // A window ending inside the set is approximated; the two halves still add up to the first moment.
    auto a = cantor::integrate(Polynomial::x(), 0, q("1/4"), 20);
    CHECK(!a.exact);
    auto b = cantor::integrate(Polynomial::x(), q("1/4"), 1, 20);
    CHECK(std::abs(Rational(a.value + b.value - q("1/2")).get_d()) < 1e-9);
}

TEST_CASE("stair polynomials fold staircases outside their support") {
    const Staircase f{0, 1};
    StairPoly s = StairPoly(Polynomial{1}) + StairPoly::staircase(f, Polynomial{2});
    CHECK(s(q("1/3")) == 2);
    CHECK(s.restrict_to(1, 2) == StairPoly(Polynomial{3}));
    CHECK(s.restrict_to(-1, 0) == StairPoly(Polynomial{1}));
    CHECK_THROWS_AS(s.restrict_to(q("1/2"), 2), Error);
    CHECK_THROWS_AS(s * s, Error);
    std::size_t pos = 0;
    CHECK(parse_stair_poly(s.to_string(), pos) == s);
}
