#include "doctest.h"
#include "fixtures.hpp"

#include "bvpair/error.hpp"
#include "bvpair/theorems.hpp"

using namespace bvpair;
using fixtures::q;

namespace {

std::vector<PiecewisePoly> bumps(const Rational& lo, const Rational& hi) {
    return {PiecewisePoly::bump(lo, hi, q("-3/2"), q("-1/2")), PiecewisePoly::bump(lo, hi, q("1/2"), q("3/2")),
            PiecewisePoly::bump(lo, hi, q("-3/2"), q("3/2")), PiecewisePoly::bump(lo, hi, q("-7/4"), 0),
            PiecewisePoly::bump(lo, hi, q("-1/3"), q("5/3"))};
}

PiecewiseBV ramp_to_one(const Rational& lo, const Rational& hi) {
    // x on (0, 1), zero elsewhere.
    return PiecewiseBV({lo, 0, 1, hi}, {StairPoly(0), StairPoly(Polynomial::x()), StairPoly(0)});
}

} // namespace

TEST_CASE("coarea on the box example") {
    const DMField1D a = fixtures::box_field();
    const PiecewiseBV u = fixtures::box_function();
    for (const char* lm : {"0", "1/3", "1"})
        for (const char* lp : {"0", "1/2", "1"}) {
            const LambdaSelector lam(q("1/2"), {{-1, q(lm)}, {1, q(lp)}});
            const auto r = verify_coarea(a, u, lam, bumps(-2, 2));
            CHECK(r.pass);
            CHECK(r.exact);
            CHECK(r.residual == 0);
        }
    // Explicit value against (1 - lambda(-1)) phi(-1) + (lambda(1) - 1) phi(1).
    const PiecewisePoly phi = PiecewisePoly::polynomial(-2, 2, Polynomial{3, 1, 1});
    const LambdaSelector lam(q("1/2"), {{-1, q("1/4")}, {1, q("2/3")}});
    const auto r = verify_coarea(a, u, lam, {phi});
    CHECK(r.pass);
    CHECK(r.series[0][1] == to_string(q("3/4") * phi(-1) + (q("2/3") - 1) * phi(1)));
}

TEST_CASE("coarea with an a.c. part and a downward jump") {
    const DMField1D a(PiecewiseBV::indicator(-1, 2, 0, 1));
    const PiecewiseBV u = ramp_to_one(-1, 2);
    const PiecewisePoly phi = PiecewisePoly::polynomial(-1, 2, Polynomial{1, 2, 0, 1});
    for (const char* l : {"0", "1/5", "1"}) {
        const LambdaSelector lam(q("1/2"), {{1, q(l)}});
        const auto r = verify_coarea(a, u, lam, {phi});
        CHECK(r.pass);
        const Rational expected = Polynomial{1, 2, 0, 1}.integrate(0, 1) + (q(l) - 1) * phi(1);
        CHECK(r.series[0][2] == to_string(expected));
    }
    CHECK(verify_coarea(a, PiecewiseBV::constant(-1, 2, 4), LambdaSelector(), {phi}).pass);
    const PiecewiseBV curved({-1, 2}, {StairPoly(Polynomial{0, 0, 1})});
    CHECK_THROWS_AS(verify_coarea(a, curved, LambdaSelector(), {phi}), Error);
}

TEST_CASE("theta slicing") {
    const DMField1D smooth(PiecewiseBV({0, 1}, {StairPoly(Polynomial{1, 0, 1})}));
    const PiecewiseBV x = fixtures::linear(0, 1, 0, 1);
    const auto r = verify_theta_slicing(smooth, x, LambdaSelector(), {q("1/3")});
    CHECK(r.pass);
    REQUIRE(r.series.size() == 1);
    CHECK(r.series[0][2] == to_string(q("10/9")));
    const LambdaSelector lam(q("1/2"), {{-1, q("1/5")}});
    const auto b = verify_theta_slicing(fixtures::box_field(), fixtures::box_function(), lam, {q("1/2")});
    CHECK(b.pass);
    CHECK(b.series.size() == 2);
    CHECK(verify_theta_slicing(fixtures::box_field(), fixtures::box_function(), lam, {5}).pass);
    CHECK(verify_theta_slicing(fixtures::box_field(), fixtures::box_function(), lam).pass);
}

TEST_CASE("chain rule") {
    const DMField1D a = fixtures::box_field();
    const PiecewiseBV u = fixtures::box_function();
    const LambdaSelector lam(q("1/2"), {{-1, q("1/3")}});
    const PiecewisePoly twice = PiecewisePoly::polynomial(-10, 10, Polynomial{0, 2});
    CHECK(verify_chain_rule(a, u, lam, twice).pass);
    CHECK(pairing_by_definition(a, u.compose(twice), lam).measure == pairing_by_definition(a, u, lam).measure * 2);

    const PiecewisePoly tk({-10, -1, 1, 10}, {Polynomial(-1), Polynomial::x(), Polynomial(1)});
    const PiecewiseBV w({-2, -1, 1, 2}, {StairPoly(Polynomial{0, 3}), StairPoly(Polynomial{1, 1}), StairPoly(-2)});
    CHECK(w.compose(tk) == w.truncate(1));
    CHECK(verify_chain_rule(a, w, lam, tk).pass);

    // s^2 on a nonnegative piecewise linear function.
    const PiecewiseBV pos({-2, 0, 2}, {StairPoly(Polynomial{2, 1}), StairPoly(Polynomial{3, -1})});
    const PiecewisePoly sq = PiecewisePoly::polynomial(0, 10, Polynomial{0, 0, 1});
    const DMField1D b(PiecewiseBV({-2, 0, 2}, {StairPoly(Polynomial{1, 1}), StairPoly(2)}));
    const auto r = verify_chain_rule(b, pos, LambdaSelector(q("1/4")), sq);
    CHECK(r.pass);
    const auto p = pairing_by_definition(b, pos, LambdaSelector(q("1/4")));
    const auto ph = pairing_by_definition(b, pos.compose(sq), LambdaSelector(q("1/4")));
    CHECK(ph.jump.atom(0) == (2 + 3) * p.jump.atom(0));

    const PiecewisePoly step({-10, 0, 10}, {Polynomial(0), Polynomial(1)});
    try {
        verify_chain_rule(a, u, lam, step);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonLipschitz);
    }
}

TEST_CASE("Leibniz formula") {
    const DMField1D a = fixtures::box_field();
    const PiecewiseBV u = fixtures::box_function();
    const LambdaSelector lam(q("2/3"));
    CHECK(verify_leibniz(a, u, PiecewiseBV::constant(-2, 2, 1), lam).pass);
    // Shared jump at 0, field continuous there.
    const DMField1D smooth(PiecewiseBV({-2, 2}, {StairPoly(Polynomial{3, 1})}));
    const PiecewiseBV uj({-2, 0, 2}, {StairPoly(1), StairPoly(4)});
    const PiecewiseBV vj({-2, 0, 2}, {StairPoly(5), StairPoly(-2)});
    CHECK(verify_leibniz(smooth, uj, vj, lam).pass);
    const auto pv = pairing_by_definition(product_field(vj, smooth), uj, lam);
    CHECK(pv.measure.atom(0) == (q("1/3") * -2 + q("2/3") * 5) * 3 * 3);
    // Smooth multiplier.
    const PiecewiseBV vs({-2, 2}, {StairPoly(Polynomial{1, 0, 1})});
    CHECK(verify_leibniz(smooth, fixtures::linear(-2, 2, 0, 1), vs, lam).pass);
    CHECK(verify_leibniz(a, u, vs, lam).pass);
}

TEST_CASE("Gauss-Green") {
    const DMField1D ax(fixtures::linear(0, 1, 0, 1));
    const PiecewiseBV ux = fixtures::linear(0, 1, 0, 1);
    const auto r = gauss_green(ax, ux, LambdaSelector(), q("1/4"), q("2/3"));
    CHECK(r.pass);
    CHECK(r.series[0][1] == to_string(q("4/9") - q("1/16")));
    const DMField1D a = fixtures::box_field();
    const PiecewiseBV u = fixtures::box_function();
    const LambdaSelector lam(q("1/2"), {{-1, q("1/5")}, {1, q("3/7")}});
    CHECK(gauss_green(a, u, lam, q("-3/2"), 0).pass);
    CHECK(gauss_green(a, u, lam, q("-3/2"), q("3/2")).pass);
    CHECK(gauss_green(a, u, lam, -1, 1).pass);
    // Left endpoint on an atom: the closure picks up the atom at -1.
    const auto on = gauss_green(a, u, lam, -1, 0);
    CHECK(on.pass);
    CHECK(on.series[0][1] == "0");
    CHECK(on.series[1][1] == "1");
    CHECK_THROWS_AS(gauss_green(a, u, lam, -2, 1), Error);
}

TEST_CASE("one-sided sequences") {
    const PiecewiseBV u = fixtures::box_function();
    for (int n : {2, 3, 7, 20}) {
        const PiecewiseBV un = one_sided_sequence(u, Side::Upper, n);
        const Rational h(1, n);
        const PiecewiseBV expected = PiecewiseBV::from_poly(
            PiecewisePoly::linear_interpolant({-2, -1 - h, -1, 1, 1 + h, 2}, {0, 0, 1, 1, 0, 0}));
        CHECK(un == expected);
        CHECK(un.total_variation().value == 2);
        CHECK(un.jumps().empty());
        const PiecewiseBV ln = one_sided_sequence(u, Side::Lower, n);
        CHECK(ln.right_limit(-1) == 0);
        CHECK(ln.total_variation().value == 2);
    }
    CHECK(one_sided_sequence(u, Side::Upper, 1) == one_sided_sequence(u, Side::Upper, 2));
    const PiecewiseBV c = PiecewiseBV::constant(0, 1, 3);
    CHECK(one_sided_sequence(c, Side::Upper, 5) == c);
}

TEST_CASE("tail limits") {
    const auto t = tail_limit([](int n) { return Approx{Rational(3) + Rational(2, n) - Rational(1, n * n), true}; }, 2, 3);
    CHECK(t.exact);
    CHECK(t.value == 3);
    const auto s = tail_limit([](int n) { return Approx{Rational(1, n + 1), true}; }, 2, 1);
    CHECK(!s.exact);
    CHECK(abs_q(s.value).get_d() < 1e-3);
}

TEST_CASE("semicontinuity on the box example") {
    const DMField1D a = fixtures::box_field();
    const PiecewiseBV u = fixtures::box_function();
    const auto phis = bumps(-2, 2);
    const LambdaSelector lsc(q("1/2"), {{-1, 1}, {1, 0}});
    for (bool neg : {false, true})
        for (auto kind : {SequenceKind::Upper, SequenceKind::Lower}) {
            SequenceSpec seq;
            seq.kind = kind;
            seq.negate = neg;
            const auto out = semicontinuity_experiment(a, lsc, u, seq, phis);
            CHECK(out.strict);
            CHECK(out.lahti_holds);
            CHECK(out.selector_class == SelectorClass::Lsc);
            CHECK(!out.lsc_violated());
            CHECK(out.report.pass);
            CHECK(out.report.exact);
        }
    // Upper sequence: every pairing vanishes, the limit pairing is -delta_1.
    const auto up = semicontinuity_experiment(a, lsc, u, SequenceSpec{}, phis);
    for (std::size_t k = 0; k < phis.size(); ++k) {
        CHECK(up.per_phi[k].limit.value == 0);
        CHECK(up.per_phi[k].target == -phis[k](1));
    }
    // The constant 1/2 selector violates both inequalities.
    bool lsc_bad = false, usc_bad = false;
    for (auto kind : {SequenceKind::Upper, SequenceKind::Lower}) {
        SequenceSpec seq;
        seq.kind = kind;
        const auto out = semicontinuity_experiment(a, LambdaSelector(), u, seq, phis);
        lsc_bad = lsc_bad || out.lsc_violated();
        usc_bad = usc_bad || out.usc_violated();
    }
    CHECK(lsc_bad);
    CHECK(usc_bad);
}

TEST_CASE("weak star counterexample") {
    const DMField1D a(PiecewiseBV::indicator(-1, 1, 0, 1));
    const PiecewiseBV zero = PiecewiseBV::constant(-1, 1, 0);
    SequenceSpec seq;
    seq.kind = SequenceKind::Hat;
    const std::vector<PiecewisePoly> phis{PiecewisePoly::bump(-1, 1, q("-1/2"), q("1/2")),
                                          PiecewisePoly::polynomial(-1, 1, Polynomial{2, 1, 1})};
    try {
        semicontinuity_experiment(a, LambdaSelector(), zero, seq, phis);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonStrictSequence);
    }
    const auto out = semicontinuity_experiment(a, LambdaSelector(), zero, seq, phis, true);
    CHECK(!out.strict);
    for (std::size_t k = 0; k < phis.size(); ++k) {
        CHECK(out.per_phi[k].limit.exact);
        CHECK(out.per_phi[k].limit.value == -phis[k](0));
        CHECK(out.per_phi[k].lsc_violated);
    }
    CHECK(!out.report.pass);
    CHECK(!out.lahti_holds);
}

TEST_CASE("mollification check") {
    const auto r = verify_mollification(fixtures::box_field(), PiecewisePoly::polynomial(-2, 2, Polynomial{1, 2, 3, 4}),
                                        q("1/2"));
    CHECK(r.pass);
    CHECK(r.series.size() > 5);
}

TEST_CASE("identity checks") {
    const DMField1D a = fixtures::box_field();
    const PiecewiseBV u = fixtures::box_function();
    const LambdaSelector lam(q("1/2"), {{-1, q("1/7")}});
    CHECK(verify_two_path(a, u, lam).pass);
    CHECK(verify_resto(a, u, lam).pass);
    CHECK(verify_nonlinearity(a, u, lam).pass);
    CHECK(verify_extremal(a, u).pass);
    CHECK(verify_domination(a, u, lam).pass);
    const auto j = verify_two_path(a, u, lam).to_json();
    CHECK(j["pass"] == true);
    CHECK(j["residual"] == "0");
}
