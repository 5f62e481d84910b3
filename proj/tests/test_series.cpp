#include <catch2/catch_amalgamated.hpp>

#include "qanho/report.hpp"
#include "qanho/series.hpp"
#include "support/rational.hpp"

using namespace qanho;
using qanho_tests::Rat;

namespace {
const PrecisionContext ctx40 = make_context(40, 10);
}

TEST_CASE("initial coefficients") {
    auto [a0, a2, a4] = initial_coefficients(ctx40.from_long(0));
    CHECK(a0 == ctx40.from_long(1));
    CHECK(a2.is_zero());
    CHECK(a4.is_zero());

    auto [b0, b2, b4] = initial_coefficients(ctx40.from_long(1));
    CHECK(b0 == ctx40.from_long(1));
    CHECK(b2 == ctx40.from_ratio(-1, 2));
    CHECK(b4 == ctx40.from_ratio(1, 24));

    auto [c0, c2, c4] = initial_coefficients(ctx40.from_long(2));
    CHECK(c0 == ctx40.from_long(1));
    CHECK(c2 == ctx40.from_long(-1));
    CHECK(c4 == ctx40.from_ratio(1, 6));
}

TEST_CASE("next_coefficient") {
    BigReal lambda = ctx40.from_long(1);
    // a_6 = (a_0 - lambda a_4) / 30 = (1 - 1/24)/30 = 23/720
    BigReal a6 = next_coefficient(ctx40.from_long(1), ctx40.from_ratio(1, 24), 6, lambda);
    CHECK(abs(a6 - ctx40.from_ratio(23, 720)) <= ctx40.pow10(-45));

    // lambda = 0: a_6 = a_0 / 30
    BigReal z6 = next_coefficient(ctx40.from_long(1), ctx40.from_long(0), 6,
                                  ctx40.from_long(0));
    CHECK(z6 == ctx40.from_ratio(1, 30));

    CHECK_THROWS_AS(next_coefficient(ctx40.from_long(1), ctx40.from_long(0), 4, lambda),
                    std::invalid_argument);
    CHECK_THROWS_AS(next_coefficient(ctx40.from_long(1), ctx40.from_long(0), 7, lambda),
                    std::invalid_argument);
}

TEST_CASE("recursion matches the ODE exactly (rational oracle)") {
    for (long n : {12L, 24L, 40L}) {
        for (Rat lambda : {Rat(1), Rat(2), Rat(1, 3), Rat(7, 5)}) {
            auto a = qanho_tests::series_coefficients(lambda, n);
            auto r = qanho_tests::ode_residual(a, lambda, n);
            for (const Rat& c : r) CHECK(c.is_zero());
        }
    }
}

TEST_CASE("a_6 against the rational oracle") {
    auto a = qanho_tests::series_coefficients(Rat(1), 6);
    CHECK(a[3] == Rat(23, 720));
}

TEST_CASE("eval_y small cases") {
    SeriesConfig cfg{4, ctx40.from_long(1), ctx40.from_long(1)};
    SeriesEval e = eval_y(cfg, ctx40);
    CHECK(abs(e.value - ctx40.from_ratio(13, 24)) <= ctx40.pow10(-45));
    CHECK(e.terms_used == 3);
    CHECK(e.max_term_magnitude >= ctx40.from_long(1));

    SeriesConfig zero{4, ctx40.from_long(2), ctx40.from_long(0)};
    CHECK(eval_y(zero, ctx40).value == ctx40.from_long(1));

    SeriesConfig bad{5, ctx40.from_long(1), ctx40.from_long(1)};
    CHECK_THROWS_AS(eval_y(bad, ctx40), std::invalid_argument);
    SeriesConfig neg{8, ctx40.from_long(-1), ctx40.from_long(1)};
    CHECK_THROWS_AS(eval_y(neg, ctx40), std::invalid_argument);
}

TEST_CASE("eval_y_prime small cases") {
    SeriesConfig cfg{4, ctx40.from_long(1), ctx40.from_long(1)};
    SeriesEval e = eval_y_prime(cfg, ctx40);
    // 2 a_2 + 4 a_4 = -1 + 1/6 = -5/6
    CHECK(abs(e.value - ctx40.from_ratio(-5, 6)) <= ctx40.pow10(-45));
    CHECK(e.terms_used == 2);

    // odd function of xi: vanishes as xi -> 0+
    SeriesConfig tiny{20, ctx40.pow10(-20), ctx40.from_long(1)};
    CHECK(abs(eval_y_prime(tiny, ctx40).value) <= ctx40.pow10(-19));
}

TEST_CASE("eval matches the exact rational sum") {
    long n = 20;
    Rat lambda(7, 5), xi(3, 2);
    auto a = qanho_tests::series_coefficients(lambda, n);
    Rat y_exact = qanho_tests::series_sum(a, xi, false);
    Rat yp_exact = qanho_tests::series_sum(a, xi, true);

    SeriesConfig cfg{n, ctx40.from_ratio(3, 2), ctx40.from_ratio(7, 5)};
    SeriesPair p = eval_y_and_prime(cfg, ctx40);
    CHECK(abs(p.y.value - y_exact.to_big(ctx40)) <= ctx40.pow10(-44));
    CHECK(abs(p.y_prime.value - yp_exact.to_big(ctx40)) <= ctx40.pow10(-44));
}

TEST_CASE("fused pass is bit-identical to separate passes") {
    PrecisionContext ctx = make_context(60, 10);
    SeriesConfig cfg{200, ctx.from_long(4), ctx.from_string("1.0603620904")};
    SeriesPair fused = eval_y_and_prime(cfg, ctx);
    SeriesEval y = eval_y(cfg, ctx);
    SeriesEval yp = eval_y_prime(cfg, ctx);
    CHECK(fused.y.value == y.value);
    CHECK(fused.y.max_term_magnitude == y.max_term_magnitude);
    CHECK(fused.y.terms_used == y.terms_used);
    CHECK(fused.y_prime.value == yp.value);
    CHECK(fused.y_prime.max_term_magnitude == yp.max_term_magnitude);
    CHECK(fused.y_prime.terms_used == yp.terms_used);
}

TEST_CASE("precision escalation reproduces digits up to cancellation") {
    SeriesConfig base{200, BigReal(), BigReal()};
    PrecisionContext lo = make_context(60, 10);
    PrecisionContext hi = make_context(110, 10);
    base.xi = lo.from_long(4);
    base.lambda = lo.from_string("1.0603");
    SeriesEval e_lo = eval_y(base, lo);
    SeriesEval e_hi = eval_y(base, hi);
    long cancel = cancellation_digits(e_lo);
    long expect = 60 - cancel - 8;
    REQUIRE(expect > 5);
    CHECK(compare_digits(to_decimal(e_lo.value, expect), to_decimal(e_hi.value, expect)) >=
          expect - 1);
}

TEST_CASE("cancellation_digits") {
    PrecisionContext ctx = make_context(30, 10);
    SeriesEval flat{ctx.from_long(1), ctx.from_long(1), 1};
    CHECK(cancellation_digits(flat) == 0);
    SeriesEval lossy{ctx.pow10(-4), ctx.pow10(6), 1};
    CHECK(cancellation_digits(lossy) == 10);
    SeriesEval zero{ctx.from_long(0), ctx.from_long(1), 1};
    CHECK(cancellation_digits(zero) == ctx.effective_digits());
}

TEST_CASE("record-run configuration loses on the order of 10^3 digits") {
    // xi = 16: the growing and decaying solutions differ by exp(2 xi^3 / 3),
    // about 1186 decimal digits of cancellation at the eigenvalue itself (a
    // lambda that is off by 10^-d only cancels ~d digits, so the probe needs
    // the full reference value)
    PrecisionContext ctx = make_context(2500, 50);
    SeriesConfig cfg{16384, ctx.from_long(16), ctx.from_string(reference_eps0())};
    SeriesEval e = eval_y(cfg, ctx);
    long lost = cancellation_digits(e);
    CHECK(lost >= 1000);
    CHECK(lost <= 1400);
}

TEST_CASE("sign_scan over the figure interval finds the eigenvalue cell") {
    // lambda -> y_80(x*; lambda) over [1.05, 1.08] in 10 steps, as in the
    // bounding figure; the sign change must land in the cell containing the
    // published 1.06036... value. At truncation 80 the evaluation point must
    // stay inside the stable range (x* = 3 here; by x* = 4 the truncated
    // tail dominates and the sign structure is gone).
    PrecisionContext ctx = make_context(30, 10);
    auto f = [&](const BigReal& lambda) {
        return eval_y(SeriesConfig{80, ctx.from_long(3), lambda}, ctx).value;
    };
    auto sc = sign_scan(f, ctx.from_string("1.05"), ctx.from_string("1.08"), 10, ctx);
    REQUIRE(sc.has_value());
    BigReal eps0 = ctx.from_string("1.060362090484182899647046016692663545515");
    CHECK(sc->lo <= eps0);
    CHECK(eps0 <= sc->hi);

    // the y_80(4; .) degenerate case: negative across the whole interval
    auto g = [&](const BigReal& lambda) {
        return eval_y(SeriesConfig{80, ctx.from_long(4), lambda}, ctx).value;
    };
    CHECK_FALSE(sign_scan(g, ctx.from_string("1.05"), ctx.from_string("1.08"), 10, ctx)
                    .has_value());
}
