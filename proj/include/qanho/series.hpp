#ifndef QANHO_SERIES_HPP
#define QANHO_SERIES_HPP

#include <array>
#include <stdexcept>

#include "qanho/precision.hpp"

namespace qanho {

/// Truncated even power-series solution of -y'' + x^4 y = lambda y with
/// y(0) = 1, y'(0) = 0, summed at xi.
struct SeriesConfig {
    long n = 0;      // truncation order, even; the degree-4 seed needs n >= 4
    BigReal xi;      // evaluation point, > 0
    BigReal lambda;  // trial eigenvalue
};

inline void validate(const SeriesConfig& cfg) {
    if (cfg.n < 4 || cfg.n % 2 != 0)
        throw std::invalid_argument("SeriesConfig: n must be even and >= 4");
    if (!(cfg.xi.sgn() > 0)) throw std::invalid_argument("SeriesConfig: xi must be > 0");
}

struct SeriesEval {
    BigReal value;
    BigReal max_term_magnitude;  // cancellation diagnostic: largest |a_k xi^k| seen
    long terms_used = 0;
};

/// (a0, a2, a4) = (1, -lambda/2, lambda^2/24).
inline std::array<BigReal, 3> initial_coefficients(const BigReal& lambda) {
    const PrecisionContext& ctx = lambda.context();
    BigReal a0 = ctx.from_long(1);
    BigReal a2 = -(lambda / 2);
    BigReal a4 = (lambda * lambda) / 24;
    return {std::move(a0), std::move(a2), std::move(a4)};
}

/// a_k = (a_{k-6} - lambda * a_{k-2}) / (k (k-1)), even k >= 6.
/// Coefficients with negative index are zero, so a_6 consumes a_0 and a_4.
inline BigReal next_coefficient(const BigReal& a_km6, const BigReal& a_km2, long k,
                                const BigReal& lambda) {
    if (k < 6 || k % 2 != 0)
        throw std::invalid_argument("next_coefficient: k must be even and >= 6");
    return (a_km6 - lambda * a_km2) / (k * (k - 1));
}

namespace detail {

// One pass over the recursion keeping only the sliding triple
// (a_{k-6}, a_{k-4}, a_{k-2}); powers of xi advance by xi^2 per step.
// The y and y' accumulators are fully independent, so a fused pass is
// bit-identical to two separate passes.
inline void series_kernel(long n, mpfr_srcptr xi, mpfr_srcptr lambda, mpfr_prec_t prec,
                          bool want_y, bool want_yp, mpfr_ptr y_sum, mpfr_ptr y_max,
                          mpfr_ptr yp_sum, mpfr_ptr yp_max) {
    mpfr_t a6, a4, a2, ak, t, xi2, pow_y, pow_yp, term;
    mpfr_inits2(prec, a6, a4, a2, ak, t, xi2, pow_y, pow_yp, term, (mpfr_ptr) nullptr);

    // (a0, a2, a4) seed
    mpfr_set_ui(a6, 1, MPFR_RNDN);
    mpfr_div_si(a4, lambda, -2, MPFR_RNDN);
    mpfr_mul(a2, lambda, lambda, MPFR_RNDN);
    mpfr_div_ui(a2, a2, 24, MPFR_RNDN);

    mpfr_mul(xi2, xi, xi, MPFR_RNDN);

    auto track = [&](mpfr_ptr mx, mpfr_srcptr tm) {
        if (mpfr_cmpabs(tm, mx) > 0) mpfr_abs(mx, tm, MPFR_RNDN);
    };

    if (want_y) {
        // a0 + a2 xi^2 + a4 xi^4, left to right
        mpfr_set(y_sum, a6, MPFR_RNDN);
        mpfr_set_ui(y_max, 1, MPFR_RNDN);
        mpfr_mul(term, a4, xi2, MPFR_RNDN);
        mpfr_add(y_sum, y_sum, term, MPFR_RNDN);
        track(y_max, term);
        mpfr_mul(pow_y, xi2, xi2, MPFR_RNDN);  // xi^4
        mpfr_mul(term, a2, pow_y, MPFR_RNDN);
        mpfr_add(y_sum, y_sum, term, MPFR_RNDN);
        track(y_max, term);
    }
    if (want_yp) {
        // 2 a2 xi + 4 a4 xi^3 (the k = 0 term vanishes)
        mpfr_mul(term, a4, xi, MPFR_RNDN);
        mpfr_mul_ui(term, term, 2, MPFR_RNDN);
        mpfr_set(yp_sum, term, MPFR_RNDN);
        mpfr_abs(yp_max, term, MPFR_RNDN);
        mpfr_mul(pow_yp, xi2, xi, MPFR_RNDN);  // xi^3
        mpfr_mul(term, a2, pow_yp, MPFR_RNDN);
        mpfr_mul_ui(term, term, 4, MPFR_RNDN);
        mpfr_add(yp_sum, yp_sum, term, MPFR_RNDN);
        track(yp_max, term);
    }

    for (long k = 6; k <= n; k += 2) {
        mpfr_mul(t, lambda, a2, MPFR_RNDN);
        mpfr_sub(t, a6, t, MPFR_RNDN);
        mpfr_div_ui(ak, t, static_cast<unsigned long>(k) * static_cast<unsigned long>(k - 1),
                    MPFR_RNDN);
        mpfr_swap(a6, a4);
        mpfr_swap(a4, a2);
        mpfr_swap(a2, ak);
        if (want_y) {
            mpfr_mul(pow_y, pow_y, xi2, MPFR_RNDN);  // xi^k
            mpfr_mul(term, a2, pow_y, MPFR_RNDN);
            mpfr_add(y_sum, y_sum, term, MPFR_RNDN);
            track(y_max, term);
        }
        if (want_yp) {
            mpfr_mul(pow_yp, pow_yp, xi2, MPFR_RNDN);  // xi^(k-1)
            mpfr_mul(term, a2, pow_yp, MPFR_RNDN);
            mpfr_mul_ui(term, term, static_cast<unsigned long>(k), MPFR_RNDN);
            mpfr_add(yp_sum, yp_sum, term, MPFR_RNDN);
            track(yp_max, term);
        }
    }

    mpfr_clears(a6, a4, a2, ak, t, xi2, pow_y, pow_yp, term, (mpfr_ptr) nullptr);
}

}  // namespace detail

struct SeriesPair {
    SeriesEval y;
    SeriesEval y_prime;
};

inline SeriesPair eval_y_and_prime(const SeriesConfig& cfg, const PrecisionContext& ctx) {
    validate(cfg);
    BigReal xi = ctx.convert(cfg.xi);
    BigReal lambda = ctx.convert(cfg.lambda);
    SeriesPair out{{BigReal(ctx), BigReal(ctx), cfg.n / 2 + 1},
                   {BigReal(ctx), BigReal(ctx), cfg.n / 2}};
    detail::series_kernel(cfg.n, xi.raw(), lambda.raw(), ctx.bits(), true, true,
                          out.y.value.raw(), out.y.max_term_magnitude.raw(),
                          out.y_prime.value.raw(), out.y_prime.max_term_magnitude.raw());
    return out;
}

inline SeriesEval eval_y(const SeriesConfig& cfg, const PrecisionContext& ctx) {
    validate(cfg);
    BigReal xi = ctx.convert(cfg.xi);
    BigReal lambda = ctx.convert(cfg.lambda);
    SeriesEval out{BigReal(ctx), BigReal(ctx), cfg.n / 2 + 1};
    detail::series_kernel(cfg.n, xi.raw(), lambda.raw(), ctx.bits(), true, false,
                          out.value.raw(), out.max_term_magnitude.raw(), nullptr, nullptr);
    return out;
}

inline SeriesEval eval_y_prime(const SeriesConfig& cfg, const PrecisionContext& ctx) {
    validate(cfg);
    BigReal xi = ctx.convert(cfg.xi);
    BigReal lambda = ctx.convert(cfg.lambda);
    SeriesEval out{BigReal(ctx), BigReal(ctx), cfg.n / 2};
    detail::series_kernel(cfg.n, xi.raw(), lambda.raw(), ctx.bits(), false, true, nullptr,
                          nullptr, out.value.raw(), out.max_term_magnitude.raw());
    return out;
}

/// Decimal digits lost to cancellation: floor(log10(max_term / |value|)),
/// clamped at zero. A zero value reports the full context precision.
inline long cancellation_digits(const SeriesEval& e) {
    if (e.value.is_zero()) return e.value.context().effective_digits();
    mpfr_t r;
    mpfr_init2(r, 64);
    mpfr_div(r, e.max_term_magnitude.raw(), e.value.raw(), MPFR_RNDN);
    mpfr_abs(r, r, MPFR_RNDN);
    mpfr_log10(r, r, MPFR_RNDN);
    mpfr_floor(r, r);
    long d = mpfr_get_si(r, MPFR_RNDN);
    mpfr_clear(r);
    return d < 0 ? 0 : d;
}

}  // namespace qanho

#endif  // QANHO_SERIES_HPP
