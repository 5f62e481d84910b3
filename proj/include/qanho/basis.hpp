#ifndef QANHO_BASIS_HPP
#define QANHO_BASIS_HPP

#include <stdexcept>
#include <vector>

#include "qanho/precision.hpp"
#include "qanho/series.hpp"

namespace qanho {

/// Physicists' Hermite polynomial H_n(z) by the three-term recurrence
/// H_{n+1} = 2 z H_n - 2 n H_{n-1}, H_0 = 1, H_1 = 2z.
inline BigReal hermite_h(long n, const BigReal& z) {
    if (n < 0) throw std::invalid_argument("hermite_h: n must be >= 0");
    const PrecisionContext& ctx = z.context();
    BigReal h_prev = ctx.from_long(1);
    if (n == 0) return h_prev;
    BigReal h = z * 2;
    for (long k = 1; k < n; ++k) {
        BigReal h_next = (z * h) * 2 - h_prev * (2 * k);
        h_prev = std::move(h);
        h = std::move(h_next);
    }
    return h;
}

namespace detail {

// ln(1/sqrt(sqrt(pi) 2^n n!)), evaluated in ctx.
inline BigReal phi_log_norm(long n, const PrecisionContext& ctx) {
    BigReal ln_pi(ctx);
    mpfr_const_pi(ln_pi.raw(), MPFR_RNDN);
    mpfr_log(ln_pi.raw(), ln_pi.raw(), MPFR_RNDN);
    BigReal ln2(ctx);
    mpfr_const_log2(ln2.raw(), MPFR_RNDN);
    BigReal lg(ctx);
    mpfr_set_ui(lg.raw(), static_cast<unsigned long>(n) + 1, MPFR_RNDN);
    mpfr_lngamma(lg.raw(), lg.raw(), MPFR_RNDN);
    return -((ln_pi / 2 + ln2 * n + lg) / 2);
}

}  // namespace detail

/// Normalized harmonic-oscillator eigenfunction
/// phi_n(z) = (sqrt(pi) 2^n n!)^{-1/2} e^{-z^2/2} H_n(z).
/// The normalization runs in log space so large n cannot overflow.
inline BigReal phi(long n, const BigReal& z, const PrecisionContext& ctx) {
    if (n < 0) throw std::invalid_argument("phi: n must be >= 0");
    BigReal zc = ctx.convert(z);
    BigReal expo = detail::phi_log_norm(n, ctx) - (zc * zc) / 2;
    BigReal factor(ctx);
    mpfr_exp(factor.raw(), expo.raw(), MPFR_RNDN);
    return factor * hermite_h(n, zc);
}

/// Truncated expansion sum_k coeffs[k] * phi_k(z). A single Hermite
/// recurrence pass serves every k.
inline BigReal reconstruct_psi(const std::vector<BigReal>& coeffs, const BigReal& z,
                               const PrecisionContext& ctx) {
    BigReal acc = ctx.from_long(0);
    if (coeffs.empty()) return acc;
    BigReal zc = ctx.convert(z);
    // norm_0 = pi^{-1/4}; norm_{k+1} = norm_k / sqrt(2(k+1))
    BigReal norm(ctx);
    mpfr_const_pi(norm.raw(), MPFR_RNDN);
    mpfr_rec_sqrt(norm.raw(), norm.raw(), MPFR_RNDN);
    mpfr_sqrt(norm.raw(), norm.raw(), MPFR_RNDN);
    BigReal h_prev = ctx.from_long(1);  // H_{k-1}
    BigReal h = ctx.from_long(1);       // H_k, starting at H_0
    for (size_t k = 0; k < coeffs.size(); ++k) {
        if (!coeffs[k].is_zero()) acc += (ctx.convert(coeffs[k]) * norm) * h;
        BigReal h_next = k == 0 ? zc * 2
                                : (zc * h) * 2 - h_prev * (2 * static_cast<long>(k));
        h_prev = h;
        h = std::move(h_next);
        BigReal root(ctx);
        mpfr_set_ui(root.raw(), 2 * (static_cast<unsigned long>(k) + 1), MPFR_RNDN);
        mpfr_sqrt(root.raw(), root.raw(), MPFR_RNDN);
        norm = norm / root;
    }
    BigReal damp(ctx);
    BigReal e = -(zc * zc) / 2;
    mpfr_exp(damp.raw(), e.raw(), MPFR_RNDN);
    return acc * damp;
}

/// Series curves y_n and y'_n sampled on a lambda x grid, the data behind the
/// bounding figure. Rows follow lambda, columns follow x.
struct CurveSet {
    std::vector<BigReal> lambdas;
    std::vector<BigReal> x_samples;
    std::vector<std::vector<BigReal>> y_values;
    std::vector<std::vector<BigReal>> y_prime_values;
};

inline CurveSet sample_curves(long n, const BigReal& lambda_lo, const BigReal& lambda_hi,
                              long count, const BigReal& x_max, long samples,
                              const PrecisionContext& ctx) {
    if (count < 2) throw std::invalid_argument("sample_curves: count must be >= 2");
    if (samples < 2) throw std::invalid_argument("sample_curves: samples must be >= 2");
    if (!(x_max.sgn() > 0)) throw std::invalid_argument("sample_curves: x_max must be > 0");
    BigReal llo = ctx.convert(lambda_lo);
    BigReal lhi = ctx.convert(lambda_hi);
    if (lhi < llo) throw std::invalid_argument("sample_curves: lambda_hi < lambda_lo");
    BigReal xm = ctx.convert(x_max);

    CurveSet out;
    BigReal span = lhi - llo;
    for (long i = 0; i < count; ++i)
        out.lambdas.push_back(i == count - 1 ? lhi : llo + (span * i) / (count - 1));
    for (long j = 1; j <= samples; ++j) out.x_samples.push_back((xm * j) / samples);

    for (long i = 0; i < count; ++i) {
        std::vector<BigReal> row_y, row_yp;
        row_y.reserve(static_cast<size_t>(samples));
        row_yp.reserve(static_cast<size_t>(samples));
        for (long j = 0; j < samples; ++j) {
            SeriesConfig cfg{n, out.x_samples[static_cast<size_t>(j)],
                             out.lambdas[static_cast<size_t>(i)]};
            row_y.push_back(eval_y(cfg, ctx).value);
            row_yp.push_back(eval_y_prime(cfg, ctx).value);
        }
        out.y_values.push_back(std::move(row_y));
        out.y_prime_values.push_back(std::move(row_yp));
    }
    return out;
}

}  // namespace qanho

#endif  // QANHO_BASIS_HPP
