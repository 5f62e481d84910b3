#ifndef QANHO_HILL_HPP
#define QANHO_HILL_HPP

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qanho/bound.hpp"
#include "qanho/precision.hpp"

namespace qanho {

enum class Parity { even, odd };

/// One parity block of the truncated operator matrix in the oscillator
/// basis. Reduced index i maps to basis index 2i (+1 for odd parity); the
/// half-bandwidth is 2 because entries vanish for |m - n| > 4.
struct BandedSymMatrix {
    Parity parity = Parity::even;
    long size = 0;
    PrecisionContext ctx;
    std::vector<BigReal> diag;  // h(b, b)
    std::vector<BigReal> off1;  // h(b, b+2), size - 1 entries
    std::vector<BigReal> off2;  // h(b, b+4), size - 2 entries
};

struct EigenPair {
    Bracket value_bracket;
    std::vector<BigReal> vector;  // unit norm, first nonzero component positive
};

/// Matrix element h_{m,n} = <phi_m | -d^2/dz^2 + z^4 | phi_n>. For n >= m the
/// closed form applies directly; m > n goes through the operator symmetry.
/// Exactly zero for |m - n| > 4 or odd m - n.
inline BigReal matrix_element(long m, long n, const PrecisionContext& ctx) {
    if (m < 0 || n < 0) throw std::invalid_argument("matrix_element: indices must be >= 0");
    if (m > n) return matrix_element(n, m, ctx);
    long d = n - m;
    if (d > 4 || d % 2 != 0) return ctx.from_long(0);

    unsigned long un = static_cast<unsigned long>(n);
    BigReal coeff(ctx);
    if (d == 0) {
        // 4 (2n(3n+5) + 5)
        mpfr_set_ui(coeff.raw(), un, MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), 3 * un + 5, MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), 2, MPFR_RNDN);
        mpfr_add_ui(coeff.raw(), coeff.raw(), 5, MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), 4, MPFR_RNDN);
    } else if (d == 2) {
        // 32 n (n-1)^2
        mpfr_set_ui(coeff.raw(), 32 * un, MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), un - 1, MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), un - 1, MPFR_RNDN);
    } else {
        // 16 (n-3)(n-2) n (n-1)
        mpfr_set_ui(coeff.raw(), 16 * (un - 3), MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), un - 2, MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), un, MPFR_RNDN);
        mpfr_mul_ui(coeff.raw(), coeff.raw(), un - 1, MPFR_RNDN);
    }

    // sqrt(m!/n!) = 1 / sqrt((m+1)(m+2)...n) -- at most four factors
    BigReal prod = ctx.from_long(1);
    for (long j = m + 1; j <= n; ++j)
        mpfr_mul_ui(prod.raw(), prod.raw(), static_cast<unsigned long>(j), MPFR_RNDN);
    mpfr_sqrt(prod.raw(), prod.raw(), MPFR_RNDN);

    BigReal value = coeff / prod;
    mpfr_mul_2si(value.raw(), value.raw(), -(d / 2) - 4, MPFR_RNDN);  // 2^((m-n)/2 - 4)
    return value;
}

inline BandedSymMatrix build_hamiltonian(long states, Parity parity,
                                         const PrecisionContext& ctx) {
    if (states < 1) throw std::invalid_argument("build_hamiltonian: need at least one state");
    BandedSymMatrix M;
    M.parity = parity;
    M.size = states;
    M.ctx = ctx;
    long off = parity == Parity::odd ? 1 : 0;
    for (long i = 0; i < states; ++i) {
        long b = 2 * i + off;
        M.diag.push_back(matrix_element(b, b, ctx));
        if (i + 1 < states) M.off1.push_back(matrix_element(b, b + 2, ctx));
        if (i + 2 < states) M.off2.push_back(matrix_element(b, b + 4, ctx));
    }
    return M;
}

namespace detail {

struct ZeroPivot : std::runtime_error {
    ZeroPivot() : std::runtime_error("zero pivot") {}
};

struct BandFactor {
    std::vector<BigReal> d;   // pivots
    std::vector<BigReal> l1;  // first subdiagonal of unit L
    std::vector<BigReal> l2;  // second subdiagonal
};

// LDL^T of (M - shift I) exploiting half-bandwidth 2; returns the count of
// negative pivots. Throws ZeroPivot on an exactly zero pivot.
inline long ldlt_band(const BandedSymMatrix& M, const BigReal& shift,
                      const PrecisionContext& ctx, BandFactor* fac) {
    long N = M.size;
    std::vector<BigReal> w0, w1, w2;
    w0.reserve(N);
    for (long i = 0; i < N; ++i) w0.push_back(ctx.convert(M.diag[i]) - shift);
    for (long i = 0; i + 1 < N; ++i) w1.push_back(ctx.convert(M.off1[i]));
    for (long i = 0; i + 2 < N; ++i) w2.push_back(ctx.convert(M.off2[i]));
    if (fac) {
        fac->d.clear();
        fac->l1.clear();
        fac->l2.clear();
    }

    long negatives = 0;
    for (long j = 0; j < N; ++j) {
        const BigReal& p = w0[j];
        if (p.is_zero()) throw ZeroPivot{};
        if (p.sgn() < 0) ++negatives;
        BigReal l1(ctx), l2(ctx);
        if (j + 1 < N) {
            l1 = w1[j] / p;
            w0[j + 1] -= l1 * w1[j];
            if (j + 2 < N) {
                w1[j + 1] -= l1 * w2[j];
                l2 = w2[j] / p;
                w0[j + 2] -= l2 * w2[j];
            }
        }
        if (fac) {
            fac->d.push_back(p);
            if (j + 1 < N) fac->l1.push_back(std::move(l1));
            if (j + 2 < N) fac->l2.push_back(std::move(l2));
        }
    }
    return negatives;
}

// Enclosing interval for the whole spectrum from Gershgorin discs, padded
// by one to absorb rounding in the disc sums.
inline std::pair<BigReal, BigReal> gershgorin_interval(const BandedSymMatrix& M) {
    const PrecisionContext& ctx = M.ctx;
    long N = M.size;
    BigReal lo(ctx), hi(ctx);
    for (long i = 0; i < N; ++i) {
        BigReal r = ctx.from_long(0);
        if (i >= 1) r += abs(M.off1[i - 1]);
        if (i + 1 < N) r += abs(M.off1[i]);
        if (i >= 2) r += abs(M.off2[i - 2]);
        if (i + 2 < N) r += abs(M.off2[i]);
        BigReal a = M.diag[i] - r;
        BigReal b = M.diag[i] + r;
        if (i == 0 || a < lo) lo = a;
        if (i == 0 || b > hi) hi = b;
    }
    return {lo - ctx.from_long(1), hi + ctx.from_long(1)};
}

inline BigReal infinity_norm(const BandedSymMatrix& M) {
    const PrecisionContext& ctx = M.ctx;
    BigReal best = ctx.from_long(0);
    for (long i = 0; i < M.size; ++i) {
        BigReal r = abs(M.diag[i]);
        if (i >= 1) r += abs(M.off1[i - 1]);
        if (i + 1 < M.size) r += abs(M.off1[i]);
        if (i >= 2) r += abs(M.off2[i - 2]);
        if (i + 2 < M.size) r += abs(M.off2[i]);
        if (r > best) best = r;
    }
    return best;
}

inline BandedSymMatrix convert_matrix(const BandedSymMatrix& M, const PrecisionContext& ctx) {
    if (M.ctx == ctx) return M;
    BandedSymMatrix out;
    out.parity = M.parity;
    out.size = M.size;
    out.ctx = ctx;
    for (const BigReal& v : M.diag) out.diag.push_back(ctx.convert(v));
    for (const BigReal& v : M.off1) out.off1.push_back(ctx.convert(v));
    for (const BigReal& v : M.off2) out.off2.push_back(ctx.convert(v));
    return out;
}

}  // namespace detail

/// Number of eigenvalues of M strictly below lambda (Sylvester inertia of
/// M - lambda I). An exactly zero pivot nudges lambda by one ulp and retries.
inline long inertia_count(const BandedSymMatrix& M, const BigReal& lambda) {
    const PrecisionContext& ctx = M.ctx;
    BigReal shift = ctx.convert(lambda);
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            return detail::ldlt_band(M, shift, ctx, nullptr);
        } catch (const detail::ZeroPivot&) {
            mpfr_nextabove(shift.raw());
        }
    }
    throw ConvergenceError("inertia_count: zero pivot persists after perturbation");
}

/// The k smallest eigenvalues as disjoint-or-touching brackets of width <=
/// tol; the i-th bracket has inertia i at its left end and i+1 at its right.
/// Bracket.stage records the eigenvalue index, Bracket.n the matrix size.
inline std::vector<Bracket> lowest_eigenvalues(const BandedSymMatrix& M_in, long k,
                                               const PrecisionContext& ctx,
                                               const BigReal& tol) {
    if (k < 1 || k > M_in.size)
        throw std::invalid_argument("lowest_eigenvalues: need 1 <= k <= matrix size");
    if (!(tol.sgn() > 0)) throw std::invalid_argument("lowest_eigenvalues: tol must be > 0");
    BandedSymMatrix M = detail::convert_matrix(M_in, ctx);
    BigReal tol_c = ctx.convert(tol);
    auto [g_lo, g_hi] = detail::gershgorin_interval(M);

    const long budget = 10 * ctx.effective_digits() + 256;
    std::vector<Bracket> out;
    BigReal lo = g_lo;
    long lo_count = 0;  // inertia at lo, maintained <= j below
    for (long j = 0; j < k; ++j) {
        BigReal hi = g_hi;
        long hi_count = M.size;
        long iter = 0;
        while (hi - lo > tol_c || lo_count != j || hi_count != j + 1) {
            if (++iter > budget)
                throw ConvergenceError("lowest_eigenvalues: iteration budget exhausted");
            BigReal mid = (lo + hi) / 2;
            if (!(lo < mid && mid < hi))
                throw ConvergenceError("lowest_eigenvalues: bracket below precision floor");
            long c = inertia_count(M, mid);
            if (c <= j) {
                lo = std::move(mid);
                lo_count = c;
            } else {
                hi = std::move(mid);
                hi_count = c;
            }
        }
        out.push_back(Bracket{lo, hi, static_cast<int>(j), ctx.from_long(0), M.size});
        lo = hi;  // inertia j+1 here: valid left end for the next index
        lo_count = j + 1;
    }
    return out;
}

/// Inverse iteration with the shift at the bracket midpoint. Unit Euclidean
/// norm, first nonzero component positive.
inline std::vector<BigReal> eigenvector(const BandedSymMatrix& M_in,
                                        const Bracket& value_bracket,
                                        const PrecisionContext& ctx) {
    BandedSymMatrix M = detail::convert_matrix(M_in, ctx);
    long N = M.size;
    BigReal sigma = (ctx.convert(value_bracket.lo) + ctx.convert(value_bracket.hi)) / 2;

    detail::BandFactor fac;
    bool factored = false;
    for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
        try {
            detail::ldlt_band(M, sigma, ctx, &fac);
            factored = true;
        } catch (const detail::ZeroPivot&) {
            mpfr_nextabove(sigma.raw());
        }
    }
    if (!factored) throw ConvergenceError("eigenvector: shifted factorization failed");

    auto solve_in_place = [&](std::vector<BigReal>& x) {
        for (long j = 0; j < N; ++j) {
            if (j + 1 < N) x[j + 1] -= fac.l1[j] * x[j];
            if (j + 2 < N) x[j + 2] -= fac.l2[j] * x[j];
        }
        for (long j = 0; j < N; ++j) x[j] = x[j] / fac.d[j];
        for (long j = N - 1; j >= 0; --j) {
            if (j + 1 < N) x[j] -= fac.l1[j] * x[j + 1];
            if (j + 2 < N) x[j] -= fac.l2[j] * x[j + 2];
        }
    };
    auto normalize = [&](std::vector<BigReal>& x) {
        BigReal s = ctx.from_long(0);
        for (const BigReal& v : x) s += v * v;
        BigReal norm = sqrt(s);
        for (BigReal& v : x) v = v / norm;
    };
    auto apply_m = [&](const std::vector<BigReal>& x) {
        std::vector<BigReal> y;
        y.reserve(N);
        for (long i = 0; i < N; ++i) {
            BigReal acc = M.diag[i] * x[i];
            if (i >= 1) acc += M.off1[i - 1] * x[i - 1];
            if (i + 1 < N) acc += M.off1[i] * x[i + 1];
            if (i >= 2) acc += M.off2[i - 2] * x[i - 2];
            if (i + 2 < N) acc += M.off2[i] * x[i + 2];
            y.push_back(std::move(acc));
        }
        return y;
    };

    BigReal width = ctx.convert(value_bracket.hi) - ctx.convert(value_bracket.lo);
    BigReal resid_floor = ctx.pow10(-ctx.decimal_digits());
    BigReal tol_eff = width > resid_floor ? width : resid_floor;
    BigReal target = sqrt(tol_eff) * detail::infinity_norm(M);

    std::vector<BigReal> x(static_cast<size_t>(N), ctx.from_long(1));
    normalize(x);
    for (int iter = 0; iter < 100; ++iter) {
        solve_in_place(x);
        normalize(x);
        std::vector<BigReal> mx = apply_m(x);
        BigReal rho = ctx.from_long(0);  // Rayleigh quotient of the unit vector
        for (long i = 0; i < N; ++i) rho += x[i] * mx[i];
        BigReal rnorm2 = ctx.from_long(0);
        for (long i = 0; i < N; ++i) {
            BigReal r = mx[i] - rho * x[i];
            rnorm2 += r * r;
        }
        if (sqrt(rnorm2) <= target) {
            long first = 0;
            while (first < N && x[first].is_zero()) ++first;
            if (first < N && x[first].sgn() < 0)
                for (BigReal& v : x) v = -v;
            return x;
        }
    }
    throw ConvergenceError("eigenvector: inverse iteration stagnation");
}

/// Full-basis eigenvector matrix: column i is the i-th eigenvector (merged
/// across parity blocks, eigenvalues ascending), zero-padded on the opposite
/// parity. Entry [r][c] is the phi_r coefficient of eigenvector c.
inline std::vector<std::vector<BigReal>> eigenvector_matrix(long states,
                                                            const PrecisionContext& ctx) {
    if (states < 2) throw std::invalid_argument("eigenvector_matrix: need at least 2 states");
    long n_even = (states + 1) / 2;
    long n_odd = states / 2;
    long tol_digits = std::max<long>(10, ctx.decimal_digits() / 2);
    BigReal tol = ctx.pow10(-tol_digits);

    BandedSymMatrix even = build_hamiltonian(n_even, Parity::even, ctx);
    BandedSymMatrix odd = build_hamiltonian(n_odd, Parity::odd, ctx);
    std::vector<Bracket> ev_e = lowest_eigenvalues(even, n_even, ctx, tol);
    std::vector<Bracket> ev_o = lowest_eigenvalues(odd, n_odd, ctx, tol);

    struct Tagged {
        Parity parity;
        std::vector<BigReal> vector;
    };
    std::vector<Tagged> merged;
    merged.reserve(static_cast<size_t>(states));
    {
        size_t ie = 0, io = 0;
        auto mid = [&](const Bracket& b) { return (b.lo + b.hi) / 2; };
        while (ie < ev_e.size() || io < ev_o.size()) {
            bool take_even;
            if (ie == ev_e.size())
                take_even = false;
            else if (io == ev_o.size())
                take_even = true;
            else
                take_even = !(mid(ev_o[io]) < mid(ev_e[ie]));  // ties resolve to even
            if (take_even) {
                merged.push_back(Tagged{Parity::even, eigenvector(even, ev_e[ie], ctx)});
                ++ie;
            } else {
                merged.push_back(Tagged{Parity::odd, eigenvector(odd, ev_o[io], ctx)});
                ++io;
            }
        }
    }

    std::vector<std::vector<BigReal>> out(
        static_cast<size_t>(states),
        std::vector<BigReal>(static_cast<size_t>(states), ctx.from_long(0)));
    for (long c = 0; c < states; ++c) {
        const Tagged& col = merged[static_cast<size_t>(c)];
        long off = col.parity == Parity::even ? 0 : 1;
        for (size_t i = 0; i < col.vector.size(); ++i) {
            long r = 2 * static_cast<long>(i) + off;
            if (r < states) out[static_cast<size_t>(r)][static_cast<size_t>(c)] = col.vector[i];
        }
    }
    return out;
}

}  // namespace qanho

#endif  // QANHO_HILL_HPP
