#ifndef QANHO_PRECISION_HPP
#define QANHO_PRECISION_HPP

#include <mpfr.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace qanho {

// Arithmetic between values computed under different precision contexts.
struct ContextMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Root bracketing failed: the target function has the same sign at both ends.
struct NoSignChange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative routine ran out of budget or hit its precision floor.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class BigReal;

/// Requested significant decimal digits plus guard digits carried internally.
/// All arithmetic runs at the effective precision (the sum of the two).
class PrecisionContext {
public:
    // Empty context; owned only by default-constructed BigReal values and
    // rejected by every arithmetic operation.
    PrecisionContext() = default;

    PrecisionContext(long decimal_digits, long guard_digits)
        : decimal_digits_(decimal_digits), guard_digits_(guard_digits) {
        if (decimal_digits < 10)
            throw std::invalid_argument("PrecisionContext: decimal_digits must be >= 10");
        if (guard_digits < 0)
            throw std::invalid_argument("PrecisionContext: guard_digits must be >= 0");
    }

    long decimal_digits() const { return decimal_digits_; }
    long guard_digits() const { return guard_digits_; }
    long effective_digits() const { return decimal_digits_ + guard_digits_; }
    bool valid() const { return decimal_digits_ >= 10; }

    mpfr_prec_t bits() const { return mantissa_bits(effective_digits()); }

    friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

    // decimal digits -> mantissa bits: ceil(digits * log2(10)) + 8, computed
    // with an integer over-approximation of log2(10) = 3.3219...
    static mpfr_prec_t mantissa_bits(long digits) {
        long bits = (digits * 3322 + 999) / 1000 + 8;
        return static_cast<mpfr_prec_t>(bits < MPFR_PREC_MIN ? MPFR_PREC_MIN : bits);
    }

    static long default_guard(long decimal_digits) {
        long two_percent = (decimal_digits + 49) / 50;
        return two_percent < 10 ? 10 : two_percent;
    }

    // Factories are defined after BigReal below.
    BigReal from_long(long v) const;
    BigReal from_string(std::string_view s) const;
    BigReal from_ratio(long num, long den) const;
    BigReal convert(const BigReal& x) const;
    BigReal pi() const;
    BigReal pow10(long exponent) const;

private:
    long decimal_digits_ = 0;
    long guard_digits_ = 0;
};

inline PrecisionContext make_context(long decimal_digits, long guard_digits) {
    return PrecisionContext(decimal_digits, guard_digits);
}

/// Immutable arbitrary-precision real tagged with the context it was
/// computed under. Mixing contexts in arithmetic throws; comparisons are
/// exact and therefore allowed across contexts.
class BigReal {
public:
    BigReal() {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_set_nan(v_);
    }

    explicit BigReal(const PrecisionContext& ctx) : ctx_(ctx) {
        mpfr_init2(v_, ctx.bits());
        mpfr_set_nan(v_);
    }

    BigReal(const BigReal& o) : ctx_(o.ctx_) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }

    BigReal(BigReal&& o) noexcept : ctx_(o.ctx_) {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }

    BigReal& operator=(const BigReal& o) {
        if (this != &o) {
            ctx_ = o.ctx_;
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }

    BigReal& operator=(BigReal&& o) noexcept {
        if (this != &o) {
            ctx_ = o.ctx_;
            mpfr_swap(v_, o.v_);
        }
        return *this;
    }

    ~BigReal() { mpfr_clear(v_); }

    const PrecisionContext& context() const { return ctx_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_ptr raw() { return v_; }

    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sgn() const { return is_nan() ? 0 : mpfr_sgn(v_); }

    friend BigReal operator+(const BigReal& a, const BigReal& b) {
        require_same(a, b);
        BigReal r(a.ctx_);
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigReal operator-(const BigReal& a, const BigReal& b) {
        require_same(a, b);
        BigReal r(a.ctx_);
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigReal operator*(const BigReal& a, const BigReal& b) {
        require_same(a, b);
        BigReal r(a.ctx_);
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigReal operator/(const BigReal& a, const BigReal& b) {
        require_same(a, b);
        BigReal r(a.ctx_);
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }

    BigReal operator-() const {
        BigReal r(ctx_);
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend BigReal operator*(const BigReal& a, long k) {
        BigReal r(a.ctx_);
        mpfr_mul_si(r.v_, a.v_, k, MPFR_RNDN);
        return r;
    }
    friend BigReal operator*(long k, const BigReal& a) { return a * k; }
    friend BigReal operator/(const BigReal& a, long k) {
        BigReal r(a.ctx_);
        mpfr_div_si(r.v_, a.v_, k, MPFR_RNDN);
        return r;
    }

    BigReal& operator+=(const BigReal& b) {
        require_same(*this, b);
        mpfr_add(v_, v_, b.v_, MPFR_RNDN);
        return *this;
    }
    BigReal& operator-=(const BigReal& b) {
        require_same(*this, b);
        mpfr_sub(v_, v_, b.v_, MPFR_RNDN);
        return *this;
    }
    BigReal& operator*=(const BigReal& b) {
        require_same(*this, b);
        mpfr_mul(v_, v_, b.v_, MPFR_RNDN);
        return *this;
    }

    friend bool operator<(const BigReal& a, const BigReal& b) {
        return !a.is_nan() && !b.is_nan() && mpfr_cmp(a.v_, b.v_) < 0;
    }
    friend bool operator>(const BigReal& a, const BigReal& b) { return b < a; }
    friend bool operator<=(const BigReal& a, const BigReal& b) {
        return !a.is_nan() && !b.is_nan() && mpfr_cmp(a.v_, b.v_) <= 0;
    }
    friend bool operator>=(const BigReal& a, const BigReal& b) { return b <= a; }
    friend bool operator==(const BigReal& a, const BigReal& b) {
        return !a.is_nan() && !b.is_nan() && mpfr_cmp(a.v_, b.v_) == 0;
    }
    friend bool operator!=(const BigReal& a, const BigReal& b) { return !(a == b); }

    friend BigReal abs(const BigReal& a) {
        BigReal r(a.ctx_);
        mpfr_abs(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend BigReal sqrt(const BigReal& a) {
        BigReal r(a.ctx_);
        mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    /// Minimal decimal string that reparses to the identical binary value at
    /// this context's precision (used by checkpoints).
    std::string to_string_exact() const;

private:
    static void require_same(const BigReal& a, const BigReal& b) {
        if (!a.ctx_.valid() || !b.ctx_.valid())
            throw ContextMismatch("BigReal: arithmetic on value without a context");
        if (!(a.ctx_ == b.ctx_))
            throw ContextMismatch("BigReal: operands carry different precision contexts");
    }

    PrecisionContext ctx_;
    mpfr_t v_;
};

namespace detail {

inline std::string format_digits(std::string digit_str, mpfr_exp_t e, bool neg) {
    long digits = static_cast<long>(digit_str.size());
    std::string out;
    if (e >= 1 && e <= digits) {
        out = digit_str.substr(0, static_cast<size_t>(e));
        if (e < digits) out += "." + digit_str.substr(static_cast<size_t>(e));
    } else if (e <= 0 && e > -6) {
        out = "0." + std::string(static_cast<size_t>(-e), '0') + digit_str;
    } else {
        out = digit_str.substr(0, 1);
        if (digits > 1) out += "." + digit_str.substr(1);
        out += "e" + std::to_string(static_cast<long>(e) - 1);
    }
    return neg ? "-" + out : out;
}

inline std::string format_decimal(mpfr_srcptr v, long digits, mpfr_rnd_t rnd) {
    if (mpfr_nan_p(v)) return "nan";
    if (mpfr_inf_p(v)) return mpfr_sgn(v) < 0 ? "-inf" : "inf";
    if (mpfr_zero_p(v)) return "0";
    size_t n = static_cast<size_t>(digits < 2 ? 2 : digits);
    mpfr_exp_t e = 0;
    char* raw = mpfr_get_str(nullptr, &e, 10, n, v, rnd);
    std::string s(raw);
    mpfr_free_str(raw);
    bool neg = !s.empty() && s[0] == '-';
    std::string d = neg ? s.substr(1) : s;
    if (digits == 1) {
        // mpfr_get_str needs n >= 2 in base 10; round the pair by hand.
        bool up = rnd == MPFR_RNDN ? d[1] >= '5'
                                   : (rnd == MPFR_RNDZ ? false : d[1] != '0');
        d = d.substr(0, 1);
        if (up) {
            if (d[0] == '9') {
                d = "1";
                ++e;
            } else {
                d[0] = static_cast<char>(d[0] + 1);
            }
        }
    }
    return format_digits(d, e, neg);
}

// Expansion truncated toward zero; safe for certified-prefix extraction.
inline std::string format_decimal_trunc(mpfr_srcptr v, long digits) {
    return format_decimal(v, digits, MPFR_RNDZ);
}

}  // namespace detail

inline std::string BigReal::to_string_exact() const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_zero_p(v_)) return "0";
    mpfr_exp_t e = 0;
    char* raw = mpfr_get_str(nullptr, &e, 10, 0, v_, MPFR_RNDN);
    std::string s(raw);
    mpfr_free_str(raw);
    bool neg = !s.empty() && s[0] == '-';
    std::string d = neg ? s.substr(1) : s;
    return detail::format_digits(d, e, neg);
}

/// Decimal string with exactly `digits` significant digits, round half to
/// even. Exact zero prints as "0".
inline std::string to_decimal(const BigReal& x, long digits) {
    if (digits < 1) throw std::invalid_argument("to_decimal: digits must be >= 1");
    if (!x.context().valid())
        throw std::invalid_argument("to_decimal: value has no context");
    if (digits > x.context().effective_digits())
        throw std::invalid_argument("to_decimal: digits exceed context precision");
    return detail::format_decimal(x.raw(), digits, MPFR_RNDN);
}

inline BigReal PrecisionContext::from_long(long v) const {
    BigReal r(*this);
    mpfr_set_si(r.raw(), v, MPFR_RNDN);
    return r;
}

inline BigReal PrecisionContext::from_string(std::string_view s) const {
    BigReal r(*this);
    std::string buf(s);
    if (buf.empty() || mpfr_set_str(r.raw(), buf.c_str(), 10, MPFR_RNDN) != 0)
        throw std::invalid_argument("from_string: not a decimal number: '" + buf + "'");
    return r;
}

inline BigReal PrecisionContext::from_ratio(long num, long den) const {
    if (den == 0) throw std::invalid_argument("from_ratio: zero denominator");
    BigReal r(*this);
    mpfr_set_si(r.raw(), num, MPFR_RNDN);
    mpfr_div_si(r.raw(), r.raw(), den, MPFR_RNDN);
    return r;
}

inline BigReal PrecisionContext::convert(const BigReal& x) const {
    BigReal r(*this);
    mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

inline BigReal PrecisionContext::pi() const {
    BigReal r(*this);
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

inline BigReal PrecisionContext::pow10(long exponent) const {
    BigReal r(*this);
    mpfr_set_ui(r.raw(), 10, MPFR_RNDN);
    mpfr_pow_si(r.raw(), r.raw(), exponent, MPFR_RNDN);
    return r;
}

struct RootOptions {
    long max_iterations = 100;  // one bisection round each, as in the source run
    bool accelerate = true;
};

struct RootResult {
    BigReal root;  // midpoint of the final sign-change bracket
    BigReal lo;
    BigReal hi;
    long iterations = 0;
    long evaluations = 0;
};

/// Bracketed root finding: plain bisection plus at most one Illinois-type
/// secant step per bisection step, accepted only strictly inside the current
/// sign-change bracket. Never leaves [lo, hi].
template <class F>
RootResult find_root_detailed(F&& f, const BigReal& lo, const BigReal& hi,
                              const PrecisionContext& ctx, const BigReal& tol,
                              RootOptions opt = {}) {
    if (!(tol.sgn() > 0)) throw std::invalid_argument("find_root: tol must be > 0");
    BigReal a = ctx.convert(lo);
    BigReal b = ctx.convert(hi);
    if (!(a < b)) throw std::invalid_argument("find_root: requires lo < hi");

    long evals = 0;
    auto eval = [&](const BigReal& x) {
        BigReal y = f(x);
        ++evals;
        if (y.is_nan()) throw ConvergenceError("find_root: function evaluated to NaN");
        return ctx.convert(y);
    };

    BigReal fa = eval(a);
    if (fa.is_zero()) return {a, a, a, 0, evals};
    BigReal fb = eval(b);
    if (fb.is_zero()) return {b, b, b, 0, evals};
    if (fa.sgn() == fb.sgn())
        throw NoSignChange("find_root: no sign change at bracket endpoints");

    // Secant working copies; the Illinois rule halves the value on the side
    // that keeps surviving so the interpolation point crosses the root.
    BigReal fa_w = fa;
    BigReal fb_w = fb;
    int last_moved = 0;  // -1: a replaced last, +1: b replaced last

    auto place = [&](BigReal&& p, BigReal&& fp) {
        if (fp.sgn() == fa.sgn()) {
            a = std::move(p);
            fa = fp;
            fa_w = std::move(fp);
            if (last_moved == -1) fb_w = fb_w / 2;
            last_moved = -1;
        } else {
            b = std::move(p);
            fb = fp;
            fb_w = std::move(fp);
            if (last_moved == 1) fa_w = fa_w / 2;
            last_moved = 1;
        }
    };

    for (long iter = 1; iter <= opt.max_iterations; ++iter) {
        if (b - a <= tol) {
            BigReal mid = (a + b) / 2;
            return {std::move(mid), std::move(a), std::move(b), iter - 1, evals};
        }
        if (opt.accelerate) {
            BigReal den = fb_w - fa_w;
            if (!den.is_zero()) {
                BigReal s = (a * fb_w - b * fa_w) / den;
                if (a < s && s < b) {
                    BigReal fs = eval(s);
                    if (fs.is_zero()) return {s, s, s, iter, evals};
                    place(std::move(s), std::move(fs));
                    if (b - a <= tol) {
                        BigReal mid = (a + b) / 2;
                        return {std::move(mid), std::move(a), std::move(b), iter, evals};
                    }
                }
            }
        }
        BigReal m = (a + b) / 2;
        if (!(a < m && m < b))
            throw ConvergenceError("find_root: bracket reached the precision floor before tol");
        BigReal fm = eval(m);
        if (fm.is_zero()) return {m, m, m, iter, evals};
        place(std::move(m), std::move(fm));
    }
    throw ConvergenceError("find_root: iteration budget exhausted");
}

template <class F>
BigReal find_root_bracketed(F&& f, const BigReal& lo, const BigReal& hi,
                            const PrecisionContext& ctx, const BigReal& tol,
                            RootOptions opt = {}) {
    return find_root_detailed(std::forward<F>(f), lo, hi, ctx, tol, opt).root;
}

struct SignChange {
    BigReal lo;
    BigReal hi;
};

/// First subinterval of the uniform `steps`-partition of [lo, hi] where f
/// changes sign (a zero endpoint counts). Absence is a valid result.
template <class F>
std::optional<SignChange> sign_scan(F&& f, const BigReal& lo, const BigReal& hi,
                                    long steps, const PrecisionContext& ctx) {
    if (steps < 2) throw std::invalid_argument("sign_scan: steps must be >= 2");
    BigReal a = ctx.convert(lo);
    BigReal b = ctx.convert(hi);
    BigReal span = b - a;
    auto point = [&](long i) {
        if (i == 0) return a;
        if (i == steps) return b;
        return a + (span * i) / steps;
    };
    BigReal x_prev = point(0);
    int s_prev = f(x_prev).sgn();
    for (long i = 1; i <= steps; ++i) {
        BigReal x = point(i);
        int s = f(x).sgn();
        if (!(s_prev == 0 && s == 0) && s_prev * s <= 0)
            return SignChange{std::move(x_prev), std::move(x)};
        x_prev = std::move(x);
        s_prev = s;
    }
    return std::nullopt;
}

}  // namespace qanho

#endif  // QANHO_PRECISION_HPP
