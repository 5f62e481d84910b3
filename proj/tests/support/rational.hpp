#ifndef QANHO_TESTS_RATIONAL_HPP
#define QANHO_TESTS_RATIONAL_HPP

// Exact rational arithmetic (GMP mpq) used as an independent oracle for the
// series recursion and the ODE residual. Test-only; the library under test
// never touches this code.

#include <gmp.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "qanho/precision.hpp"

namespace qanho_tests {

class Rat {
public:
    Rat() { mpq_init(q_); }
    Rat(long num, long den) {
        if (den == 0) throw std::invalid_argument("Rat: zero denominator");
        mpq_init(q_);
        mpq_set_si(q_, num, 1);
        mpq_t d;
        mpq_init(d);
        mpq_set_si(d, den, 1);
        mpq_div(q_, q_, d);
        mpq_clear(d);
    }
    explicit Rat(long num) : Rat(num, 1) {}
    Rat(const Rat& o) {
        mpq_init(q_);
        mpq_set(q_, o.q_);
    }
    Rat(Rat&& o) noexcept {
        mpq_init(q_);
        mpq_swap(q_, o.q_);
    }
    Rat& operator=(const Rat& o) {
        if (this != &o) mpq_set(q_, o.q_);
        return *this;
    }
    Rat& operator=(Rat&& o) noexcept {
        if (this != &o) mpq_swap(q_, o.q_);
        return *this;
    }
    ~Rat() { mpq_clear(q_); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        Rat r;
        mpq_add(r.q_, a.q_, b.q_);
        return r;
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        Rat r;
        mpq_sub(r.q_, a.q_, b.q_);
        return r;
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        Rat r;
        mpq_mul(r.q_, a.q_, b.q_);
        return r;
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        Rat r;
        mpq_div(r.q_, a.q_, b.q_);
        return r;
    }
    Rat operator-() const {
        Rat r;
        mpq_neg(r.q_, q_);
        return r;
    }
    friend bool operator==(const Rat& a, const Rat& b) { return mpq_equal(a.q_, b.q_) != 0; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    bool is_zero() const { return mpq_sgn(q_) == 0; }

    qanho::BigReal to_big(const qanho::PrecisionContext& ctx) const {
        qanho::BigReal r(ctx);
        mpfr_set_q(r.raw(), q_, MPFR_RNDN);
        return r;
    }

    std::string str() const {
        char* s = mpq_get_str(nullptr, 10, q_);
        std::string out(s);
        void (*freefn)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefn);
        freefn(s, out.size() + 1);
        return out;
    }

private:
    mpq_t q_;
};

// Even-index coefficients a_0, a_2, ..., a_n of the series solution, exact.
// Storage index k/2.
inline std::vector<Rat> series_coefficients(const Rat& lambda, long n) {
    std::vector<Rat> a;
    a.push_back(Rat(1));                            // a_0
    if (n >= 2) a.push_back(-(lambda / Rat(2)));    // a_2
    if (n >= 4) a.push_back(lambda * lambda / Rat(24));
    for (long k = 6; k <= n; k += 2)
        a.push_back((a[static_cast<size_t>(k / 2 - 3)] -
                     lambda * a[static_cast<size_t>(k / 2 - 1)]) /
                    Rat(k * (k - 1)));
    return a;
}

inline Rat series_sum(const std::vector<Rat>& a, const Rat& xi, bool derivative) {
    Rat xi2 = xi * xi;
    Rat sum(0);
    if (!derivative) {
        Rat pow(1);  // xi^k
        for (size_t i = 0; i < a.size(); ++i) {
            sum = sum + a[i] * pow;
            pow = pow * xi2;
        }
        return sum;
    }
    Rat pow = xi;  // xi^(k-1), starting at k = 2
    for (size_t i = 1; i < a.size(); ++i) {
        sum = sum + Rat(2 * static_cast<long>(i)) * a[i] * pow;
        pow = pow * xi2;
    }
    return sum;
}

// Coefficients of -y'' + x^4 y - lambda y for the exact polynomial built from
// the coefficient list; entry j is the coefficient of x^j (0 <= j <= n - 6).
inline std::vector<Rat> ode_residual(const std::vector<Rat>& a, const Rat& lambda, long n) {
    auto coeff = [&](long k) {
        if (k < 0 || k > n || k % 2 != 0) return Rat(0);
        return a[static_cast<size_t>(k / 2)];
    };
    std::vector<Rat> r;
    for (long j = 0; j <= n - 6; ++j)
        r.push_back(-(Rat(j + 2) * Rat(j + 1) * coeff(j + 2)) + coeff(j - 4) -
                    lambda * coeff(j));
    return r;
}

}  // namespace qanho_tests

#endif  // QANHO_TESTS_RATIONAL_HPP
