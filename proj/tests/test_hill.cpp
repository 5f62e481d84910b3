#include <catch2/catch_amalgamated.hpp>

#include "qanho/basis.hpp"
#include "qanho/hill.hpp"
#include "qanho/report.hpp"
#include "support/jacobi.hpp"
#include "support/quadrature.hpp"

using namespace qanho;

namespace {
const PrecisionContext ctx = make_context(50, 10);

BigReal ulp_scale(const BigReal& x, int ulps) {
    BigReal u = abs(x);
    mpfr_mul_2si(u.raw(), u.raw(), -static_cast<long>(x.context().bits()) + 3, MPFR_RNDN);
    return u * ulps;
}
}  // namespace

TEST_CASE("matrix elements, closed cases") {
    CHECK(matrix_element(0, 0, ctx) == ctx.from_ratio(5, 4));
    CHECK(matrix_element(2, 2, ctx) == ctx.from_ratio(49, 4));
    CHECK(matrix_element(1, 1, ctx) == ctx.from_ratio(21, 4));
    CHECK(matrix_element(0, 1, ctx).is_zero());
    CHECK(matrix_element(0, 6, ctx).is_zero());
    CHECK(matrix_element(3, 0, ctx).is_zero());

    BigReal s2 = sqrt(ctx.from_long(2));
    CHECK(abs(matrix_element(0, 2, ctx) - s2) <= ulp_scale(s2, 4));

    // h_{0,4} = sqrt(6)/2
    BigReal expect = sqrt(ctx.from_long(6)) / 2;
    CHECK(abs(matrix_element(0, 4, ctx) - expect) <= ulp_scale(expect, 4));
}

TEST_CASE("matrix element symmetry") {
    for (long m = 0; m <= 30; ++m)
        for (long n = 0; n <= 30; ++n)
            CHECK(matrix_element(m, n, ctx) == matrix_element(n, m, ctx));
}

TEST_CASE("matrix elements against the quadrature oracle") {
    PrecisionContext oracle_ctx = make_context(100, 10);
    PrecisionContext eval_ctx = make_context(40, 10);
    BigReal bound = oracle_ctx.pow10(-30);
    for (long m = 0; m <= 12; ++m)
        for (long n = 0; n <= 12; ++n) {
            BigReal q = qanho_tests::hill_element_quadrature(m, n, oracle_ctx);
            BigReal v = matrix_element(m, n, eval_ctx);
            BigReal diff = abs(oracle_ctx.convert(v) - q);
            INFO("m=" << m << " n=" << n);
            CHECK(diff <= bound);
        }
}

TEST_CASE("build_hamiltonian") {
    BandedSymMatrix even2 = build_hamiltonian(2, Parity::even, ctx);
    CHECK(even2.diag[0] == ctx.from_ratio(5, 4));
    CHECK(even2.diag[1] == ctx.from_ratio(49, 4));
    REQUIRE(even2.off1.size() == 1);
    BigReal s2 = sqrt(ctx.from_long(2));
    CHECK(abs(even2.off1[0] - s2) <= ulp_scale(s2, 4));
    CHECK(even2.off2.empty());

    BandedSymMatrix even1 = build_hamiltonian(1, Parity::even, ctx);
    CHECK(even1.size == 1);
    CHECK(even1.diag[0] == ctx.from_ratio(5, 4));

    BandedSymMatrix odd3 = build_hamiltonian(3, Parity::odd, ctx);
    CHECK(odd3.diag[0] == ctx.from_ratio(21, 4));
    CHECK(odd3.diag[1] == ctx.from_ratio(89, 4));
    CHECK(odd3.diag[2] == ctx.from_ratio(205, 4));
    CHECK(odd3.off1[0] == matrix_element(1, 3, ctx));
    CHECK(odd3.off2[0] == matrix_element(1, 5, ctx));

    CHECK_THROWS_AS(build_hamiltonian(0, Parity::even, ctx), std::invalid_argument);
}

TEST_CASE("inertia_count") {
    BandedSymMatrix one = build_hamiltonian(1, Parity::even, ctx);
    CHECK(inertia_count(one, ctx.from_long(2)) == 1);
    CHECK(inertia_count(one, ctx.from_long(1)) == 0);

    BandedSymMatrix two = build_hamiltonian(2, Parity::even, ctx);
    CHECK(inertia_count(two, ctx.from_string("1.1")) == 1);
    // exact diagonal hit: the one-ulp nudge must keep this usable
    CHECK(inertia_count(one, ctx.from_ratio(5, 4)) <= 1);
}

TEST_CASE("inertia monotonicity and totals") {
    BandedSymMatrix M = build_hamiltonian(25, Parity::even, ctx);
    auto [lo, hi] = detail::gershgorin_interval(M);
    CHECK(inertia_count(M, lo) == 0);
    CHECK(inertia_count(M, hi) == 25);
    long prev = 0;
    for (int i = 0; i <= 12; ++i) {
        BigReal x = lo + ((hi - lo) * i) / 12;
        long c = inertia_count(M, x);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(prev == 25);
}

TEST_CASE("lowest_eigenvalues") {
    // 2x2 even block: ground eigenvalue (27 - 2 sqrt(129))/4
    BandedSymMatrix two = build_hamiltonian(2, Parity::even, ctx);
    BigReal tol = ctx.pow10(-30);
    std::vector<Bracket> ev = lowest_eigenvalues(two, 2, ctx, tol);
    REQUIRE(ev.size() == 2);
    BigReal closed = (ctx.from_long(27) - sqrt(ctx.from_long(129)) * 2) / 4;
    CHECK(ev[0].lo <= closed);
    CHECK(closed <= ev[0].hi);
    CHECK(ev[0].hi - ev[0].lo <= tol);
    CHECK(compare_digits(to_decimal((ev[0].lo + ev[0].hi) / 2, 20),
                         "1.071091654199726389107662") >= 18);
    // disjoint or touching, ascending
    CHECK(ev[0].hi <= ev[1].lo);
    BigReal upper = (ctx.from_long(27) + sqrt(ctx.from_long(129)) * 2) / 4;
    CHECK(ev[1].lo <= upper);
    CHECK(upper <= ev[1].hi);

    BandedSymMatrix one = build_hamiltonian(1, Parity::even, ctx);
    std::vector<Bracket> e1 = lowest_eigenvalues(one, 1, ctx, tol);
    CHECK(e1[0].lo <= ctx.from_ratio(5, 4));
    CHECK(ctx.from_ratio(5, 4) <= e1[0].hi);
    CHECK(e1[0].hi - e1[0].lo <= tol);

    CHECK_THROWS_AS(lowest_eigenvalues(two, 3, ctx, tol), std::invalid_argument);
    CHECK_THROWS_AS(lowest_eigenvalues(two, 0, ctx, tol), std::invalid_argument);
}

TEST_CASE("eigenvector") {
    BandedSymMatrix one = build_hamiltonian(1, Parity::even, ctx);
    std::vector<Bracket> e1 = lowest_eigenvalues(one, 1, ctx, ctx.pow10(-30));
    std::vector<BigReal> v1 = eigenvector(one, e1[0], ctx);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0] == ctx.from_long(1));

    // 2x2 ground state: direction (12.25 - lambda0, -sqrt(2)) normalized
    BandedSymMatrix two = build_hamiltonian(2, Parity::even, ctx);
    std::vector<Bracket> ev = lowest_eigenvalues(two, 1, ctx, ctx.pow10(-40));
    std::vector<BigReal> v = eigenvector(two, ev[0], ctx);
    REQUIRE(v.size() == 2);
    BigReal lam = (ev[0].lo + ev[0].hi) / 2;
    BigReal c = ctx.from_ratio(49, 4) - lam;
    BigReal s = sqrt(ctx.from_long(2));
    BigReal norm = sqrt(c * c + s * s);
    CHECK(abs(v[0] - c / norm) <= ctx.pow10(-25));
    CHECK(abs(v[1] + s / norm) <= ctx.pow10(-25));
    CHECK(abs(v[0] * v[0] + v[1] * v[1] - ctx.from_long(1)) <= ctx.pow10(-45));
}

TEST_CASE("ground state is dominated by the phi_0 coefficient") {
    BandedSymMatrix M = build_hamiltonian(50, Parity::even, ctx);
    std::vector<Bracket> ev = lowest_eigenvalues(M, 1, ctx, ctx.pow10(-30));
    std::vector<BigReal> v = eigenvector(M, ev[0], ctx);
    for (size_t i = 1; i < v.size(); ++i) CHECK(abs(v[i]) < abs(v[0]));
}

TEST_CASE("reconstructed ground state is nodeless") {
    // psi(6) is about 5e-32, far below the basis-truncation floor of the
    // 100-state expansion (~1e-21), so covering all of [-6, 6] takes 200
    // even-parity states; the 100-state vector is checked on the range its
    // truncation resolves.
    auto nodeless_on = [&](long states, long tol_exp, long max_eighths) {
        PrecisionContext c = make_context(70, 10);
        BandedSymMatrix M = build_hamiltonian(states, Parity::even, c);
        std::vector<Bracket> ev = lowest_eigenvalues(M, 1, c, c.pow10(-tol_exp));
        std::vector<BigReal> reduced = eigenvector(M, ev[0], c);
        std::vector<BigReal> full(2 * static_cast<size_t>(states), c.from_long(0));
        for (size_t i = 0; i < reduced.size(); ++i) full[2 * i] = reduced[i];
        BigReal eighth = c.from_ratio(1, 8);
        for (long i = -max_eighths; i <= max_eighths; ++i) {
            INFO("states=" << states << " z=" << i << "/8");
            CHECK(reconstruct_psi(full, eighth * i, c).sgn() > 0);
        }
    };
    nodeless_on(50, 45, 32);   // 100 basis states, [-4, 4]
    nodeless_on(200, 60, 48);  // 400 basis states, [-6, 6]
}

TEST_CASE("eigenvector_matrix small cases") {
    std::vector<std::vector<BigReal>> m2 = eigenvector_matrix(2, ctx);
    REQUIRE(m2.size() == 2);
    // parity blocks are 1x1: exactly one zero per column, diagonal layout
    CHECK(m2[0][0] == ctx.from_long(1));
    CHECK(m2[1][0].is_zero());
    CHECK(m2[0][1].is_zero());
    CHECK(m2[1][1] == ctx.from_long(1));

    CHECK_THROWS_AS(eigenvector_matrix(1, ctx), std::invalid_argument);
}

TEST_CASE("eigenvector_matrix against the dense Jacobi oracle") {
    const long N = 4;
    std::vector<std::vector<BigReal>> got = eigenvector_matrix(N, ctx);
    std::vector<std::vector<double>> dense(N, std::vector<double>(N));
    for (long r = 0; r < N; ++r)
        for (long c = 0; c < N; ++c) dense[r][c] = matrix_element(r, c, ctx).to_double();
    qanho_tests::DenseEigen oracle = qanho_tests::jacobi_eigen(dense);
    for (size_t col = 0; col < N; ++col) {
        // align sign on the largest oracle component
        size_t piv = 0;
        for (size_t r = 1; r < N; ++r)
            if (std::fabs(oracle.vectors[col][r]) > std::fabs(oracle.vectors[col][piv]))
                piv = r;
        double flip = oracle.vectors[col][piv] * got[piv][col].to_double() < 0 ? -1.0 : 1.0;
        for (size_t r = 0; r < N; ++r) {
            INFO("col=" << col << " row=" << r);
            CHECK(std::fabs(flip * oracle.vectors[col][r] - got[r][col].to_double()) < 1e-8);
        }
    }
}

TEST_CASE("checkerboard zeros at parity mismatch") {
    std::vector<std::vector<BigReal>> m = eigenvector_matrix(6, ctx);
    for (size_t c = 0; c < 6; ++c) {
        // column parity = parity of the first nonzero row
        size_t first = 0;
        while (first < 6 && m[first][c].is_zero()) ++first;
        REQUIRE(first < 6);
        for (size_t r = 0; r < 6; ++r)
            if ((r % 2) != (first % 2)) CHECK(m[r][c].is_zero());
    }
}
