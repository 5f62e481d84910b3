#ifndef QANHO_TESTS_JACOBI_HPP
#define QANHO_TESTS_JACOBI_HPP

// Brute-force dense symmetric eigensolver (cyclic Jacobi, double precision).
// Low-precision oracle for small eigenvector-matrix cases.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qanho_tests {

struct DenseEigen {
    std::vector<double> values;               // ascending
    std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

inline DenseEigen jacobi_eigen(std::vector<std::vector<double>> a) {
    const size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (size_t k = 0; k < n; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return a[i][i] < a[j][j]; });
    DenseEigen out;
    for (size_t idx : order) {
        out.values.push_back(a[idx][idx]);
        std::vector<double> col(n);
        for (size_t k = 0; k < n; ++k) col[k] = v[k][idx];
        out.vectors.push_back(std::move(col));
    }
    return out;
}

}  // namespace qanho_tests

#endif  // QANHO_TESTS_JACOBI_HPP
