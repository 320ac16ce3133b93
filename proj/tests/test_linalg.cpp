#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ctising/linalg.hpp"
#include "ctising/rng.hpp"

using namespace ctising;

namespace {

Matrix random_symmetric(int n, uint64_t seed) {
    Rng r(seed);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = r.normal();
    return a;
}

}  // namespace

TEST_CASE("jacobi on a diagonal matrix") {
    Matrix a(3, 3);
    a(0, 0) = 5.0;
    a(1, 1) = -2.0;
    a(2, 2) = 1.0;
    EigenSystem es = jacobi_eigensystem(a);
    CHECK(es.values[0] == doctest::Approx(-2.0));
    CHECK(es.values[1] == doctest::Approx(1.0));
    CHECK(es.values[2] == doctest::Approx(5.0));
}

TEST_CASE("jacobi residuals and orthogonality on random matrices") {
    for (int n : {8, 64, 256}) {
        Matrix a = random_symmetric(n, uint64_t(n));
        EigenSystem es = jacobi_eigensystem(a);
        double scale = a.max_abs();
        for (int j = 0; j < n; j += std::max(1, n / 7)) {
            std::vector<double> v(n);
            for (int i = 0; i < n; ++i) v[size_t(i)] = es.vectors(i, j);
            std::vector<double> av = matvec(a, v);
            double r = 0;
            for (int i = 0; i < n; ++i) {
                double d = av[size_t(i)] - es.values[size_t(j)] * v[size_t(i)];
                r += d * d;
            }
            CHECK(std::sqrt(r) <= 1e-9 * scale * n);
        }
        for (int j = 1; j < n; ++j) CHECK(es.values[size_t(j)] >= es.values[size_t(j - 1)]);
        // orthonormality spot check
        for (int trial = 0; trial < 5; ++trial) {
            int j1 = (trial * 17) % n, j2 = (trial * 29 + 1) % n;
            double d = 0;
            for (int i = 0; i < n; ++i) d += es.vectors(i, j1) * es.vectors(i, j2);
            CHECK(std::abs(d - (j1 == j2 ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("jacobi rejects non-symmetric input") {
    Matrix a(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(jacobi_eigensystem(a), ContractError);
}

TEST_CASE("lanczos matches jacobi on the lowest pair") {
    int n = 300;
    Matrix a = random_symmetric(n, 9);
    auto apply = [&](const double* in, double* out) {
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += a(i, j) * in[j];
            out[i] = s;
        }
    };
    LanczosResult lr = lanczos_lowest(apply, n, 4);
    std::vector<double> ev = jacobi_eigenvalues(a);
    CHECK(std::abs(lr.value - ev.front()) < 1e-9 * a.max_abs() * n);
    CHECK(lr.residual < 1e-7 * a.max_abs() * n);
}

TEST_CASE("descending sorts non-increasing") {
    auto v = descending({0.1, 0.9, 0.5});
    CHECK(v[0] == 0.9);
    CHECK(v[2] == 0.1);
}
