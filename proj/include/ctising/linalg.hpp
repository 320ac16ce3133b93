#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ctising/errors.hpp"

namespace ctising {

// Dense row-major real matrix.  The Hamiltonian and every density matrix in the
// sigma^3 product basis are real, so no complex storage is carried.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(size_t(r) * c, 0.0) {}
    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return a[size_t(i) * cols + j]; }

    bool square() const { return rows == cols; }
    double max_abs() const;
    double sym_error() const;  // ||A - A^T||_max
    bool is_symmetric(double rel_tol = 1e-12) const;
    Matrix transpose() const;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);
void normalize(std::vector<double>& a);
std::vector<double> matvec(const Matrix& a, const std::vector<double>& v);

struct EigenSystem {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are eigenvectors, aligned with values
};

// Cyclic Jacobi eigensolver for symmetric matrices.  Unconditionally convergent;
// kept in-repo so spectra are reproducible without an external numerical library.
EigenSystem jacobi_eigensystem(const Matrix& a, bool want_vectors = true);

std::vector<double> jacobi_eigenvalues(const Matrix& a);

// Eigenvalues sorted non-increasing.
std::vector<double> descending(std::vector<double> v);

// Smallest eigenpair by Lanczos with full reorthogonalization on a matrix-free
// operator; used for ground states beyond the dense-Jacobi comfort zone.
struct LanczosResult {
    double value = 0.0;
    std::vector<double> vector;
    double residual = 0.0;
    int iterations = 0;
    double ritz_gap = 0.0;  // gap to the second Ritz value (an estimate)
};
LanczosResult lanczos_lowest(const std::function<void(const double*, double*)>& apply, int dim,
                             uint64_t seed, int max_iter = 400, double tol = 1e-13);

}  // namespace ctising
