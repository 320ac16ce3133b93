#include "ctising/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ctising/rng.hpp"

namespace ctising {

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double Matrix::sym_error() const {
    if (!square()) throw ContractError("sym_error: matrix not square");
    double m = 0.0;
    for (int i = 0; i < rows; ++i)
        for (int j = i + 1; j < cols; ++j)
            m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
}

bool Matrix::is_symmetric(double rel_tol) const {
    double scale = max_abs();
    return sym_error() <= rel_tol * (scale > 0 ? scale : 1.0);
}

Matrix Matrix::transpose() const {
    Matrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw ContractError("matrix +: shape mismatch");
    Matrix c = a;
    for (size_t i = 0; i < c.a.size(); ++i) c.a[i] += b.a[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw ContractError("matrix -: shape mismatch");
    Matrix c = a;
    for (size_t i = 0; i < c.a.size(); ++i) c.a[i] -= b.a[i];
    return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw ContractError("matrix *: shape mismatch");
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            double v = a(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
        }
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.a) v *= s;
    return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void normalize(std::vector<double>& a) {
    double n = norm2(a);
    if (n == 0.0) throw ContractError("normalize: zero vector");
    for (double& v : a) v /= n;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& v) {
    if (int(v.size()) != a.cols) throw ContractError("matvec: shape mismatch");
    std::vector<double> out(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double* row = &a.a[size_t(i) * a.cols];
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += row[j] * v[j];
        out[i] = s;
    }
    return out;
}

EigenSystem jacobi_eigensystem(const Matrix& input, bool want_vectors) {
    if (!input.square()) throw ContractError("jacobi: matrix not square");
    if (!input.is_symmetric(1e-10)) throw ContractError("jacobi: matrix not symmetric");
    int n = input.rows;
    Matrix a = input;
    Matrix v = want_vectors ? Matrix::identity(n) : Matrix();

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) scale = 1.0;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= 1e-15 * scale * n) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                double app = a(p, p), aqq = a(q, q);
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                if (want_vectors) {
                    for (int k = 0; k < n; ++k) {
                        double vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenSystem out;
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = a(order[i], order[i]);
    if (want_vectors) {
        out.vectors = Matrix(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

std::vector<double> jacobi_eigenvalues(const Matrix& a) {
    return jacobi_eigensystem(a, false).values;
}

std::vector<double> descending(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
}

LanczosResult lanczos_lowest(const std::function<void(const double*, double*)>& apply, int dim,
                             uint64_t seed, int max_iter, double tol) {
    if (dim <= 0) throw ContractError("lanczos: empty operator");
    max_iter = std::min(max_iter, dim);
    Rng rng(Rng::derive(seed, 0x1a));
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;
    std::vector<double> q(dim), w(dim);
    for (double& x : q) x = rng.normal();
    normalize(q);
    basis.push_back(q);

    auto reorthogonalize = [&](std::vector<double>& vec) {
        for (const auto& b : basis) {
            double c = dot(vec, b);
            for (int i = 0; i < dim; ++i) vec[i] -= c * b[i];
        }
    };

    double prev_low = 1e300;
    std::vector<double> ritz_vals;
    Matrix tri_vecs;
    int it = 0;
    for (; it < max_iter; ++it) {
        apply(basis.back().data(), w.data());
        double a = dot(w, basis.back());
        alpha.push_back(a);
        for (int i = 0; i < dim; ++i) w[i] -= a * basis.back()[i];
        if (it > 0)
            for (int i = 0; i < dim; ++i) w[i] -= beta.back() * basis[it - 1][i];
        reorthogonalize(w);
        reorthogonalize(w);  // twice is enough
        double b = norm2(w);

        // Ritz values of the tridiagonal section
        int k = int(alpha.size());
        Matrix t(k, k);
        for (int i = 0; i < k; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        EigenSystem es = jacobi_eigensystem(t, true);
        ritz_vals = es.values;
        tri_vecs = es.vectors;
        double low = es.values.front();
        // residual of the lowest Ritz pair: |beta_k| times its last coordinate
        double res_est = b * std::abs(es.vectors(k - 1, 0));
        bool converged = it >= 4 &&
                         (res_est <= 1e-11 * std::max(1.0, std::abs(low)) ||
                          std::abs(low - prev_low) <= tol * tol * std::max(1.0, std::abs(low)));
        prev_low = low;
        if (b <= 1e-14 || converged || it == max_iter - 1) {
            ++it;
            break;
        }
        beta.push_back(b);
        for (int i = 0; i < dim; ++i) w[i] /= b;
        basis.push_back(w);
    }

    LanczosResult res;
    res.iterations = it;
    res.value = ritz_vals.front();
    res.ritz_gap = ritz_vals.size() > 1 ? ritz_vals[1] - ritz_vals[0] : 0.0;
    res.vector.assign(dim, 0.0);
    for (size_t j = 0; j < basis.size() && j < size_t(tri_vecs.rows); ++j) {
        double c = tri_vecs(int(j), 0);
        for (int i = 0; i < dim; ++i) res.vector[i] += c * basis[j][i];
    }
    normalize(res.vector);
    apply(res.vector.data(), w.data());
    double r = 0.0;
    for (int i = 0; i < dim; ++i) {
        double d = w[i] - res.value * res.vector[i];
        r += d * d;
    }
    res.residual = std::sqrt(r);
    return res;
}

}  // namespace ctising
