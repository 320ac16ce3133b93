#include "ctising/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace ctising {

Matrix build_hamiltonian(int n, const std::vector<double>& lambda_edges,
                         const std::vector<double>& delta_sites) {
    if (n < 1) throw ContractError("build_hamiltonian: n must be >= 1");
    if (n > kMaxSpins) throw ContractError("build_hamiltonian: n exceeds the dense-size guard");
    if (int(lambda_edges.size()) != n - 1 || int(delta_sites.size()) != n)
        throw ContractError("build_hamiltonian: coupling vector length mismatch");
    for (double v : lambda_edges)
        if (v < 0) throw ContractError("build_hamiltonian: lambda must be >= 0");
    for (double v : delta_sites)
        if (v < 0) throw ContractError("build_hamiltonian: delta must be >= 0");

    int dim = 1 << n;
    Matrix h(dim, dim);
    for (int b = 0; b < dim; ++b) {
        double diag = 0.0;
        for (int i = 0; i < n - 1; ++i) {
            int zi = (b >> (n - 1 - i)) & 1;
            int zj = (b >> (n - 2 - i)) & 1;
            diag -= 0.5 * lambda_edges[i] * (zi == zj ? 1.0 : -1.0);
        }
        h(b, b) = diag;
        for (int i = 0; i < n; ++i) {
            int flipped = b ^ (1 << (n - 1 - i));
            h(b, flipped) -= delta_sites[i];
        }
    }
    return h;
}

Matrix build_hamiltonian(int n, double lambda, double delta) {
    return build_hamiltonian(n, std::vector<double>(std::max(0, n - 1), lambda),
                             std::vector<double>(n, delta));
}

GroundState ground_state(const Matrix& h) {
    if (!h.square()) throw ContractError("ground_state: matrix not square");
    if (!h.is_symmetric()) throw ContractError("ground_state: matrix not symmetric");
    GroundState gs;
    if (h.rows <= 256) {
        EigenSystem es = jacobi_eigensystem(h, true);
        gs.energy = es.values[0];
        gs.gap = h.rows > 1 ? es.values[1] - es.values[0] : 0.0;
        gs.vector.resize(h.rows);
        for (int i = 0; i < h.rows; ++i) gs.vector[i] = es.vectors(i, 0);
    } else {
        auto apply = [&](const double* in, double* out) {
            for (int i = 0; i < h.rows; ++i) {
                const double* row = &h.a[size_t(i) * h.cols];
                double s = 0.0;
                for (int j = 0; j < h.cols; ++j) s += row[j] * in[j];
                out[i] = s;
            }
        };
        LanczosResult lr = lanczos_lowest(apply, h.rows, 0x6c);
        gs.energy = lr.value;
        gs.vector = lr.vector;
        gs.gap = lr.ritz_gap;
        gs.residual = lr.residual;
    }
    std::vector<double> hv = matvec(h, gs.vector);
    double r = 0.0;
    for (int i = 0; i < h.rows; ++i) {
        double d = hv[i] - gs.energy * gs.vector[i];
        r += d * d;
    }
    gs.residual = std::sqrt(r);
    return gs;
}

GroundState ground_state_chain(int n, const std::vector<double>& lambda_edges,
                               const std::vector<double>& delta_sites, uint64_t seed) {
    if (n < 1 || n > kMaxSpins) throw ContractError("ground_state_chain: n out of range");
    if (int(lambda_edges.size()) != n - 1 || int(delta_sites.size()) != n)
        throw ContractError("ground_state_chain: coupling vector length mismatch");
    int dim = 1 << n;
    if (dim <= 256) return ground_state(build_hamiltonian(n, lambda_edges, delta_sites));

    std::vector<double> diag(dim, 0.0);
    for (int b = 0; b < dim; ++b) {
        double d = 0.0;
        for (int i = 0; i < n - 1; ++i) {
            int zi = (b >> (n - 1 - i)) & 1;
            int zj = (b >> (n - 2 - i)) & 1;
            d -= 0.5 * lambda_edges[i] * (zi == zj ? 1.0 : -1.0);
        }
        diag[b] = d;
    }
    auto apply = [&](const double* in, double* out) {
        for (int b = 0; b < dim; ++b) out[b] = diag[b] * in[b];
        for (int i = 0; i < n; ++i) {
            int mask = 1 << (n - 1 - i);
            double d = delta_sites[i];
            for (int b = 0; b < dim; ++b) out[b] -= d * in[b ^ mask];
        }
    };
    LanczosResult lr = lanczos_lowest(apply, dim, seed);
    GroundState gs;
    gs.energy = lr.value;
    gs.vector = lr.vector;
    gs.gap = lr.ritz_gap;
    gs.residual = lr.residual;
    return gs;
}

GroundState ground_state_chain(int n, double lambda, double delta, uint64_t seed) {
    return ground_state_chain(n, std::vector<double>(std::max(0, n - 1), lambda),
                              std::vector<double>(n, delta), seed);
}

DensityMatrix thermal_density(const Matrix& h, double beta) {
    if (beta <= 0.0) throw ContractError("thermal_density: beta must be > 0");
    if (!h.is_symmetric()) throw ContractError("thermal_density: matrix not symmetric");
    EigenSystem es = jacobi_eigensystem(h, true);
    int d = h.rows;
    double e0 = es.values[0];
    std::vector<double> w(d);
    double z = 0.0;
    for (int i = 0; i < d; ++i) {
        w[i] = std::exp(-beta * (es.values[i] - e0));  // shift keeps exponents safe
        z += w[i];
    }
    Matrix rho(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += es.vectors(i, k) * w[k] * es.vectors(j, k);
            rho(i, j) = rho(j, i) = s / z;
        }
    return make_density_matrix(std::move(rho));
}

Matrix coefficient_matrix(const std::vector<double>& psi, int n, int keep_lo, int keep_hi) {
    if (keep_lo < 0 || keep_hi >= n || keep_lo > keep_hi)
        throw ContractError("coefficient_matrix: bad keep range");
    if (int(psi.size()) != (1 << n)) throw ContractError("coefficient_matrix: dimension mismatch");
    int nl = keep_lo, nk = keep_hi - keep_lo + 1, nr = n - keep_hi - 1;
    int dl = 1 << nl, dk = 1 << nk, dr = 1 << nr;
    Matrix m(dk, dl * dr);
    for (int l = 0; l < dl; ++l)
        for (int a = 0; a < dk; ++a) {
            size_t base = (size_t(l) * dk + a) * dr;
            double* row = &m.a[size_t(a) * m.cols + size_t(l) * dr];
            for (int r = 0; r < dr; ++r) row[r] = psi[base + r];
        }
    return m;
}

DensityMatrix reduce(const std::vector<double>& psi, int n, int keep_lo, int keep_hi) {
    Matrix a = coefficient_matrix(psi, n, keep_lo, keep_hi);
    Matrix rho(a.rows, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            const double* ri = &a.a[size_t(i) * a.cols];
            const double* rj = &a.a[size_t(j) * a.cols];
            for (int k = 0; k < a.cols; ++k) s += ri[k] * rj[k];
            rho(i, j) = rho(j, i) = s;
        }
    return make_density_matrix(std::move(rho));
}

DensityMatrix reduce(const DensityMatrix& rho, int n, int keep_lo, int keep_hi) {
    if (keep_lo < 0 || keep_hi >= n || keep_lo > keep_hi)
        throw ContractError("reduce: bad keep range");
    if (rho.dim() != (1 << n)) throw ContractError("reduce: dimension mismatch");
    int nl = keep_lo, nk = keep_hi - keep_lo + 1, nr = n - keep_hi - 1;
    int dl = 1 << nl, dk = 1 << nk, dr = 1 << nr;
    Matrix out(dk, dk);
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b) {
            double s = 0.0;
            for (int l = 0; l < dl; ++l) {
                size_t ia = (size_t(l) * dk + a) * dr;
                size_t ib = (size_t(l) * dk + b) * dr;
                for (int r = 0; r < dr; ++r) s += rho.mat(int(ia + r), int(ib + r));
            }
            out(a, b) = s;
        }
    return make_density_matrix(std::move(out));
}

std::vector<double> schmidt_values(const std::vector<double>& psi, int left_dim, int right_dim) {
    if (size_t(left_dim) * right_dim != psi.size())
        throw ContractError("schmidt: split does not match the state dimension");
    // Gram matrix on the smaller side, then square roots of its spectrum.
    bool left_small = left_dim <= right_dim;
    int s = left_small ? left_dim : right_dim;
    Matrix g(s, s);
    if (left_small) {
        for (int i = 0; i < s; ++i)
            for (int j = 0; j <= i; ++j) {
                double v = 0.0;
                for (int k = 0; k < right_dim; ++k)
                    v += psi[size_t(i) * right_dim + k] * psi[size_t(j) * right_dim + k];
                g(i, j) = g(j, i) = v;
            }
    } else {
        for (int i = 0; i < s; ++i)
            for (int j = 0; j <= i; ++j) {
                double v = 0.0;
                for (int k = 0; k < left_dim; ++k)
                    v += psi[size_t(k) * right_dim + i] * psi[size_t(k) * right_dim + j];
                g(i, j) = g(j, i) = v;
            }
    }
    std::vector<double> ev = jacobi_eigenvalues(g);
    std::vector<double> sv;
    sv.reserve(ev.size());
    for (auto it = ev.rbegin(); it != ev.rend(); ++it) sv.push_back(std::sqrt(std::max(0.0, *it)));
    return sv;
}

std::vector<double> schmidt_values_block(const std::vector<double>& psi, int n, int keep_lo,
                                         int keep_hi) {
    Matrix a = coefficient_matrix(psi, n, keep_lo, keep_hi);
    std::vector<double> flat(a.a.begin(), a.a.end());
    return schmidt_values(flat, a.rows, a.cols);
}

double entropy_bits(const std::vector<double>& spectrum) {
    double s = 0.0;
    for (double p : spectrum)
        if (p > 1e-15) s -= p * std::log2(p);
    return s;
}

double entropy_bits(const DensityMatrix& rho) {
    return entropy_bits(jacobi_eigenvalues(rho.mat));
}

double op_norm_diff(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw ContractError("op_norm_diff: shape mismatch");
    std::vector<double> ev = jacobi_eigenvalues(a - b);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

double weyl_gap(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw ContractError("weyl_gap: shape mismatch");
    std::vector<double> ea = descending(jacobi_eigenvalues(a));
    std::vector<double> eb = descending(jacobi_eigenvalues(b));
    double g = 0.0;
    for (size_t i = 0; i < ea.size(); ++i) g = std::max(g, std::abs(ea[i] - eb[i]));
    double bound = op_norm_diff(a, b) + 1e-9;
    if (g > bound) throw ContractError("weyl_gap: perturbation inequality violated");
    return g;
}

DensityMatrix make_density_matrix(Matrix m) {
    if (!m.square()) throw ContractError("density matrix: not square");
    double scale = m.max_abs() > 0 ? m.max_abs() : 1.0;
    if (m.sym_error() > 1e-12 * scale) throw ContractError("density matrix: not symmetric");
    DensityMatrix rho;
    double tr = 0.0;
    for (int i = 0; i < m.rows; ++i) tr += m(i, i);
    rho.trace_error = std::abs(tr - 1.0);
    if (tr <= 0.0) throw ContractError("density matrix: non-positive trace");

    EigenSystem es = jacobi_eigensystem(m, true);
    rho.min_eigenvalue = es.values.front();
    bool fix_trace = rho.trace_error > 1e-10;
    bool fix_spectrum = rho.min_eigenvalue < -1e-8;
    if (fix_trace || fix_spectrum) {
        // clip negatives and renormalize; the raw diagnostics stay recorded
        int d = m.rows;
        std::vector<double> w(d);
        double z = 0.0;
        for (int i = 0; i < d; ++i) {
            w[i] = std::max(0.0, es.values[i]);
            z += w[i];
        }
        if (z <= 0.0) throw ContractError("density matrix: spectrum entirely non-positive");
        Matrix fixed(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) s += es.vectors(i, k) * (w[k] / z) * es.vectors(j, k);
                fixed(i, j) = fixed(j, i) = s;
            }
        rho.mat = std::move(fixed);
        rho.projected = true;
    } else {
        rho.mat = std::move(m);
    }
    return rho;
}

std::vector<double> density_spectrum_descending(const DensityMatrix& rho) {
    return descending(jacobi_eigenvalues(rho.mat));
}

DensityMatrix exact_reduced_ground_state(int m, int L, double lambda, double delta) {
    int n = 2 * m + L + 1;
    GroundState gs = ground_state_chain(n, lambda, delta);
    return reduce(gs.vector, n, site_index(m, 0), site_index(m, L));
}

DensityMatrix exact_reduced_thermal(int m, int L, double lambda, double delta, double beta) {
    int n = 2 * m + L + 1;
    Matrix h = build_hamiltonian(n, lambda, delta);
    DensityMatrix rho = thermal_density(h, beta);
    return reduce(rho, n, site_index(m, 0), site_index(m, L));
}

}  // namespace ctising
