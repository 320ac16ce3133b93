#pragma once

#include <cstdint>
#include <vector>

#include "ctising/linalg.hpp"

namespace ctising {

// Dense exact quantum computations for small transverse-field Ising chains.
// Basis convention: product sigma^3 basis; site i occupies bit (n-1-i) of the
// basis index, so site 0 is the most significant bit.  Chain sites -m..m+L of
// the experiments map to internal sites 0..n-1 via site_index (block [0,L] at
// offset m).

inline int site_index(int m, int paper_site) { return paper_site + m; }

constexpr int kMaxSpins = 14;  // dense-size guard

struct DensityMatrix {
    Matrix mat;
    double trace_error = 0.0;  // |tr - 1| before normalization fixes
    double min_eigenvalue = 0.0;
    bool projected = false;  // negative eigenvalues clipped and trace renormalized

    int dim() const { return mat.rows; }
};

// H = -1/2 sum lambda_{x,x+1} s3_x s3_{x+1} - sum delta_x s1_x, free boundary.
Matrix build_hamiltonian(int n, const std::vector<double>& lambda_edges,
                         const std::vector<double>& delta_sites);
Matrix build_hamiltonian(int n, double lambda, double delta);

struct GroundState {
    double energy = 0.0;
    std::vector<double> vector;
    double gap = 0.0;  // to the next eigenvalue (exact for small dims, Ritz beyond)
    double residual = 0.0;
};

GroundState ground_state(const Matrix& h);

// Matrix-free ground state; only the state vector is materialized, so chains up
// to the n = 14 guard stay cheap.
GroundState ground_state_chain(int n, const std::vector<double>& lambda_edges,
                               const std::vector<double>& delta_sites, uint64_t seed = 0x9e37);
GroundState ground_state_chain(int n, double lambda, double delta, uint64_t seed = 0x9e37);

// exp(-beta H)/tr via full eigendecomposition with max-eigenvalue shift.
DensityMatrix thermal_density(const Matrix& h, double beta);

// Partial trace onto contiguous internal sites [keep_lo, keep_hi].
DensityMatrix reduce(const DensityMatrix& rho, int n, int keep_lo, int keep_hi);
DensityMatrix reduce(const std::vector<double>& psi, int n, int keep_lo, int keep_hi);

// Coefficient-matrix reshape of a pure state with the kept block moved in front:
// rows indexed by the kept sites, columns by the environment.
Matrix coefficient_matrix(const std::vector<double>& psi, int n, int keep_lo, int keep_hi);

// Singular values (descending) of the bipartition split left_dim x right_dim.
std::vector<double> schmidt_values(const std::vector<double>& psi, int left_dim, int right_dim);
// Same for a middle block [keep_lo, keep_hi].
std::vector<double> schmidt_values_block(const std::vector<double>& psi, int n, int keep_lo,
                                         int keep_hi);

// Von Neumann entropy in bits; eigenvalues below 1e-15 contribute zero.
double entropy_bits(const DensityMatrix& rho);
double entropy_bits(const std::vector<double>& spectrum);

// Operator norm of A - B for symmetric A, B: the largest |eigenvalue|.
double op_norm_diff(const Matrix& a, const Matrix& b);
inline double op_norm_diff(const DensityMatrix& a, const DensityMatrix& b) {
    return op_norm_diff(a.mat, b.mat);
}

// max_j |lambda_j_desc(A) - lambda_j_desc(B)|; never exceeds op_norm_diff.
double weyl_gap(const Matrix& a, const Matrix& b);

// Validation: symmetry, trace within 1e-10 of one, eigenvalues >= -1e-8 (else
// clip-and-renormalize, recording the projection).
DensityMatrix make_density_matrix(Matrix m);

std::vector<double> density_spectrum_descending(const DensityMatrix& rho);

// Exact reduced ground-state density matrix of the chain on sites -m..m+L for
// the block [0,L]; the workhorse oracle of the experiments.
DensityMatrix exact_reduced_ground_state(int m, int L, double lambda, double delta);
// Same at finite beta (dense path; n is limited by the Jacobi budget).
DensityMatrix exact_reduced_thermal(int m, int L, double lambda, double delta, double beta);

}  // namespace ctising
