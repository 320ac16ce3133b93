#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctising/quantum.hpp"
#include "ctising/rc_sampler.hpp"
#include "ctising/stats.hpp"

namespace ctising {

// Tallies of the slit readout pairs (sigma_L^+, sigma_L^-) over retained sweeps.
// Cell index: plus * dim + minus with dim = 2^{L+1}; site x maps to bit x.
struct SlitHistogram {
    int m = 0;
    int L = 0;
    double beta = 0.0, lambda = 0.0, delta = 0.0;
    uint64_t chains = 0, sweeps_per_chain = 0, burn_in = 0, seed = 0;
    bool regime_warning = false;  // beta <= 2m + L

    int dim = 0;
    uint64_t total = 0;
    std::vector<uint64_t> counts;                      // dim*dim
    std::vector<std::vector<uint64_t>> batch_counts;   // per batch, dim*dim
    std::vector<uint64_t> back_connection;             // per slit site: x+ <-> x- sweeps
    uint64_t init_rejections = 0;

    uint64_t count(uint32_t plus, uint32_t minus) const {
        return counts[size_t(plus) * dim + minus];
    }
    double diagonal_mass() const;
};

constexpr int kHistogramMaxL = 4;
constexpr uint64_t kDefaultBurnIn = 1000;
constexpr int kBatchesPerChain = 16;

SlitHistogram estimate_slit_histogram(int m, int L, double beta, double lambda, double delta,
                                      uint64_t sweeps_per_chain, uint64_t chains, uint64_t seed,
                                      uint64_t burn_in = kDefaultBurnIn);

// Normalizer a_{m,beta} = diagonal mass of the histogram, with binomial SE.
Estimate estimate_a(const SlitHistogram& h);

struct RdmEstimate {
    DensityMatrix rho;                    // symmetrized and validated (projected if needed)
    Matrix raw;                           // symmetrized estimate before projection
    Matrix entry_se;                      // per-entry jackknife standard errors
    Estimate a_hat;
    std::vector<double> raw_spectrum;      // descending, before projection
    std::vector<double> projected_spectrum;
    double entropy = 0.0;                  // bits, of the validated matrix
    double entropy_se = 0.0;               // jackknife over batches
    int m = 0, L = 0;
    double beta = 0.0, lambda = 0.0, delta = 0.0;
};

RdmEstimate rdm_from_histogram(const SlitHistogram& h);

// Aggregate noise scale for an operator-norm difference of two independent
// estimates: the root of the summed entry variances.
double combined_norm_se(const RdmEstimate& a, const RdmEstimate& b);

struct BetaLevel {
    double beta = 0.0;
    double distance_to_previous = 0.0;
    double combined_se = 0.0;
    bool converged = false;
};

struct BetaExtrapolation {
    RdmEstimate final;
    bool converged = false;
    std::vector<BetaLevel> trace;
};

BetaExtrapolation beta_extrapolate(int m, int L, double lambda, double delta,
                                   const std::vector<double>& beta_schedule, double tol,
                                   uint64_t sweeps_per_chain, uint64_t chains, uint64_t seed,
                                   uint64_t burn_in = kDefaultBurnIn);

// Default inverse-temperature rule: the conditioning regime floor together with
// a spectral-convergence floor from a gap proxy.
double default_beta(int m, int L, double lambda, double delta);

struct NormDecayRow {
    int m = 0;
    double beta = 0.0;
    double norm = 0.0;
    double se = 0.0;
    bool censored = false;  // value within 3 SE of zero
};

struct NormDecayTable {
    double theta = 0.0;
    int L = 0;
    int n_ref = 0;
    std::vector<NormDecayRow> rows;
};

NormDecayTable norm_decay_experiment(double theta, int L, const std::vector<int>& m_list,
                                     uint64_t sweeps_per_chain, uint64_t chains, uint64_t seed,
                                     uint64_t burn_in = kDefaultBurnIn);

struct EntropyScalingRow {
    int L = 0;
    int m = 0;
    double beta = 0.0;
    std::optional<double> s_mc;
    double s_mc_se = 0.0;
    std::optional<double> s_exact;
    std::optional<double> bound;
};

struct EntropyBoundParams {
    double gamma = 0.0, alpha = 0.0, C = 0.0;
};

std::vector<EntropyScalingRow> entropy_scaling_experiment(
    double theta, const std::vector<int>& L_list, int m_equals_L_plus, uint64_t sweeps_per_chain,
    uint64_t chains, uint64_t seed, std::optional<EntropyBoundParams> bound_params,
    int exact_spin_cap = 12, uint64_t burn_in = kDefaultBurnIn);

}  // namespace ctising
