#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctising/bounds.hpp"
#include "ctising/disorder.hpp"
#include "ctising/estimators.hpp"
#include "ctising/mixing.hpp"

namespace ctising {

// Batch experiment drivers behind the CLI subcommands.  Every run writes its
// CSV artifacts plus a JSON provenance sidecar (parameters, seeds, build id);
// CSV bodies are deterministic functions of the configuration.

struct DecayScanConfig {
    double lambda = 0.25;
    double delta = 1.0;
    std::vector<int> m_list{2, 3, 4, 5, 6, 7, 8};
    uint64_t trials = 200000;
    uint64_t seed = 1;
    std::string out_dir = ".";
};
struct DecayScanOutcome {
    std::vector<Estimate> estimates;
    std::optional<DecayFit> fit;
    std::optional<double> gamma_lower;  // absent when the certificate degenerates
};
DecayScanOutcome run_decay_scan(const DecayScanConfig& cfg);

struct RdmConfig {
    int m = 1;
    int L = 0;
    double lambda = 1.0;
    double delta = 1.0;
    double beta = 6.0;
    uint64_t sweeps = 100000;
    uint64_t chains = 8;
    uint64_t seed = 7;
    uint64_t burn_in = kDefaultBurnIn;
    std::string out_dir = ".";
};
struct RdmOutcome {
    RdmEstimate estimate;
    std::optional<DensityMatrix> oracle;  // present when n fits the dense guard
    double max_abs_z = 0.0;               // worst entrywise |dev|/SE against the oracle
};
RdmOutcome run_rdm(const RdmConfig& cfg);

struct NormDecayConfig {
    double theta = 0.25;
    int L = 1;
    std::vector<int> m_list{1, 2, 3, 4, 5};
    uint64_t sweeps_per_chain = 125000;
    uint64_t chains = 8;
    uint64_t seed = 11;
    uint64_t burn_in = kDefaultBurnIn;
    std::string out_dir = ".";
};
NormDecayTable run_norm_decay(const NormDecayConfig& cfg);

struct EntropyScanConfig {
    double theta = 0.25;
    std::vector<int> L_list{1, 2, 3, 4};
    int m_offset = 0;  // m = L + offset
    uint64_t sweeps_per_chain = 40000;
    uint64_t chains = 4;
    uint64_t seed = 13;
    uint64_t burn_in = kDefaultBurnIn;
    std::optional<EntropyBoundParams> bound;
    int exact_cap = 12;
    std::string out_dir = ".";
};
std::vector<EntropyScalingRow> run_entropy_scan(const EntropyScanConfig& cfg);

struct MixingConfig {
    double lambda = 0.25;
    double delta = 1.0;
    int L = 4;
    int m = 2;
    std::vector<int> K_list{1, 2};
    std::vector<int> m_list{2, 4, 6};  // boundary-influence scan
    uint64_t sweeps = 200000;
    uint64_t chains = 4;
    uint64_t seed = 17;
    std::string out_dir = ".";
};
struct MixingOutcome {
    std::vector<FactorizationReport> factorization;  // per K
    std::vector<BoundaryInfluenceResult> influence;  // per m
    TQuantities t_quantities;
};
MixingOutcome run_mixing_check(const MixingConfig& cfg);

struct BranchingConfig {
    double lambda = 1.0;
    std::vector<double> delta_list{8.0, 16.0, 32.0};
    uint64_t trials = 20000;
    uint64_t seed = 19;
    std::string out_dir = ".";
};
struct BranchingRow {
    double lambda = 0.0, delta = 0.0, mbar = 0.0;
    double nu_hat = 0.0;      // bisection exponent
    double nu_sim = 0.0;      // simulated tail slope
    double gamma_lower = 0.0;
};
std::vector<BranchingRow> run_branching(const BranchingConfig& cfg);

struct DisorderScanConfig {
    DistributionSpec lambda_spec{"uniform", 0.02, 0.2, };
    DistributionSpec delta_spec{"uniform", 0.9, 1.1};
    std::vector<int> L_list{8, 14};
    int m = 4;
    double rho = 2.0;
    int environments = 20;
    std::vector<int> radii{1, 2, 3};
    double gamma = 1.1;
    double q = 1.0;
    uint64_t trials = 300;
    uint64_t seed = 23;
    std::string out_dir = ".";
};
struct DisorderScanOutcome {
    // per L: empirical frequency of A_L over the sampled environments
    std::vector<std::pair<int, double>> a_frequency;
};
DisorderScanOutcome run_disorder_scan(const DisorderScanConfig& cfg);

struct EntropyBoundConfig {
    double gamma = 3.0;
    double alpha = 1.0;
    double C = 1.0;
    std::vector<int> L_list{8, 64, 512};
    int m = 10;
    std::string out_dir = ".";
};
void run_entropy_bound(const EntropyBoundConfig& cfg);

struct OracleConfig {
    int m = 1;
    int L = 1;
    double theta = 0.5;
    std::optional<double> beta;  // absent: ground state
    std::string out_dir = ".";
};
struct OracleOutcome {
    DensityMatrix rho;
    double entropy = 0.0;
    std::vector<double> spectrum;
};
OracleOutcome run_oracle(const OracleConfig& cfg);

// Exact norm-decay grid fit: ln||rho_m - rho_ref|| ~ ln C + alpha ln L - gamma m
// over dense-oracle points; the fitted constants feed the entropy bound.
struct ExactDecayFit {
    double gamma = 0.0, gamma_se = 0.0;
    double alpha = 0.0;
    double lnC = 0.0;
    std::vector<std::tuple<int, int, double>> points;  // (L, m, norm)
};
ExactDecayFit fit_exact_decay_constants(double theta, const std::vector<int>& L_list,
                                        const std::vector<int>& m_list, int m_ref_extra = 1);

void write_provenance(const std::string& path, const std::string& command,
                      const std::string& params_json);

std::string git_build_id();

}  // namespace ctising
