#pragma once

#include <cstdint>
#include <vector>

#include "ctising/quantum.hpp"
#include "ctising/rng.hpp"
#include "ctising/stats.hpp"

namespace ctising {

// Age-dependent branching comparison: lifetimes are sums of two Exp(delta)
// variables, children arrive at rate 2*lambda, so the family-size pgf is
// (delta / (delta - 2 lambda (s-1)))^2 with mean offspring 4 lambda / delta.
struct BranchingParams {
    double lambda = 0.0;
    double delta = 0.0;

    double mean_offspring() const { return 4.0 * lambda / delta; }
    void validate() const {
        if (!(lambda >= 0.0) || !(delta > 0.0))
            throw ContractError("branching: need lambda >= 0 and delta > 0");
    }
};

double offspring_pgf(const BranchingParams& p, double s);

// Exact offspring law: negative binomial with two failures, success weight
// q = 2 lambda / (2 lambda + delta); P(N = k) = (k+1) (1-q)^2 q^k.
double offspring_probability(const BranchingParams& p, uint64_t k);

struct BranchingSim {
    std::vector<uint64_t> progeny;   // total particles M per trial
    std::vector<double> lifetime;    // aggregate lifetime U per trial
    std::vector<uint64_t> offspring; // family sizes N encountered (all particles)
    bool truncated = false;          // a trial hit the generation cap

    double tail_progeny(double m) const;   // P(M > m)
    double tail_lifetime(double u) const;  // P(U > u)
};

constexpr uint64_t kBranchingGenerationCap = 10000;

BranchingSim simulate_branching(const BranchingParams& p, uint64_t trials, uint64_t seed);

// nu = log of the radius of convergence of the total-progeny pgf
// Phi(s) = s * G_N(Phi(s)), located by bisection on the existence of a real
// fixed point below the pole.
double progeny_tail_exponent(const BranchingParams& p);

// Exponential tail rate of the aggregate lifetime U, from the fixed point of
// Psi(t) = (delta / (delta - t - 2 lambda (Psi - 1)))^2.
double lifetime_tail_exponent(const BranchingParams& p);

// min of the two tail exponents; a certified-by-construction lower bound on
// the decay rate gamma achievable by the branching comparison.  Requires the
// comparison process subcritical (4 lambda / delta < 1).
double decay_rate_bound(double lambda, double delta);

struct EntropyBoundInputs {
    double gamma = 0.0;  // must exceed 4 ln 2 for the tail pipeline
    double alpha = 0.0;
    double C = 0.0;
    int L = 1;

    void validate() const {
        if (!(gamma > 0.0) || !(alpha > 0.0) || !(C > 0.0) || L < 1)
            throw ContractError("entropy bound: need gamma, alpha, C > 0 and L >= 1");
    }
};

struct EntropyBoundTrace {
    int K = 0;
    double c0 = 0.0;
    double xi = 0.0;
    double c0_prime = 0.0;
    double nu = 0.0;
    double s1_cap = 0.0;   // log2 nu
    double s2_bound = 0.0;
    double bound = 0.0;
    bool small_m_branch = false;  // m <= K: bound is 2m exactly
};

EntropyBoundTrace entropy_bound_pipeline(const EntropyBoundInputs& inp, int m);

struct TailCheckReport {
    int K = 0;
    int r_max = 0;
    int dim = 0;
    std::vector<double> eps;  // measured ||rho_{K+l} - rho_{K+l+1}||
    bool weyl_ok = true;
    bool case_i_ok = true;
    bool case_ii_ok = true;
    bool case_iii_ok = true;
    double worst_case_iii = 0.0;  // largest eigenvalue beyond the rank cap
    std::vector<std::vector<double>> spectra;  // descending, per m = K..K+r_max

    bool all_ok() const { return weyl_ok && case_i_ok && case_ii_ok && case_iii_ok; }
};

// Numerical verification of the eigenvalue cascade on exact reduced matrices
// for consecutive m = K..K+r; report-only.
TailCheckReport eigenvalue_tail_check(const std::vector<DensityMatrix>& rho_list, int K);

struct DecayFit {
    double gamma = 0.0;  // minus the log-slope
    double gamma_se = 0.0;
    double intercept = 0.0;
    double intercept_se = 0.0;
    double chi2 = 0.0;
    int n_used = 0;
    bool non_decaying = false;  // slope not separated from zero at 2 SE
};

struct DecayPoint {
    double x = 0.0;
    double value = 0.0;
    double se = 0.0;
};

// Weighted least squares of ln(value) against x over uncensored points
// (value > 3 se); throws when fewer than 3 survive.
DecayFit fit_decay_rate(const std::vector<DecayPoint>& points);

}  // namespace ctising
