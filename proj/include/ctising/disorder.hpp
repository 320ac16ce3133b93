#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctising/percolation.hpp"
#include "ctising/rng.hpp"
#include "ctising/stats.hpp"

namespace ctising {

// Distribution on (0, inf) for environment rates.
struct DistributionSpec {
    std::string name;  // constant | uniform | lognormal
    double p1 = 0.0;   // constant: value; uniform: lo; lognormal: mu (of log)
    double p2 = 0.0;   // uniform: hi; lognormal: sigma (of log)

    double sample(Rng& rng) const;
    bool bounded_above() const { return name == "constant" || name == "uniform"; }
    bool bounded_below_positive() const;
    double upper_bound() const;
    double lower_bound() const;
    void validate() const;
};

// A quenched environment: per-site field strengths and per-edge couplings on
// the site range [x_min, x_max] (edges (x, x+1) for x < x_max).
struct Environment {
    int x_min = 0;
    int x_max = 0;
    std::vector<double> delta_x;   // size x_max - x_min + 1
    std::vector<double> lambda_x;  // size x_max - x_min
    DistributionSpec lambda_spec, delta_spec;
    uint64_t seed = 0;
    bool bounded_ratio = false;           // condition lambda/delta <= theta-bar holds surely
    double ratio_bound = 0.0;             // sup lambda / inf delta when bounded

    int sites() const { return x_max - x_min + 1; }
    double delta_at(int x) const;
    double lambda_at(int x) const;  // edge (x, x+1)
    bool covers(int lo, int hi) const { return x_min <= lo && hi <= x_max; }
};

Environment sample_environment(const DistributionSpec& lambda_spec,
                               const DistributionSpec& delta_spec, int x_min, int x_max,
                               uint64_t seed);

void write_environment(std::ostream& os, const Environment& env);
Environment read_environment(std::istream& is);

// d_q((x,s),(y,t)) = max(|x-y|, (ln+ |s-t|)^q).
double dq_distance(int x, double s, int y, double t, double q);

struct XlResult {
    double ln_xl = 0.0;
    double xl = 0.0;
    int K = 0;
    std::vector<std::pair<int, double>> z_trace;  // (site, Z_x) over the boundary margins
};

// ln X_L = -2 sum_{x=0}^{K-1} Z_x - 2 sum_{x=L-K+1}^{L} Z_x with
// Z_x = ln(1 + (lambda_{x,x-1} + lambda_{x,x+1}) / delta_x), K = ceil(ln L).
XlResult compute_xl(const Environment& env, int L, std::optional<int> K = std::nullopt);

// Per-site localization radii measured from decay scans.  Censored sites carry
// the flag and a radius one past the scanned range.
struct DxEstimates {
    std::map<int, double> dx;
    std::map<int, bool> censored;
    double gamma = 0.0;  // decay reference used
    double q = 1.0;

    double at(int x) const;
    bool is_censored(int x) const;
    bool has(int x) const { return dx.count(x) > 0; }
};

struct EnvironmentEvents {
    bool a_l = false;
    bool b_l_rho = false;
    bool c_lm = false;
    bool d_lm = false;
    double xl = 0.0;
    double rho = 0.0;
    std::optional<int> a_witness, c_witness, d_witness;  // first violating site
};

EnvironmentEvents environment_events(const Environment& env, int L, int m, double rho,
                                     const DxEstimates& dx);

struct DecayScanRow {
    int x = 0;
    int r = 0;
    double estimate = 0.0;
    double se = 0.0;
    double reference = 0.0;  // exp(-gamma r)
};

struct DecayScanResult {
    std::vector<DecayScanRow> rows;
    DxEstimates dx;
    double time_cap = 0.0;
    bool capped = false;  // some radius hit the time cap
};

// Quenched connectivity scan: for each listed site x and radius r, the
// probability that (x, 0) reaches the boundary of the d_q ball of radius r.
// D_x is the smallest scanned r whose whole tail satisfies the exp(-gamma r)
// envelope; sites that never do are censored at r_max + 1.
DecayScanResult disordered_decay_scan(const Environment& env, const std::vector<int>& sites,
                                      const std::vector<int>& radii, double gamma, double q,
                                      uint64_t trials, uint64_t seed, double time_cap = 1000.0);

}  // namespace ctising
