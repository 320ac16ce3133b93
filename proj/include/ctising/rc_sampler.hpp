#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ctising/percolation.hpp"

namespace ctising {

// Spins per interval of a labelling, constant on every cluster.
struct SpinConfiguration {
    std::vector<int8_t> spin;  // indexed by interval id, values -1/+1

    int at(const ClusterLabelling& lab, int x, double t, int side = 0) const {
        return spin[size_t(lab.interval_at(x, t, side))];
    }
    int slit_plus(const ClusterLabelling& lab, int x) const {
        return spin[size_t(lab.slit_plus_interval(x))];
    }
    int slit_minus(const ClusterLabelling& lab, int x) const {
        return spin[size_t(lab.slit_minus_interval(x))];
    }
    // sigma_L^+ / sigma_L^- packed as bits, site x -> bit x, +1 -> 1.
    uint32_t slit_plus_bits(const ClusterLabelling& lab) const;
    uint32_t slit_minus_bits(const ClusterLabelling& lab) const;
};

// Uniform +-1 per cluster, independent across clusters; labelled wired groups
// take their labels.  Throws if the configuration connects differently
// labelled groups (the conditioning event fails).
SpinConfiguration assign_spins(const ClusterLabelling& labelling, Rng& rng);

// Conditional percolation given the spin function: forced deaths at spin flips,
// fresh Poisson(delta) deaths everywhere, bridges Poisson(lambda) thinned to
// the set where neighbouring spins agree.
Configuration resample_given_spins(const ClusterLabelling& labelling, const SpinConfiguration& spins,
                                   double lambda, double delta, Rng& rng);

// One Markov chain for the q=2 continuum random-cluster measure on a box under
// a counting rule, advanced by the spin/percolation alternation.
class ChainState {
  public:
    ChainState(const SpaceTimeBox& box, const BoundaryRule& rule, double lambda, double delta,
               uint64_t seed);

    void sweep();
    void run(uint64_t sweeps) {
        for (uint64_t i = 0; i < sweeps; ++i) sweep();
    }

    const SpaceTimeBox& box() const { return box_; }
    const BoundaryRule& rule() const { return rule_; }
    const Configuration& config() const { return *config_; }
    const ClusterLabelling& labelling() const { return *labelling_; }
    const SpinConfiguration& spins() const { return spins_; }
    uint64_t sweep_count() const { return sweep_count_; }
    double lambda() const { return lambda_; }
    double delta() const { return delta_; }
    uint64_t init_rejections() const { return init_rejections_; }

    int cluster_count() const { return labelling_->cluster_count(); }
    uint64_t bridge_count() const { return config_->bridge_count(); }

    void save(std::ostream& os) const;
    static ChainState load(std::istream& is);

  private:
    ChainState() = default;
    void rebuild_spins_after_resample(const ClusterLabelling& old_lab,
                                      const SpinConfiguration& old_spins);

    SpaceTimeBox box_;
    BoundaryRule rule_;
    double lambda_ = 0.0, delta_ = 0.0;
    std::unique_ptr<Configuration> config_;
    std::unique_ptr<ClusterLabelling> labelling_;
    SpinConfiguration spins_;
    uint64_t sweep_count_ = 0;
    uint64_t init_rejections_ = 0;
    Rng rng_;
};

// Self-normalized importance estimate of E_phi[f] under the q^k reweighting of
// iid percolation samples.  High variance beyond tiny boxes; kept as the
// stationarity oracle.
struct ImportanceResult {
    double estimate = 0.0;
    double se = 0.0;
    double effective_samples = 0.0;
    bool unreliable = false;  // effective sample size below 10
};

ImportanceResult importance_estimate(const SpaceTimeBox& box, const BoundaryRule& rule,
                                     double lambda, double delta, double q,
                                     const std::function<double(const SpaceTimeBox&,
                                                                const Configuration&,
                                                                const ClusterLabelling&)>& f,
                                     uint64_t trials, uint64_t seed);

}  // namespace ctising
