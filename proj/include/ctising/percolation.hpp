#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctising/geometry.hpp"
#include "ctising/rng.hpp"
#include "ctising/stats.hpp"

namespace ctising {

// A sample of the continuum percolation process: per-site death times and
// per-adjacent-pair bridge times, all strictly inside (t_min, t_max) and
// strictly increasing.  Event lists are exact; there is no time grid.
struct Configuration {
    std::vector<std::vector<double>> deaths;   // index: line = x - x_min
    std::vector<std::vector<double>> bridges;  // index: pair (x, x+1), x from x_min

    uint64_t death_count() const;
    uint64_t bridge_count() const;
    bool operator==(const Configuration& o) const { return deaths == o.deaths && bridges == o.bridges; }
};

// How clusters are identified and counted on top of the free interval
// decomposition.  Periodic-family rules glue (x, t_min) to (x, t_max) per site;
// Wired merges every top/bottom point into one cluster; PeriodicWired
// additionally merges all slit-face points over [0,L].  Wired point groups
// implement spin and random-cluster boundary conditions: all clusters touching
// a group's points are counted as one and, when label != 0, carry that spin.
struct BoundaryRule {
    enum class Kind { Free, Periodic, Wired, PartiallyPeriodic, PeriodicWired };

    struct WiredGroup {
        std::vector<Point> points;
        std::vector<int> whole_lines;  // sites whose entire time-line joins the group
        int label = 0;                 // -1, +1, or 0 for an unforced common spin
    };

    Kind kind = Kind::Free;
    std::vector<WiredGroup> groups;

    static BoundaryRule free_rule() { return {Kind::Free, {}}; }
    static BoundaryRule periodic() { return {Kind::Periodic, {}}; }
    static BoundaryRule wired() { return {Kind::Wired, {}}; }
    static BoundaryRule partially_periodic() { return {Kind::PartiallyPeriodic, {}}; }
    static BoundaryRule periodic_wired() { return {Kind::PeriodicWired, {}}; }
    const char* kind_name() const;
};

struct DisjointSet {
    std::vector<int> parent;

    void reset(int n) {
        parent.resize(n);
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    bool merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a < b) parent[b] = a; else parent[a] = b;
        return true;
    }
};

struct ClusterCounts;

// The interval decomposition of a box under a configuration, with the
// disjoint-set structure carrying bridge merges and the rule's identifications.
// Intervals on a line are the maximal death-free segments between interior cuts;
// on a slit line the cut at time 0 separates the x- interval from the x+ one.
class ClusterLabelling {
  public:
    ClusterLabelling(const SpaceTimeBox& box, const Configuration& omega, const BoundaryRule& rule);

    const SpaceTimeBox& box() const { return box_; }
    const BoundaryRule& rule() const { return rule_; }

    int num_intervals() const { return total_intervals_; }
    int num_lines() const { return int(cuts_.size()); }
    int cluster_count() const { return k_; }

    // Interval ids.
    int first_interval(int line) const { return offset_[line]; }
    int last_interval(int line) const { return offset_[line] + int(cuts_[line].size()); }
    int intervals_on_line(int line) const { return int(cuts_[line].size()) + 1; }
    int line_of_interval(int iv) const;

    // Interval containing (x, t); side disambiguates exact cut positions.
    int interval_at(int x, double t, int side = 0) const;
    int interval_at(const Point& p) const { return interval_at(p.x, p.t, p.side); }

    // Slit-face intervals: x+ starts at time 0, x- ends at time 0.
    int slit_plus_interval(int x) const;
    int slit_minus_interval(int x) const;

    // Time span [lo, hi] of an interval.
    void interval_span(int iv, double& lo, double& hi) const;

    int root_of(int iv) const { return ds_.find(iv); }
    bool same_cluster(int iv1, int iv2) const { return ds_.find(iv1) == ds_.find(iv2); }

    // Whether two differently-labelled wired groups ended up connected
    // (the spin-boundary conditioning event fails on this configuration).
    bool label_conflict() const { return label_conflict_; }

    // Forced spin of a root: -1/+1 if the root touches a labelled group, else 0.
    int forced_label(int root) const;

    const std::vector<double>& cuts(int line) const { return cuts_[line]; }
    const std::vector<char>& cut_is_death(int line) const { return cut_is_death_[line]; }

  private:
    SpaceTimeBox box_;
    BoundaryRule rule_;
    std::vector<std::vector<double>> cuts_;
    std::vector<std::vector<char>> cut_is_death_;
    std::vector<int> offset_;
    mutable DisjointSet ds_;
    int total_intervals_ = 0;
    int k_ = 0;
    bool label_conflict_ = false;
    std::vector<std::pair<int, int>> root_labels_;  // (root at build time, label)

    friend ClusterCounts cluster_counts(const SpaceTimeBox&, const Configuration&);
};

struct ClusterCounts {
    int k_free = 0;
    int k_p = 0;
    int k_w = 0;
    int k_pp = 0;
    int k_pw = 0;
};

// ---- operations ----

// Independent Poisson processes: deaths with intensity delta on each line,
// bridges with intensity lambda on each adjacent pair.  Deterministic in seed.
Configuration sample_percolation(const SpaceTimeBox& box, double lambda, double delta,
                                 uint64_t seed);

// Quenched-rate variant: delta_x per line, lambda_x per pair.
Configuration sample_percolation(const SpaceTimeBox& box, const std::vector<double>& lambda_pairs,
                                 const std::vector<double>& delta_sites, uint64_t seed);

// Rejects stored times outside (t_min, t_max), non-increasing sequences, and
// deaths coincident with a bridge time on the same or an adjacent site.
void validate_configuration(const SpaceTimeBox& box, const Configuration& omega);

ClusterLabelling build_clusters(const SpaceTimeBox& box, const Configuration& omega,
                                const BoundaryRule& rule);

bool connected(const ClusterLabelling& labelling, const Point& p, const Point& q);

// All five counting rules from one interval decomposition.  On a box without a
// slit, k_pp and k_pw degenerate to k_p and k_w.
ClusterCounts cluster_counts(const SpaceTimeBox& box, const Configuration& omega);

// Monte Carlo estimate of P_{lambda,delta}(I <-> boundary of [-m,m]^2) with
// I = {0} x [-1/2, 1/2].
Estimate estimate_connectivity(double lambda, double delta, int m, uint64_t trials,
                               uint64_t seed);

// External boundary condition: number of clusters of the composite (omega, tau)
// intersecting `box`, under box's top/bottom periodic identification.  tau lives
// on an enclosing box and must be admissible off `box`.
int external_cluster_count(const SpaceTimeBox& box, const Configuration& omega,
                           const SpaceTimeBox& tau_box, const Configuration& tau);

// ---- serialization ----
// Line-oriented text format: a header with the box geometry and seed, then
// sorted `D x t` and `B x t` records printed with 17 significant digits.
void write_configuration(std::ostream& os, const SpaceTimeBox& box, const Configuration& omega,
                         uint64_t seed);
struct ParsedConfiguration {
    SpaceTimeBox box;
    Configuration omega;
    uint64_t seed = 0;
};
ParsedConfiguration read_configuration(std::istream& is);

}  // namespace ctising
