#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctising/rc_sampler.hpp"
#include "ctising/stats.hpp"

namespace ctising {

// A linear set: vertical segments (degenerate ones are points) used as
// separators and as connectivity targets.
struct LineSegment {
    int x = 0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int side = 0;  // side designation when t_lo == t_hi sits on a cut
};

struct SeparatorGeometry {
    enum class Variant { Equator, Parallelogram };
    Variant variant = Variant::Equator;
    int k = 0;  // parallelogram half-width parameter floor(3m/7)
    std::vector<LineSegment> segments;

    // D = {(x, 0): x in [-m, 0) union (L, L+m]}: the level of the slit.
    static SeparatorGeometry equator(int m, int L);
    // Circuit around the slit made of height-2 vertical steps, k = floor(3m/7).
    static SeparatorGeometry parallelogram(int m, int L);
};

// Roots of clusters meeting a set of segments.
std::vector<int> roots_touching(const ClusterLabelling& lab, const std::vector<LineSegment>& set);
bool sets_connected(const ClusterLabelling& lab, const std::vector<LineSegment>& a,
                    const std::vector<LineSegment>& b);

struct RatioCell {
    uint32_t plus = 0, minus = 0;
    double ratio_deviation = 0.0;  // |joint/(p+ p-) - 1|
    double se = 0.0;
    double expected = 0.0;
    bool included = false;
};

struct FactorizationReport {
    int m = 0, L = 0, K = 0;
    double beta = 0.0;
    uint64_t total = 0;
    double max_ratio_deviation = 0.0;
    double max_ratio_se = 0.0;
    int included_cells = 0;
    int excluded_cells = 0;
    std::vector<RatioCell> cells;
};

// max over well-sampled trimmed slit-vector pairs of |phi(joint)/(phi+ phi-) - 1|,
// the factorization quantity across the slit with margin K.
FactorizationReport factorization_ratio(int m, int L, double beta, double lambda, double delta,
                                        uint64_t sweeps, uint64_t chains, int K, uint64_t seed);

struct FiniteEnergyRow {
    std::string epsilon;  // spin pattern on S
    int alpha = 0;
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    bool adequate = false;  // enough mass to test
    bool ok = false;        // lhs >= rhs - 3 combined SE
};

struct FiniteEnergyReport {
    double p_not_connected = 0.0;  // q=1 estimate of P(x not<-> S)
    double p_not_connected_se = 0.0;
    std::vector<FiniteEnergyRow> rows;
    bool all_ok = true;
};

// phi(sigma_S = eps, sigma_x = alpha) >= 1/2 phi(sigma_S = eps) P(x not<-> S),
// verified within 3 combined SE for every adequately sampled eps.
FiniteEnergyReport finite_energy_check(const SpaceTimeBox& box, const std::vector<Point>& s_points,
                                       const Point& x, double lambda, double delta,
                                       uint64_t sweeps, uint64_t chains, uint64_t trials,
                                       uint64_t seed);

using SlitEvent = std::function<bool(uint32_t plus_bits, uint32_t minus_bits)>;

struct BoundaryInfluenceResult {
    int m = 0, L = 0;
    double beta = 0.0;
    double phi_a = 0.0, phi_a_se = 0.0;
    double phi_eta_a = 0.0, phi_eta_a_se = 0.0;
    double deviation = 0.0;  // |phi^eta(A)/phi(A) - 1|
    double se = 0.0;
};

// Influence of the all-plus spin boundary on the side lines: the wired-at-
// boundary measure with forced labels against the plain slit-box measure.
BoundaryInfluenceResult boundary_influence(int m, int L, double beta, double lambda, double delta,
                                           const SlitEvent& event, uint64_t sweeps,
                                           uint64_t chains, uint64_t seed);

struct TQuantities {
    double t1 = 0.0, t1_se = 0.0;      // wired measure: P(Delta <-> D)
    double t2sq = 0.0, t2sq_se = 0.0;  // wired measure: P(D <-> Gamma)
    double q1_t1 = 0.0, q1_t1_se = 0.0;  // percolation comparison for t1
};

// t-quantities of the separator under the measure wired at Delta union Gamma
// (trimmed slit faces, margin K), plus the q=1 domination comparison.
TQuantities estimate_t_quantities(int m, int L, int K, double beta, double lambda, double delta,
                                  const SeparatorGeometry& sep, uint64_t sweeps, uint64_t chains,
                                  uint64_t trials, uint64_t seed);

}  // namespace ctising
