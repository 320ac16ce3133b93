#include "ctising/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ctising/estimators.hpp"

namespace ctising {

SeparatorGeometry SeparatorGeometry::equator(int m, int L) {
    SeparatorGeometry g;
    g.variant = Variant::Equator;
    for (int x = -m; x < 0; ++x) g.segments.push_back({x, 0.0, 0.0, -1});
    for (int x = L + 1; x <= L + m; ++x) g.segments.push_back({x, 0.0, 0.0, -1});
    return g;
}

SeparatorGeometry SeparatorGeometry::parallelogram(int m, int L) {
    SeparatorGeometry g;
    g.variant = Variant::Parallelogram;
    g.k = (3 * m) / 7;
    int k = std::max(1, g.k);
    g.k = k;
    // upper path from (-k, 0) to (L+k, 0): vertical steps of height 2 up the
    // left flank, down the right; the lower half is the reflection
    for (int x = -k; x <= L + k; ++x) {
        double h = 2.0 * std::min(x + k, L + k - x);
        double lo = std::max(0.0, h - 2.0);
        g.segments.push_back({x, lo, h, 0});
        if (h > 0.0) g.segments.push_back({x, -h, -lo, 0});
    }
    return g;
}

std::vector<int> roots_touching(const ClusterLabelling& lab, const std::vector<LineSegment>& set) {
    std::vector<int> roots;
    for (const auto& seg : set) {
        if (seg.t_lo == seg.t_hi) {
            roots.push_back(lab.root_of(lab.interval_at(seg.x, seg.t_lo, seg.side ? seg.side : -1)));
        } else {
            int lo = lab.interval_at(seg.x, seg.t_lo, +1);
            int hi = lab.interval_at(seg.x, seg.t_hi, -1);
            for (int iv = lo; iv <= hi; ++iv) roots.push_back(lab.root_of(iv));
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

bool sets_connected(const ClusterLabelling& lab, const std::vector<LineSegment>& a,
                    const std::vector<LineSegment>& b) {
    std::vector<int> ra = roots_touching(lab, a);
    std::vector<int> rb = roots_touching(lab, b);
    std::vector<int> common;
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
    return !common.empty();
}

namespace {

uint32_t trim_bits(uint32_t bits, int K, int L) {
    // keep sites K..L-K, reindex from zero
    uint32_t out = 0;
    for (int x = K; x <= L - K; ++x)
        if (bits & (1u << x)) out |= 1u << (x - K);
    return out;
}

std::vector<Point> slit_face_points(int L, int K, int sign) {
    std::vector<Point> pts;
    for (int x = K; x <= L - K; ++x) pts.push_back({x, 0.0, sign});
    return pts;
}

}  // namespace

FactorizationReport factorization_ratio(int m, int L, double beta, double lambda, double delta,
                                        uint64_t sweeps, uint64_t chains, int K, uint64_t seed) {
    if (K < 0 || 2 * K > L) throw ContractError("factorization_ratio: need 0 <= K <= L/2");
    if (!(beta > 2.0 * m + L)) throw ContractError("factorization_ratio: beta must exceed 2m+L");
    FactorizationReport rep;
    rep.m = m;
    rep.L = L;
    rep.K = K;
    rep.beta = beta;

    int width = L - 2 * K + 1;
    int dim = 1 << width;
    std::vector<uint64_t> joint(size_t(dim) * dim, 0), plus(dim, 0), minus(dim, 0);
    int n_batches = int(chains) * kBatchesPerChain;
    std::vector<std::vector<uint64_t>> joint_b(n_batches, std::vector<uint64_t>(size_t(dim) * dim, 0));
    std::vector<std::vector<uint64_t>> plus_b(n_batches, std::vector<uint64_t>(dim, 0));
    std::vector<std::vector<uint64_t>> minus_b(n_batches, std::vector<uint64_t>(dim, 0));

    SpaceTimeBox box = SpaceTimeBox::slit_box(m, L, beta);
    for (uint64_t c = 0; c < chains; ++c) {
        ChainState chain(box, BoundaryRule::periodic(), lambda, delta, Rng::derive(seed, 0xfa, c));
        chain.run(kDefaultBurnIn);
        for (uint64_t s = 0; s < sweeps; ++s) {
            chain.sweep();
            uint32_t p = trim_bits(chain.spins().slit_plus_bits(chain.labelling()), K, L);
            uint32_t q = trim_bits(chain.spins().slit_minus_bits(chain.labelling()), K, L);
            int b = int(c) * kBatchesPerChain + int(s * kBatchesPerChain / sweeps);
            joint[size_t(p) * dim + q]++;
            plus[p]++;
            minus[q]++;
            joint_b[b][size_t(p) * dim + q]++;
            plus_b[b][p]++;
            minus_b[b][q]++;
        }
    }
    rep.total = chains * sweeps;
    std::vector<uint64_t> batch_total(n_batches, 0);
    for (int b = 0; b < n_batches; ++b)
        for (auto v : plus_b[b]) batch_total[b] += v;

    for (int p = 0; p < dim; ++p)
        for (int q = 0; q < dim; ++q) {
            RatioCell cell;
            cell.plus = uint32_t(p);
            cell.minus = uint32_t(q);
            double pp = double(plus[p]) / double(rep.total);
            double pq = double(minus[q]) / double(rep.total);
            cell.expected = pp * pq * double(rep.total);
            if (cell.expected < 25.0) {
                rep.excluded_cells++;
                rep.cells.push_back(cell);
                continue;
            }
            double j = double(joint[size_t(p) * dim + q]) / double(rep.total);
            double ratio = j / (pp * pq);
            cell.ratio_deviation = std::abs(ratio - 1.0);
            std::vector<double> loo;
            for (int b = 0; b < n_batches; ++b) {
                uint64_t bt = rep.total - batch_total[b];
                if (bt == 0) continue;
                double jj = double(joint[size_t(p) * dim + q] - joint_b[b][size_t(p) * dim + q]) / double(bt);
                double ppp = double(plus[p] - plus_b[b][p]) / double(bt);
                double pqq = double(minus[q] - minus_b[b][q]) / double(bt);
                if (ppp > 0 && pqq > 0) loo.push_back(jj / (ppp * pqq));
            }
            cell.se = jackknife_se(loo);
            cell.included = true;
            rep.included_cells++;
            if (cell.ratio_deviation > rep.max_ratio_deviation) {
                rep.max_ratio_deviation = cell.ratio_deviation;
                rep.max_ratio_se = cell.se;
            }
            rep.cells.push_back(cell);
        }
    if (rep.included_cells == 0)
        throw InsufficientDataError("factorization_ratio: every cell under-sampled");
    return rep;
}

FiniteEnergyReport finite_energy_check(const SpaceTimeBox& box, const std::vector<Point>& s_points,
                                       const Point& x, double lambda, double delta,
                                       uint64_t sweeps, uint64_t chains, uint64_t trials,
                                       uint64_t seed) {
    for (const auto& p : s_points)
        if (p.x == x.x && p.t == x.t && p.side == x.side)
            throw ContractError("finite_energy_check: x must not belong to S");
    FiniteEnergyReport rep;

    // q=1 percolation estimate of P(x not<-> S)
    uint64_t miss = 0;
    std::vector<LineSegment> xs{{x.x, x.t, x.t, x.side}};
    std::vector<LineSegment> ss;
    for (const auto& p : s_points) ss.push_back({p.x, p.t, p.t, p.side});
    for (uint64_t tr = 0; tr < trials; ++tr) {
        Configuration omega = sample_percolation(box, lambda, delta, Rng::derive(seed, 0x9, tr));
        ClusterLabelling lab(box, omega, BoundaryRule::free_rule());
        if (!sets_connected(lab, xs, ss)) ++miss;
    }
    rep.p_not_connected = s_points.empty() ? 1.0 : double(miss) / double(trials);
    rep.p_not_connected_se = binomial_se(rep.p_not_connected, trials);

    // q=2 chain tallies of (sigma_S, sigma_x)
    std::map<std::pair<std::string, int>, uint64_t> joint;
    std::map<std::string, uint64_t> marg;
    uint64_t total = 0;
    BoundaryRule rule = box.time_identified ? BoundaryRule::periodic() : BoundaryRule::free_rule();
    for (uint64_t c = 0; c < chains; ++c) {
        ChainState chain(box, rule, lambda, delta, Rng::derive(seed, 0x8, c));
        chain.run(kDefaultBurnIn);
        for (uint64_t s = 0; s < sweeps; ++s) {
            chain.sweep();
            std::string eps;
            for (const auto& p : s_points)
                eps += chain.spins().at(chain.labelling(), p.x, p.t, p.side) > 0 ? '+' : '-';
            int alpha = chain.spins().at(chain.labelling(), x.x, x.t, x.side);
            joint[{eps, alpha}]++;
            marg[eps]++;
            ++total;
        }
    }
    for (const auto& [eps, count] : marg) {
        for (int alpha : {-1, +1}) {
            FiniteEnergyRow row;
            row.epsilon = eps;
            row.alpha = alpha;
            auto it = joint.find({eps, alpha});
            uint64_t jc = it == joint.end() ? 0 : it->second;
            row.lhs = double(jc) / double(total);
            row.lhs_se = binomial_se(row.lhs, total);
            double pm = double(count) / double(total);
            double pm_se = binomial_se(pm, total);
            row.rhs = 0.5 * pm * rep.p_not_connected;
            row.rhs_se = 0.5 * std::sqrt(pm * pm * rep.p_not_connected_se * rep.p_not_connected_se +
                                         rep.p_not_connected * rep.p_not_connected * pm_se * pm_se);
            row.adequate = count >= 25;
            double combined = std::sqrt(row.lhs_se * row.lhs_se + row.rhs_se * row.rhs_se);
            row.ok = !row.adequate || row.lhs >= row.rhs - 3.0 * combined;
            if (row.adequate && !row.ok) rep.all_ok = false;
            rep.rows.push_back(row);
        }
    }
    return rep;
}

namespace {

struct EventTally {
    uint64_t hits = 0;
    uint64_t total = 0;
    std::vector<uint64_t> batch_hits, batch_total;
};

EventTally run_event_chain(const SpaceTimeBox& box, const BoundaryRule& rule, double lambda,
                           double delta, const SlitEvent& event, uint64_t sweeps, uint64_t chains,
                           uint64_t seed) {
    EventTally t;
    int n_batches = int(chains) * kBatchesPerChain;
    t.batch_hits.assign(n_batches, 0);
    t.batch_total.assign(n_batches, 0);
    for (uint64_t c = 0; c < chains; ++c) {
        ChainState chain(box, rule, lambda, delta, Rng::derive(seed, c));
        chain.run(kDefaultBurnIn);
        for (uint64_t s = 0; s < sweeps; ++s) {
            chain.sweep();
            uint32_t p = chain.spins().slit_plus_bits(chain.labelling());
            uint32_t q = chain.spins().slit_minus_bits(chain.labelling());
            int b = int(c) * kBatchesPerChain + int(s * kBatchesPerChain / sweeps);
            bool in = event(p, q);
            t.hits += in;
            t.batch_hits[b] += in;
            t.batch_total[b]++;
            t.total++;
        }
    }
    return t;
}

Estimate tally_estimate(const EventTally& t) {
    std::vector<double> loo;
    for (size_t b = 0; b < t.batch_hits.size(); ++b) {
        uint64_t h = t.hits - t.batch_hits[b];
        uint64_t n = t.total - t.batch_total[b];
        if (n > 0) loo.push_back(double(h) / double(n));
    }
    return {double(t.hits) / double(t.total), jackknife_se(loo)};
}

}  // namespace

BoundaryInfluenceResult boundary_influence(int m, int L, double beta, double lambda, double delta,
                                           const SlitEvent& event, uint64_t sweeps,
                                           uint64_t chains, uint64_t seed) {
    if (!(beta >= 4.0 * (m + L + 1)))
        throw ContractError("boundary_influence: beta must be >= 4(m+L+1)");
    SpaceTimeBox box = SpaceTimeBox::slit_box(m, L, beta);

    BoundaryInfluenceResult res;
    res.m = m;
    res.L = L;
    res.beta = beta;

    EventTally plain = run_event_chain(box, BoundaryRule::periodic(), lambda, delta, event, sweeps,
                                       chains, Rng::derive(seed, 0x1));
    BoundaryRule eta = BoundaryRule::periodic();
    BoundaryRule::WiredGroup g;
    g.whole_lines = {box.x_min, box.x_max};
    g.label = +1;
    eta.groups.push_back(g);
    EventTally forced = run_event_chain(box, eta, lambda, delta, event, sweeps, chains,
                                        Rng::derive(seed, 0x2));

    Estimate ea = tally_estimate(plain);
    Estimate eb = tally_estimate(forced);
    if (ea.value <= 0.0 || ea.value < 5.0 * ea.se)
        throw InsufficientDataError("boundary_influence: event too rare under the plain measure");
    res.phi_a = ea.value;
    res.phi_a_se = ea.se;
    res.phi_eta_a = eb.value;
    res.phi_eta_a_se = eb.se;
    res.deviation = std::abs(eb.value / ea.value - 1.0);
    res.se = ratio_se(eb.value, eb.se, ea.value, ea.se);
    return res;
}

TQuantities estimate_t_quantities(int m, int L, int K, double beta, double lambda, double delta,
                                  const SeparatorGeometry& sep, uint64_t sweeps, uint64_t chains,
                                  uint64_t trials, uint64_t seed) {
    if (K < 0 || 2 * K > L) throw ContractError("estimate_t_quantities: need 0 <= K <= L/2");
    SpaceTimeBox box = SpaceTimeBox::slit_box(m, L, beta);

    std::vector<Point> delta_pts = slit_face_points(L, K, +1);
    std::vector<Point> gamma_pts = slit_face_points(L, K, -1);
    std::vector<LineSegment> delta_set, gamma_set;
    for (const auto& p : delta_pts) delta_set.push_back({p.x, 0.0, 0.0, +1});
    for (const auto& p : gamma_pts) gamma_set.push_back({p.x, 0.0, 0.0, -1});

    BoundaryRule wired = BoundaryRule::periodic();
    BoundaryRule::WiredGroup g;
    g.points = delta_pts;
    g.points.insert(g.points.end(), gamma_pts.begin(), gamma_pts.end());
    g.label = 0;
    wired.groups.push_back(g);

    EventTally t1_tally, t2_tally;
    int n_batches = int(chains) * kBatchesPerChain;
    t1_tally.batch_hits.assign(n_batches, 0);
    t1_tally.batch_total.assign(n_batches, 0);
    t2_tally = t1_tally;
    for (uint64_t c = 0; c < chains; ++c) {
        ChainState chain(box, wired, lambda, delta, Rng::derive(seed, 0x71, c));
        chain.run(kDefaultBurnIn);
        for (uint64_t s = 0; s < sweeps; ++s) {
            chain.sweep();
            int b = int(c) * kBatchesPerChain + int(s * kBatchesPerChain / sweeps);
            bool c1 = sets_connected(chain.labelling(), delta_set, sep.segments);
            bool c2 = sets_connected(chain.labelling(), sep.segments, gamma_set);
            t1_tally.hits += c1;
            t1_tally.batch_hits[b] += c1;
            t1_tally.batch_total[b]++;
            t1_tally.total++;
            t2_tally.hits += c2;
            t2_tally.batch_hits[b] += c2;
            t2_tally.batch_total[b]++;
            t2_tally.total++;
        }
    }
    TQuantities out;
    Estimate e1 = tally_estimate(t1_tally);
    Estimate e2 = tally_estimate(t2_tally);
    out.t1 = e1.value;
    out.t1_se = e1.se;
    out.t2sq = e2.value;
    out.t2sq_se = e2.se;

    uint64_t hits = 0;
    for (uint64_t tr = 0; tr < trials; ++tr) {
        Configuration omega = sample_percolation(box, lambda, delta, Rng::derive(seed, 0x72, tr));
        ClusterLabelling lab(box, omega, BoundaryRule::periodic());
        if (sets_connected(lab, delta_set, sep.segments)) ++hits;
    }
    out.q1_t1 = double(hits) / double(trials);
    out.q1_t1_se = binomial_se(out.q1_t1, trials);
    return out;
}

}  // namespace ctising
