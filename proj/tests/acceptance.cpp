// Acceptance suite: one criterion per --criterion N (1..10), each printing a
// single PASS/FAIL line plus supporting detail.  Exit status is the number of
// failed criteria among those run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ctising/bounds.hpp"
#include "ctising/estimators.hpp"
#include "ctising/experiments.hpp"
#include "ctising/mixing.hpp"
#include "ctising/quantum.hpp"

using namespace ctising;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int failures = 0;

void verdict(int crit, bool ok, const std::string& what) {
    printf("CRITERION %d %s: %s\n", crit, ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
    fflush(stdout);
}

void detail(const std::string& line) {
    printf("    %s\n", line.c_str());
    fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
// MC-vs-oracle RDM at (m=1, L=0, beta=6) for theta in {0.25, 0.5, 1.0):
// every entry within 3 combined SE, entropy within 3 SE, under 2 minutes per
// parameter point on one core.
void criterion_1() {
    bool ok = true;
    for (double theta : {0.25, 0.5, 1.0}) {
        Timer timer;
        SlitHistogram h = estimate_slit_histogram(1, 0, 6.0, theta, 1.0, 100000, 8,
                                                  0xACC1 + uint64_t(theta * 100));
        RdmEstimate est = rdm_from_histogram(h);
        DensityMatrix oracle = exact_reduced_thermal(1, 0, theta, 1.0, 6.0);
        double worst_z = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double se = est.entry_se(i, j);
                if (se <= 0) se = 1e-12;
                worst_z = std::max(worst_z, std::abs(est.raw(i, j) - oracle.mat(i, j)) / se);
            }
        double s_oracle = entropy_bits(oracle);
        double s_z = std::abs(est.entropy - s_oracle) / std::max(est.entropy_se, 1e-9);
        double secs = timer.seconds();
        bool point_ok = worst_z <= 3.0 && s_z <= 3.0 && secs < 120.0;
        detail(fmt("theta=%.2f: worst entry z=%.2f, entropy z=%.2f (S_mc=%.5f S=%.5f), %.1fs",
                   theta, worst_z, s_z, est.entropy, s_oracle, secs));
        ok = ok && point_ok;
    }
    verdict(1, ok, "MC reduced density matrix matches the dense thermal oracle at 3 SE");
}

// ---------------------------------------------------------------- criterion 2
// beta-extrapolation reaches the ground-state reduced matrix once
// beta * gap >= 40.
void criterion_2() {
    bool ok = true;
    std::vector<double> schedule{6.0, 12.0, 24.0, 48.0};
    for (double theta : {0.25, 0.5, 1.0}) {
        GroundState gs = ground_state_chain(3, theta, 1.0);
        DensityMatrix target = exact_reduced_ground_state(1, 0, theta, 1.0);
        BetaExtrapolation ex =
            beta_extrapolate(1, 0, theta, 1.0, schedule, 0.0, 50000, 8, 0xACC2);
        // the level that first satisfies beta * gap >= 40
        double beta_needed = 40.0 / gs.gap;
        SlitHistogram h = estimate_slit_histogram(
            1, 0, *std::find_if(schedule.begin(), schedule.end(),
                                [&](double b) { return b >= beta_needed; }),
            theta, 1.0, 100000, 8, 0xACC2 + 7);
        RdmEstimate at_level = rdm_from_histogram(h);
        double worst_z = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                worst_z = std::max(worst_z, std::abs(at_level.raw(i, j) - target.mat(i, j)) /
                                                std::max(at_level.entry_se(i, j), 1e-12));
        bool point_ok = worst_z <= 3.0 && ex.converged;
        detail(fmt("theta=%.2f: gap=%.3f, beta used=%.1f, worst z=%.2f, cauchy converged=%d "
                   "(levels used: %zu)",
                   theta, gs.gap, at_level.beta, worst_z, int(ex.converged), ex.trace.size()));
        ok = ok && point_ok;
    }
    verdict(2, ok, "beta extrapolation agrees with the ground-state oracle at 3 SE");
}

// ---------------------------------------------------------------- criterion 3
// Norm decay at theta=0.25, L=1, m in 1..5 with at least 1e6 sweeps per m.
// Run faithfully as stated.  The exact oracle shows gamma(0.25) ~ 4.7, so the
// true differences (~1e-5 at m=1) sit far below the Monte Carlo noise floor at
// this sweep budget; the decrease and slope clauses are expected to fail and
// the suite reports that honestly alongside the exact-oracle context.
void criterion_3() {
    NormDecayConfig cfg;
    cfg.theta = 0.25;
    cfg.L = 1;
    cfg.m_list = {1, 2, 3, 4, 5};
    cfg.sweeps_per_chain = 125000;  // x8 chains = 1e6 per m
    cfg.chains = 8;
    cfg.seed = 0xACC3;
    cfg.out_dir = "acceptance_out/norm_decay";
    NormDecayTable t = run_norm_decay(cfg);

    bool all_below_two = true;
    for (const auto& r : t.rows) {
        all_below_two = all_below_two && r.norm <= 2.0;
        detail(fmt("m=%d beta=%.1f ||rho_m - rho_5|| = %.3e (se %.1e)%s", r.m, r.beta, r.norm,
                   r.se, r.censored ? " censored" : ""));
    }

    // strictly decreasing beyond noise: a significant net decrease and no
    // significant increase between consecutive uncensored rows
    std::vector<const NormDecayRow*> unc;
    for (const auto& r : t.rows)
        if (!r.censored && r.m != t.n_ref) unc.push_back(&r);
    bool decreasing = unc.size() >= 2;
    if (decreasing) {
        for (size_t i = 0; i + 1 < unc.size(); ++i) {
            double joint = std::sqrt(unc[i]->se * unc[i]->se + unc[i + 1]->se * unc[i + 1]->se);
            if (unc[i + 1]->norm > unc[i]->norm + 3.0 * joint) decreasing = false;
        }
        double joint_ends =
            std::sqrt(unc.front()->se * unc.front()->se + unc.back()->se * unc.back()->se);
        if (!(unc.front()->norm - unc.back()->norm > 3.0 * joint_ends)) decreasing = false;
    } else {
        decreasing = false;
    }

    bool slope_ok = false;
    try {
        std::vector<DecayPoint> pts;
        for (const auto& r : t.rows)
            if (r.m != t.n_ref) pts.push_back({double(r.m), r.norm, r.se});
        DecayFit fit = fit_decay_rate(pts);
        slope_ok = fit.gamma > 0 && fit.gamma > 2.0 * fit.gamma_se;
        detail(fmt("MC fit: gamma = %.3f +- %.3f over %d uncensored points", fit.gamma,
                   fit.gamma_se, fit.n_used));
    } catch (const InsufficientDataError& e) {
        detail(fmt("MC fit unavailable: %s", e.what()));
    }

    // exact-oracle context for the same geometry
    DensityMatrix ref = exact_reduced_ground_state(5, 1, 0.25, 1.0);
    std::vector<DecayPoint> exact_pts;
    for (int m = 1; m <= 4; ++m) {
        double nrm = op_norm_diff(exact_reduced_ground_state(m, 1, 0.25, 1.0), ref);
        exact_pts.push_back({double(m), nrm, 1e-12 * nrm + 1e-300});
        detail(fmt("exact oracle: m=%d ||rho_m - rho_5|| = %.3e", m, nrm));
    }
    DecayFit exact_fit = fit_decay_rate(exact_pts);
    detail(fmt("exact oracle fit: gamma = %.3f (the paper's decay holds; the MC noise floor "
               "~%.0e hides it at 1e6 sweeps)",
               exact_fit.gamma, t.rows.front().se));

    verdict(3, all_below_two && decreasing && slope_ok,
            "MC norm-decay sequence decreasing beyond noise with a positive fitted slope "
            "(expected to fail at desk scale; see the detail lines and the notes ledger)");
}

// ---------------------------------------------------------------- criterion 4
// Percolation decay scans against the branching certificate.
void criterion_4() {
    Timer timer;
    bool ok = true;

    DecayScanConfig part_a;
    part_a.lambda = 0.25;
    part_a.delta = 1.0;
    part_a.m_list = {2, 3, 4, 5, 6, 7, 8};
    part_a.trials = 300000;
    part_a.seed = 0xACC4;
    part_a.out_dir = "acceptance_out/decay_scan";
    DecayScanOutcome a = run_decay_scan(part_a);
    if (!a.fit) {
        detail("part A: fit unavailable");
        ok = false;
    } else {
        // the branching certificate degenerates exactly at mbar = 1: the
        // certified lower bound is the trivial zero (ledger entry)
        double gamma_lower = a.gamma_lower.value_or(0.0);
        bool pos = a.fit->gamma > 0 && a.fit->gamma > 2.0 * a.fit->gamma_se;
        bool above = a.fit->gamma >= gamma_lower - 2.0 * a.fit->gamma_se;
        detail(fmt("lambda=0.25 delta=1: gamma_hat=%.3f +- %.3f, certificate=%.3f%s", a.fit->gamma,
                   a.fit->gamma_se, gamma_lower,
                   a.gamma_lower ? "" : " (degenerate at mbar=1, trivial bound 0)"));
        ok = ok && pos && above;
    }

    double prev_gamma = 0.0;
    for (double delta : {8.0, 16.0, 32.0}) {
        DecayScanConfig c;
        c.lambda = 1.0;
        c.delta = delta;
        c.m_list = {1, 2, 3};
        c.trials = delta >= 32.0 ? 600000 : (delta >= 16.0 ? 300000 : 150000);
        c.seed = 0xACC4 + uint64_t(delta);
        c.out_dir = "acceptance_out/decay_scan_d" + std::to_string(int(delta));
        DecayScanOutcome r = run_decay_scan(c);
        if (!r.fit) {
            detail(fmt("delta=%.0f: fit unavailable", delta));
            ok = false;
            continue;
        }
        double bound = r.gamma_lower.value_or(0.0);
        detail(fmt("lambda=1 delta=%.0f: gamma_hat=%.3f +- %.3f, certificate=%.3f", delta,
                   r.fit->gamma, r.fit->gamma_se, bound));
        ok = ok && r.fit->gamma > prev_gamma && r.fit->gamma >= bound - 2.0 * r.fit->gamma_se;
        prev_gamma = r.fit->gamma;
    }
    double secs = timer.seconds();
    detail(fmt("total runtime %.1fs (target < 300s)", secs));
    verdict(4, ok && secs < 300.0,
            "connectivity decay rates are positive, certificate-consistent, and grow with delta");
}

// ---------------------------------------------------------------- criterion 5
// The entropy-bound pipeline against exact chains.
void criterion_5() {
    bool ok = true;

    // (a) eigenvalue cascade at theta=0.25, L=2, K=1, r <= 2 (n <= 9)
    int K = 1, L = 2;
    std::vector<DensityMatrix> rhos;
    for (int r = 0; r <= 2; ++r) rhos.push_back(exact_reduced_ground_state(K + r, L, 0.25, 1.0));
    TailCheckReport rep = eigenvalue_tail_check(rhos, K);
    detail(fmt("cascade: weyl=%d case_i=%d case_ii=%d case_iii=%d (worst beyond-rank %.1e)",
               int(rep.weyl_ok), int(rep.case_i_ok), int(rep.case_ii_ok), int(rep.case_iii_ok),
               rep.worst_case_iii));
    ok = ok && rep.all_ok() && rep.worst_case_iii <= 1e-12;

    // (b) the m <= K branch returns 2m exactly
    EntropyBoundInputs synth{3.0, 1.0, std::exp(9.0), 1};
    for (int m = 0; m <= 3; ++m) {
        EntropyBoundTrace tr = entropy_bound_pipeline(synth, m);
        ok = ok && tr.small_m_branch && tr.bound == 2.0 * m;
    }
    detail("pipeline small-m branch returns 2m exactly on a synthetic K=3 input");

    // (c) fitted constants from the exact decay grid feed the pipeline, which
    // must dominate the measured entropies
    ExactDecayFit fit = fit_exact_decay_constants(0.25, {1, 2, 3}, {1, 2, 3});
    detail(fmt("fitted constants at theta=0.25: gamma=%.3f (se %.3f), alpha=%.3f, lnC=%.3f",
               fit.gamma, fit.gamma_se, fit.alpha, fit.lnC));
    if (!(fit.gamma > 4.0 * std::log(2.0))) {
        detail("fitted gamma at or below 4 ln 2: pipeline inapplicable");
        ok = false;
    } else {
        EntropyBoundParams params{fit.gamma, std::abs(fit.alpha) + 1e-6, std::exp(fit.lnC)};
        for (int Lt : {1, 2, 3}) {
            for (int m = 1; m <= 3; ++m) {
                DensityMatrix rho = exact_reduced_ground_state(m, Lt, 0.25, 1.0);
                double s = entropy_bits(rho);
                EntropyBoundInputs inp{params.gamma, params.alpha, params.C, Lt};
                EntropyBoundTrace tr = entropy_bound_pipeline(inp, m);
                if (m <= tr.K && tr.bound != 2.0 * m) ok = false;
                if (tr.bound < s) {
                    detail(fmt("bound violated at L=%d m=%d: bound=%.4f S=%.4f", Lt, m, tr.bound, s));
                    ok = false;
                }
            }
        }
        detail("pipeline bound dominates the measured exact entropies on the tested grid");
    }
    verdict(5, ok, "entropy-bound pipeline and eigenvalue cascade verified on exact chains");
}

// ---------------------------------------------------------------- criterion 6
// Schmidt and entropy identities on random pure states.
void criterion_6() {
    Rng rng(0xACC6);
    bool ok = true;
    double worst_dev = 0.0;
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + int(rng.below(9));         // 2..10 spins
        int keep = 1 + int(rng.below(uint64_t(std::min(5, n - 1))));
        int lo = int(rng.below(uint64_t(n - keep + 1)));
        int hi = lo + keep - 1;
        std::vector<double> psi(size_t(1) << n);
        for (double& v : psi) v = rng.normal();
        normalize(psi);
        DensityMatrix rho = reduce(psi, n, lo, hi);
        std::vector<double> ev = density_spectrum_descending(rho);
        std::vector<double> sv = schmidt_values_block(psi, n, lo, hi);
        int env = n - keep;
        size_t cap = size_t(1) << std::min(keep, env);
        int nonzero = 0;
        for (size_t j = 0; j < sv.size(); ++j) {
            worst_dev = std::max(worst_dev, std::abs(ev[j] - sv[j] * sv[j]));
            if (sv[j] > 1e-12) ++nonzero;
        }
        if (worst_dev > 1e-10) ok = false;
        if (size_t(nonzero) > cap) ok = false;
        ++checked;
    }
    detail(fmt("%d random states: worst |spectrum - schmidt^2| = %.2e", checked, worst_dev));

    // entropy identities
    double worst_pure = 0.0, worst_mixed = 0.0;
    for (int d_exp = 1; d_exp <= 5; ++d_exp) {
        int n = d_exp;
        std::vector<double> psi(size_t(1) << n);
        for (double& v : psi) v = rng.normal();
        normalize(psi);
        Matrix outer(1 << n, 1 << n);
        for (int i = 0; i < (1 << n); ++i)
            for (int j = 0; j < (1 << n); ++j) outer(i, j) = psi[size_t(i)] * psi[size_t(j)];
        worst_pure = std::max(worst_pure, entropy_bits(make_density_matrix(std::move(outer))));
        Matrix mixed = (1.0 / double(1 << n)) * Matrix::identity(1 << n);
        worst_mixed = std::max(worst_mixed,
                               std::abs(entropy_bits(make_density_matrix(std::move(mixed))) - n));
    }
    detail(fmt("entropy of pure states <= %.2e; |S(I/d) - log2 d| <= %.2e", worst_pure, worst_mixed));
    ok = ok && worst_pure <= 1e-12 && worst_mixed <= 1e-12;
    verdict(6, ok, "Schmidt spectra, rank caps and entropy identities hold to tolerance");
}

// ---------------------------------------------------------------- criterion 7
// Sampler stationarity against the importance-weighting oracle on tiny boxes,
// pooled across 20 seeds (with at most the binomially plausible number of
// individual 3-SE excursions).
void criterion_7() {
    struct BoxCase {
        int lines;
        double beta;
    };
    bool ok = true;
    for (BoxCase bc : {BoxCase{1, 1.0}, BoxCase{2, 2.0}, BoxCase{3, 1.5}}) {
        SpaceTimeBox box = SpaceTimeBox::plain(0, bc.lines - 1, 0.0, bc.beta, true);
        double lambda = bc.lines > 1 ? 0.8 : 0.0, delta = 1.0;
        auto f_k = [](const SpaceTimeBox&, const Configuration&, const ClusterLabelling& lab) {
            return double(lab.cluster_count());
        };
        auto f_b = [](const SpaceTimeBox&, const Configuration& om, const ClusterLabelling&) {
            return double(om.bridge_count());
        };
        ImportanceResult ik = importance_estimate(box, BoundaryRule::periodic(), lambda, delta,
                                                  2.0, f_k, 200000, 0xACC7);
        ImportanceResult ib = importance_estimate(box, BoundaryRule::periodic(), lambda, delta,
                                                  2.0, f_b, 200000, 0xACC7 + 1);
        int k_excursions = 0, b_excursions = 0;
        RunningStat pooled_k, pooled_b;
        double k_se_sum2 = 0.0, b_se_sum2 = 0.0;
        const int seeds = 20;
        for (int seed = 0; seed < seeds; ++seed) {
            ChainState chain(box, BoundaryRule::periodic(), lambda, delta, 0xACC7 + 100 + seed);
            chain.run(1000);
            std::vector<double> kb, bb;
            RunningStat ck, cb;
            for (int s = 0; s < 10000; ++s) {
                chain.sweep();
                ck.add(double(chain.cluster_count()));
                cb.add(double(chain.bridge_count()));
                if (ck.n == 500) {
                    kb.push_back(ck.mean);
                    bb.push_back(cb.mean);
                    ck = RunningStat{};
                    cb = RunningStat{};
                }
            }
            Estimate ek = batch_mean_estimate(kb), eb = batch_mean_estimate(bb);
            if (std::abs(ek.value - ik.estimate) >
                3.0 * std::sqrt(ek.se * ek.se + ik.se * ik.se))
                ++k_excursions;
            if (std::abs(eb.value - ib.estimate) >
                3.0 * std::sqrt(eb.se * eb.se + ib.se * ib.se))
                ++b_excursions;
            pooled_k.add(ek.value);
            pooled_b.add(eb.value);
            k_se_sum2 += ek.se * ek.se;
            b_se_sum2 += eb.se * eb.se;
        }
        auto pooled_z = [&](double mean, double se2, const ImportanceResult& oracle) {
            double diff = std::abs(mean - oracle.estimate);
            double denom = std::sqrt(se2 / (seeds * seeds) + oracle.se * oracle.se);
            if (diff == 0.0) return 0.0;  // identically-zero observables (no pairs)
            return denom > 0 ? diff / denom : 1e9;
        };
        double zk = pooled_z(pooled_k.mean, k_se_sum2, ik);
        double zb = pooled_z(pooled_b.mean, b_se_sum2, ib);
        bool box_ok = zk <= 3.0 && zb <= 3.0 && k_excursions <= 2 && b_excursions <= 2;
        detail(fmt("%d line(s), beta=%.1f: pooled z(k)=%.2f z(bridges)=%.2f, per-seed 3-SE "
                   "excursions %d/%d and %d/%d",
                   bc.lines, bc.beta, zk, zb, k_excursions, seeds, b_excursions, seeds));
        ok = ok && box_ok;
    }
    verdict(7, ok, "SW long-run averages agree with the importance oracle across 20 seeds");
}

// ---------------------------------------------------------------- criterion 8
// Mixing checks: the lambda=0 closed form, decay of the factorization ratio in
// K, and decay of the boundary influence in m.
void criterion_8() {
    bool ok = true;

    // (a) lambda=0, L=0: the analytic slit back-connection value p = e^{-2 d b}
    double delta = 0.5, beta = 2.5;
    double p = std::exp(-2.0 * delta * beta);
    FactorizationReport flat = factorization_ratio(1, 0, beta, 0.0, delta, 100000, 8, 0, 0xACC8);
    detail(fmt("lambda=0: max ratio deviation %.4f vs analytic %.4f (se %.4f)",
               flat.max_ratio_deviation, p, flat.max_ratio_se));
    ok = ok && std::abs(flat.max_ratio_deviation - p) <= 3.0 * flat.max_ratio_se;

    // (b) theta=0.25: the maximal ratio deviation decreases in K (net decrease
    // over the scanned margins, no significant increase between neighbours)
    int m = 1, L = 4;
    double beta_f = 2.0 * m + L + 0.4;
    std::vector<FactorizationReport> ks;
    for (int K : {0, 1, 2}) {
        ks.push_back(factorization_ratio(m, L, beta_f, 0.25, 1.0, 400000, 8, K,
                                         0xACC8 + 1 + uint64_t(K)));
        detail(fmt("theta=0.25 factorization: K=%d max %.4f (se %.4f, %d cells)", K,
                   ks.back().max_ratio_deviation, ks.back().max_ratio_se,
                   ks.back().included_cells));
    }
    double joint_k = std::sqrt(ks.front().max_ratio_se * ks.front().max_ratio_se +
                               ks.back().max_ratio_se * ks.back().max_ratio_se);
    bool k_down = ks.front().max_ratio_deviation - ks.back().max_ratio_deviation > 3.0 * joint_k;
    for (size_t i = 0; i + 1 < ks.size(); ++i) {
        double joint = std::sqrt(ks[i].max_ratio_se * ks[i].max_ratio_se +
                                 ks[i + 1].max_ratio_se * ks[i + 1].max_ratio_se);
        if (ks[i + 1].max_ratio_deviation > ks[i].max_ratio_deviation + 3.5 * joint) k_down = false;
    }
    ok = ok && k_down;

    // (c) boundary influence decreases in m beyond noise; the probe event is
    // the all-plus upper slit face (odd under the global flip, so the forced
    // boundary couples to it at first order)
    std::vector<BoundaryInfluenceResult> inf;
    for (int mm : {2, 4, 6}) {
        double b = 4.0 * (mm + 0 + 1);
        inf.push_back(boundary_influence(mm, 0, b, 0.25, 1.0,
                                         [](uint32_t pb, uint32_t) { return pb == 1u; },
                                         250000, 8, 0xACC8 + 10 + uint64_t(mm)));
        detail(fmt("boundary influence m=%d: deviation %.5f (se %.5f)", mm, inf.back().deviation,
                   inf.back().se));
    }
    double joint_ends = std::sqrt(inf.front().se * inf.front().se + inf.back().se * inf.back().se);
    bool influence_down = inf.front().deviation - inf.back().deviation > 3.0 * joint_ends;
    for (size_t i = 0; i + 1 < inf.size(); ++i) {
        double joint = std::sqrt(inf[i].se * inf[i].se + inf[i + 1].se * inf[i + 1].se);
        if (inf[i + 1].deviation > inf[i].deviation + 3.5 * joint) influence_down = false;
    }
    ok = ok && influence_down;
    verdict(8, ok, "mixing ratios match the analytic value and decay in K and m");
}

// ---------------------------------------------------------------- criterion 9
// Disorder: the closed form for X_L and the A_L trend over 200 environments.
void criterion_9() {
    bool ok = true;

    // exact closed form on a constant environment
    Environment cenv;
    cenv.x_min = -2;
    cenv.x_max = 20;
    cenv.delta_x.assign(23, 1.3);
    cenv.lambda_x.assign(22, 0.4);
    int L0 = 12;
    XlResult xl = compute_xl(cenv, L0);
    double expect = -4.0 * xl.K * std::log(1.0 + 2.0 * 0.4 / 1.3);
    bool exact_ok = xl.ln_xl == expect;
    detail(fmt("constant environment: ln X_L = %.12f vs closed form %.12f (exact match %d)",
               xl.ln_xl, expect, int(exact_ok)));
    ok = ok && exact_ok;

    // A_L frequency trend over environments with occasional strong couplings
    DisorderScanConfig cfg;
    cfg.lambda_spec = {"lognormal", std::log(0.04), 1.15};
    cfg.delta_spec = {"uniform", 0.9, 1.1};
    cfg.L_list = {8, 21, 55};
    cfg.m = 4;
    cfg.environments = 200;
    cfg.radii = {1, 2, 3, 4};
    cfg.gamma = 1.05;
    cfg.trials = 300;
    cfg.seed = 0xACC9;
    cfg.out_dir = "acceptance_out/disorder";
    DisorderScanOutcome out = run_disorder_scan(cfg);
    bool trend = true;
    double prev = -1.0;
    for (auto& [L, freq] : out.a_frequency) {
        detail(fmt("P(A_L) at L=%d: %.3f over %d environments", L, freq, cfg.environments));
        if (freq < prev) trend = false;
        prev = freq;
    }
    ok = ok && trend;
    verdict(9, ok, "X_L closed form is exact and the A_L frequency is non-decreasing in L");
}

// --------------------------------------------------------------- criterion 10
// Byte-identical CSV bodies for identical configurations and seeds.
void criterion_10() {
    namespace fs = std::filesystem;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto run_cli = [](const std::string& args) {
        std::string cmd = std::string(CTISING_BIN) + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    bool ok = true;
    struct Job {
        const char* args;
        std::vector<const char*> files;
    };
    std::vector<Job> jobs{
        {"decay-scan --lambda 0.2 --delta 1 --m 2 3 4 --trials 4000 --seed 11",
         {"decay_scan.csv", "decay_fit.csv"}},
        {"rdm --m 1 --L 0 --beta 6 --theta 0.5 --sweeps 5000 --chains 2 --seed 7",
         {"rdm.csv", "rdm_summary.csv"}},
        {"branching --lambda 1 --delta 8 16 --trials 3000 --seed 5", {"branching.csv"}},
        {"entropy-bound --gamma 3 --alpha 1 --C 1 --L 8 64 --m 9", {"entropy_bound.csv"}},
    };
    for (const auto& job : jobs) {
        fs::path d1 = "acceptance_out/det_a", d2 = "acceptance_out/det_b";
        fs::remove_all(d1);
        fs::remove_all(d2);
        bool rc1 = run_cli("--out " + d1.string() + " " + job.args) == 0;
        bool rc2 = run_cli("--out " + d2.string() + " " + job.args) == 0;
        bool match = rc1 && rc2;
        for (const char* f : job.files) {
            std::string a = slurp(d1 / f), b = slurp(d2 / f);
            if (a.empty() || a != b) match = false;
        }
        detail(fmt("%s -> %s", job.args, match ? "byte-identical" : "MISMATCH"));
        ok = ok && match;
    }
    verdict(10, ok, "identical configurations and seeds give byte-identical CSV bodies");
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) which = std::atoi(argv[++i]);
    }
    std::filesystem::create_directories("acceptance_out");
    void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    if (which >= 1 && which <= 10) {
        criteria[which - 1]();
    } else {
        for (auto* c : criteria) c();
    }
    return failures;
}
