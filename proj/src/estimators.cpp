#include "ctising/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ctising/bounds.hpp"
#include "ctising/parallel.hpp"

namespace ctising {

namespace {
std::atomic<unsigned> g_workers{1};
}

void set_worker_count(unsigned n) { g_workers.store(n == 0 ? 1 : n); }
unsigned worker_count() { return g_workers.load(); }

double SlitHistogram::diagonal_mass() const {
    uint64_t d = 0;
    for (int e = 0; e < dim; ++e) d += count(uint32_t(e), uint32_t(e));
    return total > 0 ? double(d) / double(total) : 0.0;
}

SlitHistogram estimate_slit_histogram(int m, int L, double beta, double lambda, double delta,
                                      uint64_t sweeps_per_chain, uint64_t chains, uint64_t seed,
                                      uint64_t burn_in) {
    if (L > kHistogramMaxL)
        throw ContractError("estimate_slit_histogram: L exceeds the histogram guard");
    if (chains < 1 || sweeps_per_chain < 1)
        throw ContractError("estimate_slit_histogram: need at least one chain and sweep");
    SlitHistogram h;
    h.m = m;
    h.L = L;
    h.beta = beta;
    h.lambda = lambda;
    h.delta = delta;
    h.chains = chains;
    h.sweeps_per_chain = sweeps_per_chain;
    h.burn_in = burn_in;
    h.seed = seed;
    h.regime_warning = !(beta > 2.0 * m + L);
    h.dim = 1 << (L + 1);
    h.counts.assign(size_t(h.dim) * h.dim, 0);
    h.back_connection.assign(size_t(L) + 1, 0);
    h.batch_counts.assign(size_t(chains) * kBatchesPerChain,
                          std::vector<uint64_t>(size_t(h.dim) * h.dim, 0));

    SpaceTimeBox box = SpaceTimeBox::slit_box(m, L, beta);
    // chains are independent streams; a worker pool only changes wall time
    std::vector<uint64_t> rejections(chains, 0);
    std::vector<std::vector<uint64_t>> back(chains, std::vector<uint64_t>(size_t(L) + 1, 0));
    auto run_chain = [&](uint64_t c) {
        ChainState chain(box, BoundaryRule::periodic(), lambda, delta, Rng::derive(seed, 0x51, c));
        rejections[c] = chain.init_rejections();
        chain.run(burn_in);
        for (uint64_t s = 0; s < sweeps_per_chain; ++s) {
            chain.sweep();
            uint32_t plus = chain.spins().slit_plus_bits(chain.labelling());
            uint32_t minus = chain.spins().slit_minus_bits(chain.labelling());
            size_t cell = size_t(plus) * h.dim + minus;
            uint64_t batch = c * kBatchesPerChain + s * kBatchesPerChain / sweeps_per_chain;
            h.batch_counts[batch][cell]++;
            for (int x = 0; x <= L; ++x) {
                const auto& lab = chain.labelling();
                if (lab.same_cluster(lab.slit_plus_interval(x), lab.slit_minus_interval(x)))
                    back[c][size_t(x)]++;
            }
        }
    };
    unsigned workers = std::min<uint64_t>(worker_count(), chains);
    if (workers <= 1) {
        for (uint64_t c = 0; c < chains; ++c) run_chain(c);
    } else {
        std::atomic<uint64_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (uint64_t c = next.fetch_add(1); c < chains; c = next.fetch_add(1))
                    run_chain(c);
            });
        for (auto& t : pool) t.join();
    }
    for (uint64_t c = 0; c < chains; ++c) {
        h.init_rejections += rejections[c];
        for (int x = 0; x <= L; ++x) h.back_connection[size_t(x)] += back[c][size_t(x)];
    }
    for (const auto& b : h.batch_counts)
        for (size_t i = 0; i < b.size(); ++i) h.counts[i] += b[i];
    h.total = chains * sweeps_per_chain;
    return h;
}

Estimate estimate_a(const SlitHistogram& h) {
    if (h.total == 0) throw InsufficientDataError("estimate_a: empty histogram");
    double a = h.diagonal_mass();
    return {a, binomial_se(a, h.total)};
}

namespace {

// rho entries from raw cell counts: rho[minus][plus] = cell / diagonal.
Matrix rho_from_counts(const std::vector<uint64_t>& cells, int dim) {
    uint64_t diag = 0;
    for (int e = 0; e < dim; ++e) diag += cells[size_t(e) * dim + e];
    Matrix rho(dim, dim);
    if (diag == 0) return rho;
    for (int p = 0; p < dim; ++p)
        for (int q = 0; q < dim; ++q)
            rho(q, p) = double(cells[size_t(p) * dim + q]) / double(diag);
    return rho;
}

Matrix symmetrize(const Matrix& m) {
    Matrix s(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

}  // namespace

RdmEstimate rdm_from_histogram(const SlitHistogram& h) {
    Estimate a = estimate_a(h);
    if (a.value <= 0.0 || a.value < 3.0 * a.se)
        throw InsufficientDataError("rdm_from_histogram: normalizer indistinguishable from zero");

    RdmEstimate out;
    out.m = h.m;
    out.L = h.L;
    out.beta = h.beta;
    out.lambda = h.lambda;
    out.delta = h.delta;
    out.a_hat = a;

    int dim = h.dim;
    Matrix full = symmetrize(rho_from_counts(h.counts, dim));
    out.raw = full;

    // jackknife over batches for entry SEs and the entropy SE
    size_t nb = h.batch_counts.size();
    std::vector<uint64_t> loo(size_t(dim) * dim);
    out.entry_se = Matrix(dim, dim);
    std::vector<std::vector<double>> loo_entries(size_t(dim) * dim);
    std::vector<double> loo_entropy;
    for (size_t b = 0; b < nb; ++b) {
        for (size_t i = 0; i < loo.size(); ++i) loo[i] = h.counts[i] - h.batch_counts[b][i];
        Matrix r = symmetrize(rho_from_counts(loo, dim));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) loo_entries[size_t(i) * dim + j].push_back(r(i, j));
        EigenSystem es = jacobi_eigensystem(r, false);
        std::vector<double> spec;
        double z = 0.0;
        for (double v : es.values) z += std::max(0.0, v);
        for (double v : es.values)
            if (v > 0) spec.push_back(v / z);
        loo_entropy.push_back(entropy_bits(spec));
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            out.entry_se(i, j) = jackknife_se(loo_entries[size_t(i) * dim + j]);
    out.entropy_se = jackknife_se(loo_entropy);

    out.raw_spectrum = descending(jacobi_eigenvalues(full));
    out.rho = make_density_matrix(full);
    out.projected_spectrum = density_spectrum_descending(out.rho);
    out.entropy = entropy_bits(out.rho);
    return out;
}

double combined_norm_se(const RdmEstimate& a, const RdmEstimate& b) {
    double s = 0.0;
    for (int i = 0; i < a.entry_se.rows; ++i)
        for (int j = 0; j < a.entry_se.cols; ++j) {
            double u = a.entry_se(i, j), v = b.entry_se(i, j);
            s += u * u + v * v;
        }
    return std::sqrt(s);
}

double default_beta(int m, int L, double lambda, double delta) {
    double gap_proxy = std::max(2.0 * delta - lambda, 0.1);
    return std::max(4.0 * (m + L + 1), 40.0 / gap_proxy);
}

BetaExtrapolation beta_extrapolate(int m, int L, double lambda, double delta,
                                   const std::vector<double>& beta_schedule, double tol,
                                   uint64_t sweeps_per_chain, uint64_t chains, uint64_t seed,
                                   uint64_t burn_in) {
    if (beta_schedule.empty()) throw ContractError("beta_extrapolate: empty schedule");
    for (size_t i = 1; i < beta_schedule.size(); ++i)
        if (!(beta_schedule[i] > beta_schedule[i - 1]))
            throw ContractError("beta_extrapolate: schedule must be increasing");

    BetaExtrapolation out;
    std::optional<RdmEstimate> prev;
    for (size_t i = 0; i < beta_schedule.size(); ++i) {
        double beta = beta_schedule[i];
        SlitHistogram h = estimate_slit_histogram(m, L, beta, lambda, delta, sweeps_per_chain,
                                                  chains, Rng::derive(seed, i), burn_in);
        RdmEstimate cur = rdm_from_histogram(h);
        BetaLevel level;
        level.beta = beta;
        if (std::isinf(tol)) {
            level.converged = true;
            out.trace.push_back(level);
            out.final = std::move(cur);
            out.converged = true;
            return out;
        }
        if (prev) {
            level.distance_to_previous = op_norm_diff(cur.rho, prev->rho);
            level.combined_se = combined_norm_se(cur, *prev);
            level.converged = level.distance_to_previous <= tol + 3.0 * level.combined_se;
        }
        out.trace.push_back(level);
        bool done = prev && level.converged;
        prev = std::move(cur);
        if (done) {
            out.final = std::move(*prev);
            out.converged = true;
            return out;
        }
    }
    out.final = std::move(*prev);
    out.converged = false;  // schedule exhausted; caller reads the trace
    return out;
}

NormDecayTable norm_decay_experiment(double theta, int L, const std::vector<int>& m_list,
                                     uint64_t sweeps_per_chain, uint64_t chains, uint64_t seed,
                                     uint64_t burn_in) {
    if (m_list.empty()) throw ContractError("norm_decay_experiment: empty m list");
    NormDecayTable table;
    table.theta = theta;
    table.L = L;
    table.n_ref = *std::max_element(m_list.begin(), m_list.end());
    double lambda = theta, delta = 1.0;  // rescaling of the time axes fixes delta = 1

    std::vector<RdmEstimate> est;
    for (size_t i = 0; i < m_list.size(); ++i) {
        int m = m_list[i];
        double beta = default_beta(m, L, lambda, delta);
        SlitHistogram h = estimate_slit_histogram(m, L, beta, lambda, delta, sweeps_per_chain,
                                                  chains, Rng::derive(seed, 0xd, i), burn_in);
        est.push_back(rdm_from_histogram(h));
    }
    size_t ref = 0;
    for (size_t i = 0; i < m_list.size(); ++i)
        if (m_list[i] == table.n_ref) ref = i;
    for (size_t i = 0; i < m_list.size(); ++i) {
        NormDecayRow row;
        row.m = m_list[i];
        row.beta = est[i].beta;
        row.norm = op_norm_diff(est[i].rho, est[ref].rho);
        row.se = i == ref ? 0.0 : combined_norm_se(est[i], est[ref]);
        row.censored = i == ref || row.norm <= 3.0 * row.se;
        table.rows.push_back(row);
    }
    return table;
}

std::vector<EntropyScalingRow> entropy_scaling_experiment(
    double theta, const std::vector<int>& L_list, int m_equals_L_plus, uint64_t sweeps_per_chain,
    uint64_t chains, uint64_t seed, std::optional<EntropyBoundParams> bound_params,
    int exact_spin_cap, uint64_t burn_in) {
    std::vector<EntropyScalingRow> rows;
    double lambda = theta, delta = 1.0;
    for (size_t i = 0; i < L_list.size(); ++i) {
        int L = L_list[i];
        int m = L + m_equals_L_plus;
        if (m < 1) m = 1;
        EntropyScalingRow row;
        row.L = L;
        row.m = m;
        row.beta = default_beta(m, L, lambda, delta);
        if (L <= kHistogramMaxL) {
            SlitHistogram h = estimate_slit_histogram(m, L, row.beta, lambda, delta,
                                                      sweeps_per_chain, chains,
                                                      Rng::derive(seed, 0xe5, i), burn_in);
            RdmEstimate e = rdm_from_histogram(h);
            row.s_mc = e.entropy;
            row.s_mc_se = e.entropy_se;
        }
        int n = 2 * m + L + 1;
        if (n <= std::min(exact_spin_cap, kMaxSpins)) {
            DensityMatrix rho = exact_reduced_ground_state(m, L, lambda, delta);
            row.s_exact = entropy_bits(rho);
        }
        if (bound_params && L >= 1) {
            EntropyBoundInputs inp;
            inp.gamma = bound_params->gamma;
            inp.alpha = bound_params->alpha;
            inp.C = bound_params->C;
            inp.L = L;
            if (inp.gamma > 4.0 * std::log(2.0)) {
                row.bound = entropy_bound_pipeline(inp, m).bound;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ctising
