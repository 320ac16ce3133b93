#include "ctising/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace ctising {

double offspring_pgf(const BranchingParams& p, double s) {
    p.validate();
    double denom = p.delta - 2.0 * p.lambda * (s - 1.0);
    if (!(denom > 0.0)) throw ContractError("offspring_pgf: argument beyond the pole");
    double r = p.delta / denom;
    return r * r;
}

double offspring_probability(const BranchingParams& p, uint64_t k) {
    p.validate();
    double q = 2.0 * p.lambda / (2.0 * p.lambda + p.delta);
    return double(k + 1) * (1.0 - q) * (1.0 - q) * std::pow(q, double(k));
}

double BranchingSim::tail_progeny(double m) const {
    uint64_t c = 0;
    for (uint64_t v : progeny)
        if (double(v) > m) ++c;
    return progeny.empty() ? 0.0 : double(c) / double(progeny.size());
}

double BranchingSim::tail_lifetime(double u) const {
    uint64_t c = 0;
    for (double v : lifetime)
        if (v > u) ++c;
    return lifetime.empty() ? 0.0 : double(c) / double(lifetime.size());
}

BranchingSim simulate_branching(const BranchingParams& p, uint64_t trials, uint64_t seed) {
    p.validate();
    if (trials < 1) throw ContractError("simulate_branching: trials must be >= 1");
    BranchingSim sim;
    sim.progeny.reserve(trials);
    sim.lifetime.reserve(trials);
    for (uint64_t t = 0; t < trials; ++t) {
        Rng rng(Rng::derive(seed, 0xb7a, t));
        uint64_t particles = 1;  // the progenitor of this generation count
        uint64_t total = 1;
        double total_life = 0.0;
        uint64_t generation = 0;
        uint64_t current = 1;
        bool truncated = false;
        // breadth-first by generations; only counts are needed
        while (current > 0) {
            if (++generation > kBranchingGenerationCap) {
                truncated = true;
                break;
            }
            uint64_t next = 0;
            for (uint64_t i = 0; i < current; ++i) {
                double life = rng.exponential(p.delta) + rng.exponential(p.delta);
                total_life += life;
                uint64_t children = rng.poisson(2.0 * p.lambda * life);
                sim.offspring.push_back(children);
                next += children;
            }
            total += next;
            current = next;
        }
        (void)particles;
        sim.progeny.push_back(total);
        sim.lifetime.push_back(total_life);
        sim.truncated = sim.truncated || truncated;
    }
    return sim;
}

namespace {

// Smallest value of s*G(x) - x over x in [1, pole); the fixed point exists iff
// this minimum is <= 0.
bool progeny_fixed_point_exists(const BranchingParams& p, double s) {
    double lam = p.lambda, del = p.delta;
    auto h = [&](double x) {
        double denom = del - 2.0 * lam * (x - 1.0);
        double g = (del / denom) * (del / denom);
        return s * g - x;
    };
    // stationary point of h: s * G'(x) = 1 with G'(x) = (4 lam/del) u^3,
    // u = del/(del - 2 lam (x-1))
    double u = std::cbrt(del / (4.0 * lam * s));
    if (u < 1.0) return h(1.0) <= 0.0;  // minimum at the left edge
    double x_star = 1.0 + (del / (2.0 * lam)) * (1.0 - 1.0 / u);
    double pole_x = 1.0 + del / (2.0 * lam);
    if (x_star >= pole_x) return false;
    return h(x_star) <= 0.0;
}

bool lifetime_fixed_point_exists(const BranchingParams& p, double t) {
    double lam = p.lambda, del = p.delta;
    auto g = [&](double x) {
        double denom = del - t - 2.0 * lam * (x - 1.0);
        if (!(denom > 0.0)) return 1e300;
        double r = del / denom;
        return r * r;
    };
    auto h = [&](double x) { return g(x) - x; };
    // h'(x) = 0: (4 lam del^2)/(del - t - 2 lam (x-1))^3 = 1
    double denom_star = std::cbrt(4.0 * lam * del * del);
    double x_star = 1.0 + (del - t - denom_star) / (2.0 * lam);
    if (x_star < 1.0) return h(1.0) <= 0.0;
    if (!(del - t - 2.0 * lam * (x_star - 1.0) > 0.0)) return false;
    return h(x_star) <= 0.0;
}

}  // namespace

double progeny_tail_exponent(const BranchingParams& p) {
    p.validate();
    if (!(p.mean_offspring() < 1.0))
        throw ContractError("progeny_tail_exponent: comparison process not subcritical");
    if (p.lambda == 0.0) return std::numeric_limits<double>::infinity();  // M = 1 surely
    // largest s >= 1 with a real fixed point, by bisection
    double lo = 1.0, hi = 2.0;
    if (!progeny_fixed_point_exists(p, lo)) return 0.0;  // cannot happen when subcritical
    while (progeny_fixed_point_exists(p, hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    while (hi - lo > 1e-8 * std::max(1.0, lo)) {
        double mid = 0.5 * (lo + hi);
        if (progeny_fixed_point_exists(p, mid)) lo = mid; else hi = mid;
    }
    return std::log(lo);
}

double lifetime_tail_exponent(const BranchingParams& p) {
    p.validate();
    if (!(p.mean_offspring() < 1.0))
        throw ContractError("lifetime_tail_exponent: comparison process not subcritical");
    if (p.lambda == 0.0) return p.delta;  // U is Gamma(2, delta)
    double lo = 0.0, hi = p.delta * (1.0 - 1e-12);
    if (!lifetime_fixed_point_exists(p, lo)) return 0.0;
    while (hi - lo > 1e-8 * std::max(1.0, lo)) {
        double mid = 0.5 * (lo + hi);
        if (lifetime_fixed_point_exists(p, mid)) lo = mid; else hi = mid;
    }
    return lo;
}

double decay_rate_bound(double lambda, double delta) {
    BranchingParams p{lambda, delta};
    p.validate();
    if (!(p.mean_offspring() < 1.0))
        throw ContractError("decay_rate_bound: 4 lambda/delta >= 1, no exponential certificate");
    return std::min(progeny_tail_exponent(p), lifetime_tail_exponent(p));
}

EntropyBoundTrace entropy_bound_pipeline(const EntropyBoundInputs& inp, int m) {
    inp.validate();
    if (m < 0) throw ContractError("entropy_bound_pipeline: m must be >= 0");
    if (!(inp.gamma > 4.0 * std::log(2.0)))
        throw ContractError("entropy_bound_pipeline: gamma <= 4 ln 2, tail integral inapplicable");

    EntropyBoundTrace tr;
    double lnCL = std::log(inp.C) + inp.alpha * std::log(double(inp.L));
    tr.K = std::max(0, int(std::ceil(lnCL / inp.gamma)));
    tr.c0 = 1.0 / (1.0 - std::exp(-inp.gamma));
    tr.xi = inp.gamma / (2.0 * std::log(2.0));
    tr.nu = std::ceil(std::exp(inp.gamma * (tr.K + 1)));
    tr.c0_prime = tr.c0 * std::exp(inp.gamma * (tr.K + 1));

    if (m <= tr.K) {
        tr.small_m_branch = true;
        tr.bound = 2.0 * m;
        return tr;
    }
    tr.s1_cap = std::log2(tr.nu);
    double log2_c0p = std::log2(tr.c0_prime);
    tr.s2_bound = (tr.c0_prime * std::pow(tr.nu, 1.0 - tr.xi) / (tr.xi - 1.0)) *
                  (std::abs(log2_c0p) + tr.xi * std::log2(tr.nu) + tr.xi / (tr.xi - 1.0));
    tr.bound = tr.s1_cap + tr.s2_bound;
    return tr;
}

TailCheckReport eigenvalue_tail_check(const std::vector<DensityMatrix>& rho_list, int K) {
    if (rho_list.size() < 2)
        throw ContractError("eigenvalue_tail_check: need matrices for at least K and K+1");
    TailCheckReport rep;
    rep.K = K;
    rep.r_max = int(rho_list.size()) - 1;
    rep.dim = rho_list.front().dim();
    for (const auto& r : rho_list)
        if (r.dim() != rep.dim) throw ContractError("eigenvalue_tail_check: dimension mismatch");

    for (const auto& r : rho_list)
        rep.spectra.push_back(density_spectrum_descending(r));
    for (size_t l = 0; l + 1 < rho_list.size(); ++l)
        rep.eps.push_back(op_norm_diff(rho_list[l], rho_list[l + 1]));

    const double tol = 1e-9;
    // Weyl step between K and K+1
    for (int j = 0; j < rep.dim; ++j)
        if (std::abs(rep.spectra[0][j] - rep.spectra[1][j]) > rep.eps[0] + tol) rep.weyl_ok = false;

    auto pow4 = [](int e) { return e >= 16 ? 1e300 : double(1ull << (2 * e)); };
    for (int r = 1; r <= rep.r_max; ++r) {
        double eps_sum = 0.0;
        for (int l = 0; l < r; ++l) eps_sum += rep.eps[size_t(l)];
        for (int j1 = 1; j1 <= rep.dim; ++j1) {
            double val = rep.spectra[size_t(r)][j1 - 1];
            if (double(j1) <= pow4(K)) {
                if (val > rep.spectra[0][j1 - 1] + eps_sum + tol) rep.case_i_ok = false;
            } else if (double(j1) <= pow4(K + r)) {
                int s = 0;
                while (double(j1) > pow4(K + s + 1)) ++s;
                double tail = 0.0;
                for (int l = s; l < r; ++l) tail += rep.eps[size_t(l)];
                if (val > tail + tol) rep.case_ii_ok = false;
            } else {
                rep.worst_case_iii = std::max(rep.worst_case_iii, val);
                if (val > 1e-12) rep.case_iii_ok = false;
            }
        }
    }
    return rep;
}

DecayFit fit_decay_rate(const std::vector<DecayPoint>& points) {
    std::vector<double> x, y, sigma;
    for (const auto& p : points) {
        if (p.value <= 0.0 || p.se < 0.0) continue;
        if (p.value <= 3.0 * p.se) continue;  // censored
        x.push_back(p.x);
        y.push_back(std::log(p.value));
        sigma.push_back(p.se > 0.0 ? p.se / p.value : 1e-9);
    }
    if (x.size() < 3)
        throw InsufficientDataError("fit_decay_rate: fewer than 3 uncensored points");
    WlsFit w = wls_line(x, y, sigma);
    DecayFit fit;
    fit.gamma = -w.slope;
    fit.gamma_se = w.slope_se;
    fit.intercept = w.intercept;
    fit.intercept_se = w.intercept_se;
    fit.chi2 = w.chi2;
    fit.n_used = w.n_points;
    fit.non_decaying = fit.gamma < 2.0 * fit.gamma_se;
    return fit;
}

}  // namespace ctising
