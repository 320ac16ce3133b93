#include "ctising/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ctising/csvio.hpp"
#include "json.hpp"

namespace ctising {

std::string git_build_id() {
#ifdef CTISING_GIT_DESC
    return CTISING_GIT_DESC;
#else
    return "unknown";
#endif
}

void write_provenance(const std::string& path, const std::string& command,
                      const std::string& params_json) {
    nlohmann::json j;
    j["command"] = command;
    j["params"] = nlohmann::json::parse(params_json);
    j["build"] = git_build_id();
    j["timestamp"] = uint64_t(std::time(nullptr));
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write provenance: " + path);
    out << j.dump(2) << '\n';
}

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

DecayScanOutcome run_decay_scan(const DecayScanConfig& cfg) {
    DecayScanOutcome out;
    CsvWriter csv(out_path(cfg.out_dir, "decay_scan.csv"));
    csv.header({"lambda", "delta", "m", "estimate", "se", "trials"});
    std::vector<DecayPoint> points;
    for (size_t i = 0; i < cfg.m_list.size(); ++i) {
        int m = cfg.m_list[i];
        Estimate e = estimate_connectivity(cfg.lambda, cfg.delta, m, cfg.trials,
                                           Rng::derive(cfg.seed, i));
        out.estimates.push_back(e);
        points.push_back({double(m), e.value, e.se});
        csv.row_strings({CsvWriter::num(cfg.lambda), CsvWriter::num(cfg.delta), CsvWriter::num(m),
                         CsvWriter::num(e.value), CsvWriter::num(e.se), CsvWriter::num(cfg.trials)});
    }
    try {
        out.fit = fit_decay_rate(points);
    } catch (const InsufficientDataError&) {
    }
    if (4.0 * cfg.lambda / cfg.delta < 1.0) out.gamma_lower = decay_rate_bound(cfg.lambda, cfg.delta);

    CsvWriter fitcsv(out_path(cfg.out_dir, "decay_fit.csv"));
    fitcsv.header({"lambda", "delta", "gamma_hat", "gamma_se", "intercept", "n_used", "gamma_lower"});
    fitcsv.row_strings({CsvWriter::num(cfg.lambda), CsvWriter::num(cfg.delta),
                        CsvWriter::num(out.fit ? out.fit->gamma : 0.0),
                        CsvWriter::num(out.fit ? out.fit->gamma_se : 0.0),
                        CsvWriter::num(out.fit ? out.fit->intercept : 0.0),
                        CsvWriter::num(out.fit ? out.fit->n_used : 0),
                        CsvWriter::num(out.gamma_lower.value_or(0.0))});
    nlohmann::json p{{"lambda", cfg.lambda}, {"delta", cfg.delta}, {"m_list", cfg.m_list},
                     {"trials", cfg.trials}, {"seed", cfg.seed}};
    write_provenance(out_path(cfg.out_dir, "decay_scan.json"), "decay-scan", p.dump());
    return out;
}

RdmOutcome run_rdm(const RdmConfig& cfg) {
    RdmOutcome out;
    SlitHistogram h = estimate_slit_histogram(cfg.m, cfg.L, cfg.beta, cfg.lambda, cfg.delta,
                                              cfg.sweeps, cfg.chains, cfg.seed, cfg.burn_in);
    out.estimate = rdm_from_histogram(h);
    int n = 2 * cfg.m + cfg.L + 1;
    if (n <= 10)
        out.oracle = exact_reduced_thermal(cfg.m, cfg.L, cfg.lambda, cfg.delta, cfg.beta);

    CsvWriter csv(out_path(cfg.out_dir, "rdm.csv"));
    csv.header({"row", "col", "estimate", "se", "oracle", "abs_z"});
    int dim = out.estimate.rho.dim();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double est = out.estimate.raw(i, j);
            double se = out.estimate.entry_se(i, j);
            double oracle = out.oracle ? out.oracle->mat(i, j) : 0.0;
            double z = (out.oracle && se > 0) ? std::abs(est - oracle) / se : 0.0;
            out.max_abs_z = std::max(out.max_abs_z, z);
            csv.row_strings({CsvWriter::num(i), CsvWriter::num(j), CsvWriter::num(est),
                             CsvWriter::num(se), CsvWriter::num(oracle), CsvWriter::num(z)});
        }
    CsvWriter sum(out_path(cfg.out_dir, "rdm_summary.csv"));
    sum.header({"m", "L", "beta", "lambda", "delta", "a_hat", "a_se", "entropy", "entropy_se",
                "entropy_oracle", "min_eig_raw", "projected"});
    sum.row_strings({CsvWriter::num(cfg.m), CsvWriter::num(cfg.L), CsvWriter::num(cfg.beta),
                     CsvWriter::num(cfg.lambda), CsvWriter::num(cfg.delta),
                     CsvWriter::num(out.estimate.a_hat.value), CsvWriter::num(out.estimate.a_hat.se),
                     CsvWriter::num(out.estimate.entropy), CsvWriter::num(out.estimate.entropy_se),
                     CsvWriter::num(out.oracle ? entropy_bits(*out.oracle) : 0.0),
                     CsvWriter::num(out.estimate.rho.min_eigenvalue),
                     CsvWriter::num(int(out.estimate.rho.projected))});
    nlohmann::json p{{"m", cfg.m}, {"L", cfg.L}, {"beta", cfg.beta}, {"lambda", cfg.lambda},
                     {"delta", cfg.delta}, {"sweeps", cfg.sweeps}, {"chains", cfg.chains},
                     {"seed", cfg.seed}};
    write_provenance(out_path(cfg.out_dir, "rdm.json"), "rdm", p.dump());
    return out;
}

NormDecayTable run_norm_decay(const NormDecayConfig& cfg) {
    NormDecayTable t = norm_decay_experiment(cfg.theta, cfg.L, cfg.m_list, cfg.sweeps_per_chain,
                                             cfg.chains, cfg.seed, cfg.burn_in);
    CsvWriter csv(out_path(cfg.out_dir, "norm_decay.csv"));
    csv.header({"theta", "L", "m", "n", "norm", "se", "censored"});
    for (const auto& r : t.rows)
        csv.row_strings({CsvWriter::num(cfg.theta), CsvWriter::num(cfg.L), CsvWriter::num(r.m),
                         CsvWriter::num(t.n_ref), CsvWriter::num(r.norm), CsvWriter::num(r.se),
                         CsvWriter::num(int(r.censored))});
    nlohmann::json p{{"theta", cfg.theta}, {"L", cfg.L}, {"m_list", cfg.m_list},
                     {"sweeps_per_chain", cfg.sweeps_per_chain}, {"chains", cfg.chains},
                     {"seed", cfg.seed}};
    write_provenance(out_path(cfg.out_dir, "norm_decay.json"), "norm-decay", p.dump());
    return t;
}

std::vector<EntropyScalingRow> run_entropy_scan(const EntropyScanConfig& cfg) {
    auto rows = entropy_scaling_experiment(cfg.theta, cfg.L_list, cfg.m_offset,
                                           cfg.sweeps_per_chain, cfg.chains, cfg.seed, cfg.bound,
                                           cfg.exact_cap, cfg.burn_in);
    CsvWriter csv(out_path(cfg.out_dir, "entropy_scaling.csv"));
    csv.header({"theta", "L", "m", "beta", "S_mc", "se", "S_exact", "bound"});
    for (const auto& r : rows)
        csv.row_strings({CsvWriter::num(cfg.theta), CsvWriter::num(r.L), CsvWriter::num(r.m),
                         CsvWriter::num(r.beta),
                         r.s_mc ? CsvWriter::num(*r.s_mc) : "nan",
                         CsvWriter::num(r.s_mc_se),
                         r.s_exact ? CsvWriter::num(*r.s_exact) : "nan",
                         r.bound ? CsvWriter::num(*r.bound) : "nan"});
    nlohmann::json p{{"theta", cfg.theta}, {"L_list", cfg.L_list}, {"m_offset", cfg.m_offset},
                     {"sweeps_per_chain", cfg.sweeps_per_chain}, {"chains", cfg.chains},
                     {"seed", cfg.seed}};
    write_provenance(out_path(cfg.out_dir, "entropy_scaling.json"), "entropy-scan", p.dump());
    return rows;
}

MixingOutcome run_mixing_check(const MixingConfig& cfg) {
    MixingOutcome out;
    CsvWriter csv(out_path(cfg.out_dir, "mixing.csv"));
    csv.header({"check", "m", "L", "K", "beta", "value", "se", "bound_form"});

    double beta_fact = 2.0 * cfg.m + cfg.L + 2.0;
    for (size_t i = 0; i < cfg.K_list.size(); ++i) {
        int K = cfg.K_list[i];
        FactorizationReport rep = factorization_ratio(cfg.m, cfg.L, beta_fact, cfg.lambda,
                                                      cfg.delta, cfg.sweeps, cfg.chains, K,
                                                      Rng::derive(cfg.seed, 0xf0, i));
        out.factorization.push_back(rep);
        csv.row_strings({"factorization_max_ratio", CsvWriter::num(cfg.m), CsvWriter::num(cfg.L),
                         CsvWriter::num(K), CsvWriter::num(beta_fact),
                         CsvWriter::num(rep.max_ratio_deviation), CsvWriter::num(rep.max_ratio_se),
                         "C*exp(-gamma*K/2)"});
    }
    for (size_t i = 0; i < cfg.m_list.size(); ++i) {
        int m = cfg.m_list[i];
        double beta = 4.0 * (m + cfg.L + 1);
        BoundaryInfluenceResult r =
            boundary_influence(m, cfg.L, beta, cfg.lambda, cfg.delta,
                               [](uint32_t p, uint32_t q) { return p == q; }, cfg.sweeps,
                               cfg.chains, Rng::derive(cfg.seed, 0xb0, i));
        out.influence.push_back(r);
        csv.row_strings({"boundary_influence", CsvWriter::num(m), CsvWriter::num(cfg.L),
                         CsvWriter::num(0), CsvWriter::num(beta), CsvWriter::num(r.deviation),
                         CsvWriter::num(r.se), "C*exp(-2/7*gamma*m)"});
    }
    int K_t = std::max(0, std::min(cfg.L / 2, int(std::ceil(std::log(std::max(1, cfg.L))))));
    SeparatorGeometry eq = SeparatorGeometry::equator(cfg.m, cfg.L);
    out.t_quantities = estimate_t_quantities(cfg.m, cfg.L, K_t, beta_fact, cfg.lambda, cfg.delta,
                                             eq, cfg.sweeps, cfg.chains, cfg.sweeps,
                                             Rng::derive(cfg.seed, 0x7));
    csv.row_strings({"t1_wired", CsvWriter::num(cfg.m), CsvWriter::num(cfg.L), CsvWriter::num(K_t),
                     CsvWriter::num(beta_fact), CsvWriter::num(out.t_quantities.t1),
                     CsvWriter::num(out.t_quantities.t1_se), "<=q1+3se"});
    csv.row_strings({"t2sq_wired", CsvWriter::num(cfg.m), CsvWriter::num(cfg.L), CsvWriter::num(K_t),
                     CsvWriter::num(beta_fact), CsvWriter::num(out.t_quantities.t2sq),
                     CsvWriter::num(out.t_quantities.t2sq_se), "=t1"});
    csv.row_strings({"t1_percolation", CsvWriter::num(cfg.m), CsvWriter::num(cfg.L),
                     CsvWriter::num(K_t), CsvWriter::num(beta_fact),
                     CsvWriter::num(out.t_quantities.q1_t1),
                     CsvWriter::num(out.t_quantities.q1_t1_se), "dominates_t1"});

    nlohmann::json p{{"lambda", cfg.lambda}, {"delta", cfg.delta}, {"L", cfg.L}, {"m", cfg.m},
                     {"K_list", cfg.K_list}, {"m_list", cfg.m_list}, {"sweeps", cfg.sweeps},
                     {"chains", cfg.chains}, {"seed", cfg.seed}};
    write_provenance(out_path(cfg.out_dir, "mixing.json"), "mixing-check", p.dump());
    return out;
}

std::vector<BranchingRow> run_branching(const BranchingConfig& cfg) {
    std::vector<BranchingRow> rows;
    CsvWriter csv(out_path(cfg.out_dir, "branching.csv"));
    csv.header({"lambda", "delta", "mbar", "nu_hat", "gamma_lower"});
    for (size_t i = 0; i < cfg.delta_list.size(); ++i) {
        BranchingParams bp{cfg.lambda, cfg.delta_list[i]};
        BranchingRow row;
        row.lambda = bp.lambda;
        row.delta = bp.delta;
        row.mbar = bp.mean_offspring();
        row.nu_hat = progeny_tail_exponent(bp);
        row.gamma_lower = decay_rate_bound(bp.lambda, bp.delta);
        BranchingSim sim = simulate_branching(bp, cfg.trials, Rng::derive(cfg.seed, i));
        // tail slope over a window where the tail is well populated
        std::vector<DecayPoint> pts;
        for (int mth = 1; mth <= 12; ++mth) {
            double p = sim.tail_progeny(mth);
            if (p * double(cfg.trials) >= 25.0)
                pts.push_back({double(mth), p, binomial_se(p, cfg.trials)});
        }
        try {
            row.nu_sim = fit_decay_rate(pts).gamma;
        } catch (const InsufficientDataError&) {
            row.nu_sim = 0.0;
        }
        rows.push_back(row);
        csv.row_strings({CsvWriter::num(row.lambda), CsvWriter::num(row.delta),
                         CsvWriter::num(row.mbar), CsvWriter::num(row.nu_hat),
                         CsvWriter::num(row.gamma_lower)});
    }
    nlohmann::json p{{"lambda", cfg.lambda}, {"delta_list", cfg.delta_list},
                     {"trials", cfg.trials}, {"seed", cfg.seed}};
    write_provenance(out_path(cfg.out_dir, "branching.json"), "branching", p.dump());
    return rows;
}

DisorderScanOutcome run_disorder_scan(const DisorderScanConfig& cfg) {
    DisorderScanOutcome out;
    CsvWriter csv(out_path(cfg.out_dir, "disorder_events.csv"));
    csv.header({"L", "m", "A", "B", "C", "D", "X_L"});
    int r_max = *std::max_element(cfg.radii.begin(), cfg.radii.end());
    int k = cfg.m / 2;
    for (int L : cfg.L_list) {
        int hits = 0;
        for (int e = 0; e < cfg.environments; ++e) {
            int refine_cap = r_max + 2;
            int lo = std::min(-1, -k - refine_cap);
            int hi = std::max(L + 1, L + k + refine_cap);
            Environment env = sample_environment(cfg.lambda_spec, cfg.delta_spec, lo - 1, hi + 1,
                                                 Rng::derive(cfg.seed, uint64_t(e)));
            std::vector<int> sites;
            for (int x = -k; x <= L + k; ++x) sites.push_back(x);
            DecayScanResult scan = disordered_decay_scan(env, sites, cfg.radii, cfg.gamma, cfg.q,
                                                         cfg.trials,
                                                         Rng::derive(cfg.seed, uint64_t(e), 0x5c));
            // censored sites get one deeper look before the conservative verdict
            std::vector<int> radii = cfg.radii;
            for (int extra = r_max + 1; extra <= refine_cap; ++extra) {
                std::vector<int> redo;
                for (int x : sites)
                    if (scan.dx.is_censored(x)) redo.push_back(x);
                if (redo.empty()) break;
                radii.push_back(extra);
                DecayScanResult deeper =
                    disordered_decay_scan(env, redo, radii, cfg.gamma, cfg.q, cfg.trials,
                                          Rng::derive(cfg.seed, uint64_t(e), 0x5c));
                for (int x : redo) {
                    scan.dx.dx[x] = deeper.dx.at(x);
                    scan.dx.censored[x] = deeper.dx.is_censored(x);
                }
            }
            XlResult xl = compute_xl(env, L);
            EnvironmentEvents ev = environment_events(env, L, cfg.m, cfg.rho, scan.dx);
            ev.xl = xl.xl;
            ev.b_l_rho = xl.xl >= std::pow(double(L), -cfg.rho);
            hits += ev.a_l ? 1 : 0;
            csv.row_strings({CsvWriter::num(L), CsvWriter::num(cfg.m), CsvWriter::num(int(ev.a_l)),
                             CsvWriter::num(int(ev.b_l_rho)), CsvWriter::num(int(ev.c_lm)),
                             CsvWriter::num(int(ev.d_lm)), CsvWriter::num(ev.xl)});
        }
        out.a_frequency.push_back({L, double(hits) / double(cfg.environments)});
    }
    nlohmann::json p{{"L_list", cfg.L_list}, {"m", cfg.m}, {"rho", cfg.rho},
                     {"environments", cfg.environments}, {"radii", cfg.radii},
                     {"gamma", cfg.gamma}, {"q", cfg.q}, {"trials", cfg.trials},
                     {"seed", cfg.seed}};
    write_provenance(out_path(cfg.out_dir, "disorder_events.json"), "disorder-scan", p.dump());
    return out;
}

void run_entropy_bound(const EntropyBoundConfig& cfg) {
    CsvWriter csv(out_path(cfg.out_dir, "entropy_bound.csv"));
    csv.header({"L", "gamma", "alpha", "C", "K", "nu", "bound"});
    for (int L : cfg.L_list) {
        EntropyBoundInputs inp{cfg.gamma, cfg.alpha, cfg.C, L};
        EntropyBoundTrace tr = entropy_bound_pipeline(inp, cfg.m);
        csv.row_strings({CsvWriter::num(L), CsvWriter::num(cfg.gamma), CsvWriter::num(cfg.alpha),
                         CsvWriter::num(cfg.C), CsvWriter::num(tr.K), CsvWriter::num(tr.nu),
                         CsvWriter::num(tr.bound)});
    }
    nlohmann::json p{{"gamma", cfg.gamma}, {"alpha", cfg.alpha}, {"C", cfg.C},
                     {"L_list", cfg.L_list}, {"m", cfg.m}};
    write_provenance(out_path(cfg.out_dir, "entropy_bound.json"), "entropy-bound", p.dump());
}

OracleOutcome run_oracle(const OracleConfig& cfg) {
    OracleOutcome out;
    if (cfg.beta)
        out.rho = exact_reduced_thermal(cfg.m, cfg.L, cfg.theta, 1.0, *cfg.beta);
    else
        out.rho = exact_reduced_ground_state(cfg.m, cfg.L, cfg.theta, 1.0);
    out.spectrum = density_spectrum_descending(out.rho);
    out.entropy = entropy_bits(out.spectrum);

    CsvWriter csv(out_path(cfg.out_dir, "oracle_spectrum.csv"));
    csv.header({"j", "eigenvalue"});
    for (size_t j = 0; j < out.spectrum.size(); ++j)
        csv.row_strings({CsvWriter::num(uint64_t(j + 1)), CsvWriter::num(out.spectrum[j])});

    CsvWriter mat(out_path(cfg.out_dir, "oracle_rho.csv"));
    std::vector<std::string> head;
    for (int j = 0; j < out.rho.dim(); ++j) head.push_back("c" + std::to_string(j));
    mat.header(head);
    for (int i = 0; i < out.rho.dim(); ++i) {
        std::vector<std::string> row;
        for (int j = 0; j < out.rho.dim(); ++j) row.push_back(CsvWriter::num(out.rho.mat(i, j)));
        mat.row_strings(row);
    }
    CsvWriter sum(out_path(cfg.out_dir, "oracle_summary.csv"));
    sum.header({"m", "L", "theta", "beta", "entropy"});
    sum.row_strings({CsvWriter::num(cfg.m), CsvWriter::num(cfg.L), CsvWriter::num(cfg.theta),
                     CsvWriter::num(cfg.beta.value_or(-1.0)), CsvWriter::num(out.entropy)});
    nlohmann::json p{{"m", cfg.m}, {"L", cfg.L}, {"theta", cfg.theta},
                     {"beta", cfg.beta ? *cfg.beta : -1.0}};
    write_provenance(out_path(cfg.out_dir, "oracle.json"), "oracle", p.dump());
    return out;
}

ExactDecayFit fit_exact_decay_constants(double theta, const std::vector<int>& L_list,
                                        const std::vector<int>& m_list, int m_ref_extra) {
    ExactDecayFit fit;
    int m_ref = *std::max_element(m_list.begin(), m_list.end()) + m_ref_extra;
    std::vector<double> lnL, mm, lny;
    for (int L : L_list) {
        DensityMatrix ref = exact_reduced_ground_state(m_ref, L, theta, 1.0);
        for (int m : m_list) {
            DensityMatrix rho = exact_reduced_ground_state(m, L, theta, 1.0);
            double nrm = op_norm_diff(rho, ref);
            if (nrm <= 0) continue;
            fit.points.push_back({L, m, nrm});
            lnL.push_back(std::log(double(L)));
            mm.push_back(double(m));
            lny.push_back(std::log(nrm));
        }
    }
    size_t n = lny.size();
    if (n < 4) throw InsufficientDataError("fit_exact_decay_constants: too few points");
    // normal equations for ln y = lnC + alpha lnL - gamma m
    double s[3][3] = {{0}}, b[3] = {0};
    for (size_t i = 0; i < n; ++i) {
        double row[3] = {1.0, lnL[i], -mm[i]};
        for (int a = 0; a < 3; ++a) {
            b[a] += row[a] * lny[i];
            for (int c = 0; c < 3; ++c) s[a][c] += row[a] * row[c];
        }
    }
    // 3x3 solve by elimination
    double A[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) A[i][j] = s[i][j];
        A[i][3] = b[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        if (std::abs(A[col][col]) < 1e-300)
            throw InsufficientDataError("fit_exact_decay_constants: degenerate design");
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (int j = col; j < 4; ++j) A[r][j] -= f * A[col][j];
        }
    }
    fit.lnC = A[0][3] / A[0][0];
    fit.alpha = A[1][3] / A[1][1];
    fit.gamma = A[2][3] / A[2][2];
    // residual-based standard error for the gamma coordinate
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double pred = fit.lnC + fit.alpha * lnL[i] - fit.gamma * mm[i];
        rss += (lny[i] - pred) * (lny[i] - pred);
    }
    double sigma2 = rss / double(std::max<size_t>(1, n - 3));
    // variance of the m-coefficient from the inverse normal matrix (Cramer)
    double det = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) -
                 s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0]) +
                 s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
    double cof22 = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    fit.gamma_se = std::sqrt(std::max(0.0, sigma2 * cof22 / det));
    return fit;
}

}  // namespace ctising
