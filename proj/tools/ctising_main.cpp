// Batch experiment driver: every subcommand runs one experiment, writes its
// CSV artifacts and a JSON provenance sidecar into --out (or CTISING_OUTDIR),
// and is byte-reproducible given the same configuration and seeds.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ctising/experiments.hpp"
#include "json.hpp"

using namespace ctising;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("CTISING_OUTDIR");
    return env ? env : ".";
}

// flat JSON config file; CLI flags override its values
nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return nlohmann::json::parse(in);
}

template <typename T>
void from_config(const nlohmann::json& j, const char* key, T& value) {
    if (j.contains(key)) value = j.at(key).get<T>();
}

int error_exit(const std::string& kind, const std::string& what, int code) {
    nlohmann::json err{{"error", kind}, {"what", what}};
    std::cerr << err.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuum random-cluster simulator for the transverse-field Ising chain"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = default_out_dir();
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--out", out_dir, "output directory");

    // decay-scan
    auto* sc_decay = app.add_subcommand("decay-scan", "percolation connectivity decay + branching bound");
    DecayScanConfig dcfg;
    sc_decay->add_option("--lambda", dcfg.lambda);
    sc_decay->add_option("--delta", dcfg.delta);
    sc_decay->add_option("--m", dcfg.m_list, "box radii");
    sc_decay->add_option("--trials", dcfg.trials);
    sc_decay->add_option("--seed", dcfg.seed);

    // rdm
    auto* sc_rdm = app.add_subcommand("rdm", "slit-box reduced density matrix vs dense oracle");
    RdmConfig rcfg;
    double rdm_theta = -1.0;
    sc_rdm->add_option("--m", rcfg.m);
    sc_rdm->add_option("--L", rcfg.L);
    sc_rdm->add_option("--beta", rcfg.beta);
    sc_rdm->add_option("--lambda", rcfg.lambda);
    sc_rdm->add_option("--delta", rcfg.delta);
    sc_rdm->add_option("--theta", rdm_theta, "sets lambda=theta, delta=1");
    sc_rdm->add_option("--sweeps", rcfg.sweeps);
    sc_rdm->add_option("--chains", rcfg.chains);
    sc_rdm->add_option("--seed", rcfg.seed);

    // norm-decay
    auto* sc_norm = app.add_subcommand("norm-decay", "reduced-state norm decay in m");
    NormDecayConfig ncfg;
    sc_norm->add_option("--theta", ncfg.theta);
    sc_norm->add_option("--L", ncfg.L);
    sc_norm->add_option("--m", ncfg.m_list);
    sc_norm->add_option("--sweeps", ncfg.sweeps_per_chain, "retained sweeps per chain");
    sc_norm->add_option("--chains", ncfg.chains);
    sc_norm->add_option("--seed", ncfg.seed);

    // entropy-scan
    auto* sc_ent = app.add_subcommand("entropy-scan", "block entropy vs L (MC + exact)");
    EntropyScanConfig ecfg;
    double eb_gamma = 0, eb_alpha = 0, eb_C = 0;
    sc_ent->add_option("--theta", ecfg.theta);
    sc_ent->add_option("--L", ecfg.L_list);
    sc_ent->add_option("--m-offset", ecfg.m_offset);
    sc_ent->add_option("--sweeps", ecfg.sweeps_per_chain);
    sc_ent->add_option("--chains", ecfg.chains);
    sc_ent->add_option("--seed", ecfg.seed);
    sc_ent->add_option("--bound-gamma", eb_gamma);
    sc_ent->add_option("--bound-alpha", eb_alpha);
    sc_ent->add_option("--bound-C", eb_C);
    sc_ent->add_option("--exact-cap", ecfg.exact_cap, "largest chain for the exact mode");

    // mixing-check
    auto* sc_mix = app.add_subcommand("mixing-check", "factorization, boundary influence, t-quantities");
    MixingConfig mcfg;
    double mix_theta = -1.0;
    sc_mix->add_option("--theta", mix_theta, "sets lambda=theta, delta=1");
    sc_mix->add_option("--lambda", mcfg.lambda);
    sc_mix->add_option("--delta", mcfg.delta);
    sc_mix->add_option("--L", mcfg.L);
    sc_mix->add_option("--m", mcfg.m);
    sc_mix->add_option("--K", mcfg.K_list);
    sc_mix->add_option("--m-scan", mcfg.m_list);
    sc_mix->add_option("--sweeps", mcfg.sweeps);
    sc_mix->add_option("--chains", mcfg.chains);
    sc_mix->add_option("--seed", mcfg.seed);

    // branching
    auto* sc_br = app.add_subcommand("branching", "branching-process tails and decay bound");
    BranchingConfig bcfg;
    sc_br->add_option("--lambda", bcfg.lambda);
    sc_br->add_option("--delta", bcfg.delta_list);
    sc_br->add_option("--trials", bcfg.trials);
    sc_br->add_option("--seed", bcfg.seed);

    // disorder-scan
    auto* sc_dis = app.add_subcommand("disorder-scan", "quenched environments and their events");
    DisorderScanConfig xcfg;
    std::vector<double> lam_spec{0.02, 0.2}, del_spec{0.9, 1.1};
    std::string lam_name = "uniform", del_name = "uniform";
    sc_dis->add_option("--lambda-dist", lam_name, "constant|uniform|lognormal");
    sc_dis->add_option("--lambda-params", lam_spec);
    sc_dis->add_option("--delta-dist", del_name);
    sc_dis->add_option("--delta-params", del_spec);
    sc_dis->add_option("--L", xcfg.L_list);
    sc_dis->add_option("--m", xcfg.m);
    sc_dis->add_option("--rho", xcfg.rho);
    sc_dis->add_option("--environments", xcfg.environments);
    sc_dis->add_option("--radii", xcfg.radii);
    sc_dis->add_option("--gamma", xcfg.gamma);
    sc_dis->add_option("--trials", xcfg.trials);
    sc_dis->add_option("--seed", xcfg.seed);

    // entropy-bound
    auto* sc_eb = app.add_subcommand("entropy-bound", "the entropy bound pipeline as a table");
    EntropyBoundConfig ebcfg;
    sc_eb->add_option("--gamma", ebcfg.gamma);
    sc_eb->add_option("--alpha", ebcfg.alpha);
    sc_eb->add_option("--C", ebcfg.C);
    sc_eb->add_option("--L", ebcfg.L_list);
    sc_eb->add_option("--m", ebcfg.m);

    // oracle
    auto* sc_or = app.add_subcommand("oracle", "dense exact reduced state, spectrum, entropy");
    OracleConfig ocfg;
    double or_beta = -1.0;
    sc_or->add_option("--m", ocfg.m);
    sc_or->add_option("--L", ocfg.L);
    sc_or->add_option("--theta", ocfg.theta);
    sc_or->add_option("--beta", or_beta, "thermal state; omit for the ground state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return error_exit("config", e.what(), 2);
    }

    try {
        nlohmann::json cfg = load_config(config_path);
        from_config(cfg, "out", out_dir);

        if (sc_decay->parsed()) {
            from_config(cfg, "lambda", dcfg.lambda);
            from_config(cfg, "delta", dcfg.delta);
            from_config(cfg, "m", dcfg.m_list);
            from_config(cfg, "trials", dcfg.trials);
            from_config(cfg, "seed", dcfg.seed);
            dcfg.out_dir = out_dir;
            run_decay_scan(dcfg);
        } else if (sc_rdm->parsed()) {
            from_config(cfg, "sweeps", rcfg.sweeps);
            from_config(cfg, "seed", rcfg.seed);
            if (rdm_theta > 0) {
                rcfg.lambda = rdm_theta;
                rcfg.delta = 1.0;
            }
            rcfg.out_dir = out_dir;
            run_rdm(rcfg);
        } else if (sc_norm->parsed()) {
            ncfg.out_dir = out_dir;
            run_norm_decay(ncfg);
        } else if (sc_ent->parsed()) {
            if (eb_gamma > 0 && eb_C > 0 && eb_alpha > 0)
                ecfg.bound = EntropyBoundParams{eb_gamma, eb_alpha, eb_C};
            ecfg.out_dir = out_dir;
            run_entropy_scan(ecfg);
        } else if (sc_mix->parsed()) {
            if (mix_theta > 0) {
                mcfg.lambda = mix_theta;
                mcfg.delta = 1.0;
            }
            mcfg.out_dir = out_dir;
            run_mixing_check(mcfg);
        } else if (sc_br->parsed()) {
            bcfg.out_dir = out_dir;
            run_branching(bcfg);
        } else if (sc_dis->parsed()) {
            xcfg.lambda_spec = {lam_name, lam_spec.size() > 0 ? lam_spec[0] : 0.0,
                                lam_spec.size() > 1 ? lam_spec[1] : 0.0};
            xcfg.delta_spec = {del_name, del_spec.size() > 0 ? del_spec[0] : 0.0,
                               del_spec.size() > 1 ? del_spec[1] : 0.0};
            xcfg.out_dir = out_dir;
            run_disorder_scan(xcfg);
        } else if (sc_eb->parsed()) {
            ebcfg.out_dir = out_dir;
            run_entropy_bound(ebcfg);
        } else if (sc_or->parsed()) {
            if (or_beta > 0) ocfg.beta = or_beta;
            ocfg.out_dir = out_dir;
            OracleOutcome o = run_oracle(ocfg);
            std::cout << "entropy_bits " << o.entropy << '\n';
        }
    } catch (const ConfigError& e) {
        return error_exit("config", e.what(), 2);
    } catch (const ContractError& e) {
        return error_exit("contract", e.what(), 3);
    } catch (const InsufficientDataError& e) {
        return error_exit("insufficient_data", e.what(), 4);
    } catch (const std::exception& e) {
        return error_exit("internal", e.what(), 1);
    }
    return 0;
}
