#include "ctising/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace ctising {

void DistributionSpec::validate() const {
    if (name == "constant") {
        if (!(p1 > 0.0)) throw ConfigError("constant distribution needs a positive value");
    } else if (name == "uniform") {
        if (!(0.0 < p1 && p1 < p2)) throw ConfigError("uniform distribution needs 0 < lo < hi");
    } else if (name == "lognormal") {
        if (!(p2 > 0.0)) throw ConfigError("lognormal distribution needs sigma > 0");
    } else {
        throw ConfigError("unsupported distribution '" + name + "'");
    }
}

double DistributionSpec::sample(Rng& rng) const {
    if (name == "constant") return p1;
    if (name == "uniform") return p1 + (p2 - p1) * rng.next_unit();
    if (name == "lognormal") return std::exp(p1 + p2 * rng.normal());
    throw ConfigError("unsupported distribution '" + name + "'");
}

bool DistributionSpec::bounded_below_positive() const {
    return name == "constant" || name == "uniform";
}

double DistributionSpec::upper_bound() const {
    if (name == "constant") return p1;
    if (name == "uniform") return p2;
    throw ContractError("upper_bound: distribution unbounded");
}

double DistributionSpec::lower_bound() const {
    if (name == "constant") return p1;
    if (name == "uniform") return p1;
    throw ContractError("lower_bound: distribution unbounded");
}

double Environment::delta_at(int x) const {
    if (x < x_min || x > x_max) throw ContractError("environment: site out of range");
    return delta_x[size_t(x - x_min)];
}

double Environment::lambda_at(int x) const {
    if (x < x_min || x >= x_max) throw ContractError("environment: edge out of range");
    return lambda_x[size_t(x - x_min)];
}

Environment sample_environment(const DistributionSpec& lambda_spec,
                               const DistributionSpec& delta_spec, int x_min, int x_max,
                               uint64_t seed) {
    lambda_spec.validate();
    delta_spec.validate();
    if (x_min >= x_max) throw ContractError("sample_environment: need x_min < x_max");
    Environment env;
    env.x_min = x_min;
    env.x_max = x_max;
    env.lambda_spec = lambda_spec;
    env.delta_spec = delta_spec;
    env.seed = seed;
    // rates are keyed by (seed, site), so enlarging the range extends an
    // environment without redrawing the shared sites
    auto site_key = [](int x) { return uint64_t(int64_t(x) + (int64_t(1) << 32)); };
    for (int x = x_min; x <= x_max; ++x) {
        Rng r(Rng::derive(seed, 0xd0, site_key(x)));
        env.delta_x.push_back(delta_spec.sample(r));
    }
    for (int x = x_min; x < x_max; ++x) {
        Rng r(Rng::derive(seed, 0x1a, site_key(x)));
        env.lambda_x.push_back(lambda_spec.sample(r));
    }
    if (lambda_spec.bounded_above() && delta_spec.bounded_below_positive()) {
        env.bounded_ratio = true;
        env.ratio_bound = lambda_spec.upper_bound() / delta_spec.lower_bound();
    }
    return env;
}

void write_environment(std::ostream& os, const Environment& env) {
    nlohmann::json spec = {
        {"x_min", env.x_min},
        {"x_max", env.x_max},
        {"seed", env.seed},
        {"lambda", {{"name", env.lambda_spec.name}, {"p1", env.lambda_spec.p1}, {"p2", env.lambda_spec.p2}}},
        {"delta", {{"name", env.delta_spec.name}, {"p1", env.delta_spec.p1}, {"p2", env.delta_spec.p2}}},
    };
    os << "# " << spec.dump() << '\n';
    os << "x,delta_x,lambda_x_xplus1\n";
    char buf[96];
    for (int x = env.x_min; x <= env.x_max; ++x) {
        double lam = x < env.x_max ? env.lambda_at(x) : 0.0;
        snprintf(buf, sizeof buf, "%d,%.17g,%.17g", x, env.delta_at(x), lam);
        os << buf << '\n';
    }
}

Environment read_environment(std::istream& is) {
    Environment env;
    std::string line;
    bool have_spec = false;
    std::vector<std::pair<int, std::pair<double, double>>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto spec = nlohmann::json::parse(line.substr(1));
            env.x_min = spec["x_min"];
            env.x_max = spec["x_max"];
            env.seed = spec["seed"];
            env.lambda_spec = {spec["lambda"]["name"], spec["lambda"]["p1"], spec["lambda"]["p2"]};
            env.delta_spec = {spec["delta"]["name"], spec["delta"]["p1"], spec["delta"]["p2"]};
            have_spec = true;
            continue;
        }
        if (line.rfind("x,", 0) == 0) continue;  // header
        std::istringstream ss(line);
        int x;
        double d, l;
        char comma;
        ss >> x >> comma >> d >> comma >> l;
        if (!ss) throw ContractError("read_environment: malformed row");
        rows.push_back({x, {d, l}});
    }
    if (!have_spec) throw ContractError("read_environment: missing spec header");
    std::sort(rows.begin(), rows.end());
    for (auto& [x, dl] : rows) {
        env.delta_x.push_back(dl.first);
        if (x < env.x_max) env.lambda_x.push_back(dl.second);
    }
    if (int(env.delta_x.size()) != env.sites())
        throw ContractError("read_environment: row count does not match the range");
    if (env.lambda_spec.bounded_above() && env.delta_spec.bounded_below_positive()) {
        env.bounded_ratio = true;
        env.ratio_bound = env.lambda_spec.upper_bound() / env.delta_spec.lower_bound();
    }
    return env;
}

double dq_distance(int x, double s, int y, double t, double q) {
    if (q < 1.0) throw ContractError("dq_distance: q must be >= 1");
    double lnp = std::max(0.0, std::log(std::abs(s - t)));
    return std::max(double(std::abs(x - y)), std::pow(lnp, q));
}

XlResult compute_xl(const Environment& env, int L, std::optional<int> K_opt) {
    if (L < 8) throw ContractError("compute_xl: regime requires L >= 8");
    if (!env.covers(-1, L + 1)) throw ContractError("compute_xl: environment must cover [-1, L+1]");
    XlResult out;
    out.K = K_opt ? *K_opt : int(std::ceil(std::log(double(L))));
    auto z_at = [&](int x) {
        return std::log(1.0 + (env.lambda_at(x - 1) + env.lambda_at(x)) / env.delta_at(x));
    };
    double ln_xl = 0.0;
    for (int x = 0; x <= out.K - 1; ++x) {
        double z = z_at(x);
        out.z_trace.push_back({x, z});
        ln_xl -= 2.0 * z;
    }
    for (int x = L - out.K + 1; x <= L; ++x) {
        double z = z_at(x);
        out.z_trace.push_back({x, z});
        ln_xl -= 2.0 * z;
    }
    out.ln_xl = ln_xl;
    out.xl = std::exp(ln_xl);
    return out;
}

double DxEstimates::at(int x) const {
    auto it = dx.find(x);
    if (it == dx.end()) throw ContractError("Dx source is missing site " + std::to_string(x));
    return it->second;
}

bool DxEstimates::is_censored(int x) const {
    auto it = censored.find(x);
    return it != censored.end() && it->second;
}

EnvironmentEvents environment_events(const Environment& env, int L, int m, double rho,
                                     const DxEstimates& dx) {
    (void)env;
    EnvironmentEvents ev;
    ev.rho = rho;
    int K = int(std::ceil(std::log(double(L))));

    ev.a_l = true;
    for (int x = K; x <= L - K; ++x) {
        double bound = std::min(x, L - x);
        if (dx.is_censored(x) || !(dx.at(x) < bound)) {
            ev.a_l = false;
            if (!ev.a_witness) ev.a_witness = x;
        }
    }

    int k = m / 2;
    ev.c_lm = true;
    for (int x = 0; x <= L; ++x) {
        double bound = 0.5 * std::min(k + x, L + k - x);
        if (dx.is_censored(x) || !(dx.at(x) < bound)) {
            ev.c_lm = false;
            if (!ev.c_witness) ev.c_witness = x;
        }
    }

    ev.d_lm = true;
    for (int x = -k; x <= L + k; ++x) {
        double bound = std::min(m + x, L + m - x);
        if (dx.is_censored(x) || !(dx.at(x) < bound)) {
            ev.d_lm = false;
            if (!ev.d_witness) ev.d_witness = x;
        }
    }
    return ev;
}

DecayScanResult disordered_decay_scan(const Environment& env, const std::vector<int>& sites,
                                      const std::vector<int>& radii, double gamma, double q,
                                      uint64_t trials, uint64_t seed, double time_cap) {
    if (radii.empty() || sites.empty()) throw ContractError("decay scan: empty site or radius list");
    if (!(gamma > 0.0)) throw ContractError("decay scan: gamma must be > 0");
    std::vector<int> rs = radii;
    std::sort(rs.begin(), rs.end());
    DecayScanResult out;
    out.dx.gamma = gamma;
    out.dx.q = q;

    for (int x0 : sites) {
        std::vector<double> est(rs.size(), 0.0);
        for (size_t ri = 0; ri < rs.size(); ++ri) {
            int r = rs[ri];
            if (!env.covers(x0 - r, x0 + r))
                throw ContractError("decay scan: environment does not cover the scan box");
            double t_extent = std::exp(std::pow(double(r), 1.0 / q));
            if (t_extent > time_cap) {
                t_extent = time_cap;
                out.capped = true;
            }
            SpaceTimeBox box = SpaceTimeBox::plain(x0 - r, x0 + r, -t_extent, t_extent);
            std::vector<double> lam, del;
            for (int x = box.x_min; x <= box.x_max; ++x) del.push_back(env.delta_at(x));
            for (int x = box.x_min; x < box.x_max; ++x) lam.push_back(env.lambda_at(x));
            uint64_t hits = 0;
            for (uint64_t tr = 0; tr < trials; ++tr) {
                Configuration omega =
                    sample_percolation(box, lam, del, Rng::derive(seed, uint64_t(x0) * 131 + uint64_t(r), tr));
                ClusterLabelling lab(box, omega, BoundaryRule::free_rule());
                int origin = lab.interval_at(x0, 0.0, -1);
                int root = lab.root_of(origin);
                bool hit = false;
                for (int l = 0; l < lab.num_lines() && !hit; ++l) {
                    int x = box.site_of_line(l);
                    if (x == box.x_min || x == box.x_max) {
                        for (int iv = lab.first_interval(l); iv <= lab.last_interval(l) && !hit; ++iv)
                            if (lab.root_of(iv) == root) hit = true;
                    } else if (lab.root_of(lab.first_interval(l)) == root ||
                               lab.root_of(lab.last_interval(l)) == root) {
                        hit = true;
                    }
                }
                if (hit) ++hits;
            }
            double p = double(hits) / double(trials);
            est[ri] = p;
            DecayScanRow row;
            row.x = x0;
            row.r = r;
            row.estimate = p;
            row.se = binomial_se(p, trials);
            row.reference = std::exp(-gamma * r);
            out.rows.push_back(row);
        }
        // smallest r whose whole scanned tail sits under the envelope
        int dx_val = rs.back() + 1;
        bool censored = true;
        for (size_t ri = 0; ri < rs.size(); ++ri) {
            bool ok = true;
            for (size_t rj = ri; rj < rs.size(); ++rj)
                if (est[rj] > std::exp(-gamma * rs[rj])) ok = false;
            if (ok) {
                dx_val = rs[ri];
                censored = false;
                break;
            }
        }
        out.dx.dx[x0] = dx_val;
        out.dx.censored[x0] = censored;
    }
    return out;
}

}  // namespace ctising
