#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "ctising/disorder.hpp"

using namespace ctising;

TEST_CASE("point-mass environments reduce to the homogeneous model") {
    Environment env = sample_environment({"constant", 0.4, 0}, {"constant", 1.2, 0}, -3, 8, 5);
    for (int x = -3; x <= 8; ++x) CHECK(env.delta_at(x) == 1.2);
    for (int x = -3; x < 8; ++x) CHECK(env.lambda_at(x) == 0.4);
    CHECK(env.bounded_ratio);
    CHECK(env.ratio_bound == doctest::Approx(0.4 / 1.2));
}

TEST_CASE("bounded-ratio flag follows the distribution support") {
    Environment u = sample_environment({"uniform", 0.1, 0.3, }, {"uniform", 0.8, 1.2}, 0, 5, 6);
    CHECK(u.bounded_ratio);
    CHECK(u.ratio_bound == doctest::Approx(0.3 / 0.8));
    Environment ln = sample_environment({"lognormal", -2.0, 0.5}, {"constant", 1.0, 0}, 0, 5, 7);
    CHECK(!ln.bounded_ratio);
}

TEST_CASE("lognormal rates match their log-moment and the quadrature mean") {
    double mu = -1.5, sigma = 0.6;
    Environment env = sample_environment({"lognormal", mu, sigma}, {"constant", 1.0, 0}, 0, 20000, 8);
    RunningStat log_stat, z_stat;
    for (int x = 0; x < 20000; ++x) {
        log_stat.add(std::log(env.lambda_at(x)));
        z_stat.add(std::log(1.0 + env.lambda_at(x)));
    }
    CHECK(std::abs(log_stat.mean - mu) < 3.0 * log_stat.se());
    // independent quadrature for E ln(1 + lambda): midpoint rule over the
    // normal density
    double quad = 0.0, step = 16.0 / 40000.0;
    for (int i = 0; i < 40000; ++i) {
        double z = -8.0 + (i + 0.5) * step;
        double w = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979324);
        quad += w * std::log(1.0 + std::exp(mu + sigma * z)) * step;
    }
    CHECK(std::abs(z_stat.mean - quad) < 3.0 * z_stat.se());
}

TEST_CASE("unsupported distributions are a config error") {
    CHECK_THROWS_AS(sample_environment({"gamma", 1.0, 1.0}, {"constant", 1.0, 0}, 0, 3, 1),
                    ConfigError);
    CHECK_THROWS_AS(sample_environment({"uniform", -0.5, 1.0}, {"constant", 1.0, 0}, 0, 3, 1),
                    ConfigError);
}

TEST_CASE("environment file round trip") {
    Environment env = sample_environment({"uniform", 0.05, 0.2}, {"uniform", 0.9, 1.1}, -2, 12, 9);
    std::stringstream ss;
    write_environment(ss, env);
    Environment back = read_environment(ss);
    CHECK(back.x_min == env.x_min);
    CHECK(back.x_max == env.x_max);
    for (int x = env.x_min; x <= env.x_max; ++x)
        CHECK(back.delta_at(x) == env.delta_at(x));
    for (int x = env.x_min; x < env.x_max; ++x)
        CHECK(back.lambda_at(x) == env.lambda_at(x));
}

TEST_CASE("dq distance closed forms") {
    CHECK(dq_distance(3, 1.5, 3, 1.5, 1.0) == 0.0);
    CHECK(dq_distance(2, 0.0, 5, 0.9, 2.0) == 3.0);  // ln+ = 0 inside one unit
    double e2 = std::exp(2.0);
    CHECK(dq_distance(4, 0.0, 4, e2, 1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(dq_distance(0, 0, 0, 0, 0.5), ContractError);
}

TEST_CASE("X_L closed form on constant environments and the zero-coupling limit") {
    Environment env;
    env.x_min = -2;
    env.x_max = 20;
    env.delta_x.assign(23, 2.0);
    env.lambda_x.assign(22, 0.5);
    int L = 12;
    XlResult xl = compute_xl(env, L);
    int K = int(std::ceil(std::log(double(L))));
    CHECK(xl.K == K);
    CHECK(xl.ln_xl == doctest::Approx(-4.0 * K * std::log(1.0 + 2.0 * 0.5 / 2.0)));

    Environment zero = env;
    zero.lambda_x.assign(22, 0.0);
    CHECK(compute_xl(zero, L).xl == doctest::Approx(1.0));

    // recomputation from the Z trace reproduces X_L exactly
    double ln = 0.0;
    for (auto& [x, z] : xl.z_trace) ln -= 2.0 * z;
    CHECK(std::exp(ln) == doctest::Approx(xl.xl).epsilon(1e-15));

    CHECK_THROWS_AS(compute_xl(env, 4), ContractError);   // L >= 8 regime
    Environment narrow = env;
    narrow.x_min = 0;
    narrow.delta_x.resize(21);
    CHECK_THROWS_AS(compute_xl(narrow, L), ContractError);  // must cover [-1, L+1]
}

TEST_CASE("B_L^rho threshold behaves as the indicator") {
    Environment env;
    env.x_min = -1;
    env.x_max = 13;
    env.delta_x.assign(15, 1.0);
    env.lambda_x.assign(14, 0.3);
    int L = 12;
    XlResult xl = compute_xl(env, L);
    double z = std::log(1.0 + 2.0 * 0.3);
    // X_L = exp(-4K z); the indicator holds iff rho ln L >= 4 K z
    for (double rho : {0.5, 4.0 * xl.K * z / std::log(double(L)) + 0.5}) {
        bool indicator = xl.xl >= std::pow(double(L), -rho);
        bool analytic = rho * std::log(double(L)) >= 4.0 * xl.K * z;
        CHECK(indicator == analytic);
    }
}

TEST_CASE("environment events: trivial D_x and a planted violation") {
    Environment env;
    env.x_min = -10;
    env.x_max = 30;
    env.delta_x.assign(41, 1.0);
    env.lambda_x.assign(40, 0.1);
    int L = 12, m = 6;
    DxEstimates zero;
    for (int x = -10; x <= 30; ++x) {
        zero.dx[x] = 0.0;
        zero.censored[x] = false;
    }
    EnvironmentEvents ev = environment_events(env, L, m, 2.0, zero);
    CHECK(ev.a_l);
    CHECK(ev.c_lm);
    CHECK(ev.d_lm);

    DxEstimates bad = zero;
    bad.dx[L / 2] = double(L);
    EnvironmentEvents ev2 = environment_events(env, L, m, 2.0, bad);
    CHECK(!ev2.a_l);
    CHECK(ev2.a_witness == L / 2);

    DxEstimates missing;
    CHECK_THROWS_AS(environment_events(env, L, m, 2.0, missing), ContractError);
}

TEST_CASE("decay scan: homogeneous environments give homogeneous D_x") {
    Environment env = sample_environment({"constant", 0.08, 0}, {"constant", 1.0, 0}, -8, 16, 11);
    DecayScanResult scan =
        disordered_decay_scan(env, {2, 4, 6}, {1, 2, 3}, 1.1, 1.0, 400, 12);
    // translation invariance: the estimates at fixed r agree across sites
    for (int r : {1, 2, 3}) {
        std::vector<double> vals, ses;
        for (const auto& row : scan.rows)
            if (row.r == r) {
                vals.push_back(row.estimate);
                ses.push_back(row.se);
            }
        REQUIRE(vals.size() == 3);
        for (size_t i = 1; i < vals.size(); ++i)
            CHECK(std::abs(vals[i] - vals[0]) <
                  4.0 * std::max(1e-3, std::sqrt(ses[i] * ses[i] + ses[0] * ses[0])));
    }
    for (int x : {2, 4, 6}) CHECK(!scan.dx.is_censored(x));
}

TEST_CASE("decay scan: a coupling spike raises the local D_x") {
    Environment env = sample_environment({"constant", 0.05, 0}, {"constant", 1.0, 0}, -8, 16, 13);
    env.lambda_x[size_t(4 - env.x_min)] = 6.0;  // spike on the edge (4,5)
    env.lambda_x[size_t(3 - env.x_min)] = 6.0;  // and (3,4)
    DecayScanResult scan =
        disordered_decay_scan(env, {-2, 4, 10}, {1, 2}, 1.1, 1.0, 500, 14);
    CHECK(scan.dx.at(4) > scan.dx.at(-2));
    CHECK(scan.dx.at(4) > scan.dx.at(10));
}

TEST_CASE("decay scan domain guards") {
    Environment env = sample_environment({"constant", 0.1, 0}, {"constant", 1.0, 0}, 0, 4, 15);
    CHECK_THROWS_AS(disordered_decay_scan(env, {2}, {3}, 1.0, 1.0, 10, 1), ContractError);
    CHECK_THROWS_AS(disordered_decay_scan(env, {}, {1}, 1.0, 1.0, 10, 1), ContractError);
}

TEST_CASE("events are deterministic functions of their inputs") {
    Environment env = sample_environment({"uniform", 0.02, 0.15}, {"uniform", 0.9, 1.1}, -6, 20, 17);
    DecayScanResult s1 = disordered_decay_scan(env, {3, 5}, {1, 2}, 1.1, 1.0, 200, 18);
    DecayScanResult s2 = disordered_decay_scan(env, {3, 5}, {1, 2}, 1.1, 1.0, 200, 18);
    CHECK(s1.dx.dx == s2.dx.dx);
    for (size_t i = 0; i < s1.rows.size(); ++i)
        CHECK(s1.rows[i].estimate == s2.rows[i].estimate);
}
