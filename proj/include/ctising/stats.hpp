#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ctising/errors.hpp"

namespace ctising {

// Welford running mean/variance.
struct RunningStat {
    uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double sd() const { return std::sqrt(variance()); }
    double se() const { return n > 0 ? sd() / std::sqrt(double(n)) : 0.0; }
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// Mean and standard error from per-batch means.
inline Estimate batch_mean_estimate(const std::vector<double>& batch_means) {
    RunningStat s;
    for (double b : batch_means) s.add(b);
    return {s.mean, s.se()};
}

inline double binomial_se(double p, uint64_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / double(n));
}

// Delta-method SE for a ratio a/b of two estimates with independent errors.
inline double ratio_se(double a, double se_a, double b, double se_b) {
    if (b == 0.0) return 0.0;
    double r = a / b;
    return std::abs(r) * std::sqrt((a != 0.0 ? (se_a / a) * (se_a / a) : 0.0) +
                                   (se_b / b) * (se_b / b));
}

// Jackknife SE of f over leave-one-out batch estimates that were already computed.
inline double jackknife_se(const std::vector<double>& leave_one_out) {
    size_t n = leave_one_out.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : leave_one_out) mean += v;
    mean /= double(n);
    double ss = 0.0;
    for (double v : leave_one_out) ss += (v - mean) * (v - mean);
    return std::sqrt(ss * double(n - 1) / double(n));
}

struct WlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double chi2 = 0.0;
    int n_points = 0;
};

// Weighted least squares y = intercept + slope*x, weights w_i = 1/sigma_i^2.
inline WlsFit wls_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& sigma) {
    if (x.size() != y.size() || x.size() != sigma.size())
        throw ContractError("wls_line: size mismatch");
    if (x.size() < 2) throw InsufficientDataError("wls_line: need at least 2 points");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double s = sigma[i] > 0 ? sigma[i] : 1e-12;
        double w = 1.0 / (s * s);
        sw += w;
        swx += w * x[i];
        swy += w * y[i];
        swxx += w * x[i] * x[i];
        swxy += w * x[i] * y[i];
    }
    double det = sw * swxx - swx * swx;
    if (det <= 0) throw InsufficientDataError("wls_line: degenerate design");
    WlsFit f;
    f.slope = (sw * swxy - swx * swy) / det;
    f.intercept = (swxx * swy - swx * swxy) / det;
    f.slope_se = std::sqrt(sw / det);
    f.intercept_se = std::sqrt(swxx / det);
    f.n_points = int(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double s = sigma[i] > 0 ? sigma[i] : 1e-12;
        double r = (y[i] - f.intercept - f.slope * x[i]) / s;
        f.chi2 += r * r;
    }
    return f;
}

// Two-sample Kolmogorov-Smirnov distance between empirical distributions.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InsufficientDataError("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace ctising
