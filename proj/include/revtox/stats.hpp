#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "revtox/errors.hpp"

namespace revtox {
namespace stats {

namespace detail {

// Continued-fraction core of the regularized incomplete beta function
// (modified Lentz).
inline double betacf(double a, double b, double x) {
    constexpr double kTiny = 1e-30;
    constexpr double kEps = 1e-14;
    constexpr int kMaxIter = 500;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    return h;  // converged to working precision or hit the iteration cap
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b), accurate to well below
/// 1e-8 over the parameter ranges used by the t distribution.
inline double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw ConfigError("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom:
/// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double t_two_sided_p(double t, double df) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

struct TTestResult {
    double t = 0.0;  // NaN when the statistic is undefined (zero variance)
    double p = 1.0;
    double mean_difference = 0.0;
};

namespace detail {

inline TTestResult t_from_diffs(const std::vector<double>& diffs) {
    std::size_t n = diffs.size();
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult result;
    result.mean_difference = mean;
    if (sd == 0.0) {
        // zero variance: undefined statistic; all-zero differences mean
        // "no effect" (p = 1), a constant nonzero difference is an exact
        // effect (p = 0)
        if (mean == 0.0) {
            result.t = std::numeric_limits<double>::quiet_NaN();
            result.p = 1.0;
        } else {
            result.t = mean > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
            result.p = 0.0;
        }
        return result;
    }
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.p = t_two_sided_p(result.t, static_cast<double>(n - 1));
    return result;
}

}  // namespace detail

/// Paired-sample t test over per-run metric lists (paired by run index).
inline TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ConfigError("paired_t_test: lists differ in length");
    if (a.size() < 2) throw ConfigError("paired_t_test: need at least two pairs");
    std::vector<double> diffs(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
    return detail::t_from_diffs(diffs);
}

/// One-sample t test against the fixed mean mu0.
inline TTestResult one_sample_t_test(const std::vector<double>& samples, double mu0) {
    if (samples.size() < 2) throw ConfigError("one_sample_t_test: need at least two samples");
    std::vector<double> diffs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) diffs[i] = samples[i] - mu0;
    return detail::t_from_diffs(diffs);
}

/// Cohen's kappa for two binary raters: (p_o - p_e) / (1 - p_e), with
/// chance agreement p_e taken from the marginals. Two constant, equal
/// raters (p_e = 1) define kappa as 1.
inline double cohen_kappa(const std::vector<int>& rater_a, const std::vector<int>& rater_b) {
    if (rater_a.size() != rater_b.size()) throw ConfigError("cohen_kappa: lists differ in length");
    if (rater_a.empty()) throw ConfigError("cohen_kappa: empty label lists");
    double n = static_cast<double>(rater_a.size());
    double agree = 0.0, a1 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < rater_a.size(); ++i) {
        if (rater_a[i] == rater_b[i]) ++agree;
        a1 += rater_a[i];
        b1 += rater_b[i];
    }
    double po = agree / n;
    double pa1 = a1 / n, pb1 = b1 / n;
    double pe = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);
    if (pe == 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

}  // namespace stats
}  // namespace revtox
