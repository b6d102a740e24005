#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

// Shared numeric kernel: descriptive statistics, midranks, and the
// distribution functions (normal, Student t, noncentral t) the test
// machinery is built on.

namespace veristyle::mathx {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double mean(std::span<const double> x) {
    if (x.empty()) return kNaN;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Sample variance (n-1 denominator).
inline double variance(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return kNaN;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) {
        const double d = v - m;
        ss += d * d;
    }
    return ss / static_cast<double>(n - 1);
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

inline double median(std::vector<double> x) {
    if (x.empty()) return kNaN;
    const std::size_t n = x.size();
    std::sort(x.begin(), x.end());
    if (n % 2 == 1) return x[n / 2];
    return 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

// Midranks: ties receive the average of the ranks they span. Ranks are 1-based.
inline std::vector<double> midranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Acklam's rational approximation with one Halley refinement step.
inline double normal_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

namespace detail {

// Continued fraction for the regularized incomplete beta function.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-15, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}

// Regularized incomplete beta I_x(a, b).
inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lnbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lnbt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * detail::betacf(a, b, x) / a;
    return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// P(T <= t) for Student t with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double p = 0.5 * ibeta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - p : p;
}

inline double student_t_two_sided_p(double t, double df) {
    if (std::isnan(t)) return 1.0;
    double p = 2.0 * student_t_cdf(-std::fabs(t), df);
    return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

// P(T <= t) for the noncentral t distribution with df degrees of freedom and
// noncentrality ncp, by termwise summation of the incomplete-beta series
// (Lenth 1989). Terms are added outward from the Poisson mode.
inline double noncentral_t_cdf(double t, double df, double ncp) {
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    if (t < 0.0) return 1.0 - noncentral_t_cdf(-t, df, -ncp);

    const double del = ncp;
    const double x = (t * t) / (t * t + df);
    double p = normal_cdf(-del);
    if (x <= 0.0) return std::clamp(p, 0.0, 1.0);

    const double lambda = 0.5 * del * del;
    // p_j: Poisson(lambda) mass; q_j: companion half-integer weights.
    double pj = std::exp(-lambda);
    double qj = std::exp(-lambda) * del / std::sqrt(2.0) * (2.0 / std::sqrt(M_PI));
    double sum = 0.0, pweight = pj;
    constexpr int kMaxTerms = 4000;
    for (int j = 0;; ++j) {
        const double ib1 = ibeta(j + 0.5, 0.5 * df, x);
        const double ib2 = ibeta(j + 1.0, 0.5 * df, x);
        sum += 0.5 * (pj * ib1 + qj * ib2);
        // Remaining Poisson mass bounds the truncation error.
        if ((1.0 - pweight) < 1e-13 && j > 2) break;
        if (j + 1 >= kMaxTerms) break;
        pj *= lambda / (j + 1.0);
        qj *= lambda / (j + 1.5);
        pweight += pj;
    }
    return std::clamp(p + sum, 0.0, 1.0);
}

// Solves noncentral_t_cdf(t, df, ncp) == target for ncp (the cdf is strictly
// decreasing in ncp). Used to build noncentral-t confidence intervals for
// standardized effect sizes.
inline double noncentral_t_ncp_for(double t, double df, double target) {
    double lo = t - 2.0, hi = t + 2.0;
    auto f = [&](double ncp) { return noncentral_t_cdf(t, df, ncp); };
    int guard = 0;
    while (f(lo) < target && guard++ < 200) lo -= std::max(1.0, std::fabs(lo) * 0.5);
    guard = 0;
    while (f(hi) > target && guard++ < 200) hi += std::max(1.0, std::fabs(hi) * 0.5);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-10 * (1.0 + std::fabs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

inline double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// atanh-based confidence interval for a correlation-like effect in [-1, 1].
// se_z is the standard error on the Fisher-z scale.
inline std::pair<double, double> fisher_z_ci(double r, double se_z, double level) {
    r = std::clamp(r, -0.999999999, 0.999999999);
    const double z = std::atanh(r);
    const double q = normal_quantile(0.5 + 0.5 * level);
    return {std::tanh(z - q * se_z), std::tanh(z + q * se_z)};
}

}
