#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "veristyle/error.hpp"
#include "veristyle/mathx.hpp"
#include "veristyle/rng.hpp"

// Statistics kernel: permutation t-tests (paired sign-flip and independent
// relabeling nulls), standardized effect sizes with noncentral-t confidence
// intervals, multiplicity corrections, Spearman rank correlation, the exact
// binomial test, and the Hopkins clusterability statistic.

namespace veristyle::stats {

enum class Method {
    PermTPaired,
    PermTIndependent,
    Spearman,
    BinomialExact,
    SignedRank,
};

enum class EffectKind { CohensDPaired, CohensDIndependent, SpearmanRho, RankR };

struct EffectSize {
    EffectKind kind = EffectKind::CohensDPaired;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double ci_level = 0.95;
};

struct TestResult {
    double statistic = 0.0;
    double p = 1.0;
    EffectSize effect;
    std::vector<std::size_t> n;  // sample size(s)
    Method method = Method::PermTPaired;
    int n_perm = 0;              // recorded for resampling methods
    std::uint64_t seed = 0;
};

inline constexpr double kRelTol = 1e-12;

// Matches |t*| >= |t| with a relative guard so the identity draw is never
// lost to floating-point noise.
inline bool at_least_as_extreme(double t_star, double t_obs) {
    if (std::isinf(t_obs)) return std::isinf(t_star);
    return std::fabs(t_star) >= std::fabs(t_obs) * (1.0 - kRelTol);
}

// --- effect-size confidence intervals ---------------------------------------

// CI for paired d_z = mean(d)/sd(d) by inverting the noncentral t
// distribution of t = d_z * sqrt(n) with n-1 degrees of freedom.
inline std::pair<double, double> cohens_d_paired_ci(double d_z, std::size_t n, double level) {
    if (!std::isfinite(d_z)) return {d_z, d_z};
    const double root_n = std::sqrt(static_cast<double>(n));
    const double t = d_z * root_n, df = static_cast<double>(n - 1);
    const double alpha = 1.0 - level;
    const double lo = mathx::noncentral_t_ncp_for(t, df, 1.0 - 0.5 * alpha);
    const double hi = mathx::noncentral_t_ncp_for(t, df, 0.5 * alpha);
    return {lo / root_n, hi / root_n};
}

// CI for pooled-SD Cohen's d between independent groups.
inline std::pair<double, double> cohens_d_independent_ci(double d, std::size_t na, std::size_t nb,
                                                         double level) {
    if (!std::isfinite(d)) return {d, d};
    const double fa = static_cast<double>(na), fb = static_cast<double>(nb);
    const double scale = std::sqrt(fa * fb / (fa + fb));
    const double t = d * scale, df = fa + fb - 2.0;
    const double alpha = 1.0 - level;
    const double lo = mathx::noncentral_t_ncp_for(t, df, 1.0 - 0.5 * alpha);
    const double hi = mathx::noncentral_t_ncp_for(t, df, 0.5 * alpha);
    return {lo / scale, hi / scale};
}

inline void recompute_ci(TestResult& r, double level) {
    switch (r.effect.kind) {
        case EffectKind::CohensDPaired: {
            auto [lo, hi] = cohens_d_paired_ci(r.effect.value, r.n.at(0), level);
            r.effect.ci_low = lo;
            r.effect.ci_high = hi;
            break;
        }
        case EffectKind::CohensDIndependent: {
            auto [lo, hi] = cohens_d_independent_ci(r.effect.value, r.n.at(0), r.n.at(1), level);
            r.effect.ci_low = lo;
            r.effect.ci_high = hi;
            break;
        }
        case EffectKind::SpearmanRho: {
            const double n = static_cast<double>(r.n.at(0));
            auto [lo, hi] = mathx::fisher_z_ci(r.effect.value, std::sqrt(1.06 / (n - 3.0)), level);
            r.effect.ci_low = lo;
            r.effect.ci_high = hi;
            break;
        }
        case EffectKind::RankR: {
            const double n = static_cast<double>(r.n.at(0));
            auto [lo, hi] = mathx::fisher_z_ci(r.effect.value, 1.0 / std::sqrt(std::max(n - 3.0, 1.0)), level);
            r.effect.ci_low = lo;
            r.effect.ci_high = hi;
            break;
        }
    }
    r.effect.ci_level = level;
}

// --- paired permutation t-test -----------------------------------------------

namespace detail {

inline double paired_t(std::span<const double> d) {
    const std::size_t n = d.size();
    const double m = mathx::mean(d);
    const double sd = mathx::stddev(d);
    if (sd == 0.0) {
        if (m == 0.0) return 0.0;
        return m > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return m / (sd / std::sqrt(static_cast<double>(n)));
}

inline double paired_t_signed(const std::vector<double>& d, std::uint32_t mask) {
    const std::size_t n = d.size();
    double sum = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = (mask >> i) & 1u ? -d[i] : d[i];
        sum += v;
        ss += v * v;
    }
    const double fn = static_cast<double>(n);
    const double m = sum / fn;
    const double var = (ss - fn * m * m) / (fn - 1.0);
    if (var <= 0.0) {
        if (m == 0.0) return 0.0;
        return m > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return m / std::sqrt(var / fn);
}

}

// Statistic is the paired t on d = x - y; the null is built from independent
// random sign flips of d; p = (1 + #{|t*| >= |t|}) / (n_perm + 1). When every
// difference is identical the test falls back to exact sign-flip enumeration
// (n <= 20) or refuses.
inline TestResult perm_t_paired(std::span<const double> x, std::span<const double> y,
                                int n_perm = 9999, std::uint64_t seed = 0, double ci_level = 0.95) {
    if (x.size() != y.size()) throw LengthMismatch("perm_t_paired: unequal sample sizes");
    const std::size_t n = x.size();
    if (n < 3) throw Error("perm_t_paired requires n >= 3");

    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - y[i];
    const double m = mathx::mean(d);
    const double sd = mathx::stddev(d);

    TestResult r;
    r.method = Method::PermTPaired;
    r.n = {n};
    r.seed = seed;
    r.effect.kind = EffectKind::CohensDPaired;
    r.effect.ci_level = ci_level;

    if (sd == 0.0) {
        if (m == 0.0) {
            r.statistic = 0.0;
            r.p = 1.0;
            return r;  // x == y exactly
        }
        if (n > 20) throw DegenerateVariance("perm_t_paired: constant nonzero differences, n > 20");
        // exact enumeration over all 2^n sign patterns
        const double t_obs = detail::paired_t(d);
        const std::uint32_t total = 1u << n;
        std::size_t count = 0;
        for (std::uint32_t mask = 0; mask < total; ++mask)
            if (at_least_as_extreme(detail::paired_t_signed(d, mask), t_obs)) ++count;
        r.statistic = t_obs;
        r.p = static_cast<double>(count) / static_cast<double>(total);
        r.n_perm = static_cast<int>(total);
        r.effect.value = t_obs > 0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
        r.effect.ci_low = r.effect.ci_high = r.effect.value;
        return r;
    }

    const double t_obs = m / (sd / std::sqrt(static_cast<double>(n)));
    auto rng = make_rng(seed);
    std::size_t count = 0;
    std::vector<double> flipped(n);
    for (int it = 0; it < n_perm; ++it) {
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 64 == 0) bits = rng();
            flipped[i] = (bits >> (i % 64)) & 1ULL ? -d[i] : d[i];
        }
        if (at_least_as_extreme(detail::paired_t(flipped), t_obs)) ++count;
    }
    r.statistic = t_obs;
    r.p = (1.0 + static_cast<double>(count)) / (static_cast<double>(n_perm) + 1.0);
    r.n_perm = n_perm;
    r.effect.value = m / sd;
    auto [lo, hi] = cohens_d_paired_ci(r.effect.value, n, ci_level);
    r.effect.ci_low = lo;
    r.effect.ci_high = hi;
    return r;
}

// --- independent permutation t-test -------------------------------------------

namespace detail {

inline double welch_t(std::span<const double> a, std::span<const double> b) {
    const double ma = mathx::mean(a), mb = mathx::mean(b);
    const double va = mathx::variance(a), vb = mathx::variance(b);
    const double se2 = va / static_cast<double>(a.size()) + vb / static_cast<double>(b.size());
    if (se2 <= 0.0) {
        if (ma == mb) return 0.0;
        return ma > mb ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return (ma - mb) / std::sqrt(se2);
}

inline double pooled_cohens_d(std::span<const double> a, std::span<const double> b) {
    const double ma = mathx::mean(a), mb = mathx::mean(b);
    const double va = mathx::variance(a), vb = mathx::variance(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    if (sp2 <= 0.0) {
        if (ma == mb) return 0.0;
        return ma > mb ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return (ma - mb) / std::sqrt(sp2);
}

// Visits every n-choose-k subset; calls fn with a membership mask.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<char> mask(n, 0);
    while (true) {
        std::fill(mask.begin(), mask.end(), 0);
        for (auto i : idx) mask[i] = 1;
        fn(mask);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}

// Welch t statistic with a random-relabeling null. Degenerate inputs (zero
// variance in both groups) fall back to exact relabeling enumeration when
// feasible.
inline TestResult perm_t_independent(std::span<const double> a, std::span<const double> b,
                                     int n_perm = 9999, std::uint64_t seed = 0,
                                     double ci_level = 0.95) {
    if (a.size() < 2 || b.size() < 2) throw Error("perm_t_independent requires >= 2 per group");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    TestResult r;
    r.method = Method::PermTIndependent;
    r.n = {na, nb};
    r.seed = seed;
    r.effect.kind = EffectKind::CohensDIndependent;
    r.effect.ci_level = ci_level;
    r.effect.value = detail::pooled_cohens_d(a, b);

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const double t_obs = detail::welch_t(a, b);
    r.statistic = t_obs;

    const bool degenerate = mathx::variance(a) == 0.0 && mathx::variance(b) == 0.0;
    if (degenerate) {
        if (mathx::mean(a) == mathx::mean(b)) {
            r.p = 1.0;
            r.effect.ci_low = r.effect.ci_high = 0.0;
            return r;
        }
        const double log_total = mathx::log_choose(static_cast<double>(n), static_cast<double>(na));
        if (log_total > std::log(2e5))
            throw DegenerateVariance("perm_t_independent: degenerate groups too large to enumerate");
        std::size_t count = 0, total = 0;
        std::vector<double> ga(na), gb(nb);
        detail::for_each_subset(n, na, [&](const std::vector<char>& mask) {
            std::size_t ia = 0, ib = 0;
            for (std::size_t i = 0; i < n; ++i)
                (mask[i] ? ga[ia++] : gb[ib++]) = pooled[i];
            if (at_least_as_extreme(detail::welch_t(ga, gb), t_obs)) ++count;
            ++total;
        });
        r.p = static_cast<double>(count) / static_cast<double>(total);
        r.n_perm = static_cast<int>(total);
        r.effect.ci_low = r.effect.ci_high = r.effect.value;
        return r;
    }

    auto rng = make_rng(seed);
    std::size_t count = 0;
    std::vector<double> shuffled = pooled;
    for (int it = 0; it < n_perm; ++it) {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const double t_star = detail::welch_t(std::span(shuffled).first(na), std::span(shuffled).subspan(na));
        if (at_least_as_extreme(std::isnan(t_star) ? 0.0 : t_star, t_obs)) ++count;
    }
    r.p = (1.0 + static_cast<double>(count)) / (static_cast<double>(n_perm) + 1.0);
    r.n_perm = n_perm;
    auto [lo, hi] = cohens_d_independent_ci(r.effect.value, na, nb, ci_level);
    r.effect.ci_low = lo;
    r.effect.ci_high = hi;
    return r;
}

// --- multiplicity corrections --------------------------------------------------

// p_adj = min(1, m*p); intervals retightened to level 1 - alpha/m.
inline std::vector<TestResult> bonferroni(std::vector<TestResult> results, std::size_t m,
                                          double alpha = 0.05) {
    if (m < results.size()) throw Error("bonferroni: m must cover all results");
    for (auto& r : results) {
        r.p = std::min(1.0, static_cast<double>(m) * r.p);
        recompute_ci(r, 1.0 - alpha / static_cast<double>(m));
    }
    return results;
}

// Benjamini-Hochberg step-up adjusted p-values.
inline std::vector<double> fdr_bh(std::span<const double> pvalues) {
    const std::size_t m = pvalues.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pvalues[i] < pvalues[j]; });
    std::vector<double> adjusted(m, 0.0);
    double running = 1.0;
    for (std::size_t k = m; k > 0; --k) {
        const std::size_t i = order[k - 1];
        const double candidate = pvalues[i] * static_cast<double>(m) / static_cast<double>(k);
        running = std::min(running, candidate);
        // adjusted p can never fall below the raw p; guards rounding at k == m
        adjusted[i] = std::max(std::min(1.0, running), pvalues[i]);
    }
    return adjusted;
}

// --- Spearman -------------------------------------------------------------------

struct SpearmanResult {
    double rho = 0.0;
    double s = 0.0;  // sum of squared rank differences
    double p = 1.0;
    std::size_t n = 0;
};

// Midranks for ties; S = sum((rank_x - rank_y)^2); rho from the closed form
// when tie-free, else Pearson on ranks; p from the t approximation with n-2
// degrees of freedom.
inline SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("spearman: unequal sample sizes");
    const std::size_t n = x.size();
    if (n < 3) throw Error("spearman requires n >= 3");
    auto constant = [](std::span<const double> v) {
        return *std::max_element(v.begin(), v.end()) == *std::min_element(v.begin(), v.end());
    };
    if (constant(x) || constant(y)) throw ConstantInput();

    const auto rx = mathx::midranks(x);
    const auto ry = mathx::midranks(y);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = rx[i] - ry[i];
        s += d * d;
    }
    auto has_ties = [](const std::vector<double>& r) {
        for (double v : r)
            if (v != std::floor(v)) return true;
        std::vector<double> sorted(r);
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    };

    SpearmanResult out;
    out.n = n;
    out.s = s;
    const double fn = static_cast<double>(n);
    if (!has_ties(rx) && !has_ties(ry)) {
        out.rho = 1.0 - 6.0 * s / (fn * (fn * fn - 1.0));
    } else {
        const double mr = (fn + 1.0) / 2.0;
        double num = 0.0, dx = 0.0, dy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += (rx[i] - mr) * (ry[i] - mr);
            dx += (rx[i] - mr) * (rx[i] - mr);
            dy += (ry[i] - mr) * (ry[i] - mr);
        }
        out.rho = num / std::sqrt(dx * dy);
    }
    const double rho2 = std::min(out.rho * out.rho, 1.0 - 1e-15);
    const double t = out.rho * std::sqrt((fn - 2.0) / (1.0 - rho2));
    out.p = mathx::student_t_two_sided_p(t, fn - 2.0);
    return out;
}

// --- exact binomial test ----------------------------------------------------------

// Two-sided exact binomial p: the total probability of outcomes no more
// likely than the observed one.
inline double binomial_exact(std::size_t successes, std::size_t n, double p0 = 0.5) {
    if (successes > n) throw Error("binomial_exact: successes > n");
    if (n == 0) return 1.0;
    const double logp = std::log(p0), logq = std::log1p(-p0);
    auto log_pmf = [&](std::size_t k) {
        return mathx::log_choose(static_cast<double>(n), static_cast<double>(k)) +
               static_cast<double>(k) * logp + static_cast<double>(n - k) * logq;
    };
    const double obs = log_pmf(successes);
    double total = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double lp = log_pmf(k);
        if (lp <= obs + 1e-7) total += std::exp(lp);
    }
    return std::min(total, 1.0);
}

// --- Hopkins clusterability --------------------------------------------------------

// H = sum(w) / (sum(w) + sum(u)) where w are nearest-neighbour distances
// among m sampled real points and u are nearest-real-point distances from m
// uniform draws in the bounding box. Uniform data sits near 0.5; clustered
// data sinks toward 0.
inline double hopkins(const std::vector<std::vector<double>>& data, std::size_t m,
                      std::uint64_t seed = 0) {
    const std::size_t n = data.size();
    if (m < 5 || n < 2 * m) throw TooFewPoints("hopkins requires m >= 5 and n >= 2m");
    const std::size_t dim = data.front().size();

    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& row : data)
        for (std::size_t j = 0; j < dim; ++j) {
            lo[j] = std::min(lo[j], row[j]);
            hi[j] = std::max(hi[j], row[j]);
        }

    auto sq_dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = a[j] - b[j];
            s += d * d;
        }
        return s;
    };

    auto rng = make_rng(seed);
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    std::shuffle(indices.begin(), indices.end(), rng);

    double sum_w = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t self = indices[i];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == self) continue;
            best = std::min(best, sq_dist(data[self], data[j]));
        }
        sum_w += std::sqrt(best);
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double sum_u = 0.0;
    std::vector<double> point(dim);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < dim; ++j) point[j] = lo[j] + unit(rng) * (hi[j] - lo[j]);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) best = std::min(best, sq_dist(point, data[j]));
        sum_u += std::sqrt(best);
    }
    const double denom = sum_w + sum_u;
    return denom == 0.0 ? 0.5 : sum_w / denom;
}

}
