#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "veristyle/cv.hpp"
#include "veristyle/error.hpp"
#include "veristyle/logistic.hpp"
#include "veristyle/mathx.hpp"
#include "veristyle/rng.hpp"
#include "veristyle/stats.hpp"

// Liar-profile analytics: social-desirability residualization of the four
// lying-profile factors, k-means clustering with a method-agreement k
// selection suite, logistic validation of the cluster labels, and group
// comparisons on the lie-annotation measures.

namespace veristyle::profiles {

inline constexpr std::array<const char*, 4> kFactorNames = {"frequency", "ability", "negativity",
                                                            "contextuality"};

struct AdjustedProfileMatrix {
    std::vector<std::vector<double>> rows;                  // participants x 4 factors
    std::array<std::array<double, 3>, 4> coefficients{};    // per factor: intercept, sde, im
};

namespace detail {

// Least squares through normal equations; design columns are linearly
// independent by construction (degenerate regressors dropped upstream).
inline std::vector<double> ols(const std::vector<std::vector<double>>& design,
                               const std::vector<double>& y) {
    const std::size_t n = design.size(), p = design.front().size();
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < p; ++c) a[r][c] += design[i][r] * design[i][c];
            a[r][p] += design[i][r] * y[i];
        }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        if (std::fabs(a[col][col]) < 1e-12) throw RankDeficient();
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= p; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t r = 0; r < p; ++r) beta[r] = a[r][p] / a[r][r];
    return beta;
}

}

// Per factor: OLS on 1 + SDE + IM; adjusted value = residual + factor mean,
// which keeps the sample mean and zeroes the correlation with both
// regressors. Constant regressors drop out (regression on constants leaves
// the factor untouched); exactly collinear non-constant regressors raise
// RankDeficient.
inline AdjustedProfileMatrix adjust_for_bidr(const std::vector<std::vector<double>>& factors,
                                             const std::vector<double>& sde,
                                             const std::vector<double>& im) {
    const std::size_t n = factors.size();
    if (n < 3) throw TooFewRows("adjust_for_bidr requires >= 3 participants");
    if (sde.size() != n || im.size() != n)
        throw LengthMismatch("adjust_for_bidr: misaligned rows");

    const double var_sde = mathx::variance(sde), var_im = mathx::variance(im);
    const bool use_sde = var_sde > 1e-24, use_im = var_im > 1e-24;
    if (use_sde && use_im) {
        double num = 0.0;
        const double ms = mathx::mean(sde), mi = mathx::mean(im);
        for (std::size_t i = 0; i < n; ++i) num += (sde[i] - ms) * (im[i] - mi);
        const double corr = num / (static_cast<double>(n - 1) * std::sqrt(var_sde * var_im));
        if (std::fabs(corr) > 1.0 - 1e-12) throw RankDeficient();
    }

    std::vector<std::vector<double>> design(n);
    for (std::size_t i = 0; i < n; ++i) {
        design[i].push_back(1.0);
        if (use_sde) design[i].push_back(sde[i]);
        if (use_im) design[i].push_back(im[i]);
    }

    AdjustedProfileMatrix out;
    out.rows.assign(n, std::vector<double>(4, 0.0));
    for (std::size_t f = 0; f < 4; ++f) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = factors[i][f];
        const double y_mean = mathx::mean(y);
        if (!use_sde && !use_im) {
            for (std::size_t i = 0; i < n; ++i) out.rows[i][f] = y[i];
            out.coefficients[f] = {y_mean, 0.0, 0.0};
            continue;
        }
        const auto beta = detail::ols(design, y);
        out.coefficients[f] = {beta[0], use_sde ? beta[1] : 0.0,
                               use_im ? beta[use_sde ? 2 : 1] : 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            double fitted = 0.0;
            for (std::size_t c = 0; c < beta.size(); ++c) fitted += beta[c] * design[i][c];
            out.rows[i][f] = (y[i] - fitted) + y_mean;
        }
    }
    return out;
}

// --- k-means ------------------------------------------------------------------

struct ClusterSolution {
    int k = 0;
    std::vector<int> assignments;
    std::vector<std::vector<double>> centroids;
    double explained_variance = 0.0;  // between-cluster SS / total SS
    double wss = 0.0;
    std::map<std::string, int> votes;  // filled by select_k_agreement callers
};

namespace detail {

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

inline std::vector<std::vector<double>> kmeanspp_seed(const std::vector<std::vector<double>>& data,
                                                      int k, std::mt19937_64& rng) {
    const std::size_t n = data.size();
    std::vector<std::vector<double>> centers;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(data[first(rng)]);
    std::vector<double> dist(n, 0.0);
    while (centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, sq_dist(data[i], c));
            dist[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(data[first(rng)]);
            continue;
        }
        std::uniform_real_distribution<double> unit(0.0, total);
        double r = unit(rng);
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            r -= dist[i];
            if (r <= 0.0) {
                chosen = i;
                break;
            }
        }
        centers.push_back(data[chosen]);
    }
    return centers;
}

struct LloydResult {
    std::vector<int> assignments;
    std::vector<std::vector<double>> centroids;
    double wss = 0.0;
};

inline LloydResult lloyd(const std::vector<std::vector<double>>& data,
                         std::vector<std::vector<double>> centers, int k) {
    const std::size_t n = data.size(), dim = data.front().size();
    std::vector<int> assignment(n, -1);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = sq_dist(data[i], centers[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                              std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            ++counts[c];
            for (std::size_t j = 0; j < dim; ++j) sums[c][j] += data[i][j];
        }
        for (int c = 0; c < k; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            if (counts[uc] == 0) {
                // reseed an empty cluster to the point farthest from its centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        sq_dist(data[i], centers[static_cast<std::size_t>(assignment[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers[uc] = data[far];
                assignment[far] = c;
                changed = true;
            } else {
                for (std::size_t j = 0; j < dim; ++j)
                    centers[uc][j] = sums[uc][j] / static_cast<double>(counts[uc]);
            }
        }
        if (!changed) break;
    }
    LloydResult out;
    out.assignments = std::move(assignment);
    out.centroids = std::move(centers);
    for (std::size_t i = 0; i < n; ++i)
        out.wss += sq_dist(data[i], out.centroids[static_cast<std::size_t>(out.assignments[i])]);
    return out;
}

inline double total_ss(const std::vector<std::vector<double>>& data) {
    const std::size_t n = data.size(), dim = data.front().size();
    std::vector<double> center(dim, 0.0);
    for (const auto& row : data)
        for (std::size_t j = 0; j < dim; ++j) center[j] += row[j];
    for (auto& c : center) c /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& row : data) ss += sq_dist(row, center);
    return ss;
}

}

// Lloyd's algorithm with k-means++ seeding; best of `restarts` by
// within-cluster sum of squares.
inline ClusterSolution kmeans(const std::vector<std::vector<double>>& data, int k,
                              std::uint64_t seed = 0, int restarts = 25) {
    if (k < 1) throw Error("kmeans requires k >= 1");
    if (data.size() < static_cast<std::size_t>(k))
        throw TooFewRows("kmeans: fewer rows than clusters");

    detail::LloydResult best;
    best.wss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        auto rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto seeded = detail::kmeanspp_seed(data, k, rng);
        auto result = detail::lloyd(data, std::move(seeded), k);
        if (result.wss < best.wss) best = std::move(result);
    }

    ClusterSolution out;
    out.k = k;
    out.assignments = std::move(best.assignments);
    out.centroids = std::move(best.centroids);
    out.wss = best.wss;
    const double tss = detail::total_ss(data);
    out.explained_variance = tss <= 0.0 || k == 1 ? 0.0 : 1.0 - best.wss / tss;
    return out;
}

// --- k selection by method agreement -------------------------------------------

struct KSelection {
    int k_best = 2;
    std::map<std::string, int> votes;        // index name -> voted k
    std::map<int, int> tally;                // k -> vote count
    std::vector<ClusterSolution> solutions;  // k = 1 .. k_max+1
};

namespace detail {

inline double silhouette(const std::vector<std::vector<double>>& data,
                         const ClusterSolution& sol) {
    const std::size_t n = data.size();
    const int k = sol.k;
    double total = 0.0;
    std::size_t counted = 0;
    std::vector<double> mean_dist(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
        std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto c = static_cast<std::size_t>(sol.assignments[j]);
            sum[c] += std::sqrt(sq_dist(data[i], data[j]));
            ++count[c];
        }
        const auto own = static_cast<std::size_t>(sol.assignments[i]);
        if (count[own] == 0) continue;  // singleton: silhouette defined as 0, skip
        const double a = sum[own] / static_cast<double>(count[own]);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            if (uc == own || count[uc] == 0) continue;
            b = std::min(b, sum[uc] / static_cast<double>(count[uc]));
        }
        if (!std::isfinite(b)) continue;
        total += (b - a) / std::max(a, b);
        ++counted;
    }
    return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

inline double calinski_harabasz(const std::vector<std::vector<double>>& data,
                                const ClusterSolution& sol) {
    const double n = static_cast<double>(data.size());
    const double tss = total_ss(data);
    const double bss = tss - sol.wss;
    const double k = static_cast<double>(sol.k);
    if (sol.wss <= 0.0) return std::numeric_limits<double>::infinity();
    return (bss / (k - 1.0)) / (sol.wss / (n - k));
}

inline double davies_bouldin(const std::vector<std::vector<double>>& data,
                             const ClusterSolution& sol) {
    const int k = sol.k;
    std::vector<double> scatter(static_cast<std::size_t>(k), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto c = static_cast<std::size_t>(sol.assignments[i]);
        scatter[c] += std::sqrt(sq_dist(data[i], sol.centroids[c]));
        ++count[c];
    }
    for (int c = 0; c < k; ++c)
        if (count[static_cast<std::size_t>(c)] > 0)
            scatter[static_cast<std::size_t>(c)] /= static_cast<double>(count[static_cast<std::size_t>(c)]);
    double total = 0.0;
    for (int a = 0; a < k; ++a) {
        double worst = 0.0;
        for (int b = 0; b < k; ++b) {
            if (a == b) continue;
            const double sep = std::sqrt(sq_dist(sol.centroids[static_cast<std::size_t>(a)],
                                                 sol.centroids[static_cast<std::size_t>(b)]));
            if (sep <= 0.0) continue;
            worst = std::max(worst, (scatter[static_cast<std::size_t>(a)] +
                                     scatter[static_cast<std::size_t>(b)]) /
                                        sep);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

inline double dunn(const std::vector<std::vector<double>>& data, const ClusterSolution& sol) {
    const std::size_t n = data.size();
    double min_between = std::numeric_limits<double>::infinity();
    double max_within = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::sqrt(sq_dist(data[i], data[j]));
            if (sol.assignments[i] == sol.assignments[j])
                max_within = std::max(max_within, d);
            else
                min_between = std::min(min_between, d);
        }
    if (max_within <= 0.0) return std::numeric_limits<double>::infinity();
    return min_between / max_within;
}

// Spherical-Gaussian BIC in the x-means style.
inline double spherical_bic(const std::vector<std::vector<double>>& data,
                            const ClusterSolution& sol) {
    const double n = static_cast<double>(data.size());
    const double d = static_cast<double>(data.front().size());
    const double k = static_cast<double>(sol.k);
    const double variance = sol.wss / (d * std::max(n - k, 1.0));
    if (variance <= 0.0) return std::numeric_limits<double>::infinity();
    std::vector<std::size_t> count(static_cast<std::size_t>(sol.k), 0);
    for (int a : sol.assignments) ++count[static_cast<std::size_t>(a)];
    double ll = 0.0;
    for (int c = 0; c < sol.k; ++c) {
        const double nc = static_cast<double>(count[static_cast<std::size_t>(c)]);
        if (nc <= 0.0) continue;
        ll += nc * std::log(nc / n) - 0.5 * nc * d * std::log(2.0 * M_PI * variance) -
              0.5 * d * (nc - (nc / n));
    }
    const double params = k * d + k;  // centroids + mixing weights (one shared variance)
    return ll - 0.5 * params * std::log(n);
}

}

// Seven k-selection indices, each voting for one k in [2, k_max]: within-SS
// elbow (max second difference), average silhouette, Calinski-Harabasz,
// Davies-Bouldin, gap statistic with uniform references, Dunn index, and a
// spherical-Gaussian BIC. Majority vote wins; ties go to the smallest k.
inline KSelection select_k_agreement(const std::vector<std::vector<double>>& data, int k_max = 6,
                                     std::uint64_t seed = 0, int gap_references = 50,
                                     int restarts = 25) {
    if (data.size() < static_cast<std::size_t>(k_max) + 1)
        throw TooFewRows("select_k_agreement: need more rows than k_max");

    KSelection sel;
    // solutions for k = 1 .. k_max+1 share one seed schedule
    for (int k = 1; k <= k_max + 1; ++k)
        sel.solutions.push_back(kmeans(data, k, derive_seed(seed, static_cast<std::uint64_t>(k)), restarts));
    auto wss = [&](int k) { return sel.solutions[static_cast<std::size_t>(k - 1)].wss; };
    auto sol = [&](int k) -> const ClusterSolution& {
        return sel.solutions[static_cast<std::size_t>(k - 1)];
    };

    auto vote = [&](const std::string& name, int k) {
        sel.votes[name] = k;
        ++sel.tally[k];
    };

    {  // elbow: maximum second difference of the WSS curve
        int best_k = 2;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 2; k <= k_max; ++k) {
            const double second = wss(k - 1) - 2.0 * wss(k) + wss(k + 1);
            if (second > best) {
                best = second;
                best_k = k;
            }
        }
        vote("elbow", best_k);
    }
    {  // average silhouette
        int best_k = 2;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 2; k <= k_max; ++k) {
            const double s = detail::silhouette(data, sol(k));
            if (s > best) {
                best = s;
                best_k = k;
            }
        }
        vote("silhouette", best_k);
    }
    {  // Calinski-Harabasz
        int best_k = 2;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 2; k <= k_max; ++k) {
            const double s = detail::calinski_harabasz(data, sol(k));
            if (s > best) {
                best = s;
                best_k = k;
            }
        }
        vote("calinski_harabasz", best_k);
    }
    {  // Davies-Bouldin (lower is better)
        int best_k = 2;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 2; k <= k_max; ++k) {
            const double s = detail::davies_bouldin(data, sol(k));
            if (s < best) {
                best = s;
                best_k = k;
            }
        }
        vote("davies_bouldin", best_k);
    }
    {  // gap statistic with uniform reference sets
        const std::size_t n = data.size(), dim = data.front().size();
        std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
        std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
        for (const auto& row : data)
            for (std::size_t j = 0; j < dim; ++j) {
                lo[j] = std::min(lo[j], row[j]);
                hi[j] = std::max(hi[j], row[j]);
            }
        std::vector<double> gap(static_cast<std::size_t>(k_max) + 2, 0.0);
        std::vector<double> sk(static_cast<std::size_t>(k_max) + 2, 0.0);
        for (int k = 2; k <= k_max + 1; ++k) {
            std::vector<double> ref_log;
            for (int b = 0; b < gap_references; ++b) {
                auto rng = make_rng(derive_seed(seed, 0x6A90000 + static_cast<std::uint64_t>(k * 1000 + b)));
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                std::vector<std::vector<double>> ref(n, std::vector<double>(dim));
                for (auto& row : ref)
                    for (std::size_t j = 0; j < dim; ++j) row[j] = lo[j] + unit(rng) * (hi[j] - lo[j]);
                // few restarts keep the reference sweep affordable
                ref_log.push_back(std::log(
                    std::max(kmeans(ref, k, derive_seed(seed, 0x9E90000 + static_cast<std::uint64_t>(k * 1000 + b)), 3)
                                 .wss,
                             1e-300)));
            }
            const double mean_ref = mathx::mean(ref_log);
            const double sd_ref = ref_log.size() > 1 ? mathx::stddev(ref_log) : 0.0;
            gap[static_cast<std::size_t>(k)] = mean_ref - std::log(std::max(wss(k), 1e-300));
            sk[static_cast<std::size_t>(k)] =
                sd_ref * std::sqrt(1.0 + 1.0 / static_cast<double>(gap_references));
        }
        int best_k = 0;
        for (int k = 2; k <= k_max; ++k) {
            if (gap[static_cast<std::size_t>(k)] >=
                gap[static_cast<std::size_t>(k + 1)] - sk[static_cast<std::size_t>(k + 1)]) {
                best_k = k;
                break;
            }
        }
        if (best_k == 0) {
            best_k = 2;
            for (int k = 2; k <= k_max; ++k)
                if (gap[static_cast<std::size_t>(k)] > gap[static_cast<std::size_t>(best_k)]) best_k = k;
        }
        vote("gap", best_k);
    }
    {  // Dunn
        int best_k = 2;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 2; k <= k_max; ++k) {
            const double s = detail::dunn(data, sol(k));
            if (s > best) {
                best = s;
                best_k = k;
            }
        }
        vote("dunn", best_k);
    }
    {  // BIC
        int best_k = 2;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 2; k <= k_max; ++k) {
            const double s = detail::spherical_bic(data, sol(k));
            if (s > best) {
                best = s;
                best_k = k;
            }
        }
        vote("bic", best_k);
    }

    int best_count = -1;
    for (const auto& [k, count] : sel.tally) {
        if (count > best_count) {
            best_count = count;
            sel.k_best = k;
        }
        // map iteration is ascending in k, so ties keep the smallest k
    }
    return sel;
}

// --- validation and comparisons --------------------------------------------------

// Logistic regression on the four adjusted factors predicting the binary
// cluster label, scored by grouped 10-fold cross-validation (each
// participant is its own group).
inline double validate_clusters_logreg(const std::vector<std::vector<double>>& adjusted,
                                       const std::vector<int>& assignments,
                                       std::uint64_t seed = 0, int k_folds = 10) {
    const std::size_t n = adjusted.size();
    if (assignments.size() != n) throw LengthMismatch("validate_clusters_logreg: misaligned rows");
    const int k_clusters = 1 + *std::max_element(assignments.begin(), assignments.end());
    if (k_clusters != 2) throw Error("validate_clusters_logreg expects exactly 2 clusters");

    std::vector<std::string> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[i] = "p" + std::to_string(i);
    const auto folds = ml::grouped_kfold(groups, k_folds, derive_seed(seed, 0x70));

    std::size_t correct = 0;
    for (int f = 0; f < k_folds; ++f) {
        std::vector<std::vector<double>> train_x;
        std::vector<int> train_y;
        for (std::size_t i = 0; i < n; ++i)
            if (folds[i] != f) {
                train_x.push_back(adjusted[i]);
                train_y.push_back(assignments[i]);
            }
        const bool has0 = std::find(train_y.begin(), train_y.end(), 0) != train_y.end();
        const bool has1 = std::find(train_y.begin(), train_y.end(), 1) != train_y.end();
        if (!has0 || !has1) throw SingleClass();
        const auto model = ml::train_logistic(train_x, train_y);
        for (std::size_t i = 0; i < n; ++i)
            if (folds[i] == f && model.predict(adjusted[i]) == assignments[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

struct ClusterComparison {
    std::string measure;
    double mean_a = 0.0, sd_a = 0.0;  // cluster 0
    double mean_b = 0.0, sd_b = 0.0;  // cluster 1
    stats::TestResult test;           // cluster 0 minus cluster 1
};

// Independent permutation t-test per lie measure between the two clusters,
// with Cohen's d and a 95% CI.
inline std::vector<ClusterComparison> compare_clusters(
    const std::vector<int>& assignments, const std::vector<ml::LieMeasures>& measures,
    int n_perm = 9999, std::uint64_t seed = 0) {
    if (assignments.size() != measures.size())
        throw LengthMismatch("compare_clusters: misaligned rows");
    const std::pair<const char*, double ml::LieMeasures::*> fields[] = {
        {"absolute_lies", &ml::LieMeasures::absolute_lies},
        {"standardized_ratio", &ml::LieMeasures::standardized_ratio},
        {"deceptiveness", &ml::LieMeasures::deceptiveness},
        {"centrality", &ml::LieMeasures::centrality},
    };
    std::vector<ClusterComparison> out;
    std::uint64_t unit = 0;
    for (const auto& [name, field] : fields) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            (assignments[i] == 0 ? a : b).push_back(measures[i].*field);
        ClusterComparison cmp;
        cmp.measure = name;
        cmp.mean_a = mathx::mean(a);
        cmp.sd_a = a.size() > 1 ? mathx::stddev(a) : 0.0;
        cmp.mean_b = mathx::mean(b);
        cmp.sd_b = b.size() > 1 ? mathx::stddev(b) : 0.0;
        cmp.test = stats::perm_t_independent(a, b, n_perm, derive_seed(seed, unit++));
        out.push_back(std::move(cmp));
    }
    return out;
}

// Column-wise standardization to zero mean and unit variance (constant
// columns pass through).
inline std::vector<std::vector<double>> standardize_columns(
    const std::vector<std::vector<double>>& data) {
    if (data.empty()) return {};
    const std::size_t n = data.size(), p = data.front().size();
    std::vector<std::vector<double>> out(n, std::vector<double>(p));
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = data[i][j];
        const double m = mathx::mean(col);
        const double sd = n > 1 ? mathx::stddev(col) : 0.0;
        const double scale = sd > 1e-12 ? sd : 1.0;
        for (std::size_t i = 0; i < n; ++i) out[i][j] = (data[i][j] - m) / scale;
    }
    return out;
}

// The trickster cluster reports higher frequency, ability and contextuality
// and lower negativity; returns the index (0/1) matching that pattern best.
inline int trickster_cluster(const std::vector<std::vector<double>>& raw_centroids) {
    auto score = [](const std::vector<double>& c) { return c[0] + c[1] - c[2] + c[3]; };
    return score(raw_centroids[1]) > score(raw_centroids[0]) ? 1 : 0;
}

}
