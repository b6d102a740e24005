#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "veristyle/error.hpp"
#include "veristyle/forest.hpp"
#include "veristyle/mathx.hpp"
#include "veristyle/rng.hpp"
#include "veristyle/stats.hpp"

// Participant-grouped and nested cross-validation, classification metrics,
// and the explainability probes relating out-of-fold class probabilities to
// the lie-annotation measures.

namespace veristyle::ml {

// Partitions the distinct group keys (participants) into k folds whose sizes
// differ by at most one; every row of a group lands in the same fold.
inline std::vector<int> grouped_kfold(const std::vector<std::string>& group_per_row, int k,
                                      std::uint64_t seed) {
    std::vector<std::string> distinct;
    std::set<std::string> seen;
    for (const auto& g : group_per_row)
        if (seen.insert(g).second) distinct.push_back(g);
    if (k < 2 || static_cast<std::size_t>(k) > distinct.size())
        throw TooFewGroups("grouped_kfold: need 2 <= k <= distinct groups");

    auto rng = make_rng(seed);
    std::shuffle(distinct.begin(), distinct.end(), rng);
    std::map<std::string, int> fold_of;
    const std::size_t n = distinct.size();
    const std::size_t base = n / static_cast<std::size_t>(k), extra = n % static_cast<std::size_t>(k);
    std::size_t at = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) fold_of[distinct[at++]] = f;
    }
    std::vector<int> out(group_per_row.size());
    for (std::size_t i = 0; i < group_per_row.size(); ++i) out[i] = fold_of[group_per_row[i]];
    return out;
}

// True when no group straddles a train/test boundary for any fold.
inline bool folds_respect_groups(const std::vector<int>& folds,
                                 const std::vector<std::string>& groups) {
    std::map<std::string, int> first;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        auto [it, inserted] = first.emplace(groups[i], folds[i]);
        if (!inserted && it->second != folds[i]) return false;
    }
    return true;
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;  // no predicted positives; reported as 0
};

struct Metrics {
    double accuracy = 0.0;
    ClassMetrics truthful;
    ClassMetrics deceptive;
    std::size_t n = 0;
};

inline Metrics classification_metrics(const std::vector<int>& y_true,
                                      const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch("classification_metrics: length mismatch");
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;  // deceptive = positive
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            (y_pred[i] == 1 ? tp : fn) += 1;
        else
            (y_pred[i] == 1 ? fp : tn) += 1;
    }
    auto cls = [](std::size_t tp_, std::size_t fp_, std::size_t fn_) {
        ClassMetrics m;
        const std::size_t predicted = tp_ + fp_;
        if (predicted == 0) {
            m.precision = 0.0;
            m.precision_undefined = true;
        } else {
            m.precision = static_cast<double>(tp_) / static_cast<double>(predicted);
        }
        const std::size_t actual = tp_ + fn_;
        m.recall = actual == 0 ? 0.0 : static_cast<double>(tp_) / static_cast<double>(actual);
        m.f1 = (m.precision + m.recall) == 0.0
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        return m;
    };
    Metrics out;
    out.n = y_true.size();
    out.accuracy = y_true.empty()
                       ? 0.0
                       : static_cast<double>(tp + tn) / static_cast<double>(y_true.size());
    out.deceptive = cls(tp, fp, fn);
    out.truthful = cls(tn, fn, fp);  // truthful as positive: swap roles
    return out;
}

// Column medians over the given rows, NaN-aware; cells then filled in place.
inline std::vector<double> fold_medians(const std::vector<std::vector<double>>& rows,
                                        const std::vector<std::size_t>& subset,
                                        std::size_t n_cols) {
    std::vector<double> medians(n_cols, 0.0);
    std::vector<double> values;
    for (std::size_t j = 0; j < n_cols; ++j) {
        values.clear();
        for (auto i : subset)
            if (!std::isnan(rows[i][j])) values.push_back(rows[i][j]);
        medians[j] = values.empty() ? 0.0 : mathx::median(values);
    }
    return medians;
}

inline std::vector<double> imputed_row(const std::vector<double>& row,
                                       const std::vector<double>& medians) {
    std::vector<double> out = row;
    for (std::size_t j = 0; j < out.size(); ++j)
        if (std::isnan(out[j])) out[j] = medians[j];
    return out;
}

struct FoldOutcome {
    Metrics metrics;
    ForestHyperParams chosen;
};

struct CvReport {
    std::vector<FoldOutcome> folds;
    double accuracy_mean = 0.0, accuracy_sd = 0.0;
    Metrics mean;  // per-class precision/recall/F1 averaged over folds
    Metrics sd;
    std::vector<std::string> statement_ids;
    std::vector<int> labels;
    std::vector<int> oof_prediction;
    std::vector<double> oof_probability;  // deceptive-class probability
    std::vector<int> outer_fold;
    // inner fold per row for each outer fold; -1 marks rows held out in the
    // outer test set (kept for the leakage audit)
    std::vector<std::vector<int>> inner_fold_by_row;
    int outer_k = 10, inner_k = 10;
    std::uint64_t seed = 0;
    bool has_probabilities = false;
};

namespace detail {

struct Split {
    std::vector<std::size_t> train, test;
};

inline std::vector<Split> splits_from_folds(const std::vector<int>& folds, int k) {
    std::vector<Split> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < folds.size(); ++i)
        for (int f = 0; f < k; ++f)
            (folds[i] == f ? out[static_cast<std::size_t>(f)].test
                           : out[static_cast<std::size_t>(f)].train)
                .push_back(i);
    return out;
}

inline FeatureMatrix subset_matrix(const FeatureMatrix& X, const std::vector<std::size_t>& idx,
                                   const std::vector<double>& medians) {
    FeatureMatrix out;
    out.feature_names = X.feature_names;
    for (auto i : idx) {
        out.statement_ids.push_back(X.statement_ids[i]);
        out.participant_ids.push_back(X.participant_ids[i]);
        out.labels.push_back(X.labels[i]);
        out.rows.push_back(imputed_row(X.rows[i], medians));
    }
    return out;
}

}

// Nested cross-validation: the inner grouped k-fold grid search picks the
// accuracy-maximizing hyperparameters on each outer-training portion (ties
// resolved by grid order), a model with those settings trains on the full
// outer-training set and is scored on the outer test fold. Missing cells are
// imputed with medians of whichever training portion is in scope, never from
// test rows.
inline CvReport nested_cv(const FeatureMatrix& X, const std::vector<int>& y,
                          const std::vector<std::string>& groups,
                          const std::vector<ForestHyperParams>& grid, int outer_k = 10,
                          int inner_k = 10, std::uint64_t seed = 0, unsigned jobs = 1) {
    if (grid.empty()) throw EmptyGrid();
    if (X.n_rows() == 0) throw EmptyMatrix();
    if (y.size() != X.n_rows() || groups.size() != X.n_rows())
        throw LengthMismatch("nested_cv: labels/groups do not match rows");

    CvReport report;
    report.statement_ids = X.statement_ids;
    report.labels = y;
    report.outer_k = outer_k;
    report.inner_k = inner_k;
    report.seed = seed;
    report.oof_prediction.assign(X.n_rows(), 0);
    report.oof_probability.assign(X.n_rows(), 0.0);
    report.outer_fold = grouped_kfold(groups, outer_k, derive_seed(seed, 0xA));
    report.has_probabilities = true;

    const auto outer_splits = detail::splits_from_folds(report.outer_fold, outer_k);

    for (int f = 0; f < outer_k; ++f) {
        const auto& split = outer_splits[static_cast<std::size_t>(f)];

        // inner grid search on the outer-training portion only
        std::vector<std::string> inner_groups;
        std::vector<int> inner_labels;
        for (auto i : split.train) {
            inner_groups.push_back(groups[i]);
            inner_labels.push_back(y[i]);
        }
        const auto inner_folds =
            grouped_kfold(inner_groups, inner_k, derive_seed(seed, 0xB00 + static_cast<std::uint64_t>(f)));
        const auto inner_splits = detail::splits_from_folds(inner_folds, inner_k);
        {
            std::vector<int> by_row(X.n_rows(), -1);
            for (std::size_t local = 0; local < split.train.size(); ++local)
                by_row[split.train[local]] = inner_folds[local];
            report.inner_fold_by_row.push_back(std::move(by_row));
        }

        std::vector<double> grid_accuracy(grid.size(), 0.0);
        for (int g = 0; g < static_cast<int>(grid.size()); ++g) {
            double acc_sum = 0.0;
            int used = 0;
            for (int inner = 0; inner < inner_k; ++inner) {
                const auto& isplit = inner_splits[static_cast<std::size_t>(inner)];
                if (isplit.test.empty() || isplit.train.empty()) continue;
                std::vector<std::size_t> train_rows, test_rows;
                for (auto local : isplit.train) train_rows.push_back(split.train[local]);
                for (auto local : isplit.test) test_rows.push_back(split.train[local]);
                const auto medians = fold_medians(X.rows, train_rows, X.n_cols());
                const auto train = detail::subset_matrix(X, train_rows, medians);
                const auto model = train_random_forest(
                    train, train.labels, grid[static_cast<std::size_t>(g)],
                    derive_seed(seed, 0xC000 + static_cast<std::uint64_t>(f * 1000 + inner * 50 + g)),
                    jobs);
                std::vector<int> pred, truth;
                for (auto i : test_rows) {
                    pred.push_back(model.predict(imputed_row(X.rows[i], medians)));
                    truth.push_back(y[i]);
                }
                acc_sum += classification_metrics(truth, pred).accuracy;
                ++used;
            }
            grid_accuracy[static_cast<std::size_t>(g)] = used == 0 ? 0.0 : acc_sum / used;
        }
        std::size_t best = 0;
        for (std::size_t g = 1; g < grid.size(); ++g)
            if (grid_accuracy[g] > grid_accuracy[best]) best = g;  // ties keep grid order

        // final model for this outer fold
        const auto medians = fold_medians(X.rows, split.train, X.n_cols());
        const auto train = detail::subset_matrix(X, split.train, medians);
        const auto model = train_random_forest(
            train, train.labels, grid[best],
            derive_seed(seed, 0xD000 + static_cast<std::uint64_t>(f)), jobs);

        std::vector<int> pred, truth;
        for (auto i : split.test) {
            const auto row = imputed_row(X.rows[i], medians);
            const double proba = model.predict_proba(row);
            report.oof_probability[i] = proba;
            report.oof_prediction[i] = proba > 0.5 ? 1 : 0;
            pred.push_back(report.oof_prediction[i]);
            truth.push_back(y[i]);
        }
        report.folds.push_back({classification_metrics(truth, pred), grid[best]});
    }

    auto collect = [&](auto&& get) {
        std::vector<double> v;
        for (const auto& fold : report.folds) v.push_back(get(fold.metrics));
        return v;
    };
    auto msd = [&](auto&& get) {
        const auto v = collect(get);
        return std::pair<double, double>{mathx::mean(v), v.size() > 1 ? mathx::stddev(v) : 0.0};
    };
    std::tie(report.accuracy_mean, report.accuracy_sd) = msd([](const Metrics& m) { return m.accuracy; });
    report.mean.accuracy = report.accuracy_mean;
    report.sd.accuracy = report.accuracy_sd;
    std::tie(report.mean.truthful.precision, report.sd.truthful.precision) =
        msd([](const Metrics& m) { return m.truthful.precision; });
    std::tie(report.mean.truthful.recall, report.sd.truthful.recall) =
        msd([](const Metrics& m) { return m.truthful.recall; });
    std::tie(report.mean.truthful.f1, report.sd.truthful.f1) =
        msd([](const Metrics& m) { return m.truthful.f1; });
    std::tie(report.mean.deceptive.precision, report.sd.deceptive.precision) =
        msd([](const Metrics& m) { return m.deceptive.precision; });
    std::tie(report.mean.deceptive.recall, report.sd.deceptive.recall) =
        msd([](const Metrics& m) { return m.deceptive.recall; });
    std::tie(report.mean.deceptive.f1, report.sd.deceptive.f1) =
        msd([](const Metrics& m) { return m.deceptive.f1; });
    return report;
}

// --- explainability probes ----------------------------------------------------

struct LieMeasures {
    double absolute_lies = 0.0;
    double standardized_ratio = 0.0;
    double deceptiveness = 0.0;
    double centrality = 0.0;
};

struct ProbeCorrelation {
    std::string measure;
    stats::SpearmanResult result;
};

struct ProbeComparison {
    std::string measure;
    double mean_correct = 0.0, sd_correct = 0.0;
    double mean_incorrect = 0.0, sd_incorrect = 0.0;
    stats::TestResult test;
};

struct ProbeTables {
    std::vector<ProbeCorrelation> correlations;
    std::vector<ProbeComparison> comparisons;
    std::size_t n_deceptive = 0;
};

// (a) Spearman correlations between the out-of-fold deceptive-class
// probability and the four lie measures; (b) independent permutation t-tests
// of each measure between correctly and incorrectly classified deceptive
// statements. Deceptive rows only (the lie measures exist only there).
inline ProbeTables explainability_probe(const CvReport& report,
                                        const std::map<std::string, LieMeasures>& by_statement,
                                        int n_perm = 9999, std::uint64_t seed = 0) {
    if (!report.has_probabilities) throw MissingProbabilities();

    std::vector<double> proba;
    std::vector<LieMeasures> measures;
    std::vector<bool> correct;
    for (std::size_t i = 0; i < report.statement_ids.size(); ++i) {
        if (report.labels[i] != 1) continue;
        const auto it = by_statement.find(report.statement_ids[i]);
        if (it == by_statement.end()) continue;
        proba.push_back(report.oof_probability[i]);
        measures.push_back(it->second);
        correct.push_back(report.oof_prediction[i] == report.labels[i]);
    }

    const std::pair<const char*, double LieMeasures::*> fields[] = {
        {"absolute_lies", &LieMeasures::absolute_lies},
        {"standardized_ratio", &LieMeasures::standardized_ratio},
        {"deceptiveness", &LieMeasures::deceptiveness},
        {"centrality", &LieMeasures::centrality},
    };

    ProbeTables out;
    out.n_deceptive = proba.size();
    std::uint64_t unit = 0;
    for (const auto& [name, field] : fields) {
        std::vector<double> values;
        values.reserve(measures.size());
        for (const auto& m : measures) values.push_back(m.*field);
        out.correlations.push_back({name, stats::spearman(proba, values)});

        std::vector<double> correct_vals, incorrect_vals;
        for (std::size_t i = 0; i < values.size(); ++i)
            (correct[i] ? correct_vals : incorrect_vals).push_back(values[i]);
        ProbeComparison cmp;
        cmp.measure = name;
        cmp.mean_correct = mathx::mean(correct_vals);
        cmp.sd_correct = correct_vals.size() > 1 ? mathx::stddev(correct_vals) : 0.0;
        cmp.mean_incorrect = mathx::mean(incorrect_vals);
        cmp.sd_incorrect = incorrect_vals.size() > 1 ? mathx::stddev(incorrect_vals) : 0.0;
        cmp.test = stats::perm_t_independent(correct_vals, incorrect_vals, n_perm,
                                             derive_seed(seed, unit++));
        out.comparisons.push_back(std::move(cmp));
    }
    return out;
}

}
