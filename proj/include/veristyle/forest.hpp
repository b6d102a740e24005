#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "veristyle/error.hpp"
#include "veristyle/parallel.hpp"
#include "veristyle/rng.hpp"

// Random forest classifier built from scratch: CART trees with the Gini
// split criterion, bootstrap row resampling, and per-node feature
// subsampling. Binary labels only (0 = truthful, 1 = deceptive).

namespace veristyle::ml {

// Rows keyed by statement id; cells may be NaN (imputed inside CV folds).
struct FeatureMatrix {
    std::vector<std::string> feature_names;
    std::vector<std::string> statement_ids;
    std::vector<std::string> participant_ids;
    std::vector<int> labels;
    std::vector<std::vector<double>> rows;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return feature_names.size(); }

    void check() const {
        std::set<std::string> ids(statement_ids.begin(), statement_ids.end());
        if (ids.size() != statement_ids.size()) throw Error("duplicate statement_id in feature matrix");
        if (rows.size() != labels.size() || rows.size() != statement_ids.size())
            throw LengthMismatch("feature matrix row bookkeeping out of sync");
    }
};

struct EmbeddingTable {
    std::unordered_map<std::string, std::vector<double>> vectors;
    std::size_t dimension = 0;
};

// One JSON object per line: {"statement_id": ..., "vector": [...]}.
inline EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    EmbeddingTable table;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaViolation(line_no, std::string("embedding file: ") + e.what());
        }
        if (!obj.contains("statement_id") || !obj.contains("vector"))
            throw SchemaViolation(line_no, "embedding row needs statement_id and vector");
        std::vector<double> vec = obj["vector"].get<std::vector<double>>();
        for (double v : vec)
            if (!std::isfinite(v)) throw SchemaViolation(line_no, "embedding vector must be finite");
        if (table.dimension == 0)
            table.dimension = vec.size();
        else if (vec.size() != table.dimension)
            throw SchemaViolation(line_no, "embedding dimension differs from previous rows");
        table.vectors[obj["statement_id"].get<std::string>()] = std::move(vec);
    }
    return table;
}

enum class FeatureSampling { Sqrt, Log2 };

inline const char* to_string(FeatureSampling s) {
    return s == FeatureSampling::Sqrt ? "sqrt" : "log2";
}

struct ForestHyperParams {
    int n_trees = 300;
    int max_depth = 0;  // 0 = unbounded
    int min_leaf = 1;
    FeatureSampling features_per_split = FeatureSampling::Sqrt;

    bool operator==(const ForestHyperParams&) const = default;

    std::string describe() const {
        return "trees=" + std::to_string(n_trees) + ",depth=" + std::to_string(max_depth) +
               ",min_leaf=" + std::to_string(min_leaf) + ",features=" + to_string(features_per_split);
    }
};

namespace detail {

struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t count_truthful = 0;
    std::size_t count_deceptive = 0;

    bool leaf() const { return feature < 0; }
    bool votes_deceptive() const { return count_deceptive > count_truthful; }
};

struct TreeBuilder {
    const std::vector<std::vector<double>>& rows;
    const std::vector<int>& labels;
    const ForestHyperParams& hp;
    std::size_t features_per_node;
    std::mt19937_64 rng;
    std::vector<Node> nodes;

    int build(std::vector<std::size_t>& samples, int depth) {
        std::size_t pos = 0;
        for (auto i : samples) pos += static_cast<std::size_t>(labels[i]);
        const std::size_t neg = samples.size() - pos;

        Node node;
        node.count_truthful = neg;
        node.count_deceptive = pos;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(node);

        const bool pure = pos == 0 || neg == 0;
        const bool depth_capped = hp.max_depth > 0 && depth >= hp.max_depth;
        if (pure || depth_capped || samples.size() < 2 * static_cast<std::size_t>(hp.min_leaf) ||
            samples.size() < 2)
            return id;

        int best_feature = -1;
        double best_threshold = 0.0, best_score = gini_impurity(pos, samples.size());
        std::vector<std::size_t> columns = sample_columns();
        std::vector<std::size_t> order;
        for (auto col : columns) {
            order = samples;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return rows[a][col] < rows[b][col];
            });
            std::size_t left_pos = 0;
            for (std::size_t i = 1; i < order.size(); ++i) {
                left_pos += static_cast<std::size_t>(labels[order[i - 1]]);
                const double prev = rows[order[i - 1]][col], cur = rows[order[i]][col];
                if (prev == cur) continue;
                const std::size_t nl = i, nr = order.size() - i;
                if (nl < static_cast<std::size_t>(hp.min_leaf) ||
                    nr < static_cast<std::size_t>(hp.min_leaf))
                    continue;
                const double score =
                    (static_cast<double>(nl) * gini_impurity(left_pos, nl) +
                     static_cast<double>(nr) * gini_impurity(pos - left_pos, nr)) /
                    static_cast<double>(order.size());
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feature = static_cast<int>(col);
                    best_threshold = 0.5 * (prev + cur);
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto i : samples)
            (rows[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
                .push_back(i);
        if (left.empty() || right.empty()) return id;

        nodes[static_cast<std::size_t>(id)].feature = best_feature;
        nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        const int l = build(left, depth + 1);
        nodes[static_cast<std::size_t>(id)].left = l;
        const int r = build(right, depth + 1);
        nodes[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    static double gini_impurity(std::size_t pos, std::size_t total) {
        if (total == 0) return 0.0;
        const double p = static_cast<double>(pos) / static_cast<double>(total);
        return 2.0 * p * (1.0 - p);
    }

    std::vector<std::size_t> sample_columns() {
        const std::size_t p = rows.front().size();
        std::vector<std::size_t> all(p);
        std::iota(all.begin(), all.end(), std::size_t{0});
        std::size_t take = features_per_node;
        if (take >= p) return all;
        // partial Fisher-Yates
        for (std::size_t i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, p - 1);
            std::swap(all[i], all[pick(rng)]);
        }
        all.resize(take);
        return all;
    }
};

}

struct DecisionTree {
    std::vector<detail::Node> nodes;

    bool vote_deceptive(const std::vector<double>& row) const {
        int at = 0;
        while (!nodes[static_cast<std::size_t>(at)].leaf()) {
            const auto& n = nodes[static_cast<std::size_t>(at)];
            at = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(at)].votes_deceptive();
    }
};

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    std::vector<std::string> feature_names;
    ForestHyperParams hp;
    std::uint64_t seed = 0;

    // Fraction of trees voting deceptive.
    double predict_proba(const std::vector<double>& row) const {
        if (row.size() != feature_names.size())
            throw MissingFeature(row.size() < feature_names.size()
                                     ? feature_names[row.size()]
                                     : "(extra columns)");
        for (std::size_t i = 0; i < row.size(); ++i)
            if (std::isnan(row[i])) throw MissingFeature(feature_names[i]);
        std::size_t votes = 0;
        for (const auto& t : trees) votes += t.vote_deceptive(row) ? 1 : 0;
        return static_cast<double>(votes) / static_cast<double>(trees.size());
    }

    // Majority vote; agrees with thresholding predict_proba at 0.5.
    int predict(const std::vector<double>& row) const { return predict_proba(row) > 0.5 ? 1 : 0; }
};

inline RandomForestModel train_random_forest(const FeatureMatrix& X, const std::vector<int>& y,
                                             const ForestHyperParams& hp, std::uint64_t seed,
                                             unsigned jobs = 1) {
    if (X.n_rows() == 0 || X.n_cols() == 0) throw EmptyMatrix();
    if (y.size() != X.n_rows()) throw LengthMismatch("train_random_forest: labels do not match rows");
    const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
    if (!has_pos || !has_neg) throw SingleClass();
    for (const auto& row : X.rows)
        for (double v : row)
            if (std::isnan(v)) throw Error("train_random_forest: impute missing cells upstream");

    const std::size_t p = X.n_cols();
    std::size_t per_node =
        hp.features_per_split == FeatureSampling::Sqrt
            ? static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(p))))
            : static_cast<std::size_t>(std::lround(std::log2(static_cast<double>(p))));
    per_node = std::clamp<std::size_t>(per_node, 1, p);

    RandomForestModel model;
    model.feature_names = X.feature_names;
    model.hp = hp;
    model.seed = seed;
    model.trees.resize(static_cast<std::size_t>(hp.n_trees));

    parallel_for(static_cast<std::size_t>(hp.n_trees), jobs, [&](std::size_t t) {
        auto rng = make_rng(derive_seed(seed, t));
        const std::size_t n = X.n_rows();
        std::vector<std::size_t> bootstrap(n);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (auto& b : bootstrap) b = pick(rng);
        detail::TreeBuilder builder{X.rows, y, hp, per_node, std::move(rng), {}};
        builder.build(bootstrap, 0);
        model.trees[t].nodes = std::move(builder.nodes);
    });
    return model;
}

}
