#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>

#include "veristyle/cv.hpp"
#include "veristyle/forest.hpp"
#include "veristyle/logistic.hpp"

using namespace veristyle;
using Catch::Approx;

namespace {

// Two Gaussian blobs, one participant per truthful/deceptive row pair.
ml::FeatureMatrix make_blobs(std::size_t participants, std::size_t features, double separation,
                             unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    ml::FeatureMatrix X;
    for (std::size_t j = 0; j < features; ++j) X.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t p = 0; p < participants; ++p) {
        const std::string pid = "p" + std::to_string(p);
        for (int label : {0, 1}) {
            std::vector<double> row(features);
            for (auto& v : row) v = noise(rng) + (label == 1 ? separation : 0.0);
            X.rows.push_back(std::move(row));
            X.labels.push_back(label);
            X.participant_ids.push_back(pid);
            X.statement_ids.push_back(pid + (label == 1 ? "_d" : "_t"));
        }
    }
    X.check();
    return X;
}

std::string fixture_path(const std::string& name) {
    const auto dir = std::filesystem::path(VERISTYLE_BUILD_DIR) / "fixtures";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}

TEST_CASE("grouped_kfold keeps participants together") {
    std::vector<std::string> groups;
    for (int p = 0; p < 10; ++p)
        for (int s = 0; s < 2; ++s) groups.push_back("p" + std::to_string(p));

    const auto folds = ml::grouped_kfold(groups, 5, 3);
    CHECK(ml::folds_respect_groups(folds, groups));
    std::map<int, int> sizes;
    for (int f : folds) ++sizes[f];
    REQUIRE(sizes.size() == 5);
    for (const auto& [fold, count] : sizes) CHECK(count == 4);  // 2 participants x 2 rows

    for (std::uint64_t seed = 0; seed < 20; ++seed)
        CHECK(ml::folds_respect_groups(ml::grouped_kfold(groups, 5, seed), groups));
}

TEST_CASE("grouped_kfold splits 1042 participants into folds of 104 or 105") {
    std::vector<std::string> groups;
    for (int p = 0; p < 1042; ++p) groups.push_back("p" + std::to_string(p));
    const auto folds = ml::grouped_kfold(groups, 10, 7);
    std::map<int, int> sizes;
    for (int f : folds) ++sizes[f];
    REQUIRE(sizes.size() == 10);
    for (const auto& [fold, count] : sizes) CHECK((count == 104 || count == 105));
}

TEST_CASE("grouped_kfold rejects too few groups") {
    std::vector<std::string> groups = {"a", "a", "b", "b"};
    CHECK_THROWS_AS(ml::grouped_kfold(groups, 3, 0), TooFewGroups);
}

TEST_CASE("random forest separates blobs") {
    const auto X = make_blobs(100, 2, 4.0, 5);
    ml::ForestHyperParams hp;
    hp.n_trees = 60;
    const auto model = ml::train_random_forest(X, X.labels, hp, 11);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < X.n_rows(); ++i)
        if (model.predict(X.rows[i]) == X.labels[i]) ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(X.n_rows()) >= 0.99);
}

TEST_CASE("random forest memorizes duplicated rows") {
    ml::FeatureMatrix X;
    X.feature_names = {"x"};
    X.statement_ids = {"a", "b"};
    X.participant_ids = {"a", "b"};
    X.labels = {0, 1};
    X.rows = {{0.0}, {1.0}};
    ml::ForestHyperParams hp;
    hp.n_trees = 101;
    const auto model = ml::train_random_forest(X, X.labels, hp, 2);
    CHECK(model.predict({0.0}) == 0);
    CHECK(model.predict({1.0}) == 1);
}

TEST_CASE("random forest is deterministic given data, hp and seed") {
    const auto X = make_blobs(40, 3, 1.0, 9);
    ml::ForestHyperParams hp;
    hp.n_trees = 30;
    const auto a = ml::train_random_forest(X, X.labels, hp, 21, 1);
    const auto b = ml::train_random_forest(X, X.labels, hp, 21, 2);  // jobs must not matter
    for (std::size_t i = 0; i < X.n_rows(); ++i)
        CHECK(a.predict_proba(X.rows[i]) == b.predict_proba(X.rows[i]));
}

TEST_CASE("random forest input validation") {
    ml::FeatureMatrix X;
    X.feature_names = {"x"};
    CHECK_THROWS_AS(ml::train_random_forest(X, {}, {}, 0), EmptyMatrix);

    auto blobs = make_blobs(10, 2, 1.0, 3);
    std::vector<int> ones(blobs.n_rows(), 1);
    CHECK_THROWS_AS(ml::train_random_forest(blobs, ones, {}, 0), SingleClass);
}

TEST_CASE("predict_proba is a vote fraction") {
    const auto X = make_blobs(60, 2, 5.0, 13);
    ml::ForestHyperParams hp;
    hp.n_trees = 50;
    const auto model = ml::train_random_forest(X, X.labels, hp, 3);
    for (std::size_t i = 0; i < X.n_rows(); i += 7) {
        const double p = model.predict_proba(X.rows[i]);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(model.predict(X.rows[i]) == (p > 0.5 ? 1 : 0));
    }
    // far from both blobs the trees still all agree somewhere: check extremes
    CHECK(model.predict_proba({-10.0, -10.0}) == 0.0);
    CHECK(model.predict_proba({15.0, 15.0}) == 1.0);

    CHECK_THROWS_AS(model.predict_proba({1.0}), MissingFeature);
    CHECK_THROWS_AS(model.predict_proba({1.0, std::nan("")}), MissingFeature);
}

TEST_CASE("classification_metrics definitions") {
    std::vector<int> y_true, y_pred;
    for (int i = 0; i < 10; ++i) {
        y_true.push_back(i % 2);
        y_pred.push_back(i % 2);
    }
    const auto perfect = ml::classification_metrics(y_true, y_pred);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.truthful.precision == 1.0);
    CHECK(perfect.deceptive.f1 == 1.0);

    // 100 per class; truthful recall .76, deceptive recall .35
    y_true.clear();
    y_pred.clear();
    for (int i = 0; i < 100; ++i) {
        y_true.push_back(0);
        y_pred.push_back(i < 76 ? 0 : 1);
    }
    for (int i = 0; i < 100; ++i) {
        y_true.push_back(1);
        y_pred.push_back(i < 35 ? 1 : 0);
    }
    const auto m = ml::classification_metrics(y_true, y_pred);
    CHECK(m.truthful.recall == Approx(0.76));
    CHECK(m.deceptive.recall == Approx(0.35));
    CHECK(m.accuracy == Approx((76.0 + 35.0) / 200.0));

    // all-deceptive predictor on balanced data
    std::vector<int> all_d(y_true.size(), 1);
    const auto degenerate = ml::classification_metrics(y_true, all_d);
    CHECK(degenerate.accuracy == Approx(0.5));
    CHECK(degenerate.truthful.recall == 0.0);
    CHECK(degenerate.truthful.precision == 0.0);
    CHECK(degenerate.truthful.precision_undefined);

    CHECK_THROWS_AS(ml::classification_metrics({0, 1}, {0}), LengthMismatch);
}

TEST_CASE("nested_cv with a one-point grid equals plain grouped CV") {
    const auto X = make_blobs(30, 3, 1.5, 17);
    ml::ForestHyperParams hp;
    hp.n_trees = 25;
    const std::uint64_t seed = 31;
    const auto report = ml::nested_cv(X, X.labels, X.participant_ids, {hp}, 5, 3, seed);

    // replay: same outer folds, same final-model seeds, no search
    const auto outer = ml::grouped_kfold(X.participant_ids, 5, derive_seed(seed, 0xA));
    for (int f = 0; f < 5; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < X.n_rows(); ++i)
            (outer[i] == f ? test_rows : train_rows).push_back(i);
        const auto medians = ml::fold_medians(X.rows, train_rows, X.n_cols());
        ml::FeatureMatrix train;
        train.feature_names = X.feature_names;
        for (auto i : train_rows) {
            train.statement_ids.push_back(X.statement_ids[i]);
            train.participant_ids.push_back(X.participant_ids[i]);
            train.labels.push_back(X.labels[i]);
            train.rows.push_back(ml::imputed_row(X.rows[i], medians));
        }
        const auto model = ml::train_random_forest(
            train, train.labels, hp, derive_seed(seed, 0xD000 + static_cast<std::uint64_t>(f)));
        std::vector<int> truth, pred;
        for (auto i : test_rows) {
            truth.push_back(X.labels[i]);
            pred.push_back(model.predict(ml::imputed_row(X.rows[i], medians)));
        }
        CHECK(report.folds[static_cast<std::size_t>(f)].metrics.accuracy ==
              Approx(ml::classification_metrics(truth, pred).accuracy));
    }
}

TEST_CASE("nested_cv separates blobs and never leaks participants") {
    const auto X = make_blobs(50, 4, 3.0, 19);
    std::vector<ml::ForestHyperParams> grid;
    for (int trees : {20, 40}) {
        ml::ForestHyperParams hp;
        hp.n_trees = trees;
        grid.push_back(hp);
    }
    const auto report = ml::nested_cv(X, X.labels, X.participant_ids, grid, 5, 3, 23);
    CHECK(report.accuracy_mean >= 0.95);
    CHECK(ml::folds_respect_groups(report.outer_fold, X.participant_ids));

    // inner assignments must respect groups too, and cover exactly the
    // outer-training rows
    REQUIRE(report.inner_fold_by_row.size() == 5);
    for (int f = 0; f < 5; ++f) {
        const auto& inner = report.inner_fold_by_row[static_cast<std::size_t>(f)];
        std::map<std::string, std::set<int>> by_group;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            CHECK((inner[i] == -1) == (report.outer_fold[i] == f));
            if (inner[i] >= 0) by_group[X.participant_ids[i]].insert(inner[i]);
        }
        for (const auto& [pid, folds] : by_group) CHECK(folds.size() == 1);
    }

    // out-of-fold bookkeeping reconciles with the accuracy
    std::size_t correct = 0;
    for (std::size_t i = 0; i < X.n_rows(); ++i) {
        CHECK(report.oof_probability[i] >= 0.0);
        CHECK(report.oof_probability[i] <= 1.0);
        if (report.oof_prediction[i] == X.labels[i]) ++correct;
    }
    double weighted = 0.0;
    for (const auto& fold : report.folds)
        weighted += fold.metrics.accuracy * static_cast<double>(fold.metrics.n);
    CHECK(static_cast<double>(correct) == Approx(weighted).margin(1e-9));
}

TEST_CASE("nested_cv near chance on label-shuffled data") {
    auto X = make_blobs(100, 4, 2.5, 29);
    std::mt19937 rng(4);
    std::vector<int> shuffled = X.labels;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ml::ForestHyperParams hp;
    hp.n_trees = 25;
    const auto report = ml::nested_cv(X, shuffled, X.participant_ids, {hp}, 5, 3, 37);
    CHECK(report.accuracy_mean > 0.3);
    CHECK(report.accuracy_mean < 0.7);
}

TEST_CASE("nested_cv rejects an empty grid") {
    const auto X = make_blobs(20, 2, 1.0, 31);
    CHECK_THROWS_AS(ml::nested_cv(X, X.labels, X.participant_ids, {}, 5, 3, 0), EmptyGrid);
}

TEST_CASE("missing cells are imputed from training folds only") {
    auto X = make_blobs(30, 2, 3.0, 37);
    // poke holes in one column
    for (std::size_t i = 0; i < X.n_rows(); i += 5) X.rows[i][0] = mathx::kNaN;
    ml::ForestHyperParams hp;
    hp.n_trees = 20;
    const auto report = ml::nested_cv(X, X.labels, X.participant_ids, {hp}, 5, 3, 41);
    CHECK(report.accuracy_mean > 0.8);  // still separable through the intact column
}

TEST_CASE("explainability probe") {
    ml::CvReport report;
    std::map<std::string, ml::LieMeasures> measures;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const std::string sid = "s" + std::to_string(i);
        const double ratio = unit(rng);
        report.statement_ids.push_back(sid);
        report.labels.push_back(i % 2);
        report.oof_probability.push_back(i % 2 == 1 ? ratio : unit(rng));
        report.oof_prediction.push_back(report.oof_probability.back() > 0.5 ? 1 : 0);
        ml::LieMeasures m;
        m.absolute_lies = std::floor(ratio * 10.0) + 1.0;
        m.standardized_ratio = ratio;
        m.deceptiveness = 1.0 + 4.0 * unit(rng);
        m.centrality = 1.0 + 4.0 * unit(rng);
        measures[sid] = m;
    }
    report.has_probabilities = true;

    const auto probe = ml::explainability_probe(report, measures, 999, 5);
    REQUIRE(probe.correlations.size() == 4);
    REQUIRE(probe.comparisons.size() == 4);
    CHECK(probe.n_deceptive == 20);
    // the probability IS the standardized ratio for deceptive rows: rho == 1
    bool found = false;
    for (const auto& c : probe.correlations)
        if (c.measure == "standardized_ratio") {
            CHECK(c.result.rho == Approx(1.0));
            found = true;
        }
    CHECK(found);

    ml::CvReport no_proba = report;
    no_proba.has_probabilities = false;
    CHECK_THROWS_AS(ml::explainability_probe(no_proba, measures), MissingProbabilities);

    // constant probabilities propagate ConstantInput from spearman
    ml::CvReport constant = report;
    for (auto& p : constant.oof_probability) p = 0.6;
    CHECK_THROWS_AS(ml::explainability_probe(constant, measures), ConstantInput);
}

TEST_CASE("embedding table loads JSONL and checks dimensions") {
    const auto path = fixture_path("emb.jsonl");
    {
        std::ofstream out(path);
        out << R"({"statement_id": "a", "vector": [0.1, 0.2, 0.3]})" << "\n";
        out << R"({"statement_id": "b", "vector": [0.4, 0.5, 0.6]})" << "\n";
    }
    const auto table = ml::load_embeddings(path);
    CHECK(table.dimension == 3);
    CHECK(table.vectors.at("a")[1] == Approx(0.2));

    const auto bad = fixture_path("emb_bad.jsonl");
    {
        std::ofstream out(bad);
        out << R"({"statement_id": "a", "vector": [0.1, 0.2]})" << "\n";
        out << R"({"statement_id": "b", "vector": [0.4]})" << "\n";
    }
    CHECK_THROWS_AS(ml::load_embeddings(bad), SchemaViolation);
}

TEST_CASE("logistic regression separates shifted groups") {
    std::mt19937 rng(6);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 120; ++i) {
        const int label = i % 2;
        X.push_back({noise(rng) + (label ? 3.0 : 0.0), noise(rng) - (label ? 2.0 : 0.0)});
        y.push_back(label);
    }
    const auto model = ml::train_logistic(X, y);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (model.predict(X[i]) == y[i]) ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(X.size()) >= 0.95);
}
