#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "veristyle/profiles.hpp"

using namespace veristyle;
using Catch::Approx;

namespace {

std::vector<std::vector<double>> blob_data(int per_blob, const std::vector<std::vector<double>>& centers,
                                           double sigma, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<std::vector<double>> data;
    for (const auto& c : centers)
        for (int i = 0; i < per_blob; ++i) {
            std::vector<double> row(c.size());
            for (std::size_t j = 0; j < c.size(); ++j) row[j] = c[j] + noise(rng);
            data.push_back(std::move(row));
        }
    return data;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mathx::mean(a), mb = mathx::mean(b);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

}

TEST_CASE("adjust_for_bidr leaves rows unchanged under constant regressors") {
    std::vector<std::vector<double>> factors = {{1, 2, 3, 4}, {2, 3, 4, 5}, {3, 4, 5, 6}};
    const std::vector<double> sde = {2.0, 2.0, 2.0};
    const std::vector<double> im = {4.0, 4.0, 4.0};
    const auto adj = profiles::adjust_for_bidr(factors, sde, im);
    for (std::size_t i = 0; i < factors.size(); ++i)
        for (std::size_t f = 0; f < 4; ++f)
            CHECK(adj.rows[i][f] == Approx(factors[i][f]).margin(1e-12));
}

TEST_CASE("perfectly explained factor collapses to its mean") {
    const std::vector<double> sde = {1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> im = {0.3, -0.1, 0.4, 0.0, 0.2};
    std::vector<std::vector<double>> factors;
    for (std::size_t i = 0; i < sde.size(); ++i)
        factors.push_back({2.0 * sde[i], 1.0, 1.0, 1.0});
    const auto adj = profiles::adjust_for_bidr(factors, sde, im);
    const double mean_factor = 2.0 * mathx::mean(sde);
    for (std::size_t i = 0; i < sde.size(); ++i)
        CHECK(adj.rows[i][0] == Approx(mean_factor).margin(1e-9));
}

TEST_CASE("adjusted factors are orthogonal to both regressors and keep their means") {
    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t n = 200;
    std::vector<double> sde(n), im(n);
    std::vector<std::vector<double>> factors(n, std::vector<double>(4));
    for (std::size_t i = 0; i < n; ++i) {
        sde[i] = noise(rng);
        im[i] = 0.4 * sde[i] + noise(rng);
        factors[i][0] = sde[i] + 0.5 * noise(rng);
        factors[i][1] = -0.7 * im[i] + noise(rng);
        factors[i][2] = noise(rng);
        factors[i][3] = 0.3 * sde[i] - 0.2 * im[i] + noise(rng);
    }
    const auto adj = profiles::adjust_for_bidr(factors, sde, im);
    for (std::size_t f = 0; f < 4; ++f) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = adj.rows[i][f];
        CHECK(std::fabs(correlation(column, sde)) < 1e-8);
        CHECK(std::fabs(correlation(column, im)) < 1e-8);
        std::vector<double> raw(n);
        for (std::size_t i = 0; i < n; ++i) raw[i] = factors[i][f];
        CHECK(std::fabs(mathx::mean(column) - mathx::mean(raw)) < 1e-9);
    }
}

TEST_CASE("exactly collinear regressors are rejected") {
    const std::vector<double> sde = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> im(sde);
    for (auto& v : im) v = 3.0 * v - 1.0;
    std::vector<std::vector<double>> factors(4, std::vector<double>{1, 2, 3, 4});
    CHECK_THROWS_AS(profiles::adjust_for_bidr(factors, sde, im), RankDeficient);

    std::vector<std::vector<double>> two(2, std::vector<double>{1, 2, 3, 4});
    CHECK_THROWS_AS(profiles::adjust_for_bidr(two, {1.0, 2.0}, {1.0, 1.0}), TooFewRows);
}

TEST_CASE("kmeans recovers two separated blobs") {
    const auto data = blob_data(60, {{0.0, 0.0}, {8.0, 8.0}}, 0.5, 7);
    const auto sol = profiles::kmeans(data, 2, 1);
    REQUIRE(sol.assignments.size() == data.size());
    // up to label swap
    const int first = sol.assignments[0];
    for (int i = 0; i < 60; ++i) CHECK(sol.assignments[static_cast<std::size_t>(i)] == first);
    for (int i = 60; i < 120; ++i) CHECK(sol.assignments[static_cast<std::size_t>(i)] == 1 - first);
    CHECK(sol.explained_variance > 0.9);
}

TEST_CASE("kmeans with k equal to one explains nothing") {
    const auto data = blob_data(40, {{0.0, 0.0}, {5.0, 5.0}}, 0.5, 9);
    const auto sol = profiles::kmeans(data, 1, 1);
    CHECK(sol.explained_variance == 0.0);
    CHECK(sol.k == 1);
}

TEST_CASE("kmeans explained variance is non-decreasing in k") {
    const auto data = blob_data(50, {{0, 0}, {4, 4}, {8, 0}}, 0.8, 11);
    double prev = -1.0;
    for (int k = 1; k <= 6; ++k) {
        const auto sol = profiles::kmeans(data, k, 5);
        CHECK(sol.explained_variance >= prev - 1e-9);
        prev = sol.explained_variance;
    }
}

TEST_CASE("kmeans assignments are invariant to row order up to label permutation") {
    const auto data = blob_data(40, {{0.0, 0.0}, {6.0, 6.0}}, 0.4, 13);
    const auto sol = profiles::kmeans(data, 2, 3);

    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937 rng(17);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<double>> shuffled;
    for (auto i : perm) shuffled.push_back(data[i]);
    const auto sol2 = profiles::kmeans(shuffled, 2, 3);

    // build the label map from the first pair and verify it holds everywhere
    const int map0 = sol2.assignments[0];
    const int orig0 = sol.assignments[perm[0]];
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const int expect = sol.assignments[perm[i]] == orig0 ? map0 : 1 - map0;
        CHECK(sol2.assignments[i] == expect);
    }

    CHECK_THROWS_AS(profiles::kmeans(blob_data(1, {{0, 0}}, 0.1, 1), 5, 0), TooFewRows);
}

TEST_CASE("select_k_agreement finds two blobs") {
    const auto data = blob_data(70, {{0.0, 0.0, 0.0, 0.0}, {6.0, 6.0, 6.0, 6.0}}, 0.6, 19);
    const auto sel = profiles::select_k_agreement(data, 6, 3);
    CHECK(sel.k_best == 2);
    CHECK(sel.votes.size() == 7);
    CHECK(sel.tally.at(2) >= 5);
}

TEST_CASE("select_k_agreement finds three blobs") {
    const auto data = blob_data(60, {{0, 0, 0, 0}, {7, 7, 0, 0}, {0, 7, 7, 7}}, 0.6, 23);
    const auto sel = profiles::select_k_agreement(data, 6, 3);
    CHECK(sel.k_best == 3);
    CHECK(sel.tally.at(3) >= 5);
}

TEST_CASE("select_k_agreement records scatter on unstructured data") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> data;
    for (int i = 0; i < 120; ++i) data.push_back({unit(rng), unit(rng), unit(rng), unit(rng)});
    const auto sel = profiles::select_k_agreement(data, 6, 7);
    CHECK(sel.votes.size() == 7);
    CHECK(sel.k_best >= 2);
    CHECK(sel.k_best <= 6);
    int total = 0;
    for (const auto& [k, count] : sel.tally) total += count;
    CHECK(total == 7);
}

TEST_CASE("select_k_agreement is deterministic given seed") {
    const auto data = blob_data(40, {{0, 0}, {5, 5}}, 0.8, 31);
    const auto a = profiles::select_k_agreement(data, 5, 11);
    const auto b = profiles::select_k_agreement(data, 5, 11);
    CHECK(a.k_best == b.k_best);
    CHECK(a.votes == b.votes);
}

TEST_CASE("validate_clusters_logreg") {
    const auto data = blob_data(60, {{0, 0, 0, 0}, {5, 5, 5, 5}}, 0.5, 37);
    std::vector<int> labels(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) labels[i] = i < 60 ? 0 : 1;
    CHECK(profiles::validate_clusters_logreg(data, labels, 3) >= 0.99);

    std::mt19937 rng(41);
    std::vector<int> random_labels(labels);
    std::shuffle(random_labels.begin(), random_labels.end(), rng);
    const double chance = profiles::validate_clusters_logreg(data, random_labels, 3);
    CHECK(chance > 0.35);
    CHECK(chance < 0.65);
}

TEST_CASE("compare_clusters") {
    std::mt19937 rng(43);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<int> assignments;
    std::vector<ml::LieMeasures> identical, shifted;
    for (int i = 0; i < 160; ++i) {
        assignments.push_back(i % 2);
        ml::LieMeasures m;
        // identical clusters by construction: consecutive rows share values
        if (i % 2 == 1) {
            identical.push_back(identical.back());
        } else {
            m.absolute_lies = 5.0 + noise(rng);
            m.standardized_ratio = 0.3 + 0.05 * noise(rng);
            m.deceptiveness = 3.9 + 0.5 * noise(rng);
            m.centrality = 3.5 + 0.5 * noise(rng);
            identical.push_back(m);
        }
        m = identical.back();
        // plant a one-SD shift on absolute lies for cluster 1
        if (i % 2 == 1) m.absolute_lies += 1.0;
        shifted.push_back(m);
    }

    const auto same = profiles::compare_clusters(assignments, identical, 999, 3);
    REQUIRE(same.size() == 4);
    for (const auto& cmp : same) {
        CHECK(std::fabs(cmp.test.effect.value) < 1e-12);
        CHECK(cmp.test.p > 0.9);
    }

    const auto planted = profiles::compare_clusters(assignments, shifted, 999, 3);
    bool found = false;
    for (const auto& cmp : planted)
        if (cmp.measure == "absolute_lies") {
            found = true;
            CHECK(std::fabs(cmp.test.effect.value) > 0.6);
            CHECK(cmp.test.p < 0.01);
        }
    CHECK(found);
}

TEST_CASE("standardize_columns and trickster labeling") {
    const auto data = blob_data(30, {{1.0, 10.0}, {3.0, 30.0}}, 0.2, 47);
    const auto scaled = profiles::standardize_columns(data);
    std::vector<double> col0(scaled.size()), col1(scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        col0[i] = scaled[i][0];
        col1[i] = scaled[i][1];
    }
    CHECK(std::fabs(mathx::mean(col0)) < 1e-9);
    CHECK(mathx::stddev(col1) == Approx(1.0).epsilon(0.02));

    // higher frequency/ability/contextuality and lower negativity wins
    const std::vector<std::vector<double>> centroids = {{1.0, 1.5, 4.5, 2.0},
                                                        {3.5, 4.0, 1.5, 4.0}};
    CHECK(profiles::trickster_cluster(centroids) == 1);
}
