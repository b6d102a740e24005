#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "veristyle/mathx.hpp"
#include "veristyle/ngram.hpp"

using namespace veristyle;
using Catch::Approx;

namespace {

// Exact two-sided signed-rank p for tie-free differences: enumerate all 2^n
// sign assignments of the ranks and count deviations of W+ from its mean at
// least as large as observed.
double exact_signed_rank_p(const std::vector<double>& d) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
    std::vector<double> rank_of(n);
    for (std::size_t k = 0; k < n; ++k) rank_of[order[k]] = static_cast<double>(k + 1);

    double w_obs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0) w_obs += rank_of[i];
    const double mean = static_cast<double>(n) * (static_cast<double>(n) + 1.0) / 4.0;
    const double dev_obs = std::fabs(w_obs - mean);

    std::size_t count = 0;
    const std::uint32_t total = 1u << n;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1u) w += rank_of[i];
        if (std::fabs(w - mean) >= dev_obs - 1e-12) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(total);
}

ngram::NgramMatrix one_column(const std::vector<double>& values) {
    ngram::NgramMatrix m;
    m.columns = 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        m.statement_ids.push_back("s" + std::to_string(i));
        m.rows.push_back({values[i]});
    }
    return m;
}

ngram::NgramVocabulary one_word_vocab() {
    ngram::NgramVocabulary v;
    v.ngrams = {"word"};
    v.doc_frequency = {1};
    v.documents = 1;
    return v;
}

}

TEST_CASE("build_vocabulary applies the document-frequency floor") {
    std::vector<std::vector<std::string>> docs(10);
    docs[0] = {"rare", "pair"};
    for (std::size_t i = 1; i < docs.size(); ++i) docs[i] = {"common", "words", "appear"};

    // ceil(0.05 * 10) = 1: everything stays
    const auto keep = ngram::build_vocabulary(docs, 3, 0.05);
    CHECK(std::find(keep.ngrams.begin(), keep.ngrams.end(), "rare pair") != keep.ngrams.end());

    // ceil(0.2 * 10) = 2: the single-document bigram drops
    const auto drop = ngram::build_vocabulary(docs, 3, 0.2);
    CHECK(std::find(drop.ngrams.begin(), drop.ngrams.end(), "rare pair") == drop.ngrams.end());
    CHECK(std::find(drop.ngrams.begin(), drop.ngrams.end(), "common words") != drop.ngrams.end());

    CHECK_THROWS_AS(ngram::build_vocabulary({}, 3, 0.05), EmptyCorpus);
}

TEST_CASE("document frequency counts presence, not multiplicity") {
    std::vector<std::vector<std::string>> docs = {
        {"echo", "echo", "echo", "echo"},
        {"other"},
        {"other"},
        {"other"},
    };
    const auto vocab = ngram::build_vocabulary(docs, 1, 0.5);
    // "echo" appears in one document only (25%), so the 50% floor drops it
    CHECK(std::find(vocab.ngrams.begin(), vocab.ngrams.end(), "echo") == vocab.ngrams.end());
}

TEST_CASE("vectorize emits relative frequencies") {
    std::vector<std::vector<std::string>> docs = {{"word"}, {"word", "other"}};
    const auto vocab = ngram::build_vocabulary(docs, 1, 0.05);

    const auto idx = std::find(vocab.ngrams.begin(), vocab.ngrams.end(), "word") - vocab.ngrams.begin();
    const auto full = ngram::vectorize({"word", "word", "word", "word"}, vocab);
    CHECK(full[static_cast<std::size_t>(idx)] == Approx(1.0));

    const auto empty = ngram::vectorize({}, vocab);
    for (double cell : empty) CHECK(cell == 0.0);

    std::vector<std::string> ten = {"word", "a", "b", "c", "word", "d", "e", "f", "g", "h"};
    const auto partial = ngram::vectorize(ten, vocab);
    CHECK(partial[static_cast<std::size_t>(idx)] == Approx(0.2));
}

TEST_CASE("ngram_diff_test omits all-zero difference columns") {
    const std::vector<double> same = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    const auto r = ngram::ngram_diff_test(one_column(same), one_column(same), one_word_vocab(),
                                          500, 42);
    CHECK(r.entries.empty());
}

TEST_CASE("tie-free statistic equals the deterministic signed-rank value") {
    // d = {+1,...,+6}: W+ = 21
    const std::vector<double> truthful = {1.1, 2.2, 3.3, 4.4, 5.5, 6.6};
    const std::vector<double> deceptive = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    const auto r = ngram::ngram_diff_test(one_column(truthful), one_column(deceptive),
                                          one_word_vocab(), 500, 42);
    REQUIRE(r.entries.size() == 1);
    const auto& e = r.entries[0];
    CHECK(e.statistic == 21.0);
    CHECK(e.n_used == 6);
    CHECK(e.truth_greater);
    CHECK(e.r > 0.0);

    std::vector<double> d(6);
    for (std::size_t i = 0; i < 6; ++i) d[i] = truthful[i] - deceptive[i];
    const double p_exact = exact_signed_rank_p(d);
    CHECK(p_exact == Approx(2.0 / 64.0));
    // documented approximation gap: normal p within 0.05 of the enumeration
    CHECK(std::fabs(e.p - p_exact) < 0.05);
}

TEST_CASE("normal approximation stays near enumeration for small tie-free samples") {
    std::mt19937 rng(77);
    std::normal_distribution<double> noise(0.4, 1.0);
    std::uniform_int_distribution<int> n_dist(6, 10);
    for (int c = 0; c < 25; ++c) {
        const int n = n_dist(rng);
        std::vector<double> t(n), dcp(n);
        for (int i = 0; i < n; ++i) {
            dcp[i] = noise(rng);
            t[i] = dcp[i] + noise(rng);
        }
        const auto r = ngram::ngram_diff_test(one_column(t), one_column(dcp), one_word_vocab(),
                                              500, 1000 + c);
        if (r.entries.empty()) continue;
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = t[i] - dcp[i];
        std::vector<double> nonzero;
        for (double v : d)
            if (v != 0.0) nonzero.push_back(v);
        CHECK(std::fabs(r.entries[0].p - exact_signed_rank_p(nonzero)) < 0.05);
    }
}

TEST_CASE("swapping conditions negates r and preserves p") {
    const std::vector<double> a = {0.5, 0.1, 0.9, 0.2, 0.7, 0.3, 0.8};
    const std::vector<double> b = {0.2, 0.4, 0.3, 0.6, 0.1, 0.9, 0.5};
    const auto fwd = ngram::ngram_diff_test(one_column(a), one_column(b), one_word_vocab(), 500, 9);
    const auto rev = ngram::ngram_diff_test(one_column(b), one_column(a), one_word_vocab(), 500, 9);
    REQUIRE(fwd.entries.size() == 1);
    REQUIRE(rev.entries.size() == 1);
    CHECK(fwd.entries[0].r == Approx(-rev.entries[0].r));
    CHECK(fwd.entries[0].p == Approx(rev.entries[0].p));
    CHECK(fwd.entries[0].truth_greater != rev.entries[0].truth_greater);
}

TEST_CASE("results are reproducible given seed and iterations") {
    // ties in |d| so the randomized averaging actually runs
    const std::vector<double> t = {0.3, 0.5, 0.1, 0.6, 0.2, 0.8, 0.4, 0.9};
    const std::vector<double> d = {0.2, 0.4, 0.2, 0.5, 0.3, 0.7, 0.3, 0.8};
    const auto r1 = ngram::ngram_diff_test(one_column(t), one_column(d), one_word_vocab(), 500, 5);
    const auto r2 = ngram::ngram_diff_test(one_column(t), one_column(d), one_word_vocab(), 500, 5);
    REQUIRE(r1.entries.size() == 1);
    REQUIRE(r2.entries.size() == 1);
    CHECK(r1.entries[0].statistic == r2.entries[0].statistic);
    CHECK(r1.entries[0].p == r2.entries[0].p);
}

TEST_CASE("tie averaging is stable across seeds for larger samples") {
    // 24 pairs with heavy ties in |d|
    std::vector<double> t(24), d(24);
    for (int i = 0; i < 24; ++i) {
        d[i] = 0.1;
        t[i] = 0.1 + ((i % 3 == 0) ? -0.05 : 0.05) * (1 + i % 2);
    }
    std::vector<double> stats;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto r =
            ngram::ngram_diff_test(one_column(t), one_column(d), one_word_vocab(), 500, seed);
        REQUIRE(r.entries.size() == 1);
        stats.push_back(r.entries[0].statistic);
    }
    const double m = mathx::mean(stats);
    const double se = mathx::stddev(stats);
    CHECK(se / std::fabs(m) < 0.01);
}

TEST_CASE("input validation") {
    const std::vector<double> five = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(ngram::ngram_diff_test(one_column(five), one_column(five), one_word_vocab()),
                    TooFewPairs);
    const std::vector<double> six = {1, 2, 3, 4, 5, 6};
    auto wrong = one_column(six);
    wrong.columns = 2;
    for (auto& row : wrong.rows) row.push_back(0.0);
    CHECK_THROWS_AS(ngram::ngram_diff_test(wrong, one_column(six), one_word_vocab()),
                    VocabularyMismatch);
}

TEST_CASE("bonferroni adjustment sorts by effect size and bounds intervals") {
    ngram::NgramVocabulary vocab;
    vocab.ngrams = {"alpha", "beta"};
    vocab.doc_frequency = {1, 1};
    vocab.documents = 1;
    ngram::NgramMatrix t, d;
    t.columns = d.columns = 2;
    std::mt19937 rng(3);
    std::normal_distribution<double> noise(0.0, 0.1);
    for (int i = 0; i < 20; ++i) {
        t.statement_ids.push_back("t" + std::to_string(i));
        d.statement_ids.push_back("d" + std::to_string(i));
        const double base = noise(rng);
        t.rows.push_back({0.5 + 0.3 + noise(rng), base + noise(rng)});
        d.rows.push_back({0.5 + noise(rng), base + noise(rng)});
    }
    auto result = ngram::ngram_diff_test(t, d, vocab, 500, 11);
    ngram::adjust_bonferroni(result);
    REQUIRE(result.entries.size() >= 1);
    for (const auto& e : result.entries) {
        CHECK(e.p_adj >= e.p);
        CHECK(e.ci_low <= e.r);
        CHECK(e.ci_high >= e.r);
        CHECK(e.r >= -1.0);
        CHECK(e.r <= 1.0);
    }
    for (std::size_t i = 1; i < result.entries.size(); ++i)
        CHECK(std::fabs(result.entries[i - 1].r) >= std::fabs(result.entries[i].r));
}
