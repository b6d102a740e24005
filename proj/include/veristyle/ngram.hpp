#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "veristyle/error.hpp"
#include "veristyle/mathx.hpp"
#include "veristyle/parallel.hpp"
#include "veristyle/rng.hpp"
#include "veristyle/stats.hpp"

// Bag-of-n-grams vectorization with a document-frequency floor, and the
// repeated-measures n-gram differentiation test: a paired signed-rank
// comparison per n-gram where rank ties are broken by uniform-random
// permutation and the statistic is averaged across iterations.

namespace veristyle::ngram {

struct NgramVocabulary {
    std::vector<std::string> ngrams;         // sorted; tokens joined by ' '
    std::vector<std::size_t> doc_frequency;  // aligned with ngrams
    std::size_t documents = 0;
    int n_max = 3;
    double min_df = 0.05;

    std::size_t size() const { return ngrams.size(); }
};

namespace detail {

inline std::string join(const std::vector<std::string>& tokens, std::size_t begin, std::size_t n) {
    std::string out = tokens[begin];
    for (std::size_t k = 1; k < n; ++k) {
        out.push_back(' ');
        out += tokens[begin + k];
    }
    return out;
}

template <typename Fn>
void for_each_ngram(const std::vector<std::string>& tokens, int n_max, Fn&& fn) {
    for (int n = 1; n <= n_max; ++n) {
        if (tokens.size() < static_cast<std::size_t>(n)) break;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) fn(join(tokens, i, n));
    }
}

}

// Document frequency counts presence, not multiplicity; an n-gram survives
// when it appears in at least ceil(min_df * documents) documents.
inline NgramVocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                                        int n_max = 3, double min_df = 0.05) {
    if (docs.empty()) throw EmptyCorpus();
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::unordered_map<std::string, bool> seen;
        detail::for_each_ngram(doc, n_max, [&](std::string g) { seen.emplace(std::move(g), true); });
        for (const auto& [g, _] : seen) ++df[g];
    }
    const auto floor =
        static_cast<std::size_t>(std::ceil(min_df * static_cast<double>(docs.size())));
    NgramVocabulary vocab;
    vocab.documents = docs.size();
    vocab.n_max = n_max;
    vocab.min_df = min_df;
    for (const auto& [g, count] : df)
        if (count >= std::max<std::size_t>(floor, 1)) vocab.ngrams.push_back(g);
    std::sort(vocab.ngrams.begin(), vocab.ngrams.end());
    vocab.doc_frequency.resize(vocab.ngrams.size());
    for (std::size_t i = 0; i < vocab.ngrams.size(); ++i)
        vocab.doc_frequency[i] = df[vocab.ngrams[i]];
    return vocab;
}

// Relative frequencies: n-gram count divided by the document's token count.
// Out-of-vocabulary n-grams are ignored; an empty document yields a zero row.
inline std::vector<double> vectorize(const std::vector<std::string>& doc,
                                     const NgramVocabulary& vocab) {
    std::vector<double> row(vocab.size(), 0.0);
    if (doc.empty()) return row;
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab.ngrams[i], i);
    detail::for_each_ngram(doc, vocab.n_max, [&](const std::string& g) {
        if (auto it = index.find(g); it != index.end()) row[it->second] += 1.0;
    });
    const auto denom = static_cast<double>(doc.size());
    for (auto& cell : row) cell /= denom;
    return row;
}

struct NgramMatrix {
    std::vector<std::string> statement_ids;
    std::vector<std::vector<double>> rows;
    std::size_t columns = 0;
};

inline NgramMatrix vectorize_all(const std::vector<std::string>& ids,
                                 const std::vector<std::vector<std::string>>& docs,
                                 const NgramVocabulary& vocab) {
    NgramMatrix m;
    m.statement_ids = ids;
    m.columns = vocab.size();
    m.rows.reserve(docs.size());
    for (const auto& doc : docs) m.rows.push_back(vectorize(doc, vocab));
    return m;
}

struct NgramDiffEntry {
    std::string ngram;
    double r = 0.0;          // signed effect, r > 0 means T > D
    double p = 1.0;
    double p_adj = 1.0;
    double ci_low = 0.0;     // at the Bonferroni-adjusted level
    double ci_high = 0.0;
    double statistic = 0.0;  // tie-averaged W+ (sum of positive ranks)
    std::size_t n_used = 0;  // pairs retained after dropping zero differences
    bool truth_greater = true;
};

struct NgramDiffResult {
    std::vector<NgramDiffEntry> entries;
    std::size_t pairs = 0;
    int iterations = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// Tie-averaged signed-rank statistic W+ for one difference vector (zeros
// already dropped). With no rank ties the loop collapses to the classic
// deterministic value.
inline double averaged_w_plus(const std::vector<double>& d, int iterations, std::mt19937_64& rng) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });

    // tie groups over |d| in sorted order
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end)
    bool any_tie = false;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
        groups.emplace_back(i, j + 1);
        if (j > i) any_tie = true;
        i = j + 1;
    }

    auto w_plus_with_ranks = [&](const std::vector<double>& ranks) {
        double w = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (d[order[k]] > 0.0) w += ranks[k];
        return w;
    };

    std::vector<double> ranks(n);
    for (std::size_t k = 0; k < n; ++k) ranks[k] = static_cast<double>(k + 1);
    if (!any_tie) return w_plus_with_ranks(ranks);

    double total = 0.0;
    std::vector<double> shuffled = ranks;
    for (int it = 0; it < iterations; ++it) {
        for (const auto& [b, e] : groups)
            if (e - b > 1) std::shuffle(shuffled.begin() + static_cast<long>(b),
                                        shuffled.begin() + static_cast<long>(e), rng);
        total += w_plus_with_ranks(shuffled);
    }
    return total / static_cast<double>(iterations);
}

}

// Per n-gram: paired differences d = truthful - deceptive within one event;
// zero differences are dropped; the tie-averaged W+ feeds a normal
// approximation with continuity correction; r = Z / sqrt(retained pairs),
// clamped to [-1, 1] and signed so r > 0 means T > D. N-grams whose
// differences are all zero are omitted. The tie-breaking stream is seeded
// per column (seed xor column index) so results are stable under any
// parallelism.
inline NgramDiffResult ngram_diff_test(const NgramMatrix& truthful, const NgramMatrix& deceptive,
                                       const NgramVocabulary& vocab, int iterations = 500,
                                       std::uint64_t seed = 0, unsigned jobs = 1) {
    if (truthful.rows.size() != deceptive.rows.size())
        throw VocabularyMismatch("ngram_diff_test: row counts differ");
    if (truthful.columns != vocab.size() || deceptive.columns != vocab.size())
        throw VocabularyMismatch("ngram_diff_test: rows built on a different vocabulary");
    const std::size_t pairs = truthful.rows.size();
    if (pairs < 6) throw TooFewPairs("ngram_diff_test requires >= 6 pairs");

    NgramDiffResult result;
    result.pairs = pairs;
    result.iterations = iterations;
    result.seed = seed;

    std::vector<NgramDiffEntry> slots(vocab.size());
    std::vector<char> keep(vocab.size(), 0);

    parallel_for(vocab.size(), jobs, [&](std::size_t col) {
        std::vector<double> d;
        d.reserve(pairs);
        for (std::size_t row = 0; row < pairs; ++row) {
            const double diff = truthful.rows[row][col] - deceptive.rows[row][col];
            if (diff != 0.0) d.push_back(diff);
        }
        if (d.empty()) return;

        auto rng = make_rng(seed ^ static_cast<std::uint64_t>(col));
        const double w = detail::averaged_w_plus(d, iterations, rng);
        const auto n = static_cast<double>(d.size());
        const double mean_w = n * (n + 1.0) / 4.0;
        const double sigma = std::sqrt(n * (n + 1.0) * (2.0 * n + 1.0) / 24.0);
        double centered = w - mean_w;
        if (centered > 0.5)
            centered -= 0.5;  // continuity correction
        else if (centered < -0.5)
            centered += 0.5;
        else
            centered = 0.0;
        const double z = centered / sigma;

        NgramDiffEntry e;
        e.ngram = vocab.ngrams[col];
        e.statistic = w;
        e.n_used = d.size();
        e.r = std::clamp(z / std::sqrt(n), -1.0, 1.0);
        e.p = std::clamp(2.0 * mathx::normal_sf(std::fabs(z)), 1e-300, 1.0);
        e.p_adj = e.p;
        e.truth_greater = e.r >= 0.0;
        slots[col] = std::move(e);
        keep[col] = 1;
    });

    for (std::size_t col = 0; col < slots.size(); ++col)
        if (keep[col]) result.entries.push_back(std::move(slots[col]));
    return result;
}

// Bonferroni over the n-grams tested within one event; confidence intervals
// for r are built on the Fisher-z scale at the adjusted level.
inline void adjust_bonferroni(NgramDiffResult& result, double alpha = 0.05) {
    const auto m = static_cast<double>(result.entries.size());
    if (m == 0.0) return;
    const double level = 1.0 - alpha / m;
    for (auto& e : result.entries) {
        e.p_adj = std::min(1.0, e.p * m);
        const double se = 1.0 / std::sqrt(std::max(static_cast<double>(e.n_used) - 3.0, 1.0));
        auto [lo, hi] = mathx::fisher_z_ci(e.r, se, level);
        e.ci_low = lo;
        e.ci_high = hi;
    }
    std::sort(result.entries.begin(), result.entries.end(),
              [](const NgramDiffEntry& a, const NgramDiffEntry& b) {
                  return std::fabs(a.r) > std::fabs(b.r);
              });
}

}
