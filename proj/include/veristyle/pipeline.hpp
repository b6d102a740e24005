#pragma once

#include <map>
#include <string>
#include <vector>

#include "veristyle/corpus.hpp"
#include "veristyle/cv.hpp"
#include "veristyle/forest.hpp"
#include "veristyle/ngram.hpp"
#include "veristyle/stylometry.hpp"

// Glue between the corpus and the feature representations: statement ids,
// the four feature-matrix builders and the per-statement lie measures.

namespace veristyle::pipeline {

inline std::string statement_id(const corpus::ParticipantRecord& r, corpus::Veracity v) {
    return r.participant_id + (v == corpus::Veracity::Truthful ? "_t" : "_d");
}

template <typename Fn>
void for_each_statement(const corpus::Corpus& c, Fn&& fn) {
    for (const auto& r : c.records) {
        fn(r, r.truthful);
        fn(r, r.deceptive);
    }
}

namespace detail {

inline void push_row(ml::FeatureMatrix& X, const corpus::ParticipantRecord& r,
                     const corpus::Statement& s, std::vector<double> row) {
    X.statement_ids.push_back(statement_id(r, s.veracity));
    X.participant_ids.push_back(r.participant_id);
    X.labels.push_back(s.veracity == corpus::Veracity::Deceptive ? 1 : 0);
    X.rows.push_back(std::move(row));
}

}

// 26 stylometry features per statement; Missing cells become NaN.
inline ml::FeatureMatrix build_declarative_matrix(const corpus::Corpus& c,
                                                  const stylometry::Resources& res) {
    ml::FeatureMatrix X;
    const auto& names = stylometry::declarative_feature_names();
    X.feature_names.assign(names.begin(), names.end());
    for_each_statement(c, [&](const corpus::ParticipantRecord& r, const corpus::Statement& s) {
        const auto vec = stylometry::declarative_features(s, res, statement_id(r, s.veracity));
        const auto cells = stylometry::declarative_row(vec);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(cell ? *cell : mathx::kNaN);
        detail::push_row(X, r, s, std::move(row));
    });
    X.check();
    return X;
}

// Every declared category percentage plus WC and Period.
inline ml::FeatureMatrix build_lexicon_matrix(const corpus::Corpus& c,
                                              const lex::CategoryLexicon& lexicon) {
    ml::FeatureMatrix X;
    X.feature_names = lexicon.categories;
    X.feature_names.push_back("WC");
    X.feature_names.push_back("Period");
    for_each_statement(c, [&](const corpus::ParticipantRecord& r, const corpus::Statement& s) {
        const auto vec = stylometry::lexicon_vector(s, lexicon, statement_id(r, s.veracity));
        std::vector<double> row;
        row.reserve(X.feature_names.size());
        for (const auto& name : lexicon.categories) row.push_back(vec.percentages.at(name));
        row.push_back(vec.wc);
        row.push_back(vec.period);
        detail::push_row(X, r, s, std::move(row));
    });
    X.check();
    return X;
}

struct BowBuild {
    ml::FeatureMatrix matrix;
    ngram::NgramVocabulary vocabulary;
    std::vector<std::vector<std::string>> docs;  // content words, row-aligned
};

// Bag of 1-3-grams over content words with the document-frequency floor.
inline BowBuild build_bow_matrix(const corpus::Corpus& c, const stylometry::Resources& res,
                                 int n_max, double min_df) {
    BowBuild out;
    std::vector<const corpus::ParticipantRecord*> recs;
    std::vector<const corpus::Statement*> stmts;
    for_each_statement(c, [&](const corpus::ParticipantRecord& r, const corpus::Statement& s) {
        recs.push_back(&r);
        stmts.push_back(&s);
        out.docs.push_back(text::content_words(s.text, res.stoplist, res.lemmas));
    });
    out.vocabulary = ngram::build_vocabulary(out.docs, n_max, min_df);
    out.matrix.feature_names = out.vocabulary.ngrams;
    for (std::size_t i = 0; i < out.docs.size(); ++i)
        detail::push_row(out.matrix, *recs[i], *stmts[i],
                         ngram::vectorize(out.docs[i], out.vocabulary));
    out.matrix.check();
    return out;
}

// Precomputed embedding vectors keyed by statement id.
inline ml::FeatureMatrix build_embedding_matrix(const corpus::Corpus& c,
                                                const ml::EmbeddingTable& table) {
    ml::FeatureMatrix X;
    for (std::size_t j = 0; j < table.dimension; ++j)
        X.feature_names.push_back("e" + std::to_string(j));
    for_each_statement(c, [&](const corpus::ParticipantRecord& r, const corpus::Statement& s) {
        const auto sid = statement_id(r, s.veracity);
        const auto it = table.vectors.find(sid);
        if (it == table.vectors.end())
            throw Error("embedding table lacks statement '" + sid + "'");
        detail::push_row(X, r, s, it->second);
    });
    X.check();
    return X;
}

// Lie measures per deceptive statement id (Table 5S/6S dependent variables).
inline std::map<std::string, ml::LieMeasures> lie_measures_by_statement(const corpus::Corpus& c) {
    std::map<std::string, ml::LieMeasures> out;
    for (const auto& r : c.records) {
        ml::LieMeasures m;
        m.absolute_lies = static_cast<double>(r.deceptive.embedded_lies.size());
        m.standardized_ratio = corpus::lie_word_ratio(r.deceptive);
        double dec = 0.0, cen = 0.0;
        for (const auto& lie : r.deceptive.embedded_lies) {
            dec += lie.deceptiveness;
            cen += lie.centrality;
        }
        const auto n = static_cast<double>(r.deceptive.embedded_lies.size());
        m.deceptiveness = n > 0 ? dec / n : 0.0;
        m.centrality = n > 0 ? cen / n : 0.0;
        out[statement_id(r, corpus::Veracity::Deceptive)] = m;
    }
    return out;
}

inline stylometry::Resources load_resources(const cli::ResourcePaths& paths) {
    stylometry::Resources res;
    const auto categories = paths.categories_path();
    if (categories.empty()) throw MissingResource("category lexicon");
    res.categories = lex::load_category_lexicon(categories);
    const auto stopwords = paths.stopwords_path();
    if (stopwords.empty()) throw MissingResource("stop-word list");
    res.stoplist = text::load_stoplist(stopwords);
    const auto lemmas = paths.lemmas_path();
    if (lemmas.empty()) throw MissingResource("lemma table");
    res.lemmas = text::load_lemma_table(lemmas);
    const auto gazetteer = paths.gazetteer_path();
    if (gazetteer.empty()) throw MissingResource("gazetteer");
    res.gazetteer = lex::load_gazetteer(gazetteer);
    const auto concreteness = paths.concreteness_path();
    if (concreteness.empty()) throw MissingResource("concreteness lexicon");
    res.concreteness = lex::load_concreteness(concreteness);
    if (!paths.summary.empty()) res.summaries = stylometry::load_summary_csv(paths.summary);
    return res;
}

}
