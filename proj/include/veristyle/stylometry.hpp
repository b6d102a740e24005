#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "veristyle/corpus.hpp"
#include "veristyle/error.hpp"
#include "veristyle/lexicons.hpp"
#include "veristyle/textproc.hpp"

// Per-statement feature assembly: the 26-feature deception stylometry vector
// (text statistics, readability, category composites, named-entity counts,
// concreteness) and the full category-percentage vector.

namespace veristyle::stylometry {

struct SummaryRow {
    std::optional<double> analytic;
    std::optional<double> authentic;
    std::optional<double> clout;
};

// Optional per-statement pass-through for the proprietary summary variables:
// CSV statement_id,Analytic,Authentic,Clout with empty cells allowed.
inline std::unordered_map<std::string, SummaryRow> load_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    std::unordered_map<std::string, SummaryRow> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (line_no == 1 && !cells.empty() && cells[0] == "statement_id") continue;
        if (cells.size() != 4)
            throw Error("summary csv line " + std::to_string(line_no) +
                        ": expected statement_id,Analytic,Authentic,Clout");
        SummaryRow row;
        auto parse_cell = [&](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return std::stod(s);
        };
        row.analytic = parse_cell(cells[1]);
        row.authentic = parse_cell(cells[2]);
        row.clout = parse_cell(cells[3]);
        out[cells[0]] = row;
    }
    return out;
}

struct Resources {
    lex::CategoryLexicon categories;
    lex::ConcretenessLexicon concreteness;
    lex::NerGazetteer gazetteer;
    text::Stoplist stoplist;
    text::LemmaTable lemmas;
    std::unordered_map<std::string, SummaryRow> summaries;  // keyed by statement_id
};

inline double fk_grade(std::size_t words, std::size_t sentences, std::size_t syllables) {
    if (words < 1 || sentences < 1) throw Error("fk_grade requires words >= 1 and sentences >= 1");
    const double w = static_cast<double>(words), s = static_cast<double>(sentences),
                 y = static_cast<double>(syllables);
    return 0.39 * (w / s) + 11.8 * (y / w) - 15.59;
}

inline double fk_read(std::size_t words, std::size_t sentences, std::size_t syllables) {
    if (words < 1 || sentences < 1) throw Error("fk_read requires words >= 1 and sentences >= 1");
    const double w = static_cast<double>(words), s = static_cast<double>(sentences),
                 y = static_cast<double>(syllables);
    return 206.835 - 1.015 * (w / s) - 84.6 * (y / w);
}

// Bounded 0-100 standardization of tone_pos - tone_neg; 50 when both are 0.
inline double tone(double tone_pos, double tone_neg) {
    constexpr double kEps = 1e-9;
    return 50.0 + 50.0 * (tone_pos - tone_neg) / std::max(tone_pos + tone_neg, kEps);
}

struct DeclarativeVector {
    double num_sentences = 0;
    double num_words = 0;
    double num_syllables = 0;
    double avg_syllables_per_word = 0;
    double fk_grade = 0;
    double fk_read = 0;
    std::optional<double> analytic;
    std::optional<double> authentic;
    double tone = 50.0;
    double tone_pos = 0;
    double tone_neg = 0;
    double cognition = 0;
    double memory = 0;
    double focuspast = 0;
    double focuspresent = 0;
    double focusfuture = 0;
    double self_reference = 0;
    double other_reference = 0;
    double perceptual_details = 0;
    double contextual_embedding = 0;
    double reality_monitoring = 0;
    std::optional<double> concreteness;
    double people = 0;
    double temporal_details = 0;
    double spatial_details = 0;
    double quantity_details = 0;
};

inline const std::array<std::string, 26>& declarative_feature_names() {
    static const std::array<std::string, 26> names = {
        "num_sentences", "num_words", "num_syllables", "avg_syllables_per_word",
        "fk_grade", "fk_read", "Analytic", "Authentic", "Tone", "tone_pos", "tone_neg",
        "Cognition", "memory", "focuspast", "focuspresent", "focusfuture",
        "Self-reference", "Other-reference", "Perceptual details", "Contextual Embedding",
        "Reality Monitoring", "Concreteness score", "People", "Temporal details",
        "Spatial details", "Quantity details"};
    return names;
}

inline std::array<std::optional<double>, 26> declarative_row(const DeclarativeVector& v) {
    return {v.num_sentences, v.num_words, v.num_syllables, v.avg_syllables_per_word,
            v.fk_grade, v.fk_read, v.analytic, v.authentic, v.tone, v.tone_pos, v.tone_neg,
            v.cognition, v.memory, v.focuspast, v.focuspresent, v.focusfuture,
            v.self_reference, v.other_reference, v.perceptual_details, v.contextual_embedding,
            v.reality_monitoring, v.concreteness, v.people, v.temporal_details,
            v.spatial_details, v.quantity_details};
}

namespace detail {

// Category lookup by exact name, then case-insensitively; absent -> 0.
inline double pct(const std::map<std::string, double>& pcts, std::string_view name) {
    if (auto it = pcts.find(std::string(name)); it != pcts.end()) return it->second;
    const std::string lower = text::to_lower(name);
    for (const auto& [k, v] : pcts)
        if (text::to_lower(k) == lower) return v;
    return 0.0;
}

inline bool has_category(const std::map<std::string, double>& pcts, std::string_view name) {
    if (pcts.count(std::string(name))) return true;
    const std::string lower = text::to_lower(name);
    for (const auto& [k, v] : pcts)
        if (text::to_lower(k) == lower) return true;
    return false;
}

}

// All 26 fields from one statement. Composites follow the published sums:
// self-reference = i + we; other-reference = shehe + they + you; perceptual =
// attention + visual + auditory + feeling; contextual = space + motion +
// time; reality monitoring = perceptual + contextual + Affect - Cognition.
// Affect falls back to tone_pos + tone_neg when the dictionary declares no
// Affect category.
inline DeclarativeVector declarative_features(const corpus::Statement& stmt,
                                              const Resources& res,
                                              const std::string& statement_id = "") {
    const auto t = text::tokenize(stmt.text);
    if (t.tokens.empty()) throw EmptyText();

    DeclarativeVector v;
    v.num_sentences = static_cast<double>(t.sentences.size());
    v.num_words = static_cast<double>(t.tokens.size());
    std::size_t syllables = 0;
    for (const auto& tok : t.tokens) syllables += static_cast<std::size_t>(text::count_syllables(tok));
    v.num_syllables = static_cast<double>(syllables);
    v.avg_syllables_per_word = v.num_syllables / v.num_words;
    v.fk_grade = fk_grade(t.tokens.size(), t.sentences.size(), syllables);
    v.fk_read = fk_read(t.tokens.size(), t.sentences.size(), syllables);

    const auto pcts = lex::category_percentages(t, res.categories);
    v.tone_pos = detail::pct(pcts, "tone_pos");
    v.tone_neg = detail::pct(pcts, "tone_neg");
    v.tone = tone(v.tone_pos, v.tone_neg);
    v.cognition = detail::pct(pcts, "Cognition");
    v.memory = detail::pct(pcts, "memory");
    v.focuspast = detail::pct(pcts, "focuspast");
    v.focuspresent = detail::pct(pcts, "focuspresent");
    v.focusfuture = detail::pct(pcts, "focusfuture");
    v.self_reference = detail::pct(pcts, "i") + detail::pct(pcts, "we");
    v.other_reference = detail::pct(pcts, "shehe") + detail::pct(pcts, "they") + detail::pct(pcts, "you");
    v.perceptual_details = detail::pct(pcts, "attention") + detail::pct(pcts, "visual") +
                           detail::pct(pcts, "auditory") + detail::pct(pcts, "feeling");
    v.contextual_embedding =
        detail::pct(pcts, "space") + detail::pct(pcts, "motion") + detail::pct(pcts, "time");
    const double affect = detail::has_category(pcts, "Affect") ? detail::pct(pcts, "Affect")
                                                               : v.tone_pos + v.tone_neg;
    v.reality_monitoring = v.perceptual_details + v.contextual_embedding + affect - v.cognition;

    v.concreteness =
        lex::concreteness_mean(text::content_words(stmt.text, res.stoplist, res.lemmas), res.concreteness);

    const auto ner = lex::ner_unique_counts(stmt.text, res.gazetteer);
    v.people = static_cast<double>(ner.at(lex::EntityCategory::People));
    v.temporal_details = static_cast<double>(ner.at(lex::EntityCategory::Temporal));
    v.spatial_details = static_cast<double>(ner.at(lex::EntityCategory::Spatial));
    v.quantity_details = static_cast<double>(ner.at(lex::EntityCategory::Quantity));

    if (!statement_id.empty()) {
        if (auto it = res.summaries.find(statement_id); it != res.summaries.end()) {
            v.analytic = it->second.analytic;
            v.authentic = it->second.authentic;
        }
    }
    return v;
}

struct LexiconVector {
    std::string statement_id;
    std::map<std::string, double> percentages;
    double wc = 0;      // token count
    double period = 0;  // sentence-terminator count
};

// Every declared category percentage plus WC and Period.
inline LexiconVector lexicon_vector(const corpus::Statement& stmt, const lex::CategoryLexicon& lex,
                                    const std::string& statement_id = "") {
    const auto t = text::tokenize(stmt.text);
    if (t.tokens.empty()) throw EmptyText();
    LexiconVector v;
    v.statement_id = statement_id;
    v.percentages = lex::category_percentages(t, lex);
    v.wc = static_cast<double>(t.tokens.size());
    v.period = static_cast<double>(text::terminator_count(stmt.text));
    return v;
}

}
