#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "veristyle/error.hpp"
#include "veristyle/textproc.hpp"

// The three pluggable lexical resources: wildcard category dictionaries in
// the LIWC .dic convention (a licensed LIWC-22 file loads unmodified), the
// word-level concreteness lexicon, and a gazetteer+regex named-entity
// recognizer with People/Temporal/Spatial/Quantity semantics.

namespace veristyle::lex {

// Patterns are lowercase exact words or prefixes ending in '*'.
class CategoryLexicon {
public:
    std::vector<std::string> categories;

    void add_entry(const std::string& pattern, const std::set<int>& ids) {
        if (!pattern.empty() && pattern.back() == '*')
            wildcard_[pattern.substr(0, pattern.size() - 1)].insert(ids.begin(), ids.end());
        else
            exact_[pattern].insert(ids.begin(), ids.end());
    }

    std::size_t pattern_count() const { return exact_.size() + wildcard_.size(); }

    // Exact match wins; otherwise the longest wildcard prefix.
    const std::set<int>* match(const std::string& lower_token) const {
        if (auto it = exact_.find(lower_token); it != exact_.end()) return &it->second;
        for (std::size_t len = lower_token.size(); len > 0; --len) {
            if (auto it = wildcard_.find(lower_token.substr(0, len)); it != wildcard_.end())
                return &it->second;
        }
        return nullptr;
    }

    std::optional<int> category_index(std::string_view name) const {
        for (std::size_t i = 0; i < categories.size(); ++i)
            if (categories[i] == name) return static_cast<int>(i);
        return std::nullopt;
    }

private:
    std::unordered_map<std::string, std::set<int>> exact_;
    std::unordered_map<std::string, std::set<int>> wildcard_;  // key = prefix without '*'
};

// LIWC .dic convention: a header block between '%' lines maps integer ids to
// category names, then pattern<TAB>id[<TAB>id...] lines. Duplicate patterns
// merge their category sets.
inline CategoryLexicon load_category_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);

    CategoryLexicon lex;
    std::map<int, int> id_to_index;
    std::string line;
    long line_no = 0;
    int percent_seen = 0;

    auto split_tabs = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (start <= s.size()) {
            const auto tab = s.find('\t', start);
            if (tab == std::string::npos) {
                parts.push_back(s.substr(start));
                break;
            }
            parts.push_back(s.substr(start, tab - start));
            start = tab + 1;
        }
        return parts;
    };

    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        if (line == "%") {
            ++percent_seen;
            continue;
        }
        if (percent_seen == 0)
            throw MalformedHeader("line " + std::to_string(line_no) +
                                  ": content before the opening '%' header line");
        if (percent_seen == 1) {
            // header block: id <TAB> name
            std::istringstream ss(line);
            int id;
            std::string name;
            if (!(ss >> id >> name))
                throw MalformedHeader("line " + std::to_string(line_no) + ": bad category declaration");
            if (id_to_index.count(id))
                throw MalformedHeader("line " + std::to_string(line_no) + ": duplicate category id");
            id_to_index[id] = static_cast<int>(lex.categories.size());
            lex.categories.push_back(name);
            continue;
        }
        // entry block
        auto parts = split_tabs(line);
        if (parts.size() < 2)
            throw MalformedHeader("line " + std::to_string(line_no) + ": entry lacks category ids");
        std::string pattern = text::to_lower(parts[0]);
        const auto star = pattern.find('*');
        if (star != std::string::npos && star != pattern.size() - 1)
            throw MalformedHeader("line " + std::to_string(line_no) + ": '*' only allowed in final position");
        std::set<int> ids;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            if (parts[i].empty()) continue;
            int id;
            try {
                id = std::stoi(parts[i]);
            } catch (...) {
                throw MalformedHeader("line " + std::to_string(line_no) + ": non-numeric category id");
            }
            const auto it = id_to_index.find(id);
            if (it == id_to_index.end()) throw UnknownCategoryId(line_no, id);
            ids.insert(it->second);
        }
        lex.add_entry(pattern, ids);
    }
    if (percent_seen < 2) throw MalformedHeader("header block not closed by a second '%' line");
    return lex;
}

// For each declared category, 100 x matched tokens / total tokens. A token
// may hit several categories through its entry's id set.
inline std::map<std::string, double> category_percentages(const text::TokenizedText& t,
                                                          const CategoryLexicon& lex) {
    if (t.tokens.empty()) throw EmptyText();
    std::vector<std::size_t> hits(lex.categories.size(), 0);
    for (const auto& tok : t.tokens) {
        const auto* ids = lex.match(text::to_lower(tok));
        if (!ids) continue;
        for (int id : *ids) hits[static_cast<std::size_t>(id)] += 1;
    }
    std::map<std::string, double> out;
    const auto total = static_cast<double>(t.tokens.size());
    for (std::size_t i = 0; i < lex.categories.size(); ++i)
        out[lex.categories[i]] = 100.0 * static_cast<double>(hits[i]) / total;
    return out;
}

// --- concreteness ------------------------------------------------------------

struct ConcretenessLexicon {
    std::unordered_map<std::string, double> scores;  // word -> [1,5]
};

// CSV word,score. A header line starting with "word" is tolerated.
inline ConcretenessLexicon load_concreteness(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    ConcretenessLexicon lex;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error("concreteness file line " + std::to_string(line_no) + ": expected word,score");
        const std::string word = text::to_lower(line.substr(0, comma));
        if (line_no == 1 && word == "word") continue;
        double score;
        try {
            score = std::stod(line.substr(comma + 1));
        } catch (...) {
            throw Error("concreteness file line " + std::to_string(line_no) + ": bad score");
        }
        if (score < 1.0 || score > 5.0)
            throw Error("concreteness file line " + std::to_string(line_no) + ": score outside [1,5]");
        lex.scores[word] = score;
    }
    return lex;
}

// Mean over covered words; words absent from the lexicon are skipped; no
// covered word yields an empty optional (a value, not an error).
inline std::optional<double> concreteness_mean(const std::vector<std::string>& words,
                                               const ConcretenessLexicon& lex) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& w : words) {
        if (auto it = lex.scores.find(text::to_lower(w)); it != lex.scores.end()) {
            sum += it->second;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

// --- named entities ----------------------------------------------------------

enum class EntityCategory { People, Temporal, Spatial, Quantity };

inline std::string_view entity_category_name(EntityCategory c) {
    switch (c) {
        case EntityCategory::People: return "people";
        case EntityCategory::Temporal: return "temporal";
        case EntityCategory::Spatial: return "spatial";
        case EntityCategory::Quantity: return "quantity";
    }
    return "";
}

// Literal lists per category plus named regex slots. The slot-to-category
// mapping is fixed: time and date feed Temporal; number, ordinal, currency
// and percent feed Quantity.
struct NerGazetteer {
    std::map<EntityCategory, std::vector<std::string>> literals;
    std::vector<std::pair<std::string, std::regex>> temporal_regexes;  // slot name, pattern
    std::vector<std::pair<std::string, std::regex>> quantity_regexes;
};

inline NerGazetteer load_gazetteer(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("gazetteer: invalid JSON: ") + e.what());
    }

    NerGazetteer gaz;
    const std::pair<const char*, EntityCategory> arrays[] = {
        {"people", EntityCategory::People},
        {"temporal", EntityCategory::Temporal},
        {"spatial", EntityCategory::Spatial},
        {"quantity", EntityCategory::Quantity},
    };
    for (const auto& [key, cat] : arrays) {
        if (!doc.contains(key) || !doc[key].is_array())
            throw Error(std::string("gazetteer: missing literal array '") + key + "'");
        for (const auto& item : doc[key]) gaz.literals[cat].push_back(text::to_lower(item.get<std::string>()));
    }
    if (doc.contains("regex")) {
        // slots applied in declaration order below; earlier slots claim spans
        const std::pair<const char*, bool> slots[] = {
            {"time", true}, {"date", true},
            {"currency", false}, {"percent", false}, {"ordinal", false}, {"number", false},
        };
        for (const auto& [slot, temporal] : slots) {
            if (!doc["regex"].contains(slot)) continue;
            const std::string pat = doc["regex"][slot].get<std::string>();
            try {
                std::regex re(pat, std::regex::ECMAScript | std::regex::icase);
                (temporal ? gaz.temporal_regexes : gaz.quantity_regexes).emplace_back(slot, std::move(re));
            } catch (const std::regex_error& e) {
                throw Error(std::string("gazetteer: bad regex in slot '") + slot + "': " + e.what());
            }
        }
    }
    return gaz;
}

namespace detail {

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

inline void match_literals(const std::string& lower, const std::vector<std::string>& pats,
                           std::set<std::string>& forms) {
    for (const auto& pat : pats) {
        if (pat.empty()) continue;
        std::size_t pos = 0;
        while ((pos = lower.find(pat, pos)) != std::string::npos) {
            const bool left_ok = pos == 0 || !is_word_char(lower[pos - 1]);
            const std::size_t end = pos + pat.size();
            const bool right_ok = end >= lower.size() || !is_word_char(lower[end]);
            if (left_ok && right_ok) forms.insert(pat);
            pos += 1;
        }
    }
}

struct Span {
    std::size_t begin, end;
    bool overlaps(std::size_t b, std::size_t e) const { return b < end && begin < e; }
};

inline void match_regexes(const std::string& lower,
                          const std::vector<std::pair<std::string, std::regex>>& res,
                          std::vector<Span>& claimed, std::set<std::string>& forms) {
    for (const auto& [slot, re] : res) {
        for (auto it = std::sregex_iterator(lower.begin(), lower.end(), re);
             it != std::sregex_iterator(); ++it) {
            const auto b = static_cast<std::size_t>(it->position());
            const auto e = b + static_cast<std::size_t>(it->length());
            bool taken = false;
            for (const auto& s : claimed)
                if (s.overlaps(b, e)) {
                    taken = true;
                    break;
                }
            if (taken) continue;
            claimed.push_back({b, e});
            forms.insert(it->str());
        }
    }
}

}

// Unique surface forms per category, case-insensitive; duplicates collapse.
// Regex slots claim spans in priority order so "2:30" never double-counts
// its digits as quantities.
inline std::map<EntityCategory, std::size_t> ner_unique_counts(std::string_view raw,
                                                               const NerGazetteer& gaz) {
    const std::string lower = text::to_lower(raw);
    std::map<EntityCategory, std::set<std::string>> forms;
    for (const auto& [cat, pats] : gaz.literals) detail::match_literals(lower, pats, forms[cat]);

    std::vector<detail::Span> claimed;
    detail::match_regexes(lower, gaz.temporal_regexes, claimed, forms[EntityCategory::Temporal]);
    detail::match_regexes(lower, gaz.quantity_regexes, claimed, forms[EntityCategory::Quantity]);

    std::map<EntityCategory, std::size_t> counts;
    for (auto cat : {EntityCategory::People, EntityCategory::Temporal, EntityCategory::Spatial,
                     EntityCategory::Quantity})
        counts[cat] = forms.count(cat) ? forms[cat].size() : 0;
    return counts;
}

}
