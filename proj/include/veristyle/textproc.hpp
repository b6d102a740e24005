#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "veristyle/error.hpp"

// Deterministic text primitives shared by every feature extractor.
//
// Tokenization rule: words are maximal runs of letters, digits and
// apostrophes; sentence boundaries sit at '.', '!' or '?' followed by
// whitespace or end of text. Hyphenated forms split into separate tokens;
// "didn't" stays one token. Non-ASCII code points count as word characters
// except a small set of typographic punctuation, so accented words hold
// together without a Unicode property table. Text with no word characters
// yields zero tokens and zero sentences.

namespace veristyle::text {

struct SentenceSpan {
    std::size_t begin = 0;  // first token index
    std::size_t end = 0;    // one past last token index
};

struct TokenizedText {
    std::vector<std::string> tokens;
    std::vector<SentenceSpan> sentences;
    std::uint64_t source_hash = 0;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace detail {

struct Cp {
    char32_t value = 0;
    std::size_t length = 1;
};

inline Cp decode_utf8(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = 1;
    char32_t cp = b0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};  // stray continuation byte
    }
    if (i + len > s.size()) return {0xFFFD, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

inline bool is_typographic_punct(char32_t cp) {
    switch (cp) {
        case 0x00A0:  // no-break space
        case 0x00AB: case 0x00BB:                       // « »
        case 0x2013: case 0x2014:                       // – —
        case 0x2018: case 0x201C: case 0x201D:          // ' " "
        case 0x2022: case 0x2026:                       // • …
            return true;
        default:
            return false;
    }
}

inline bool is_word_cp(char32_t cp) {
    if (cp < 0x80) {
        return std::isalnum(static_cast<int>(cp)) != 0 || cp == U'\'';
    }
    if (cp == 0x2019) return true;  // right single quote used as apostrophe
    return !is_typographic_punct(cp);
}

}

inline TokenizedText tokenize(std::string_view raw) {
    TokenizedText out;
    out.source_hash = fnv1a64(raw);

    std::string current;
    std::size_t sentence_begin = 0;
    auto flush_token = [&] {
        if (!current.empty()) {
            out.tokens.push_back(current);
            current.clear();
        }
    };
    auto close_sentence = [&] {
        if (out.tokens.size() > sentence_begin) {
            out.sentences.push_back({sentence_begin, out.tokens.size()});
            sentence_begin = out.tokens.size();
        }
    };

    std::size_t i = 0;
    const std::size_t n = raw.size();
    while (i < n) {
        const auto cp = detail::decode_utf8(raw, i);
        if (detail::is_word_cp(cp.value)) {
            if (cp.value == 0x2019) {
                current.push_back('\'');
            } else {
                current.append(raw.substr(i, cp.length));
            }
        } else {
            flush_token();
            if (cp.value == U'.' || cp.value == U'!' || cp.value == U'?') {
                std::size_t j = i + cp.length;
                bool at_boundary = j >= n;
                if (!at_boundary) {
                    const auto next = detail::decode_utf8(raw, j);
                    at_boundary = (next.value < 0x80 && std::isspace(static_cast<int>(next.value))) ||
                                  next.value == 0x00A0;
                }
                if (at_boundary) close_sentence();
            }
        }
        i += cp.length;
    }
    flush_token();
    close_sentence();
    return out;
}

inline std::size_t word_count(std::string_view raw) { return tokenize(raw).tokens.size(); }

// Heuristic syllable count: contiguous vowel clusters (a,e,i,o,u,y) count one
// each; a trailing 'e' forming its own cluster is dropped as silent unless
// the word ends in consonant+"le" or dropping it would leave zero syllables.
// Minimum 1.
inline int count_syllables(std::string_view word) {
    auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
    auto is_vowel = [&](char c) {
        c = lower(c);
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
    };
    int clusters = 0;
    bool in_cluster = false;
    for (char c : word) {
        if (is_vowel(c)) {
            if (!in_cluster) ++clusters;
            in_cluster = true;
        } else {
            in_cluster = false;
        }
    }
    const std::size_t n = word.size();
    if (n >= 2 && clusters > 1 && lower(word[n - 1]) == 'e' && !is_vowel(word[n - 2])) {
        const bool ends_cons_le = n >= 3 && lower(word[n - 2]) == 'l' && !is_vowel(word[n - 3]);
        if (!ends_cons_le) --clusters;
    }
    return clusters < 1 ? 1 : clusters;
}

inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

using Stoplist = std::unordered_set<std::string>;
using LemmaTable = std::unordered_map<std::string, std::string>;

// One lowercase word per line; '#' lines are comments.
inline Stoplist load_stoplist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    Stoplist out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.insert(to_lower(line));
    }
    return out;
}

// Tab-separated form<TAB>lemma, lowercase.
inline LemmaTable load_lemma_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    LemmaTable out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        out[to_lower(line.substr(0, tab))] = to_lower(line.substr(tab + 1));
    }
    return out;
}

// Case-insensitive removal; sentence spans are rebuilt over the surviving
// tokens and may end up empty.
inline TokenizedText remove_stopwords(const TokenizedText& t, const Stoplist& stoplist) {
    TokenizedText out;
    out.source_hash = t.source_hash;
    for (const auto& span : t.sentences) {
        const std::size_t begin = out.tokens.size();
        for (std::size_t i = span.begin; i < span.end; ++i) {
            if (!stoplist.contains(to_lower(t.tokens[i]))) out.tokens.push_back(t.tokens[i]);
        }
        out.sentences.push_back({begin, out.tokens.size()});
    }
    return out;
}

namespace detail {

inline bool has_vowel(std::string_view s) {
    for (char c : s) {
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l == 'a' || l == 'e' || l == 'i' || l == 'o' || l == 'u' || l == 'y') return true;
    }
    return false;
}

inline int vowel_groups(std::string_view s) {
    int groups = 0;
    bool in = false;
    for (char c : s) {
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        const bool v = l == 'a' || l == 'e' || l == 'i' || l == 'o' || l == 'u';
        if (v && !in) ++groups;
        in = v;
    }
    return groups;
}

inline bool is_cons(char c) {
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return std::isalpha(static_cast<unsigned char>(l)) &&
           !(l == 'a' || l == 'e' || l == 'i' || l == 'o' || l == 'u');
}

// Fixups after stripping -ed/-ing: undouble a doubled final consonant
// (running -> run) or restore a dropped 'e' on short CVC stems
// (driv -> drive).
inline std::string fix_stripped_stem(std::string stem) {
    const std::size_t n = stem.size();
    if (n >= 3 && stem[n - 1] == stem[n - 2] && is_cons(stem[n - 1]) &&
        stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
        stem.pop_back();
        return stem;
    }
    if (n >= 3) {
        const char c2 = stem[n - 1], c1 = stem[n - 2], c0 = stem[n - 3];
        const auto vowel = [](char c) {
            return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
        };
        if (is_cons(c2) && c2 != 'w' && c2 != 'x' && c2 != 'y' && vowel(c1) && is_cons(c0) &&
            vowel_groups(stem) == 1) {
            stem.push_back('e');
        }
    }
    return stem;
}

}

// Lowercase lemma. Table lookup wins; otherwise rule-based suffix stripping
// (-s, -es, -ies, -ed, -ing with undoubling and e-restoration); unknown and
// unmatched forms pass through lowercased.
inline std::string lemmatize(std::string_view word, const LemmaTable& table) {
    std::string w = to_lower(word);
    if (auto it = table.find(w); it != table.end()) return it->second;

    const std::size_t n = w.size();
    auto ends_with = [&](std::string_view suf) {
        return n >= suf.size() && std::string_view(w).substr(n - suf.size()) == suf;
    };

    if (n > 4 && ends_with("ies")) return w.substr(0, n - 3) + "y";
    if (n > 4 && (ends_with("sses") || ends_with("shes") || ends_with("ches") ||
                  ends_with("xes") || ends_with("zes")))
        return w.substr(0, n - 2);
    if (n > 4 && ends_with("ing")) {
        std::string stem = w.substr(0, n - 3);
        if (detail::has_vowel(stem)) return detail::fix_stripped_stem(std::move(stem));
    }
    if (n > 3 && ends_with("ed")) {
        std::string stem = w.substr(0, n - 2);
        if (detail::has_vowel(stem)) return detail::fix_stripped_stem(std::move(stem));
    }
    if (n > 3 && ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is"))
        return w.substr(0, n - 1);
    return w;
}

// tokenize -> lowercase -> stop-word removal -> lemmatize, in that order.
inline std::vector<std::string> content_words(std::string_view raw, const Stoplist& stoplist,
                                              const LemmaTable& table) {
    const auto t = tokenize(raw);
    std::vector<std::string> out;
    out.reserve(t.tokens.size());
    for (const auto& tok : t.tokens) {
        const std::string lower = to_lower(tok);
        if (stoplist.contains(lower)) continue;
        out.push_back(lemmatize(lower, table));
    }
    return out;
}

// Count of '.', '!' or '?' characters followed by whitespace or end of text;
// feeds the Period column of the lexicon vector.
inline std::size_t terminator_count(std::string_view raw) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (c != '.' && c != '!' && c != '?') continue;
        if (i + 1 >= raw.size() || std::isspace(static_cast<unsigned char>(raw[i + 1]))) ++count;
    }
    return count;
}

}
