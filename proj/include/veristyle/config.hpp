#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "veristyle/error.hpp"
#include "veristyle/forest.hpp"
#include "veristyle/textproc.hpp"

// Run configuration: one JSON or TOML file plus flag overrides (flags win).
// The VERISTYLE_RESOURCES environment variable sets the default resource
// directory; individual paths can override file by file.

namespace veristyle::cli {

struct ResourcePaths {
    std::string dir;  // directory holding the default resource files
    std::string categories;
    std::string stopwords;
    std::string lemmas;
    std::string gazetteer;
    std::string concreteness;
    std::string embeddings;  // optional
    std::string summary;     // optional pass-through CSV

    std::string resolve(const std::string& explicit_path, const char* fallback_name) const {
        if (!explicit_path.empty()) return explicit_path;
        if (dir.empty()) return {};
        return (std::filesystem::path(dir) / fallback_name).string();
    }

    std::string categories_path() const { return resolve(categories, "demo_categories.dic"); }
    std::string stopwords_path() const { return resolve(stopwords, "stopwords.txt"); }
    std::string lemmas_path() const { return resolve(lemmas, "lemmas.tsv"); }
    std::string gazetteer_path() const { return resolve(gazetteer, "gazetteer.json"); }
    std::string concreteness_path() const { return resolve(concreteness, "concreteness.csv"); }
};

struct CvSettings {
    int outer_k = 10;
    int inner_k = 10;
    bool grouped = true;  // ungrouped only as an ablation
    std::string grid_path;
};

struct ClusterSettings {
    int k_max = 6;
    int restarts = 25;
    bool adjust = true;
    int forced_k = 0;  // 0 = select by method agreement
};

struct RunConfig {
    std::string corpus;
    ResourcePaths resources;
    std::uint64_t seed = 42;
    int n_perm = 9999;
    double min_df = 0.05;
    int ngram_iterations = 500;
    int ngram_max_n = 3;
    double alpha = 0.05;
    CvSettings cv;
    ClusterSettings cluster;
    std::string out = "out";
    std::string format = "csv";  // csv | json | md
    unsigned jobs = 1;
    bool strict = false;
    std::vector<std::string> classify_sets = {"declarative", "lexicon", "bow"};
};

namespace detail {

// Flat TOML subset: [section] headers, key = value with strings, numbers,
// booleans and arrays of those. Enough for run configs; anything fancier
// should use JSON.
inline nlohmann::json parse_toml_subset(std::istream& in) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* section = &root;
    std::string line;
    long line_no = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    auto parse_scalar = [&](std::string v) -> nlohmann::json {
        v = trim(v);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
        if (v == "true") return true;
        if (v == "false") return false;
        try {
            if (v.find('.') != std::string::npos || v.find('e') != std::string::npos)
                return std::stod(v);
            return std::stoll(v);
        } catch (...) {
            throw Error("config line " + std::to_string(line_no) + ": cannot parse value '" + v + "'");
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            const std::string name = trim(line.substr(1, line.size() - 2));
            section = &root[name];
            if (section->is_null()) *section = nlohmann::json::object();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw Error("config line " + std::to_string(line_no) + ": unterminated array");
            nlohmann::json arr = nlohmann::json::array();
            std::string body = value.substr(1, value.size() - 2);
            std::size_t start = 0;
            while (start <= body.size() && !body.empty()) {
                auto comma = body.find(',', start);
                const std::string item =
                    comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start);
                if (!trim(item).empty()) arr.push_back(parse_scalar(item));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            (*section)[key] = std::move(arr);
        } else {
            (*section)[key] = parse_scalar(value);
        }
    }
    return root;
}

template <typename T>
void maybe(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}

inline RunConfig config_from_json(const nlohmann::json& doc) {
    RunConfig cfg;
    if (const char* env = std::getenv("VERISTYLE_RESOURCES")) cfg.resources.dir = env;

    detail::maybe(doc, "corpus", cfg.corpus);
    detail::maybe(doc, "seed", cfg.seed);
    detail::maybe(doc, "n_perm", cfg.n_perm);
    detail::maybe(doc, "min_df", cfg.min_df);
    detail::maybe(doc, "ngram_iterations", cfg.ngram_iterations);
    detail::maybe(doc, "ngram_max_n", cfg.ngram_max_n);
    detail::maybe(doc, "alpha", cfg.alpha);
    detail::maybe(doc, "out", cfg.out);
    detail::maybe(doc, "format", cfg.format);
    detail::maybe(doc, "jobs", cfg.jobs);
    detail::maybe(doc, "strict", cfg.strict);
    detail::maybe(doc, "classify_sets", cfg.classify_sets);
    if (doc.contains("resources")) {
        const auto& r = doc.at("resources");
        detail::maybe(r, "dir", cfg.resources.dir);
        detail::maybe(r, "categories", cfg.resources.categories);
        detail::maybe(r, "stopwords", cfg.resources.stopwords);
        detail::maybe(r, "lemmas", cfg.resources.lemmas);
        detail::maybe(r, "gazetteer", cfg.resources.gazetteer);
        detail::maybe(r, "concreteness", cfg.resources.concreteness);
        detail::maybe(r, "embeddings", cfg.resources.embeddings);
        detail::maybe(r, "summary", cfg.resources.summary);
    }
    if (doc.contains("cv")) {
        const auto& c = doc.at("cv");
        detail::maybe(c, "outer_k", cfg.cv.outer_k);
        detail::maybe(c, "inner_k", cfg.cv.inner_k);
        detail::maybe(c, "grouped", cfg.cv.grouped);
        detail::maybe(c, "grid", cfg.cv.grid_path);
    }
    if (doc.contains("cluster")) {
        const auto& c = doc.at("cluster");
        detail::maybe(c, "k_max", cfg.cluster.k_max);
        detail::maybe(c, "restarts", cfg.cluster.restarts);
        detail::maybe(c, "adjust", cfg.cluster.adjust);
        detail::maybe(c, "k", cfg.cluster.forced_k);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    if (path.empty()) return config_from_json(nlohmann::json::object());
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    nlohmann::json doc;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") {
        doc = detail::parse_toml_subset(in);
    } else {
        try {
            in >> doc;
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(std::string("config: invalid JSON: ") + e.what());
        }
    }
    return config_from_json(doc);
}

// Canonical digest of the effective configuration; embedded in every output
// so identical runs are recognizable.
inline std::string config_digest(const RunConfig& cfg) {
    nlohmann::json doc;
    doc["corpus"] = cfg.corpus;
    doc["resources"] = {{"categories", cfg.resources.categories_path()},
                        {"stopwords", cfg.resources.stopwords_path()},
                        {"lemmas", cfg.resources.lemmas_path()},
                        {"gazetteer", cfg.resources.gazetteer_path()},
                        {"concreteness", cfg.resources.concreteness_path()},
                        {"embeddings", cfg.resources.embeddings},
                        {"summary", cfg.resources.summary}};
    doc["seed"] = cfg.seed;
    doc["n_perm"] = cfg.n_perm;
    doc["min_df"] = cfg.min_df;
    doc["ngram_iterations"] = cfg.ngram_iterations;
    doc["ngram_max_n"] = cfg.ngram_max_n;
    doc["alpha"] = cfg.alpha;
    doc["cv"] = {{"outer_k", cfg.cv.outer_k},
                 {"inner_k", cfg.cv.inner_k},
                 {"grouped", cfg.cv.grouped},
                 {"grid", cfg.cv.grid_path}};
    doc["cluster"] = {{"k_max", cfg.cluster.k_max},
                      {"restarts", cfg.cluster.restarts},
                      {"adjust", cfg.cluster.adjust},
                      {"k", cfg.cluster.forced_k}};
    doc["strict"] = cfg.strict;
    doc["classify_sets"] = cfg.classify_sets;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(text::fnv1a64(doc.dump())));
    return buf;
}

// Default hyperparameter grid; a grid file (JSON map of value lists)
// replaces it wholesale.
inline std::vector<ml::ForestHyperParams> default_grid() {
    std::vector<ml::ForestHyperParams> grid;
    for (int n_trees : {100, 300, 500})
        for (int max_depth : {0, 10})
            for (int min_leaf : {1, 5})
                for (auto sampling : {ml::FeatureSampling::Sqrt, ml::FeatureSampling::Log2}) {
                    ml::ForestHyperParams hp;
                    hp.n_trees = n_trees;
                    hp.max_depth = max_depth;
                    hp.min_leaf = min_leaf;
                    hp.features_per_split = sampling;
                    grid.push_back(hp);
                }
    return grid;
}

// Grid file: JSON mapping hyperparameter name -> list of values, expanded as
// a full Cartesian product in file order.
inline std::vector<ml::ForestHyperParams> load_grid(const std::string& path) {
    if (path.empty()) return default_grid();
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("grid file: invalid JSON: ") + e.what());
    }
    std::vector<int> trees = {300}, depths = {0}, leaves = {1};
    std::vector<std::string> samplings = {"sqrt"};
    detail::maybe(doc, "n_trees", trees);
    detail::maybe(doc, "max_depth", depths);
    detail::maybe(doc, "min_leaf", leaves);
    detail::maybe(doc, "features_per_split", samplings);
    std::vector<ml::ForestHyperParams> grid;
    for (int t : trees)
        for (int d : depths)
            for (int l : leaves)
                for (const auto& s : samplings) {
                    ml::ForestHyperParams hp;
                    hp.n_trees = t;
                    hp.max_depth = d;
                    hp.min_leaf = l;
                    if (s == "sqrt")
                        hp.features_per_split = ml::FeatureSampling::Sqrt;
                    else if (s == "log2")
                        hp.features_per_split = ml::FeatureSampling::Log2;
                    else
                        throw Error("grid file: unknown features_per_split '" + s + "'");
                    grid.push_back(hp);
                }
    if (grid.empty()) throw EmptyGrid();
    return grid;
}

}
