#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "veristyle/error.hpp"
#include "veristyle/version.hpp"

// Deterministic table writers. Every file embeds {tool version, seed, config
// digest} so a rerun with the same inputs byte-reproduces it.

namespace veristyle::cli {

struct Meta {
    std::string version = kVersion;
    std::uint64_t seed = 0;
    std::string config_digest;
};

// Fixed shortest-round-trip-ish formatting keeps CSV output byte-stable.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

class Cell {
public:
    Cell(const char* s) : text_(s) {}
    Cell(std::string s) : text_(std::move(s)) {}
    Cell(double v) : text_(format_number(v)) {}
    Cell(int v) : text_(std::to_string(v)) {}
    Cell(std::size_t v) : text_(std::to_string(v)) {}
    Cell(std::optional<double> v) : text_(v ? format_number(*v) : std::string()) {}
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> cells) { rows.push_back(std::move(cells)); }
};

inline void ensure_parent(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

inline void write_table_csv(const Table& t, const Meta& meta, const std::string& path) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileUnreadable(path);
    out << "# veristyle=" << meta.version << " seed=" << meta.seed
        << " config=" << meta.config_digest << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out << (c ? "," : "") << csv_escape(t.columns[c]);
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << csv_escape(row[c].text());
        out << "\n";
    }
}

inline void write_table_markdown(const Table& t, const Meta& meta, const std::string& path) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileUnreadable(path);
    out << "<!-- veristyle=" << meta.version << " seed=" << meta.seed
        << " config=" << meta.config_digest << " -->\n";
    out << "|";
    for (const auto& c : t.columns) out << " " << c << " |";
    out << "\n|";
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << " --- |";
    out << "\n";
    for (const auto& row : t.rows) {
        out << "|";
        for (const auto& cell : row) out << " " << cell.text() << " |";
        out << "\n";
    }
}

inline nlohmann::json table_to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj;
        for (std::size_t c = 0; c < row.size() && c < t.columns.size(); ++c)
            obj[t.columns[c]] = row[c].text();
        rows.push_back(std::move(obj));
    }
    return rows;
}

inline void write_json(const nlohmann::json& doc, const Meta& meta, const std::string& path) {
    ensure_parent(path);
    nlohmann::json wrapped;
    wrapped["meta"] = {{"version", meta.version}, {"seed", meta.seed}, {"config", meta.config_digest}};
    for (auto it = doc.begin(); it != doc.end(); ++it) wrapped[it.key()] = it.value();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileUnreadable(path);
    out << wrapped.dump(2) << "\n";
}

// Writes the table in the configured format; CSV also when asked for
// markdown-only is false. Returns the paths written.
inline std::vector<std::string> write_table(const Table& t, const Meta& meta,
                                            const std::string& base_path,
                                            const std::string& format) {
    std::vector<std::string> written;
    if (format == "json") {
        nlohmann::json doc;
        doc["rows"] = table_to_json(t);
        write_json(doc, meta, base_path + ".json");
        written.push_back(base_path + ".json");
    } else if (format == "md") {
        write_table_markdown(t, meta, base_path + ".md");
        written.push_back(base_path + ".md");
    } else {
        write_table_csv(t, meta, base_path + ".csv");
        written.push_back(base_path + ".csv");
    }
    return written;
}

}
