#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "veristyle/error.hpp"
#include "veristyle/output.hpp"

// Static SVG plots: the cluster radar over the four profile factors and the
// effect-size dot plot for difference tables.

namespace veristyle::cli {

namespace svgdetail {

inline std::string pt(double x, double y) {
    return format_number(x) + "," + format_number(y);
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1b6ca8", "#c23b22", "#2e8b57", "#8a2be2", "#d2691e", "#444444"};
    return colors[i % 6];
}

}

// One polygon per centroid over the axes (factor names); values are scaled
// axis-wise to the [lo, hi] range observed in the data.
inline void write_radar_svg(const std::vector<std::string>& axes,
                            const std::vector<std::vector<double>>& centroids,
                            const std::vector<std::string>& labels, const std::string& path) {
    if (axes.empty() || centroids.empty()) throw Error("radar: nothing to draw");
    const std::size_t n_axes = axes.size();
    std::vector<double> lo(n_axes, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n_axes, -std::numeric_limits<double>::infinity());
    for (const auto& c : centroids)
        for (std::size_t j = 0; j < n_axes; ++j) {
            lo[j] = std::min(lo[j], c[j]);
            hi[j] = std::max(hi[j], c[j]);
        }
    for (std::size_t j = 0; j < n_axes; ++j) {
        const double pad = std::max(0.1 * (hi[j] - lo[j]), 1e-6);
        lo[j] -= pad;
        hi[j] += pad;
    }

    const double cx = 260, cy = 240, radius = 160;
    auto point = [&](std::size_t axis, double fraction) {
        const double angle = -M_PI / 2.0 + 2.0 * M_PI * static_cast<double>(axis) /
                                               static_cast<double>(n_axes);
        return std::pair<double, double>{cx + radius * fraction * std::cos(angle),
                                         cy + radius * fraction * std::sin(angle)};
    };

    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileUnreadable(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"500\" "
           "viewBox=\"0 0 520 500\">\n";
    out << "<rect width=\"520\" height=\"500\" fill=\"white\"/>\n";

    // rings and spokes
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
        out << "<polygon fill=\"none\" stroke=\"#cccccc\" points=\"";
        for (std::size_t j = 0; j < n_axes; ++j) {
            const auto [x, y] = point(j, frac);
            out << svgdetail::pt(x, y) << " ";
        }
        out << "\"/>\n";
    }
    for (std::size_t j = 0; j < n_axes; ++j) {
        const auto [x, y] = point(j, 1.0);
        out << "<line stroke=\"#cccccc\" x1=\"" << format_number(cx) << "\" y1=\""
            << format_number(cy) << "\" x2=\"" << format_number(x) << "\" y2=\""
            << format_number(y) << "\"/>\n";
        const auto [lx, ly] = point(j, 1.15);
        out << "<text font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" x=\""
            << format_number(lx) << "\" y=\"" << format_number(ly) << "\">" << axes[j]
            << "</text>\n";
    }

    for (std::size_t c = 0; c < centroids.size(); ++c) {
        out << "<polygon fill=\"" << svgdetail::palette(c) << "\" fill-opacity=\"0.15\" stroke=\""
            << svgdetail::palette(c) << "\" stroke-width=\"2\" points=\"";
        for (std::size_t j = 0; j < n_axes; ++j) {
            const double frac = (centroids[c][j] - lo[j]) / (hi[j] - lo[j]);
            const auto [x, y] = point(j, std::clamp(frac, 0.0, 1.0));
            out << svgdetail::pt(x, y) << " ";
        }
        out << "\"/>\n";
        const std::string label = c < labels.size() ? labels[c] : "cluster " + std::to_string(c);
        out << "<rect x=\"20\" y=\"" << format_number(20.0 + 22.0 * static_cast<double>(c))
            << "\" width=\"14\" height=\"14\" fill=\"" << svgdetail::palette(c) << "\"/>\n";
        out << "<text font-family=\"sans-serif\" font-size=\"14\" x=\"40\" y=\""
            << format_number(32.0 + 22.0 * static_cast<double>(c)) << "\">" << label << "</text>\n";
    }
    out << "</svg>\n";
}

struct DotPlotEntry {
    std::string label;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// Horizontal dot-and-whisker plot around a zero line.
inline void write_dotplot_svg(const std::vector<DotPlotEntry>& entries, const std::string& title,
                              const std::string& path) {
    if (entries.empty()) throw Error("dot plot: nothing to draw");
    double lo = 0.0, hi = 0.0;
    for (const auto& e : entries) {
        lo = std::min({lo, e.ci_low, e.value});
        hi = std::max({hi, e.ci_high, e.value});
    }
    const double pad = std::max(0.1 * (hi - lo), 0.05);
    lo -= pad;
    hi += pad;

    const double left = 180, right = 620, top = 50;
    const double row_h = 24;
    const double height = top + row_h * static_cast<double>(entries.size()) + 40;
    auto x_of = [&](double v) { return left + (v - lo) / (hi - lo) * (right - left); };

    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileUnreadable(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"660\" height=\""
        << format_number(height) << "\" viewBox=\"0 0 660 " << format_number(height) << "\">\n";
    out << "<rect width=\"660\" height=\"" << format_number(height) << "\" fill=\"white\"/>\n";
    out << "<text font-family=\"sans-serif\" font-size=\"15\" x=\"20\" y=\"26\">" << title
        << "</text>\n";
    out << "<line stroke=\"#888888\" stroke-dasharray=\"4 3\" x1=\"" << format_number(x_of(0.0))
        << "\" y1=\"" << format_number(top - 10) << "\" x2=\"" << format_number(x_of(0.0))
        << "\" y2=\"" << format_number(height - 30) << "\"/>\n";

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const double y = top + row_h * static_cast<double>(i) + row_h / 2.0;
        out << "<text font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" x=\"170\" y=\""
            << format_number(y + 4) << "\">" << e.label << "</text>\n";
        out << "<line stroke=\"#1b6ca8\" stroke-width=\"2\" x1=\"" << format_number(x_of(e.ci_low))
            << "\" y1=\"" << format_number(y) << "\" x2=\"" << format_number(x_of(e.ci_high))
            << "\" y2=\"" << format_number(y) << "\"/>\n";
        out << "<circle fill=\"#1b6ca8\" cx=\"" << format_number(x_of(e.value)) << "\" cy=\""
            << format_number(y) << "\" r=\"4\"/>\n";
    }
    out << "</svg>\n";
}

}
