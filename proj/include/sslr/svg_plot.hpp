#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "table.hpp"

namespace sslr {

enum class PlotKind { line, boundary, profile };

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> x, y;
};

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

/// Renders series into a fixed 800x520 canvas with linear axes.
inline std::string render_svg(const std::vector<Series>& series, const std::string& x_label,
                              const std::string& y_label, const std::string& title,
                              bool endpoint_markers) {
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    if (x_min > x_max)
        throw std::invalid_argument("render_svg: nothing to plot");
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad_y = 0.05 * (y_max - y_min);
    y_min -= pad_y;
    y_max += pad_y;

    const double w = 800, h = 520, ml = 90, mr = 30, mt = 50, mb = 70;
    const auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (w - ml - mr); };
    const auto py = [&](double y) { return h - mb - (y - y_min) / (y_max - y_min) * (h - mt - mb); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"520\" "
           "viewBox=\"0 0 800 520\">\n";
    svg += "<rect width=\"800\" height=\"520\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + "</text>\n";

    constexpr int n_tick = 6;
    for (int i = 0; i <= n_tick; ++i) {
        const double xv = x_min + (x_max - x_min) * i / n_tick;
        const double yv = y_min + (y_max - y_min) * i / n_tick;
        svg += "<line x1=\"" + svg_num(px(xv)) + "\" y1=\"" + svg_num(h - mb) + "\" x2=\"" +
               svg_num(px(xv)) + "\" y2=\"" + svg_num(mt) +
               "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg += "<line x1=\"" + svg_num(ml) + "\" y1=\"" + svg_num(py(yv)) + "\" x2=\"" +
               svg_num(w - mr) + "\" y2=\"" + svg_num(py(yv)) +
               "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + svg_num(px(xv)) + "\" y=\"" + svg_num(h - mb + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               tick_label(xv) + "</text>\n";
        svg += "<text x=\"" + svg_num(ml - 8) + "\" y=\"" + svg_num(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               tick_label(yv) + "</text>\n";
    }
    svg += "<rect x=\"" + svg_num(ml) + "\" y=\"" + svg_num(mt) + "\" width=\"" +
           svg_num(w - ml - mr) + "\" height=\"" + svg_num(h - mt - mb) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + svg_num(ml + (w - ml - mr) / 2) + "\" y=\"" + svg_num(h - 15) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
           x_label + "</text>\n";
    svg += "<text x=\"22\" y=\"" + svg_num(mt + (h - mt - mb) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 22 " + svg_num(mt + (h - mt - mb) / 2) + ")\">" +
           y_label + "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            pts += svg_num(px(s.x[i])) + "," + svg_num(py(s.y[i])) + " ";
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
               palette(si) + "\" stroke-width=\"1.8\"/>\n";
        if (endpoint_markers && !s.x.empty()) {
            for (std::size_t i : {std::size_t{0}, s.x.size() - 1})
                svg += "<circle cx=\"" + svg_num(px(s.x[i])) + "\" cy=\"" +
                       svg_num(py(s.y[i])) + "\" r=\"5\" fill=\"" + palette(si) + "\"/>\n";
        }
        svg += "<rect x=\"" + svg_num(w - mr - 180) + "\" y=\"" +
               svg_num(mt + 10 + 18.0 * si) + "\" width=\"14\" height=\"4\" fill=\"" +
               palette(si) + "\"/>\n";
        svg += "<text x=\"" + svg_num(w - mr - 160) + "\" y=\"" +
               svg_num(mt + 16 + 18.0 * si) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace detail

/// Renders a table to a static SVG. `line` and `profile` plot every column
/// against the first; `boundary` plots the last column against the
/// second-to-last as a single polyline with endpoint markers.
inline void emit_plot(const ResultTable& t, PlotKind kind, const std::string& path) {
    if (t.rows.empty() || t.columns.size() < 2)
        throw std::invalid_argument("emit_plot: table is empty");

    std::vector<detail::Series> series;
    std::string x_label, y_label;
    if (kind == PlotKind::boundary) {
        const std::size_t xc = t.columns.size() - 2, yc = t.columns.size() - 1;
        detail::Series s;
        s.label = t.columns[yc];
        for (const auto& row : t.rows) {
            s.x.push_back(row[xc]);
            s.y.push_back(row[yc]);
        }
        series.push_back(std::move(s));
        x_label = t.columns[xc];
        y_label = t.columns[yc];
    } else {
        for (std::size_t c = 1; c < t.columns.size(); ++c) {
            detail::Series s;
            s.label = t.columns[c];
            for (const auto& row : t.rows) {
                s.x.push_back(row[0]);
                s.y.push_back(row[c]);
            }
            series.push_back(std::move(s));
        }
        x_label = t.columns[0];
        y_label = series.size() == 1 ? t.columns[1] : "";
    }

    const std::string svg = detail::render_svg(series, x_label, y_label, t.name,
                                               kind == PlotKind::boundary);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw std::runtime_error("emit_plot: cannot open '" + tmp + "'");
        out << svg;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("emit_plot: cannot rename onto '" + path + "'");
}

} // namespace sslr
