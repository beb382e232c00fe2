#ifndef PANELSOM_SVG_HPP
#define PANELSOM_SVG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "panelsom/grouping.hpp"
#include "panelsom/som.hpp"

namespace panelsom::svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string header(int width, int height) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
}

// Fixed ordered palette for class identity; index 0 unused filler tone.
inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> p = {
        "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
        "#aa3377", "#bbbbbb", "#999933", "#332288", "#117733"};
    return p;
}

inline std::string gray_tone(int index, int count) {
    const int level = count > 1 ? 230 - (190 * index) / (count - 1) : 128;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level, level);
    return buf;
}

/// One small polyline panel per unit, laid out on the map topology.
inline std::string profile_grid(const CodeBook& cb, const std::vector<std::string>& variables) {
    const int rows = cb.topology.kind == Topology::Kind::Grid2d ? cb.topology.rows : 1;
    const int cols = cb.topology.kind == Topology::Kind::Grid2d ? cb.topology.cols
                                                                : cb.topology.units();
    const int cell = 72, pad = 8, top = 24;
    const int W = cols * cell + 2 * pad, H = rows * cell + top + pad;

    double lo = cb.weights.empty() ? 0.0 : cb.weights[0], hi = lo;
    for (double w : cb.weights) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    if (hi == lo) hi = lo + 1.0;

    std::string s = header(W, H);
    s += "<text x=\"" + std::to_string(pad) + "\" y=\"16\" font-size=\"12\" "
         "font-family=\"sans-serif\">code vector profiles (" +
         std::to_string(variables.size()) + " variables)</text>\n";
    for (int u = 0; u < cb.topology.units(); ++u) {
        const int r = u / cols, c = u % cols;
        const double x0 = pad + c * cell, y0 = top + r * cell;
        s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + std::to_string(cell) +
             "\" height=\"" + std::to_string(cell) + "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
        s += "<text x=\"" + num(x0 + 3) + "\" y=\"" + num(y0 + 12) +
             "\" font-size=\"9\" font-family=\"sans-serif\" fill=\"#888888\">" +
             std::to_string(u + 1) + "</text>\n";
        const auto w = cb.unit(u);
        std::string pts;
        for (int v = 0; v < cb.dim; ++v) {
            const double px = x0 + 4 + (cell - 8) * (cb.dim > 1 ? static_cast<double>(v) / (cb.dim - 1) : 0.5);
            const double py = y0 + cell - 4 - (cell - 20) * (w[v] - lo) / (hi - lo);
            if (!pts.empty()) pts += ' ';
            pts += num(px) + "," + num(py);
        }
        s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"1\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

/// The map partition into super-classes as a shaded grid.
inline std::string partition_grid(const Topology& topo, const std::vector<int>& unit_to_super,
                                  int k, bool grayscale = false) {
    const int rows = topo.kind == Topology::Kind::Grid2d ? topo.rows : 1;
    const int cols = topo.kind == Topology::Kind::Grid2d ? topo.cols : topo.units();
    const int cell = 48, pad = 8, top = 24;
    const int W = cols * cell + 2 * pad, H = rows * cell + top + pad;
    std::string s = header(W, H);
    s += "<text x=\"" + std::to_string(pad) + "\" y=\"16\" font-size=\"12\" "
         "font-family=\"sans-serif\">super-class partition (k=" + std::to_string(k) + ")</text>\n";
    for (int u = 0; u < topo.units(); ++u) {
        const int r = u / cols, c = u % cols;
        const double x0 = pad + c * cell, y0 = top + r * cell;
        const int sc = unit_to_super[u];
        const std::string fill =
            grayscale ? gray_tone(sc - 1, k) : palette()[(sc - 1) % palette().size()];
        s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + std::to_string(cell) +
             "\" height=\"" + std::to_string(cell) + "\" fill=\"" + fill +
             "\" stroke=\"#444444\"/>\n";
        s += "<text x=\"" + num(x0 + cell / 2.0) + "\" y=\"" + num(y0 + cell / 2.0 + 4) +
             "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
             std::to_string(sc) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

/// One individual's trajectory as arrows over the grid; repeated visits
/// widen the node marker.
inline std::string trajectory_overlay(const Topology& topo, const std::vector<int>& units_1based,
                                      const std::vector<int>& years) {
    const int rows = topo.kind == Topology::Kind::Grid2d ? topo.rows : 1;
    const int cols = topo.kind == Topology::Kind::Grid2d ? topo.cols : topo.units();
    const int cell = 48, pad = 8, top = 24;
    const int W = cols * cell + 2 * pad, H = rows * cell + top + pad;
    auto cx = [&](int u) { return pad + ((u - 1) % cols) * cell + cell / 2.0; };
    auto cy = [&](int u) { return top + ((u - 1) / cols) * cell + cell / 2.0; };

    std::string s = header(W, H);
    s += "<defs><marker id=\"arr\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" "
         "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#aa3377\"/></marker></defs>\n";
    s += "<text x=\"" + std::to_string(pad) + "\" y=\"16\" font-size=\"12\" "
         "font-family=\"sans-serif\">trajectory " + std::to_string(years.front()) + "-" +
         std::to_string(years.back()) + "</text>\n";
    for (int u = 1; u <= topo.units(); ++u)
        s += "<rect x=\"" + num(cx(u) - cell / 2.0) + "\" y=\"" + num(cy(u) - cell / 2.0) +
             "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
             "\" fill=\"none\" stroke=\"#dddddd\"/>\n";
    for (std::size_t t = 0; t + 1 < units_1based.size(); ++t) {
        const int a = units_1based[t], b = units_1based[t + 1];
        if (a == b) continue;
        s += "<line x1=\"" + num(cx(a)) + "\" y1=\"" + num(cy(a)) + "\" x2=\"" + num(cx(b)) +
             "\" y2=\"" + num(cy(b)) +
             "\" stroke=\"#aa3377\" stroke-width=\"1.5\" marker-end=\"url(#arr)\"/>\n";
    }
    std::vector<int> visits(topo.units() + 1, 0);
    for (int u : units_1based) ++visits[u];
    for (int u = 1; u <= topo.units(); ++u) {
        if (!visits[u]) continue;
        s += "<circle cx=\"" + num(cx(u)) + "\" cy=\"" + num(cy(u)) + "\" r=\"" +
             num(3.0 + 1.5 * visits[u]) + "\" fill=\"#4477aa\" fill-opacity=\"0.7\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

inline std::string size_bars(const std::vector<std::string>& labels,
                             const std::vector<std::size_t>& sizes) {
    const int barw = 48, gap = 16, pad = 8, top = 24, plot_h = 160;
    const int W = pad * 2 + static_cast<int>(labels.size()) * (barw + gap);
    const int H = top + plot_h + 32;
    std::size_t maxs = 1;
    for (auto s : sizes) maxs = std::max(maxs, s);
    std::string s = header(W, H);
    s += "<text x=\"" + std::to_string(pad) + "\" y=\"16\" font-size=\"12\" "
         "font-family=\"sans-serif\">class sizes</text>\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double h = plot_h * static_cast<double>(sizes[i]) / static_cast<double>(maxs);
        const double x0 = pad + static_cast<double>(i) * (barw + gap);
        s += "<rect x=\"" + num(x0) + "\" y=\"" + num(top + plot_h - h) + "\" width=\"" +
             std::to_string(barw) + "\" height=\"" + num(h) + "\" fill=\"" +
             palette()[i % palette().size()] + "\"/>\n";
        s += "<text x=\"" + num(x0 + barw / 2.0) + "\" y=\"" + num(top + plot_h + 14) +
             "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" + labels[i] +
             "</text>\n";
        s += "<text x=\"" + num(x0 + barw / 2.0) + "\" y=\"" + num(top + plot_h - h - 4) +
             "\" font-size=\"10\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
             std::to_string(sizes[i]) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

/// Ordered super-class profile curves, one panel per chain unit.
inline std::string chain_profiles(const CodeBook& chain, const std::vector<std::string>& variables) {
    return profile_grid(chain, variables);
}

inline std::string scatter(const std::vector<std::string>& names,
                           const std::vector<std::array<double, 2>>& coords,
                           const std::string& title) {
    const int W = 420, H = 440, pad = 30, top = 30;
    double lim = 1.0;
    for (const auto& c : coords) lim = std::max({lim, std::abs(c[0]), std::abs(c[1])});
    const double half = (W - 2 * pad) / 2.0;
    auto sx = [&](double x) { return pad + half + half * x / lim; };
    auto sy = [&](double y) { return top + half - half * y / lim; };
    std::string s = header(W, H);
    s += "<text x=\"10\" y=\"18\" font-size=\"12\" font-family=\"sans-serif\">" + title +
         "</text>\n";
    s += "<line x1=\"" + num(sx(-lim)) + "\" y1=\"" + num(sy(0)) + "\" x2=\"" + num(sx(lim)) +
         "\" y2=\"" + num(sy(0)) + "\" stroke=\"#cccccc\"/>\n";
    s += "<line x1=\"" + num(sx(0)) + "\" y1=\"" + num(sy(-lim)) + "\" x2=\"" + num(sx(0)) +
         "\" y2=\"" + num(sy(lim)) + "\" stroke=\"#cccccc\"/>\n";
    s += "<circle cx=\"" + num(sx(0)) + "\" cy=\"" + num(sy(0)) + "\" r=\"" + num(half / lim) +
         "\" fill=\"none\" stroke=\"#eeeeee\"/>\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        s += "<circle cx=\"" + num(sx(coords[i][0])) + "\" cy=\"" + num(sy(coords[i][1])) +
             "\" r=\"3\" fill=\"#4477aa\"/>\n";
        s += "<text x=\"" + num(sx(coords[i][0]) + 5) + "\" y=\"" + num(sy(coords[i][1]) - 3) +
             "\" font-size=\"10\" font-family=\"sans-serif\">" + names[i] + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace panelsom::svg

#endif
