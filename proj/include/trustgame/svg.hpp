#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trustgame/dynamics.hpp"
#include "trustgame/experiments.hpp"
#include "trustgame/io.hpp"

namespace trustgame {

namespace svg_detail {

/// Coordinates rounded to 0.01px keep the files small and diff-stable.
inline std::string px(double v) {
    return fmt9(std::round(v * 100.0) / 100.0);
}

inline const std::array<const char*, 6> kSeriesPalette = {
    "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

// Marker classes for Player 2's per-round decision.
inline constexpr const char* kTrustMarkerColor = "#2ca02c";     // a_t = 1
inline constexpr const char* kNoTrustMarkerColor = "#d62728";   // a_t = 0

// Heatmap extremes: count 0 maps to the light end, count = horizon to the
// dark end, channels interpolated linearly.
inline constexpr std::array<int, 3> kHeatLow = {247, 251, 255};  // #f7fbff
inline constexpr std::array<int, 3> kHeatHigh = {8, 48, 107};    // #08306b

inline std::string heat_color(int count, int horizon) {
    const double f = horizon > 0 ? static_cast<double>(count) / horizon : 0.0;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(kHeatLow[0] + f * (kHeatHigh[0] - kHeatLow[0]))),
                  static_cast<int>(std::lround(kHeatLow[1] + f * (kHeatHigh[1] - kHeatLow[1]))),
                  static_cast<int>(std::lround(kHeatLow[2] + f * (kHeatHigh[2] - kHeatLow[2]))));
    return buf;
}

inline void text(std::ostream& os, double x, double y, const std::string& s,
                 const char* anchor = "middle", int size = 11) {
    os << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\"" << size
       << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

inline void line(std::ostream& os, double x1, double y1, double x2, double y2,
                 const char* stroke, const char* extra = "") {
    os << "<line x1=\"" << px(x1) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x2) << "\" y2=\""
       << px(y2) << "\" stroke=\"" << stroke << "\"" << extra << "/>\n";
}

}  // namespace svg_detail

/**
 * Self-contained SVG line chart of trust trajectories: one polyline per
 * lambda, round markers colored by Player 2's decision (class m1 when trust
 * was granted, m0 otherwise), a dashed reference line at theta, axes, and a
 * legend. Markers are the only circle elements, so a series of length H
 * contributes exactly H circles.
 */
inline void render_line_chart(const std::vector<std::pair<double, Trajectory>>& trajectories,
                              double theta, std::ostream& os) {
    if (trajectories.empty())
        throw std::invalid_argument("render_line_chart: need at least one trajectory");
    using namespace svg_detail;

    const double w = 820, h = 520;
    const double ml = 60, mr = 150, mt = 30, mb = 50;
    const double pw = w - ml - mr, ph = h - mt - mb;
    int max_rounds = 1;
    for (const auto& [lambda, traj] : trajectories)
        max_rounds = std::max(max_rounds, static_cast<int>(traj.rounds.size()));
    const double xden = std::max(1, max_rounds - 1);
    auto xpos = [&](int t) { return ml + pw * (static_cast<double>(t) / xden); };
    auto ypos = [&](double trust) { return mt + ph * (1.0 - trust); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
       << "\" fill=\"#ffffff\"/>\n";

    // axes and ticks
    line(os, ml, mt, ml, mt + ph, "#000000");
    line(os, ml, mt + ph, ml + pw, mt + ph, "#000000");
    for (int k = 0; k <= 4; ++k) {
        const double trust = k / 4.0;
        line(os, ml - 4, ypos(trust), ml, ypos(trust), "#000000");
        text(os, ml - 8, ypos(trust) + 4, fmt9(trust), "end", 10);
    }
    const int xstep = std::max(1, (max_rounds - 1) / 6);
    for (int t = 0; t < max_rounds; t += xstep) {
        line(os, xpos(t), mt + ph, xpos(t), mt + ph + 4, "#000000");
        text(os, xpos(t), mt + ph + 16, std::to_string(t), "middle", 10);
    }
    text(os, ml + pw / 2, h - 12, "round t");
    text(os, 16, mt + ph / 2, "trust", "middle");

    // threshold reference
    line(os, ml, ypos(theta), ml + pw, ypos(theta), "#888888",
         " stroke-dasharray=\"6 4\" class=\"threshold\"");
    text(os, ml + pw + 6, ypos(theta) + 4, "theta = " + fmt9(theta), "start", 10);

    // one polyline per series
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        const auto& traj = trajectories[k].second;
        os << "<polyline fill=\"none\" stroke=\"" << kSeriesPalette[k % kSeriesPalette.size()]
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t t = 0; t < traj.rounds.size(); ++t) {
            if (t) os << ' ';
            os << px(xpos(static_cast<int>(t))) << ',' << px(ypos(traj.rounds[t].trust));
        }
        os << "\"/>\n";
    }

    // decision markers
    for (const auto& [lambda, traj] : trajectories) {
        for (std::size_t t = 0; t < traj.rounds.size(); ++t) {
            const bool trusted = traj.rounds[t].action == TrustAction::grant;
            os << "<circle class=\"" << (trusted ? "m1" : "m0") << "\" cx=\""
               << px(xpos(static_cast<int>(t))) << "\" cy=\"" << px(ypos(traj.rounds[t].trust))
               << "\" r=\"3\" fill=\"" << (trusted ? kTrustMarkerColor : kNoTrustMarkerColor)
               << "\"/>\n";
        }
    }

    // legend
    double ly = mt + 10;
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        line(os, ml + pw + 10, ly, ml + pw + 34, ly, kSeriesPalette[k % kSeriesPalette.size()],
             " stroke-width=\"2\"");
        text(os, ml + pw + 40, ly + 4, "lambda = " + fmt9(trajectories[k].first), "start", 10);
        ly += 18;
    }
    line(os, ml + pw + 10, ly, ml + pw + 34, ly, kTrustMarkerColor, " stroke-width=\"6\"");
    text(os, ml + pw + 40, ly + 4, "a = 1 (trust)", "start", 10);
    ly += 18;
    line(os, ml + pw + 10, ly, ml + pw + 34, ly, kNoTrustMarkerColor, " stroke-width=\"6\"");
    text(os, ml + pw + 40, ly + 4, "a = 0 (no trust)", "start", 10);

    os << "</svg>\n";
}

/**
 * Self-contained SVG heatmap of trust-decision counts: one rect of class
 * "cell" per (lambda, theta) pair (lambda on x ascending, theta on y
 * ascending upward), plus a gradient scale bar from count 0 to the horizon.
 */
inline void render_heatmap(const SweepMatrix& m, std::ostream& os) {
    if (m.lambdas.empty() || m.thetas.empty())
        throw std::invalid_argument("render_heatmap: matrix must be nonempty");
    using namespace svg_detail;

    const std::size_t nl = m.lambdas.size(), nt = m.thetas.size();
    const double cell = std::max(14.0, std::min(28.0, 420.0 / static_cast<double>(std::max(nl, nt))));
    const double ml = 70, mt = 30, mb = 60;
    const double pw = cell * static_cast<double>(nl), ph = cell * static_cast<double>(nt);
    const double w = ml + pw + 110, h = mt + ph + mb;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt9(w) << "\" height=\""
       << fmt9(h) << "\" viewBox=\"0 0 " << fmt9(w) << " " << fmt9(h) << "\">\n";
    os << "<defs>\n<linearGradient id=\"scalebar\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n"
       << "<stop offset=\"0\" stop-color=\"" << heat_color(0, m.horizon) << "\"/>\n"
       << "<stop offset=\"1\" stop-color=\"" << heat_color(m.horizon, m.horizon) << "\"/>\n"
       << "</linearGradient>\n</defs>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << fmt9(w) << "\" height=\"" << fmt9(h)
       << "\" fill=\"#ffffff\"/>\n";

    // cells; theta ascends upward, so row j sits at the bottom for j = 0
    for (std::size_t i = 0; i < nl; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            const double x = ml + cell * static_cast<double>(i);
            const double y = mt + ph - cell * static_cast<double>(j + 1);
            os << "<rect class=\"cell\" x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\""
               << px(cell) << "\" height=\"" << px(cell) << "\" fill=\""
               << heat_color(m.counts[i][j], m.horizon) << "\"/>\n";
        }
    }

    // axis tick labels
    const std::size_t lstep = nl > 11 ? 2 : 1, tstep = nt > 11 ? 2 : 1;
    for (std::size_t i = 0; i < nl; i += lstep)
        text(os, ml + cell * (static_cast<double>(i) + 0.5), mt + ph + 14, fmt9(m.lambdas[i]),
             "middle", 9);
    for (std::size_t j = 0; j < nt; j += tstep)
        text(os, ml - 6, mt + ph - cell * (static_cast<double>(j) + 0.5) + 3, fmt9(m.thetas[j]),
             "end", 9);
    text(os, ml + pw / 2, h - 16, "lambda");
    text(os, 18, mt + ph / 2, "theta", "middle");

    // scale bar
    const double sx = ml + pw + 30, sw = 16, sh = std::min(ph, 200.0);
    os << "<rect x=\"" << px(sx) << "\" y=\"" << px(mt) << "\" width=\"" << px(sw)
       << "\" height=\"" << px(sh) << "\" fill=\"url(#scalebar)\" stroke=\"#000000\"/>\n";
    text(os, sx + sw + 6, mt + sh, "0", "start", 10);
    text(os, sx + sw + 6, mt + 10, std::to_string(m.horizon), "start", 10);
    text(os, sx + sw / 2, mt + sh + 16, "count", "middle", 10);

    os << "</svg>\n";
}

}  // namespace trustgame
