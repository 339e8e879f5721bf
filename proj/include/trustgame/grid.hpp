#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace trustgame {

/// Uniform discretization of the trust state space [0,1], endpoints included.
struct StateGrid {
    std::vector<double> points;

    std::size_t count() const { return points.size(); }
    double spacing() const { return 1.0 / static_cast<double>(points.size() - 1); }

    friend bool operator==(const StateGrid& a, const StateGrid& b) = default;
};

inline StateGrid make_grid(std::size_t n) {
    if (n < 2) throw std::domain_error("make_grid: need at least 2 points");
    StateGrid g;
    g.points.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.points[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    g.points.front() = 0.0;
    g.points.back() = 1.0;
    return g;
}

/// A value function sampled on a StateGrid.
struct ValueGrid {
    StateGrid grid;
    std::vector<double> values;
};

inline ValueGrid zero_values(const StateGrid& g) {
    return ValueGrid{g, std::vector<double>(g.count(), 0.0)};
}

/// A binary Markov policy sampled on a StateGrid.
struct PolicyTable {
    StateGrid grid;
    std::vector<std::uint8_t> choices;

    /// Choice at the grid point nearest to the given state.
    int at(double trust) const {
        const auto n = grid.count();
        auto i = static_cast<std::size_t>(
            std::llround(trust * static_cast<double>(n - 1)));
        if (i >= n) i = n - 1;
        return choices[i];
    }
};

inline void require_same_grid(const StateGrid& a, const StateGrid& b, const char* where) {
    if (a != b) throw std::invalid_argument(std::string(where) + ": grids do not match");
}

/**
 * Piecewise-linear interpolation of a sampled value function.
 *
 * Exact at grid points: querying points[i] returns values[i] with no
 * arithmetic applied.
 */
inline double interpolate(const ValueGrid& v, double trust) {
    if (!(trust >= 0.0 && trust <= 1.0))
        throw std::domain_error("interpolate: query must lie in [0,1]");
    const auto& pts = v.grid.points;
    const std::size_t n = pts.size();
    auto i = static_cast<std::size_t>(trust * static_cast<double>(n - 1));
    if (i > n - 2) i = n - 2;
    while (i > 0 && trust < pts[i]) --i;
    while (i + 1 < n - 1 && trust >= pts[i + 1]) ++i;
    if (trust == pts[i]) return v.values[i];
    if (trust == pts[i + 1]) return v.values[i + 1];
    const double w = (trust - pts[i]) / (pts[i + 1] - pts[i]);
    return v.values[i] + w * (v.values[i + 1] - v.values[i]);
}

}  // namespace trustgame
