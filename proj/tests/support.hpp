#pragma once

// Shared helpers for the test suites: deterministic random parameter draws
// and small string utilities.

#include <random>
#include <string>
#include <string_view>

#include "trustgame/grid.hpp"
#include "trustgame/model.hpp"

namespace testsupport {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

/// A validated parameter vector drawn uniformly from comfortable ranges.
/// delta stays below delta_max so value iteration budgets stay predictable.
inline trustgame::ModelParams random_params(std::mt19937_64& rng, double delta_min = 0.3,
                                            double delta_max = 0.95) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    trustgame::ModelParams p;
    p.lambda = unit(rng);
    p.theta = unit(rng);
    p.delta = delta_min + (delta_max - delta_min) * unit(rng);
    p.reward_r1 = 0.5 + 1.5 * unit(rng);
    p.cost_c = p.reward_r1 * (0.05 + 0.85 * unit(rng));
    p.reward_r2 = 0.1 + 1.9 * unit(rng);
    p.t0 = unit(rng);
    trustgame::validate_params(p);
    return p;
}

/// Random value grid with entries inside the admissible value range for the
/// given parameters.
inline trustgame::ValueGrid random_value_grid(std::mt19937_64& rng,
                                              const trustgame::StateGrid& grid,
                                              const trustgame::ModelParams& p) {
    const double lo = -p.cost_c / (1.0 - p.delta);
    const double hi = std::max(p.reward_r1 - p.cost_c, p.reward_r2) / (1.0 - p.delta);
    std::uniform_real_distribution<double> dist(lo, hi);
    trustgame::ValueGrid v = trustgame::zero_values(grid);
    for (auto& x : v.values) x = dist(rng);
    return v;
}

inline std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

}  // namespace testsupport
