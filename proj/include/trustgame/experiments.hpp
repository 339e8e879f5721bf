#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trustgame/dynamics.hpp"
#include "trustgame/model.hpp"

namespace trustgame {

/// Configuration for the reproduction runs: which lambda/theta values to
/// sweep, the horizon, the base parameter vector, and Player 1's plan.
struct SweepConfig {
    std::vector<double> lambdas{0.3, 0.6, 0.9};
    std::vector<double> thetas{0.5};
    int horizon = 30;
    ModelParams base{};
    SignalPlan plan = SignalPlan::always();
};

/// 21-point lambda and theta axes {0, 0.05, ..., 1}, horizon 30.
inline SweepConfig default_heatmap_config() {
    SweepConfig cfg;
    cfg.lambdas.clear();
    cfg.thetas.clear();
    for (int i = 0; i <= 20; ++i) {
        cfg.lambdas.push_back(static_cast<double>(i) / 20.0);
        cfg.thetas.push_back(static_cast<double>(i) / 20.0);
    }
    return cfg;
}

inline void validate_sweep_config(const SweepConfig& cfg) {
    if (cfg.lambdas.empty()) throw std::invalid_argument("sweep config: lambdas must be nonempty");
    if (cfg.thetas.empty()) throw std::invalid_argument("sweep config: thetas must be nonempty");
    if (cfg.horizon < 1) throw std::invalid_argument("sweep config: horizon must be at least 1");
    for (double l : cfg.lambdas)
        if (!(l >= 0.0 && l <= 1.0))
            throw std::invalid_argument("sweep config: lambda values must lie in [0,1]");
    for (double t : cfg.thetas)
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument("sweep config: theta values must lie in [0,1]");
}

inline ModelParams cell_params(const SweepConfig& cfg, double lambda, double theta) {
    ModelParams p = cfg.base;
    p.lambda = lambda;
    p.theta = theta;
    return p;
}

/// One full trajectory per swept lambda at the single configured theta.
inline std::vector<std::pair<double, Trajectory>> run_lambda_sweep(const SweepConfig& cfg) {
    validate_sweep_config(cfg);
    if (cfg.thetas.size() != 1)
        throw std::invalid_argument("run_lambda_sweep: exactly one theta required");
    std::vector<std::pair<double, Trajectory>> out;
    out.reserve(cfg.lambdas.size());
    for (double lambda : cfg.lambdas)
        out.emplace_back(lambda, simulate(cell_params(cfg, lambda, cfg.thetas.front()),
                                          cfg.plan, cfg.horizon));
    return out;
}

/// Trust-decision counts and crossing rounds over a (lambda, theta) grid.
struct SweepMatrix {
    std::vector<double> lambdas;
    std::vector<double> thetas;
    int horizon = 0;
    /// counts[i][j]: rounds with a_t = 1 for (lambdas[i], thetas[j])
    std::vector<std::vector<int>> counts;
    /// crossing[i][j]: first round with T_t >= theta, absent if never
    std::vector<std::vector<std::optional<int>>> crossing;
};

inline SweepMatrix run_heatmap_sweep(const SweepConfig& cfg) {
    validate_sweep_config(cfg);
    SweepMatrix m;
    m.lambdas = cfg.lambdas;
    m.thetas = cfg.thetas;
    m.horizon = cfg.horizon;
    m.counts.assign(cfg.lambdas.size(), std::vector<int>(cfg.thetas.size(), 0));
    m.crossing.assign(cfg.lambdas.size(),
                      std::vector<std::optional<int>>(cfg.thetas.size(), std::nullopt));
    for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        for (std::size_t j = 0; j < cfg.thetas.size(); ++j) {
            const Trajectory traj =
                simulate(cell_params(cfg, cfg.lambdas[i], cfg.thetas[j]), cfg.plan, cfg.horizon);
            int count = 0;
            for (const auto& r : traj.rounds) {
                if (r.action == TrustAction::grant) ++count;
                if (!m.crossing[i][j] && r.trust >= cfg.thetas[j]) m.crossing[i][j] = r.t;
            }
            m.counts[i][j] = count;
        }
    }
    return m;
}

enum class TrustSpeed { fast, moderate, slow };

inline const char* to_string(TrustSpeed s) {
    switch (s) {
        case TrustSpeed::fast: return "fast";
        case TrustSpeed::moderate: return "moderate";
        default: return "slow";
    }
}

struct Table4Row {
    double lambda = 0.0;
    std::optional<int> crossing;
    int count_a1 = 0;
    TrustSpeed qualitative_speed = TrustSpeed::fast;
};

/**
 * Per-lambda summary at a single theta: crossing round, trust-decision count,
 * and a speed label assigned by crossing-time tercile among the swept lambdas
 * (never-crossing sorts last; ties keep input order). A single lambda is
 * labeled fast by convention.
 */
inline std::vector<Table4Row> summarize_table4(const SweepConfig& cfg) {
    validate_sweep_config(cfg);
    if (cfg.thetas.size() != 1)
        throw std::invalid_argument("summarize_table4: exactly one theta required");
    const SweepMatrix m = run_heatmap_sweep(cfg);

    const std::size_t n = cfg.lambdas.size();
    std::vector<Table4Row> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i].lambda = cfg.lambdas[i];
        rows[i].crossing = m.crossing[i][0];
        rows[i].count_a1 = m.counts[i][0];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto key = [&](std::size_t i) {
        return rows[i].crossing ? static_cast<long>(*rows[i].crossing)
                                : std::numeric_limits<long>::max();
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t tercile = rank * 3 / n;
        rows[order[rank]].qualitative_speed =
            tercile == 0 ? TrustSpeed::fast : (tercile == 1 ? TrustSpeed::moderate : TrustSpeed::slow);
    }
    return rows;
}

}  // namespace trustgame
