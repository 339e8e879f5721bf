#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trustgame/dynamics.hpp"
#include "trustgame/grid.hpp"
#include "trustgame/model.hpp"

namespace trustgame {

enum class Player : int { builder = 1, trustee = 2 };

/// A binary policy with at most one switch point along the state axis.
/// `high_action` is played at states >= cutoff, its complement below.
struct ThresholdPolicy {
    double cutoff = 0.0;
    std::uint8_t high_action = 1;
    enum class Orientation { act_above, act_below };
    Orientation orientation = Orientation::act_above;

    int action_at(double state) const {
        return state >= cutoff ? high_action : 1 - high_action;
    }
};

using CutoffOrientation = ThresholdPolicy::Orientation;

/// Player 2's exogenous threshold rule, sampled on a grid.
inline PolicyTable threshold_policy_table(const StateGrid& g, double theta) {
    PolicyTable t{g, std::vector<std::uint8_t>(g.count())};
    for (std::size_t i = 0; i < g.count(); ++i)
        t.choices[i] = g.points[i] >= theta ? 1 : 0;
    return t;
}

inline PolicyTable constant_policy_table(const StateGrid& g, int action) {
    if (action != 0 && action != 1)
        throw std::domain_error("constant_policy_table: action must be 0 or 1");
    return PolicyTable{g, std::vector<std::uint8_t>(g.count(), static_cast<std::uint8_t>(action))};
}

struct BackupResult {
    ValueGrid value;
    PolicyTable policy;
};

/**
 * One Bellman backup for Player 1 against a fixed opponent policy:
 * max over s of u1(s, sigma2(T)) + delta * V(lambda*T + (1-lambda)*s),
 * evaluated at every grid point. Ties resolve to the costless s = 0.
 */
inline BackupResult bellman_backup_p1(const ValueGrid& v, const PolicyTable& sigma2,
                                      const ModelParams& p) {
    require_same_grid(v.grid, sigma2.grid, "bellman_backup_p1");
    const auto& pts = v.grid.points;
    BackupResult out{ValueGrid{v.grid, std::vector<double>(pts.size())},
                     PolicyTable{v.grid, std::vector<std::uint8_t>(pts.size())}};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const TrustAction a = trust_action_from_bit(sigma2.choices[i]);
        const double q_send = payoff_p1(SignalAction::send, a, p) +
                              p.delta * interpolate(v, update_trust(pts[i], SignalAction::send, p.lambda));
        const double q_none = payoff_p1(SignalAction::none, a, p) +
                              p.delta * interpolate(v, update_trust(pts[i], SignalAction::none, p.lambda));
        if (q_send > q_none) {
            out.value.values[i] = q_send;
            out.policy.choices[i] = 1;
        } else {
            out.value.values[i] = q_none;
            out.policy.choices[i] = 0;
        }
    }
    return out;
}

/**
 * One Bellman backup for Player 2 against a fixed Player 1 policy. The
 * continuation state uses sigma1(T) only, so both branches share it; ties
 * resolve to a = 1, matching the weak inequality of the threshold rule.
 */
inline BackupResult bellman_backup_p2(const ValueGrid& v, const PolicyTable& sigma1,
                                      const ModelParams& p) {
    require_same_grid(v.grid, sigma1.grid, "bellman_backup_p2");
    const auto& pts = v.grid.points;
    BackupResult out{ValueGrid{v.grid, std::vector<double>(pts.size())},
                     PolicyTable{v.grid, std::vector<std::uint8_t>(pts.size())}};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const SignalAction s = signal_from_bit(sigma1.choices[i]);
        const double cont =
            p.delta * interpolate(v, update_trust(pts[i], s, p.lambda));
        const double q_grant = payoff_p2(s, TrustAction::grant, p) + cont;
        const double q_withhold = payoff_p2(s, TrustAction::withhold, p) + cont;
        if (q_grant >= q_withhold) {
            out.value.values[i] = q_grant;
            out.policy.choices[i] = 1;
        } else {
            out.value.values[i] = q_withhold;
            out.policy.choices[i] = 0;
        }
    }
    return out;
}

/// Thrown when value iteration exhausts max_iter; carries the residual history.
class NonConvergenceError : public std::runtime_error {
  public:
    NonConvergenceError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residuals(std::move(history)) {}
    std::vector<double> residuals;
};

struct SolveResult {
    ValueGrid value;
    PolicyTable policy;
    std::vector<double> residuals;
};

/// Contraction bound on the distance to the true fixed point given the last
/// sup-norm residual.
inline double eps_optimality_bound(double last_residual, double delta) {
    return last_residual * delta / (1.0 - delta);
}

/**
 * Value iteration from V = 0 for one player against a fixed opponent policy.
 * Stops when the sup-norm residual drops to tol; throws NonConvergenceError
 * with the residual history if max_iter is exhausted first.
 */
inline SolveResult value_iteration(Player player, const PolicyTable& opponent,
                                   const ModelParams& p, const StateGrid& grid,
                                   double tol = 1e-9, long max_iter = 100000) {
    validate_params(p);
    if (!(tol > 0.0)) throw std::domain_error("value_iteration: tol must be positive");
    if (max_iter < 1) throw std::domain_error("value_iteration: max_iter must be at least 1");
    require_same_grid(grid, opponent.grid, "value_iteration");

    SolveResult res{zero_values(grid), constant_policy_table(grid, 0), {}};
    for (long k = 0; k < max_iter; ++k) {
        BackupResult b = player == Player::builder ? bellman_backup_p1(res.value, opponent, p)
                                                   : bellman_backup_p2(res.value, opponent, p);
        double residual = 0.0;
        for (std::size_t i = 0; i < grid.count(); ++i)
            residual = std::max(residual, std::abs(b.value.values[i] - res.value.values[i]));
        res.residuals.push_back(residual);
        res.value = std::move(b.value);
        res.policy = std::move(b.policy);
        if (residual <= tol) return res;
    }
    throw NonConvergenceError("value_iteration: residual above tol after " +
                                  std::to_string(max_iter) + " iterations",
                              res.residuals);
}

/// Player 1's advantage of signaling over staying quiet at a given state:
/// [u1(1, sigma2(T)) + delta*V(T')] - [u1(0, sigma2(T)) + delta*V(T~')].
inline double advantage_p1(double trust, const ValueGrid& v, const PolicyTable& sigma2,
                           const ModelParams& p) {
    require_same_grid(v.grid, sigma2.grid, "advantage_p1");
    const TrustAction a = trust_action_from_bit(sigma2.at(trust));
    const double up = payoff_p1(SignalAction::send, a, p) +
                      p.delta * interpolate(v, update_trust(trust, SignalAction::send, p.lambda));
    const double down = payoff_p1(SignalAction::none, a, p) +
                        p.delta * interpolate(v, update_trust(trust, SignalAction::none, p.lambda));
    return up - down;
}

/// Thrown by extract_cutoff when a policy switches more than once. The switch
/// indices falsify the expected cutoff structure, so callers report them
/// instead of discarding the error.
class NotThresholdFormError : public std::runtime_error {
  public:
    NotThresholdFormError(const std::string& what, std::vector<std::size_t> switches)
        : std::runtime_error(what), switch_indices(std::move(switches)) {}
    std::vector<std::size_t> switch_indices;
};

/**
 * Collapses a policy table with at most one switch point into a
 * ThresholdPolicy. The cutoff sits at the first grid point after the switch;
 * a constant policy gets cutoff 0 with its single action as high_action.
 */
inline ThresholdPolicy extract_cutoff(const PolicyTable& pol) {
    if (pol.choices.empty()) throw std::domain_error("extract_cutoff: empty policy");
    std::vector<std::size_t> switches;
    for (std::size_t i = 1; i < pol.choices.size(); ++i)
        if (pol.choices[i] != pol.choices[i - 1]) switches.push_back(i);
    if (switches.size() > 1) {
        std::string what = "extract_cutoff: not threshold-form, switches at indices";
        for (auto i : switches) what += " " + std::to_string(i);
        throw NotThresholdFormError(what, switches);
    }
    ThresholdPolicy t;
    if (switches.empty()) {
        t.cutoff = 0.0;
        t.high_action = pol.choices.front();
    } else {
        t.cutoff = pol.grid.points[switches.front()];
        t.high_action = pol.choices[switches.front()];
    }
    t.orientation = t.high_action ? CutoffOrientation::act_above : CutoffOrientation::act_below;
    return t;
}

}  // namespace trustgame
