#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trustgame/dp.hpp"
#include "trustgame/dynamics.hpp"
#include "trustgame/grid.hpp"
#include "trustgame/model.hpp"

namespace trustgame {

/// A candidate Markov Perfect Equilibrium with its convergence diagnostics
/// and the one-shot deviation gains found when certifying it.
struct EquilibriumResult {
    PolicyTable sigma1;
    PolicyTable sigma2;
    ValueGrid v1;
    ValueGrid v2;
    bool converged = false;
    long iterations = 0;
    std::pair<double, double> max_deviation_gain{0.0, 0.0};
    bool cycle_detected = false;
};

struct DeviationGains {
    double p1 = 0.0;
    double p2 = 0.0;
    bool within(double eps) const { return p1 <= eps && p2 <= eps; }
};

/**
 * One-shot deviation check: at every grid point, each player deviates for one
 * period and follows their policy afterward, continuation values read from
 * the stored value grids. Returns the per-player maximum gains; certification
 * passes when both stay within the caller's epsilon.
 */
inline DeviationGains verify_mpe(const EquilibriumResult& r, const ModelParams& p) {
    require_same_grid(r.sigma1.grid, r.sigma2.grid, "verify_mpe");
    require_same_grid(r.sigma1.grid, r.v1.grid, "verify_mpe");
    require_same_grid(r.sigma1.grid, r.v2.grid, "verify_mpe");
    const auto& pts = r.sigma1.grid.points;
    DeviationGains g;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const TrustAction a = trust_action_from_bit(r.sigma2.choices[i]);
        const double q1_send =
            payoff_p1(SignalAction::send, a, p) +
            p.delta * interpolate(r.v1, update_trust(pts[i], SignalAction::send, p.lambda));
        const double q1_none =
            payoff_p1(SignalAction::none, a, p) +
            p.delta * interpolate(r.v1, update_trust(pts[i], SignalAction::none, p.lambda));
        const double q1_played = r.sigma1.choices[i] ? q1_send : q1_none;
        g.p1 = std::max(g.p1, std::max(q1_send, q1_none) - q1_played);

        const SignalAction s = signal_from_bit(r.sigma1.choices[i]);
        const double cont = p.delta * interpolate(r.v2, update_trust(pts[i], s, p.lambda));
        const double q2_grant = payoff_p2(s, TrustAction::grant, p) + cont;
        const double q2_withhold = payoff_p2(s, TrustAction::withhold, p) + cont;
        const double q2_played = r.sigma2.choices[i] ? q2_grant : q2_withhold;
        g.p2 = std::max(g.p2, std::max(q2_grant, q2_withhold) - q2_played);
    }
    return g;
}

namespace detail {

/// Optimal-action selection at a converged value function that keeps the
/// incumbent action wherever both branches are exactly equal. Any such
/// selection is still an exact best response; the inertia pins down which
/// fixed point the iteration settles on when a player is indifferent.
inline PolicyTable select_best_response(Player player, const ValueGrid& value,
                                        const PolicyTable& opponent,
                                        const PolicyTable& incumbent, const ModelParams& p) {
    const auto& pts = value.grid.points;
    PolicyTable out{value.grid, std::vector<std::uint8_t>(pts.size())};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double q[2];
        if (player == Player::builder) {
            const TrustAction a = trust_action_from_bit(opponent.choices[i]);
            q[1] = payoff_p1(SignalAction::send, a, p) +
                   p.delta * interpolate(value, update_trust(pts[i], SignalAction::send, p.lambda));
            q[0] = payoff_p1(SignalAction::none, a, p) +
                   p.delta * interpolate(value, update_trust(pts[i], SignalAction::none, p.lambda));
        } else {
            const SignalAction s = signal_from_bit(opponent.choices[i]);
            const double cont = p.delta * interpolate(value, update_trust(pts[i], s, p.lambda));
            q[1] = payoff_p2(s, TrustAction::grant, p) + cont;
            q[0] = payoff_p2(s, TrustAction::withhold, p) + cont;
        }
        const int prev = incumbent.choices[i];
        out.choices[i] = q[prev] >= q[1 - prev] ? static_cast<std::uint8_t>(prev)
                                                : static_cast<std::uint8_t>(1 - prev);
    }
    return out;
}

}  // namespace detail

/**
 * Alternating exact best responses, starting from sigma1 = always-signal and
 * sigma2 = the threshold rule at theta. Each round recomputes Player 1's best
 * response to the current sigma2, then Player 2's to the new sigma1;
 * convergence means both policies survived a full round unchanged. Repeated
 * policy profiles are detected by storing every profile visited.
 *
 * A non-converged result (converged = false) is a valid return, not an error.
 */
inline EquilibriumResult best_response_iteration(const ModelParams& p, const StateGrid& grid,
                                                 double tol = 1e-9, long max_rounds = 64) {
    validate_params(p);
    PolicyTable sigma1 = constant_policy_table(grid, 1);
    PolicyTable sigma2 = threshold_policy_table(grid, p.theta);
    ValueGrid v1 = zero_values(grid);
    ValueGrid v2 = zero_values(grid);

    using Profile = std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>;
    std::set<Profile> seen;
    seen.insert({sigma1.choices, sigma2.choices});

    bool converged = false;
    bool cycle = false;
    long rounds = 0;
    for (long r = 1; r <= max_rounds; ++r) {
        rounds = r;
        const SolveResult s1 = value_iteration(Player::builder, sigma2, p, grid, tol);
        PolicyTable next1 = detail::select_best_response(Player::builder, s1.value, sigma2, sigma1, p);
        const SolveResult s2 = value_iteration(Player::trustee, next1, p, grid, tol);
        PolicyTable next2 = detail::select_best_response(Player::trustee, s2.value, next1, sigma2, p);

        const bool unchanged =
            next1.choices == sigma1.choices && next2.choices == sigma2.choices;
        sigma1 = std::move(next1);
        sigma2 = std::move(next2);
        v1 = s1.value;
        v2 = s2.value;
        if (unchanged) {
            converged = true;
            break;
        }
        if (!seen.insert({sigma1.choices, sigma2.choices}).second) {
            cycle = true;
            break;
        }
    }

    EquilibriumResult res{std::move(sigma1), std::move(sigma2), std::move(v1), std::move(v2),
                          converged, rounds, {0.0, 0.0}, cycle};
    const DeviationGains g = verify_mpe(res, p);
    res.max_deviation_gain = {g.p1, g.p2};
    return res;
}

/// Desk-scale oracle output: the best discounted payoff over every signal
/// sequence of the given horizon, found by exhaustive enumeration.
struct BruteForceResult {
    double best_value = 0.0;
    std::vector<std::uint8_t> best_sequence;
    int horizon = 0;
    std::uint64_t enumerated_count = 0;
};

/**
 * Enumerates all 2^horizon signal sequences for Player 1 and simulates each
 * one exactly in continuous state (no grid), Player 2 playing the given
 * threshold rule. Ties go to the lexicographically smallest sequence.
 */
inline BruteForceResult brute_force_p1(const ModelParams& p, int horizon,
                                       const ThresholdPolicy& sigma2_rule) {
    validate_params(p);
    if (horizon < 0 || horizon > 20)
        throw std::length_error("brute_force_p1: horizon must lie in [0, 20]");
    const std::uint64_t total = std::uint64_t{1} << horizon;
    BruteForceResult best;
    best.horizon = horizon;
    best.enumerated_count = total;
    bool have = false;
    for (std::uint64_t code = 0; code < total; ++code) {
        double trust = p.t0;
        double disc = 1.0;
        double value = 0.0;
        for (int t = 0; t < horizon; ++t) {
            // bit (horizon-1-t) holds s_t, so ascending codes scan sequences
            // in lexicographic order
            const int bit = static_cast<int>((code >> (horizon - 1 - t)) & 1u);
            const SignalAction s = bit ? SignalAction::send : SignalAction::none;
            const TrustAction a = trust_action_from_bit(sigma2_rule.action_at(trust));
            value += disc * payoff_p1(s, a, p);
            disc *= p.delta;
            trust = update_trust(trust, s, p.lambda);
        }
        if (!have || value > best.best_value) {
            have = true;
            best.best_value = value;
            best.best_sequence.assign(static_cast<std::size_t>(horizon), 0);
            for (int t = 0; t < horizon; ++t)
                best.best_sequence[static_cast<std::size_t>(t)] =
                    static_cast<std::uint8_t>((code >> (horizon - 1 - t)) & 1u);
        }
    }
    return best;
}

/// |V1(T0) from the grid DP - the exact finite-horizon optimum|. The DP best
/// response is taken against the threshold rule at p.theta on both sides.
inline double dp_vs_bruteforce_gap(const ModelParams& p, int horizon, const StateGrid& grid) {
    const SolveResult s =
        value_iteration(Player::builder, threshold_policy_table(grid, p.theta), p, grid);
    const double v_dp = interpolate(s.value, p.t0);
    const BruteForceResult bf = brute_force_p1(
        p, horizon, ThresholdPolicy{p.theta, 1, CutoffOrientation::act_above});
    return std::abs(v_dp - bf.best_value);
}

/// Tolerance the gap must respect: the discounted tail beyond the horizon
/// plus interpolation slack proportional to the grid spacing.
inline double dp_vs_bruteforce_bound(const ModelParams& p, int horizon, const StateGrid& grid) {
    return std::pow(p.delta, static_cast<double>(horizon)) * (p.reward_r1 - p.cost_c) /
               (1.0 - p.delta) +
           10.0 * grid.spacing() / (1.0 - p.delta);
}

}  // namespace trustgame
