#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace trustgame {

/// Player 1's per-round choice: emit a costly trust-building signal or stay quiet.
enum class SignalAction : int { none = 0, send = 1 };

/// Player 2's per-round choice: grant trust or withhold it.
enum class TrustAction : int { withhold = 0, grant = 1 };

constexpr int as_int(SignalAction s) { return static_cast<int>(s); }
constexpr int as_int(TrustAction a) { return static_cast<int>(a); }

inline SignalAction signal_from_bit(int v) {
    if (v != 0 && v != 1) throw std::domain_error("signal value must be 0 or 1");
    return v ? SignalAction::send : SignalAction::none;
}

inline TrustAction trust_action_from_bit(int v) {
    if (v != 0 && v != 1) throw std::domain_error("trust action value must be 0 or 1");
    return v ? TrustAction::grant : TrustAction::withhold;
}

/**
 * All constants of the repeated trust game.
 *
 * Valid parameter vectors satisfy reward_r1 > cost_c > 0, reward_r2 > 0,
 * lambda/theta/t0 in [0,1] and delta strictly inside (0,1). Defaults are the
 * harness constants used throughout: they pass validate_params as-is.
 */
struct ModelParams {
    double lambda = 0.6;     ///< trust memory: weight of past trust in the state update
    double theta = 0.5;      ///< Player 2's trust threshold
    double delta = 0.9;      ///< common discount factor
    double cost_c = 0.2;     ///< per-round cost of sending a signal
    double reward_r1 = 1.0;  ///< Player 1's payoff from a signal met with trust
    double reward_r2 = 1.0;  ///< Player 2's payoff from a trusted signal round
    double t0 = 0.0;         ///< initial trust level
};

/// Returns p unchanged iff every parameter restriction holds; otherwise throws
/// std::domain_error naming the first violated constraint.
inline const ModelParams& validate_params(const ModelParams& p) {
    // Conditions are phrased so that NaN fails them.
    if (!(p.lambda >= 0.0 && p.lambda <= 1.0))
        throw std::domain_error("lambda must lie in [0,1]");
    if (!(p.theta >= 0.0 && p.theta <= 1.0))
        throw std::domain_error("theta must lie in [0,1]");
    if (!(p.delta > 0.0 && p.delta < 1.0))
        throw std::domain_error("delta must lie strictly in (0,1)");
    if (!(p.cost_c > 0.0))
        throw std::domain_error("cost c must be positive");
    if (!(p.reward_r1 > p.cost_c))
        throw std::domain_error("R1 must exceed c");
    if (!(p.reward_r2 > 0.0))
        throw std::domain_error("R2 must be positive");
    if (!(p.t0 >= 0.0 && p.t0 <= 1.0))
        throw std::domain_error("t0 must lie in [0,1]");
    return p;
}

/// Stage payoff of Player 1: R1 - c on a trusted signal, -c on an ignored
/// signal, 0 whenever no signal is sent.
inline double payoff_p1(SignalAction s, TrustAction a, const ModelParams& p) {
    if (s == SignalAction::none) return 0.0;
    return a == TrustAction::grant ? p.reward_r1 - p.cost_c : -p.cost_c;
}

/// Stage payoff of Player 2: R2 when a signal is met with trust, 0 otherwise.
inline double payoff_p2(SignalAction s, TrustAction a, const ModelParams& p) {
    return (s == SignalAction::send && a == TrustAction::grant) ? p.reward_r2 : 0.0;
}

/// One play of the classic one-shot investment game: Player 1 sends x, the
/// amount grows by factor k, Player 2 returns r of the kx received.
struct ClassicGameInput {
    double sent_x = 0.0;
    double multiplier_k = 1.0;
    double returned_r = 0.0;
};

/// Relative payoffs (Player 1, Player 2) of the classic game: (-x + r, kx - r).
inline std::pair<double, double> classic_trust_payoffs(const ClassicGameInput& g) {
    if (!(g.sent_x >= 0.0))
        throw std::domain_error("sent amount x must be nonnegative");
    if (!(g.multiplier_k >= 1.0))
        throw std::domain_error("multiplier k must be at least 1");
    if (!(g.returned_r >= 0.0 && g.returned_r <= g.multiplier_k * g.sent_x))
        throw std::domain_error("returned amount r must lie in [0, k*x]");
    return {-g.sent_x + g.returned_r, g.multiplier_k * g.sent_x - g.returned_r};
}

}  // namespace trustgame
