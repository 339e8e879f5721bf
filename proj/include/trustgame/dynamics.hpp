#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "trustgame/grid.hpp"
#include "trustgame/model.hpp"

namespace trustgame {

/**
 * One application of the linear trust update T' = lambda*T + (1-lambda)*s.
 *
 * The result is a convex combination of values in [0,1]; in round-to-nearest
 * double arithmetic it cannot leave [0,1], so no clamping is applied.
 */
inline double update_trust(double trust, SignalAction s, double lambda) {
    if (!(trust >= 0.0 && trust <= 1.0))
        throw std::domain_error("update_trust: trust must lie in [0,1]");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::domain_error("update_trust: lambda must lie in [0,1]");
    return lambda * trust + (1.0 - lambda) * static_cast<double>(as_int(s));
}

/// Trust after t rounds of uninterrupted signaling: 1 - (1-t0)*lambda^t.
inline double closed_form_trust(double t0, double lambda, long t) {
    if (!(t0 >= 0.0 && t0 <= 1.0))
        throw std::domain_error("closed_form_trust: t0 must lie in [0,1]");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::domain_error("closed_form_trust: lambda must lie in [0,1]");
    if (t < 0) throw std::domain_error("closed_form_trust: t must be nonnegative");
    return 1.0 - (1.0 - t0) * std::pow(lambda, static_cast<double>(t));
}

/// Player 2's behavioral rule: grant trust iff the state meets the threshold.
/// The comparison is the exact weak inequality; no epsilon is introduced.
inline TrustAction threshold_action(double trust, double theta) {
    if (!(trust >= 0.0 && trust <= 1.0))
        throw std::domain_error("threshold_action: trust must lie in [0,1]");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("threshold_action: theta must lie in [0,1]");
    return trust >= theta ? TrustAction::grant : TrustAction::withhold;
}

/// One simulated round: state at decision time, both actions, both payoffs.
struct RoundRecord {
    int t = 0;
    double trust = 0.0;
    SignalAction signal = SignalAction::none;
    TrustAction action = TrustAction::withhold;
    double u1 = 0.0;
    double u2 = 0.0;
};

/**
 * A full play of the game. The discounted sums accumulate in round order with
 * a running power of delta: disc_u += disc * u; disc *= delta. Recomputing
 * them the same way from `rounds` reproduces the stored fields exactly.
 */
struct Trajectory {
    std::vector<RoundRecord> rounds;
    double discounted_u1 = 0.0;
    double discounted_u2 = 0.0;
};

/**
 * Player 1's signaling protocol for a simulation run.
 *
 * Four kinds: signal every round, never signal, follow a fixed script, or
 * follow a Markov policy table (read at the grid point nearest the current
 * trust state).
 */
class SignalPlan {
  public:
    static SignalPlan always() { return SignalPlan(Always{}); }
    static SignalPlan never() { return SignalPlan(Never{}); }
    static SignalPlan scripted(std::vector<std::uint8_t> bits) {
        for (auto b : bits)
            if (b > 1) throw std::domain_error("scripted plan: bits must be 0 or 1");
        return SignalPlan(Scripted{std::move(bits)});
    }
    static SignalPlan policy(PolicyTable table) { return SignalPlan(Policy{std::move(table)}); }

    /// Signal for round t at the given trust state. Throws std::length_error
    /// when a script is shorter than the requested round index.
    SignalAction at(int t, double trust) const {
        if (std::holds_alternative<Always>(kind_)) return SignalAction::send;
        if (std::holds_alternative<Never>(kind_)) return SignalAction::none;
        if (const auto* s = std::get_if<Scripted>(&kind_)) {
            if (static_cast<std::size_t>(t) >= s->bits.size())
                throw std::length_error("scripted plan shorter than simulation horizon");
            return s->bits[static_cast<std::size_t>(t)] ? SignalAction::send : SignalAction::none;
        }
        return std::get<Policy>(kind_).table.at(trust) ? SignalAction::send : SignalAction::none;
    }

    /// Short descriptor for run manifests, e.g. "always" or "scripted:1101".
    std::string describe() const {
        if (std::holds_alternative<Always>(kind_)) return "always";
        if (std::holds_alternative<Never>(kind_)) return "never";
        if (const auto* s = std::get_if<Scripted>(&kind_)) {
            std::string d = "scripted:";
            for (auto b : s->bits) d += b ? '1' : '0';
            return d;
        }
        return "policy";
    }

  private:
    struct Always {};
    struct Never {};
    struct Scripted { std::vector<std::uint8_t> bits; };
    struct Policy { PolicyTable table; };
    using Kind = std::variant<Always, Never, Scripted, Policy>;

    explicit SignalPlan(Kind k) : kind_(std::move(k)) {}

    Kind kind_;
};

/**
 * Simulates `horizon` rounds from T0. Within a round: observe T_t, Player 1
 * picks s_t from the plan, Player 2 reacts to T_t alone via the threshold
 * rule, payoffs accrue, then the state updates to T_{t+1}.
 */
inline Trajectory simulate(const ModelParams& p, const SignalPlan& plan, int horizon) {
    validate_params(p);
    if (horizon < 1) throw std::domain_error("simulate: horizon must be at least 1");
    Trajectory traj;
    traj.rounds.reserve(static_cast<std::size_t>(horizon));
    double trust = p.t0;
    double disc = 1.0;
    for (int t = 0; t < horizon; ++t) {
        RoundRecord r;
        r.t = t;
        r.trust = trust;
        r.signal = plan.at(t, trust);
        r.action = threshold_action(trust, p.theta);
        r.u1 = payoff_p1(r.signal, r.action, p);
        r.u2 = payoff_p2(r.signal, r.action, p);
        traj.discounted_u1 += disc * r.u1;
        traj.discounted_u2 += disc * r.u2;
        disc *= p.delta;
        traj.rounds.push_back(r);
        trust = update_trust(trust, r.signal, p.lambda);
    }
    return traj;
}

/// First round t with T_t >= theta along the simulated trajectory, or absent
/// if the threshold is never met within the horizon.
inline std::optional<int> crossing_time(const ModelParams& p, const SignalPlan& plan, int horizon) {
    const Trajectory traj = simulate(p, plan, horizon);
    for (const auto& r : traj.rounds)
        if (r.trust >= p.theta) return r.t;
    return std::nullopt;
}

}  // namespace trustgame
