#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "support.hpp"
#include "trustgame/equilibrium.hpp"

using namespace trustgame;
using Catch::Matchers::WithinAbs;

namespace {

ModelParams hostile_params() {
    ModelParams p;
    p.delta = 0.2;
    p.cost_c = 0.9;
    p.theta = 0.9;
    p.lambda = 0.9;
    return p;
}

}  // namespace

TEST_CASE("generous parameters sustain cooperation", "[equilibrium]") {
    ModelParams p;  // delta 0.9, c 0.2, theta 0.5, lambda 0.6
    const StateGrid grid = make_grid(1001);
    const EquilibriumResult r = best_response_iteration(p, grid);
    REQUIRE(r.converged);
    CHECK_FALSE(r.cycle_detected);
    CHECK(r.max_deviation_gain.first <= 1e-6);
    CHECK(r.max_deviation_gain.second <= 1e-6);
    // Player 1 signals on the low-trust region and cooperation is sustained.
    CHECK(r.sigma1.choices.front() == 1);
    CHECK(r.sigma2.choices.back() == 1);
    CHECK_NOTHROW(extract_cutoff(r.sigma1));
    CHECK_NOTHROW(extract_cutoff(r.sigma2));
    // values solve their Bellman equations, so cooperation pays from T0 = 0
    CHECK(interpolate(r.v1, 0.0) > 0.0);
}

TEST_CASE("hostile parameters settle on the no-cooperation equilibrium", "[equilibrium]") {
    const ModelParams p = hostile_params();
    const StateGrid grid = make_grid(1001);
    const EquilibriumResult r = best_response_iteration(p, grid);
    REQUIRE(r.converged);
    for (std::size_t i = 0; i < grid.count(); ++i) {
        if (grid.points[i] < p.theta) {
            REQUIRE(r.sigma1.choices[i] == 0);
            REQUIRE(r.sigma2.choices[i] == 0);
        }
    }
    CHECK(r.max_deviation_gain.first <= 1e-6);
    CHECK(r.max_deviation_gain.second <= 1e-6);
    // from complete distrust the play stays silent and trust never rises
    const Trajectory traj = simulate(p, SignalPlan::policy(r.sigma1), 30);
    for (const auto& round : traj.rounds) {
        CHECK(round.signal == SignalAction::none);
        CHECK(round.action == TrustAction::withhold);
    }
    // horizon-8 oracle: every signaling sequence loses money below the threshold
    const BruteForceResult bf =
        brute_force_p1(p, 8, ThresholdPolicy{p.theta, 1, CutoffOrientation::act_above});
    CHECK(bf.best_value == 0.0);
    for (auto b : bf.best_sequence) CHECK(b == 0);
}

TEST_CASE("memoryless trust decouples the rounds", "[equilibrium]") {
    ModelParams p;
    p.lambda = 0.0;
    const StateGrid grid = make_grid(101);
    const EquilibriumResult r = best_response_iteration(p, grid);
    REQUIRE(r.converged);
    CHECK(r.max_deviation_gain.first <= 1e-6);
    CHECK(r.max_deviation_gain.second <= 1e-6);
}

TEST_CASE("best response iteration is deterministic", "[equilibrium]") {
    ModelParams p;
    const StateGrid grid = make_grid(501);
    const EquilibriumResult a = best_response_iteration(p, grid);
    const EquilibriumResult b = best_response_iteration(p, grid);
    CHECK(a.sigma1.choices == b.sigma1.choices);
    CHECK(a.sigma2.choices == b.sigma2.choices);
    CHECK(a.iterations == b.iterations);
    CHECK(a.converged == b.converged);
    REQUIRE(a.v1.values.size() == b.v1.values.size());
    CHECK(std::memcmp(a.v1.values.data(), b.v1.values.data(),
                      a.v1.values.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.v2.values.data(), b.v2.values.data(),
                      a.v2.values.size() * sizeof(double)) == 0);
    CHECK(a.max_deviation_gain == b.max_deviation_gain);
}

TEST_CASE("verify_mpe flags a perturbed policy", "[equilibrium]") {
    ModelParams p;
    const StateGrid grid = make_grid(1001);
    EquilibriumResult r = best_response_iteration(p, grid);
    REQUIRE(r.converged);

    // flip sigma1 at a point where the advantage of signaling is strictly positive
    const std::size_t i = 500;
    const double gap = std::abs(advantage_p1(grid.points[i], r.v1, r.sigma2, p));
    REQUIRE(gap > 1e-3);
    r.sigma1.choices[i] = static_cast<std::uint8_t>(1 - r.sigma1.choices[i]);
    const DeviationGains g = verify_mpe(r, p);
    CHECK_THAT(g.p1, WithinAbs(gap, 1e-12));
    CHECK_FALSE(g.within(1e-6));
}

TEST_CASE("verify_mpe exposes all-zero policies when signaling pays", "[equilibrium]") {
    ModelParams p;  // generous parameters: climbing to the threshold is profitable
    const StateGrid grid = make_grid(1001);
    const SolveResult s =
        value_iteration(Player::builder, threshold_policy_table(grid, p.theta), p, grid, 1e-9);
    EquilibriumResult fake;
    fake.sigma1 = constant_policy_table(grid, 0);
    fake.sigma2 = constant_policy_table(grid, 0);
    fake.v1 = s.value;  // values certify that signaling is worth the cost
    fake.v2 = zero_values(grid);
    const DeviationGains g = verify_mpe(fake, p);
    CHECK(g.p1 > 0.1);
}

TEST_CASE("brute force enumerates every signal sequence", "[equilibrium]") {
    const ThresholdPolicy rule{0.5, 1, CutoffOrientation::act_above};

    ModelParams p;
    BruteForceResult r = brute_force_p1(p, 1, rule);
    CHECK(r.best_value == 0.0);
    CHECK(r.best_sequence == std::vector<std::uint8_t>{0});
    CHECK(r.enumerated_count == 2);

    p.lambda = 0.3;
    r = brute_force_p1(p, 3, rule);
    CHECK(r.best_sequence == std::vector<std::uint8_t>{1, 1, 1});
    CHECK_THAT(r.best_value, WithinAbs(1.168, 1e-12));
    CHECK(r.enumerated_count == 8);

    p.delta = 0.01;
    r = brute_force_p1(p, 10, rule);
    CHECK(r.best_value == 0.0);
    for (auto b : r.best_sequence) CHECK(b == 0);

    CHECK_THROWS_AS(brute_force_p1(p, 21, rule), std::length_error);
    r = brute_force_p1(p, 0, rule);
    CHECK(r.best_value == 0.0);
    CHECK(r.best_sequence.empty());
    CHECK(r.enumerated_count == 1);
}

TEST_CASE("DP matches brute force within the tail-plus-interpolation bound", "[equilibrium]") {
    const StateGrid grid = make_grid(1001);

    SECTION("frozen state, geometric value") {
        ModelParams p;
        p.lambda = 1.0;
        p.t0 = 1.0;
        const int horizon = 12;
        const double gap = dp_vs_bruteforce_gap(p, horizon, grid);
        const double tail =
            std::pow(p.delta, horizon) * (p.reward_r1 - p.cost_c) / (1.0 - p.delta);
        CHECK(gap <= tail + 1e-6);
        CHECK(gap >= tail - 1e-6);
    }

    SECTION("default parameters at delta = 0.8") {
        ModelParams p;
        p.delta = 0.8;
        const int horizon = 12;
        CHECK(dp_vs_bruteforce_gap(p, horizon, grid) <= dp_vs_bruteforce_bound(p, horizon, grid));
    }

    SECTION("degenerate horizon equals the DP value itself") {
        ModelParams p;
        const double gap = dp_vs_bruteforce_gap(p, 0, grid);
        const SolveResult s = value_iteration(
            Player::builder, threshold_policy_table(grid, p.theta), p, grid, 1e-9);
        CHECK(gap == std::abs(interpolate(s.value, p.t0)));
    }

    SECTION("random parameter sets") {
        auto rng = testsupport::make_rng(21);
        for (int trial = 0; trial < 5; ++trial) {
            ModelParams p = testsupport::random_params(rng, 0.3, 0.9);
            // keep theta on the grid so both sides play the same rule
            p.theta = std::round(p.theta * 1000.0) / 1000.0;
            CHECK(dp_vs_bruteforce_gap(p, 12, grid) <= dp_vs_bruteforce_bound(p, 12, grid));
        }
    }
}
