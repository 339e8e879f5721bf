#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trustgame/dp.hpp"
#include "trustgame/dynamics.hpp"
#include "trustgame/equilibrium.hpp"
#include "trustgame/experiments.hpp"
#include "trustgame/grid.hpp"
#include "trustgame/io.hpp"
#include "trustgame/model.hpp"
#include "trustgame/svg.hpp"
#include "trustgame/version.hpp"

namespace trustgame {

/// Exit statuses: 0 success, 2 usage error, 3 validation error,
/// 4 non-convergence. Unexpected runtime failures exit 1.
enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitUsage = 2,
    kExitValidation = 3,
    kExitNoConvergence = 4,
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class HelpRequested : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A fully resolved command line: subcommand plus every flag with defaults
/// filled in.
struct CliCommand {
    std::string name;
    ModelParams params{};
    std::vector<double> lambdas;  ///< sweep axis (sweep commands only)
    std::vector<double> thetas;   ///< sweep axis (sweep-heatmap only)
    int horizon = 30;
    std::size_t grid_n = 1001;
    double tol = 1e-9;
    std::string plan_text = "always";
    std::string out_path;  ///< empty: write to stdout
    std::string format = "csv";
};

namespace cli_detail {

inline std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string tok =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            out.push_back(parse_double(tok));
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": cannot parse value '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline SignalPlan parse_plan(const std::string& text) {
    if (text == "always") return SignalPlan::always();
    if (text == "never") return SignalPlan::never();
    constexpr std::string_view prefix = "scripted:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string bits = text.substr(prefix.size());
        if (bits.empty()) throw UsageError("--plan scripted: needs at least one bit");
        std::vector<std::uint8_t> seq;
        seq.reserve(bits.size());
        for (char c : bits) {
            if (c != '0' && c != '1')
                throw UsageError(std::string("--plan scripted: invalid bit '") + c + "'");
            seq.push_back(c == '1' ? 1 : 0);
        }
        return SignalPlan::scripted(std::move(seq));
    }
    throw UsageError("--plan: expected always, never, or scripted:<bits>, got '" + text + "'");
}

}  // namespace cli_detail

/**
 * Parses argv (without the program name) into a CliCommand. Throws UsageError
 * on unrecognized subcommands, unknown flags, or malformed values, and
 * HelpRequested (carrying the help text) for --help.
 */
inline CliCommand parse_cli(const std::vector<std::string>& args) {
    CLI::App app{"Solver and simulator for a repeated trust-building game"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CliCommand cmd;
    std::string lambda_text, theta_text;

    const std::vector<std::string> names = {"simulate",    "solve",        "equilibrium",
                                            "sweep-lambda", "sweep-heatmap", "verify"};
    const std::vector<std::string> descriptions = {
        "simulate a trajectory under a signal plan",
        "value iteration for Player 1 against the threshold rule",
        "Markov perfect equilibrium via best-response iteration",
        "trust trajectories for a set of lambda values",
        "trust-decision counts over a (lambda, theta) grid",
        "compute an equilibrium and certify it by one-shot deviations"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("--lambda", lambda_text,
                        "trust memory (comma-separated list for sweeps)");
        sub->add_option("--theta", theta_text,
                        "trust threshold (comma-separated list for sweep-heatmap)");
        sub->add_option("--delta", cmd.params.delta, "discount factor");
        sub->add_option("--cost", cmd.params.cost_c, "signal cost c");
        sub->add_option("--r1", cmd.params.reward_r1, "Player 1 reward R1");
        sub->add_option("--r2", cmd.params.reward_r2, "Player 2 reward R2");
        sub->add_option("--t0", cmd.params.t0, "initial trust");
        sub->add_option("--horizon", cmd.horizon, "number of simulated rounds");
        sub->add_option("--grid-n", cmd.grid_n, "state grid size");
        sub->add_option("--tol", cmd.tol, "value iteration tolerance");
        sub->add_option("--plan", cmd.plan_text, "always | never | scripted:<bits>");
        sub->add_option("--out", cmd.out_path, "output path (default: stdout)");
        sub->add_option("--format", cmd.format, "csv | json | svg")
            ->check(CLI::IsMember({"csv", "json", "svg"}));
    }

    std::vector<const char*> argv;
    argv.push_back("trustgame");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequested(subs.empty() ? app.help() : subs.front()->help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::CallForVersion&) {
        throw HelpRequested(std::string(kVersion) + "\n");
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CLI::App* parsed = app.get_subcommands().front();
    cmd.name = parsed->get_name();
    const bool heatmap = cmd.name == "sweep-heatmap";
    const bool lambda_sweep = cmd.name == "sweep-lambda";
    const bool lambda_given = parsed->count("--lambda") > 0;
    const bool theta_given = parsed->count("--theta") > 0;

    std::vector<double> lambdas, thetas;
    if (lambda_given) {
        lambdas = cli_detail::parse_double_list(lambda_text, "--lambda");
    } else if (lambda_sweep) {
        lambdas = {0.3, 0.6, 0.9};
    } else if (heatmap) {
        lambdas = default_heatmap_config().lambdas;
    } else {
        lambdas = {cmd.params.lambda};
    }
    if (theta_given) {
        thetas = cli_detail::parse_double_list(theta_text, "--theta");
    } else if (heatmap) {
        thetas = default_heatmap_config().thetas;
    } else {
        thetas = {cmd.params.theta};
    }

    if (!lambda_sweep && !heatmap && lambdas.size() != 1)
        throw UsageError("--lambda: " + cmd.name + " expects a single value");
    if (!heatmap && thetas.size() != 1)
        throw UsageError("--theta: " + cmd.name + " expects a single value");

    if (lambdas.size() == 1) cmd.params.lambda = lambdas.front();
    if (thetas.size() == 1) cmd.params.theta = thetas.front();
    if (lambda_sweep || heatmap) cmd.lambdas = lambdas;
    if (heatmap) cmd.thetas = thetas;

    cli_detail::parse_plan(cmd.plan_text);  // reject malformed plans up front
    if (cmd.format == "svg" &&
        (cmd.name == "solve" || cmd.name == "equilibrium" || cmd.name == "verify"))
        throw UsageError("--format svg is not available for " + cmd.name);
    return cmd;
}

namespace cli_detail {

inline RunManifest make_manifest(const CliCommand& cmd) {
    RunManifest m;
    m.command = cmd.name;
    m.params = cmd.params;
    m.plan = cmd.plan_text;
    m.grid_n = cmd.grid_n;
    m.tol = cmd.tol;
    m.eps = 1e-6;
    m.horizon = cmd.horizon;
    m.lambdas = cmd.lambdas;
    m.thetas = cmd.thetas;
    m.version = kVersion;
    m.timestamp = make_timestamp();
    return m;
}

inline int dispatch(const CliCommand& cmd, std::ostream& sink) {
    const RunManifest manifest = make_manifest(cmd);
    const SignalPlan plan = parse_plan(cmd.plan_text);

    if (cmd.name == "simulate") {
        validate_params(cmd.params);
        const Trajectory traj = simulate(cmd.params, plan, cmd.horizon);
        if (cmd.format == "csv") {
            write_trajectory_csv(traj, manifest, sink);
        } else if (cmd.format == "json") {
            sink << trajectory_to_json(traj, manifest).dump(2) << "\n";
        } else {
            render_line_chart({{cmd.params.lambda, traj}}, cmd.params.theta, sink);
        }
        return kExitOk;
    }

    if (cmd.name == "solve") {
        validate_params(cmd.params);
        const StateGrid grid = make_grid(cmd.grid_n);
        const SolveResult s = value_iteration(
            Player::builder, threshold_policy_table(grid, cmd.params.theta), cmd.params, grid,
            cmd.tol);
        if (cmd.format == "csv")
            write_solve_csv(s, cmd.params, manifest, sink);
        else
            sink << solve_to_json(s, cmd.params, manifest).dump(2) << "\n";
        return kExitOk;
    }

    if (cmd.name == "equilibrium" || cmd.name == "verify") {
        validate_params(cmd.params);
        const StateGrid grid = make_grid(cmd.grid_n);
        const EquilibriumResult r = best_response_iteration(cmd.params, grid, cmd.tol);
        const bool certified = r.converged && r.max_deviation_gain.first <= manifest.eps &&
                               r.max_deviation_gain.second <= manifest.eps;
        if (cmd.name == "equilibrium") {
            if (cmd.format == "csv")
                write_equilibrium_csv(r, manifest, sink);
            else
                sink << equilibrium_to_json(r, manifest).dump(2) << "\n";
        } else {
            if (cmd.format == "json") {
                nlohmann::json j{{"manifest", manifest},
                                 {"converged", r.converged},
                                 {"iterations", r.iterations},
                                 {"cycle_detected", r.cycle_detected},
                                 {"max_deviation_gain",
                                  {r.max_deviation_gain.first, r.max_deviation_gain.second}},
                                 {"eps", manifest.eps},
                                 {"certified", certified}};
                sink << j.dump(2) << "\n";
            } else {
                sink << "converged: " << (r.converged ? "true" : "false") << "\n"
                     << "iterations: " << r.iterations << "\n"
                     << "cycle_detected: " << (r.cycle_detected ? "true" : "false") << "\n"
                     << "max_deviation_gain_p1: " << fmt9(r.max_deviation_gain.first) << "\n"
                     << "max_deviation_gain_p2: " << fmt9(r.max_deviation_gain.second) << "\n"
                     << "certified (eps=" << fmt9(manifest.eps)
                     << "): " << (certified ? "true" : "false") << "\n";
            }
        }
        return certified || (cmd.name == "equilibrium" && r.converged) ? kExitOk
                                                                       : kExitNoConvergence;
    }

    if (cmd.name == "sweep-lambda") {
        SweepConfig cfg;
        cfg.lambdas = cmd.lambdas;
        cfg.thetas = {cmd.params.theta};
        cfg.horizon = cmd.horizon;
        cfg.base = cmd.params;
        cfg.plan = plan;
        validate_params(cfg.base);
        const auto series = run_lambda_sweep(cfg);
        if (cmd.format == "csv")
            write_lambda_sweep_csv(series, manifest, sink);
        else if (cmd.format == "json")
            sink << lambda_sweep_to_json(series, manifest).dump(2) << "\n";
        else
            render_line_chart(series, cmd.params.theta, sink);
        return kExitOk;
    }

    // sweep-heatmap
    SweepConfig cfg;
    cfg.lambdas = cmd.lambdas;
    cfg.thetas = cmd.thetas;
    cfg.horizon = cmd.horizon;
    cfg.base = cmd.params;
    cfg.plan = plan;
    validate_params(cfg.base);
    const SweepMatrix m = run_heatmap_sweep(cfg);
    if (cmd.format == "csv")
        write_heatmap_csv(m, manifest, sink);
    else if (cmd.format == "json")
        sink << heatmap_to_json(m, manifest).dump(2) << "\n";
    else
        render_heatmap(m, sink);
    return kExitOk;
}

}  // namespace cli_detail

/**
 * Full command-line entry point: parse, run, serialize. Returns the process
 * exit status; all diagnostics go to `err` and help text to `out`.
 */
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliCommand cmd;
    try {
        cmd = parse_cli(args);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (!cmd.out_path.empty()) {
            std::ofstream file(cmd.out_path, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file: " + cmd.out_path);
            const int code = cli_detail::dispatch(cmd, file);
            file.flush();
            if (!file) throw std::runtime_error("write failed: " + cmd.out_path);
            return code;
        }
        return cli_detail::dispatch(cmd, out);
    } catch (const NonConvergenceError& e) {
        err << "non-convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::domain_error& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::length_error& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace trustgame
