#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trustgame/dp.hpp"
#include "trustgame/dynamics.hpp"
#include "trustgame/equilibrium.hpp"
#include "trustgame/experiments.hpp"
#include "trustgame/grid.hpp"
#include "trustgame/model.hpp"
#include "trustgame/version.hpp"

namespace trustgame {

/// Renders a double with 9 significant digits, '.' separator, no locale.
inline std::string fmt9(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::runtime_error("cannot parse number: '" + std::string(text) + "'");
    return v;
}

/// UTC ISO-8601 timestamp. Honors SOURCE_DATE_EPOCH so runs can be made
/// byte-identical; otherwise uses the current time.
inline std::string make_timestamp() {
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/**
 * Provenance block embedded in every output artifact. Carries everything a
 * rerun needs to reproduce the data section byte for byte.
 */
struct RunManifest {
    std::string command;
    ModelParams params{};
    std::string plan = "always";
    std::size_t grid_n = 1001;
    double tol = 1e-9;
    double eps = 1e-6;
    int horizon = 30;
    std::vector<double> lambdas;  ///< sweep axis; empty for single-run commands
    std::vector<double> thetas;   ///< sweep axis; empty for single-run commands
    std::string version = kVersion;
    std::string timestamp;
};

inline void to_json(nlohmann::json& j, const ModelParams& p) {
    j = nlohmann::json{{"lambda", p.lambda},     {"theta", p.theta},
                       {"delta", p.delta},       {"cost_c", p.cost_c},
                       {"reward_r1", p.reward_r1}, {"reward_r2", p.reward_r2},
                       {"t0", p.t0}};
}

inline void from_json(const nlohmann::json& j, ModelParams& p) {
    j.at("lambda").get_to(p.lambda);
    j.at("theta").get_to(p.theta);
    j.at("delta").get_to(p.delta);
    j.at("cost_c").get_to(p.cost_c);
    j.at("reward_r1").get_to(p.reward_r1);
    j.at("reward_r2").get_to(p.reward_r2);
    j.at("t0").get_to(p.t0);
}

inline void to_json(nlohmann::json& j, const RunManifest& m) {
    j = nlohmann::json{{"command", m.command}, {"params", m.params},
                       {"plan", m.plan},       {"grid_n", m.grid_n},
                       {"tol", m.tol},         {"eps", m.eps},
                       {"horizon", m.horizon}, {"version", m.version},
                       {"timestamp", m.timestamp}};
    if (!m.lambdas.empty()) j["lambdas"] = m.lambdas;
    if (!m.thetas.empty()) j["thetas"] = m.thetas;
}

inline void from_json(const nlohmann::json& j, RunManifest& m) {
    j.at("command").get_to(m.command);
    j.at("params").get_to(m.params);
    j.at("plan").get_to(m.plan);
    j.at("grid_n").get_to(m.grid_n);
    j.at("tol").get_to(m.tol);
    j.at("eps").get_to(m.eps);
    j.at("horizon").get_to(m.horizon);
    j.at("version").get_to(m.version);
    j.at("timestamp").get_to(m.timestamp);
    m.lambdas.clear();
    m.thetas.clear();
    if (j.contains("lambdas")) j.at("lambdas").get_to(m.lambdas);
    if (j.contains("thetas")) j.at("thetas").get_to(m.thetas);
}

inline void write_manifest_block(const RunManifest& m, std::ostream& os) {
    os << "# manifest: " << nlohmann::json(m).dump() << "\n";
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kTrajectoryCsvHeader = "t,trust,signal,action,u1,u2";

inline void write_trajectory_csv(const Trajectory& t, const RunManifest& manifest,
                                 std::ostream& os) {
    write_manifest_block(manifest, os);
    os << kTrajectoryCsvHeader << "\n";
    for (const auto& r : t.rounds)
        os << r.t << ',' << fmt9(r.trust) << ',' << as_int(r.signal) << ',' << as_int(r.action)
           << ',' << fmt9(r.u1) << ',' << fmt9(r.u2) << "\n";
}

namespace detail {

inline std::vector<std::string_view> split_csv_row(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace detail

struct ParsedTrajectory {
    Trajectory trajectory;
    RunManifest manifest;
};

/**
 * Reads back a trajectory CSV written by write_trajectory_csv. Round fields
 * carry the file's 9-digit precision; the discounted sums are recomputed from
 * the parsed rounds with the manifest's delta, using the same accumulation
 * order as simulate().
 */
inline ParsedTrajectory parse_trajectory_csv(std::istream& is) {
    ParsedTrajectory out;
    bool have_manifest = false;
    bool have_header = false;
    std::string line;
    double disc = 1.0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view prefix = "# manifest: ";
            if (line.size() > prefix.size() && std::string_view(line).substr(0, prefix.size()) == prefix) {
                out.manifest = nlohmann::json::parse(line.substr(prefix.size())).get<RunManifest>();
                have_manifest = true;
            }
            continue;
        }
        if (!have_header) {
            if (line != kTrajectoryCsvHeader)
                throw std::runtime_error("unexpected trajectory CSV header: '" + line + "'");
            have_header = true;
            continue;
        }
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 6)
            throw std::runtime_error("malformed trajectory CSV row: '" + line + "'");
        RoundRecord r;
        r.t = static_cast<int>(parse_double(fields[0]));
        r.trust = parse_double(fields[1]);
        r.signal = signal_from_bit(static_cast<int>(parse_double(fields[2])));
        r.action = trust_action_from_bit(static_cast<int>(parse_double(fields[3])));
        r.u1 = parse_double(fields[4]);
        r.u2 = parse_double(fields[5]);
        out.trajectory.discounted_u1 += disc * r.u1;
        out.trajectory.discounted_u2 += disc * r.u2;
        disc *= out.manifest.params.delta;
        out.trajectory.rounds.push_back(r);
    }
    if (!have_manifest) throw std::runtime_error("trajectory CSV missing manifest block");
    if (!have_header) throw std::runtime_error("trajectory CSV missing header row");
    return out;
}

/// Long-format lambda-sweep CSV: one row per (lambda, round).
inline void write_lambda_sweep_csv(const std::vector<std::pair<double, Trajectory>>& series,
                                   const RunManifest& manifest, std::ostream& os) {
    write_manifest_block(manifest, os);
    os << "lambda," << kTrajectoryCsvHeader << "\n";
    for (const auto& [lambda, traj] : series)
        for (const auto& r : traj.rounds)
            os << fmt9(lambda) << ',' << r.t << ',' << fmt9(r.trust) << ',' << as_int(r.signal)
               << ',' << as_int(r.action) << ',' << fmt9(r.u1) << ',' << fmt9(r.u2) << "\n";
}

/// Long-format heatmap CSV; crossing renders as an empty field when absent.
/// Rows are ordered lexicographically by (lambda, theta) value.
inline void write_heatmap_csv(const SweepMatrix& m, const RunManifest& manifest,
                              std::ostream& os) {
    write_manifest_block(manifest, os);
    os << "lambda,theta,count_a1,crossing\n";
    std::vector<std::size_t> li(m.lambdas.size()), tj(m.thetas.size());
    std::iota(li.begin(), li.end(), std::size_t{0});
    std::iota(tj.begin(), tj.end(), std::size_t{0});
    std::stable_sort(li.begin(), li.end(),
                     [&](std::size_t a, std::size_t b) { return m.lambdas[a] < m.lambdas[b]; });
    std::stable_sort(tj.begin(), tj.end(),
                     [&](std::size_t a, std::size_t b) { return m.thetas[a] < m.thetas[b]; });
    for (std::size_t i : li) {
        for (std::size_t j : tj) {
            os << fmt9(m.lambdas[i]) << ',' << fmt9(m.thetas[j]) << ',' << m.counts[i][j] << ',';
            if (m.crossing[i][j]) os << *m.crossing[i][j];
            os << "\n";
        }
    }
}

/// Per-grid-point dump of a single-player DP solution.
inline void write_solve_csv(const SolveResult& s, const ModelParams& p,
                            const RunManifest& manifest, std::ostream& os) {
    write_manifest_block(manifest, os);
    os << "# iterations: " << s.residuals.size() << "\n";
    os << "# final_residual: " << fmt9(s.residuals.empty() ? 0.0 : s.residuals.back()) << "\n";
    os << "# eps_bound: "
       << fmt9(eps_optimality_bound(s.residuals.empty() ? 0.0 : s.residuals.back(), p.delta))
       << "\n";
    os << "trust,value,policy\n";
    for (std::size_t i = 0; i < s.value.grid.count(); ++i)
        os << fmt9(s.value.grid.points[i]) << ',' << fmt9(s.value.values[i]) << ','
           << static_cast<int>(s.policy.choices[i]) << "\n";
}

inline void write_equilibrium_csv(const EquilibriumResult& r, const RunManifest& manifest,
                                  std::ostream& os) {
    write_manifest_block(manifest, os);
    os << "# converged: " << (r.converged ? "true" : "false") << "\n";
    os << "# iterations: " << r.iterations << "\n";
    os << "# max_deviation_gain: " << fmt9(r.max_deviation_gain.first) << ','
       << fmt9(r.max_deviation_gain.second) << "\n";
    os << "# cycle_detected: " << (r.cycle_detected ? "true" : "false") << "\n";
    os << "trust,sigma1,sigma2,v1,v2\n";
    for (std::size_t i = 0; i < r.v1.grid.count(); ++i)
        os << fmt9(r.v1.grid.points[i]) << ',' << static_cast<int>(r.sigma1.choices[i]) << ','
           << static_cast<int>(r.sigma2.choices[i]) << ',' << fmt9(r.v1.values[i]) << ','
           << fmt9(r.v2.values[i]) << "\n";
}

// ---------------------------------------------------------------------------
// JSON artifacts
// ---------------------------------------------------------------------------

inline nlohmann::json trajectory_to_json(const Trajectory& t, const RunManifest& manifest) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : t.rounds)
        rounds.push_back({{"t", r.t},
                          {"trust", r.trust},
                          {"signal", as_int(r.signal)},
                          {"action", as_int(r.action)},
                          {"u1", r.u1},
                          {"u2", r.u2}});
    return nlohmann::json{{"manifest", manifest},
                          {"rounds", std::move(rounds)},
                          {"discounted_u1", t.discounted_u1},
                          {"discounted_u2", t.discounted_u2}};
}

inline nlohmann::json lambda_sweep_to_json(const std::vector<std::pair<double, Trajectory>>& series,
                                           const RunManifest& manifest) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [lambda, traj] : series) {
        nlohmann::json entry = trajectory_to_json(traj, manifest);
        entry.erase("manifest");
        entry["lambda"] = lambda;
        arr.push_back(std::move(entry));
    }
    return nlohmann::json{{"manifest", manifest}, {"series", std::move(arr)}};
}

inline nlohmann::json heatmap_to_json(const SweepMatrix& m, const RunManifest& manifest) {
    nlohmann::json crossing = nlohmann::json::array();
    for (const auto& row : m.crossing) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const auto& c : row)
            jrow.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
        crossing.push_back(std::move(jrow));
    }
    return nlohmann::json{{"manifest", manifest}, {"lambdas", m.lambdas},
                          {"thetas", m.thetas},   {"horizon", m.horizon},
                          {"counts", m.counts},   {"crossing", std::move(crossing)}};
}

inline nlohmann::json cutoff_to_json(const PolicyTable& pol) {
    try {
        const ThresholdPolicy t = extract_cutoff(pol);
        return nlohmann::json{
            {"cutoff", t.cutoff},
            {"high_action", static_cast<int>(t.high_action)},
            {"orientation",
             t.orientation == CutoffOrientation::act_above ? "act_above" : "act_below"}};
    } catch (const NotThresholdFormError& e) {
        return nlohmann::json{{"error", "not threshold-form"},
                              {"switch_indices", e.switch_indices}};
    }
}

inline nlohmann::json solve_to_json(const SolveResult& s, const ModelParams& p,
                                    const RunManifest& manifest) {
    return nlohmann::json{
        {"manifest", manifest},
        {"trust", s.value.grid.points},
        {"value", s.value.values},
        {"policy", s.policy.choices},
        {"residuals", s.residuals},
        {"iterations", s.residuals.size()},
        {"eps_bound",
         eps_optimality_bound(s.residuals.empty() ? 0.0 : s.residuals.back(), p.delta)},
        {"cutoff", cutoff_to_json(s.policy)}};
}

inline nlohmann::json equilibrium_to_json(const EquilibriumResult& r,
                                          const RunManifest& manifest) {
    return nlohmann::json{{"manifest", manifest},
                          {"trust", r.v1.grid.points},
                          {"sigma1", r.sigma1.choices},
                          {"sigma2", r.sigma2.choices},
                          {"v1", r.v1.values},
                          {"v2", r.v2.values},
                          {"converged", r.converged},
                          {"iterations", r.iterations},
                          {"max_deviation_gain",
                           {r.max_deviation_gain.first, r.max_deviation_gain.second}},
                          {"cycle_detected", r.cycle_detected},
                          {"sigma1_cutoff", cutoff_to_json(r.sigma1)},
                          {"sigma2_cutoff", cutoff_to_json(r.sigma2)}};
}

}  // namespace trustgame
