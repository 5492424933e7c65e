// qis: solve, simulate and verify the two-priority queueing-inventory model.
//
// Exit codes are a stable contract:
//   0  success (and, for solve/verify/drift, every check passed)
//   2  configuration or input error
//   3  instability refusal: p = 1 with lambda1 + lambda2 >= mu and no --force
//   4  drift certificate inapplicable (eta <= 0)
//   5  solver failure or failed verification checks

#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qis/analysis.hpp"
#include "qis/errors.hpp"
#include "qis/instant.hpp"
#include "qis/io.hpp"
#include "qis/lyapunov.hpp"
#include "qis/numeric.hpp"
#include "qis/simulator.hpp"
#include "qis/solver.hpp"

namespace {

using qis::ModelParams;
using json = qis::io::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitInapplicable = 4;
constexpr int kExitSolver = 5;

struct ParamFlags {
    std::optional<double> lambda1, lambda2, mu, nu, p;
    std::optional<int> s, b;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda1", lambda1, "priority arrival rate");
        cmd->add_option("--lambda2", lambda2, "ordinary arrival rate");
        cmd->add_option("--mu", mu, "service rate");
        cmd->add_option("--nu", nu, "replenishment rate");
        cmd->add_option("--p", p, "ordinary admission probability at 0<k<=s");
        cmd->add_option("--s", s, "threshold inventory level");
        cmd->add_option("--b", b, "base stock level");
    }
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    const std::string text = qis::io::read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return json::parse(text);
    // flat key=value file: parameters only
    json cfg;
    cfg["params"] = qis::io::params_to_json(qis::io::params_from_kv(text));
    return cfg;
}

ModelParams resolve_params(const json& config, const ParamFlags& flags) {
    json p = config.contains("params") ? config.at("params") : json::object();
    if (flags.lambda1) p["lambda1"] = *flags.lambda1;
    if (flags.lambda2) p["lambda2"] = *flags.lambda2;
    if (flags.mu) p["mu"] = *flags.mu;
    if (flags.nu) p["nu"] = *flags.nu;
    if (flags.p) p["p"] = *flags.p;
    if (flags.s) p["s"] = *flags.s;
    if (flags.b) p["b"] = *flags.b;
    return qis::io::params_from_json(p);
}

qis::solver::TruncationSpec resolve_trunc(const json& config,
                                          const std::vector<int>& flag,
                                          int def = 40) {
    if (flag.size() == 2) return {flag[0], flag[1]};
    if (config.contains("trunc"))
        return {config.at("trunc").at("cap1").get<int>(),
                config.at("trunc").at("cap2").get<int>()};
    return {def, def};
}

qis::solver::SolveOptions resolve_solver(const json& config,
                                         std::optional<double> tol_flag) {
    qis::solver::SolveOptions opts;
    if (config.contains("solver")) {
        const auto& s = config.at("solver");
        opts.tol = s.value("tol", opts.tol);
        opts.gth_max_states = s.value("gth_max_states", opts.gth_max_states);
        opts.max_iterations = s.value("max_iterations", opts.max_iterations);
    }
    if (tol_flag) opts.tol = *tol_flag;
    return opts;
}

void print_stability(const qis::lyapunov::StabilityResult& st) {
    std::printf("stability: %s (eta=%.6g, epsilon=%.6g, %s)\n",
                st.stable ? "stable" : "NOT certified stable", st.eta,
                st.epsilon,
                st.sharp ? "p=1: condition is necessary and sufficient"
                         : "sufficient condition only");
}

// refuses provably unstable configurations; returns an exit code or 0
int stability_gate(const ModelParams& params, bool force) {
    const auto st = qis::lyapunov::check_ergodicity(params);
    print_stability(st);
    if (!st.stable && st.sharp && !force) {
        std::fprintf(stderr,
                     "refusing to solve: p=1 with lambda1+lambda2 >= mu is "
                     "not ergodic (use --force to override)\n");
        return kExitUnstable;
    }
    if (!st.stable && !st.sharp)
        std::fprintf(stderr,
                     "warning: lambda1+lambda2 >= mu; proceeding, but the "
                     "sufficient stability condition fails\n");
    return kExitOk;
}

struct CheckSummary {
    std::vector<json> reports;
    bool all_pass = true;

    void add(const qis::analysis::BalanceReport& rep) {
        reports.push_back(qis::io::balance_to_json(rep));
        all_pass = all_pass && rep.pass;
        std::printf("check %-16s max|r|=%-12.4g tol=%-8.3g %s\n",
                    rep.identity.c_str(), rep.max_residual, rep.tolerance,
                    rep.pass ? "PASS" : "FAIL");
    }
    void add(const qis::analysis::GeometricReport& rep) {
        reports.push_back(qis::io::geometric_to_json(rep));
        all_pass = all_pass && rep.report.pass;
        std::printf("check %-16s max|r|=%-12.4g tol=%-8.3g %s  "
                    "(ratio=%.12g, norm gap=%.4g)\n",
                    rep.report.identity.c_str(), rep.report.max_residual,
                    rep.report.tolerance, rep.report.pass ? "PASS" : "FAIL",
                    rep.fitted_ratio, rep.normalization_gap);
    }
};

CheckSummary run_all_checks(const qis::solver::StationaryDistribution& dist,
                            const qis::solver::GeneratorMatrix& gen,
                            const ModelParams& params) {
    CheckSummary sum;
    const double balance_tol =
        dist.method == qis::solver::SolveMethod::Gth ? 1e-12 : 1e-10;
    sum.add(qis::analysis::global_balance_residual(dist, gen, balance_tol));
    sum.add(qis::analysis::check_cut_x1(dist, params));
    sum.add(qis::analysis::check_cut_x2(dist, params));
    sum.add(qis::analysis::check_cut_total(dist, params));
    sum.add(qis::analysis::check_inventory_flow(dist, params));
    sum.add(qis::analysis::check_rate_equations(dist, params));
    sum.add(qis::analysis::check_geometric(dist, params));
    return sum;
}

void write_checks(const CheckSummary& sum, const std::string& path) {
    json j = json::array();
    for (const auto& r : sum.reports) j.push_back(r);
    qis::io::write_file(path, j.dump(2) + "\n");
    std::printf("wrote %s\n", path.c_str());
}

// ---------------------------------------------------------------- solve --

int cmd_solve(const json& config, const ParamFlags& flags,
              const std::vector<int>& trunc_flag, std::optional<double> tol,
              const std::string& out, const std::string& format, bool force) {
    const ModelParams params = resolve_params(config, flags);
    const int gate = stability_gate(params, force);
    if (gate != kExitOk) return gate;

    const auto trunc = resolve_trunc(config, trunc_flag);
    const auto gen = qis::solver::build_generator(params, trunc);
    const auto dist = qis::solver::solve_stationary(gen, resolve_solver(config, tol));
    std::printf("solve: %d states, method=%s, residual=%.4g, boundary mass=%.4g\n",
                gen.dimension(),
                dist.method == qis::solver::SolveMethod::Gth ? "gth"
                                                             : "power_iteration",
                dist.residual, qis::solver::boundary_mass(dist));

    if (format == "csv") {
        qis::io::write_file(out + ".dist.csv", qis::io::distribution_to_csv(dist));
        std::printf("wrote %s.dist.csv\n", out.c_str());
    } else {
        qis::io::write_file(out + ".dist.json",
                            qis::io::distribution_to_json(dist, params).dump(2) + "\n");
        std::printf("wrote %s.dist.json\n", out.c_str());
    }

    CheckSummary checks = run_all_checks(dist, gen, params);
    write_checks(checks, out + ".checks.json");
    return checks.all_pass ? kExitOk : kExitSolver;
}

// ---------------------------------------------------------------- drift --

int cmd_drift(const json& config, const ParamFlags& flags,
              const std::vector<int>& box_flag, const std::string& out,
              bool emit_csv) {
    const ModelParams params = resolve_params(config, flags);
    const auto box = resolve_trunc(config, box_flag, 50);
    const auto report = qis::lyapunov::verify_drift_bound(params, box);
    if (!report.applicable) {
        std::fprintf(stderr,
                     "certificate inapplicable: eta = %.6g <= 0 "
                     "(lambda1+lambda2 >= mu)\n",
                     report.eta);
        return kExitInapplicable;
    }
    std::printf("drift: box %dx%dx%d, eta=%.6g, epsilon=%.6g\n", box.cap1,
                box.cap2, params.b(), report.eta, report.epsilon);
    std::printf("max drift outside F: %.12g (bound -epsilon = %.12g), "
                "violations: %zu\n",
                report.max_drift_outside_exception, -report.epsilon,
                report.violations.size());

    qis::io::write_file(out + ".drift.json",
                        qis::io::drift_summary_to_json(report).dump(2) + "\n");
    std::printf("wrote %s.drift.json\n", out.c_str());
    if (emit_csv) {
        qis::io::write_file(out + ".drift.csv",
                            qis::io::drift_to_csv(params, report));
        std::printf("wrote %s.drift.csv\n", out.c_str());
    }
    return report.violations.empty() ? kExitOk : kExitSolver;
}

// ------------------------------------------------------------- simulate --

qis::sim::SimConfig resolve_sim(const json& config,
                                std::optional<std::uint64_t> seed,
                                std::optional<std::int64_t> events,
                                std::optional<std::int64_t> warmup,
                                std::optional<int> batches) {
    qis::sim::SimConfig cfg;
    if (config.contains("sim")) {
        const auto& s = config.at("sim");
        cfg.seed = s.value("seed", cfg.seed);
        cfg.max_events = s.value("max_events", cfg.max_events);
        cfg.warmup_events = s.value("warmup_events", cfg.warmup_events);
        cfg.batches = s.value("batches", cfg.batches);
    }
    if (seed) cfg.seed = *seed;
    if (events) cfg.max_events = *events;
    if (warmup) cfg.warmup_events = *warmup;
    if (batches) cfg.batches = *batches;
    return cfg;
}

int cmd_simulate(const json& config, const ParamFlags& flags,
                 std::optional<std::uint64_t> seed,
                 std::optional<std::int64_t> events,
                 std::optional<std::int64_t> warmup, std::optional<int> batches,
                 const std::string& traj, bool against_solve,
                 const std::vector<int>& trunc_flag, const std::string& out) {
    const ModelParams params = resolve_params(config, flags);
    const auto cfg = resolve_sim(config, seed, events, warmup, batches);

    qis::sim::SimEstimates est = [&] {
        if (traj.empty()) return qis::sim::simulate(params, cfg);
        qis::io::TrajectoryCsvWriter writer(traj);
        const qis::sim::EventObserver obs = std::ref(writer);
        return qis::sim::simulate(params, cfg, &obs);
    }();

    std::printf("simulate: %lld events, %.6g time units, seed=%llu\n",
                static_cast<long long>(cfg.max_events), est.simulated_time,
                static_cast<unsigned long long>(cfg.seed));
    const auto thr = qis::sim::throughput_check(est);
    std::printf("throughput residuals: class1=%.4g (z=%.2f), class2=%.4g "
                "(z=%.2f), total=%.4g (z=%.2f)%s\n",
                thr.residual1, thr.z1, thr.residual2, thr.z2,
                thr.residual_total, thr.z_total,
                thr.boundary_flagged
                    ? " [boundary regime: no equilibrium verdict]"
                    : (thr.pass ? " [balanced]" : " [NOT balanced]"));

    json j = qis::io::estimates_to_json(est);
    if (against_solve) {
        const auto trunc = resolve_trunc(config, trunc_flag, 60);
        const auto dist = qis::solver::solve_stationary(
            qis::solver::build_generator(params, trunc));
        const auto y =
            qis::solver::marginal(dist, qis::solver::MarginalQuery::Inventory);
        json cross = json::array();
        for (int k = 0; k <= params.b(); ++k) {
            const auto& m = est.time_avg.at("P(Y=" + std::to_string(k) + ")");
            const double dev =
                m.half_width > 0.0 ? (m.estimate - y.probs[k]) / m.half_width
                                   : 0.0;
            std::printf("cross-check P(Y=%d): sim=%.8g exact=%.8g z=%.3f "
                        "half-widths\n",
                        k, m.estimate, y.probs[k], dev);
            cross.push_back({{"metric", "P(Y=" + std::to_string(k) + ")"},
                             {"sim", m.estimate},
                             {"exact", y.probs[k]},
                             {"z", dev}});
        }
        j["against_solve"] = std::move(cross);
    }
    qis::io::write_file(out + ".sim.json", j.dump(2) + "\n");
    std::printf("wrote %s.sim.json\n", out.c_str());
    if (!traj.empty()) std::printf("wrote %s\n", traj.c_str());
    return kExitOk;
}

// -------------------------------------------------------------- instant --

int cmd_instant(const json& config, const ParamFlags& flags,
                const std::string& out, const std::string& format) {
    const ModelParams params = resolve_params(config, flags);
    const auto dist = qis::instant::instant_stationary(params);
    const double residual = qis::instant::instant_balance_residual(params, dist);
    for (int k = 0; k <= params.b(); ++k)
        std::printf("theta(%d) = %.12g\n", k, dist.theta[k]);
    std::printf("instant balance residual: %.4g\n", residual);

    if (format == "csv")
        qis::io::write_file(out + ".instant.csv", qis::io::inventory_to_csv(dist));
    else
        qis::io::write_file(out + ".instant.json",
                            qis::io::inventory_to_json(dist).dump(2) + "\n");
    std::printf("wrote %s.instant.%s\n", out.c_str(), format.c_str());
    return residual <= 1e-12 ? kExitOk : kExitSolver;
}

// --------------------------------------------------------------- verify --

int cmd_verify(const json& config, const ParamFlags& flags,
               const std::string& dist_path,
               const std::vector<int>& trunc_flag, std::optional<double> tol,
               const std::string& out, bool force) {
    qis::solver::StationaryDistribution dist;
    ModelParams params{1, 1, 4, 2, 0.5, 1, 2}; // overwritten below
    if (!dist_path.empty()) {
        auto loaded = qis::io::distribution_from_json(
            json::parse(qis::io::read_file(dist_path)));
        dist = std::move(loaded.dist);
        params = loaded.params;
        std::printf("verifying %s: %d states\n", dist_path.c_str(),
                    dist.map.size());
    } else {
        params = resolve_params(config, flags);
        const int gate = stability_gate(params, force);
        if (gate != kExitOk) return gate;
        const auto trunc = resolve_trunc(config, trunc_flag);
        dist = qis::solver::solve_stationary(
            qis::solver::build_generator(params, trunc),
            resolve_solver(config, tol));
    }

    const auto gen =
        qis::solver::build_generator(params, dist.map.trunc());
    CheckSummary checks = run_all_checks(dist, gen, params);
    if (!out.empty()) write_checks(checks, out + ".checks.json");
    std::printf("verify: %s\n", checks.all_pass ? "all checks PASS"
                                                : "one or more checks FAILED");
    return checks.all_pass ? kExitOk : kExitSolver;
}

// ---------------------------------------------------------------- sweep --

struct SweepPoint {
    double value = 0.0;
    std::vector<std::pair<std::string, double>> metrics;
};

ModelParams with_axis(const ModelParams& base, const std::string& axis,
                      double v) {
    auto as_int = [&](double x) {
        const int i = static_cast<int>(x);
        if (static_cast<double>(i) != x)
            throw qis::domain_error("axis " + axis + " needs integer values");
        return i;
    };
    if (axis == "lambda1")
        return {v, base.lambda2(), base.mu(), base.nu(), base.p(), base.s(), base.b()};
    if (axis == "lambda2")
        return {base.lambda1(), v, base.mu(), base.nu(), base.p(), base.s(), base.b()};
    if (axis == "mu")
        return {base.lambda1(), base.lambda2(), v, base.nu(), base.p(), base.s(), base.b()};
    if (axis == "nu")
        return {base.lambda1(), base.lambda2(), base.mu(), v, base.p(), base.s(), base.b()};
    if (axis == "p")
        return {base.lambda1(), base.lambda2(), base.mu(), base.nu(), v, base.s(), base.b()};
    if (axis == "s")
        return {base.lambda1(), base.lambda2(), base.mu(), base.nu(), base.p(), as_int(v), base.b()};
    if (axis == "b")
        return {base.lambda1(), base.lambda2(), base.mu(), base.nu(), base.p(), base.s(), as_int(v)};
    throw qis::domain_error("unknown sweep axis: " + axis);
}

SweepPoint sweep_point(const ModelParams& params, double value,
                       qis::solver::TruncationSpec trunc,
                       const qis::solver::SolveOptions& opts, bool force) {
    SweepPoint pt;
    pt.value = value;
    const auto st = qis::lyapunov::check_ergodicity(params);
    pt.metrics.emplace_back("stable", st.stable ? 1.0 : 0.0);
    pt.metrics.emplace_back("sharp", st.sharp ? 1.0 : 0.0);
    pt.metrics.emplace_back("eta", st.eta);
    pt.metrics.emplace_back("epsilon", st.epsilon);
    if (!st.stable && st.sharp && !force) return pt; // certified non-ergodic

    const auto dist = qis::solver::solve_stationary(
        qis::solver::build_generator(params, trunc), opts);
    const auto y = qis::solver::marginal(dist, qis::solver::MarginalQuery::Inventory);
    double stock = 0.0, stock_low = 0.0;
    for (int k = 1; k <= params.b(); ++k) {
        stock += y.probs[k];
        if (k <= params.s()) stock_low += y.probs[k];
    }
    const auto x1 = qis::solver::marginal(dist, qis::solver::MarginalQuery::Priority);
    const auto x2 = qis::solver::marginal(dist, qis::solver::MarginalQuery::Ordinary);
    double ex1 = 0.0, ex2 = 0.0;
    for (std::size_t n = 0; n < x1.probs.size(); ++n) ex1 += n * x1.probs[n];
    for (std::size_t n = 0; n < x2.probs.size(); ++n) ex2 += n * x2.probs[n];

    // effective rates via the equilibrium flow quantities
    double busy1 = 0.0, busy2 = 0.0;
    for (int i = 0; i < dist.map.size(); ++i) {
        const qis::State z = dist.map.state_of(i);
        if (z.k > 0 && z.n1 > 0) busy1 += dist.probabilities[i];
        if (z.k > 0 && z.n1 == 0 && z.n2 > 0) busy2 += dist.probabilities[i];
    }

    for (int k = 0; k <= params.b(); ++k)
        pt.metrics.emplace_back("P(Y=" + std::to_string(k) + ")", y.probs[k]);
    pt.metrics.emplace_back("P(Y>0)", stock);
    pt.metrics.emplace_back("P(0<Y<=s)", stock_low);
    pt.metrics.emplace_back("E[X1]", ex1);
    pt.metrics.emplace_back("E[X2]", ex2);
    pt.metrics.emplace_back("eff_arrival_1", params.lambda1() * stock);
    pt.metrics.emplace_back("eff_arrival_2",
                            params.p() * params.lambda2() * stock_low +
                                params.lambda2() * (stock - stock_low));
    pt.metrics.emplace_back("eff_departure_1", params.mu() * busy1);
    pt.metrics.emplace_back("eff_departure_2", params.mu() * busy2);
    pt.metrics.emplace_back("boundary_mass", qis::solver::boundary_mass(dist));
    return pt;
}

int cmd_sweep(const json& config, const ParamFlags& flags,
              const std::string& axis_flag, const std::string& grid_flag,
              const std::vector<int>& trunc_flag, std::optional<double> tol,
              int jobs, const std::string& out, bool force) {
    const ModelParams base = resolve_params(config, flags);

    std::string axis = axis_flag;
    std::vector<double> grid;
    if (config.contains("sweep")) {
        const auto& sw = config.at("sweep");
        if (axis.empty()) axis = sw.value("axis", std::string());
        if (grid_flag.empty() && sw.contains("grid"))
            grid = sw.at("grid").get<std::vector<double>>();
    }
    if (!grid_flag.empty()) {
        grid.clear();
        std::size_t pos = 0;
        while (pos < grid_flag.size()) {
            std::size_t next = grid_flag.find(',', pos);
            if (next == std::string::npos) next = grid_flag.size();
            try {
                grid.push_back(std::stod(grid_flag.substr(pos, next - pos)));
            } catch (const std::exception&) {
                throw qis::domain_error("bad grid value: " +
                                        grid_flag.substr(pos, next - pos));
            }
            pos = next + 1;
        }
    }
    if (axis.empty() || grid.empty())
        throw qis::domain_error("sweep needs --axis and --grid (or a config sweep block)");

    // every grid point must make a valid parameter set
    std::vector<ModelParams> points;
    for (double v : grid) points.push_back(with_axis(base, axis, v));

    const auto trunc = resolve_trunc(config, trunc_flag);
    const auto opts = resolve_solver(config, tol);

    std::vector<SweepPoint> results(points.size());
    const int workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < points.size(); ++i)
            results[i] = sweep_point(points[i], grid[i], trunc, opts, force);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < points.size();
                     i = next.fetch_add(1))
                    results[i] = sweep_point(points[i], grid[i], trunc, opts, force);
            });
        for (auto& th : pool) th.join();
    }

    std::string csv = "parameter,value,metric,metric_value\n";
    for (const auto& pt : results)
        for (const auto& [name, value] : pt.metrics)
            csv += axis + ',' + qis::format_double(pt.value) + ',' + name +
                   ',' + qis::format_double(value) + '\n';
    qis::io::write_file(out + ".sweep.csv", csv);
    std::printf("sweep: %zu points on %s, wrote %s.sweep.csv\n", grid.size(),
                axis.c_str(), out.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-priority queueing-inventory model: exact solves, "
                 "simulation, drift certificates and balance checks"};
    app.require_subcommand(1);

    std::string config_path, out = "qis_out", format = "json";
    bool force = false;
    ParamFlags flags;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON or key=value config file");
        cmd->add_option("--out", out, "output path prefix");
        cmd->add_flag("--force", force, "override the instability refusal");
        flags.attach(cmd);
    };

    // solve
    auto* solve = app.add_subcommand("solve", "stationary distribution + checks");
    std::vector<int> trunc_flag;
    std::optional<double> tol;
    add_common(solve);
    solve->add_option("--trunc", trunc_flag, "queue caps: N1 N2")->expected(2);
    solve->add_option("--tol", tol, "solver residual tolerance");
    solve->add_option("--format", format, "dist file format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    // drift
    auto* drift = app.add_subcommand("drift", "Lyapunov drift verification");
    std::vector<int> box_flag;
    bool emit_csv = false;
    add_common(drift);
    drift->add_option("--box", box_flag, "evaluation box: N1 N2")->expected(2);
    drift->add_flag("--emit-csv", emit_csv, "write per-state drift CSV");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "trajectory simulation");
    std::optional<std::uint64_t> seed;
    std::optional<double> events_flag, warmup_flag; // accepts 1e7 notation
    std::optional<int> batches;
    std::string traj;
    bool against_solve = false;
    std::vector<int> sim_trunc_flag;
    add_common(simulate);
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--events", events_flag, "total events to simulate");
    simulate->add_option("--warmup", warmup_flag, "warmup events (default 10%)");
    simulate->add_option("--batches", batches, "batch-means batches");
    simulate->add_option("--traj", traj, "write trajectory CSV to this path");
    simulate->add_flag("--against-solve", against_solve,
                       "compare P(Y=k) with an exact solve");
    simulate->add_option("--trunc", sim_trunc_flag,
                         "caps for --against-solve")->expected(2);

    // instant
    auto* instant = app.add_subcommand("instant",
                                       "zero-service-time closed form");
    add_common(instant);
    instant->add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* verify = app.add_subcommand("verify", "re-run balance checks");
    std::string dist_path;
    std::vector<int> verify_trunc_flag;
    std::optional<double> verify_tol;
    add_common(verify);
    verify->add_option("--dist", dist_path, "previously exported .dist.json");
    verify->add_option("--trunc", verify_trunc_flag, "caps when solving fresh")
        ->expected(2);
    verify->add_option("--tol", verify_tol, "solver residual tolerance");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "metrics along a parameter grid");
    std::string axis, grid;
    int jobs = 1;
    std::vector<int> sweep_trunc_flag;
    std::optional<double> sweep_tol;
    add_common(sweep);
    sweep->add_option("--axis", axis,
                      "one of lambda1,lambda2,mu,nu,p,s,b");
    sweep->add_option("--grid", grid, "comma-separated grid values");
    sweep->add_option("--trunc", sweep_trunc_flag, "caps per point")->expected(2);
    sweep->add_option("--tol", sweep_tol, "solver residual tolerance");
    sweep->add_option("--jobs", jobs, "parallel workers over grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const json config = load_config(config_path);
        if (solve->parsed())
            return cmd_solve(config, flags, trunc_flag, tol, out, format, force);
        if (drift->parsed())
            return cmd_drift(config, flags, box_flag, out, emit_csv);
        if (simulate->parsed()) {
            std::optional<std::int64_t> events, warmup;
            if (events_flag) events = static_cast<std::int64_t>(std::llround(*events_flag));
            if (warmup_flag) warmup = static_cast<std::int64_t>(std::llround(*warmup_flag));
            return cmd_simulate(config, flags, seed, events, warmup, batches,
                                traj, against_solve, sim_trunc_flag, out);
        }
        if (instant->parsed())
            return cmd_instant(config, flags, out, format);
        if (verify->parsed())
            return cmd_verify(config, flags, dist_path, verify_trunc_flag,
                              verify_tol, out, force);
        if (sweep->parsed())
            return cmd_sweep(config, flags, axis, grid, sweep_trunc_flag,
                             sweep_tol, jobs, out, force);
    } catch (const qis::convergence_error& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolver;
    } catch (const qis::structural_error& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolver;
    } catch (const qis::capacity_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const qis::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
