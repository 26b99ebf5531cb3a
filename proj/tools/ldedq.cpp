// ldedq: melt-pool depth evaluation, Q-learning parameter search, oracle maps and sweeps.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ldedq/config.hpp"
#include "ldedq/errors.hpp"
#include "ldedq/experiments.hpp"
#include "ldedq/io.hpp"
#include "ldedq/oracle.hpp"
#include "ldedq/parallel.hpp"
#include "ldedq/qlearn.hpp"
#include "ldedq/thermal.hpp"

namespace fs = std::filesystem;
using namespace ldedq;

namespace {

struct Options {
    int jobs = 0;
    std::string config;
    std::optional<double> power;
    std::optional<double> speed;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string param;
    std::optional<int> replicates;
};

RunConfig load(const Options& o) {
    if (!o.config.empty()) return load_config(o.config);
    if (const char* env = std::getenv(kConfigEnvVar); env && *env) return load_config(env);
    return RunConfig{};
}

fs::path out_dir(const Options& o, const RunConfig& cfg) { return o.out.empty() ? fs::path(cfg.output_dir) : fs::path(o.out); }

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

int cmd_depth(const Options& o) {
    if (!o.power) throw ValidationError("power: required (--power W)");
    if (!(*o.power >= 0.0)) throw ValidationError("power: must be >= 0 W (got " + num(*o.power) + ")");
    if (!o.speed) throw ValidationError("speed: required (--speed mm/min)");
    if (!(*o.speed > 0.0)) throw ValidationError("speed: must be > 0 mm/min (got " + num(*o.speed) + ")");
    const RunConfig cfg = load(o);

    const auto t0 = std::chrono::steady_clock::now();
    const DepthResult d = melt_pool_depth(cfg.material, *o.power, mmpm_to_mps(*o.speed));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cout << "power_w     " << fmt4(*o.power) << "\n"
              << "speed_mmpm  " << fmt4(*o.speed) << "\n"
              << "depth_mm    " << fmt4(d.depth_mm) << "\n"
              << "converged   " << (d.converged ? "yes" : "no") << "\n"
              << "t_used_s    " << d.t_used_s << "\n"
              << "elapsed_s   " << secs << "\n";
    if (!d.converged) {
        std::cerr << "error: depth did not reach steady state by t = " << d.t_used_s << " s\n";
        return 2;
    }
    return 0;
}

int cmd_train(const Options& o) {
    RunConfig cfg = load(o);
    if (o.seed) cfg.qlearn.seed = *o.seed;
    const fs::path dir = out_dir(o, cfg);
    const int jobs = resolve_jobs(o.jobs);

    DepthCache cache(cfg.grid, cfg.material);
    cache.warm_up(jobs);
    const Environment env(cache, cfg.reward);
    const RunResult run = train(env, cfg.qlearn);
    const GridReport report = brute_force_rank(cache, cfg.reward.delta_opt_mm, cfg.reward.tol_r_mm, jobs);
    const RunVerdict verdict = validate_run(report, run);

    write_config_snapshot(dir, cfg);
    std::ostringstream q;
    write_qtable_csv(q, run.q);
    write_file(dir / "qtable.csv", q.str());
    write_file(dir / "qtable.json", qtable_json(run, cfg).dump(2) + "\n");
    std::ostringstream conv;
    write_convergence_csv(conv, run);
    write_file(dir / "convergence.csv", conv.str());
    write_file(dir / "summary.json", run_summary_json(run, verdict, cfg).dump(2) + "\n");

    std::cout << "seed        " << run.seed << "\n"
              << "best state  (" << run.best_state.i << "," << run.best_state.j << ")\n"
              << "power_w     " << fmt4(run.best_power_w) << "\n"
              << "speed_mmpm  " << fmt4(run.best_speed_mmpm) << "\n"
              << "depth_mm    " << fmt4(run.best_depth_mm) << "\n"
              << "oracle rank " << verdict.rank << " of " << report.rows.size() << "\n"
              << "output      " << dir.string() << "\n";
    return 0;
}

int cmd_map(const Options& o) {
    const RunConfig cfg = load(o);
    const fs::path dir = out_dir(o, cfg);
    const GridReport report =
        brute_force_rank(cfg.grid, cfg.material, cfg.reward.delta_opt_mm, cfg.reward.tol_r_mm, {}, resolve_jobs(o.jobs));

    write_config_snapshot(dir, cfg);
    std::ostringstream map;
    write_pv_map_csv(map, report);
    write_file(dir / "pv_map.csv", map.str());

    const GridRow& best = report.row(report.best);
    std::cout << "states      " << report.rows.size() << "\n"
              << "in band     " << report.band().size() << "\n"
              << "best state  (" << best.state.i << "," << best.state.j << ")\n"
              << "power_w     " << fmt4(best.power_w) << "\n"
              << "speed_mmpm  " << fmt4(best.speed_mmpm) << "\n"
              << "depth_mm    " << fmt4(best.depth_mm) << "\n"
              << "output      " << (dir / "pv_map.csv").string() << "\n";
    return 0;
}

int cmd_sweep(const Options& o) {
    RunConfig cfg = load(o);
    SweepSpec spec = cfg.sweep.value_or(SweepSpec{});
    if (!o.param.empty()) {
        const SweepParam p = parse_sweep_param(o.param);
        if (!cfg.sweep || cfg.sweep->param != p) spec.values = default_sweep_values(p);
        spec.param = p;
    }
    if (o.replicates) spec.replicates = *o.replicates;
    spec.validate();
    cfg.sweep = spec;
    const fs::path dir = out_dir(o, cfg);

    const SweepResult result = run_sweep(cfg.experiment(), spec, resolve_jobs(o.jobs));
    write_sweep(dir, result, cfg);

    std::cout << "param       " << to_string(spec.param) << "\n"
              << "values      " << spec.values.size() << "\n"
              << "replicates  " << spec.replicates << "\n"
              << "output      " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Melt-pool depth model and Q-learning process-parameter search for laser DED"};
    app.require_subcommand(1);
    Options o;
    app.add_option("-j,--jobs", o.jobs, "Worker threads (<= 0: all cores); results do not depend on it");

    auto config_opt = [&](CLI::App* sub) {
        sub->add_option("-c,--config", o.config, std::string("INI config file (default: $") + kConfigEnvVar +
                                                      ", then built-in defaults)");
    };

    CLI::App* depth = app.add_subcommand("depth", "Steady-state melt-pool depth for one (P, v)");
    depth->add_option("-p,--power", o.power, "Laser power in W");
    depth->add_option("-s,--speed", o.speed, "Scan speed in mm/min");
    config_opt(depth);

    CLI::App* trainc = app.add_subcommand("train", "Train one Q-table and write qtable, convergence and summary files");
    config_opt(trainc);
    trainc->add_option("--seed", o.seed, "Override qlearn.seed");
    trainc->add_option("-o,--out", o.out, "Output directory (default: output.dir)");

    CLI::App* mapc = app.add_subcommand("map", "Brute-force depth map of the grid ranked against the target depth");
    config_opt(mapc);
    mapc->add_option("-o,--out", o.out, "Output directory (default: output.dir)");

    CLI::App* sweep = app.add_subcommand("sweep", "Replicated training runs over one hyperparameter");
    config_opt(sweep);
    sweep->add_option("--param", o.param, "n, epsilon, gamma, alpha or episodes (default: sweep.param)");
    sweep->add_option("--replicates", o.replicates, "Override sweep.replicates");
    sweep->add_option("-o,--out", o.out, "Output directory (default: output.dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*depth) return cmd_depth(o);
        if (*trainc) return cmd_train(o);
        if (*mapc) return cmd_map(o);
        if (*sweep) return cmd_sweep(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
