#include "ldedq/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ldedq/errors.hpp"
#include "ldedq/rng.hpp"

namespace ldedq {

namespace {

std::string full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string short_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

nlohmann::json state_json(const StateGrid& g, StateId s) {
    return {{"state_id", s.flat(g)}, {"i", s.i}, {"j", s.j}};
}

}  // namespace

void write_depth_csv(std::ostream& out, const GridReport& report) {
    out << "state_id,i,j,power_w,speed_mmpm,depth_mm\n";
    for (std::size_t id = 0; id < report.rows.size(); ++id) {
        const GridRow& r = report.rows[id];
        out << id << ',' << r.state.i << ',' << r.state.j << ',' << fixed4(r.power_w) << ','
            << fixed4(r.speed_mmpm) << ',' << fixed4(r.depth_mm) << '\n';
    }
}

void write_pv_map_csv(std::ostream& out, const GridReport& report) {
    out << "state_id,i,j,power_w,speed_mmpm,depth_mm,abs_error_mm,rank,in_band\n";
    for (std::size_t id = 0; id < report.rows.size(); ++id) {
        const GridRow& r = report.rows[id];
        out << id << ',' << r.state.i << ',' << r.state.j << ',' << fixed4(r.power_w) << ','
            << fixed4(r.speed_mmpm) << ',' << fixed4(r.depth_mm) << ',' << fixed4(r.error_mm) << ',' << r.rank
            << ',' << (r.in_band ? 1 : 0) << '\n';
    }
}

void write_qtable_csv(std::ostream& out, const QTable& q) {
    out << "state_id";
    for (std::size_t a = 0; a < kActionCount; ++a) out << ",\"" << action_label(a) << '"';
    out << '\n';
    for (std::size_t s = 0; s < q.rows(); ++s) {
        out << s;
        for (const double v : q.row(s)) out << ',' << full(v);
        out << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const RunResult& run) {
    out << "episode,total_reward,epochs,terminated_early\n";
    for (std::size_t e = 0; e < run.episodes.size(); ++e) {
        const EpisodeTrace& t = run.episodes[e];
        out << e << ',' << full(t.total_reward) << ',' << t.epoch_count() << ',' << (t.terminated_early ? 1 : 0)
            << '\n';
    }
}

void write_curve_csv(std::ostream& out, const ConvergenceCurve& curve) {
    out << "episode,mean_reward,std_reward,replicates\n";
    for (std::size_t e = 0; e < curve.mean.size(); ++e) {
        out << e << ',' << full(curve.mean[e]) << ',' << full(curve.stddev[e]) << ',' << curve.replicates << '\n';
    }
}

void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep) {
    out << "value,replicate,seed,best_power_w,best_speed_mmpm,best_depth_mm,oracle_rank\n";
    for (const SweepPoint& p : sweep.points) {
        for (const ReplicateSummary& s : p.summary) {
            out << short_num(s.value) << ',' << s.replicate << ',' << s.seed << ',' << fixed4(s.best_power_w) << ','
                << fixed4(s.best_speed_mmpm) << ',' << fixed4(s.best_depth_mm) << ',' << s.oracle_rank << '\n';
        }
    }
}

nlohmann::json qtable_json(const RunResult& run, const RunConfig& cfg) {
    nlohmann::json actions = nlohmann::json::array();
    for (std::size_t a = 0; a < kActionCount; ++a) actions.push_back(action_label(a));
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t s = 0; s < run.q.rows(); ++s) {
        const auto row = run.q.row(s);
        table.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"config", to_json(cfg)},
            {"seed", run.seed},
            {"generator", std::string(Rng::kName)},
            {"actions", actions},
            {"table", table}};
}

nlohmann::json run_summary_json(const RunResult& run, const RunVerdict& verdict, const RunConfig& cfg) {
    nlohmann::json best = state_json(run.grid, run.best_state);
    best["power_w"] = run.best_power_w;
    best["speed_mmpm"] = run.best_speed_mmpm;
    best["depth_mm"] = run.best_depth_mm;
    best["q"] = run.best_q;
    best["from_state_id"] = run.best_origin.flat(run.grid);
    best["action"] = action_label(run.best_action);
    return {{"config", to_json(cfg)},
            {"seed", run.seed},
            {"generator", std::string(Rng::kName)},
            {"best", best},
            {"oracle",
             {{"rank", verdict.rank},
              {"within_top_3", verdict.within_top_k},
              {"depth_error_mm", verdict.depth_error_mm},
              {"gap_to_best_mm", verdict.gap_to_best_mm}}}};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
    out.close();
    if (!out) throw EvaluationError("cannot write " + path.string());
}

void write_config_snapshot(const std::filesystem::path& dir, const RunConfig& cfg) {
    std::filesystem::create_directories(dir);
    write_file(dir / "config.ini", to_ini(cfg));
    write_file(dir / "config.json", to_json(cfg).dump(2) + "\n");
}

std::string sweep_value_dir(SweepParam p, double value) {
    return std::string(to_string(p)) + "_" + short_num(value);
}

void write_sweep(const std::filesystem::path& dir, const SweepResult& sweep, const RunConfig& cfg) {
    RunConfig snapshot = cfg;
    snapshot.sweep = sweep.spec;
    write_config_snapshot(dir, snapshot);

    std::ostringstream summary;
    write_sweep_summary_csv(summary, sweep);
    write_file(dir / "summary.csv", summary.str());

    for (const SweepPoint& p : sweep.points) {
        const auto sub = dir / sweep_value_dir(sweep.spec.param, p.value);
        std::filesystem::create_directories(sub);
        std::ostringstream curve;
        write_curve_csv(curve, p.curve);
        write_file(sub / "convergence.csv", curve.str());
        std::ostringstream map;
        write_pv_map_csv(map, p.oracle);
        write_file(sub / "pv_map.csv", map.str());
        for (std::size_t r = 0; r < p.runs.size(); ++r) {
            std::ostringstream q;
            write_qtable_csv(q, p.runs[r].q);
            write_file(sub / ("qtable_r" + std::to_string(r) + ".csv"), q.str());
        }
    }
}

}  // namespace ldedq
