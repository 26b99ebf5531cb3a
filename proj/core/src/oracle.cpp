#include "ldedq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ldedq/errors.hpp"

namespace ldedq {

namespace {

GridReport rank_depths(const StateGrid& grid, const MaterialEnv& env, double delta_opt_mm,
                       double tol_r_mm, const std::vector<DepthResult>& depths) {
    GridReport report;
    report.grid = grid;
    report.material = env;
    report.delta_opt_mm = delta_opt_mm;
    report.tol_r_mm = tol_r_mm;
    report.rows.reserve(depths.size());

    for (std::size_t id = 0; id < depths.size(); ++id) {
        const StateId s = StateId::from_flat(grid, id);
        const DepthResult& d = depths[id];
        if (!d.converged) {
            std::ostringstream os;
            os << "oracle: depth at state (" << s.i << "," << s.j << ") did not reach steady state by t = "
               << d.t_used_s << " s";
            throw EvaluationError(os.str());
        }
        const ProcessParams p = state_params(grid, s);
        const double err = std::abs(d.depth_mm - delta_opt_mm);
        report.rows.push_back({s, p.power_w, p.speed_mmpm, d.depth_mm, err, 0, err <= tol_r_mm});
    }

    std::vector<std::size_t> order(report.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.rows[a].error_mm < report.rows[b].error_mm;
    });
    for (std::size_t r = 0; r < order.size(); ++r) report.rows[order[r]].rank = static_cast<int>(r) + 1;
    report.best = report.rows[order.front()].state;
    return report;
}

}  // namespace

std::vector<StateId> GridReport::band() const {
    std::vector<StateId> out;
    for (const GridRow& r : rows) {
        if (r.in_band) out.push_back(r.state);
    }
    return out;
}

std::vector<StateId> GridReport::ranking() const {
    std::vector<StateId> out(rows.size());
    for (const GridRow& r : rows) out[static_cast<std::size_t>(r.rank - 1)] = r.state;
    return out;
}

GridReport brute_force_rank(const StateGrid& grid, const MaterialEnv& env, double delta_opt_mm,
                            double tol_r_mm, const DepthOptions& opts, int jobs) {
    grid.validate();
    env.validate();
    std::vector<ProcessPoint> queries;
    queries.reserve(grid.state_count());
    for (std::size_t id = 0; id < grid.state_count(); ++id) {
        const ProcessParams p = state_params(grid, StateId::from_flat(grid, id));
        queries.push_back({p.power_w, mmpm_to_mps(p.speed_mmpm)});
    }
    return rank_depths(grid, env, delta_opt_mm, tol_r_mm, batch_depths(env, queries, opts, jobs));
}

GridReport brute_force_rank(DepthCache& cache, double delta_opt_mm, double tol_r_mm, int jobs) {
    cache.warm_up(jobs);
    const StateGrid& grid = cache.grid();
    std::vector<DepthResult> depths;
    depths.reserve(grid.state_count());
    for (std::size_t id = 0; id < grid.state_count(); ++id) depths.push_back(cache.get(StateId::from_flat(grid, id)));
    return rank_depths(grid, cache.material(), delta_opt_mm, tol_r_mm, depths);
}

RunVerdict validate_run(const GridReport& report, const RunResult& result, const VerdictOptions& opts) {
    if (!(report.grid == result.grid)) {
        throw ValidationError("validate_run: run grid does not match the oracle grid");
    }
    const GridRow& row = report.row(result.best_state);
    const GridRow& best = report.row(report.best);
    RunVerdict v;
    v.rank = row.rank;
    v.within_top_k = row.rank <= opts.k;
    v.depth_mm = row.depth_mm;
    v.depth_error_mm = row.error_mm;
    v.gap_to_best_mm = row.error_mm - best.error_mm;
    v.within_depth = row.error_mm <= opts.depth_tol_mm;
    v.pass = v.within_top_k || (opts.accept_by_depth && v.within_depth);
    return v;
}

}  // namespace ldedq
