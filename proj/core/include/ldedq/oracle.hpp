#pragma once

#include <cstddef>
#include <vector>

#include "ldedq/environment.hpp"
#include "ldedq/qlearn.hpp"

namespace ldedq {

struct GridRow {
    StateId state;
    double power_w;
    double speed_mmpm;
    double depth_mm;
    double error_mm;  ///< |depth - delta_opt|
    int rank;         ///< 1 = closest to delta_opt; ties broken by flat id
    bool in_band;     ///< error_mm <= tol_r
};

/// Exhaustive depth map of a grid ranked by distance to the target depth.
struct GridReport {
    StateGrid grid;
    MaterialEnv material;
    double delta_opt_mm = 1.0;
    double tol_r_mm = 0.1;
    std::vector<GridRow> rows;  ///< indexed by flat state id
    StateId best;

    const GridRow& row(StateId s) const { return rows.at(s.flat(grid)); }
    std::vector<StateId> band() const;
    /// States ordered by rank.
    std::vector<StateId> ranking() const;
};

/// Evaluates every grid state with batch_depths and ranks by |depth - delta_opt|.
/// Throws EvaluationError naming the first state whose depth did not reach steady state.
GridReport brute_force_rank(const StateGrid& grid, const MaterialEnv& env, double delta_opt_mm,
                            double tol_r_mm, const DepthOptions& opts = {}, int jobs = 1);

/// Same ranking built from an existing cache (warming it as needed).
GridReport brute_force_rank(DepthCache& cache, double delta_opt_mm, double tol_r_mm, int jobs = 1);

struct RunVerdict {
    int rank = 0;
    bool within_top_k = false;
    double depth_mm = 0.0;
    double depth_error_mm = 0.0;  ///< |RL best depth - delta_opt|
    double gap_to_best_mm = 0.0;  ///< depth_error_mm minus the oracle's best error
    bool within_depth = false;    ///< depth_error_mm <= depth_tol_mm
    bool pass = false;
};

struct VerdictOptions {
    int k = 3;
    double depth_tol_mm = 0.05;
    /// Also accept runs that miss the top-k but satisfy the depth criterion.
    bool accept_by_depth = false;
};

/// Compares a trained run's best state with the oracle ranking.
/// Throws ValidationError when the run used a different grid.
RunVerdict validate_run(const GridReport& report, const RunResult& result, const VerdictOptions& opts = {});

}  // namespace ldedq
