#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "ldedq/config.hpp"
#include "ldedq/experiments.hpp"
#include "ldedq/oracle.hpp"
#include "ldedq/qlearn.hpp"

namespace ldedq {

// CSV writers. Depths are printed with 4 decimals, Q values with 17 significant digits.

/// state_id,i,j,power_w,speed_mmpm,depth_mm
void write_depth_csv(std::ostream& out, const GridReport& report);
/// state_id,i,j,power_w,speed_mmpm,depth_mm,abs_error_mm,rank,in_band
void write_pv_map_csv(std::ostream& out, const GridReport& report);
/// state_id followed by one column per action, labelled "(di,dj)".
void write_qtable_csv(std::ostream& out, const QTable& q);
/// episode,total_reward,epochs,terminated_early
void write_convergence_csv(std::ostream& out, const RunResult& run);
/// episode,mean_reward,std_reward,replicates
void write_curve_csv(std::ostream& out, const ConvergenceCurve& curve);
/// value,replicate,seed,best_power_w,best_speed_mmpm,best_depth_mm,oracle_rank
void write_sweep_summary_csv(std::ostream& out, const SweepResult& sweep);

nlohmann::json qtable_json(const RunResult& run, const RunConfig& cfg);
nlohmann::json run_summary_json(const RunResult& run, const RunVerdict& verdict, const RunConfig& cfg);

/// Writes config.ini and config.json into `dir`, creating it if needed.
void write_config_snapshot(const std::filesystem::path& dir, const RunConfig& cfg);

/// Directory name of one swept value, e.g. "epsilon_0.25" or "n_10".
std::string sweep_value_dir(SweepParam p, double value);

/**
 * Sweep output tree:
 *   <dir>/config.ini, config.json, summary.csv
 *   <dir>/<param>_<value>/convergence.csv, pv_map.csv, qtable_r<k>.csv
 */
void write_sweep(const std::filesystem::path& dir, const SweepResult& sweep, const RunConfig& cfg);

/// Opens `path` for writing, throwing EvaluationError on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace ldedq
