#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ldedq/environment.hpp"
#include "ldedq/oracle.hpp"
#include "ldedq/qlearn.hpp"

namespace ldedq {

enum class SweepParam { n, epsilon, gamma, alpha, episodes };

std::string_view to_string(SweepParam p);
/// Throws ValidationError listing the valid names.
SweepParam parse_sweep_param(std::string_view name);
std::vector<double> default_sweep_values(SweepParam p);

struct SweepSpec {
    SweepParam param = SweepParam::epsilon;
    std::vector<double> values = default_sweep_values(SweepParam::epsilon);
    int replicates = 10;
    std::uint64_t base_seed = 2024;

    void validate(const char* path = "sweep") const;
};

/// Everything a single training run needs besides its seed.
struct ExperimentBase {
    MaterialEnv material;
    StateGrid grid;
    RewardConfig reward;
    Hyperparams hp;
    DepthOptions depth;
};

/// Per-episode mean and population standard deviation of total reward across replicates.
struct ConvergenceCurve {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::size_t replicates = 0;
};

/// Throws ValidationError when replicates have different episode counts.
ConvergenceCurve aggregate_convergence(std::span<const std::vector<EpisodeTrace>> replicates);

struct ReplicateSummary {
    double value;
    int replicate;
    std::uint64_t seed;
    double best_power_w;
    double best_speed_mmpm;
    double best_depth_mm;
    int oracle_rank;
};

struct SweepPoint {
    double value;
    StateGrid grid;
    Hyperparams hp;
    std::vector<RunResult> runs;
    ConvergenceCurve curve;
    std::vector<ReplicateSummary> summary;
    GridReport oracle;
};

struct SweepResult {
    ExperimentBase base;
    SweepSpec spec;
    std::vector<SweepPoint> points;
};

/// Seed of replicate r; the same for every swept value so values share random streams.
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);

/// Copy of `base` with the swept parameter set to `value`.
ExperimentBase apply_sweep_value(const ExperimentBase& base, SweepParam p, double value);

/// Runs spec.replicates seeded trainings per value. Results do not depend on `jobs`.
SweepResult run_sweep(const ExperimentBase& base, const SweepSpec& spec, int jobs = 1);

/// Ordinary least squares of ys against 0..n-1 with a one-sided test for a positive slope.
struct SlopeTest {
    double slope = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_positive = 1.0;  ///< P(T >= t) under a zero slope
};
SlopeTest regression_slope(std::span<const double> ys);

}  // namespace ldedq
