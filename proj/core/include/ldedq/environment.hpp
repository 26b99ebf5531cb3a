#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ldedq/thermal.hpp"

namespace ldedq {

/// Endpoint-inclusive n x n grid over laser power (W) and scan speed (mm/min).
struct StateGrid {
    int n = 10;
    double p_min_w = 500.0;
    double p_max_w = 1000.0;
    double v_min_mmpm = 400.0;
    double v_max_mmpm = 700.0;

    void validate(const char* path = "grid") const;
    std::size_t state_count() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

    bool operator==(const StateGrid&) const = default;
};

/// Grid cell: i indexes power, j indexes speed. Flat id = i * n + j.
struct StateId {
    int i = 0;
    int j = 0;

    std::size_t flat(const StateGrid& g) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(g.n) + static_cast<std::size_t>(j);
    }
    static StateId from_flat(const StateGrid& g, std::size_t id) {
        return {static_cast<int>(id / static_cast<std::size_t>(g.n)),
                static_cast<int>(id % static_cast<std::size_t>(g.n))};
    }
    bool operator==(const StateId&) const = default;
};

bool contains(const StateGrid& g, StateId s);

struct Action {
    int di = 0;
    int dj = 0;
    bool operator==(const Action&) const = default;
};

inline constexpr std::size_t kActionCount = 8;

/// Q-table column order: (di, dj) row-major over {-1, 0, 1}^2 with (0, 0) skipped.
inline constexpr std::array<Action, kActionCount> kActions = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

/// Column label such as "(-1,+1)".
std::string action_label(std::size_t k);

struct ProcessParams {
    double power_w;
    double speed_mmpm;
};

/// Exact linspace mapping. Throws ValidationError when s is outside the grid.
ProcessParams state_params(const StateGrid& g, StateId s);

/// Indices into kActions whose target stays on the grid, in column order.
std::vector<std::size_t> valid_actions(const StateGrid& g, StateId s);

enum class RewardVariant {
    paper,          ///< 1/|delta_opt - err| inside tol_r, -|delta_opt - err| outside
    inverse_error,  ///< 1/err inside tol_r, -err outside
};

std::string_view to_string(RewardVariant v);
RewardVariant parse_reward_variant(std::string_view name);

struct RewardConfig {
    double delta_opt_mm = 1.0;
    double tol_r_mm = 0.1;
    double tol_delta_mm = 0.005;
    double denom_floor_mm = 1e-6;
    RewardVariant variant = RewardVariant::inverse_error;

    void validate(const char* path = "reward") const;
    bool operator==(const RewardConfig&) const = default;
};

/// Reward for landing at a state whose depth misses the target by `err` (mm).
double reward(const RewardConfig& rc, double err);

/**
 * Lazily computed steady-state depth for every grid state.
 *
 * Each entry is computed once; later reads return the stored value. Concurrent
 * get() calls are safe, and warm_up() may fill the table in parallel.
 */
class DepthCache {
public:
    DepthCache(StateGrid grid, MaterialEnv env, DepthOptions opts = {});

    DepthCache(const DepthCache&) = delete;
    DepthCache& operator=(const DepthCache&) = delete;

    const DepthResult& get(StateId s);
    void warm_up(int jobs = 1);

    std::size_t size() const;
    /// Number of melt_pool_depth evaluations performed so far.
    std::size_t evaluations() const { return evaluations_.load(); }

    const StateGrid& grid() const { return grid_; }
    const MaterialEnv& material() const { return env_; }
    const DepthOptions& options() const { return opts_; }

private:
    StateGrid grid_;
    MaterialEnv env_;
    DepthOptions opts_;
    mutable std::mutex mutex_;
    std::vector<std::optional<DepthResult>> entries_;
    std::atomic<std::size_t> evaluations_{0};
};

struct StepResult {
    StateId next;
    double depth_mm;
    double error_mm;  ///< |depth - delta_opt|
    double reward;
    bool terminal;
};

/// Discrete process-parameter environment: grid, depth lookup and reward.
class Environment {
public:
    Environment(DepthCache& cache, RewardConfig rc);

    const StateGrid& grid() const { return cache_->grid(); }
    const RewardConfig& reward_config() const { return rc_; }
    DepthCache& cache() const { return *cache_; }

    /// Throws ValidationError for an action leaving the grid and
    /// EvaluationError("environment evaluation failed ...") for an unconverged depth.
    StepResult step(StateId s, std::size_t action) const;

private:
    DepthCache* cache_;
    RewardConfig rc_;
};

}  // namespace ldedq
