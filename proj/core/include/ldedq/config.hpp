#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ldedq/environment.hpp"
#include "ldedq/experiments.hpp"
#include "ldedq/qlearn.hpp"
#include "ldedq/thermal.hpp"

namespace ldedq {

/**
 * Complete run description, read from an INI file with one section per module:
 *
 *   [material]  t0_k t_liq_k cp rho diffusivity sigma_l_mm absorptivity
 *   [grid]      n p_min_w p_max_w v_min_mmpm v_max_mmpm
 *   [reward]    delta_opt_mm tol_r_mm tol_delta_mm denom_floor_mm variant
 *   [qlearn]    alpha gamma epsilon episodes n_epochs seed
 *   [sweep]     param values replicates base_seed      (optional)
 *   [output]    dir
 *
 * Missing keys keep their defaults; unknown sections or keys are rejected.
 */
struct RunConfig {
    MaterialEnv material;
    StateGrid grid;
    RewardConfig reward;
    Hyperparams qlearn;
    std::optional<SweepSpec> sweep;
    std::string output_dir = "out";

    /// Throws ValidationError with a key path such as "grid.n: must be >= 2 (got 1)".
    void validate() const;
    ExperimentBase experiment() const;
};

/// Environment variable consulted when --config is not given.
inline constexpr const char* kConfigEnvVar = "LDEDQ_CONFIG";

/// Parse errors carry "<origin>(<line>)"; value errors carry the key path.
RunConfig parse_config(std::string_view text, std::string_view origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// INI text that parse_config() reads back to an identical RunConfig.
std::string to_ini(const RunConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace ldedq
