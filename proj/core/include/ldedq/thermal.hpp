#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ldedq {

/**
 * Thermophysical constants of the substrate and the laser source, SI units.
 *
 * The defaults describe SS316L. Absorptivity and the Gaussian distribution
 * parameter are the calibrated pair (see README, "Thermal model calibration");
 * `ss316l_nominal()` keeps the tabulated absorptivity of 0.3 and a 0.918 mm
 * distribution parameter, which never reaches the liquidus in this model.
 */
struct MaterialEnv {
    double t0_k = 300.0;           ///< ambient / initial substrate temperature
    double t_liq_k = 1700.0;       ///< liquidus, the melt-pool boundary
    double cp = 680.0;             ///< heat capacity, J/(kg K)
    double rho = 7400.0;           ///< density, kg/m^3
    double diffusivity = 7.1542e-6;  ///< thermal diffusivity, m^2/s
    double sigma_l = 0.459e-3;     ///< Gaussian distribution parameter, m
    double absorptivity = 0.73;    ///< fraction of laser power absorbed

    static MaterialEnv ss316l_calibrated() { return {}; }
    static MaterialEnv ss316l_nominal();

    /// Throws ValidationError naming the offending field (prefixed by `path`).
    void validate(const char* path = "material") const;

    bool operator==(const MaterialEnv&) const = default;
};

/// A single evaluation point of the temperature field.
struct LaserQuery {
    double power_w = 0.0;
    double speed_mps = 0.0;
    double x = 0.0;  ///< along the scan direction, m; laser starts at x = 0
    double y = 0.0;
    double z = 0.0;  ///< depth below the surface, m
    double t = 0.0;  ///< elapsed time since the laser switched on, s

    void validate() const;
};

struct QuadratureOptions {
    /// Uniform panels in u = sqrt(t - t') before adaptive refinement.
    int initial_panels = 16;
    /// Target relative error of the time integral.
    double rel_tol = 1e-9;
    int max_level = 30;
};

/// Eagar-Tsai temperature (K) of a Gaussian source moving along +x.
/// Throws EvaluationError("quadrature divergence ...") on non-finite intermediates.
double temperature(const MaterialEnv& env, const LaserQuery& q,
                   const QuadratureOptions& quad = {});

/// Temperature rise per watt of laser power at the query geometry (K/W).
/// temperature() == t0 + power * unit_power_rise().
double unit_power_rise(const MaterialEnv& env, const LaserQuery& q,
                       const QuadratureOptions& quad = {});

struct DepthOptions {
    double t_start_s = 2.0;
    double t_growth = 1.5;
    int max_extensions = 4;
    double steady_tol_mm = 1e-3;
    int x_samples = 64;
    double window_behind_sigma = 5.0;
    double window_ahead_sigma = 2.0;
    double z_max_mm = 5.0;
    double z_tol_mm = 1e-4;
    QuadratureOptions quad{};
};

struct DepthResult {
    double depth_mm = 0.0;
    bool converged = false;
    double t_used_s = 0.0;
    /// Scan-line position (m) where the deepest liquidus point was found; 0 when depth is 0.
    double x_at_max = 0.0;

    bool operator==(const DepthResult&) const = default;
};

/// Depth (mm) of the liquidus isotherm below the scan line at a fixed time.
/// Returns {depth_mm, x_at_max}.
std::pair<double, double> depth_at_time(const MaterialEnv& env, double power_w,
                                        double speed_mps, double t_s,
                                        const DepthOptions& opts = {});

/// Steady-state melt-pool depth. Speed in m/s.
DepthResult melt_pool_depth(const MaterialEnv& env, double power_w, double speed_mps,
                            const DepthOptions& opts = {});

struct ProcessPoint {
    double power_w = 0.0;
    double speed_mps = 0.0;
};

/// Element-wise melt_pool_depth; `jobs` <= 0 means hardware concurrency.
/// Errors are rethrown as EvaluationError carrying the failing query index.
std::vector<DepthResult> batch_depths(const MaterialEnv& env,
                                      std::span<const ProcessPoint> queries,
                                      const DepthOptions& opts = {}, int jobs = 1);

inline double mmpm_to_mps(double mm_per_min) { return mm_per_min / 60000.0; }
inline double mps_to_mmpm(double m_per_s) { return m_per_s * 60000.0; }

}  // namespace ldedq
