#include "ldedq/thermal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "ldedq/errors.hpp"
#include "ldedq/parallel.hpp"

namespace ldedq {

namespace {

// 10-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 10> kNodes = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
    -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
    0.8650633666889845,  0.9739065285171717};
constexpr std::array<double, 10> kWeights = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
    0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
    0.1494513491505806, 0.0666713443086881};

std::string describe(const char* path, const char* rule, double value) {
    std::ostringstream os;
    os << path << ": " << rule << " (got " << value << ")";
    return os.str();
}

void require(bool ok, const char* path, const char* rule, double value) {
    if (!ok || !std::isfinite(value)) throw ValidationError(describe(path, rule, value));
}

// Time integral of the moving Gaussian source after substituting u = sqrt(t - t').
// (t - t')^(-1/2) dt' becomes 2 du, so the integrand is bounded on [0, sqrt(t)].
struct Integrand {
    double two_a;
    double four_a;
    double sig2;
    double two_sig2;
    double x;
    double y2;
    double z2;
    double v;
    double t;

    double operator()(double u) const {
        const double tau = u * u;
        const double dx = x - v * (t - tau);
        double exponent = -(dx * dx + y2) / (four_a * tau + two_sig2);
        if (z2 > 0.0) {
            if (tau == 0.0) return 0.0;
            exponent -= z2 / (four_a * tau);
        }
        return 2.0 / (two_a * tau + sig2) * std::exp(exponent);
    }
};

double gauss10(const Integrand& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) sum += kWeights[i] * f(mid + half * kNodes[i]);
    return sum * half;
}

struct Panel {
    double lo;
    double hi;
    double whole;
    int level;
};

double integrate(const Integrand& f, double upper, const QuadratureOptions& opt) {
    std::vector<double> breaks;
    const int panels = std::max(1, opt.initial_panels);
    breaks.reserve(static_cast<std::size_t>(panels) + 2);
    for (int k = 0; k <= panels; ++k) breaks.push_back(upper * k / panels);
    // The lateral Gaussian peaks where the source passed the query point.
    if (f.v > 0.0) {
        const double lag = f.t - f.x / f.v;
        if (lag > 0.0 && lag < f.t) breaks.push_back(std::sqrt(lag));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<Panel> stack;
    double estimate = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double whole = gauss10(f, breaks[k], breaks[k + 1]);
        estimate += whole;
        stack.push_back({breaks[k], breaks[k + 1], whole, 0});
    }
    std::reverse(stack.begin(), stack.end());

    const double scale = std::abs(estimate) * opt.rel_tol / upper;
    double total = 0.0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.lo + p.hi);
        const double left = gauss10(f, p.lo, mid);
        const double right = gauss10(f, mid, p.hi);
        const double refined = left + right;
        if (std::abs(refined - p.whole) <= scale * (p.hi - p.lo) || p.level >= opt.max_level) {
            total += refined;
        } else {
            stack.push_back({mid, p.hi, right, p.level + 1});
            stack.push_back({p.lo, mid, left, p.level + 1});
        }
    }
    return total;
}

}  // namespace

MaterialEnv MaterialEnv::ss316l_nominal() {
    MaterialEnv env;
    env.sigma_l = 0.918e-3;
    env.absorptivity = 0.3;
    return env;
}

void MaterialEnv::validate(const char* path) const {
    const std::string p(path);
    auto key = [&](const char* name) { return p + "." + name; };
    require(t0_k > 0.0, key("t0_k").c_str(), "must be > 0", t0_k);
    require(t_liq_k > 0.0, key("t_liq_k").c_str(), "must be > 0", t_liq_k);
    require(t_liq_k > t0_k, key("t_liq_k").c_str(), "must exceed t0_k", t_liq_k);
    require(cp > 0.0, key("cp").c_str(), "must be > 0", cp);
    require(rho > 0.0, key("rho").c_str(), "must be > 0", rho);
    require(diffusivity > 0.0, key("diffusivity").c_str(), "must be > 0", diffusivity);
    require(sigma_l > 0.0, key("sigma_l_mm").c_str(), "must be > 0", sigma_l * 1e3);
    require(absorptivity > 0.0 && absorptivity <= 1.0, key("absorptivity").c_str(),
            "must be in (0, 1]", absorptivity);
}

void LaserQuery::validate() const {
    require(power_w >= 0.0, "power", "must be >= 0", power_w);
    require(speed_mps >= 0.0, "speed", "must be >= 0", speed_mps);
    require(t >= 0.0, "t", "must be >= 0", t);
    require(z >= 0.0, "z", "must be >= 0", z);
    require(true, "x", "must be finite", x);
    require(true, "y", "must be finite", y);
}

double unit_power_rise(const MaterialEnv& env, const LaserQuery& q, const QuadratureOptions& quad) {
    if (q.t == 0.0) return 0.0;
    using std::numbers::pi;
    const double a = env.diffusivity;
    const double sig2 = env.sigma_l * env.sigma_l;
    const Integrand f{2.0 * a, 4.0 * a, sig2, 2.0 * sig2, q.x, q.y * q.y, q.z * q.z, q.speed_mps, q.t};
    const double integral = integrate(f, std::sqrt(q.t), quad);
    const double prefactor = env.absorptivity / (pi * env.rho * env.cp * std::sqrt(4.0 * pi * a));
    const double rise = prefactor * integral;
    if (!std::isfinite(rise)) {
        throw EvaluationError("quadrature divergence: non-finite temperature integral");
    }
    return rise;
}

double temperature(const MaterialEnv& env, const LaserQuery& q, const QuadratureOptions& quad) {
    q.validate();
    if (q.t == 0.0) return env.t0_k;
    const double result = env.t0_k + q.power_w * unit_power_rise(env, q, quad);
    if (!std::isfinite(result)) throw EvaluationError("quadrature divergence: non-finite temperature");
    return result;
}

std::pair<double, double> depth_at_time(const MaterialEnv& env, double power_w, double speed_mps,
                                        double t_s, const DepthOptions& opts) {
    const double sigma = env.sigma_l;
    const double x_laser = speed_mps * t_s;
    const double x_lo = x_laser - opts.window_behind_sigma * sigma;
    const double x_hi = x_laser + opts.window_ahead_sigma * sigma;
    const double z_max = opts.z_max_mm * 1e-3;
    const double z_tol = opts.z_tol_mm * 1e-3;
    const int samples = std::max(2, opts.x_samples);

    auto melted = [&](double x, double z) {
        const LaserQuery q{power_w, speed_mps, x, 0.0, z, t_s};
        return temperature(env, q, opts.quad) >= env.t_liq_k;
    };

    double best = 0.0;
    double best_x = 0.0;
    bool any = false;
    for (int k = 0; k < samples; ++k) {
        const double x = x_lo + (x_hi - x_lo) * k / (samples - 1);
        if (!melted(x, 0.0)) continue;
        // A deeper root requires the current best depth to be molten at this x.
        double lo = any ? best : 0.0;
        if (any && !melted(x, lo)) continue;
        double hi = z_max;
        double root;
        if (melted(x, hi)) {
            root = z_max;
        } else {
            while (hi - lo > z_tol) {
                const double mid = 0.5 * (lo + hi);
                if (melted(x, mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            root = 0.5 * (lo + hi);
        }
        if (!any || root > best) {
            best = root;
            best_x = x;
            any = true;
        }
    }
    return {best * 1e3, best_x};
}

DepthResult melt_pool_depth(const MaterialEnv& env, double power_w, double speed_mps,
                            const DepthOptions& opts) {
    require(power_w >= 0.0, "power", "must be >= 0", power_w);
    require(speed_mps > 0.0, "speed", "must be > 0", speed_mps);

    double t = opts.t_start_s;
    auto [depth, x_at] = depth_at_time(env, power_w, speed_mps, t, opts);
    for (int ext = 0; ext < opts.max_extensions; ++ext) {
        const double t_next = t * opts.t_growth;
        const auto [next_depth, next_x] = depth_at_time(env, power_w, speed_mps, t_next, opts);
        const bool steady = std::abs(next_depth - depth) < opts.steady_tol_mm;
        t = t_next;
        depth = next_depth;
        x_at = next_x;
        if (steady) return {depth, true, t, x_at};
    }
    return {depth, false, t, x_at};
}

std::vector<DepthResult> batch_depths(const MaterialEnv& env, std::span<const ProcessPoint> queries,
                                      const DepthOptions& opts, int jobs) {
    std::vector<DepthResult> results(queries.size());
    std::vector<std::exception_ptr> errors(queries.size());
    parallel_for(queries.size(), jobs, [&](std::size_t i) {
        try {
            results[i] = melt_pool_depth(env, queries[i].power_w, queries[i].speed_mps, opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        std::ostringstream where;
        where << "query " << i << " (P=" << queries[i].power_w
              << " W, v=" << mps_to_mmpm(queries[i].speed_mps) << " mm/min): ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ValidationError& e) {
            throw ValidationError(where.str() + e.what());
        } catch (const std::exception& e) {
            throw EvaluationError(where.str() + e.what());
        }
    }
    return results;
}

}  // namespace ldedq
