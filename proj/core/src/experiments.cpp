#include "ldedq/experiments.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "ldedq/errors.hpp"
#include "ldedq/parallel.hpp"
#include "ldedq/rng.hpp"

namespace ldedq {

std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::n: return "n";
        case SweepParam::epsilon: return "epsilon";
        case SweepParam::gamma: return "gamma";
        case SweepParam::alpha: return "alpha";
        case SweepParam::episodes: return "episodes";
    }
    return "unknown";
}

SweepParam parse_sweep_param(std::string_view name) {
    for (const SweepParam p : {SweepParam::n, SweepParam::epsilon, SweepParam::gamma, SweepParam::alpha,
                               SweepParam::episodes}) {
        if (name == to_string(p)) return p;
    }
    throw ValidationError("unknown sweep parameter '" + std::string(name) +
                          "'; valid names: n, epsilon, gamma, alpha, episodes");
}

std::vector<double> default_sweep_values(SweepParam p) {
    switch (p) {
        case SweepParam::n: return {5, 10, 15, 20};
        case SweepParam::epsilon:
        case SweepParam::gamma:
        case SweepParam::alpha: return {0.25, 0.5, 0.75, 1.0};
        case SweepParam::episodes: return {10, 25, 50, 75, 100, 200};
    }
    return {};
}

void SweepSpec::validate(const char* path) const {
    const std::string p(path);
    if (values.empty()) throw ValidationError(p + ".values: must not be empty");
    if (replicates < 1) throw ValidationError(p + ".replicates: must be >= 1 (got " + std::to_string(replicates) + ")");
    for (const double v : values) {
        const bool integral = v == std::floor(v);
        const bool ok = [&] {
            switch (param) {
                case SweepParam::n: return integral && v >= 2;
                case SweepParam::episodes: return integral && v >= 1;
                case SweepParam::alpha: return v > 0.0 && v <= 1.0;
                case SweepParam::epsilon:
                case SweepParam::gamma: return v >= 0.0 && v <= 1.0;
            }
            return false;
        }();
        if (!ok) {
            std::ostringstream os;
            os << p << ".values: " << v << " is not a valid " << to_string(param);
            throw ValidationError(os.str());
        }
    }
}

ConvergenceCurve aggregate_convergence(std::span<const std::vector<EpisodeTrace>> replicates) {
    ConvergenceCurve curve;
    curve.replicates = replicates.size();
    if (replicates.empty()) return curve;
    const std::size_t episodes = replicates.front().size();
    for (const auto& r : replicates) {
        if (r.size() != episodes) {
            throw ValidationError("aggregate_convergence: replicates have different episode counts");
        }
    }
    curve.mean.assign(episodes, 0.0);
    curve.stddev.assign(episodes, 0.0);
    const double count = static_cast<double>(replicates.size());
    for (std::size_t e = 0; e < episodes; ++e) {
        double sum = 0.0;
        for (const auto& r : replicates) sum += r[e].total_reward;
        const double mean = sum / count;
        double ss = 0.0;
        for (const auto& r : replicates) {
            const double d = r[e].total_reward - mean;
            ss += d * d;
        }
        curve.mean[e] = mean;
        curve.stddev[e] = std::sqrt(ss / count);
    }
    return curve;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
    return derive_seed(base_seed, static_cast<std::uint64_t>(replicate));
}

ExperimentBase apply_sweep_value(const ExperimentBase& base, SweepParam p, double value) {
    ExperimentBase out = base;
    switch (p) {
        case SweepParam::n: out.grid.n = static_cast<int>(value); break;
        case SweepParam::epsilon: out.hp.epsilon = value; break;
        case SweepParam::gamma: out.hp.gamma = value; break;
        case SweepParam::alpha: out.hp.alpha = value; break;
        case SweepParam::episodes: out.hp.episodes = static_cast<int>(value); break;
    }
    return out;
}

SweepResult run_sweep(const ExperimentBase& base, const SweepSpec& spec, int jobs) {
    spec.validate();
    SweepResult result{base, spec, {}};

    // One depth cache per distinct grid; only an n sweep needs more than one.
    std::map<int, std::unique_ptr<DepthCache>> caches;
    std::vector<ExperimentBase> configs;
    for (const double value : spec.values) {
        ExperimentBase cfg = apply_sweep_value(base, spec.param, value);
        cfg.hp.validate();
        auto& cache = caches[cfg.grid.n];
        if (!cache) {
            cache = std::make_unique<DepthCache>(cfg.grid, cfg.material, cfg.depth);
            cache->warm_up(jobs);
        }
        configs.push_back(cfg);
    }

    std::vector<Environment> envs;
    envs.reserve(configs.size());
    for (const ExperimentBase& cfg : configs) envs.emplace_back(*caches.at(cfg.grid.n), cfg.reward);

    const auto reps = static_cast<std::size_t>(spec.replicates);
    std::vector<RunResult> runs(configs.size() * reps);
    std::vector<std::exception_ptr> errors(runs.size());
    parallel_for(runs.size(), jobs, [&](std::size_t task) {
        const std::size_t point = task / reps;
        const int rep = static_cast<int>(task % reps);
        Hyperparams hp = configs[point].hp;
        hp.seed = replicate_seed(spec.base_seed, rep);
        try {
            runs[task] = train(envs[point], hp);
        } catch (...) {
            errors[task] = std::current_exception();
        }
    });
    for (std::size_t task = 0; task < errors.size(); ++task) {
        if (!errors[task]) continue;
        std::ostringstream where;
        where << "sweep " << to_string(spec.param) << " = " << spec.values[task / reps] << ", replicate "
              << task % reps << ": ";
        try {
            std::rethrow_exception(errors[task]);
        } catch (const ValidationError& e) {
            throw ValidationError(where.str() + e.what());
        } catch (const std::exception& e) {
            throw EvaluationError(where.str() + e.what());
        }
    }

    for (std::size_t point = 0; point < configs.size(); ++point) {
        SweepPoint sp;
        sp.value = spec.values[point];
        sp.grid = configs[point].grid;
        sp.hp = configs[point].hp;
        DepthCache& cache = *caches.at(sp.grid.n);
        sp.oracle = brute_force_rank(cache, configs[point].reward.delta_opt_mm, configs[point].reward.tol_r_mm, jobs);

        std::vector<std::vector<EpisodeTrace>> traces;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            RunResult& run = runs[point * reps + rep];
            const RunVerdict verdict = validate_run(sp.oracle, run);
            sp.summary.push_back({sp.value, static_cast<int>(rep), run.seed, run.best_power_w, run.best_speed_mmpm,
                                  run.best_depth_mm, verdict.rank});
            traces.push_back(run.episodes);
            sp.runs.push_back(std::move(run));
        }
        sp.curve = aggregate_convergence(traces);
        result.points.push_back(std::move(sp));
    }
    return result;
}

SlopeTest regression_slope(std::span<const double> ys) {
    SlopeTest out;
    const std::size_t n = ys.size();
    if (n < 3) return out;
    const double count = static_cast<double>(n);
    const double x_mean = (count - 1.0) / 2.0;
    double y_mean = 0.0;
    for (const double y : ys) y_mean += y;
    y_mean /= count;

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - x_mean;
        sxx += dx * dx;
        sxy += dx * (ys[i] - y_mean);
    }
    out.slope = sxy / sxx;
    const double intercept = y_mean - out.slope * x_mean;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - intercept - out.slope * static_cast<double>(i);
        sse += r * r;
    }
    const double df = count - 2.0;
    out.std_error = std::sqrt(sse / df / sxx);
    if (out.std_error == 0.0) {
        out.t_stat = out.slope > 0.0 ? INFINITY : out.slope < 0.0 ? -INFINITY : 0.0;
        out.p_positive = out.slope > 0.0 ? 0.0 : 1.0;
        return out;
    }
    out.t_stat = out.slope / out.std_error;
    const boost::math::students_t dist(df);
    out.p_positive = boost::math::cdf(boost::math::complement(dist, out.t_stat));
    return out;
}

}  // namespace ldedq
