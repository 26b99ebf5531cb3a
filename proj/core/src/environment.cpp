#include "ldedq/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldedq/errors.hpp"

namespace ldedq {

namespace {

template <typename T>
[[noreturn]] void fail(const std::string& path, const char* rule, T value) {
    std::ostringstream os;
    os << path << ": " << rule << " (got " << value << ")";
    throw ValidationError(os.str());
}

void require_finite(const std::string& path, double value) {
    if (!std::isfinite(value)) fail(path, "must be finite", value);
}

}  // namespace

void StateGrid::validate(const char* path) const {
    const std::string p(path);
    if (n < 2) fail(p + ".n", "must be >= 2", n);
    require_finite(p + ".p_min_w", p_min_w);
    require_finite(p + ".p_max_w", p_max_w);
    require_finite(p + ".v_min_mmpm", v_min_mmpm);
    require_finite(p + ".v_max_mmpm", v_max_mmpm);
    if (p_min_w < 0.0) fail(p + ".p_min_w", "must be >= 0", p_min_w);
    if (!(p_min_w < p_max_w)) fail(p + ".p_max_w", "must exceed p_min_w", p_max_w);
    if (!(v_min_mmpm > 0.0)) fail(p + ".v_min_mmpm", "must be > 0", v_min_mmpm);
    if (!(v_min_mmpm < v_max_mmpm)) fail(p + ".v_max_mmpm", "must exceed v_min_mmpm", v_max_mmpm);
}

bool contains(const StateGrid& g, StateId s) {
    return s.i >= 0 && s.j >= 0 && s.i < g.n && s.j < g.n;
}

std::string action_label(std::size_t k) {
    const Action a = kActions.at(k);
    auto sign = [](int d) { return d > 0 ? std::string("+1") : d < 0 ? std::string("-1") : std::string("0"); };
    return "(" + sign(a.di) + "," + sign(a.dj) + ")";
}

ProcessParams state_params(const StateGrid& g, StateId s) {
    if (!contains(g, s)) {
        std::ostringstream os;
        os << "state (" << s.i << "," << s.j << ") outside " << g.n << "x" << g.n << " grid";
        throw ValidationError(os.str());
    }
    const double steps = g.n - 1;
    return {g.p_min_w + s.i * (g.p_max_w - g.p_min_w) / steps,
            g.v_min_mmpm + s.j * (g.v_max_mmpm - g.v_min_mmpm) / steps};
}

std::vector<std::size_t> valid_actions(const StateGrid& g, StateId s) {
    std::vector<std::size_t> out;
    out.reserve(kActionCount);
    for (std::size_t k = 0; k < kActionCount; ++k) {
        if (contains(g, {s.i + kActions[k].di, s.j + kActions[k].dj})) out.push_back(k);
    }
    return out;
}

std::string_view to_string(RewardVariant v) {
    switch (v) {
        case RewardVariant::paper: return "paper";
        case RewardVariant::inverse_error: return "inverse_error";
    }
    return "unknown";
}

RewardVariant parse_reward_variant(std::string_view name) {
    if (name == "paper") return RewardVariant::paper;
    if (name == "inverse_error") return RewardVariant::inverse_error;
    throw ValidationError("reward.variant: expected paper or inverse_error (got " + std::string(name) + ")");
}

void RewardConfig::validate(const char* path) const {
    const std::string p(path);
    require_finite(p + ".delta_opt_mm", delta_opt_mm);
    require_finite(p + ".tol_r_mm", tol_r_mm);
    require_finite(p + ".tol_delta_mm", tol_delta_mm);
    require_finite(p + ".denom_floor_mm", denom_floor_mm);
    if (!(delta_opt_mm > 0.0)) fail(p + ".delta_opt_mm", "must be > 0", delta_opt_mm);
    if (!(tol_r_mm > 0.0)) fail(p + ".tol_r_mm", "must be > 0", tol_r_mm);
    if (!(tol_delta_mm > 0.0)) fail(p + ".tol_delta_mm", "must be > 0", tol_delta_mm);
    if (!(denom_floor_mm > 0.0)) fail(p + ".denom_floor_mm", "must be > 0", denom_floor_mm);
    if (tol_delta_mm > tol_r_mm) fail(p + ".tol_delta_mm", "must not exceed tol_r_mm", tol_delta_mm);
}

double reward(const RewardConfig& rc, double err) {
    if (rc.variant == RewardVariant::inverse_error) {
        if (err < rc.tol_r_mm) return 1.0 / std::max(err, rc.denom_floor_mm);
        return -err;
    }
    const double gap = std::abs(rc.delta_opt_mm - err);
    if (err < rc.tol_r_mm) return 1.0 / std::max(gap, rc.denom_floor_mm);
    return -gap;
}

DepthCache::DepthCache(StateGrid grid, MaterialEnv env, DepthOptions opts)
    : grid_(grid), env_(env), opts_(opts) {
    grid_.validate();
    env_.validate();
    entries_.resize(grid_.state_count());
}

const DepthResult& DepthCache::get(StateId s) {
    const std::size_t id = s.flat(grid_);
    const ProcessParams p = state_params(grid_, s);
    {
        std::lock_guard lock(mutex_);
        if (entries_[id]) return *entries_[id];
    }
    const DepthResult computed = melt_pool_depth(env_, p.power_w, mmpm_to_mps(p.speed_mmpm), opts_);
    evaluations_.fetch_add(1);
    std::lock_guard lock(mutex_);
    if (!entries_[id]) entries_[id] = computed;
    return *entries_[id];
}

void DepthCache::warm_up(int jobs) {
    std::vector<ProcessPoint> missing;
    std::vector<std::size_t> ids;
    {
        std::lock_guard lock(mutex_);
        for (std::size_t id = 0; id < entries_.size(); ++id) {
            if (entries_[id]) continue;
            const ProcessParams p = state_params(grid_, StateId::from_flat(grid_, id));
            missing.push_back({p.power_w, mmpm_to_mps(p.speed_mmpm)});
            ids.push_back(id);
        }
    }
    if (missing.empty()) return;
    const auto results = batch_depths(env_, missing, opts_, jobs);
    evaluations_.fetch_add(results.size());
    std::lock_guard lock(mutex_);
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!entries_[ids[k]]) entries_[ids[k]] = results[k];
    }
}

std::size_t DepthCache::size() const {
    std::lock_guard lock(mutex_);
    std::size_t filled = 0;
    for (const auto& e : entries_) filled += e.has_value() ? 1 : 0;
    return filled;
}

Environment::Environment(DepthCache& cache, RewardConfig rc) : cache_(&cache), rc_(rc) {
    rc_.validate();
}

StepResult Environment::step(StateId s, std::size_t action) const {
    const StateGrid& g = grid();
    if (!contains(g, s) || action >= kActionCount) {
        throw ValidationError("step: state or action index out of range");
    }
    const StateId next{s.i + kActions[action].di, s.j + kActions[action].dj};
    if (!contains(g, next)) {
        std::ostringstream os;
        os << "step: action " << action_label(action) << " leaves the grid from (" << s.i << "," << s.j << ")";
        throw ValidationError(os.str());
    }
    const DepthResult& d = cache_->get(next);
    if (!d.converged) {
        std::ostringstream os;
        os << "environment evaluation failed: depth at (" << next.i << "," << next.j
           << ") not steady after t = " << d.t_used_s << " s";
        throw EvaluationError(os.str());
    }
    const double err = std::abs(d.depth_mm - rc_.delta_opt_mm);
    return {next, d.depth_mm, err, reward(rc_, err), err <= rc_.tol_delta_mm};
}

}  // namespace ldedq
