#include "ldedq/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ldedq/errors.hpp"

namespace ldedq {

namespace {

[[noreturn]] void invalid(const std::string& key, const char* rule, double value) {
    std::ostringstream os;
    os << key << ": " << rule << " (got " << value << ")";
    throw ValidationError(os.str());
}

}  // namespace

void Hyperparams::validate(const char* path) const {
    const std::string p(path);
    if (!(alpha > 0.0 && alpha <= 1.0)) invalid(p + ".alpha", "must be in (0, 1]", alpha);
    if (!(gamma >= 0.0 && gamma <= 1.0)) invalid(p + ".gamma", "must be in [0, 1]", gamma);
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) invalid(p + ".epsilon", "must be in [0, 1]", epsilon);
    if (episodes < 1) invalid(p + ".episodes", "must be >= 1", episodes);
    if (n_epochs < 1) invalid(p + ".n_epochs", "must be >= 1", n_epochs);
}

double max_valid_q(const QTable& q, const StateGrid& g, StateId s) {
    const auto row = q.row(s.flat(g));
    double best = -std::numeric_limits<double>::infinity();
    for (const std::size_t k : valid_actions(g, s)) best = std::max(best, row[k]);
    return best;
}

double q_update(QTable& q, const StateGrid& g, StateId s, std::size_t action, double r,
                StateId next, const Hyperparams& hp) {
    double& entry = q.at(s.flat(g), action);
    const double target = r + hp.gamma * max_valid_q(q, g, next);
    // Same as entry + alpha * (target - entry), but exact at alpha = 1.
    const double updated = (1.0 - hp.alpha) * entry + hp.alpha * target;
    if (!std::isfinite(updated)) {
        std::ostringstream os;
        os << "q_update produced a non-finite value at state " << s.flat(g) << ", action " << action;
        throw EvaluationError(os.str());
    }
    entry = updated;
    return updated;
}

std::size_t select_action(const QTable& q, const StateGrid& g, StateId s, double epsilon, Rng& rng) {
    const auto valid = valid_actions(g, s);
    if (rng.uniform01() < epsilon) return valid[rng.below(valid.size())];

    const auto row = q.row(s.flat(g));
    double best = -std::numeric_limits<double>::infinity();
    for (const std::size_t k : valid) best = std::max(best, row[k]);
    std::vector<std::size_t> tied;
    for (const std::size_t k : valid) {
        if (row[k] == best) tied.push_back(k);
    }
    return tied.size() == 1 ? tied.front() : tied[rng.below(tied.size())];
}

EpisodeTrace run_episode(const Environment& env, QTable& q, const Hyperparams& hp, Rng& rng) {
    const StateGrid& g = env.grid();
    EpisodeTrace trace;
    StateId s = StateId::from_flat(g, rng.below(g.state_count()));
    trace.start = s;
    trace.epochs.reserve(static_cast<std::size_t>(hp.n_epochs));

    // Termination is judged on the successor state, so every episode has at least one epoch.
    for (int epoch = 0; epoch < hp.n_epochs; ++epoch) {
        const std::size_t a = select_action(q, g, s, hp.epsilon, rng);
        const StepResult step = env.step(s, a);
        q_update(q, g, s, a, step.reward, step.next, hp);
        trace.epochs.push_back({s, a, step.reward, step.next, step.error_mm, step.depth_mm});
        trace.total_reward += step.reward;
        s = step.next;
        if (step.terminal) {
            trace.terminated_early = true;
            break;
        }
    }
    return trace;
}

BestPair best_pair(const QTable& q, const StateGrid& g) {
    BestPair best{{0, 0}, 0, {0, 0}, -std::numeric_limits<double>::infinity()};
    for (std::size_t id = 0; id < g.state_count(); ++id) {
        const StateId s = StateId::from_flat(g, id);
        for (const std::size_t k : valid_actions(g, s)) {
            if (q.at(id, k) > best.value) {
                best = {s, k, {s.i + kActions[k].di, s.j + kActions[k].dj}, q.at(id, k)};
            }
        }
    }
    return best;
}

std::vector<double> arrival_values(const QTable& q, const StateGrid& g) {
    std::vector<double> out(g.state_count(), -std::numeric_limits<double>::infinity());
    for (std::size_t id = 0; id < g.state_count(); ++id) {
        const StateId s = StateId::from_flat(g, id);
        for (const std::size_t k : valid_actions(g, s)) {
            const StateId t{s.i + kActions[k].di, s.j + kActions[k].dj};
            double& slot = out[t.flat(g)];
            slot = std::max(slot, q.at(id, k));
        }
    }
    return out;
}

std::vector<double> row_max_values(const QTable& q, const StateGrid& g) {
    std::vector<double> out(g.state_count());
    for (std::size_t id = 0; id < g.state_count(); ++id) out[id] = max_valid_q(q, g, StateId::from_flat(g, id));
    return out;
}

RunResult train(const Environment& env, const Hyperparams& hp) {
    hp.validate();
    const StateGrid& g = env.grid();
    RunResult result;
    result.grid = g;
    result.seed = hp.seed;
    result.q = QTable(g.state_count());
    result.episodes.reserve(static_cast<std::size_t>(hp.episodes));

    for (int e = 0; e < hp.episodes; ++e) {
        Rng rng(hp.seed, static_cast<std::uint64_t>(e));
        try {
            result.episodes.push_back(run_episode(env, result.q, hp, rng));
        } catch (const EvaluationError& err) {
            throw EvaluationError("episode " + std::to_string(e) + ": " + err.what());
        }
    }

    const BestPair best = best_pair(result.q, g);
    result.best_state = best.target;
    result.best_origin = best.origin;
    result.best_action = best.action;
    result.best_q = best.value;
    const ProcessParams p = state_params(g, result.best_state);
    result.best_power_w = p.power_w;
    result.best_speed_mmpm = p.speed_mmpm;
    result.best_depth_mm = env.cache().get(result.best_state).depth_mm;
    return result;
}

void replay(QTable& q, const StateGrid& g, std::span<const EpisodeTrace> episodes,
            const Hyperparams& hp, double reward_scale) {
    for (const EpisodeTrace& ep : episodes) {
        for (const EpochRecord& rec : ep.epochs) {
            q_update(q, g, rec.state, rec.action, reward_scale * rec.reward, rec.next, hp);
        }
    }
}

}  // namespace ldedq
