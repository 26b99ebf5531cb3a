#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ldedq/environment.hpp"
#include "ldedq/rng.hpp"

namespace ldedq {

/// n^2 x 8 table of action values; row = flat state id, column = index into kActions.
class QTable {
public:
    QTable() = default;
    explicit QTable(std::size_t states) : states_(states), values_(states * kActionCount, 0.0) {}

    std::size_t rows() const { return states_; }
    static constexpr std::size_t cols() { return kActionCount; }

    double& at(std::size_t state, std::size_t action) { return values_[state * kActionCount + action]; }
    double at(std::size_t state, std::size_t action) const { return values_[state * kActionCount + action]; }
    std::span<const double> row(std::size_t state) const {
        return {values_.data() + state * kActionCount, kActionCount};
    }
    std::span<const double> values() const { return values_; }

    bool operator==(const QTable&) const = default;

private:
    std::size_t states_ = 0;
    std::vector<double> values_;
};

struct Hyperparams {
    double alpha = 0.25;
    double gamma = 0.25;
    double epsilon = 0.25;
    int episodes = 100;
    int n_epochs = 50;
    std::uint64_t seed = 42;

    void validate(const char* path = "qlearn") const;
    bool operator==(const Hyperparams&) const = default;
};

struct EpochRecord {
    StateId state;
    std::size_t action;
    double reward;
    StateId next;
    double error_mm;  ///< |depth(next) - delta_opt|
    double depth_mm;  ///< depth(next)
};

struct EpisodeTrace {
    StateId start;
    std::vector<EpochRecord> epochs;
    double total_reward = 0.0;
    bool terminated_early = false;  ///< reached a terminal state before the epoch cap

    std::size_t epoch_count() const { return epochs.size(); }
};

struct RunResult {
    StateGrid grid;
    QTable q;
    std::vector<EpisodeTrace> episodes;
    /// State reached by the highest-valued (state, action) pair.
    StateId best_state;
    /// Row holding that pair.
    StateId best_origin;
    std::size_t best_action = 0;
    double best_q = 0.0;
    double best_power_w = 0.0;
    double best_speed_mmpm = 0.0;
    double best_depth_mm = 0.0;
    std::uint64_t seed = 0;
};

/// Largest Q over the actions that stay on the grid.
double max_valid_q(const QTable& q, const StateGrid& g, StateId s);

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); returns the new value.
/// Evaluated as (1 - alpha) Q + alpha * target so that alpha = 1 stores the target exactly.
double q_update(QTable& q, const StateGrid& g, StateId s, std::size_t action, double r,
                StateId next, const Hyperparams& hp);

/// Epsilon-greedy over valid actions. Greedy ties are broken uniformly at random.
/// Always consumes one uniform draw for the explore/exploit decision.
std::size_t select_action(const QTable& q, const StateGrid& g, StateId s, double epsilon, Rng& rng);

/// One episode from a uniformly drawn start state until a terminal state or the epoch cap.
EpisodeTrace run_episode(const Environment& env, QTable& q, const Hyperparams& hp, Rng& rng);

struct BestPair {
    StateId origin;
    std::size_t action;
    StateId target;
    double value;
};

/// Highest Q over all valid (state, action) pairs; ties go to the lowest flat id, then action index.
BestPair best_pair(const QTable& q, const StateGrid& g);

/// Per-state value map: for each state, the largest Q of any pair whose action leads into it.
/// This is the P-v map a trained table is read through; best_pair().target is its argmax.
std::vector<double> arrival_values(const QTable& q, const StateGrid& g);

/// Row-wise view: for each state, max over its valid actions.
std::vector<double> row_max_values(const QTable& q, const StateGrid& g);

/// Runs hp.episodes episodes on one table; episode e draws from Rng(hp.seed, e).
RunResult train(const Environment& env, const Hyperparams& hp);

/// Re-applies the recorded transitions to `q` with every reward multiplied by `reward_scale`.
void replay(QTable& q, const StateGrid& g, std::span<const EpisodeTrace> episodes,
            const Hyperparams& hp, double reward_scale = 1.0);

}  // namespace ldedq
