#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "edgeoffload/types.hpp"

namespace edgeoffload {

/// Parameters of the two-criteria rewarding scheme. `gamma`/`delta` shape the
/// shared smoothing sigmoid; the optional per-criterion values override the
/// shared pair for one criterion only.
struct RewardConfig {
    double r1{1.0};                  // base demand reward
    double r2{2.0};                  // base load reward
    double t_di{0.5};                // demand threshold T_DI, in [0, 1]
    double t_lambda{1.0};            // load threshold T_lambda, > 0
    double gamma{10.0};              // shared sigmoid steepness
    double delta{0.0};               // shared sigmoid offset
    std::optional<double> gamma_demand;
    std::optional<double> delta_demand;
    std::optional<double> gamma_load;
    std::optional<double> delta_load;
    std::size_t q_max{1};            // maximum queue size
    double activation_fraction{0.8}; // load criterion active above this queue occupancy

    double demand_gamma() const { return gamma_demand.value_or(gamma); }
    double demand_delta() const { return delta_demand.value_or(delta); }
    double load_gamma() const { return gamma_load.value_or(gamma); }
    double load_delta() const { return delta_load.value_or(delta); }

    void validate() const;
};

/// Scoring outcome for one task. `load_reward` is absent while the load
/// criterion is inactive (queue occupancy at or below the activation
/// fraction); `od` sums the active rewards.
struct TaskScore {
    TaskId id{0};
    double di_final{0.0};
    double load{0.0};
    double demand_reward{0.0};
    std::optional<double> load_reward;
    double od{0.0};
};

struct Ranking {
    std::vector<TaskScore> ranked;   // by od descending (ties: lambda ascending, id descending)
    std::vector<TaskId> offload;     // the last k of `ranked`, i.e. the lowest ODs
};

/// Smoothing factor 1 / (1 + e^-(gamma*y - delta)), strictly inside (0, 1).
double sigmoid_factor(double y, double gamma, double delta);

/// Demand criterion: sign +1 iff di_final >= T_DI, magnitude
/// r1 * sigmoid_factor(di_final - T_DI).
double demand_reward(double di_final, const RewardConfig& cfg);

/// Load criterion: inactive (nullopt) while queue_len <= activation_fraction
/// * q_max; otherwise sign +1 iff lambda <= T_lambda, magnitude
/// r2 * sigmoid_factor(T_lambda - lambda).
std::optional<double> load_reward(double lambda, std::size_t queue_len, const RewardConfig& cfg);

/// Both criteria combined into the task's offloading degree.
TaskScore offloading_degree(TaskId id, double di_final, double lambda, std::size_t queue_len,
                            const RewardConfig& cfg);

/// Sorts by od descending and selects the last k (lowest ODs) for offload.
/// Ties are broken so that higher lambda enters the offload set first, then
/// ascending task id; the resulting order is total, so the selection is
/// invariant under permutation of the input. Throws ValidationError when
/// k exceeds the number of scores.
Ranking rank_and_select(std::vector<TaskScore> scores, std::size_t k);

}  // namespace edgeoffload
