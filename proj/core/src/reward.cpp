#include "edgeoffload/reward.hpp"

#include <algorithm>
#include <cmath>

#include "edgeoffload/errors.hpp"

namespace edgeoffload {

void RewardConfig::validate() const {
    if (!(r1 > 0.0) || !(r2 > 0.0)) {
        throw ValidationError("base rewards must be positive");
    }
    if (!(t_di >= 0.0 && t_di <= 1.0)) {
        throw ValidationError("T_DI must lie in [0, 1]");
    }
    if (!(t_lambda > 0.0)) {
        throw ValidationError("T_lambda must be positive");
    }
    if (q_max < 1) {
        throw ValidationError("Q_max must be >= 1");
    }
    if (!(activation_fraction >= 0.0 && activation_fraction <= 1.0)) {
        throw ValidationError("activation fraction must lie in [0, 1]");
    }
}

double sigmoid_factor(double y, double gamma, double delta) {
    return 1.0 / (1.0 + std::exp(-(gamma * y - delta)));
}

double demand_reward(double di_final, const RewardConfig& cfg) {
    if (!(di_final >= 0.0 && di_final <= 1.0)) {
        throw ValidationError("DI_F outside [0, 1]");
    }
    const double sign = di_final >= cfg.t_di ? 1.0 : -1.0;
    const double y = di_final - cfg.t_di;
    return sign * cfg.r1 * sigmoid_factor(y, cfg.demand_gamma(), cfg.demand_delta());
}

std::optional<double> load_reward(double lambda, std::size_t queue_len, const RewardConfig& cfg) {
    if (!(lambda >= 0.0)) {
        throw ValidationError("load must be non-negative");
    }
    if (queue_len > cfg.q_max) {
        throw ValidationError("queue length exceeds Q_max");
    }
    const double occupancy_threshold = cfg.activation_fraction * static_cast<double>(cfg.q_max);
    if (static_cast<double>(queue_len) <= occupancy_threshold) {
        return std::nullopt;
    }
    const double sign = lambda <= cfg.t_lambda ? 1.0 : -1.0;
    const double y = cfg.t_lambda - lambda;
    return sign * cfg.r2 * sigmoid_factor(y, cfg.load_gamma(), cfg.load_delta());
}

TaskScore offloading_degree(TaskId id, double di_final, double lambda, std::size_t queue_len,
                            const RewardConfig& cfg) {
    TaskScore score;
    score.id = id;
    score.di_final = di_final;
    score.load = lambda;
    score.demand_reward = demand_reward(di_final, cfg);
    score.load_reward = load_reward(lambda, queue_len, cfg);
    score.od = score.demand_reward + score.load_reward.value_or(0.0);
    return score;
}

Ranking rank_and_select(std::vector<TaskScore> scores, std::size_t k) {
    if (k > scores.size()) {
        throw ValidationError("cannot offload " + std::to_string(k) + " of " +
                              std::to_string(scores.size()) + " tasks");
    }
    // Descending OD; among ties the higher load sits later (offloaded first),
    // then the smaller id sits later. Total order, so the selection does not
    // depend on input order.
    std::sort(scores.begin(), scores.end(), [](const TaskScore& a, const TaskScore& b) {
        if (a.od != b.od) return a.od > b.od;
        if (a.load != b.load) return a.load < b.load;
        return a.id > b.id;
    });
    Ranking result;
    result.offload.reserve(k);
    for (std::size_t i = scores.size() - k; i < scores.size(); ++i) {
        result.offload.push_back(scores[i].id);
    }
    result.ranked = std::move(scores);
    return result;
}

}  // namespace edgeoffload
