#include "edgeoffload/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgeoffload {

AggregationWeights AggregationWeights::from_past(double w_past) {
    if (!(w_past >= 0.0 && w_past <= 1.0)) {
        throw ValidationError("past weight must lie in [0, 1]");
    }
    return AggregationWeights{w_past, 1.0 - w_past};
}

double di_past(std::span<const double> recent) {
    if (recent.empty()) {
        throw ValidationError("past indicator needs at least one observation");
    }
    for (double v : recent) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError("demand observation outside [0, 1]");
        }
    }
    const double sum = std::accumulate(recent.begin(), recent.end(), 0.0);
    return sum / static_cast<double>(recent.size());
}

double wgm(double di_past_value, double di_future_value, const AggregationWeights& weights) {
    if (std::isnan(di_past_value) || std::isnan(di_future_value)) {
        throw ValidationError("NaN demand indicator");
    }
    const double sum = weights.past + weights.future;
    if (!(weights.past >= 0.0 && weights.future >= 0.0) || !(sum > 0.0) ||
        std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("aggregation weights must be non-negative and sum to 1");
    }
    const double dp = std::clamp(di_past_value, kWgmEpsilon, 1.0);
    const double df = std::clamp(di_future_value, kWgmEpsilon, 1.0);
    return std::exp((weights.past * std::log(dp) + weights.future * std::log(df)) / sum);
}

DemandIndicator demand_indicator(const DemandWindow& window, TaskId task,
                                 const LstmParams& params, const AggregationWeights& weights,
                                 int past_len, int input_len, CandidateActivation activation) {
    if (past_len < 1) {
        throw ValidationError("past_len must be >= 1");
    }
    DemandIndicator di;
    const auto recent = window.recent_values(task, static_cast<std::size_t>(past_len));
    di.di_past = di_past(recent);
    di.di_future = predict_di_f(params, window, task, input_len, activation);
    di.di_final = wgm(di.di_past, di.di_future, weights);
    return di;
}

}  // namespace edgeoffload
