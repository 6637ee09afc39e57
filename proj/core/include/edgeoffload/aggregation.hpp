#pragma once

#include <span>

#include "edgeoffload/demand_window.hpp"
#include "edgeoffload/lstm.hpp"

namespace edgeoffload {

/// Inputs below this are clamped before the logarithm in the weighted
/// geometric mean; the mean is undefined at zero demand.
inline constexpr double kWgmEpsilon = 1e-6;

/// Default number of recent observations fed to the past indicator.
inline constexpr int kDefaultPastLen = 3;

/// Relative weights of the past and future demand indicators. They must sum
/// to one.
struct AggregationWeights {
    double past{0.5};
    double future{0.5};

    static AggregationWeights from_past(double w_past);
};

/// The (past, future, fused) demand indicator triple for one task at one
/// decision epoch. All components lie in [0, 1] and the fused value lies
/// between the other two.
struct DemandIndicator {
    double di_past{0.0};
    double di_future{0.0};
    double di_final{0.0};
};

/// Past demand indicator: arithmetic mean of the supplied recent values.
/// Throws ValidationError on an empty sequence.
double di_past(std::span<const double> recent);

/// Weighted geometric mean of the two indicators,
/// exp((w_p ln dp + w_f ln df) / (w_p + w_f)). Inputs are clamped to
/// [kWgmEpsilon, 1]; NaN input is a ValidationError.
double wgm(double di_past_value, double di_future_value, const AggregationWeights& weights);

/// Composes the past indicator over the last `past_len` values, the
/// forecaster's next-epoch estimate over the last `input_len` values, and
/// their weighted geometric mean. Propagates insufficient-history errors.
DemandIndicator demand_indicator(const DemandWindow& window, TaskId task,
                                 const LstmParams& params, const AggregationWeights& weights,
                                 int past_len = kDefaultPastLen, int input_len = 3,
                                 CandidateActivation activation = CandidateActivation::Logistic);

}  // namespace edgeoffload
