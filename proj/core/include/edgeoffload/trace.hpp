#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edgeoffload/types.hpp"

namespace edgeoffload {

/// Per-task demand series over a shared horizon, all values in [0, 1].
struct DemandTrace {
    std::vector<TaskId> task_ids;
    std::vector<std::vector<double>> series;  // task-major, series[i] has `horizon` values
    std::size_t horizon{0};
    std::string provenance;
    std::vector<std::string> warnings;

    const std::vector<double>& series_for(TaskId task) const;

    /// Mean demand of one task over the full horizon (the ground-truth
    /// popularity used by the omega metric).
    double popularity(TaskId task) const;

    void validate() const;
};

struct CsvTraceOptions {
    std::string column{"heating_load"};  // header name; ignored if column_index >= 0
    int column_index{-1};                // zero-based; -1 selects by name
    std::size_t task_count{1};
    std::size_t horizon{1};
    std::uint64_t seed{1};
    /// Per-epoch uniform jitter applied around each task's anchor value,
    /// clipped to [0, 1]. Zero gives constant per-task series.
    double jitter{0.015};
};

/// Loads one numeric column, min-max normalizes it to [0, 1], and assembles
/// per-task series: a seeded permutation assigns each task an anchor row,
/// and epochs vary around the anchor by the configured jitter. A constant
/// column maps to all zeros with a warning recorded. Parse problems throw
/// ParseError with the offending row number in the message.
DemandTrace load_csv(const std::filesystem::path& path, const CsvTraceOptions& options);

enum class SynthesisKind { Constant, Ar1, Sine };

struct SynthesisParams {
    // constant
    double value{0.5};
    // ar1: x_t = mean + phi * (x_{t-1} - mean) + noise, clipped to [0, 1]
    double ar_phi{0.8};
    double ar_noise_sigma{0.05};
    double ar_mean{0.5};
    // sine, scaled into [low, high]; per-task phase is seeded
    double sine_low{0.2};
    double sine_high{0.8};
    double sine_period{24.0};
};

/// Seeded deterministic synthetic traces, clipped to [0, 1]. Invalid
/// parameters (|phi| >= 1, low > high, horizon 0) throw ValidationError.
DemandTrace synthesize(SynthesisKind kind, const SynthesisParams& params, std::size_t horizon,
                       std::size_t task_count, std::uint64_t seed);

}  // namespace edgeoffload
