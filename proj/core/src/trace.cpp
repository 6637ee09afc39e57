#include "edgeoffload/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "edgeoffload/errors.hpp"

namespace edgeoffload {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

const std::vector<double>& DemandTrace::series_for(TaskId task) const {
    for (std::size_t i = 0; i < task_ids.size(); ++i) {
        if (task_ids[i] == task) {
            return series[i];
        }
    }
    throw ValidationError("trace has no task " + std::to_string(task));
}

double DemandTrace::popularity(TaskId task) const {
    const auto& s = series_for(task);
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

void DemandTrace::validate() const {
    if (task_ids.size() != series.size()) {
        throw ValidationError("trace task ids and series disagree");
    }
    for (const auto& s : series) {
        if (s.size() != horizon) {
            throw ValidationError("trace series length differs from horizon");
        }
        for (double v : s) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ValidationError("trace value outside [0, 1]");
            }
        }
    }
}

DemandTrace load_csv(const std::filesystem::path& path, const CsvTraceOptions& options) {
    if (options.task_count < 1 || options.horizon < 1) {
        throw ValidationError("trace needs at least one task and one epoch");
    }
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string(), 0);
    }

    std::string line;
    std::size_t offset = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty file " + path.string(), 0);
    }
    const auto header = split_csv_line(line);
    int column = options.column_index;
    if (column < 0) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == options.column) {
                column = static_cast<int>(i);
                break;
            }
        }
        if (column < 0) {
            throw ParseError("column '" + options.column + "' not in header of " + path.string(),
                             0);
        }
    }
    if (static_cast<std::size_t>(column) >= header.size()) {
        throw ParseError("column index " + std::to_string(column) + " out of range", 0);
    }
    offset += line.size() + 1;

    std::vector<double> pool;
    std::size_t row_number = 1;  // header was row 0
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) {
            offset += line.size() + 1;
            ++row_number;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (static_cast<std::size_t>(column) >= cells.size()) {
            throw ParseError("row " + std::to_string(row_number) + " has no column " +
                                 std::to_string(column),
                             offset);
        }
        const std::string& cell = cells[static_cast<std::size_t>(column)];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end == nullptr || *end != '\0' || !std::isfinite(v)) {
            throw ParseError("non-numeric cell '" + cell + "' at row " +
                                 std::to_string(row_number),
                             offset);
        }
        pool.push_back(v);
        offset += line.size() + 1;
        ++row_number;
    }
    if (pool.empty()) {
        throw ParseError("column holds no data rows", offset);
    }

    DemandTrace trace;
    const auto [lo_it, hi_it] = std::minmax_element(pool.begin(), pool.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) {
        trace.warnings.push_back("degenerate value range, column mapped to all zeros");
        std::fill(pool.begin(), pool.end(), 0.0);
    } else {
        for (double& v : pool) {
            v = (v - lo) / (hi - lo);
        }
    }

    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> perm(pool.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    std::uniform_real_distribution<double> jitter(-options.jitter, options.jitter);
    trace.task_ids.resize(options.task_count);
    trace.series.resize(options.task_count);
    trace.horizon = options.horizon;
    for (std::size_t t = 0; t < options.task_count; ++t) {
        trace.task_ids[t] = static_cast<TaskId>(t);
        const double anchor = pool[perm[t % perm.size()]];
        auto& s = trace.series[t];
        s.resize(options.horizon);
        for (std::size_t e = 0; e < options.horizon; ++e) {
            s[e] = options.jitter > 0.0 ? clip01(anchor + jitter(rng)) : anchor;
        }
    }
    trace.provenance = "csv:" + path.string() + " column=" +
                       (options.column_index >= 0 ? std::to_string(options.column_index)
                                                  : options.column) +
                       " min-max normalized, seed=" + std::to_string(options.seed);
    trace.validate();
    return trace;
}

DemandTrace synthesize(SynthesisKind kind, const SynthesisParams& params, std::size_t horizon,
                       std::size_t task_count, std::uint64_t seed) {
    if (horizon < 1 || task_count < 1) {
        throw ValidationError("synthesis needs at least one task and one epoch");
    }
    DemandTrace trace;
    trace.horizon = horizon;
    trace.task_ids.resize(task_count);
    trace.series.resize(task_count);
    std::mt19937_64 rng(seed);

    switch (kind) {
        case SynthesisKind::Constant: {
            if (!(params.value >= 0.0 && params.value <= 1.0)) {
                throw ValidationError("constant demand must lie in [0, 1]");
            }
            for (std::size_t t = 0; t < task_count; ++t) {
                trace.task_ids[t] = static_cast<TaskId>(t);
                trace.series[t].assign(horizon, params.value);
            }
            trace.provenance = "synthetic:constant";
            break;
        }
        case SynthesisKind::Ar1: {
            if (!(std::abs(params.ar_phi) < 1.0)) {
                throw ValidationError("ar1 needs |phi| < 1");
            }
            if (params.ar_noise_sigma < 0.0) {
                throw ValidationError("ar1 noise sigma must be non-negative");
            }
            std::normal_distribution<double> noise(0.0, params.ar_noise_sigma);
            for (std::size_t t = 0; t < task_count; ++t) {
                trace.task_ids[t] = static_cast<TaskId>(t);
                auto& s = trace.series[t];
                s.resize(horizon);
                double x = params.ar_mean;
                for (std::size_t e = 0; e < horizon; ++e) {
                    x = params.ar_mean + params.ar_phi * (x - params.ar_mean) + noise(rng);
                    x = clip01(x);
                    s[e] = x;
                }
            }
            trace.provenance = "synthetic:ar1";
            break;
        }
        case SynthesisKind::Sine: {
            if (!(params.sine_low <= params.sine_high) || params.sine_low < 0.0 ||
                params.sine_high > 1.0 || !(params.sine_period > 0.0)) {
                throw ValidationError("sine needs 0 <= low <= high <= 1 and period > 0");
            }
            std::uniform_real_distribution<double> phase(0.0, kTwoPi);
            for (std::size_t t = 0; t < task_count; ++t) {
                trace.task_ids[t] = static_cast<TaskId>(t);
                const double p = phase(rng);
                auto& s = trace.series[t];
                s.resize(horizon);
                for (std::size_t e = 0; e < horizon; ++e) {
                    const double w = std::sin(kTwoPi * static_cast<double>(e) /
                                                  params.sine_period + p);
                    s[e] = params.sine_low + (params.sine_high - params.sine_low) *
                                                 0.5 * (1.0 + w);
                }
            }
            trace.provenance = "synthetic:sine";
            break;
        }
    }
    trace.validate();
    return trace;
}

}  // namespace edgeoffload
