#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "edgeoffload/simulator.hpp"

namespace edgeoffload {

/// Parsed experiment file: a section/key/value map plus grid axes. The file
/// format is line-oriented `key = value` under `[section]` headers; `#`
/// starts a comment; the keys W, E, k, w_past and r2 under [experiment] /
/// [reward] accept comma-separated lists and span the experiment grid.
struct RunSpec {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
};

/// Trace selection resolved from the [trace] section.
struct TraceSpec {
    std::string kind{"csv"};  // csv | constant | ar1 | sine
    std::filesystem::path path;
    CsvTraceOptions csv;
    SynthesisParams synth;
    std::size_t horizon{128};

    DemandTrace load(std::size_t task_count, std::uint64_t seed) const;
};

/// Everything a subcommand needs: the expanded grid, trace and forecaster
/// sources, and the output directory.
struct RunManifest {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::vector<ExperimentConfig> grid;
    TraceSpec trace;
    LstmSource lstm;
    TrainingConfig training;
    std::uint64_t master_seed{42};

    /// Echo of every resolved value, written next to the outputs.
    std::string resolved_text() const;
};

/// Parses the file into sections. Unknown sections or malformed lines throw
/// ConfigError with the line number.
RunSpec parse_run_spec(const std::filesystem::path& path);

/// Resolves a spec into a manifest: applies defaults, expands the grid axes
/// (cartesian product), validates every resulting ExperimentConfig before
/// any work starts, and applies the optional seed override.
RunManifest resolve_manifest(const RunSpec& spec, const std::filesystem::path& config_path,
                             const std::filesystem::path& out_dir,
                             std::optional<std::uint64_t> seed_override);

/// Writes content to `path` atomically (temp file + rename), creating parent
/// directories as needed. No partially written file survives a failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// One metrics row per repetition plus a `mean` summary row, under the
/// header experiment_id,W,E,M,k,w_past,T_DI,r2,repetition,tau_mean_s,delta,omega.
std::string metrics_csv(const std::vector<std::pair<ExperimentConfig, MetricsReport>>& results);

/// Raw tau samples, header `sample_s`, one row per sample.
std::string tau_samples_csv(const MetricsReport& report);

/// Per-grid-point comparison of the proposed scheme against the baseline.
struct ComparisonRow {
    ExperimentConfig config;
    double delta_proposed{0.0};
    double delta_etsi{0.0};
};

std::string comparison_csv(const std::vector<ComparisonRow>& rows);

/// Loss curve, header `epoch,mse`.
std::string loss_curve_csv(const std::vector<double>& curve);

}  // namespace edgeoffload
