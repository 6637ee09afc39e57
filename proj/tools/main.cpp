#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "edgeoffload/experiment_io.hpp"
#include "edgeoffload/simulator.hpp"

namespace {

using namespace edgeoffload;

constexpr std::size_t kTrainTraceTasks = 256;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir{"out"};
    std::optional<std::uint64_t> seed;
};

RunManifest load_manifest(const CommonArgs& args) {
    const RunSpec spec = parse_run_spec(args.config_path);
    return resolve_manifest(spec, args.config_path, args.out_dir, args.seed);
}

TrainResult train_from_manifest(const RunManifest& manifest) {
    const DemandTrace trace = manifest.trace.load(kTrainTraceTasks, manifest.master_seed);
    const auto examples =
        make_training_examples(trace, manifest.training.input_len, manifest.training.input_dim,
                               manifest.lstm.max_training_examples, manifest.master_seed);
    return train(examples, manifest.training);
}

LstmParams obtain_params(const RunManifest& manifest) {
    if (!manifest.lstm.weights_path.empty()) {
        return load_params(read_file(manifest.lstm.weights_path));
    }
    TrainResult result = train_from_manifest(manifest);
    write_file_atomic(manifest.out_dir / "lstm_weights.txt", save_params(result.params));
    write_file_atomic(manifest.out_dir / "loss_curve.csv", loss_curve_csv(result.loss_curve));
    return std::move(result.params);
}

int cmd_train(const CommonArgs& args) {
    const RunManifest manifest = load_manifest(args);
    write_file_atomic(manifest.out_dir / "resolved_config.txt", manifest.resolved_text());

    const auto t0 = std::chrono::steady_clock::now();
    TrainResult result = train_from_manifest(manifest);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    write_file_atomic(manifest.out_dir / "lstm_weights.txt", save_params(result.params));
    write_file_atomic(manifest.out_dir / "loss_curve.csv", loss_curve_csv(result.loss_curve));
    std::printf("trained %d epochs in %.2f s, final mse %.6g\n", manifest.training.epochs,
                seconds, result.loss_curve.back());
    std::printf("weights: %s\n", (manifest.out_dir / "lstm_weights.txt").c_str());
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const RunManifest manifest = load_manifest(args);
    write_file_atomic(manifest.out_dir / "resolved_config.txt", manifest.resolved_text());
    const LstmParams params = obtain_params(manifest);

    std::vector<std::pair<ExperimentConfig, MetricsReport>> results;
    std::vector<std::string> failures;
    for (const ExperimentConfig& cfg : manifest.grid) {
        try {
            const DemandTrace trace = manifest.trace.load(cfg.effective_m(), manifest.master_seed);
            MetricsReport report = run_experiment(cfg, trace, params);
            write_file_atomic(manifest.out_dir / (cfg.id + "_tau.csv"),
                              tau_samples_csv(report));
            std::printf("%s: delta=%.4f omega=%.4f tau=%.3g s/task\n", cfg.id.c_str(),
                        report.delta, report.omega, report.tau_mean_s);
            results.emplace_back(cfg, std::move(report));
        } catch (const std::exception& e) {
            failures.push_back(cfg.id + ": " + e.what());
        }
    }
    if (!results.empty()) {
        write_file_atomic(manifest.out_dir / "metrics.csv", metrics_csv(results));
    }
    for (const std::string& failure : failures) {
        std::fprintf(stderr, "failed %s\n", failure.c_str());
    }
    return failures.empty() ? 0 : 1;
}

int cmd_compare(const CommonArgs& args) {
    const RunManifest manifest = load_manifest(args);
    write_file_atomic(manifest.out_dir / "resolved_config.txt", manifest.resolved_text());
    const LstmParams params = obtain_params(manifest);

    std::vector<ComparisonRow> rows;
    std::vector<std::string> failures;
    for (const ExperimentConfig& cfg : manifest.grid) {
        try {
            const DemandTrace trace = manifest.trace.load(cfg.effective_m(), manifest.master_seed);
            ComparisonRow row;
            row.config = cfg;
            row.delta_proposed = run_experiment(cfg, trace, params).delta;
            row.delta_etsi = etsi_baseline_delta(cfg, trace, params);
            std::printf("%s: proposed delta=%.4f, baseline delta=%.4f\n", cfg.id.c_str(),
                        row.delta_proposed, row.delta_etsi);
            rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            failures.push_back(cfg.id + ": " + e.what());
        }
    }
    if (!rows.empty()) {
        write_file_atomic(manifest.out_dir / "comparison.csv", comparison_csv(rows));
    }
    for (const std::string& failure : failures) {
        std::fprintf(stderr, "failed %s\n", failure.c_str());
    }
    return failures.empty() ? 0 : 1;
}

int cmd_predict(const CommonArgs& args) {
    const RunManifest manifest = load_manifest(args);
    write_file_atomic(manifest.out_dir / "resolved_config.txt", manifest.resolved_text());
    const LstmParams params = obtain_params(manifest);

    const ExperimentConfig& cfg = manifest.grid.front();
    const DemandTrace trace = manifest.trace.load(cfg.effective_m(), manifest.master_seed);
    if (trace.horizon < cfg.window_size) {
        throw ConfigError("trace horizon shorter than the window");
    }
    DemandWindow window(cfg.window_size, trace.task_ids);
    std::unordered_map<TaskId, double> tdv;
    for (std::size_t e = trace.horizon - cfg.window_size; e < trace.horizon; ++e) {
        tdv.clear();
        for (std::size_t i = 0; i < trace.task_ids.size(); ++i) {
            tdv.emplace(trace.task_ids[i], trace.series[i][e]);
        }
        window.record_epoch(tdv);
    }
    const auto weights = AggregationWeights::from_past(cfg.w_past);
    std::string out = "task_id,di_past,di_future,di_final\n";
    char buf[96];
    for (TaskId task : trace.task_ids) {
        const DemandIndicator di = demand_indicator(window, task, params, weights,
                                                    cfg.di_past_len, params.input_len,
                                                    cfg.activation);
        std::snprintf(buf, sizeof(buf), "%u,%.10g,%.10g,%.10g\n", task, di.di_past,
                      di.di_future, di.di_final);
        out += buf;
    }
    write_file_atomic(manifest.out_dir / "indicators.csv", out);
    std::printf("wrote %s\n", (manifest.out_dir / "indicators.csv").c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Demand-driven proactive task offloading for edge nodes"};
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "experiment config file")->required();
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--seed", args.seed, "override the config seed");
    };

    CLI::App* train_cmd = app.add_subcommand("train", "train the demand forecaster");
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run the experiment grid");
    CLI::App* cmp_cmd = app.add_subcommand("compare", "compare against the heuristic baseline");
    CLI::App* pred_cmd = app.add_subcommand("predict", "dump per-task demand indicators");
    for (CLI::App* cmd : {train_cmd, sim_cmd, cmp_cmd, pred_cmd}) {
        add_common(cmd);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(args);
        if (sim_cmd->parsed()) return cmd_simulate(args);
        if (cmp_cmd->parsed()) return cmd_compare(args);
        if (pred_cmd->parsed()) return cmd_predict(args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
