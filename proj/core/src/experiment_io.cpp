#include "edgeoffload/experiment_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace edgeoffload {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& value, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end == nullptr || *end != '\0' || !std::isfinite(v)) {
        throw ConfigError("bad numeric value '" + value + "' for " + key);
    }
    return v;
}

std::size_t parse_size(const std::string& value, const std::string& key) {
    const double v = parse_double(value, key);
    if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError("expected a non-negative integer for " + key);
    }
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"experiment",
     {"name", "seed", "repetitions", "W", "E", "M", "k", "w_past", "T_DI", "past_len",
      "lambda_max_factor", "peer_count"}},
    {"reward",
     {"r1", "r2", "T_lambda", "gamma", "delta", "gamma_demand", "delta_demand", "gamma_load",
      "delta_load", "activation_fraction"}},
    {"cost", {"local_waiting", "local_execution", "migration", "remote_waiting", "response"}},
    {"trace",
     {"kind", "path", "column", "column_index", "horizon", "jitter", "constant_value", "ar_phi",
      "ar_noise_sigma", "ar_mean", "sine_low", "sine_high", "sine_period"}},
    {"lstm",
     {"weights", "hidden_dim", "input_len", "input_dim", "epochs", "learning_rate",
      "gradient_clip", "max_examples", "candidate"}},
};

}  // namespace

bool RunSpec::has(const std::string& section, const std::string& key) const {
    auto sit = sections.find(section);
    return sit != sections.end() && sit->second.count(key) != 0;
}

std::string RunSpec::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto sit = sections.find(section);
    if (sit == sections.end()) {
        return fallback;
    }
    auto kit = sit->second.find(key);
    return kit == sit->second.end() ? fallback : kit->second;
}

RunSpec parse_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    RunSpec spec;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("unterminated section header at line " +
                                  std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            auto known = kKnownKeys.find(section);
            if (known == kKnownKeys.end()) {
                throw ConfigError("unknown section [" + section + "] at line " +
                                  std::to_string(line_no));
            }
            spec.sections.try_emplace(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty()) {
            throw ConfigError("expected 'key = value' at line " + std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& allowed = kKnownKeys.at(section);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in [" + section + "] at line " +
                              std::to_string(line_no));
        }
        spec.sections[section][key] = value;
    }
    return spec;
}

DemandTrace TraceSpec::load(std::size_t task_count, std::uint64_t seed) const {
    if (kind == "csv") {
        CsvTraceOptions opts = csv;
        opts.task_count = task_count;
        opts.horizon = horizon;
        opts.seed = seed;
        return load_csv(path, opts);
    }
    SynthesisKind sk;
    if (kind == "constant") {
        sk = SynthesisKind::Constant;
    } else if (kind == "ar1") {
        sk = SynthesisKind::Ar1;
    } else if (kind == "sine") {
        sk = SynthesisKind::Sine;
    } else {
        throw ConfigError("unknown trace kind '" + kind + "'");
    }
    return synthesize(sk, synth, horizon, task_count, seed);
}

RunManifest resolve_manifest(const RunSpec& spec, const std::filesystem::path& config_path,
                             const std::filesystem::path& out_dir,
                             std::optional<std::uint64_t> seed_override) {
    RunManifest manifest;
    manifest.config_path = config_path;
    manifest.out_dir = out_dir;

    manifest.master_seed = seed_override
                               ? *seed_override
                               : parse_size(spec.get("experiment", "seed", "42"), "seed");

    // Grid axes; single values are one-point axes.
    const auto axis_sizes = split_list(spec.get("experiment", "W", "50"));
    const auto axis_tasks = split_list(spec.get("experiment", "E", "500"));
    const auto axis_k = split_list(spec.get("experiment", "k", "3"));
    const auto axis_w_past = split_list(spec.get("experiment", "w_past", "0.7"));
    const auto axis_r2 = split_list(spec.get("reward", "r2", "2"));
    if (axis_sizes.empty() || axis_tasks.empty() || axis_k.empty() || axis_w_past.empty() ||
        axis_r2.empty()) {
        throw ConfigError("grid axes must not be empty");
    }

    ExperimentConfig base;
    base.seed = manifest.master_seed;
    base.repetitions = parse_size(spec.get("experiment", "repetitions", "100"), "repetitions");
    base.t_di = parse_double(spec.get("experiment", "T_DI", "0.5"), "T_DI");
    base.di_past_len = static_cast<int>(parse_size(spec.get("experiment", "past_len", "3"),
                                                   "past_len"));
    base.m_tasks = parse_size(spec.get("experiment", "M", "0"), "M");
    base.lambda_max_factor =
        parse_double(spec.get("experiment", "lambda_max_factor", "2"), "lambda_max_factor");
    base.peer_count = parse_size(spec.get("experiment", "peer_count", "5"), "peer_count");

    base.reward.r1 = parse_double(spec.get("reward", "r1", "1"), "r1");
    base.reward.t_lambda = parse_double(spec.get("reward", "T_lambda", "1"), "T_lambda");
    base.reward.gamma = parse_double(spec.get("reward", "gamma", "10"), "gamma");
    base.reward.delta = parse_double(spec.get("reward", "delta", "0"), "delta");
    const auto optional_override = [&](const char* key) -> std::optional<double> {
        const std::string v = spec.get("reward", key, "");
        if (v.empty() || v == "none") {
            return std::nullopt;
        }
        return parse_double(v, key);
    };
    if (spec.has("reward", "gamma_demand")) {
        base.reward.gamma_demand = optional_override("gamma_demand");
    }
    if (spec.has("reward", "delta_demand")) {
        base.reward.delta_demand = optional_override("delta_demand");
    }
    if (spec.has("reward", "gamma_load")) {
        base.reward.gamma_load = optional_override("gamma_load");
    }
    if (spec.has("reward", "delta_load")) {
        base.reward.delta_load = optional_override("delta_load");
    }
    base.reward.activation_fraction =
        parse_double(spec.get("reward", "activation_fraction", "0.8"), "activation_fraction");

    base.cost.local_waiting = parse_double(spec.get("cost", "local_waiting", "0.5"),
                                           "local_waiting");
    base.cost.local_execution =
        parse_double(spec.get("cost", "local_execution", "1"), "local_execution");
    base.cost.migration = parse_double(spec.get("cost", "migration", "1"), "migration");
    base.cost.remote_waiting =
        parse_double(spec.get("cost", "remote_waiting", "1"), "remote_waiting");
    base.cost.response = parse_double(spec.get("cost", "response", "0.5"), "response");

    manifest.trace.kind = spec.get("trace", "kind", "csv");
    manifest.trace.path = spec.get("trace", "path", "data/energy_demand.csv");
    manifest.trace.horizon = parse_size(spec.get("trace", "horizon", "128"), "horizon");
    manifest.trace.csv.column = spec.get("trace", "column", "heating_load");
    manifest.trace.csv.column_index = static_cast<int>(
        parse_double(spec.get("trace", "column_index", "-1"), "column_index"));
    manifest.trace.csv.jitter = parse_double(spec.get("trace", "jitter", "0.015"), "jitter");
    manifest.trace.synth.value =
        parse_double(spec.get("trace", "constant_value", "0.5"), "constant_value");
    manifest.trace.synth.ar_phi = parse_double(spec.get("trace", "ar_phi", "0.8"), "ar_phi");
    manifest.trace.synth.ar_noise_sigma =
        parse_double(spec.get("trace", "ar_noise_sigma", "0.05"), "ar_noise_sigma");
    manifest.trace.synth.ar_mean = parse_double(spec.get("trace", "ar_mean", "0.5"), "ar_mean");
    manifest.trace.synth.sine_low = parse_double(spec.get("trace", "sine_low", "0.2"),
                                                 "sine_low");
    manifest.trace.synth.sine_high =
        parse_double(spec.get("trace", "sine_high", "0.8"), "sine_high");
    manifest.trace.synth.sine_period =
        parse_double(spec.get("trace", "sine_period", "24"), "sine_period");

    manifest.lstm.weights_path = spec.get("lstm", "weights", "");
    manifest.lstm.train_epochs = static_cast<int>(parse_size(spec.get("lstm", "epochs", "300"),
                                                             "epochs"));
    manifest.lstm.learning_rate =
        parse_double(spec.get("lstm", "learning_rate", "0.05"), "learning_rate");
    const std::string clip = spec.get("lstm", "gradient_clip", "1");
    manifest.lstm.gradient_clip =
        (clip == "none" || clip.empty()) ? std::nullopt
                                         : std::optional<double>(parse_double(clip,
                                                                              "gradient_clip"));
    manifest.lstm.max_training_examples =
        parse_size(spec.get("lstm", "max_examples", "4096"), "max_examples");

    manifest.training.epochs = manifest.lstm.train_epochs;
    manifest.training.learning_rate = manifest.lstm.learning_rate;
    manifest.training.gradient_clip = manifest.lstm.gradient_clip;
    manifest.training.hidden_dim = static_cast<int>(
        parse_size(spec.get("lstm", "hidden_dim", "16"), "hidden_dim"));
    manifest.training.input_len = static_cast<int>(
        parse_size(spec.get("lstm", "input_len", "3"), "input_len"));
    manifest.training.input_dim = static_cast<int>(
        parse_size(spec.get("lstm", "input_dim", "3"), "input_dim"));
    manifest.training.seed = manifest.master_seed;
    const std::string candidate = spec.get("lstm", "candidate", "logistic");
    if (candidate == "logistic") {
        manifest.training.candidate = CandidateActivation::Logistic;
    } else if (candidate == "tanh") {
        manifest.training.candidate = CandidateActivation::Tanh;
    } else {
        throw ConfigError("candidate activation must be 'logistic' or 'tanh'");
    }
    manifest.training.validate();

    const std::string name = spec.get("experiment", "name", "run");
    for (const auto& w : axis_sizes) {
        for (const auto& e : axis_tasks) {
            for (const auto& kk : axis_k) {
                for (const auto& wp : axis_w_past) {
                    for (const auto& r2 : axis_r2) {
                        ExperimentConfig cfg = base;
                        cfg.window_size = parse_size(w, "W");
                        cfg.e_total = parse_size(e, "E");
                        cfg.k = parse_size(kk, "k");
                        cfg.w_past = parse_double(wp, "w_past");
                        cfg.reward.r2 = parse_double(r2, "r2");
                        cfg.activation = manifest.training.candidate;
                        cfg.id = name + "_W" + w + "_E" + e + "_k" + kk + "_wp" + wp + "_r2" +
                                 r2;
                        cfg.validate();
                        if (manifest.trace.horizon < cfg.window_size) {
                            throw ConfigError("trace horizon shorter than window W=" + w);
                        }
                        manifest.grid.push_back(std::move(cfg));
                    }
                }
            }
        }
    }
    return manifest;
}

std::string RunManifest::resolved_text() const {
    std::ostringstream out;
    out << "config = " << config_path.string() << "\n";
    out << "out_dir = " << out_dir.string() << "\n";
    out << "master_seed = " << master_seed << "\n";
    out << "trace.kind = " << trace.kind << "\n";
    if (trace.kind == "csv") {
        out << "trace.path = " << trace.path.string() << "\n";
        out << "trace.column = "
            << (trace.csv.column_index >= 0 ? std::to_string(trace.csv.column_index)
                                            : trace.csv.column)
            << "\n";
        out << "trace.jitter = " << format_double(trace.csv.jitter) << "\n";
    }
    out << "trace.horizon = " << trace.horizon << "\n";
    out << "lstm.weights = " << (lstm.weights_path.empty() ? "<train inline>" : lstm.weights_path)
        << "\n";
    out << "lstm.hidden_dim = " << training.hidden_dim << "\n";
    out << "lstm.input_len = " << training.input_len << "\n";
    out << "lstm.input_dim = " << training.input_dim << "\n";
    out << "lstm.epochs = " << training.epochs << "\n";
    out << "lstm.learning_rate = " << format_double(training.learning_rate) << "\n";
    out << "lstm.gradient_clip = "
        << (training.gradient_clip ? format_double(*training.gradient_clip) : "none") << "\n";
    out << "lstm.max_examples = " << lstm.max_training_examples << "\n";
    out << "lstm.candidate = "
        << (training.candidate == CandidateActivation::Logistic ? "logistic" : "tanh") << "\n";
    for (const auto& cfg : grid) {
        out << "[" << cfg.id << "]\n";
        out << "  W = " << cfg.window_size << ", E = " << cfg.e_total
            << ", M = " << cfg.effective_m() << ", k = " << cfg.k << "\n";
        out << "  w_past = " << format_double(cfg.w_past)
            << ", T_DI = " << format_double(cfg.t_di) << ", past_len = " << cfg.di_past_len
            << "\n";
        out << "  repetitions = " << cfg.repetitions << ", seed = " << cfg.seed << "\n";
        out << "  reward: r1 = " << format_double(cfg.reward.r1)
            << ", r2 = " << format_double(cfg.reward.r2)
            << ", T_lambda = " << format_double(cfg.reward.t_lambda)
            << ", gamma = " << format_double(cfg.reward.gamma)
            << ", delta = " << format_double(cfg.reward.delta) << "\n";
        out << "  reward overrides: gamma_demand = "
            << (cfg.reward.gamma_demand ? format_double(*cfg.reward.gamma_demand) : "shared")
            << ", gamma_load = "
            << (cfg.reward.gamma_load ? format_double(*cfg.reward.gamma_load) : "shared")
            << ", delta_demand = "
            << (cfg.reward.delta_demand ? format_double(*cfg.reward.delta_demand) : "shared")
            << ", delta_load = "
            << (cfg.reward.delta_load ? format_double(*cfg.reward.delta_load) : "shared")
            << "\n";
        out << "  activation_fraction = " << format_double(cfg.reward.activation_fraction)
            << ", lambda ~ U[0, " << format_double(cfg.lambda_max_factor * cfg.reward.t_lambda)
            << "]\n";
        out << "  cost: local = " << format_double(cfg.cost.local_waiting) << " + "
            << format_double(cfg.cost.local_execution)
            << ", offload = " << format_double(cfg.cost.migration) << " + "
            << format_double(cfg.cost.remote_waiting) << " + "
            << format_double(cfg.cost.response) << "\n";
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto parent = path.parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError("cannot write " + tmp);
        }
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw ConfigError("failed writing " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string metrics_csv(const std::vector<std::pair<ExperimentConfig, MetricsReport>>& results) {
    std::string out = "experiment_id,W,E,M,k,w_past,T_DI,r2,repetition,tau_mean_s,delta,omega\n";
    const auto prefix = [&](const ExperimentConfig& cfg) {
        return cfg.id + ',' + std::to_string(cfg.window_size) + ',' +
               std::to_string(cfg.e_total) + ',' + std::to_string(cfg.effective_m()) + ',' +
               std::to_string(cfg.k) + ',' + format_double(cfg.w_past) + ',' +
               format_double(cfg.t_di) + ',' + format_double(cfg.reward.r2) + ',';
    };
    for (const auto& [cfg, report] : results) {
        for (std::size_t rep = 0; rep < report.repetitions.size(); ++rep) {
            const auto& r = report.repetitions[rep];
            out += prefix(cfg) + std::to_string(rep) + ',' + format_double(r.tau_per_task_s) +
                   ',' + format_double(r.delta) + ',' + format_double(r.omega) + '\n';
        }
        out += prefix(cfg) + "mean," + format_double(report.tau_mean_s) + ',' +
               format_double(report.delta) + ',' + format_double(report.omega) + '\n';
    }
    return out;
}

std::string tau_samples_csv(const MetricsReport& report) {
    std::string out = "sample_s\n";
    for (double s : report.tau_samples) {
        out += format_double(s);
        out += '\n';
    }
    return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "experiment_id,W,E,M,k,w_past,T_DI,r2,delta_proposed,delta_etsi,delta_diff\n";
    for (const auto& row : rows) {
        const auto& cfg = row.config;
        out += cfg.id + ',' + std::to_string(cfg.window_size) + ',' +
               std::to_string(cfg.e_total) + ',' + std::to_string(cfg.effective_m()) + ',' +
               std::to_string(cfg.k) + ',' + format_double(cfg.w_past) + ',' +
               format_double(cfg.t_di) + ',' + format_double(cfg.reward.r2) + ',' +
               format_double(row.delta_proposed) + ',' + format_double(row.delta_etsi) + ',' +
               format_double(row.delta_proposed - row.delta_etsi) + '\n';
    }
    return out;
}

std::string loss_curve_csv(const std::vector<double>& curve) {
    std::string out = "epoch,mse\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out += std::to_string(i) + ',' + format_double(curve[i]) + '\n';
    }
    return out;
}

}  // namespace edgeoffload
