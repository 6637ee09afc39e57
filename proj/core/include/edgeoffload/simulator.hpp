#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "edgeoffload/aggregation.hpp"
#include "edgeoffload/demand_window.hpp"
#include "edgeoffload/lstm.hpp"
#include "edgeoffload/reward.hpp"
#include "edgeoffload/trace.hpp"

namespace edgeoffload {

/// One node's runtime state: its demand window, the FIFO task queue and
/// service counters.
struct NodeState {
    std::string node_id;
    DemandWindow window;
    std::deque<TaskId> queue;
    std::size_t q_max{0};
    std::uint64_t executed_count{0};
    std::uint64_t offloaded_count{0};

    NodeState(std::string id, DemandWindow w, std::size_t queue_capacity)
        : node_id(std::move(id)), window(std::move(w)), q_max(queue_capacity) {}

    /// FIFO enqueue; ValidationError once q_max is reached.
    void enqueue(TaskId task);
    /// FIFO service order: pops the oldest queued task.
    TaskId pop_front();
};

/// Abstract time costs of the two execution choices.
struct CostModel {
    double local_waiting{0.5};
    double local_execution{1.0};
    double migration{1.0};
    double remote_waiting{1.0};
    double response{0.5};

    void validate() const;
};

enum class ExecutionChoice { Local, Offload };

/// local -> waiting + execution; offload -> migration + remote waiting +
/// response. Reported for analysis only.
double decision_cost(const CostModel& model, ExecutionChoice choice);

/// A peer candidate for the heuristic baseline.
struct PeerNode {
    double remaining_energy{0.0};
    double edge_distance{0.0};
    double neighbor_count{0.0};
};

/// Heuristic baseline node selection: attributes are min-max normalized
/// across peers, ranked by their equal-weight sum, and the node with the
/// lowest rank wins (ties: lowest index). Throws ValidationError on an
/// empty span.
std::size_t etsi_select(std::span<const PeerNode> peers);

/// Where the forecaster weights come from for a run.
struct LstmSource {
    std::string weights_path;  // empty -> train inline on the experiment trace
    int train_epochs{300};
    double learning_rate{0.05};
    std::optional<double> gradient_clip{1.0};
    std::size_t max_training_examples{4096};
};

/// Full configuration of one experiment (one grid point).
struct ExperimentConfig {
    std::string id{"experiment"};
    std::size_t window_size{50};   // W
    std::size_t e_total{500};      // E
    std::size_t m_tasks{0};        // M; 0 -> defaults to E at the focal node
    std::size_t k{3};
    double w_past{0.7};
    double t_di{0.5};
    int di_past_len{kDefaultPastLen};  // l
    RewardConfig reward;
    CostModel cost;
    std::size_t repetitions{100};
    std::uint64_t seed{42};
    double lambda_max_factor{2.0};  // lambda ~ U[0, factor * T_lambda]
    std::size_t peer_count{5};
    CandidateActivation activation{CandidateActivation::Logistic};

    ExperimentConfig();

    std::size_t effective_m() const { return m_tasks == 0 ? e_total : m_tasks; }
    void validate() const;
};

/// Offload decisions of one repetition, as consumed by the metrics.
struct DecisionRecord {
    std::vector<TaskId> offloaded;
    std::vector<double> offloaded_di;  // DI_F of each offloaded task
};

struct RepetitionResult {
    double delta{0.0};
    double omega{0.0};
    double tau_per_task_s{0.0};
    double tau_decision_s{0.0};
    double mean_local_cost{0.0};
    double mean_offload_cost{0.0};
    std::vector<TaskId> offloaded;
};

struct MetricsReport {
    double tau_mean_s{0.0};           // mean per-task decision time, seconds
    std::vector<double> tau_samples;  // one per-task sample per repetition
    double delta{0.0};
    double omega{0.0};
    std::vector<RepetitionResult> repetitions;
};

/// Fraction of correct offloads: mean over repetitions of
/// |{offloaded with DI_F < t_di}| / k.
double delta_metric(std::span<const DecisionRecord> log, double t_di, std::size_t k);

/// Overlap of the offload set with the k lowest-popularity tasks
/// (ties on popularity broken by ascending task id), divided by k.
double omega_metric(std::span<const TaskId> offload_set,
                    const std::unordered_map<TaskId, double>& popularity, std::size_t k);

struct TauSummary {
    double mean_s{0.0};
    std::vector<double> samples;
};

/// Mean decision time per task plus the raw samples for density estimation.
TauSummary tau_metric(std::span<const double> timings, std::size_t task_count);

/// Runs the full experiment: replays the trace into the node window, draws
/// per-task loads, triggers the decision pipeline once per repetition with
/// the queue filled, times the pipeline (forecast + rewarding + ranking) and
/// accumulates delta/omega/tau. Deterministic given the seed except for the
/// timing samples. Throws ConfigError when the trace is shorter than W.
MetricsReport run_experiment(const ExperimentConfig& config, const DemandTrace& trace,
                             const LstmParams& params);

/// The heuristic baseline on identical traces and seeds: the target node is
/// picked by etsi_select and the offloaded-task identity is demand-blind
/// (first k of the arrival order). Returns the baseline's delta.
double etsi_baseline_delta(const ExperimentConfig& config, const DemandTrace& trace,
                           const LstmParams& params);

/// Pools sliding-window training examples from every task of the trace and
/// subsamples them (seeded) to at most max_examples.
std::vector<TrainingExample> make_training_examples(const DemandTrace& trace, int input_len,
                                                    int input_dim, std::size_t max_examples,
                                                    std::uint64_t seed);

}  // namespace edgeoffload
