#include <doctest.h>

#include <algorithm>

#include "edgeoffload/simulator.hpp"

using namespace edgeoffload;

namespace {

LstmParams zero_model() {
    LstmParams p = LstmParams::random_init(3, 4, 3, 1);
    p.u_forget.setZero(); p.z_forget.setZero(); p.b_forget.setZero();
    p.u_input.setZero(); p.z_input.setZero(); p.b_input.setZero();
    p.u_output.setZero(); p.z_output.setZero(); p.b_output.setZero();
    p.u_cand.setZero(); p.z_cand.setZero(); p.b_cand.setZero();
    p.w_readout.setZero(); p.b_readout = 0.0;
    return p;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.id = "unit";
    cfg.window_size = 8;
    cfg.e_total = 20;
    cfg.k = 3;
    cfg.repetitions = 3;
    cfg.seed = 77;
    return cfg;
}

}  // namespace

TEST_CASE("decision_cost") {
    CostModel m;
    SUBCASE("zero-latency network, empty remote queue: migration only") {
        m.migration = 0.7;
        m.remote_waiting = 0.0;
        m.response = 0.0;
        CHECK(decision_cost(m, ExecutionChoice::Offload) == doctest::Approx(0.7));
    }
    SUBCASE("local cost is waiting plus execution") {
        m.local_waiting = 0.0;
        m.local_execution = 1.0;
        CHECK(decision_cost(m, ExecutionChoice::Local) == doctest::Approx(1.0));
    }
    SUBCASE("defaults make offloading dearer than local execution") {
        CHECK(decision_cost(CostModel{}, ExecutionChoice::Offload) >
              decision_cost(CostModel{}, ExecutionChoice::Local));
    }
    SUBCASE("negative components are rejected") {
        m.migration = -1.0;
        CHECK_THROWS_AS(decision_cost(m, ExecutionChoice::Offload), ValidationError);
    }
}

TEST_CASE("etsi_select") {
    SUBCASE("single node wins trivially") {
        const PeerNode only{0.4, 0.4, 0.4};
        CHECK(etsi_select(std::vector<PeerNode>{only}) == 0);
    }
    SUBCASE("lower remaining energy ranks lower and is selected") {
        const std::vector<PeerNode> peers{{0.9, 0.5, 0.5}, {0.2, 0.5, 0.5}};
        CHECK(etsi_select(peers) == 1);
    }
    SUBCASE("empty candidate set is rejected") {
        CHECK_THROWS_AS(etsi_select(std::vector<PeerNode>{}), ValidationError);
    }
    SUBCASE("non-finite attributes are rejected") {
        const std::vector<PeerNode> peers{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
        CHECK_THROWS_AS(etsi_select(peers), ValidationError);
    }
}

TEST_CASE("delta_metric") {
    DecisionRecord all_low{{1, 2}, {0.1, 0.2}};
    DecisionRecord half{{1, 2}, {0.1, 0.9}};
    CHECK(delta_metric(std::vector<DecisionRecord>{all_low, all_low}, 0.5, 2) == 1.0);
    CHECK(delta_metric(std::vector<DecisionRecord>{half}, 0.5, 2) == 0.5);
    CHECK_THROWS_AS(delta_metric({}, 0.5, 2), ValidationError);
}

TEST_CASE("omega_metric") {
    const std::unordered_map<TaskId, double> popularity{
        {1, 0.1}, {2, 0.2}, {3, 0.3}, {4, 0.9}, {5, 0.8}};
    const std::vector<TaskId> exact{1, 2, 3};
    CHECK(omega_metric(exact, popularity, 3) == 1.0);
    const std::vector<TaskId> disjoint{4, 5};
    CHECK(omega_metric(disjoint, popularity, 2) == 0.0);

    // popularity ties broken by ascending id
    const std::unordered_map<TaskId, double> tied{{1, 0.5}, {2, 0.5}, {3, 0.5}};
    const std::vector<TaskId> pick_one{1};
    CHECK(omega_metric(pick_one, tied, 1) == 1.0);
    const std::vector<TaskId> pick_other{3};
    CHECK(omega_metric(pick_other, tied, 1) == 0.0);
}

TEST_CASE("tau_metric") {
    const std::vector<double> timings{0.1, 0.3};
    const TauSummary t = tau_metric(timings, 2);
    CHECK(t.mean_s == doctest::Approx(0.2));
    CHECK(t.samples == timings);
    const std::vector<double> one{0.05};
    CHECK(tau_metric(one, 1).mean_s == doctest::Approx(0.05));
    CHECK_THROWS_AS(tau_metric({}, 1), ValidationError);
}

TEST_CASE("node queue respects capacity and FIFO order") {
    NodeState node("n1", DemandWindow(2, {1, 2}), 2);
    node.enqueue(1);
    node.enqueue(2);
    CHECK_THROWS_AS(node.enqueue(1), ValidationError);
    CHECK(node.pop_front() == 1);
    CHECK(node.pop_front() == 2);
    CHECK_THROWS_AS(node.pop_front(), ValidationError);
}

TEST_CASE("run_experiment contract") {
    const ExperimentConfig cfg = small_config();
    const DemandTrace trace = synthesize(SynthesisKind::Ar1, {}, 16, 20, 5);
    const LstmParams model = zero_model();

    SUBCASE("exactly k tasks are offloaded per repetition") {
        const MetricsReport report = run_experiment(cfg, trace, model);
        REQUIRE(report.repetitions.size() == 3);
        for (const auto& rep : report.repetitions) {
            CHECK(rep.offloaded.size() == 3);
        }
        CHECK(report.tau_samples.size() == 3);
        CHECK(report.tau_mean_s > 0.0);
        CHECK(report.delta >= 0.0);
        CHECK(report.delta <= 1.0);
        CHECK(report.omega >= 0.0);
        CHECK(report.omega <= 1.0);
    }
    SUBCASE("same seed reproduces the offload sets; more repetitions extend them") {
        ExperimentConfig one = cfg;
        one.repetitions = 1;
        const MetricsReport a = run_experiment(one, trace, model);
        const MetricsReport b = run_experiment(cfg, trace, model);
        REQUIRE(a.repetitions.size() == 1);
        CHECK(a.repetitions[0].offloaded == b.repetitions[0].offloaded);

        const MetricsReport c = run_experiment(cfg, trace, model);
        for (std::size_t i = 0; i < b.repetitions.size(); ++i) {
            CHECK(b.repetitions[i].offloaded == c.repetitions[i].offloaded);
            CHECK(b.repetitions[i].delta == c.repetitions[i].delta);
            CHECK(b.repetitions[i].omega == c.repetitions[i].omega);
        }
    }
    SUBCASE("trace shorter than the window is a configuration error") {
        const DemandTrace tiny = synthesize(SynthesisKind::Ar1, {}, 4, 20, 5);
        CHECK_THROWS_AS(run_experiment(cfg, tiny, model), ConfigError);
    }
    SUBCASE("trace task count must match M") {
        const DemandTrace wrong = synthesize(SynthesisKind::Ar1, {}, 16, 10, 5);
        CHECK_THROWS_AS(run_experiment(cfg, wrong, model), ConfigError);
    }
    SUBCASE("invalid grid is rejected before running") {
        ExperimentConfig bad = cfg;
        bad.k = 25;  // above M
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
}

TEST_CASE("stationary demand with the load criterion disabled gives omega = 1") {
    ExperimentConfig cfg = small_config();
    cfg.w_past = 1.0;                        // DI_F equals the recent mean exactly
    cfg.reward.activation_fraction = 1.0;    // full queue never activates the load criterion
    cfg.repetitions = 4;

    // distinct stationary levels below the threshold, popularity = level
    DemandTrace trace;
    trace.horizon = 16;
    for (TaskId id = 0; id < 20; ++id) {
        trace.task_ids.push_back(id);
        trace.series.emplace_back(16, 0.02 + 0.02 * static_cast<double>(id));
    }

    const MetricsReport report = run_experiment(cfg, trace, zero_model());
    CHECK(report.omega == 1.0);
    for (const auto& rep : report.repetitions) {
        CHECK(rep.omega == 1.0);
        // the three least popular tasks are offloaded
        auto sorted = rep.offloaded;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::vector<TaskId>{0, 1, 2});
    }
}

TEST_CASE("etsi baseline is demand-blind and reproducible") {
    const ExperimentConfig cfg = small_config();
    const DemandTrace trace = synthesize(SynthesisKind::Ar1, {}, 16, 20, 5);
    const LstmParams model = zero_model();
    const double a = etsi_baseline_delta(cfg, trace, model);
    const double b = etsi_baseline_delta(cfg, trace, model);
    CHECK(a == b);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
}

TEST_CASE("make_training_examples pools sliding windows") {
    const DemandTrace trace = synthesize(SynthesisKind::Ar1, {}, 20, 3, 5);
    const auto all = make_training_examples(trace, 3, 3, 0, 1);
    CHECK(all.size() == 3 * (20 - 3));
    const auto capped = make_training_examples(trace, 3, 3, 10, 1);
    CHECK(capped.size() == 10);
    const auto capped_again = make_training_examples(trace, 3, 3, 10, 1);
    for (std::size_t i = 0; i < capped.size(); ++i) {
        CHECK(capped[i].second == capped_again[i].second);
    }
    CHECK_THROWS_AS(make_training_examples(trace, 25, 3, 0, 1), InsufficientHistoryError);
}
