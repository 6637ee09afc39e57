#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "edgeoffload/trace.hpp"
#include "edgeoffload/errors.hpp"

using namespace edgeoffload;

namespace {

std::filesystem::path write_temp_csv(const char* name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::trunc);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load_csv normalizes the selected column to [0, 1]") {
    const auto path = write_temp_csv("trace_basic.csv", "id,demand\n1,10\n2,20\n3,30\n");
    CsvTraceOptions opts;
    opts.column = "demand";
    opts.task_count = 3;
    opts.horizon = 4;
    opts.seed = 5;
    opts.jitter = 0.0;
    const DemandTrace trace = load_csv(path, opts);

    REQUIRE(trace.series.size() == 3);
    std::multiset<double> anchors;
    for (const auto& s : trace.series) {
        REQUIRE(s.size() == 4);
        // constant per task when jitter is off
        CHECK(std::all_of(s.begin(), s.end(), [&](double v) { return v == s.front(); }));
        anchors.insert(s.front());
    }
    // min-max of {10,20,30} is {0, 0.5, 1}; order preserved up to permutation
    CHECK(anchors == std::multiset<double>{0.0, 0.5, 1.0});
}

TEST_CASE("load_csv supports selection by column index") {
    const auto path = write_temp_csv("trace_index.csv", "a,b\n1,5\n2,9\n");
    CsvTraceOptions opts;
    opts.column_index = 1;
    opts.task_count = 2;
    opts.horizon = 2;
    opts.jitter = 0.0;
    const DemandTrace trace = load_csv(path, opts);
    std::multiset<double> anchors{trace.series[0][0], trace.series[1][0]};
    CHECK(anchors == std::multiset<double>{0.0, 1.0});
}

TEST_CASE("a constant column maps to zeros with a warning") {
    const auto path = write_temp_csv("trace_const.csv", "x\n7\n7\n7\n");
    CsvTraceOptions opts;
    opts.column = "x";
    opts.task_count = 2;
    opts.horizon = 3;
    opts.jitter = 0.0;
    const DemandTrace trace = load_csv(path, opts);
    for (const auto& s : trace.series) {
        for (double v : s) {
            CHECK(v == 0.0);
        }
    }
    REQUIRE_FALSE(trace.warnings.empty());
    CHECK(trace.warnings.front().find("degenerate") != std::string::npos);
}

TEST_CASE("load_csv failure modes") {
    CsvTraceOptions opts;
    opts.column = "x";
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", opts), ParseError);

    const auto missing = write_temp_csv("trace_missing.csv", "a,b\n1,2\n");
    CHECK_THROWS_AS(load_csv(missing, opts), ParseError);

    const auto bad_cell = write_temp_csv("trace_bad.csv", "x\n1\nfoo\n");
    try {
        load_csv(bad_cell, opts);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }

    const auto empty = write_temp_csv("trace_empty.csv", "x\n");
    CHECK_THROWS_AS(load_csv(empty, opts), ParseError);
}

TEST_CASE("load_csv is deterministic and jitter keeps values in range") {
    std::string content = "x\n";
    for (int i = 0; i < 50; ++i) {
        content += std::to_string(i) + "\n";
    }
    const auto path = write_temp_csv("trace_det.csv", content);
    CsvTraceOptions opts;
    opts.column = "x";
    opts.task_count = 20;
    opts.horizon = 30;
    opts.seed = 11;
    opts.jitter = 0.05;

    const DemandTrace a = load_csv(path, opts);
    const DemandTrace b = load_csv(path, opts);
    CHECK(a.series == b.series);

    opts.seed = 12;
    const DemandTrace c = load_csv(path, opts);
    CHECK(a.series != c.series);

    for (const auto& s : a.series) {
        for (double v : s) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("synthesize constant") {
    const DemandTrace t = synthesize(SynthesisKind::Constant, {.value = 0.7}, 5, 2, 1);
    CHECK(t.series[0] == std::vector<double>{0.7, 0.7, 0.7, 0.7, 0.7});
    CHECK_THROWS_AS(synthesize(SynthesisKind::Constant, {.value = 1.7}, 5, 2, 1),
                    ValidationError);
}

TEST_CASE("synthesize sine spans [low, high] over a full period") {
    SynthesisParams p;
    p.sine_low = 0.2;
    p.sine_high = 0.8;
    p.sine_period = 24.0;
    const DemandTrace t = synthesize(SynthesisKind::Sine, p, 48, 3, 2);
    for (const auto& s : t.series) {
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        CHECK(*lo == doctest::Approx(0.2).epsilon(0.05));
        CHECK(*hi == doctest::Approx(0.8).epsilon(0.05));
    }
}

TEST_CASE("synthesize ar1") {
    SynthesisParams p;
    p.ar_phi = 0.8;
    p.ar_noise_sigma = 0.05;
    const DemandTrace a = synthesize(SynthesisKind::Ar1, p, 100, 4, 33);
    const DemandTrace b = synthesize(SynthesisKind::Ar1, p, 100, 4, 33);
    CHECK(a.series == b.series);
    for (const auto& s : a.series) {
        for (double v : s) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    SynthesisParams bad;
    bad.ar_phi = 1.0;
    CHECK_THROWS_AS(synthesize(SynthesisKind::Ar1, bad, 10, 1, 1), ValidationError);
}

TEST_CASE("popularity is the horizon mean") {
    DemandTrace t;
    t.task_ids = {0, 1};
    t.series = {{0.2, 0.4}, {1.0, 0.0}};
    t.horizon = 2;
    CHECK(t.popularity(0) == doctest::Approx(0.3));
    CHECK(t.popularity(1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(t.popularity(9), ValidationError);
}
