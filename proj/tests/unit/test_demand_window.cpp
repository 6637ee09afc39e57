#include <doctest.h>

#include <random>

#include "edgeoffload/demand_window.hpp"

using namespace edgeoffload;

TEST_CASE("record_epoch appends and slides") {
    DemandWindow w(3, {1});
    w.record_epoch({{1, 0.5}});
    CHECK(w.size() == 1);

    w.record_epoch({{1, 0.6}});
    w.record_epoch({{1, 0.7}});
    CHECK(w.size() == 3);
    CHECK(w.full());

    w.record_epoch({{1, 0.8}});
    CHECK(w.size() == 3);
    CHECK(w.full_history(1) == std::vector<double>{0.6, 0.7, 0.8});  // oldest epoch evicted
}

TEST_CASE("record_epoch rejects bad input") {
    DemandWindow w(3, {1, 2});
    CHECK_THROWS_AS(w.record_epoch({{1, 1.2}, {2, 0.0}}), ValidationError);
    CHECK_THROWS_AS(w.record_epoch({{1, -0.1}, {2, 0.0}}), ValidationError);
    CHECK_THROWS_AS(w.record_epoch({{1, 0.5}, {9, 0.5}}), ValidationError);  // unknown id
    CHECK_THROWS_AS(w.record_epoch({{1, 0.5}}), ValidationError);            // missing task
    CHECK(w.size() == 0);  // rejected epochs leave the window untouched
}

TEST_CASE("duplicate task ids are rejected at construction") {
    CHECK_THROWS_AS(DemandWindow(3, {1, 1}), ValidationError);
    CHECK_THROWS_AS(DemandWindow(0, {1}), ValidationError);
}

TEST_CASE("recent_values returns the oldest-first suffix") {
    DemandWindow w(3, {7});
    w.record_epoch({{7, 0.1}});
    w.record_epoch({{7, 0.2}});
    w.record_epoch({{7, 0.3}});
    CHECK(w.recent_values(7, 3) == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(w.recent_values(7, 1) == std::vector<double>{0.3});

    DemandWindow short_w(3, {7});
    short_w.record_epoch({{7, 0.1}});
    short_w.record_epoch({{7, 0.2}});
    CHECK_THROWS_AS(short_w.recent_values(7, 3), InsufficientHistoryError);
}

TEST_CASE("full_history requires a full window") {
    DemandWindow w(3, {1});
    w.record_epoch({{1, 0.2}});
    w.record_epoch({{1, 0.4}});
    CHECK_THROWS_AS(w.full_history(1), InsufficientHistoryError);
    w.record_epoch({{1, 0.6}});
    CHECK(w.full_history(1) == std::vector<double>{0.2, 0.4, 0.6});

    DemandWindow degenerate(1, {1});
    degenerate.record_epoch({{1, 0.9}});
    CHECK(degenerate.full_history(1) == std::vector<double>{0.9});
}

TEST_CASE("window length, suffix and readback properties") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> demand(0.0, 1.0);
    const std::size_t capacity = 5;
    DemandWindow w(capacity, {1, 2, 3});
    std::vector<double> recorded;  // task 2's full record stream

    for (std::size_t n = 1; n <= 17; ++n) {
        const double d = demand(rng);
        recorded.push_back(d);
        w.record_epoch({{1, demand(rng)}, {2, d}, {3, demand(rng)}});
        CHECK(w.size() == std::min(n, capacity));

        // Every readback value was previously recorded, in order.
        const auto values = w.recent_values(2, w.size());
        const std::size_t start = recorded.size() - values.size();
        for (std::size_t i = 0; i < values.size(); ++i) {
            CHECK(values[i] == recorded[start + i]);
        }
        if (w.full()) {
            // recent_values(l) is the suffix of full_history for every l.
            const auto full = w.full_history(2);
            for (std::size_t l = 1; l <= capacity; ++l) {
                const auto suffix = w.recent_values(2, l);
                CHECK(std::equal(suffix.begin(), suffix.end(), full.end() - suffix.size()));
            }
        }
    }
}
