#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "edgeoffload/aggregation.hpp"

using namespace edgeoffload;

TEST_CASE("di_past is the mean of recent observations") {
    CHECK(di_past(std::vector<double>{0.2, 0.4, 0.6}) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(di_past(std::vector<double>{0.7}) == 0.7);
    CHECK(di_past(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(di_past({}), ValidationError);
    CHECK_THROWS_AS(di_past(std::vector<double>{0.5, 1.4}), ValidationError);
}

TEST_CASE("aggregation weights") {
    const auto w = AggregationWeights::from_past(0.3);
    CHECK(w.past == doctest::Approx(0.3));
    CHECK(w.future == doctest::Approx(0.7));
    CHECK_THROWS_AS(AggregationWeights::from_past(1.2), ValidationError);
    CHECK_THROWS_AS(AggregationWeights::from_past(-0.1), ValidationError);
    CHECK_THROWS_AS(wgm(0.5, 0.5, AggregationWeights{0.9, 0.9}), ValidationError);
}

TEST_CASE("weighted geometric mean") {
    SUBCASE("idempotence") {
        for (double wp : {0.0, 0.3, 0.5, 0.9, 1.0}) {
            CHECK(wgm(0.6, 0.6, AggregationWeights::from_past(wp)) ==
                  doctest::Approx(0.6).epsilon(1e-12));
        }
    }
    SUBCASE("frozen derived value") {
        // 0.4^0.7 * 0.9^0.3, evaluated independently
        CHECK(std::abs(wgm(0.4, 0.9, AggregationWeights::from_past(0.7)) -
                       0.5101698002503163) < 1e-9);
        // dual route: the exp/log form must agree with the power-product form
        CHECK(wgm(0.4, 0.9, AggregationWeights::from_past(0.7)) ==
              doctest::Approx(std::pow(0.4, 0.7) * std::pow(0.9, 0.3)).epsilon(1e-13));
    }
    SUBCASE("weight degeneracy") {
        CHECK(wgm(0.3, 0.85, AggregationWeights::from_past(1.0)) ==
              doctest::Approx(0.3).epsilon(1e-12));
        CHECK(wgm(0.3, 0.85, AggregationWeights::from_past(0.0)) ==
              doctest::Approx(0.85).epsilon(1e-12));
    }
    SUBCASE("NaN is rejected") {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(wgm(nan, 0.5, AggregationWeights::from_past(0.5)), ValidationError);
        CHECK_THROWS_AS(wgm(0.5, nan, AggregationWeights::from_past(0.5)), ValidationError);
    }
    SUBCASE("zero demand is clamped, not rejected") {
        const double v = wgm(0.0, 0.5, AggregationWeights::from_past(0.5));
        CHECK(v > 0.0);
        CHECK(v < 0.5);
    }
}

TEST_CASE("wgm properties on random inputs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(1e-5, 1.0);
    std::uniform_real_distribution<double> weight(0.0, 1.0);

    for (int i = 0; i < 500; ++i) {
        const double dp = unit(rng);
        const double df = unit(rng);
        const double wp = weight(rng);
        const auto w = AggregationWeights::from_past(wp);
        const double v = wgm(dp, df, w);

        // betweenness
        CHECK(v >= std::min(dp, df) - 1e-12);
        CHECK(v <= std::max(dp, df) + 1e-12);
        // result stays in the unit interval
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);

        // strict monotonicity in each argument (above the clamp)
        if (wp > 0.01 && wp < 0.99) {
            CHECK(wgm(std::min(dp * 1.05, 1.0), df, w) >= v);
            CHECK(wgm(dp, std::min(df * 1.05, 1.0), w) >= v);
            if (dp * 1.05 <= 1.0) {
                CHECK(wgm(dp * 1.05, df, w) > v);
            }
        }
    }
}

TEST_CASE("wgm is continuous in the weight with the right endpoints") {
    const double dp = 0.35;
    const double df = 0.72;
    double previous = wgm(dp, df, AggregationWeights::from_past(0.0));
    CHECK(previous == doctest::Approx(df).epsilon(1e-12));
    for (int i = 1; i <= 100; ++i) {
        const double wp = static_cast<double>(i) / 100.0;
        const double v = wgm(dp, df, AggregationWeights::from_past(wp));
        CHECK(std::abs(v - previous) < 0.02);  // no jumps along the path
        CHECK(v <= previous + 1e-12);          // decreasing toward dp < df
        previous = v;
    }
    CHECK(previous == doctest::Approx(dp).epsilon(1e-12));
}

TEST_CASE("the fused indicator reaches 1 only when both components do") {
    CHECK(wgm(1.0, 1.0, AggregationWeights::from_past(0.5)) == doctest::Approx(1.0));
    CHECK(wgm(1.0, 0.98, AggregationWeights::from_past(0.5)) < 1.0);
    CHECK(wgm(0.98, 1.0, AggregationWeights::from_past(0.5)) < 1.0);
}

TEST_CASE("demand_indicator composes the pipeline") {
    DemandWindow window(6, {4});
    for (double v : {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}) {
        window.record_epoch({{4, v}});
    }
    LstmParams zero = LstmParams::random_init(3, 4, 3, 1);
    zero.u_forget.setZero(); zero.z_forget.setZero(); zero.b_forget.setZero();
    zero.u_input.setZero(); zero.z_input.setZero(); zero.b_input.setZero();
    zero.u_output.setZero(); zero.z_output.setZero(); zero.b_output.setZero();
    zero.u_cand.setZero(); zero.z_cand.setZero(); zero.b_cand.setZero();
    zero.w_readout.setZero(); zero.b_readout = 0.0;

    SUBCASE("both components equal: DI_F matches them") {
        // the zero network predicts exactly 0.5 and the recent mean is 0.5
        const auto di = demand_indicator(window, 4, zero, AggregationWeights::from_past(0.4));
        CHECK(di.di_past == 0.5);
        CHECK(di.di_future == 0.5);
        CHECK(di.di_final == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("full past weight ignores the forecast") {
        DemandWindow w2(6, {4});
        for (double v : {0.1, 0.1, 0.1, 0.3, 0.3, 0.3}) {
            w2.record_epoch({{4, v}});
        }
        const auto di = demand_indicator(w2, 4, zero, AggregationWeights::from_past(1.0));
        CHECK(di.di_past == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(di.di_final == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("betweenness holds for the composed triple") {
        const auto di = demand_indicator(window, 4, zero, AggregationWeights::from_past(0.7));
        CHECK(di.di_final >= std::min(di.di_past, di.di_future) - 1e-12);
        CHECK(di.di_final <= std::max(di.di_past, di.di_future) + 1e-12);
    }
    SUBCASE("insufficient history propagates") {
        DemandWindow fresh(6, {4});
        fresh.record_epoch({{4, 0.5}});
        CHECK_THROWS_AS(demand_indicator(fresh, 4, zero, AggregationWeights::from_past(0.5)),
                        InsufficientHistoryError);
    }
}
