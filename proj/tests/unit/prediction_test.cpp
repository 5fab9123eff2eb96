#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "pfraud/evaluation.hpp"
#include "pfraud/prediction.hpp"
#include "pfraud/simulation.hpp"

using namespace pfraud;

namespace {

EventTimeline toy() { return EventTimeline("toy", {0, 1, 2, 3, 4, 5, 6, 7, 8}, {0, 0, 0, 0, 0, 0, 1, 0, 0}); }
const SplitSpec kToySplit{6.0 / 9.0};

}  // namespace

TEST(FraudProbability, Values) {
    const auto zero = IntensityModel::zero(Family::Constant, 1.0);
    EXPECT_EQ(fraud_probability(zero, 0.5, 100.0), 0.0);
    const auto ln2 = IntensityModel::constant(std::log(2.0), 1.0);
    EXPECT_NEAR(fraud_probability(ln2, 3.0, 4.0), 0.5, 1e-15);
    EXPECT_EQ(fraud_probability(ln2, 3.0, 3.0), 0.0);
    EXPECT_THROW(fraud_probability(ln2, 3.0, 2.0), std::invalid_argument);
    EXPECT_THROW(fraud_probability(ln2, -1.0, 2.0), std::invalid_argument);
}

TEST(FraudProbability, TendsToOne) {
    for (double lam : {1e-3, 0.5, 7.0}) {
        const auto m = IntensityModel::constant(lam, 1.0);
        double prev = 0.0;
        for (double gap : {0.0, 1e-3 / lam, 0.1 / lam, 1.0 / lam, 10.0 / lam, 1e6 / lam}) {
            const double p = fraud_probability(m, 1.0, 1.0 + gap);
            EXPECT_GE(p, prev);
            EXPECT_LE(p, 1.0);
            prev = p;
        }
        EXPECT_GE(prev, 1.0 - 1e-9);
    }
}

TEST(FraudProbability, ClampsNegativeExtrapolation) {
    // Decreasing line, zero at T = 10, negative beyond.
    const auto m = IntensityModel::linear(1.0, -0.1, 10.0);
    bool clamped = false;
    EXPECT_EQ(fraud_probability(m, 15.0, 16.0, &clamped), 0.0);
    EXPECT_TRUE(clamped);
    EXPECT_GT(fraud_probability(m, 2.0, 3.0, &clamped), 0.0);
    EXPECT_FALSE(clamped);
}

TEST(FraudProbability, MonotoneInNewTime) {
    Philox4x32 rng(5);
    for (int k = 0; k < 200; ++k) {
        const double T = 1.0 + 10.0 * rng.uniform();
        const double a = rng.uniform();
        const auto m = IntensityModel::quadratic(a, -a * rng.uniform() / T, 0.1 * rng.uniform(), T);
        // Inside the window; past T a negative slope may turn the compensator down.
        double u[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        std::sort(u, u + 3);
        const double from = T * u[0], t1 = T * u[1], t2 = T * u[2];
        EXPECT_LE(fraud_probability(m, from, t1), fraud_probability(m, from, t2));
    }
}

TEST(Static, EqualGapsGiveEqualScores) {
    FitResult fit;
    fit.model = IntensityModel::constant(std::log(2.0), 5.0);
    const EventTimeline train("c", {0, 1, 2, 3, 4, 5}, {0, 1, 0, 0, 0, 0});
    const EventTimeline test("c", {6, 7, 8}, {0, 0, 1});
    const auto s = predict_static(ModelName::HomoStatic, fit, train, test);
    ASSERT_EQ(s.scores.size(), 3u);
    for (double v : s.scores) EXPECT_NEAR(v, 0.5, 1e-15);
    EXPECT_EQ(s.labels, (std::vector<std::uint8_t>{0, 0, 1}));
}

TEST(Static, ZeroGapScoresZero) {
    FitResult fit;
    fit.model = IntensityModel::constant(3.0, 5.0);
    const EventTimeline train("c", {0, 5}, {1, 0});
    const EventTimeline test("c", {5}, {1}, 5);
    // A test event at the training horizon is only possible with a tie; build it directly.
    const auto s = predict_static(ModelName::HomoStatic, fit, train, test);
    EXPECT_EQ(s.scores[0], 0.0);
}

TEST(Static, ShiftInvarianceOfConstantScores) {
    FitResult fit;
    fit.model = IntensityModel::constant(0.8, 10.0);
    const EventTimeline train("c", {0, 4, 10}, {0, 1, 0});
    const EventTimeline test("c", {10.5, 12, 12.25}, {0, 1, 0});
    const EventTimeline train2("c", {0, 4, 10, 13}, {0, 1, 0, 0});
    const EventTimeline test2("c", {13.5, 15, 15.25}, {0, 1, 0});
    const auto a = predict_static(ModelName::HomoStatic, fit, train, test);
    const auto b = predict_static(ModelName::HomoStatic, fit, train2, test2);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.scores[i], b.scores[i], 1e-15);
}

TEST(Static, EmptyTestAndBadOrder) {
    FitResult fit;
    const EventTimeline train("c", {0, 1}, {0, 0});
    EXPECT_TRUE(predict_static(ModelName::HomoStatic, fit, train, EventTimeline()).scores.empty());
    const EventTimeline early("c", {0.5}, {0});
    EXPECT_THROW(predict_static(ModelName::HomoStatic, fit, train, early), std::invalid_argument);
}

TEST(Toy, StaticModelsScoreZeroAndAucHalf) {
    for (ModelName m : {ModelName::HomoStatic, ModelName::LinearStatic, ModelName::QuadraticStatic}) {
        const auto s = predict_model(m, toy(), kToySplit);
        EXPECT_EQ(s.scores, (std::vector<double>{0, 0, 0}));
        EXPECT_EQ(s.zero_convention_fits, 1u);
        EXPECT_EQ(roc_auc(s), 0.5);
    }
}

TEST(Toy, DynamicModelsGiveAucZero) {
    for (ModelName m : {ModelName::HomoDynamic, ModelName::LinearDynamic, ModelName::QuadraticDynamic}) {
        const auto s = predict_model(m, toy(), kToySplit);
        ASSERT_EQ(s.scores.size(), 3u);
        EXPECT_EQ(s.scores[0], 0.0) << model_label(m);
        EXPECT_GT(s.scores[1], 0.0) << model_label(m);
        EXPECT_GT(s.scores[2], 0.0) << model_label(m);
        EXPECT_EQ(roc_auc(s), 0.0) << model_label(m);
    }
}

TEST(Toy, HomoDynamicByHand) {
    // After the fraud at t=6 the waiting-time rate is 1/6; the next gap is 1.
    const auto s = predict_model(ModelName::HomoDynamic, toy(), kToySplit);
    EXPECT_NEAR(s.scores[1], 1.0 - std::exp(-1.0 / 6.0), 1e-15);
}

TEST(Dynamic, AllGenuineScoresZero) {
    const EventTimeline tl("c", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, std::vector<std::uint8_t>(10, 0));
    for (ModelName m : {ModelName::HomoDynamic, ModelName::LinearDynamic, ModelName::QuadraticDynamic}) {
        const auto s = predict_model(m, tl, SplitSpec{});
        EXPECT_EQ(s.scores, (std::vector<double>{0, 0}));
        EXPECT_EQ(s.zero_convention_fits, 2u);
    }
}

TEST(Dynamic, RateTracksStationaryTruth) {
    // Per-step rate estimates once the window holds >= 30 frauds.
    SimSpec spec;
    spec.genuine_rate = 4.0;
    spec.horizon_days = 400.0;
    spec.fraud_model = IntensityModel::constant(1.0, 400.0);
    spec.seed = 17;
    const auto tl = simulate_client(spec, 0);
    const auto times = tl.times();
    const auto labels = tl.labels();
    std::vector<double> rates;
    std::vector<double> frauds;
    for (std::size_t j = 1; j < tl.size(); ++j) {
        if (labels[j - 1]) frauds.push_back(times[j - 1]);
        if (frauds.size() < 30) continue;
        rates.push_back(estimate_hpp(frauds, times[j - 1]).model.params()[0]);
    }
    ASSERT_GT(rates.size(), 50u);
    EXPECT_LT(std::abs(oracle::median(rates) - 1.0), 0.2);

    // And the scores predict_dynamic emits are those rates applied to the gaps.
    const std::size_t k = train_size(tl.size(), SplitSpec{});
    const auto s = predict_dynamic(ModelName::HomoDynamic, tl, k);
    std::vector<double> window;
    for (std::size_t i = 0; i < k; ++i)
        if (labels[i]) window.push_back(times[i]);
    for (std::size_t j = k; j < tl.size(); ++j) {
        const double lam = estimate_hpp(window, times[j - 1]).model.params()[0];
        EXPECT_NEAR(s.scores[j - k], -std::expm1(-lam * (times[j] - times[j - 1])), 1e-15);
        if (labels[j]) window.push_back(times[j]);
    }
}

TEST(Dynamic, FixedWindowReZeroes) {
    const EventTimeline tl("c", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {1, 0, 0, 1, 0, 1, 0, 0, 1, 0});
    // Window of 3 before position 8: events 5,6,7 re-zeroed at t=4, frauds at 1 -> rate 1/1.
    const auto s = predict_dynamic(ModelName::HomoDynamic, tl, 8, WindowPolicy::fixed(3));
    EXPECT_NEAR(s.scores[0], 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_EQ(WindowPolicy::parse("fixed:3").size, 3u);
    EXPECT_EQ(WindowPolicy::parse("expanding").kind, WindowPolicy::Kind::Expanding);
    EXPECT_THROW(WindowPolicy::parse("fixed:0"), std::invalid_argument);
    EXPECT_THROW(WindowPolicy::parse("sliding"), std::invalid_argument);
}

TEST(Naive, TrainingProportion) {
    const EventTimeline train("c", {0, 1, 2, 3}, {0, 1, 0, 1});
    const EventTimeline test("c", {4, 5, 6}, {0, 0, 1});
    EXPECT_EQ(predict_naive(train, test).scores, (std::vector<double>{0.5, 0.5, 0.5}));
    const EventTimeline clean("c", {0, 1}, {0, 0});
    EXPECT_EQ(predict_naive(clean, test).scores, (std::vector<double>{0, 0, 0}));
    EXPECT_THROW(predict_naive(EventTimeline(), test), std::invalid_argument);
    EXPECT_EQ(roc_auc(predict_naive(train, test)), 0.5);
}

TEST(Scores, AlwaysProbabilities) {
    SimSpec spec;
    spec.n_clients = 6;
    spec.genuine_rate = 3.0;
    spec.horizon_days = 20.0;
    spec.fraud_model = IntensityModel::linear(0.5, -0.02, 20.0);
    spec.seed = 3;
    for (const auto& tl : simulate_dataset(spec))
        for (ModelName m : kAllModels) {
            const auto s = predict_model(m, tl, SplitSpec{});
            ASSERT_EQ(s.scores.size(), s.labels.size());
            for (double v : s.scores) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
}

TEST(Models, NamesRoundTrip) {
    for (ModelName m : kAllModels) EXPECT_EQ(parse_model(model_label(m)), m);
    EXPECT_THROW(parse_model("Cubic"), std::invalid_argument);
    EXPECT_FALSE(model_family(ModelName::NaiveStatic).has_value());
    EXPECT_TRUE(is_dynamic(ModelName::LinearDynamic));
}
