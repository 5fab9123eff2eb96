#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "pfraud/evaluation.hpp"
#include "pfraud/random.hpp"

using namespace pfraud;

namespace {

using Labels = std::vector<std::uint8_t>;

std::optional<double> auc(std::vector<double> s, Labels y) { return roc_auc(s, y); }
std::optional<double> ap(std::vector<double> s, Labels y) { return average_precision(s, y); }

}  // namespace

TEST(Auc, WorkedExamples) {
    EXPECT_EQ(auc({0.3, 0.3, 0.3}, {1, 0, 0}), 0.5);
    EXPECT_EQ(auc({0, 0.7, 0.7}, {1, 0, 0}), 0.0);
    EXPECT_EQ(auc({0.9, 0.1}, {1, 0}), 1.0);
}

TEST(Auc, UndefinedForOneClass) {
    EXPECT_FALSE(auc({0.1, 0.2}, {0, 0}));
    EXPECT_FALSE(auc({0.1, 0.2}, {1, 1}));
    EXPECT_FALSE(auc({}, {}));
    EXPECT_THROW(auc({0.1}, {1, 0}), std::invalid_argument);
}

TEST(Ap, Examples) {
    EXPECT_EQ(ap({0.9, 0.5, 0.1}, {1, 0, 0}), 1.0);
    EXPECT_EQ(ap({0.9, 0.5, 0.1}, {0, 1, 0}), 0.5);
    // Constant scores: precision at the single threshold is the prevalence.
    EXPECT_DOUBLE_EQ(*ap({0.2, 0.2, 0.2, 0.2, 0.2}, {1, 0, 1, 0, 0}), 2.0 / 5.0);
    EXPECT_FALSE(ap({0.2, 0.3}, {0, 0}));
}

TEST(Metrics, PerfectAndReversedRankings) {
    EXPECT_EQ(auc({0.9, 0.8, 0.3, 0.1}, {1, 1, 0, 0}), 1.0);
    EXPECT_EQ(ap({0.9, 0.8, 0.3, 0.1}, {1, 1, 0, 0}), 1.0);
    EXPECT_EQ(auc({0.1, 0.2, 0.3, 0.4}, {1, 1, 0, 0}), 0.0);
}

TEST(Metrics, MatchBruteForceOracles) {
    Philox4x32 rng(31337);
    int compared = 0;
    for (int k = 0; k < 2000; ++k) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<double> s(n);
        Labels y(n);
        // Coarse levels so ties are common.
        const std::uint64_t levels = 1 + rng.below(6);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng.below(levels)) / static_cast<double>(levels);
            y[i] = static_cast<std::uint8_t>(rng.below(2));
        }
        const auto a = roc_auc(s, y), ao = oracle::pairwise_auc(s, y);
        ASSERT_EQ(a.has_value(), ao.has_value());
        if (a) EXPECT_EQ(*a, *ao);
        const auto p = average_precision(s, y), po = oracle::threshold_ap(s, y);
        ASSERT_EQ(p.has_value(), po.has_value());
        if (p) EXPECT_NEAR(*p, *po, 1e-12);
        compared += a.has_value();
    }
    EXPECT_GT(compared, 1000);
}

TEST(Auc, InvariantUnderIncreasingTransform) {
    Philox4x32 rng(8);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + rng.below(30);
        std::vector<double> s(n), t(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::round(rng.uniform() * 8.0) / 8.0;
            t[i] = std::exp(3.0 * s[i]) - 7.0;
            y[i] = rng.uniform() < 0.3;
        }
        EXPECT_EQ(roc_auc(s, y), roc_auc(t, y));
    }
}

TEST(Groups, BoundariesInclusive) {
    EXPECT_EQ(classify(1, 100), Group::G1);
    EXPECT_EQ(classify(2, 100), Group::G2);
    EXPECT_EQ(classify(5, 100), Group::G2);
    EXPECT_EQ(classify(6, 100), Group::G3);
    EXPECT_EQ(classify(10, 100), Group::G3);
    EXPECT_EQ(classify(11, 100), Group::G4);
    EXPECT_EQ(classify(20, 100), Group::G4);
    EXPECT_EQ(classify(21, 100), std::nullopt);
    EXPECT_EQ(classify(0, 10), std::nullopt);
    EXPECT_EQ(classify(3, 10), std::nullopt);
    EXPECT_EQ(classify(1, 3), std::nullopt);
}

TEST(Groups, GroupClients) {
    std::vector<EventTimeline> tls;
    auto make = [](std::string id, std::size_t n, std::size_t k) {
        std::vector<double> t(n);
        Labels y(n, 0);
        for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i);
        for (std::size_t i = 0; i < k; ++i) y[i] = 1;
        return EventTimeline(std::move(id), std::move(t), std::move(y));
    };
    tls.push_back(make("a", 100, 1));
    tls.push_back(make("b", 10, 0));
    tls.push_back(make("c", 10, 3));
    tls.push_back(make("d", 10, 1));
    const auto g = group_clients(tls);
    EXPECT_EQ(g.at(Group::G1), std::vector<std::string>{"a"});
    EXPECT_EQ(g.at(Group::G3), std::vector<std::string>{"d"});
    EXPECT_EQ(g.count(Group::G2), 0u);
}

TEST(Sampling, SeededAndSorted) {
    std::vector<std::string> ids;
    for (int i = 0; i < 50; ++i) ids.push_back("id" + std::to_string(i));
    const auto a = sample_clients(ids, 10, 4);
    EXPECT_EQ(a, sample_clients(ids, 10, 4));
    EXPECT_NE(a, sample_clients(ids, 10, 5));
    EXPECT_EQ(a.size(), 10u);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    EXPECT_EQ(sample_clients(ids, 100, 4).size(), 50u);
}

TEST(Summarize, SingleClient) {
    const std::vector<ClientMetrics> m{{"a", Group::G2, ModelName::LinearStatic, 0.7, 0.4}};
    const auto r = summarize(m);
    const auto* s = r.find(ModelName::LinearStatic, Group::G2, Metric::Auc);
    ASSERT_NE(s, nullptr);
    EXPECT_EQ(s->max, 0.7);
    EXPECT_EQ(s->mean, 0.7);
    EXPECT_EQ(s->min, 0.7);
    EXPECT_EQ(s->std, 0.0);
}

TEST(Summarize, PopulationStdAndExclusions) {
    const std::vector<ClientMetrics> m{
        {"a", Group::G1, ModelName::HomoStatic, 0.2, 0.1},
        {"b", Group::G1, ModelName::HomoStatic, 0.6, std::nullopt},
        {"c", Group::G1, ModelName::HomoStatic, std::nullopt, 0.3},
    };
    const auto r = summarize(m);
    const auto* auc_row = r.find(ModelName::HomoStatic, Group::G1, Metric::Auc);
    EXPECT_DOUBLE_EQ(auc_row->mean, 0.4);
    EXPECT_DOUBLE_EQ(auc_row->std, 0.2);
    EXPECT_EQ(auc_row->count, 2u);
    EXPECT_EQ(auc_row->excluded, 1u);
}

TEST(Summarize, NaiveAucRowIsHalf) {
    std::vector<ClientMetrics> m;
    for (int i = 0; i < 30; ++i) m.push_back({"c" + std::to_string(i), Group::G3, ModelName::NaiveStatic, 0.5, 0.1 * (i % 4)});
    const auto* s = summarize(m).find(ModelName::NaiveStatic, Group::G3, Metric::Auc);
    EXPECT_EQ(s->mean, 0.5);
    EXPECT_EQ(s->std, 0.0);
}

TEST(Summarize, EmptyCellIsDiagnosed) {
    const std::vector<ClientMetrics> m{{"a", Group::G1, ModelName::HomoStatic, std::nullopt, std::nullopt}};
    const auto r = summarize(m);
    EXPECT_TRUE(r.summaries.empty());
    EXPECT_EQ(r.diagnostics.size(), 2u);
}

TEST(RelativeMap, Formula) {
    EXPECT_NEAR(relative_variation(0.390334, 0.022027), 16.721054, 1e-3);
    EXPECT_NEAR(relative_variation(0.39, 0.022), 16.727, 1e-3);
    EXPECT_THROW(relative_variation(0.3, 0.0), std::invalid_argument);
}

TEST(RelativeMap, ComputedPerGroupAgainstNaive) {
    const std::vector<ClientMetrics> m{
        {"a", Group::G1, ModelName::NaiveStatic, 0.5, 0.02},
        {"a", Group::G1, ModelName::HomoStatic, 0.8, 0.3},
        {"b", Group::G2, ModelName::NaiveStatic, 0.5, 0.1},
        {"b", Group::G2, ModelName::HomoStatic, 0.8, 0.3},
    };
    const auto r = summarize(m);
    EXPECT_NEAR(r.relative_map.at({ModelName::HomoStatic, Group::G1}), 14.0, 1e-12);
    EXPECT_NEAR(r.relative_map.at({ModelName::HomoStatic, Group::G2}), 2.0, 1e-12);
    EXPECT_EQ(r.relative_map.count({ModelName::NaiveStatic, Group::G1}), 0u);
}
