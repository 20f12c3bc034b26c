#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "hdtac/core/rng.hpp"
#include "hdtac/eval/metrics.hpp"

using namespace hdtac;
using namespace hdtac::eval;

namespace {

// AUC as the fraction of (positive, negative) pairs ranked correctly, ties counting half.
double pair_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double good = 0, pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1;
                good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return good / pairs;
}

}  // namespace

TEST(Metrics, HandComputed) {
    // tp 3, tn 2, fp 1, fn 2
    const std::vector<int> t{1, 1, 1, 1, 1, 0, 0, 0}, p{1, 1, 1, 0, 0, 0, 0, 1};
    const auto m = compute_metrics(t, p);
    EXPECT_EQ(m.counts.tp, 3U);
    EXPECT_EQ(m.counts.tn, 2U);
    EXPECT_EQ(m.counts.fp, 1U);
    EXPECT_EQ(m.counts.fn, 2U);
    EXPECT_DOUBLE_EQ(m.accuracy, 5.0 / 8);
    EXPECT_DOUBLE_EQ(m.precision, 0.75);
    EXPECT_DOUBLE_EQ(m.recall, 0.6);
    EXPECT_DOUBLE_EQ(m.f1, 2 * 0.75 * 0.6 / 1.35);
    EXPECT_DOUBLE_EQ(m.sober_accuracy, 2.0 / 3);
    EXPECT_DOUBLE_EQ(m.drunk_accuracy, 0.6);
    const auto j = to_json(m);
    EXPECT_DOUBLE_EQ(j["accuracy_pct"].get<double>(), 62.5);
}

TEST(Metrics, ZeroDenominators) {
    const std::vector<int> t{0, 0}, p{0, 0};
    const auto m = compute_metrics(t, p);
    EXPECT_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_EQ(m.f1, 0.0);
    EXPECT_EQ(compute_metrics(std::vector<int>{}, std::vector<int>{}).accuracy, 0.0);
    EXPECT_THROW(compute_metrics(std::vector<int>{1}, std::vector<int>{}), InvalidValue);
}

TEST(Roc, EndpointsAndMonotone) {
    Rng r(1);
    std::vector<double> s(200);
    std::vector<int> y(200);
    for (std::size_t i = 0; i < s.size(); ++i) {
        y[i] = static_cast<int>(r.below(2));
        s[i] = std::round(10 * (r.normal() + y[i])) / 10;  // plenty of ties
    }
    const auto roc = roc_curve(s, y);
    EXPECT_EQ(roc.front().fpr, 0.0);
    EXPECT_EQ(roc.front().tpr, 0.0);
    EXPECT_EQ(roc.back().fpr, 1.0);
    EXPECT_EQ(roc.back().tpr, 1.0);
    for (std::size_t i = 1; i < roc.size(); ++i) {
        ASSERT_GE(roc[i].fpr, roc[i - 1].fpr);
        ASSERT_GE(roc[i].tpr, roc[i - 1].tpr);
    }
    EXPECT_NEAR(roc_auc(roc), pair_auc(s, y), 1e-12);
}

TEST(Roc, PerfectReversedAndSingleClass) {
    const std::vector<double> s{0.9, 0.8, 0.2, 0.1};
    EXPECT_DOUBLE_EQ(roc_auc(roc_curve(s, std::vector<int>{1, 1, 0, 0})), 1.0);
    EXPECT_DOUBLE_EQ(roc_auc(roc_curve(s, std::vector<int>{0, 0, 1, 1})), 0.0);
    const auto one = roc_curve(s, std::vector<int>{1, 1, 1, 1});
    EXPECT_EQ(one.back().tpr, 1.0);
    EXPECT_EQ(one.back().fpr, 1.0);
    const auto empty = roc_curve(std::vector<double>{}, std::vector<int>{});
    EXPECT_EQ(empty.front().fpr, 0.0);
    EXPECT_EQ(empty.back().fpr, 1.0);
}

TEST(Latency, NearestRank) {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    const auto s = summarize_latency(v);
    EXPECT_EQ(s.p50_s, 50.0);
    EXPECT_EQ(s.p95_s, 95.0);
    EXPECT_DOUBLE_EQ(s.mean_s, 50.5);
    const auto one = summarize_latency({0.25});
    EXPECT_EQ(one.p50_s, one.mean_s);
    EXPECT_EQ(one.p95_s, 0.25);
    EXPECT_EQ(summarize_latency({}).n, 0U);
}
