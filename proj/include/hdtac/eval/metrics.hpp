#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdtac/core/errors.hpp"

namespace hdtac::eval {

/// Binary confusion counts; positive = drunk (1).
struct Confusion {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    [[nodiscard]] std::size_t total() const noexcept { return tp + tn + fp + fn; }
};

inline Confusion confusion(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw InvalidValue("confusion: length mismatch");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == 1, p = predicted[i] == 1;
        if (t && p) ++c.tp;
        else if (!t && !p) ++c.tn;
        else if (p) ++c.fp;
        else ++c.fn;
    }
    return c;
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

/// All ratios are fractions in [0, 1]; a ratio with zero denominator is 0.
/// sober_accuracy is recall of class 0 and drunk_accuracy recall of class 1.
struct Metrics {
    Confusion counts;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double sober_accuracy = 0.0;
    double drunk_accuracy = 0.0;
};

inline double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline Metrics metrics_from(const Confusion& c) {
    Metrics m;
    m.counts = c;
    m.accuracy = ratio(c.tp + c.tn, c.total());
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.sober_accuracy = ratio(c.tn, c.tn + c.fp);
    m.drunk_accuracy = m.recall;
    return m;
}

inline Metrics compute_metrics(std::span<const int> truth, std::span<const int> predicted) {
    return metrics_from(confusion(truth, predicted));
}

/// ROC by sweeping a threshold over every distinct score (predict positive
/// when score >= threshold), plus the (0,0) endpoint at +inf. Points are
/// ordered by increasing fpr.
inline std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> truth) {
    if (scores.size() != truth.size()) throw InvalidValue("roc_curve: length mismatch");
    const std::size_t pos = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
    const std::size_t neg = truth.size() - pos;
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> out;
    out.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double thr = scores[order[i]];
        while (i < order.size() && scores[order[i]] == thr) {
            (truth[order[i]] == 1 ? tp : fp)++;
            ++i;
        }
        out.push_back({ratio(fp, neg), ratio(tp, pos), thr});
    }
    if (out.back().fpr != 1.0 || out.back().tpr != 1.0) out.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
    return out;
}

/// Trapezoidal area under the ROC points.
inline double roc_auc(const std::vector<RocPoint>& roc) {
    double a = 0.0;
    for (std::size_t i = 1; i < roc.size(); ++i)
        a += (roc[i].fpr - roc[i - 1].fpr) * 0.5 * (roc[i].tpr + roc[i - 1].tpr);
    return a;
}

inline nlohmann::json to_json(const Metrics& m) {
    return {{"accuracy", m.accuracy},
            {"accuracy_pct", 100.0 * m.accuracy},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"sober_accuracy", m.sober_accuracy},
            {"drunk_accuracy", m.drunk_accuracy},
            {"tp", m.counts.tp},
            {"tn", m.counts.tn},
            {"fp", m.counts.fp},
            {"fn", m.counts.fn}};
}

struct LatencySummary {
    double mean_s = 0.0;
    double p50_s = 0.0;
    double p95_s = 0.0;
    std::size_t n = 0;
};

/// Nearest-rank percentiles.
inline LatencySummary summarize_latency(std::vector<double> seconds) {
    LatencySummary s;
    s.n = seconds.size();
    if (seconds.empty()) return s;
    s.mean_s = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(seconds.size());
    std::sort(seconds.begin(), seconds.end());
    auto rank = [&](double q) {
        const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(seconds.size())));
        return seconds[std::clamp<std::size_t>(r, 1, seconds.size()) - 1];
    };
    s.p50_s = rank(0.50);
    s.p95_s = rank(0.95);
    return s;
}

}  // namespace hdtac::eval
