#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hdtac/core/rng.hpp"
#include "hdtac/core/window.hpp"
#include "hdtac/dataset/records.hpp"

namespace hdtac::dataset {

inline constexpr double kDefaultFilterTauS = 90.0 * 60.0;
inline constexpr double kDefaultShiftMinutes = 45.0;
inline constexpr double kDefaultThreshold = 0.08;

/// Zero-phase low-pass: first-order exponential smoothing run forward, then
/// backward over the forward output. The per-step coefficient is
/// 1 - exp(-dt / tau) for the actual spacing dt, so uneven series are
/// handled. Series with fewer than 3 points are returned unchanged.
inline std::vector<TacRecord> filter_tac(std::vector<TacRecord> series, double tau_s = kDefaultFilterTauS) {
    const std::size_t n = series.size();
    if (n < 3) return series;
    auto coeff = [&](std::size_t a, std::size_t b) {
        const double dt = std::abs(series[b].timestamp - series[a].timestamp);
        return 1.0 - std::exp(-dt / tau_s);
    };
    std::vector<double> fwd(n);
    fwd[0] = series[0].tac;
    for (std::size_t i = 1; i < n; ++i) {
        const double a = coeff(i - 1, i);
        fwd[i] = (1.0 - a) * fwd[i - 1] + a * series[i].tac;
    }
    series[n - 1].tac = fwd[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        const double a = coeff(i, i + 1);
        series[i].tac = (1.0 - a) * series[i + 1].tac + a * fwd[i];
    }
    return series;
}

/// Moves every reading `minutes` earlier.
inline std::vector<TacRecord> shift_tac(std::vector<TacRecord> series, double minutes = kDefaultShiftMinutes) {
    for (auto& r : series) r.timestamp -= minutes * 60.0;
    return series;
}

/// Linear interpolation; nullopt outside [first, last].
inline std::optional<double> interpolate_tac(const std::vector<TacRecord>& series, double t) {
    if (series.empty() || t < series.front().timestamp || t > series.back().timestamp) return std::nullopt;
    auto hi = std::lower_bound(series.begin(), series.end(), t,
                               [](const TacRecord& r, double v) { return r.timestamp < v; });
    if (hi->timestamp == t) return hi->tac;
    const auto lo = hi - 1;
    const double w = (t - lo->timestamp) / (hi->timestamp - lo->timestamp);
    return lo->tac + w * (hi->tac - lo->tac);
}

struct Sample {
    std::int64_t time = 0;
    std::array<float, 3> xyz{};
};

struct WindowingOptions {
    std::size_t length = kWindowLength;
    std::size_t stride = 200;
    // Windows whose first-to-last span exceeds this are dropped.
    double max_span_ms = 2.0 * (1000.0 / kSampleRateHz) * static_cast<double>(kWindowLength);
};

struct WindowingResult {
    std::vector<RawWindow> windows;
    std::size_t dropped_gap = 0;
};

/// Fixed-length windows over time-sorted samples of one participant; the short tail is discarded.
inline WindowingResult window_stream(const std::vector<Sample>& samples, const std::string& pid,
                                     const WindowingOptions& opt = {}) {
    WindowingResult out;
    if (opt.length == 0 || opt.stride == 0) throw InvalidConfig("window_stream: length and stride must be positive");
    for (std::size_t start = 0; start + opt.length <= samples.size(); start += opt.stride) {
        const auto span = static_cast<double>(samples[start + opt.length - 1].time - samples[start].time);
        if (span > opt.max_span_ms) {
            ++out.dropped_gap;
            continue;
        }
        RawWindow w;
        w.pid = pid;
        w.samples.reserve(opt.length);
        w.times.reserve(opt.length);
        for (std::size_t i = start; i < start + opt.length; ++i) {
            w.samples.push_back(samples[i].xyz);
            w.times.push_back(samples[i].time);
        }
        out.windows.push_back(std::move(w));
    }
    return out;
}

inline double window_midpoint_s(const RawWindow& w) {
    return 0.5 * static_cast<double>(w.times.front() + w.times.back()) / 1000.0;
}

struct LabelingResult {
    std::vector<LabeledSample> samples;
    std::size_t dropped_coverage = 0;
};

/// TAC interpolated at each window's midpoint; label = tac >= threshold.
inline LabelingResult label_windows(std::vector<RawWindow> windows, const std::vector<TacRecord>& tac,
                                    double threshold = kDefaultThreshold) {
    LabelingResult out;
    for (auto& w : windows) {
        const auto v = interpolate_tac(tac, window_midpoint_s(w));
        if (!v) {
            ++out.dropped_coverage;
            continue;
        }
        LabeledSample s;
        s.tac = *v;
        s.label = *v >= threshold ? 1 : 0;
        s.pid = w.pid;
        s.window_start = w.start_ms();
        s.window = std::move(w);
        out.samples.push_back(std::move(s));
    }
    return out;
}

enum class SplitMode { Shuffled, Chronological };

inline SplitMode parse_split_mode(const std::string& s) {
    if (s == "shuffled") return SplitMode::Shuffled;
    if (s == "ordered" || s == "chronological") return SplitMode::Chronological;
    throw InvalidConfig("unknown split mode '" + s + "' (expected shuffled|ordered)");
}

inline std::string to_string(SplitMode m) { return m == SplitMode::Shuffled ? "shuffled" : "ordered"; }

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct SplitOptions {
    SplitMode mode = SplitMode::Shuffled;
    double ratio = 0.7;
    std::uint64_t seed = 0;
    // Shuffled mode only: cut each participant separately.
    bool within_participant = false;
};

inline std::size_t train_count(std::size_t n, double ratio) {
    return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

/// Shuffled: seeded Fisher-Yates then cut. Chronological: stable sort by
/// window start across participants, the last (1 - ratio) is test.
inline SplitIndices split_indices(const std::vector<LabeledSample>& samples, const SplitOptions& opt) {
    if (!(opt.ratio > 0.0 && opt.ratio < 1.0)) throw InvalidConfig("split ratio must be in (0, 1)");
    SplitIndices out;
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(opt.seed);

    auto cut = [&](const std::vector<std::size_t>& order) {
        const std::size_t k = train_count(order.size(), opt.ratio);
        out.train.insert(out.train.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        out.test.insert(out.test.end(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    };

    if (opt.mode == SplitMode::Chronological) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return samples[a].window_start < samples[b].window_start; });
        cut(idx);
    } else if (!opt.within_participant) {
        shuffle(idx.begin(), idx.end(), rng);
        cut(idx);
    } else {
        std::vector<std::string> pids;
        for (const auto& s : samples)
            if (std::find(pids.begin(), pids.end(), s.pid) == pids.end()) pids.push_back(s.pid);
        std::sort(pids.begin(), pids.end());
        for (const auto& pid : pids) {
            std::vector<std::size_t> mine;
            for (std::size_t i : idx)
                if (samples[i].pid == pid) mine.push_back(i);
            shuffle(mine.begin(), mine.end(), rng);
            cut(mine);
        }
    }
    return out;
}

}  // namespace hdtac::dataset
