#pragma once

// Synthetic data in the Bar Crawl on-disk layout, for tests, demos and benchmarks
// when the real dataset is not available.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/rng.hpp"
#include "hdtac/core/window.hpp"
#include "hdtac/dataset/ingest.hpp"
#include "hdtac/features/catalog.hpp"

namespace hdtac::synthetic {

struct Options {
    std::size_t participants = 3;
    double minutes = 20.0;        // accelerometer recording per participant
    double peak_tac = 0.16;  // twice the label threshold
    std::uint64_t seed = 0;
    std::int64_t start_ms = 1493730000000;  // 2017-05-02
};

/// Sober for the first half of the session, at `peak` afterwards. The
/// zero-phase TAC filter takes a step to half height at the step itself, so
/// with peak = 2 x threshold the labels flip where the gait does.
inline double intoxication(double u, double peak) { return u < 0.5 ? 0.0 : peak; }

/// One accelerometer sample. Sober gait is faster and steadier; drunk gait
/// slower with more sway and noise.
inline std::array<float, 3> gait_sample(double t_s, double level, double phase, Rng& rng) {
    const double w = std::clamp(level / 0.16, 0.0, 1.0);
    const double f = 2.0 - 0.6 * w;
    const double sway = 0.05 + 0.25 * w;
    const double noise = 0.03 + 0.08 * w;
    const double two_pi = 2.0 * std::numbers::pi;
    const double x = 0.3 * std::sin(two_pi * f * t_s + phase) + sway * std::sin(two_pi * 0.3 * t_s) + noise * rng.normal();
    const double y = 0.2 * std::cos(two_pi * f * t_s + phase) + sway * std::cos(two_pi * 0.2 * t_s) + noise * rng.normal();
    const double z = 1.0 + 0.4 * std::sin(two_pi * 2.0 * f * t_s + phase) + noise * rng.normal();
    return {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)};
}

inline std::string pid_name(std::size_t i) {
    static const char* const names[] = {"BK7610", "BU4707", "CC6740", "DC6359", "DK3500", "HV0618", "JB3156",
                                        "JR8022", "MC7070", "MJ8002", "PC6771", "SA0297", "SF3079"};
    return i < std::size(names) ? names[i] : "SY" + std::to_string(1000 + i);
}

/// Writes `<dir>/all_accelerometer_data_pids_13.csv` and `<dir>/clean_tac/*`.
/// Raw TAC lags the signal by 45 minutes, as the real sensor does.
inline void write_dataset(const std::string& dir, const Options& opt) {
    namespace fs = std::filesystem;
    if (opt.participants == 0 || !(opt.minutes > 0.0)) throw InvalidConfig("synthetic: empty dataset requested");
    fs::create_directories(fs::path(dir) / dataset::kTacDir);
    std::ofstream acc(fs::path(dir) / dataset::kAccelFile);
    if (!acc) throw Error("synthetic: cannot write into '" + dir + "'");
    acc << "time,pid,x,y,z\n";
    acc.precision(6);

    Rng root(opt.seed);
    const double dt_ms = 1000.0 / kSampleRateHz;
    const auto n = static_cast<std::size_t>(opt.minutes * 60.0 * kSampleRateHz);
    const double lag_s = 45.0 * 60.0;
    for (std::size_t p = 0; p < opt.participants; ++p) {
        Rng rng = root.derive(p + 1);
        const std::string pid = pid_name(p);
        const std::int64_t t0 = opt.start_ms + static_cast<std::int64_t>(p) * 7;
        const double session_s = opt.minutes * 60.0;
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < n; ++i) {
            const double t_s = static_cast<double>(i) * dt_ms / 1000.0;
            const auto s = gait_sample(t_s, intoxication(t_s / session_s, opt.peak_tac), phase, rng);
            acc << t0 + static_cast<std::int64_t>(std::llround(static_cast<double>(i) * dt_ms)) << ',' << pid << ','
                << s[0] << ',' << s[1] << ',' << s[2] << '\n';
        }

        std::ofstream tac(fs::path(dir) / dataset::kTacDir / (pid + "_clean_TAC.csv"));
        tac << "timestamp,TAC_Reading\n";
        tac.precision(12);
        const double start_s = static_cast<double>(t0) / 1000.0;
        for (double t = -4 * 3600.0; t <= session_s + lag_s + 4 * 3600.0; t += 60.0) {
            const double u = (t - lag_s) / session_s;
            tac << start_s + t << ',' << intoxication(u, opt.peak_tac) << '\n';
        }
    }
    if (!acc) throw Error("synthetic: write failed in '" + dir + "'");
}

/// An unlabeled window of synthetic gait at a fixed intoxication level.
inline RawWindow window(double level, Rng& rng, std::int64_t start_ms = 0) {
    RawWindow w;
    w.pid = "SYNTH";
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double offset = rng.uniform(0.0, 100.0);
    for (std::size_t i = 0; i < kWindowLength; ++i) {
        const double t = offset + static_cast<double>(i) / kSampleRateHz;
        w.samples.push_back(gait_sample(t, level, phase, rng));
        w.times.push_back(start_ms + static_cast<std::int64_t>(i) * 25);
    }
    return w;
}

/// `n` independent windows at uniform random levels in [0, 0.16], labeled
/// against `threshold`, with features for `spec`.
inline std::vector<dataset::LabeledSample> labeled_windows(std::size_t n, std::uint64_t seed,
                                                           const features::FeatureSpec& spec, double threshold) {
    Rng rng(seed);
    std::vector<dataset::LabeledSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double level = rng.uniform(0.0, 0.16);
        auto& s = out[i];
        s.window = window(level, rng, static_cast<std::int64_t>(i) * 5000);
        s.features = features::assemble_features(s.window, spec);
        s.tac = level;
        s.label = level >= threshold ? 1 : 0;
        s.pid = s.window.pid;
        s.window_start = s.window.start_ms();
    }
    return out;
}

}  // namespace hdtac::synthetic
