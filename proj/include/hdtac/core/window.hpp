#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hdtac {

inline constexpr std::size_t kWindowLength = 400;
inline constexpr double kSampleRateHz = 40.0;

/// One accelerometer window: samples in g, timestamps in epoch milliseconds.
struct RawWindow {
    std::vector<std::array<float, 3>> samples;
    std::vector<std::int64_t> times;
    std::string pid;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
    [[nodiscard]] std::int64_t start_ms() const { return times.empty() ? 0 : times.front(); }
};

/// Engineered features in the order of the active selection.
struct FeatureVector {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

}  // namespace hdtac
