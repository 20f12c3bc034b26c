#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "hdtac/core/errors.hpp"

namespace hdtac::features {

struct BasicStats {
    double mean = 0.0;
    double std = 0.0;  // population
    double median = 0.0;
};

inline BasicStats basic_stats(std::span<const double> x) {
    if (x.empty()) throw InvalidValue("basic_stats: empty signal");
    const auto n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);

    std::vector<double> sorted(x.begin(), x.end());
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    double median = sorted[mid];
    if (sorted.size() % 2 == 0) {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    return {mean, std::sqrt(ss / n), median};
}

inline double rms(std::span<const double> x) {
    if (x.empty()) throw InvalidValue("rms: empty signal");
    double ss = 0.0;
    for (double v : x) ss += v * v;
    return std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace hdtac::features
