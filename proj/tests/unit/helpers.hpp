#pragma once

#include <cmath>
#include <vector>

#include "hdtac/core/rng.hpp"
#include "hdtac/core/window.hpp"
#include "hdtac/encoders/config.hpp"

namespace testing_helpers {

inline hdtac::RawWindow random_window(hdtac::Rng& rng, std::size_t n = hdtac::kWindowLength, double scale = 0.8) {
    hdtac::RawWindow w;
    w.pid = "T";
    for (std::size_t i = 0; i < n; ++i) {
        w.samples.push_back({static_cast<float>(scale * rng.normal()), static_cast<float>(scale * rng.normal()),
                             static_cast<float>(1.0 + scale * rng.normal())});
        w.times.push_back(static_cast<std::int64_t>(i) * 25);
    }
    return w;
}

inline hdtac::RawWindow constant_window(float x, float y, float z, std::size_t n = hdtac::kWindowLength) {
    hdtac::RawWindow w;
    for (std::size_t i = 0; i < n; ++i) {
        w.samples.push_back({x, y, z});
        w.times.push_back(static_cast<std::int64_t>(i) * 25);
    }
    return w;
}

inline hdtac::FeatureVector random_features(hdtac::Rng& rng, std::size_t k) {
    hdtac::FeatureVector f;
    for (std::size_t i = 0; i < k; ++i) f.values.push_back(rng.uniform(0.0, 1.0));
    return f;
}

inline hdtac::EncoderConfig config(hdtac::EncoderVariant v, std::size_t d, std::size_t features = 8,
                                   std::uint64_t seed = 1) {
    hdtac::EncoderConfig c;
    c.variant = v;
    c.dim = d;
    c.seed = seed;
    c.feature_ranges.assign(features, {0.0, 1.0});
    return c;
}

template <typename A, typename B>
double cos_of(const A& a, const B& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += static_cast<double>(a[i]) * b[i];
        aa += static_cast<double>(a[i]) * a[i];
        bb += static_cast<double>(b[i]) * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

}  // namespace testing_helpers
