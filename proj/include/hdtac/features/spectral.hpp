#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "hdtac/core/errors.hpp"

namespace hdtac::features {

/// Real-input DFT with cached twiddles, one-sided output (n/2 + 1 bins).
/// Windows here are short (64 or 400 samples), so the direct O(n^2) sum is
/// cheap next to encoding.
class RealDft {
public:
    explicit RealDft(std::size_t n) : n_(n), bins_(n / 2 + 1), cos_(n), sin_(n) {
        if (n == 0) throw InvalidValue("RealDft: empty length");
        for (std::size_t k = 0; k < n; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            cos_[k] = std::cos(a);
            sin_[k] = std::sin(a);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t bins() const noexcept { return bins_; }

    /// |X_k|^2 for k in [0, n/2].
    void power(std::span<const double> x, std::span<double> out) const {
        for (std::size_t k = 0; k < bins_; ++k) {
            double re = 0.0, im = 0.0;
            std::size_t idx = 0;
            for (std::size_t t = 0; t < n_; ++t) {
                re += x[t] * cos_[idx];
                im -= x[t] * sin_[idx];
                idx += k;
                if (idx >= n_) idx -= n_;
            }
            out[k] = re * re + im * im;
        }
    }

    /// Shared instance per length; thread-safe.
    static const RealDft& get(std::size_t n) {
        static std::mutex mu;
        static std::map<std::size_t, std::unique_ptr<RealDft>> cache;
        std::lock_guard lock(mu);
        auto& slot = cache[n];
        if (!slot) slot = std::make_unique<RealDft>(n);
        return *slot;
    }

private:
    std::size_t n_;
    std::size_t bins_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

struct SpectralDescriptors {
    double centroid = 0.0;      // Hz
    double spread = 0.0;        // Hz
    double entropy_freq = 0.0;  // nats
    double entropy_time = 0.0;  // nats
};

inline constexpr std::size_t kTimeEntropyBins = 32;

/// Shannon entropy (nats) of non-negative weights normalized to sum 1. Zero total gives 0.
inline double shannon_entropy(std::span<const double> w) {
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) return 0.0;
    double h = 0.0;
    for (double v : w) {
        if (v <= 0.0) continue;
        const double p = v / total;
        h -= p * std::log(p);
    }
    return h;
}

/// Magnitude-spectrum centroid/spread, spectral entropy, and the entropy of
/// a 32-bin min-max histogram of the samples. A signal with no spectral
/// energy gets centroid = spread = entropy_freq = 0; a constant signal gets
/// entropy_time = 0.
inline SpectralDescriptors spectral_descriptors(std::span<const double> x, double fs) {
    if (x.empty()) throw InvalidValue("spectral_descriptors: empty signal");
    if (!(fs > 0.0)) throw InvalidValue("spectral_descriptors: sampling rate must be positive");
    const auto& dft = RealDft::get(x.size());
    std::vector<double> mag(dft.bins());
    dft.power(x, mag);
    for (auto& m : mag) m = std::sqrt(m);

    SpectralDescriptors out;
    const double df = fs / static_cast<double>(x.size());
    double total = 0.0, weighted = 0.0;
    for (std::size_t k = 0; k < mag.size(); ++k) {
        total += mag[k];
        weighted += static_cast<double>(k) * df * mag[k];
    }
    if (total > 0.0) {
        out.centroid = weighted / total;
        double var = 0.0;
        for (std::size_t k = 0; k < mag.size(); ++k) {
            const double f = static_cast<double>(k) * df - out.centroid;
            var += f * f * mag[k];
        }
        out.spread = std::sqrt(var / total);
        out.entropy_freq = shannon_entropy(mag);
    }

    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo) {
        std::vector<double> hist(kTimeEntropyBins, 0.0);
        const double width = (hi - lo) / static_cast<double>(kTimeEntropyBins);
        for (double v : x) {
            auto b = static_cast<std::size_t>((v - lo) / width);
            if (b >= kTimeEntropyBins) b = kTimeEntropyBins - 1;
            hist[b] += 1.0;
        }
        out.entropy_time = shannon_entropy(hist);
    }
    return out;
}

}  // namespace hdtac::features
