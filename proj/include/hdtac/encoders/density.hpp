#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/hypervector.hpp"
#include "hdtac/core/rng.hpp"
#include "hdtac/encoders/config.hpp"

namespace hdtac {

/// Thermometer-style density code per feature, bundled over features.
///
/// Feature k owns a random base vector. Its value is quantized to a level
/// l in [0, L-1] and the first ceil((d/2) * l / (L-1)) positions of a fixed
/// random order are negated. The top level differs from the bottom level in
/// half of the positions, so the two are quasi-orthogonal.
class DensityEncoder {
public:
    DensityEncoder() = default;

    DensityEncoder(std::size_t dim, std::size_t levels, std::vector<ValueRange> ranges, Rng& rng)
        : dim_(dim), levels_(levels), ranges_(std::move(ranges)) {
        if (dim == 0) throw InvalidDimension("density encoder: dimension must be positive");
        if (levels < 2) throw InvalidConfig("density encoder: need at least 2 levels");
        bases_.reserve(ranges_.size());
        for (std::size_t k = 0; k < ranges_.size(); ++k) bases_.push_back(random_hv(rng, dim));
        std::vector<std::uint32_t> order(dim);
        std::iota(order.begin(), order.end(), 0U);
        shuffle(order.begin(), order.end(), rng);
        rank_.assign(dim, 0);
        for (std::size_t r = 0; r < dim; ++r) rank_[order[r]] = static_cast<std::uint32_t>(r);
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t feature_count() const noexcept { return ranges_.size(); }
    [[nodiscard]] bool fitted() const noexcept { return !ranges_.empty(); }

    [[nodiscard]] std::size_t level_of(std::size_t feature, double value) const {
        if (std::isnan(value)) throw InvalidValue("density encoder: NaN feature value");
        const auto& r = ranges_[feature];
        const double c = std::clamp(value, r.lo, r.hi);
        return static_cast<std::size_t>(std::lround((c - r.lo) / (r.hi - r.lo) * static_cast<double>(levels_ - 1)));
    }

    [[nodiscard]] std::size_t flip_count(std::size_t level) const {
        const std::size_t steps = levels_ - 1;
        return (dim_ * level + 2 * steps - 1) / (2 * steps);
    }

    /// Density code of one feature value.
    [[nodiscard]] BipolarHV code(std::size_t feature, double value) const {
        const std::size_t flips = flip_count(level_of(feature, value));
        BipolarHV out = bases_[feature];
        for (std::size_t p = 0; p < dim_; ++p)
            if (rank_[p] < flips) out[p] = static_cast<std::int8_t>(-out[p]);
        return out;
    }

    void encode_into(std::span<const double> features, std::span<float> out) const {
        std::vector<std::size_t> flips = flip_counts(features);
        std::vector<std::int32_t> acc(dim_, 0);
        for (std::size_t k = 0; k < flips.size(); ++k) {
            const auto& base = bases_[k];
            const std::uint32_t f = static_cast<std::uint32_t>(flips[k]);
            for (std::size_t p = 0; p < dim_; ++p) acc[p] += rank_[p] < f ? -base[p] : base[p];
        }
        for (std::size_t p = 0; p < dim_; ++p) out[p] = static_cast<float>(acc[p]);
    }

    [[nodiscard]] RealHV encode(std::span<const double> features) const {
        if (!fitted()) throw InvalidConfig("density encoder: feature ranges not fitted");
        RealHV out(dim_);
        encode_into(features, out.data());
        return out;
    }

    void encode_dims(std::span<const double> features, std::span<const std::size_t> dims, std::span<float> out) const {
        const std::vector<std::size_t> flips = flip_counts(features);
        for (std::size_t p : dims) {
            std::int32_t acc = 0;
            for (std::size_t k = 0; k < flips.size(); ++k) acc += rank_[p] < flips[k] ? -bases_[k][p] : bases_[k][p];
            out[p] = static_cast<float>(acc);
        }
    }

    void regenerate(std::span<const std::size_t> dims, Rng& rng) {
        for (auto& base : bases_)
            for (std::size_t p : dims) base[p] = (rng.next() & 1U) ? 1 : -1;
    }

private:
    std::vector<std::size_t> flip_counts(std::span<const double> features) const {
        if (!fitted()) throw InvalidConfig("density encoder: feature ranges not fitted");
        if (features.size() != ranges_.size()) {
            throw InvalidDimension("density encoder: expected " + std::to_string(ranges_.size()) + " features, got " +
                                   std::to_string(features.size()));
        }
        std::vector<std::size_t> flips(features.size());
        for (std::size_t k = 0; k < features.size(); ++k) flips[k] = flip_count(level_of(k, features[k]));
        return flips;
    }

    std::size_t dim_ = 0;
    std::size_t levels_ = 2;
    std::vector<ValueRange> ranges_;
    std::vector<BipolarHV> bases_;
    std::vector<std::uint32_t> rank_;
};

}  // namespace hdtac
