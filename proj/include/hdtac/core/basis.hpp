#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/hypervector.hpp"
#include "hdtac/core/rng.hpp"

namespace hdtac {

enum class BasisKind { Random, Level };

/// A family of basis hypervectors.
///
/// Level sets interpolate between two independent endpoints with nested
/// flips: position p of level i takes the upper endpoint's value when the
/// rank of p in a fixed random order is below ceil(d * i / (L - 1)).
/// Similarity to level 0 therefore never increases with i, and the last
/// level equals the upper endpoint.
class BasisSet {
public:
    BasisSet() = default;

    [[nodiscard]] BasisKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t size() const noexcept { return vectors_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return vectors_.empty() ? 0 : vectors_.front().dim(); }
    [[nodiscard]] std::size_t levels() const noexcept { return vectors_.size(); }
    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

    const BipolarHV& operator[](std::size_t i) const { return vectors_[i]; }
    [[nodiscard]] const std::vector<BipolarHV>& vectors() const noexcept { return vectors_; }

    /// Index of the level a scalar maps to. Out-of-range values clamp.
    [[nodiscard]] std::size_t level_index(double value) const {
        if (kind_ != BasisKind::Level) throw InvalidConfig("level_index: basis is not a level basis");
        if (std::isnan(value)) throw InvalidValue("quantize: NaN value");
        const double c = std::clamp(value, lo_, hi_);
        const double pos = (c - lo_) / (hi_ - lo_) * static_cast<double>(vectors_.size() - 1);
        return static_cast<std::size_t>(std::lround(pos));
    }

    /// Re-sample every vector at the given positions. Level sets redraw both
    /// endpoints and rebuild the column; the flip order is kept.
    void regenerate(std::span<const std::size_t> positions, Rng& rng) {
        for (std::size_t p : positions) {
            if (kind_ == BasisKind::Random) {
                for (auto& v : vectors_) v[p] = (rng.next() & 1U) ? 1 : -1;
                continue;
            }
            const std::int8_t a = (rng.next() & 1U) ? 1 : -1;
            const std::int8_t b = (rng.next() & 1U) ? 1 : -1;
            for (std::size_t i = 0; i < vectors_.size(); ++i) {
                vectors_[i][p] = rank_[p] < flip_count(i) ? b : a;
            }
        }
    }

    friend BasisSet random_basis(Rng& rng, std::size_t dim, std::size_t count);
    friend BasisSet level_basis(Rng& rng, std::size_t dim, std::size_t levels, double lo, double hi);

private:
    [[nodiscard]] std::size_t flip_count(std::size_t level) const {
        const std::size_t d = dim();
        const std::size_t steps = vectors_.size() - 1;
        return (d * level + steps - 1) / steps;
    }

    BasisKind kind_ = BasisKind::Random;
    std::vector<BipolarHV> vectors_;
    std::vector<std::uint32_t> rank_;
    double lo_ = 0.0;
    double hi_ = 1.0;
};

inline BasisSet random_basis(Rng& rng, std::size_t dim, std::size_t count) {
    if (dim == 0) throw InvalidDimension("random_basis: dimension must be positive");
    BasisSet b;
    b.kind_ = BasisKind::Random;
    b.vectors_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) b.vectors_.push_back(random_hv(rng, dim));
    return b;
}

inline BasisSet level_basis(Rng& rng, std::size_t dim, std::size_t levels, double lo, double hi) {
    if (dim == 0) throw InvalidDimension("level_basis: dimension must be positive");
    if (levels < 2) throw InvalidConfig("level_basis: need at least 2 levels");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw InvalidConfig("level_basis: need finite lo < hi");

    BasisSet b;
    b.kind_ = BasisKind::Level;
    b.lo_ = lo;
    b.hi_ = hi;

    const BipolarHV first = random_hv(rng, dim);
    const BipolarHV last = random_hv(rng, dim);
    std::vector<std::uint32_t> order(dim);
    std::iota(order.begin(), order.end(), 0U);
    shuffle(order.begin(), order.end(), rng);
    b.rank_.assign(dim, 0);
    for (std::size_t r = 0; r < dim; ++r) b.rank_[order[r]] = static_cast<std::uint32_t>(r);

    b.vectors_.assign(levels, first);
    for (std::size_t i = 1; i < levels; ++i) {
        const std::size_t flips = b.flip_count(i);
        auto& v = b.vectors_[i];
        for (std::size_t p = 0; p < dim; ++p) {
            if (b.rank_[p] < flips) v[p] = last[p];
        }
    }
    return b;
}

/// Scalar to level hypervector.
inline const BipolarHV& quantize(double value, const BasisSet& basis) {
    return basis[basis.level_index(value)];
}

}  // namespace hdtac
