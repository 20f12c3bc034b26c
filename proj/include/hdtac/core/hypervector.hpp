#pragma once

// MAP (multiply-add-permute) hypervectors.
//
// Freshly sampled vectors are bipolar and stored as int8. Bundles widen to
// int32 so sums never overflow; real-valued encoders (sinusoid projections,
// weighted model updates) use float.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/rng.hpp"

namespace hdtac {

template <typename T>
class Hypervector {
public:
    using value_type = T;

    Hypervector() = default;

    explicit Hypervector(std::size_t dim, T fill = T{}) : elems_(dim, fill) {
        if (dim == 0) throw InvalidDimension("hypervector dimension must be positive");
    }

    explicit Hypervector(std::vector<T> elems) : elems_(std::move(elems)) {
        if (elems_.empty()) throw InvalidDimension("hypervector dimension must be positive");
    }

    Hypervector(std::initializer_list<T> elems) : Hypervector(std::vector<T>(elems)) {}

    [[nodiscard]] std::size_t dim() const noexcept { return elems_.size(); }
    [[nodiscard]] bool empty() const noexcept { return elems_.empty(); }

    T& operator[](std::size_t i) noexcept { return elems_[i]; }
    const T& operator[](std::size_t i) const noexcept { return elems_[i]; }

    [[nodiscard]] std::span<T> data() noexcept { return elems_; }
    [[nodiscard]] std::span<const T> data() const noexcept { return elems_; }
    [[nodiscard]] const std::vector<T>& elements() const noexcept { return elems_; }

    auto begin() noexcept { return elems_.begin(); }
    auto end() noexcept { return elems_.end(); }
    auto begin() const noexcept { return elems_.begin(); }
    auto end() const noexcept { return elems_.end(); }

    friend bool operator==(const Hypervector&, const Hypervector&) = default;

private:
    std::vector<T> elems_;
};

using BipolarHV = Hypervector<std::int8_t>;
using AccumHV = Hypervector<std::int32_t>;
using RealHV = Hypervector<float>;

namespace detail {

template <typename T>
struct widen {
    using type = T;
};
template <>
struct widen<std::int8_t> {
    using type = std::int32_t;
};
template <>
struct widen<std::int16_t> {
    using type = std::int32_t;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char* op) {
    if (a != b) {
        throw InvalidDimension(std::string(op) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                               std::to_string(b) + ")");
    }
}

}  // namespace detail

template <typename T>
using bundle_t = typename detail::widen<T>::type;

/// Random bipolar hypervector; one engine bit per element.
inline BipolarHV random_hv(Rng& rng, std::size_t dim) {
    if (dim == 0) throw InvalidDimension("random_hv: dimension must be positive");
    BipolarHV h(dim);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        if (i % 64 == 0) bits = rng.next();
        h[i] = (bits & 1U) ? std::int8_t{1} : std::int8_t{-1};
        bits >>= 1;
    }
    return h;
}

/// Superposition: elementwise sum, widened for narrow element types.
template <typename T>
Hypervector<bundle_t<T>> bundle(std::span<const Hypervector<T>> hs) {
    if (hs.empty()) throw InvalidValue("bundle: empty input");
    const std::size_t d = hs.front().dim();
    Hypervector<bundle_t<T>> out(d);
    for (const auto& h : hs) {
        detail::require_same_dim(d, h.dim(), "bundle");
        for (std::size_t i = 0; i < d; ++i) out[i] += static_cast<bundle_t<T>>(h[i]);
    }
    return out;
}

template <typename T>
Hypervector<bundle_t<T>> bundle(const std::vector<Hypervector<T>>& hs) {
    return bundle(std::span<const Hypervector<T>>(hs));
}

/// acc += h, in place.
template <typename A, typename T>
void bundle_into(Hypervector<A>& acc, const Hypervector<T>& h) {
    detail::require_same_dim(acc.dim(), h.dim(), "bundle_into");
    for (std::size_t i = 0; i < acc.dim(); ++i) acc[i] += static_cast<A>(h[i]);
}

/// Binding: elementwise product. Self-inverse on bipolar vectors.
template <typename T>
Hypervector<T> bind(const Hypervector<T>& a, const Hypervector<T>& b) {
    detail::require_same_dim(a.dim(), b.dim(), "bind");
    Hypervector<T> out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = static_cast<T>(a[i] * b[i]);
    return out;
}

/// Cyclic right shift by `shift` positions: out[(k + shift) mod d] = h[k].
/// Negative shifts rotate left, so permute(permute(h, i), -i) == h.
template <typename T>
Hypervector<T> permute(const Hypervector<T>& h, long long shift) {
    const auto d = static_cast<long long>(h.dim());
    const auto s = static_cast<std::size_t>(((shift % d) + d) % d);
    Hypervector<T> out(h.dim());
    std::rotate_copy(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(h.dim() - s), h.end(), out.begin());
    return out;
}

template <typename A, typename B>
double dot(std::span<const A> a, std::span<const B> b) {
    detail::require_same_dim(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

template <typename A, typename B>
double cosine_sim(std::span<const A> a, std::span<const B> b) {
    detail::require_same_dim(a.size(), b.size(), "cosine_sim");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = static_cast<double>(a[i]);
        const double y = static_cast<double>(b[i]);
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if (aa == 0.0 || bb == 0.0) throw UndefinedSimilarity("cosine_sim: zero-norm operand");
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

template <typename A, typename B>
double cosine_sim(const Hypervector<A>& a, const Hypervector<B>& b) {
    return cosine_sim(a.data(), b.data());
}

/// Elementwise sign with the fixed tie-break sign(0) = +1.
template <typename T>
BipolarHV sign_quantize(const Hypervector<T>& h) {
    BipolarHV out(h.dim());
    for (std::size_t i = 0; i < h.dim(); ++i) out[i] = h[i] < T{} ? std::int8_t{-1} : std::int8_t{1};
    return out;
}

template <typename To, typename From>
Hypervector<To> convert(const Hypervector<From>& h) {
    Hypervector<To> out(h.dim());
    for (std::size_t i = 0; i < h.dim(); ++i) out[i] = static_cast<To>(h[i]);
    return out;
}

}  // namespace hdtac
