#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/hypervector.hpp"
#include "hdtac/core/rng.hpp"

namespace hdtac {

/// Nonlinear random projection: out_i = cos(W_i . v + b_i) * sin(W_i . v),
/// W_i ~ N(0, 1) per entry, b_i ~ U[0, 2 pi).
class SinusoidProjection {
public:
    SinusoidProjection() = default;

    SinusoidProjection(std::size_t dim, std::size_t input_size, Rng& rng) : dim_(dim), input_(input_size) {
        if (dim == 0 || input_size == 0) throw InvalidDimension("sinusoid projection: empty shape");
        weights_.resize(dim * input_size);
        bias_.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) draw_row(i, rng);
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t input_size() const noexcept { return input_; }

    [[nodiscard]] std::span<float> row(std::size_t i) noexcept { return {weights_.data() + i * input_, input_}; }
    [[nodiscard]] std::span<const float> row(std::size_t i) const noexcept {
        return {weights_.data() + i * input_, input_};
    }
    [[nodiscard]] float& bias(std::size_t i) noexcept { return bias_[i]; }

    [[nodiscard]] float component(std::size_t i, std::span<const float> v) const {
        const float* w = weights_.data() + i * input_;
        double proj = 0.0;
        for (std::size_t k = 0; k < input_; ++k) proj += static_cast<double>(w[k]) * v[k];
        return static_cast<float>(std::cos(proj + bias_[i]) * std::sin(proj));
    }

    void encode_into(std::span<const float> v, std::span<float> out) const {
        check(v);
        for (std::size_t i = 0; i < dim_; ++i) out[i] = component(i, v);
    }

    [[nodiscard]] RealHV encode(std::span<const float> v) const {
        RealHV out(dim_);
        encode_into(v, out.data());
        return out;
    }

    void encode_dims(std::span<const float> v, std::span<const std::size_t> dims, std::span<float> out) const {
        check(v);
        for (std::size_t i : dims) out[i] = component(i, v);
    }

    void regenerate(std::span<const std::size_t> dims, Rng& rng) {
        for (std::size_t i : dims) draw_row(i, rng);
    }

private:
    void check(std::span<const float> v) const {
        if (v.size() != input_) {
            throw InvalidDimension("sinusoid projection: input length " + std::to_string(v.size()) + " != " +
                                   std::to_string(input_));
        }
    }

    void draw_row(std::size_t i, Rng& rng) {
        for (auto& w : row(i)) w = static_cast<float>(rng.normal());
        bias_[i] = static_cast<float>(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }

    std::size_t dim_ = 0;
    std::size_t input_ = 0;
    std::vector<float> weights_;
    std::vector<float> bias_;
};

}  // namespace hdtac
