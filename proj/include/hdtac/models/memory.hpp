#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "hdtac/core/binary_io.hpp"
#include "hdtac/core/errors.hpp"
#include "hdtac/core/hypervector.hpp"

namespace hdtac {

/// One accumulator per class (sober = 0, drunk = 1) and the number of
/// training samples seen per class.
class AssociativeMemory {
public:
    AssociativeMemory() = default;

    explicit AssociativeMemory(std::size_t dim, std::size_t classes = 2)
        : dim_(dim), acc_(classes, std::vector<float>(dim, 0.0F)), counts_(classes, 0) {
        if (dim == 0) throw InvalidDimension("associative memory: dimension must be positive");
        if (classes < 2) throw InvalidConfig("associative memory: need at least two classes");
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return acc_.size(); }

    [[nodiscard]] std::span<float> accumulator(std::size_t c) { return acc_.at(c); }
    [[nodiscard]] std::span<const float> accumulator(std::size_t c) const { return acc_.at(c); }

    [[nodiscard]] std::uint64_t count(std::size_t c) const { return counts_.at(c); }
    void set_count(std::size_t c, std::uint64_t n) { counts_.at(c) = n; }
    void increment_count(std::size_t c) { ++counts_.at(c); }

    /// acc[c] += weight * h
    void add(std::size_t c, std::span<const float> h, float weight = 1.0F) {
        if (h.size() != dim_) throw InvalidDimension("memory add: dimension mismatch");
        auto& a = acc_.at(c);
        for (std::size_t i = 0; i < dim_; ++i) a[i] += weight * h[i];
    }

    [[nodiscard]] double norm(std::size_t c) const {
        double s = 0.0;
        for (float v : acc_.at(c)) s += static_cast<double>(v) * v;
        return std::sqrt(s);
    }

    [[nodiscard]] bool trained() const {
        for (std::size_t c = 0; c < acc_.size(); ++c)
            if (norm(c) == 0.0) return false;
        return true;
    }

    friend bool operator==(const AssociativeMemory&, const AssociativeMemory&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::vector<float>> acc_;
    std::vector<std::uint64_t> counts_;
};

struct Prediction {
    int label = 0;
    std::vector<double> sims;

    /// Decision score used for ROC: cos(drunk) - cos(sober).
    [[nodiscard]] double margin() const { return sims.size() >= 2 ? sims[1] - sims[0] : 0.0; }
};

namespace detail {

/// Cosine similarity to every class; zero-norm classes or queries give 0.
inline std::vector<double> similarities(const AssociativeMemory& mem, std::span<const float> h) {
    double hh = 0.0;
    for (float v : h) hh += static_cast<double>(v) * v;
    std::vector<double> sims(mem.class_count(), 0.0);
    for (std::size_t c = 0; c < mem.class_count(); ++c) {
        const auto a = mem.accumulator(c);
        double ab = 0.0, aa = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            ab += static_cast<double>(a[i]) * h[i];
            aa += static_cast<double>(a[i]) * a[i];
        }
        if (aa > 0.0 && hh > 0.0) sims[c] = ab / (std::sqrt(aa) * std::sqrt(hh));
    }
    return sims;
}

/// Argmax with ties going to the lowest label.
inline int argmax(const std::vector<double>& sims) {
    int best = 0;
    for (std::size_t c = 1; c < sims.size(); ++c)
        if (sims[c] > sims[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    return best;
}

}  // namespace detail

/// Most similar class by cosine; ties go to label 0.
inline Prediction predict(const AssociativeMemory& mem, std::span<const float> h) {
    if (h.size() != mem.dim()) throw InvalidDimension("predict: query dimension differs from model");
    for (std::size_t c = 0; c < mem.class_count(); ++c)
        if (mem.norm(c) == 0.0) throw UntrainedModel("predict: class " + std::to_string(c) + " accumulator is zero");
    Prediction p;
    p.sims = detail::similarities(mem, h);
    p.label = detail::argmax(p.sims);
    return p;
}

inline Prediction predict(const AssociativeMemory& mem, const RealHV& h) { return predict(mem, h.data()); }

/// Copy whose accumulators are sign-quantized (0 maps to +1).
inline AssociativeMemory sign_quantized(const AssociativeMemory& mem) {
    AssociativeMemory out = mem;
    for (std::size_t c = 0; c < out.class_count(); ++c)
        for (auto& v : out.accumulator(c)) v = v < 0.0F ? -1.0F : 1.0F;
    return out;
}

// ---- model file ---------------------------------------------------------------

inline constexpr char kModelMagic[9] = "HDTACMEM";
inline constexpr std::uint32_t kModelVersion = 1;

/// Layout (little-endian): magic "HDTACMEM", u32 version, u32 d, u32 class
/// count, then per class a u64 sample count and d float32 accumulator values.
inline void save_memory(const AssociativeMemory& mem, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file '" + path + "'");
    io::write_magic(out, kModelMagic);
    io::write_le<std::uint32_t>(out, kModelVersion);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mem.dim()));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mem.class_count()));
    for (std::size_t c = 0; c < mem.class_count(); ++c) {
        io::write_le<std::uint64_t>(out, mem.count(c));
        for (float v : mem.accumulator(c)) io::write_le<float>(out, v);
    }
    if (!out) throw Error("failed writing model file '" + path + "'");
}

inline AssociativeMemory load_memory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open model file '" + path + "'");
    io::expect_magic(in, kModelMagic, "model file");
    if (io::read_le<std::uint32_t>(in) != kModelVersion) throw IngestError("model file: unsupported version");
    const auto dim = io::read_le<std::uint32_t>(in);
    const auto classes = io::read_le<std::uint32_t>(in);
    AssociativeMemory mem(dim, classes);
    for (std::size_t c = 0; c < classes; ++c) {
        mem.set_count(c, io::read_le<std::uint64_t>(in));
        for (auto& v : mem.accumulator(c)) v = io::read_le<float>(in);
    }
    return mem;
}

}  // namespace hdtac
