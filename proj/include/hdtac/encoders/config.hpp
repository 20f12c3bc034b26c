#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hdtac/core/errors.hpp"

namespace hdtac {

enum class EncoderVariant {
    KV_RL,
    KV_SN,
    SinusoidProj,
    Generic,
    Density,
    EnsembleGeneric,
    EnsembleKV_RL,
    EnsembleKV_SN,
    EnsembleSinusoid,
};

inline constexpr std::array<std::pair<EncoderVariant, std::string_view>, 9> kEncoderVariantNames{{
    {EncoderVariant::KV_RL, "kv_rl"},
    {EncoderVariant::KV_SN, "kv_sn"},
    {EncoderVariant::SinusoidProj, "sinusoid"},
    {EncoderVariant::Generic, "generic"},
    {EncoderVariant::Density, "density"},
    {EncoderVariant::EnsembleGeneric, "ensemble_generic"},
    {EncoderVariant::EnsembleKV_RL, "ensemble_kv_rl"},
    {EncoderVariant::EnsembleKV_SN, "ensemble_kv_sn"},
    {EncoderVariant::EnsembleSinusoid, "ensemble_sinusoid"},
}};

inline std::string_view to_string(EncoderVariant v) {
    for (const auto& [k, name] : kEncoderVariantNames)
        if (k == v) return name;
    return "unknown";
}

inline EncoderVariant parse_encoder_variant(std::string_view s) {
    for (const auto& [k, name] : kEncoderVariantNames)
        if (name == s) return k;
    throw InvalidConfig("unknown encoder variant '" + std::string(s) + "'");
}

inline bool is_ensemble(EncoderVariant v) {
    return v == EncoderVariant::EnsembleGeneric || v == EncoderVariant::EnsembleKV_RL ||
           v == EncoderVariant::EnsembleKV_SN || v == EncoderVariant::EnsembleSinusoid;
}

/// Raw-signal encoder underlying a variant (Density has none).
inline EncoderVariant raw_part(EncoderVariant v) {
    switch (v) {
        case EncoderVariant::EnsembleGeneric: return EncoderVariant::Generic;
        case EncoderVariant::EnsembleKV_RL: return EncoderVariant::KV_RL;
        case EncoderVariant::EnsembleKV_SN: return EncoderVariant::KV_SN;
        case EncoderVariant::EnsembleSinusoid: return EncoderVariant::SinusoidProj;
        default: return v;
    }
}

struct ValueRange {
    double lo = 0.0;
    double hi = 1.0;

    [[nodiscard]] bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo < hi; }
    friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

struct EncoderConfig {
    std::size_t dim = 10000;
    std::size_t ngram = 6;
    std::size_t levels = 100;
    std::array<ValueRange, 3> raw_ranges{{{-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}}};
    std::vector<ValueRange> feature_ranges;
    EncoderVariant variant = EncoderVariant::EnsembleGeneric;
    std::uint64_t seed = 0;
    // Angular bandwidth of the per-axis sinusoid scalar map used by KV(SN).
    double sn_bandwidth = 4.0;
    // Ablation: bind a time-of-day level vector of the window start into the raw encoding.
    bool bind_start_time = false;

    void validate() const {
        if (dim == 0) throw InvalidDimension("encoder.dim must be positive");
        if (ngram < 1) throw InvalidConfig("encoder.ngram_n must be >= 1");
        if (levels < 2) throw InvalidConfig("encoder.levels must be >= 2");
        for (const auto& r : raw_ranges)
            if (!r.valid()) throw InvalidConfig("raw value range must be finite with lo < hi");
        for (const auto& r : feature_ranges)
            if (!r.valid()) throw InvalidConfig("feature value range must be finite with lo < hi");
        if (!(sn_bandwidth > 0.0)) throw InvalidConfig("encoder.sn_bandwidth must be positive");
    }
};

}  // namespace hdtac
