#pragma once

// Window encoders: key-value, generic (key-value symbols + n-grams),
// sinusoid projection, density, and the ensemble that fuses a raw-signal
// encoding H1 with the feature density encoding H2 as
//     H = H1 + H2 + H1 * H2
// after sign-quantizing both parts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "hdtac/core/basis.hpp"
#include "hdtac/core/errors.hpp"
#include "hdtac/core/hypervector.hpp"
#include "hdtac/core/rng.hpp"
#include "hdtac/core/window.hpp"
#include "hdtac/encoders/config.hpp"
#include "hdtac/encoders/density.hpp"
#include "hdtac/encoders/sinusoid.hpp"

namespace hdtac {

class Encoder {
public:
    static constexpr std::size_t kMaxNgram = 12;

    explicit Encoder(EncoderConfig cfg) : cfg_(std::move(cfg)), raw_(raw_part(cfg_.variant)) {
        cfg_.validate();
        if (cfg_.ngram > kMaxNgram) throw InvalidConfig("encoder.ngram_n must be <= 12");
        const std::size_t d = cfg_.dim;
        const Rng root(cfg_.seed);

        if (uses_raw()) {
            Rng key_rng = root.derive(1);
            keys_ = random_basis(key_rng, d, 3);
        }
        if (raw_ == EncoderVariant::KV_RL || raw_ == EncoderVariant::Generic) {
            for (std::size_t a = 0; a < 3; ++a) {
                Rng r = root.derive(10 + a);
                levels_[a] = level_basis(r, d, cfg_.levels, cfg_.raw_ranges[a].lo, cfg_.raw_ranges[a].hi);
            }
        }
        if (raw_ == EncoderVariant::KV_SN) {
            for (std::size_t a = 0; a < 3; ++a) {
                Rng r = root.derive(20 + a);
                sn_[a].weight.resize(d);
                sn_[a].bias.resize(d);
                for (std::size_t p = 0; p < d; ++p) draw_sn(a, p, r);
            }
        }
        if (raw_ == EncoderVariant::SinusoidProj) {
            Rng r = root.derive(30);
            proj_ = SinusoidProjection(d, 3 * kWindowLength, r);
        }
        if (uses_features() && !cfg_.feature_ranges.empty()) {
            Rng r = root.derive(40);
            density_ = DensityEncoder(d, cfg_.levels, cfg_.feature_ranges, r);
        }
        if (cfg_.bind_start_time && uses_raw()) {
            Rng r = root.derive(50);
            time_levels_ = level_basis(r, d, cfg_.levels, 0.0, 86400.0);
        }
    }

    [[nodiscard]] const EncoderConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t dim() const noexcept { return cfg_.dim; }
    [[nodiscard]] EncoderVariant variant() const noexcept { return cfg_.variant; }
    [[nodiscard]] bool uses_raw() const noexcept { return cfg_.variant != EncoderVariant::Density; }
    [[nodiscard]] bool uses_features() const noexcept {
        return cfg_.variant == EncoderVariant::Density || is_ensemble(cfg_.variant);
    }

    // ---- individual encodings -------------------------------------------------

    /// Per-timestep symbols are bundled after rotating symbol t by t positions.
    [[nodiscard]] RealHV encode_keyvalue(const RawWindow& w) const {
        if (raw_ != EncoderVariant::KV_RL && raw_ != EncoderVariant::KV_SN)
            throw UnsupportedEncoder("encode_keyvalue: variant is not key-value");
        check_window(w, 1);
        const std::size_t d = cfg_.dim;
        RealHV out(d);
        std::vector<float> sym(d);
        for (std::size_t t = 0; t < w.size(); ++t) {
            symbol(w, t, sym);
            const std::size_t s = t % d;
            for (std::size_t p = 0; p + s < d; ++p) out[p + s] += sym[p];
            for (std::size_t p = d - s; p < d; ++p) out[p + s - d] += sym[p];
        }
        return out;
    }

    /// n-gram encoding over the sequence of key-value symbols (stride 1).
    [[nodiscard]] RealHV encode_generic(const RawWindow& w) const {
        if (raw_ != EncoderVariant::Generic) throw UnsupportedEncoder("encode_generic: variant is not generic");
        const std::size_t n = cfg_.ngram;
        check_window(w, n);
        const std::size_t d = cfg_.dim;
        const std::size_t steps = w.size();

        std::vector<std::int8_t> sym(steps * d);
        for (std::size_t t = 0; t < steps; ++t) level_symbol(w, t, {sym.data() + t * d, d});

        std::vector<std::int32_t> acc(d, 0);
        std::vector<std::int32_t> prod(d);
        for (std::size_t j = 0; j + n <= steps; ++j) {
            const std::int8_t* last = sym.data() + (j + n - 1) * d;
            for (std::size_t k = 0; k < d; ++k) prod[k] = last[k];
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const std::size_t shift = (n - 1 - i) % d;
                const std::int8_t* s = sym.data() + (j + i) * d;
                for (std::size_t k = shift; k < d; ++k) prod[k] *= s[k - shift];
                for (std::size_t k = 0; k < shift; ++k) prod[k] *= s[d - shift + k];
            }
            for (std::size_t k = 0; k < d; ++k) acc[k] += prod[k];
        }
        RealHV out(d);
        for (std::size_t k = 0; k < d; ++k) out[k] = static_cast<float>(acc[k]);
        return out;
    }

    /// Projection of a flattened, range-normalized window (time-major x,y,z).
    [[nodiscard]] RealHV encode_sinusoid_projection(std::span<const float> values) const {
        if (raw_ != EncoderVariant::SinusoidProj)
            throw UnsupportedEncoder("encode_sinusoid_projection: variant is not sinusoid");
        return proj_.encode(values);
    }

    [[nodiscard]] RealHV encode_sinusoid_projection(const RawWindow& w) const {
        check_window(w, kWindowLength);
        return encode_sinusoid_projection(flatten(w));
    }

    [[nodiscard]] RealHV encode_density(const FeatureVector& f) const {
        if (!uses_features()) throw UnsupportedEncoder("encode_density: variant has no feature part");
        return density_.encode(f.values);
    }

    /// H1: the raw-signal part of the configured variant, unquantized.
    [[nodiscard]] RealHV encode_raw(const RawWindow& w) const {
        RealHV h;
        switch (raw_) {
            case EncoderVariant::KV_RL:
            case EncoderVariant::KV_SN: h = encode_keyvalue(w); break;
            case EncoderVariant::Generic: h = encode_generic(w); break;
            case EncoderVariant::SinusoidProj: h = encode_sinusoid_projection(w); break;
            default: throw UnsupportedEncoder("encode_raw: variant has no raw part");
        }
        if (cfg_.bind_start_time) {
            const auto& tv = quantize(time_of_day_s(w), time_levels_);
            for (std::size_t k = 0; k < h.dim(); ++k) h[k] *= tv[k];
        }
        return h;
    }

    [[nodiscard]] RealHV encode_ensemble(const RawWindow& w, const FeatureVector& f) const {
        if (!is_ensemble(cfg_.variant)) throw UnsupportedEncoder("encode_ensemble: variant is not an ensemble");
        const BipolarHV h1 = sign_quantize(encode_raw(w));
        const BipolarHV h2 = sign_quantize(encode_density(f));
        RealHV out(cfg_.dim);
        for (std::size_t k = 0; k < cfg_.dim; ++k) out[k] = combine(h1[k], h2[k]);
        return out;
    }

    /// Encoding selected by the configured variant.
    [[nodiscard]] RealHV encode(const RawWindow& w, const FeatureVector& f) const {
        if (cfg_.variant == EncoderVariant::Density) return encode_density(f);
        if (is_ensemble(cfg_.variant)) return encode_ensemble(w, f);
        return encode_raw(w);
    }

    void encode_into(const RawWindow& w, const FeatureVector& f, std::span<float> out) const {
        const RealHV h = encode(w, f);
        std::copy(h.begin(), h.end(), out.begin());
    }

    // ---- dimension regeneration -------------------------------------------------

    /// Re-sample the basis state behind the given positions and return every
    /// output dimension whose mapping changed (sorted, unique).
    std::vector<std::size_t> regenerate(std::span<const std::size_t> positions, std::uint64_t event) {
        const std::size_t d = cfg_.dim;
        for (std::size_t p : positions)
            if (p >= d) throw InvalidValue("regenerate: position out of range");
        Rng rng = Rng(cfg_.seed).derive(1000 + event);

        std::vector<char> touched(d, 0);
        auto mark = [&](std::size_t k) { touched[k % d] = 1; };

        if (uses_raw()) {
            keys_.regenerate(positions, rng);
            switch (raw_) {
                case EncoderVariant::Generic:
                    for (auto& b : levels_) b.regenerate(positions, rng);
                    for (std::size_t p : positions)
                        for (std::size_t s = 0; s < cfg_.ngram; ++s) mark(p + s);
                    break;
                case EncoderVariant::KV_RL:
                case EncoderVariant::KV_SN:
                    if (raw_ == EncoderVariant::KV_RL) {
                        for (auto& b : levels_) b.regenerate(positions, rng);
                    } else {
                        for (std::size_t a = 0; a < 3; ++a)
                            for (std::size_t p : positions) draw_sn(a, p, rng);
                    }
                    if (!positions.empty()) std::fill(touched.begin(), touched.end(), 1);
                    break;
                case EncoderVariant::SinusoidProj:
                    proj_.regenerate(positions, rng);
                    for (std::size_t p : positions) mark(p);
                    break;
                default: break;
            }
            if (cfg_.bind_start_time) {
                time_levels_.regenerate(positions, rng);
                for (std::size_t p : positions) mark(p);
            }
        }
        if (uses_features()) {
            density_.regenerate(positions, rng);
            for (std::size_t p : positions) mark(p);
        }
        std::vector<std::size_t> affected;
        for (std::size_t k = 0; k < d; ++k)
            if (touched[k]) affected.push_back(k);
        return affected;
    }

    /// Recompute only `dims` of a full encoding held in `out`.
    void encode_dims(const RawWindow& w, const FeatureVector& f, std::span<const std::size_t> dims,
                     std::span<float> out) const {
        if (dims.empty()) return;
        const bool key_value = raw_ == EncoderVariant::KV_RL || raw_ == EncoderVariant::KV_SN;
        if ((uses_raw() && key_value) || dims.size() * 4 > cfg_.dim) {
            const RealHV full = encode(w, f);
            for (std::size_t k : dims) out[k] = full[k];
            return;
        }
        std::vector<float> h1(cfg_.dim, 0.0F);
        std::vector<float> h2(cfg_.dim, 0.0F);
        if (uses_raw()) raw_dims(w, dims, h1);
        if (uses_features()) density_.encode_dims(f.values, dims, h2);

        for (std::size_t k : dims) {
            if (cfg_.variant == EncoderVariant::Density) {
                out[k] = h2[k];
            } else if (is_ensemble(cfg_.variant)) {
                out[k] = combine(h1[k] < 0.0F ? -1 : 1, h2[k] < 0.0F ? -1 : 1);
            } else {
                out[k] = h1[k];
            }
        }
    }

    // ---- helpers exposed for tests and the CLI ---------------------------------

    /// Window values mapped per axis into [-1, 1] using the raw ranges (clamped),
    /// flattened time-major as x0, y0, z0, x1, ...
    [[nodiscard]] std::vector<float> flatten(const RawWindow& w) const {
        std::vector<float> v;
        v.reserve(w.size() * 3);
        for (const auto& s : w.samples)
            for (std::size_t a = 0; a < 3; ++a) v.push_back(static_cast<float>(normalize(a, s[a])));
        return v;
    }

    /// Key-value symbol of timestep t: sum over axes of key_a * value_a(t).
    void symbol(const RawWindow& w, std::size_t t, std::span<float> out) const {
        const std::size_t d = cfg_.dim;
        if (raw_ == EncoderVariant::KV_SN) {
            std::fill(out.begin(), out.end(), 0.0F);
            for (std::size_t a = 0; a < 3; ++a) {
                const double u = normalize(a, w.samples[t][a]);
                const auto& key = keys_[a];
                for (std::size_t p = 0; p < d; ++p) out[p] += static_cast<float>(key[p] * sn_value(a, p, u));
            }
            return;
        }
        std::vector<std::int8_t> s(d);
        level_symbol(w, t, s);
        for (std::size_t p = 0; p < d; ++p) out[p] = s[p];
    }

    [[nodiscard]] static float combine(std::int8_t h1, std::int8_t h2) noexcept {
        return static_cast<float>(h1 + h2 + h1 * h2);
    }

private:
    struct ScalarMap {
        std::vector<float> weight;
        std::vector<float> bias;
    };

    void check_window(const RawWindow& w, std::size_t min_len) const {
        if (w.size() < min_len || w.size() < 1)
            throw InvalidValue("encoder: window has " + std::to_string(w.size()) + " samples, need at least " +
                               std::to_string(std::max<std::size_t>(min_len, 1)));
    }

    [[nodiscard]] double normalize(std::size_t axis, double value) const {
        if (!std::isfinite(value)) throw InvalidValue("encoder: non-finite sample");
        const auto& r = cfg_.raw_ranges[axis];
        const double c = std::clamp(value, r.lo, r.hi);
        return 2.0 * (c - r.lo) / (r.hi - r.lo) - 1.0;
    }

    void draw_sn(std::size_t axis, std::size_t p, Rng& rng) {
        sn_[axis].weight[p] = static_cast<float>(rng.normal() * cfg_.sn_bandwidth);
        sn_[axis].bias[p] = static_cast<float>(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }

    [[nodiscard]] double sn_value(std::size_t axis, std::size_t p, double u) const {
        const double z = sn_[axis].weight[p] * u;
        return std::cos(z + sn_[axis].bias[p]) * std::sin(z);
    }

    void level_symbol(const RawWindow& w, std::size_t t, std::span<std::int8_t> out) const {
        const std::size_t d = cfg_.dim;
        const std::int8_t* k0 = keys_[0].data().data();
        const std::int8_t* k1 = keys_[1].data().data();
        const std::int8_t* k2 = keys_[2].data().data();
        const std::int8_t* v0 = levels_[0][levels_[0].level_index(w.samples[t][0])].data().data();
        const std::int8_t* v1 = levels_[1][levels_[1].level_index(w.samples[t][1])].data().data();
        const std::int8_t* v2 = levels_[2][levels_[2].level_index(w.samples[t][2])].data().data();
        for (std::size_t p = 0; p < d; ++p)
            out[p] = static_cast<std::int8_t>(k0[p] * v0[p] + k1[p] * v1[p] + k2[p] * v2[p]);
    }

    [[nodiscard]] double time_of_day_s(const RawWindow& w) const {
        const std::int64_t ms_per_day = 86'400'000;
        const std::int64_t ms = ((w.start_ms() % ms_per_day) + ms_per_day) % ms_per_day;
        return static_cast<double>(ms) / 1000.0;
    }

    /// Raw-part values at selected dims; only for generic and sinusoid variants.
    void raw_dims(const RawWindow& w, std::span<const std::size_t> dims, std::span<float> out) const {
        const std::size_t d = cfg_.dim;
        if (raw_ == EncoderVariant::SinusoidProj) {
            check_window(w, kWindowLength);
            proj_.encode_dims(flatten(w), dims, out);
        } else {
            const std::size_t n = cfg_.ngram;
            check_window(w, n);
            const std::size_t steps = w.size();
            std::array<std::vector<std::size_t>, 3> idx;
            for (std::size_t a = 0; a < 3; ++a) {
                idx[a].resize(steps);
                for (std::size_t t = 0; t < steps; ++t) idx[a][t] = levels_[a].level_index(w.samples[t][a]);
            }
            // cols[s][t] = symbol_t at position (k - s) mod d
            std::vector<std::int32_t> cols(n * steps);
            for (std::size_t k : dims) {
                for (std::size_t s = 0; s < n; ++s) {
                    const std::size_t q = (k + d - (s % d)) % d;
                    for (std::size_t t = 0; t < steps; ++t) {
                        std::int32_t v = 0;
                        for (std::size_t a = 0; a < 3; ++a) v += keys_[a][q] * levels_[a][idx[a][t]][q];
                        cols[s * steps + t] = v;
                    }
                }
                std::int64_t acc = 0;
                for (std::size_t j = 0; j + n <= steps; ++j) {
                    std::int64_t prod = 1;
                    for (std::size_t i = 0; i < n; ++i) prod *= cols[(n - 1 - i) * steps + j + i];
                    acc += prod;
                }
                out[k] = static_cast<float>(acc);
            }
        }
        if (cfg_.bind_start_time) {
            const auto& tv = quantize(time_of_day_s(w), time_levels_);
            for (std::size_t k : dims) out[k] *= tv[k];
        }
    }

    EncoderConfig cfg_;
    EncoderVariant raw_;
    BasisSet keys_;
    std::array<BasisSet, 3> levels_;
    std::array<ScalarMap, 3> sn_;
    SinusoidProjection proj_;
    DensityEncoder density_;
    BasisSet time_levels_;
};

}  // namespace hdtac
