#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/features/spectral.hpp"

namespace hdtac::features {

/// MFCC parameterization. Defaults: 64-sample Hamming frames, hop 32,
/// 20 triangular mel filters over 0-20 Hz, natural log of filter energies
/// (floored at 1e-10), orthonormal DCT-II, first 12 coefficients kept.
struct MfccParams {
    std::size_t frame = 64;
    std::size_t hop = 32;
    std::size_t filters = 20;
    std::size_t coefficients = 12;
    double fmin = 0.0;
    double fmax = 20.0;
    double log_floor = 1e-10;

    void validate(double fs) const {
        if (frame < 2 || hop == 0) throw InvalidConfig("mfcc: frame must be >= 2 and hop >= 1");
        if (filters < 1 || coefficients < 1 || coefficients > filters)
            throw InvalidConfig("mfcc: need 1 <= coefficients <= filters");
        if (!(fmin >= 0.0 && fmin < fmax && fmax <= fs / 2.0)) throw InvalidConfig("mfcc: need 0 <= fmin < fmax <= fs/2");
    }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// filters x bins weight matrix, row-major.
inline std::vector<double> mel_filterbank(const MfccParams& p, double fs) {
    const std::size_t bins = p.frame / 2 + 1;
    const double lo = hz_to_mel(p.fmin);
    const double hi = hz_to_mel(p.fmax);
    std::vector<double> edges(p.filters + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(p.filters + 1));

    std::vector<double> bank(p.filters * bins, 0.0);
    for (std::size_t m = 0; m < p.filters; ++m) {
        const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
        for (std::size_t k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * fs / static_cast<double>(p.frame);
            const double up = (f - left) / (centre - left);
            const double down = (right - f) / (right - centre);
            bank[m * bins + k] = std::max(0.0, std::min(up, down));
        }
    }
    return bank;
}

/// Per-frame MFCCs: frames x coefficients, row-major.
class Mfcc {
public:
    Mfcc(MfccParams params, double fs) : p_(params), fs_(fs), dft_(RealDft::get(params.frame)) {
        p_.validate(fs);
        bank_ = mel_filterbank(p_, fs_);
        window_.resize(p_.frame);
        for (std::size_t n = 0; n < p_.frame; ++n)
            window_[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                                 static_cast<double>(p_.frame - 1));
        dct_.resize(p_.coefficients * p_.filters);
        const auto m_count = static_cast<double>(p_.filters);
        for (std::size_t i = 0; i < p_.coefficients; ++i) {
            const double scale = std::sqrt((i == 0 ? 1.0 : 2.0) / m_count);
            for (std::size_t m = 0; m < p_.filters; ++m)
                dct_[i * p_.filters + m] =
                    scale * std::cos(std::numbers::pi * static_cast<double>(i) * (static_cast<double>(m) + 0.5) / m_count);
        }
    }

    [[nodiscard]] const MfccParams& params() const noexcept { return p_; }

    [[nodiscard]] std::size_t frame_count(std::size_t samples) const {
        return samples < p_.frame ? 0 : (samples - p_.frame) / p_.hop + 1;
    }

    [[nodiscard]] std::vector<double> compute(std::span<const double> x) const {
        const std::size_t frames = frame_count(x.size());
        if (frames == 0) throw InvalidValue("mfcc: signal shorter than one frame");
        const std::size_t bins = dft_.bins();
        std::vector<double> out(frames * p_.coefficients);
        std::vector<double> buf(p_.frame), power(bins), logmel(p_.filters);
        for (std::size_t f = 0; f < frames; ++f) {
            for (std::size_t n = 0; n < p_.frame; ++n) buf[n] = x[f * p_.hop + n] * window_[n];
            dft_.power(buf, power);
            for (std::size_t m = 0; m < p_.filters; ++m) {
                double e = 0.0;
                for (std::size_t k = 0; k < bins; ++k) e += bank_[m * bins + k] * power[k];
                logmel[m] = std::log(std::max(e, p_.log_floor));
            }
            for (std::size_t i = 0; i < p_.coefficients; ++i) {
                double c = 0.0;
                for (std::size_t m = 0; m < p_.filters; ++m) c += dct_[i * p_.filters + m] * logmel[m];
                out[f * p_.coefficients + i] = c;
            }
        }
        return out;
    }

private:
    MfccParams p_;
    double fs_;
    const RealDft& dft_;
    std::vector<double> bank_;
    std::vector<double> window_;
    std::vector<double> dct_;
};

/// Axis pairs in block order: xx, yy, zz, xy, xz, yz.
inline constexpr std::array<std::pair<std::size_t, std::size_t>, 6> kAxisPairs{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
inline constexpr std::array<const char*, 3> kAxisNames{"x", "y", "z"};

inline std::string pair_name(std::size_t block) {
    return std::string(kAxisNames[kAxisPairs[block].first]) + kAxisNames[kAxisPairs[block].second];
}

/// Cross-covariance (unbiased, over frames) between the coefficient series
/// of two axes. Six blocks of coefficients x coefficients entries; entry
/// (i, j) of block (a, b) is cov(mfcc_a[:, i], mfcc_b[:, j]), row-major.
inline std::vector<double> mfcc_covariance(const std::array<std::vector<double>, 3>& axes, double fs,
                                           const MfccParams& params = {}) {
    const Mfcc mfcc(params, fs);
    const std::size_t c = params.coefficients;
    std::array<std::vector<double>, 3> coeffs;
    for (std::size_t a = 0; a < 3; ++a) coeffs[a] = mfcc.compute(axes[a]);
    const std::size_t frames = coeffs[0].size() / c;
    if (frames < 2) throw InvalidValue("mfcc_covariance: need at least two frames");
    for (std::size_t a = 1; a < 3; ++a)
        if (coeffs[a].size() != coeffs[0].size()) throw InvalidValue("mfcc_covariance: axis lengths differ");

    std::array<std::vector<double>, 3> means;
    for (std::size_t a = 0; a < 3; ++a) {
        means[a].assign(c, 0.0);
        for (std::size_t f = 0; f < frames; ++f)
            for (std::size_t i = 0; i < c; ++i) means[a][i] += coeffs[a][f * c + i];
        for (auto& m : means[a]) m /= static_cast<double>(frames);
    }

    std::vector<double> out;
    out.reserve(kAxisPairs.size() * c * c);
    for (const auto& [a, b] : kAxisPairs) {
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < c; ++j) {
                double s = 0.0;
                for (std::size_t f = 0; f < frames; ++f)
                    s += (coeffs[a][f * c + i] - means[a][i]) * (coeffs[b][f * c + j] - means[b][j]);
                out.push_back(s / static_cast<double>(frames - 1));
            }
        }
    }
    return out;
}

}  // namespace hdtac::features
