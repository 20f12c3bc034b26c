#pragma once

// Full per-window feature catalog and selection.
//
// Catalog layout (888 entries with default MFCC parameters):
//   for each axis x, y, z:  mean, std, median, rms, spectral_centroid,
//                           spectral_spread, entropy_freq, entropy_time
//   for each pair xx, yy, zz, xy, xz, yz:
//                           mfcc_cov_<pair>_<i>_<j>, i, j over coefficients

#include <array>
#include <cstddef>
#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/window.hpp"
#include "hdtac/features/mfcc.hpp"
#include "hdtac/features/spectral.hpp"
#include "hdtac/features/stats.hpp"

namespace hdtac::features {

inline constexpr std::array<const char*, 8> kPerAxisFeatures{
    "mean", "std", "median", "rms", "spectral_centroid", "spectral_spread", "entropy_freq", "entropy_time"};

inline std::vector<std::string> catalog_ids(const MfccParams& params = {}) {
    std::vector<std::string> ids;
    for (const char* axis : kAxisNames)
        for (const char* f : kPerAxisFeatures) ids.push_back(std::string(axis) + "_" + f);
    for (std::size_t b = 0; b < kAxisPairs.size(); ++b)
        for (std::size_t i = 0; i < params.coefficients; ++i)
            for (std::size_t j = 0; j < params.coefficients; ++j)
                ids.push_back("mfcc_cov_" + pair_name(b) + "_" + std::to_string(i) + "_" + std::to_string(j));
    return ids;
}

inline std::array<std::vector<double>, 3> split_axes(const RawWindow& w) {
    std::array<std::vector<double>, 3> axes;
    for (auto& a : axes) a.reserve(w.size());
    for (const auto& s : w.samples)
        for (std::size_t a = 0; a < 3; ++a) axes[a].push_back(static_cast<double>(s[a]));
    return axes;
}

inline std::vector<double> compute_catalog(const RawWindow& w, double fs = kSampleRateHz,
                                           const MfccParams& params = {}) {
    if (w.size() == 0) throw InvalidValue("compute_catalog: empty window");
    const auto axes = split_axes(w);
    std::vector<double> out;
    out.reserve(kPerAxisFeatures.size() * 3 + kAxisPairs.size() * params.coefficients * params.coefficients);
    for (const auto& x : axes) {
        const auto st = basic_stats(x);
        const auto sp = spectral_descriptors(x, fs);
        out.insert(out.end(), {st.mean, st.std, st.median, rms(x), sp.centroid, sp.spread, sp.entropy_freq,
                               sp.entropy_time});
    }
    const auto cov = mfcc_covariance(axes, fs, params);
    out.insert(out.end(), cov.begin(), cov.end());
    return out;
}

/// Ordered catalog ids plus the retained subset.
class FeatureSpec {
public:
    FeatureSpec() : FeatureSpec(MfccParams{}) {}

    explicit FeatureSpec(MfccParams params) : params_(params), ids_(catalog_ids(params)) {
        for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
        selection_.resize(ids_.size());
        for (std::size_t i = 0; i < ids_.size(); ++i) selection_[i] = i;
    }

    [[nodiscard]] const MfccParams& mfcc() const noexcept { return params_; }
    [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
    [[nodiscard]] const std::vector<std::size_t>& selection() const noexcept { return selection_; }
    [[nodiscard]] std::size_t catalog_size() const noexcept { return ids_.size(); }

    void select(std::vector<std::size_t> indices) {
        std::vector<char> seen(ids_.size(), 0);
        for (std::size_t i : indices) {
            if (i >= ids_.size()) throw InvalidConfig("feature selection index out of range: " + std::to_string(i));
            if (seen[i]) throw InvalidConfig("duplicate feature in selection: " + ids_[i]);
            seen[i] = 1;
        }
        selection_ = std::move(indices);
    }

    void select_ids(const std::vector<std::string>& names) {
        std::vector<std::size_t> idx;
        idx.reserve(names.size());
        for (const auto& n : names) {
            auto it = index_.find(n);
            if (it == index_.end()) throw InvalidConfig("unknown feature id '" + n + "'");
            idx.push_back(it->second);
        }
        select(std::move(idx));
    }

    [[nodiscard]] std::vector<std::string> selected_ids() const {
        std::vector<std::string> out;
        for (std::size_t i : selection_) out.push_back(ids_[i]);
        return out;
    }

    /// Plain text, one id per line; blank lines and '#' comments ignored.
    void load_selection(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidConfig("cannot open feature selection file '" + path + "'");
        std::vector<std::string> names;
        std::string line;
        while (std::getline(in, line)) {
            const auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#') continue;
            const auto e = line.find_last_not_of(" \t\r");
            names.push_back(line.substr(b, e - b + 1));
        }
        select_ids(names);
    }

    void save_selection(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw InvalidConfig("cannot write feature selection file '" + path + "'");
        for (std::size_t i : selection_) out << ids_[i] << '\n';
    }

private:
    MfccParams params_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> selection_;
};

inline FeatureVector project(std::span<const double> catalog, const FeatureSpec& spec) {
    FeatureVector f;
    f.values.reserve(spec.selection().size());
    for (std::size_t i : spec.selection()) f.values.push_back(catalog[i]);
    return f;
}

inline FeatureVector assemble_features(const RawWindow& w, const FeatureSpec& spec, double fs = kSampleRateHz) {
    const auto catalog = compute_catalog(w, fs, spec.mfcc());
    return project(catalog, spec);
}

/// Default 120-feature selection: the 24 per-axis descriptors, the 72 MFCC
/// covariance diagonals, and the first-off-diagonal entries (i, i+1) of the
/// three cross-axis blocks for coefficients 0-7.
inline std::vector<std::string> default_selection_ids() {
    std::vector<std::string> ids;
    for (const char* axis : kAxisNames)
        for (const char* f : kPerAxisFeatures) ids.push_back(std::string(axis) + "_" + f);
    for (std::size_t b = 0; b < kAxisPairs.size(); ++b)
        for (std::size_t i = 0; i < 12; ++i)
            ids.push_back("mfcc_cov_" + pair_name(b) + "_" + std::to_string(i) + "_" + std::to_string(i));
    for (std::size_t b = 3; b < kAxisPairs.size(); ++b)
        for (std::size_t i = 0; i < 8; ++i)
            ids.push_back("mfcc_cov_" + pair_name(b) + "_" + std::to_string(i) + "_" + std::to_string(i + 1));
    return ids;
}

}  // namespace hdtac::features
