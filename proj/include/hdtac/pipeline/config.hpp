#pragma once

// Pipeline configuration: a flat `key = value` text file.
// Blank lines and lines starting with '#' are ignored; unknown keys are errors.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/parallel.hpp"
#include "hdtac/dataset/ingest.hpp"
#include "hdtac/dataset/processing.hpp"
#include "hdtac/encoders/config.hpp"
#include "hdtac/models/train.hpp"

namespace hdtac {

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::size_t jobs = default_jobs();
    EncoderConfig encoder;
    bool encoder_seed_set = false;
    // Raw/feature ranges are fitted as the [p, 100 - p] percentiles of the training split.
    double range_percentile = 0.5;
    TrainConfig train;
    bool quantize_classes = false;
    dataset::SplitOptions split;
    dataset::IngestOptions ingest;
    std::string selection_file;

    /// Applies the global seed to everything that was not seeded explicitly.
    void apply_seed(std::uint64_t s) {
        seed = s;
        split.seed = s;
        if (!encoder_seed_set) encoder.seed = s;
    }

    void validate() const {
        EncoderConfig probe = encoder;
        probe.validate();
        train.validate();
        if (!(split.ratio > 0.0 && split.ratio < 1.0)) throw InvalidConfig("split.ratio must be in (0, 1)");
        if (!(range_percentile >= 0.0 && range_percentile < 50.0))
            throw InvalidConfig("encoder.range_percentile must be in [0, 50)");
        if (ingest.windowing.stride == 0) throw InvalidConfig("dataset.stride must be >= 1");
        ingest.mfcc.validate(kSampleRateHz);
    }

    void set(const std::string& key, const std::string& value);

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["seed"] = seed;
        j["encoder.variant"] = std::string(to_string(encoder.variant));
        j["encoder.ngram_n"] = encoder.ngram;
        j["encoder.levels"] = encoder.levels;
        j["encoder.dim"] = encoder.dim;
        j["encoder.seed"] = encoder.seed;
        j["encoder.sn_bandwidth"] = encoder.sn_bandwidth;
        j["encoder.bind_start_time"] = encoder.bind_start_time;
        j["encoder.range_percentile"] = range_percentile;
        j["model.kind"] = to_string(train.model);
        j["model.lr"] = train.lr;
        j["model.epochs"] = train.epochs;
        j["model.regen_rate"] = train.regen_rate;
        j["model.margin"] = train.margin ? nlohmann::json(*train.margin) : nlohmann::json("adaptive");
        j["model.early_stop"] = train.early_stop;
        j["model.quantize_classes"] = quantize_classes;
        j["split.mode"] = dataset::to_string(split.mode);
        j["split.ratio"] = split.ratio;
        j["split.within_participant"] = split.within_participant;
        j["dataset.stride"] = ingest.windowing.stride;
        j["dataset.threshold"] = ingest.threshold;
        j["dataset.filter_tau_min"] = ingest.filter_tau_s / 60.0;
        j["dataset.shift_min"] = ingest.shift_minutes;
        j["features.selection_file"] = selection_file;
        j["features.mfcc_frame"] = ingest.mfcc.frame;
        j["features.mfcc_hop"] = ingest.mfcc.hop;
        j["features.mfcc_filters"] = ingest.mfcc.filters;
        j["features.mfcc_coefficients"] = ingest.mfcc.coefficients;
        return j;
    }
};

namespace detail {

template <typename T>
T parse_as(const std::string& key, const std::string& v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw InvalidConfig("config key '" + key + "': cannot parse '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InvalidConfig("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace detail

inline void PipelineConfig::set(const std::string& key, const std::string& value) {
    using detail::parse_as;
    if (key == "seed") apply_seed(parse_as<std::uint64_t>(key, value));
    else if (key == "jobs") jobs = parse_as<std::size_t>(key, value);
    else if (key == "encoder.variant") encoder.variant = parse_encoder_variant(value);
    else if (key == "encoder.ngram_n") encoder.ngram = parse_as<std::size_t>(key, value);
    else if (key == "encoder.levels") encoder.levels = parse_as<std::size_t>(key, value);
    else if (key == "encoder.dim") encoder.dim = parse_as<std::size_t>(key, value);
    else if (key == "encoder.seed") {
        encoder.seed = parse_as<std::uint64_t>(key, value);
        encoder_seed_set = true;
    } else if (key == "encoder.sn_bandwidth") encoder.sn_bandwidth = parse_as<double>(key, value);
    else if (key == "encoder.bind_start_time") encoder.bind_start_time = detail::parse_bool(key, value);
    else if (key == "encoder.range_percentile") range_percentile = parse_as<double>(key, value);
    else if (key == "model.kind") train.model = parse_model_kind(value);
    else if (key == "model.lr") train.lr = parse_as<double>(key, value);
    else if (key == "model.epochs") train.epochs = parse_as<std::size_t>(key, value);
    else if (key == "model.regen_rate") train.regen_rate = parse_as<double>(key, value);
    else if (key == "model.margin") {
        if (value == "adaptive") train.margin.reset();
        else train.margin = parse_as<double>(key, value);
    } else if (key == "model.early_stop") train.early_stop = detail::parse_bool(key, value);
    else if (key == "model.quantize_classes") quantize_classes = detail::parse_bool(key, value);
    else if (key == "split.mode") split.mode = dataset::parse_split_mode(value);
    else if (key == "split.ratio") split.ratio = parse_as<double>(key, value);
    else if (key == "split.within_participant") split.within_participant = detail::parse_bool(key, value);
    else if (key == "dataset.stride") ingest.windowing.stride = parse_as<std::size_t>(key, value);
    else if (key == "dataset.threshold") ingest.threshold = parse_as<double>(key, value);
    else if (key == "dataset.filter_tau_min") ingest.filter_tau_s = 60.0 * parse_as<double>(key, value);
    else if (key == "dataset.shift_min") ingest.shift_minutes = parse_as<double>(key, value);
    else if (key == "features.selection_file") selection_file = value;
    else if (key == "features.mfcc_frame") ingest.mfcc.frame = parse_as<std::size_t>(key, value);
    else if (key == "features.mfcc_hop") ingest.mfcc.hop = parse_as<std::size_t>(key, value);
    else if (key == "features.mfcc_filters") ingest.mfcc.filters = parse_as<std::size_t>(key, value);
    else if (key == "features.mfcc_coefficients") ingest.mfcc.coefficients = parse_as<std::size_t>(key, value);
    else throw InvalidConfig("unknown config key '" + key + "'");
}

inline PipelineConfig parse_config(std::istream& in, PipelineConfig cfg = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view t = dataset::detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw InvalidConfig("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key(dataset::detail::trim(t.substr(0, eq)));
        const std::string value(dataset::detail::trim(t.substr(eq + 1)));
        cfg.set(key, value);
    }
    return cfg;
}

inline PipelineConfig load_config(const std::string& path, PipelineConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
    return parse_config(in, std::move(cfg));
}

}  // namespace hdtac
