#pragma once

// Ingest -> split -> range fitting -> encoding -> training -> evaluation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdtac/core/parallel.hpp"
#include "hdtac/dataset/processing.hpp"
#include "hdtac/dataset/records.hpp"
#include "hdtac/encoders/encoder.hpp"
#include "hdtac/eval/metrics.hpp"
#include "hdtac/features/catalog.hpp"
#include "hdtac/models/memory.hpp"
#include "hdtac/models/train.hpp"
#include "hdtac/pipeline/config.hpp"

namespace hdtac {

using dataset::LabeledSample;

/// Feature selection from the config: the selection file if set, else the default list.
inline features::FeatureSpec make_feature_spec(const PipelineConfig& cfg) {
    features::FeatureSpec spec(cfg.ingest.mfcc);
    if (cfg.selection_file.empty()) spec.select_ids(features::default_selection_ids());
    else spec.load_selection(cfg.selection_file);
    return spec;
}

/// [p, 100 - p] percentile interval of `values` (reordered in place).
/// Degenerate intervals are widened so lo < hi always holds.
inline ValueRange percentile_range(std::vector<double>& values, double p) {
    if (values.empty()) return {0.0, 1.0};
    auto at = [&](double q) {
        const auto k = static_cast<std::size_t>(std::llround(q / 100.0 * static_cast<double>(values.size() - 1)));
        std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
        return values[k];
    };
    ValueRange r{at(p), at(100.0 - p)};
    if (!(r.hi > r.lo)) {
        const double eps = std::max(1e-9, 1e-6 * std::abs(r.lo));
        r.lo -= eps;
        r.hi += eps;
    }
    return r;
}

struct FittedRanges {
    std::array<ValueRange, 3> raw{};
    std::vector<ValueRange> features;
};

inline FittedRanges fit_ranges(const std::vector<LabeledSample>& samples, std::span<const std::size_t> idx,
                               double percentile) {
    FittedRanges out;
    if (idx.empty()) throw InvalidValue("fit_ranges: empty training split");
    std::vector<double> buf;
    for (std::size_t a = 0; a < 3; ++a) {
        buf.clear();
        for (std::size_t i : idx)
            for (const auto& s : samples[i].window.samples) buf.push_back(s[a]);
        out.raw[a] = percentile_range(buf, percentile);
    }
    const std::size_t nf = samples[idx.front()].features.size();
    for (std::size_t k = 0; k < nf; ++k) {
        buf.clear();
        for (std::size_t i : idx) buf.push_back(samples[i].features.values.at(k));
        out.features.push_back(percentile_range(buf, percentile));
    }
    return out;
}

inline EncodedSet encode_samples(const Encoder& enc, const std::vector<LabeledSample>& samples,
                                 std::span<const std::size_t> idx, std::size_t jobs) {
    EncodedSet set(enc.dim(), idx.size());
    parallel_for(idx.size(), jobs, [&](std::size_t r) {
        const auto& s = samples[idx[r]];
        enc.encode_into(s.window, s.features, set.row(r));
        set.labels[r] = s.label;
    });
    return set;
}

inline void reencode_dims(const Encoder& enc, const std::vector<LabeledSample>& samples,
                          std::span<const std::size_t> idx, std::span<const std::size_t> dims, EncodedSet& set,
                          std::size_t jobs) {
    parallel_for(idx.size(), jobs, [&](std::size_t r) {
        const auto& s = samples[idx[r]];
        enc.encode_dims(s.window, s.features, dims, set.row(r));
    });
}

struct RegenEvent {
    std::uint64_t event = 0;
    std::vector<std::size_t> positions;
};

/// Regenerator bound to an encoder and the rows it encoded; records every
/// event so a saved model can replay them.
inline Regenerator make_regenerator(Encoder& enc, const std::vector<LabeledSample>& samples,
                                    std::vector<std::size_t> idx, std::size_t jobs, std::vector<RegenEvent>& log,
                                    std::set<std::size_t>& touched) {
    return [&enc, &samples, idx = std::move(idx), jobs, &log, &touched](std::span<const std::size_t> positions,
                                                                        std::uint64_t event, EncodedSet& set) {
        auto affected = enc.regenerate(positions, event);
        reencode_dims(enc, samples, idx, affected, set, jobs);
        log.push_back({event, {positions.begin(), positions.end()}});
        touched.insert(affected.begin(), affected.end());
        return affected;
    };
}

struct Evaluation {
    eval::Metrics metrics;
    std::vector<eval::RocPoint> roc;
    std::vector<double> scores;
    std::vector<int> predicted;
    std::vector<int> truth;
};

inline Evaluation evaluate(const AssociativeMemory& mem, const EncodedSet& set) {
    Evaluation ev;
    ev.truth = set.labels;
    ev.predicted.reserve(set.size());
    ev.scores.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto p = predict(mem, set.row(i));
        ev.predicted.push_back(p.label);
        ev.scores.push_back(p.margin());
    }
    ev.metrics = eval::compute_metrics(ev.truth, ev.predicted);
    ev.roc = eval::roc_curve(ev.scores, ev.truth);
    return ev;
}

struct ExperimentResult {
    EncoderConfig encoder;  // with fitted ranges
    TrainConfig train;
    AssociativeMemory memory;
    TrainStats stats;
    std::vector<RegenEvent> regen_log;
    Evaluation test;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double encode_seconds = 0.0;
    double train_seconds = 0.0;
};

/// A split with a fitted encoder and both sides encoded. Several training
/// configurations can run against one preparation.
class PreparedSplit {
public:
    PreparedSplit(const std::vector<LabeledSample>& samples, const PipelineConfig& cfg)
        : samples_(&samples), cfg_(cfg) {
        cfg_.validate();
        if (samples.empty()) throw InvalidValue("no samples to train on");
        const auto split = dataset::split_indices(samples, cfg_.split);
        train_idx_ = split.train;
        test_idx_ = split.test;
        if (train_idx_.empty() || test_idx_.empty()) throw InvalidValue("split produced an empty side");

        const auto ranges = fit_ranges(samples, train_idx_, cfg_.range_percentile);
        EncoderConfig ec = cfg_.encoder;
        ec.raw_ranges = ranges.raw;
        ec.feature_ranges = ranges.features;
        const auto t0 = std::chrono::steady_clock::now();
        encoder_ = std::make_unique<Encoder>(ec);
        train_ = encode_samples(*encoder_, samples, train_idx_, cfg_.jobs);
        test_ = encode_samples(*encoder_, samples, test_idx_, cfg_.jobs);
        encode_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    [[nodiscard]] const Encoder& encoder() const { return *encoder_; }
    [[nodiscard]] const EncodedSet& train_set() const { return train_; }
    [[nodiscard]] const EncodedSet& test_set() const { return test_; }
    [[nodiscard]] const std::vector<std::size_t>& train_indices() const { return train_idx_; }
    [[nodiscard]] const std::vector<std::size_t>& test_indices() const { return test_idx_; }

    /// Trains and evaluates. Regenerating models work on copies of the
    /// encoder and encodings unless `consume` is set, in which case this
    /// preparation must not be reused afterwards.
    ExperimentResult run(const TrainConfig& tc, bool consume = false) {
        ExperimentResult res;
        res.encoder = encoder_->config();
        res.train = tc;
        res.n_train = train_.size();
        res.n_test = test_.size();
        res.encode_seconds = encode_seconds_;
        res.memory = AssociativeMemory(encoder_->dim());

        const bool regenerates =
            (tc.model == ModelKind::Neural || tc.model == ModelKind::Dist) && tc.regen_rate > 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        if (!regenerates) {
            EncodedSet& set = train_;
            res.stats = train_const(set, res.memory, tc);
            res.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            res.test = evaluate(cfg_.quantize_classes ? sign_quantized(res.memory) : res.memory, test_);
            return res;
        }

        std::unique_ptr<Encoder> enc_copy;
        EncodedSet train_copy, test_copy;
        Encoder* enc = encoder_.get();
        EncodedSet* train = &train_;
        EncodedSet* test = &test_;
        if (!consume) {
            enc_copy = std::make_unique<Encoder>(*encoder_);
            train_copy = train_;
            test_copy = test_;
            enc = enc_copy.get();
            train = &train_copy;
            test = &test_copy;
        }
        std::set<std::size_t> touched;
        const auto regen = make_regenerator(*enc, *samples_, train_idx_, cfg_.jobs, res.regen_log, touched);
        res.stats = hdtac::train(*train, res.memory, tc, regen);
        res.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::vector<std::size_t> dims(touched.begin(), touched.end());
        reencode_dims(*enc, *samples_, test_idx_, dims, *test, cfg_.jobs);
        res.test = evaluate(cfg_.quantize_classes ? sign_quantized(res.memory) : res.memory, *test);
        res.encoder = enc->config();
        return res;
    }

private:
    static TrainStats train_const(EncodedSet& set, AssociativeMemory& mem, const TrainConfig& tc) {
        return hdtac::train(set, mem, tc);
    }

    const std::vector<LabeledSample>* samples_;
    PipelineConfig cfg_;
    std::vector<std::size_t> train_idx_;
    std::vector<std::size_t> test_idx_;
    std::unique_ptr<Encoder> encoder_;
    EncodedSet train_;
    EncodedSet test_;
    double encode_seconds_ = 0.0;
};

inline ExperimentResult run_experiment(const std::vector<LabeledSample>& samples, const PipelineConfig& cfg) {
    PreparedSplit prep(samples, cfg);
    return prep.run(cfg.train, true);
}

/// Wall time of feature extraction + encoding + inference for single windows,
/// one at a time on the calling thread.
inline eval::LatencySummary measure_latency(const features::FeatureSpec& spec, const Encoder& enc,
                                            const AssociativeMemory& mem, const std::vector<RawWindow>& windows) {
    std::vector<double> secs;
    secs.reserve(windows.size());
    RealHV h(enc.dim());
    for (const auto& w : windows) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto f = features::assemble_features(w, spec);
        enc.encode_into(w, f, h.data());
        const auto p = predict(mem, h);
        secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        if (p.sims.empty()) throw UntrainedModel("measure_latency: empty prediction");
    }
    return eval::summarize_latency(std::move(secs));
}

inline nlohmann::json to_json(const eval::LatencySummary& l) {
    return {{"mean", l.mean_s}, {"p50", l.p50_s}, {"p95", l.p95_s}, {"n", l.n}};
}

// ---- model metadata --------------------------------------------------------------

inline nlohmann::json encoder_to_json(const EncoderConfig& e) {
    nlohmann::json j;
    j["variant"] = std::string(to_string(e.variant));
    j["dim"] = e.dim;
    j["ngram_n"] = e.ngram;
    j["levels"] = e.levels;
    j["seed"] = e.seed;
    j["sn_bandwidth"] = e.sn_bandwidth;
    j["bind_start_time"] = e.bind_start_time;
    auto ranges = nlohmann::json::array();
    for (const auto& r : e.raw_ranges) ranges.push_back({r.lo, r.hi});
    j["raw_ranges"] = ranges;
    auto fr = nlohmann::json::array();
    for (const auto& r : e.feature_ranges) fr.push_back({r.lo, r.hi});
    j["feature_ranges"] = fr;
    return j;
}

inline EncoderConfig encoder_from_json(const nlohmann::json& j) {
    EncoderConfig e;
    e.variant = parse_encoder_variant(j.at("variant").get<std::string>());
    e.dim = j.at("dim").get<std::size_t>();
    e.ngram = j.at("ngram_n").get<std::size_t>();
    e.levels = j.at("levels").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.sn_bandwidth = j.at("sn_bandwidth").get<double>();
    e.bind_start_time = j.at("bind_start_time").get<bool>();
    for (std::size_t a = 0; a < 3; ++a) e.raw_ranges[a] = {j.at("raw_ranges")[a][0], j.at("raw_ranges")[a][1]};
    for (const auto& r : j.at("feature_ranges")) e.feature_ranges.push_back({r[0], r[1]});
    return e;
}

/// Metadata needed to rebuild the exact encoder behind a saved memory.
/// `encoder` holds the pre-regeneration configuration; events replay in order.
inline nlohmann::json model_metadata(const ExperimentResult& r, const PipelineConfig& cfg,
                                     const std::vector<std::string>& selected_features) {
    nlohmann::json j;
    j["format"] = "hdtac-model-meta";
    j["version"] = 1;
    j["encoder"] = encoder_to_json(r.encoder);
    auto events = nlohmann::json::array();
    for (const auto& e : r.regen_log) events.push_back({{"event", e.event}, {"positions", e.positions}});
    j["regeneration"] = events;
    j["config"] = cfg.to_json();
    j["features"] = selected_features;
    return j;
}

inline std::unique_ptr<Encoder> encoder_from_metadata(const nlohmann::json& meta) {
    auto enc = std::make_unique<Encoder>(encoder_from_json(meta.at("encoder")));
    for (const auto& e : meta.at("regeneration")) {
        const auto positions = e.at("positions").get<std::vector<std::size_t>>();
        enc->regenerate(positions, e.at("event").get<std::uint64_t>());
    }
    return enc;
}

}  // namespace hdtac
