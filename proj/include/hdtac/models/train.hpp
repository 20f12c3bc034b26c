#pragma once

// Learning rules for the associative memory.
//
//   Vanilla  every sample added once
//   Adapt    on a miss: true += a*h, predicted -= a*h
//   Online   weighted by (1 - cos): on a miss true += a(1-d_t)h, pred -= a(1-d_p)h;
//            on a hit  true += a(1-d_t)h
//   Refine   Online's miss rule; on a hit only when the top-two gap is below the margin
//   Neural   iterative Adapt + regeneration of the least discriminative dimensions
//   Dist     iterative Adapt + regeneration of the dimensions that pushed
//            top-two misses toward the wrong class
//
// Similarities used as weights are cosines clamped to [0, 1].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/models/memory.hpp"

namespace hdtac {

enum class ModelKind { Vanilla, Adapt, Online, Refine, Neural, Dist };

inline const std::vector<std::pair<ModelKind, std::string>>& model_kind_names() {
    static const std::vector<std::pair<ModelKind, std::string>> names{
        {ModelKind::Vanilla, "vanilla"}, {ModelKind::Adapt, "adapt"},   {ModelKind::Online, "online"},
        {ModelKind::Refine, "refine"},   {ModelKind::Neural, "neural"}, {ModelKind::Dist, "dist"}};
    return names;
}

inline std::string to_string(ModelKind k) {
    for (const auto& [kind, name] : model_kind_names())
        if (kind == k) return name;
    return "unknown";
}

inline ModelKind parse_model_kind(const std::string& s) {
    for (const auto& [kind, name] : model_kind_names())
        if (name == s) return kind;
    throw InvalidConfig("unknown model kind '" + s + "'");
}

struct TrainConfig {
    ModelKind model = ModelKind::Refine;
    double lr = 3.0;
    std::size_t epochs = 20;
    double regen_rate = 0.02;
    // Refine: fixed margin; unset means the running mean of observed top-two gaps.
    std::optional<double> margin;
    bool early_stop = true;
    double plateau_delta = 0.001;
    std::size_t plateau_epochs = 3;

    void validate() const {
        if (!(lr > 0.0)) throw InvalidConfig("model.lr must be > 0");
        if (epochs < 1) throw InvalidConfig("model.epochs must be >= 1");
        if (!(regen_rate >= 0.0 && regen_rate < 1.0)) throw InvalidConfig("model.regen_rate must be in [0, 1)");
    }
};

/// Encoded training rows, row-major.
struct EncodedSet {
    std::size_t dim = 0;
    std::vector<float> data;
    std::vector<int> labels;

    EncodedSet() = default;
    EncodedSet(std::size_t d, std::size_t n) : dim(d), data(d * n, 0.0F), labels(n, 0) {}

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] std::span<float> row(std::size_t i) { return {data.data() + i * dim, dim}; }
    [[nodiscard]] std::span<const float> row(std::size_t i) const { return {data.data() + i * dim, dim}; }

    void push_back(std::span<const float> h, int label) {
        if (dim == 0) dim = h.size();
        if (h.size() != dim) throw InvalidDimension("EncodedSet: row dimension mismatch");
        data.insert(data.end(), h.begin(), h.end());
        labels.push_back(label);
    }
};

/// Re-samples the encoder at `positions`, re-encodes the affected output
/// dimensions of every row in `set`, and returns those dimensions.
using Regenerator =
    std::function<std::vector<std::size_t>(std::span<const std::size_t> positions, std::uint64_t event, EncodedSet& set)>;

struct TrainStats {
    std::size_t epochs_run = 0;
    std::vector<double> epoch_accuracy;  // on-the-fly accuracy of each pass (pre-update predictions)
    std::vector<std::vector<std::size_t>> regenerated;  // positions per regeneration event
};

namespace detail {

inline void check_set(const EncodedSet& set, const AssociativeMemory& mem) {
    if (set.dim != mem.dim() && set.size() > 0) throw InvalidDimension("training set dimension differs from memory");
    for (int l : set.labels)
        if (l < 0 || static_cast<std::size_t>(l) >= mem.class_count()) throw InvalidValue("label out of range");
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline void count_classes(const EncodedSet& set, AssociativeMemory& mem) {
    for (int l : set.labels) mem.increment_count(static_cast<std::size_t>(l));
}

inline bool plateaued(const std::vector<double>& acc, const TrainConfig& cfg) {
    if (!cfg.early_stop || acc.size() <= cfg.plateau_epochs) return false;
    return std::abs(acc.back() - acc[acc.size() - 1 - cfg.plateau_epochs]) < cfg.plateau_delta;
}

/// One pass in row order; `step(i, sims, predicted)` applies the update.
template <typename Step>
double pass(const EncodedSet& set, AssociativeMemory& mem, Step&& step) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto row = set.row(i);
        const auto sims = similarities(mem, row);
        const int pred = argmax(sims);
        if (pred == set.labels[i]) ++correct;
        step(i, sims, pred);
    }
    return set.size() ? static_cast<double>(correct) / static_cast<double>(set.size()) : 0.0;
}

/// Indices of the k smallest (or largest) scores; ties resolve to the lowest index.
inline std::vector<std::size_t> select_dims(const std::vector<double>& score, std::size_t k, bool largest) {
    std::vector<std::size_t> idx(score.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return largest ? score[a] > score[b] : score[a] < score[b];
    });
    idx.resize(std::min(k, idx.size()));
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline std::size_t regen_count(const TrainConfig& cfg, std::size_t dim) {
    return static_cast<std::size_t>(std::floor(cfg.regen_rate * static_cast<double>(dim)));
}

inline void apply_regeneration(const std::vector<std::size_t>& positions, std::uint64_t event, EncodedSet& set,
                               AssociativeMemory& mem, const Regenerator& regen, TrainStats& stats) {
    const auto affected = regen(positions, event, set);
    for (std::size_t c = 0; c < mem.class_count(); ++c) {
        auto a = mem.accumulator(c);
        for (std::size_t k : affected) a[k] = 0.0F;
    }
    stats.regenerated.push_back(positions);
}

inline void adapt_update(AssociativeMemory& mem, std::span<const float> h, int label, int pred, float lr) {
    if (pred == label) return;
    mem.add(static_cast<std::size_t>(label), h, lr);
    mem.add(static_cast<std::size_t>(pred), h, -lr);
}

}  // namespace detail

inline TrainStats train_vanilla(const EncodedSet& set, AssociativeMemory& mem) {
    detail::check_set(set, mem);
    for (std::size_t i = 0; i < set.size(); ++i) mem.add(static_cast<std::size_t>(set.labels[i]), set.row(i));
    detail::count_classes(set, mem);
    return {1, {}, {}};
}

inline TrainStats train_adapt(const EncodedSet& set, AssociativeMemory& mem, const TrainConfig& cfg) {
    cfg.validate();
    detail::check_set(set, mem);
    detail::count_classes(set, mem);
    TrainStats stats;
    const auto lr = static_cast<float>(cfg.lr);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        stats.epoch_accuracy.push_back(detail::pass(set, mem, [&](std::size_t i, const auto&, int pred) {
            detail::adapt_update(mem, set.row(i), set.labels[i], pred, lr);
        }));
        ++stats.epochs_run;
        if (detail::plateaued(stats.epoch_accuracy, cfg)) break;
    }
    return stats;
}

inline TrainStats train_online(const EncodedSet& set, AssociativeMemory& mem, const TrainConfig& cfg) {
    cfg.validate();
    detail::check_set(set, mem);
    detail::count_classes(set, mem);
    TrainStats stats;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        stats.epoch_accuracy.push_back(detail::pass(set, mem, [&](std::size_t i, const auto& sims, int pred) {
            const auto h = set.row(i);
            const auto l = static_cast<std::size_t>(set.labels[i]);
            const auto p = static_cast<std::size_t>(pred);
            mem.add(l, h, static_cast<float>(cfg.lr * (1.0 - detail::clamp01(sims[l]))));
            if (p != l) mem.add(p, h, static_cast<float>(-cfg.lr * (1.0 - detail::clamp01(sims[p]))));
        }));
        ++stats.epochs_run;
        if (detail::plateaued(stats.epoch_accuracy, cfg)) break;
    }
    return stats;
}

inline TrainStats train_refine(const EncodedSet& set, AssociativeMemory& mem, const TrainConfig& cfg) {
    cfg.validate();
    detail::check_set(set, mem);
    detail::count_classes(set, mem);
    TrainStats stats;
    double gap_sum = 0.0;
    std::size_t gap_n = 0;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        stats.epoch_accuracy.push_back(detail::pass(set, mem, [&](std::size_t i, const auto& sims, int pred) {
            const auto h = set.row(i);
            const auto l = static_cast<std::size_t>(set.labels[i]);
            const auto p = static_cast<std::size_t>(pred);
            const double dl = detail::clamp01(sims[l]);
            if (p != l) {
                mem.add(l, h, static_cast<float>(cfg.lr * (1.0 - dl)));
                mem.add(p, h, static_cast<float>(-cfg.lr * (1.0 - detail::clamp01(sims[p]))));
                return;
            }
            double other = 0.0;
            for (std::size_t c = 0; c < sims.size(); ++c)
                if (c != l) other = std::max(other, detail::clamp01(sims[c]));
            const double gap = dl - other;
            double margin = 0.0;
            if (cfg.margin) {
                margin = *cfg.margin;
            } else {
                gap_sum += gap;
                ++gap_n;
                margin = gap_sum / static_cast<double>(gap_n);
            }
            if (gap < margin) mem.add(l, h, static_cast<float>(cfg.lr * (1.0 - dl)));
        }));
        ++stats.epochs_run;
        if (detail::plateaued(stats.epoch_accuracy, cfg)) break;
    }
    return stats;
}

/// Dimension score: spread of the per-class normalized accumulators
/// (|c0 - c1| for two classes, summed over class pairs in general).
inline std::vector<double> discriminative_scores(const AssociativeMemory& mem) {
    std::vector<double> inv(mem.class_count());
    for (std::size_t c = 0; c < inv.size(); ++c) {
        const double n = mem.norm(c);
        inv[c] = n > 0.0 ? 1.0 / n : 0.0;
    }
    std::vector<double> score(mem.dim(), 0.0);
    for (std::size_t a = 0; a < mem.class_count(); ++a)
        for (std::size_t b = a + 1; b < mem.class_count(); ++b) {
            const auto ca = mem.accumulator(a);
            const auto cb = mem.accumulator(b);
            for (std::size_t k = 0; k < mem.dim(); ++k) score[k] += std::abs(ca[k] * inv[a] - cb[k] * inv[b]);
        }
    return score;
}

inline TrainStats train_neural(EncodedSet& set, AssociativeMemory& mem, const TrainConfig& cfg,
                               const Regenerator& regen = {}) {
    cfg.validate();
    detail::check_set(set, mem);
    if (cfg.regen_rate > 0.0 && !regen) throw UnsupportedEncoder("NeuralHD: encoder does not support regeneration");
    detail::count_classes(set, mem);
    TrainStats stats;
    const auto lr = static_cast<float>(cfg.lr);
    const std::size_t k = detail::regen_count(cfg, mem.dim());
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        stats.epoch_accuracy.push_back(detail::pass(set, mem, [&](std::size_t i, const auto&, int pred) {
            detail::adapt_update(mem, set.row(i), set.labels[i], pred, lr);
        }));
        ++stats.epochs_run;
        if (detail::plateaued(stats.epoch_accuracy, cfg)) break;
        if (k == 0 || e + 1 == cfg.epochs) continue;
        const auto dims = detail::select_dims(discriminative_scores(mem), k, false);
        detail::apply_regeneration(dims, stats.regenerated.size(), set, mem, regen, stats);
    }
    return stats;
}

inline TrainStats train_dist(EncodedSet& set, AssociativeMemory& mem, const TrainConfig& cfg,
                             const Regenerator& regen = {}) {
    cfg.validate();
    detail::check_set(set, mem);
    if (cfg.regen_rate > 0.0 && !regen) throw UnsupportedEncoder("DistHD: encoder does not support regeneration");
    detail::count_classes(set, mem);
    TrainStats stats;
    const auto lr = static_cast<float>(cfg.lr);
    const std::size_t k = detail::regen_count(cfg, mem.dim());
    std::vector<double> mislead(mem.dim());
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        std::fill(mislead.begin(), mislead.end(), 0.0);
        std::size_t misses = 0;
        stats.epoch_accuracy.push_back(detail::pass(set, mem, [&](std::size_t i, const auto& sims, int pred) {
            const auto h = set.row(i);
            const auto l = static_cast<std::size_t>(set.labels[i]);
            const auto p = static_cast<std::size_t>(pred);
            if (p != l && k > 0) {
                std::size_t rank = 0;
                for (double s : sims)
                    if (s > sims[l]) ++rank;
                if (rank == 1) {
                    ++misses;
                    const double np = mem.norm(p), nl = mem.norm(l);
                    const auto cp = mem.accumulator(p);
                    const auto cl = mem.accumulator(l);
                    for (std::size_t d = 0; d < h.size(); ++d) {
                        const double up = np > 0.0 ? cp[d] / np : 0.0;
                        const double ul = nl > 0.0 ? cl[d] / nl : 0.0;
                        mislead[d] += h[d] * (up - ul);
                    }
                }
            }
            detail::adapt_update(mem, h, set.labels[i], pred, lr);
        }));
        ++stats.epochs_run;
        if (detail::plateaued(stats.epoch_accuracy, cfg)) break;
        if (k == 0 || misses == 0 || e + 1 == cfg.epochs) continue;
        const auto dims = detail::select_dims(mislead, k, true);
        detail::apply_regeneration(dims, stats.regenerated.size(), set, mem, regen, stats);
    }
    return stats;
}

/// Dispatch on cfg.model. Regeneration is used only by Neural and Dist.
inline TrainStats train(EncodedSet& set, AssociativeMemory& mem, const TrainConfig& cfg, const Regenerator& regen = {}) {
    switch (cfg.model) {
        case ModelKind::Vanilla: return train_vanilla(set, mem);
        case ModelKind::Adapt: return train_adapt(set, mem, cfg);
        case ModelKind::Online: return train_online(set, mem, cfg);
        case ModelKind::Refine: return train_refine(set, mem, cfg);
        case ModelKind::Neural: return train_neural(set, mem, cfg, regen);
        case ModelKind::Dist: return train_dist(set, mem, cfg, regen);
    }
    throw InvalidConfig("unknown model kind");
}

}  // namespace hdtac
