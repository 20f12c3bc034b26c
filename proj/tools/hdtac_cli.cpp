// hdtac: ingest / train / eval / sweep / bench front end.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdtac/hdtac.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hdtac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct UsageError : Error {
    using Error::Error;
};

struct Globals {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string split;
    std::string out = "out";
    bool no_cache = false;
    std::optional<std::size_t> jobs;
    std::vector<std::string> overrides;
};

PipelineConfig resolve_config(const Globals& g) {
    PipelineConfig cfg;
    if (!g.config_file.empty()) cfg = load_config(g.config_file);
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        cfg.set(std::string(dataset::detail::trim(std::string_view(kv).substr(0, eq))),
                std::string(dataset::detail::trim(std::string_view(kv).substr(eq + 1))));
    }
    if (g.seed) cfg.apply_seed(*g.seed);
    else if (!cfg.encoder_seed_set) cfg.apply_seed(cfg.seed);
    if (!g.split.empty()) cfg.split.mode = dataset::parse_split_mode(g.split);
    if (g.jobs) {
        cfg.jobs = *g.jobs;
        cfg.ingest.jobs = *g.jobs;
    }
    cfg.validate();
    return cfg;
}

// ---- cache handling --------------------------------------------------------------

json ingest_options_json(const dataset::IngestOptions& o) {
    return {{"length", o.windowing.length},       {"stride", o.windowing.stride},
            {"max_span_ms", o.windowing.max_span_ms}, {"filter_tau_s", o.filter_tau_s},
            {"shift_minutes", o.shift_minutes},  {"threshold", o.threshold},
            {"mfcc", {o.mfcc.frame, o.mfcc.hop, o.mfcc.filters, o.mfcc.coefficients}}};
}

fs::file_time_type newest_input(const fs::path& data_dir) {
    auto t = fs::last_write_time(data_dir / dataset::kAccelFile);
    const fs::path tac = data_dir / dataset::kTacDir;
    if (fs::is_directory(tac))
        for (const auto& e : fs::directory_iterator(tac))
            if (e.is_regular_file()) t = std::max(t, e.last_write_time());
    return t;
}

/// Up to date when the cache is newer than every input and was built with
/// the same ingest options.
bool cache_fresh(const fs::path& cache, const fs::path& data_dir, const dataset::IngestOptions& opt) {
    const fs::path side = cache.string() + ".json";
    if (!fs::exists(cache) || !fs::exists(side)) return false;
    if (fs::last_write_time(cache) <= newest_input(data_dir)) return false;
    std::ifstream in(side);
    json j;
    try {
        in >> j;
    } catch (const json::exception&) {
        return false;
    }
    return j.value("options", json()) == ingest_options_json(opt);
}

json run_ingest(const fs::path& data_dir, const fs::path& cache, const PipelineConfig& cfg, bool force) {
    if (!fs::exists(data_dir / dataset::kAccelFile))
        throw UsageError("dataset not found: '" + (data_dir / dataset::kAccelFile).string() + "' does not exist");
    if (!force && cache_fresh(cache, data_dir, cfg.ingest)) {
        std::ifstream in(cache.string() + ".json");
        json side;
        in >> side;
        std::cerr << "cache up to date: " << cache.string() << "\n";
        json rep = side.at("report");
        rep["cached"] = true;
        return rep;
    }
    auto res = dataset::ingest(data_dir.string(), cfg.ingest);
    if (cache.has_parent_path()) fs::create_directories(cache.parent_path());
    dataset::write_cache(cache.string(), res.samples, cfg.ingest.mfcc);
    json side{{"options", ingest_options_json(cfg.ingest)}, {"report", res.report.to_json()}};
    std::ofstream(cache.string() + ".json") << side.dump(2) << '\n';
    json rep = res.report.to_json();
    rep["cached"] = false;
    return rep;
}

std::vector<dataset::LabeledSample> load_samples(const Globals& g, const PipelineConfig& cfg, const std::string& cache_opt,
                                                 const std::string& data_opt, const features::FeatureSpec& spec) {
    const fs::path cache = cache_opt.empty() ? fs::path(g.out) / "samples.bin" : fs::path(cache_opt);
    if (!data_opt.empty()) run_ingest(data_opt, cache, cfg, g.no_cache);
    if (!fs::exists(cache))
        throw UsageError("no sample cache at '" + cache.string() + "'; run 'hdtac ingest --data DIR' or pass --data");
    return dataset::read_cache(cache.string(), spec);
}

// ---- reporting --------------------------------------------------------------------

void check_recount(const Evaluation& ev) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ev.truth.size(); ++i) correct += ev.truth[i] == ev.predicted[i];
    const double acc = ev.truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(ev.truth.size());
    if (std::abs(acc - ev.metrics.accuracy) > 1e-12) throw Error("metrics disagree with confusion recount");
    const auto& m = ev.metrics;
    const double f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2 * m.precision * m.recall / (m.precision + m.recall);
    if (std::abs(f1 - m.f1) > 1e-12) throw Error("F1 disagrees with precision/recall");
}

json metrics_report(const Evaluation& ev, const PipelineConfig& cfg, const std::optional<eval::LatencySummary>& lat) {
    check_recount(ev);
    json r;
    r["seed"] = cfg.seed;
    r["split"] = dataset::to_string(cfg.split.mode);
    r["metrics"] = eval::to_json(ev.metrics);
    r["roc_auc"] = eval::roc_auc(ev.roc);
    r["roc_points"] = ev.roc.size();
    if (lat) r["per_window_latency_s"] = to_json(*lat);
    r["config"] = cfg.to_json();
    return r;
}

void write_roc(const fs::path& path, const std::vector<eval::RocPoint>& roc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "# fpr tpr\n" << std::setprecision(10);
    for (const auto& p : roc) out << p.fpr << ' ' << p.tpr << '\n';
}

struct Row {
    std::string label;
    std::string split;
    eval::Metrics m;
    double auc = 0.0;
};

void print_table(std::ostream& os, const std::vector<Row>& rows) {
    os << std::left << std::setw(28) << "run" << std::setw(10) << "split" << std::right << std::setw(9) << "acc%"
       << std::setw(9) << "sober%" << std::setw(9) << "drunk%" << std::setw(8) << "prec" << std::setw(8) << "recall"
       << std::setw(8) << "f1" << std::setw(8) << "auc" << '\n';
    os << std::fixed;
    for (const auto& r : rows) {
        os << std::left << std::setw(28) << r.label << std::setw(10) << r.split << std::right << std::setprecision(2)
           << std::setw(9) << 100 * r.m.accuracy << std::setw(9) << 100 * r.m.sober_accuracy << std::setw(9)
           << 100 * r.m.drunk_accuracy << std::setprecision(3) << std::setw(8) << r.m.precision << std::setw(8)
           << r.m.recall << std::setw(8) << r.m.f1 << std::setw(8) << r.auc << '\n';
    }
    os.unsetf(std::ios::fixed);
}

std::vector<RawWindow> pick_windows(const std::vector<dataset::LabeledSample>& samples,
                                    const std::vector<std::size_t>& idx, std::size_t n) {
    std::vector<RawWindow> out;
    for (std::size_t k = 0; k < idx.size() && out.size() < n; ++k) out.push_back(samples[idx[k]].window);
    return out;
}

// ---- subcommands ------------------------------------------------------------------

int cmd_ingest(const Globals& g, const std::string& data, const std::string& cache_opt) {
    const auto cfg = resolve_config(g);
    if (data.empty()) throw UsageError("ingest: --data is required");
    const fs::path cache = cache_opt.empty() ? fs::path(g.out) / "samples.bin" : fs::path(cache_opt);
    const json rep = run_ingest(data, cache, cfg, g.no_cache);
    fs::create_directories(g.out);
    std::ofstream(fs::path(g.out) / "ingest_report.json") << rep.dump(2) << '\n';
    std::cout << rep.dump(2) << '\n';
    return kExitOk;
}

int cmd_train(const Globals& g, const std::string& cache, const std::string& data) {
    const auto cfg = resolve_config(g);
    const auto spec = make_feature_spec(cfg);
    const auto samples = load_samples(g, cfg, cache, data, spec);
    PreparedSplit prep(samples, cfg);
    const auto windows = pick_windows(samples, prep.test_indices(), 100);
    auto res = prep.run(cfg.train, true);

    fs::create_directories(g.out);
    const fs::path model = fs::path(g.out) / "model.bin";
    save_memory(res.memory, model.string());
    std::ofstream(model.string() + ".json") << model_metadata(res, cfg, spec.selected_ids()).dump(2) << '\n';

    const auto replay = encoder_from_metadata(model_metadata(res, cfg, {}));
    const auto lat =
        measure_latency(spec, *replay, cfg.quantize_classes ? sign_quantized(res.memory) : res.memory, windows);
    json rep = metrics_report(res.test, cfg, lat);
    rep["command"] = "train";
    rep["n_train"] = res.n_train;
    rep["n_test"] = res.n_test;
    rep["epochs_run"] = res.stats.epochs_run;
    rep["epoch_accuracy"] = res.stats.epoch_accuracy;
    rep["encode_seconds"] = res.encode_seconds;
    rep["train_seconds"] = res.train_seconds;
    std::ofstream(fs::path(g.out) / "metrics.jsonl") << rep.dump() << '\n';
    write_roc(fs::path(g.out) / "roc.txt", res.test.roc);
    print_table(std::cout, {{to_string(cfg.train.model) + "/" + std::string(to_string(cfg.encoder.variant)),
                             dataset::to_string(cfg.split.mode), res.test.metrics, eval::roc_auc(res.test.roc)}});
    return kExitOk;
}

PipelineConfig config_from_meta(const json& meta) {
    PipelineConfig cfg;
    for (const auto& [k, v] : meta.at("config").items()) cfg.set(k, v.is_string() ? v.get<std::string>() : v.dump());
    return cfg;
}

int cmd_eval(const Globals& g, const std::string& model_path, const std::string& cache, const std::string& data,
             const std::string& subset) {
    if (model_path.empty()) throw UsageError("eval: --model is required");
    const auto mem = load_memory(model_path);
    std::ifstream in(model_path + ".json");
    if (!in) throw UsageError("eval: missing model metadata '" + model_path + ".json'");
    json meta;
    in >> meta;
    auto cfg = config_from_meta(meta);
    if (g.seed || !g.split.empty()) {
        // only the split may be overridden; the encoder is fixed by the model
        if (g.seed) cfg.split.seed = *g.seed;
        if (!g.split.empty()) cfg.split.mode = dataset::parse_split_mode(g.split);
    }
    if (g.jobs) cfg.jobs = *g.jobs;
    auto enc = encoder_from_metadata(meta);
    if (enc->dim() != mem.dim())
        throw InvalidDimension("model dimension " + std::to_string(mem.dim()) + " differs from encoder dimension " +
                               std::to_string(enc->dim()));
    features::FeatureSpec spec(cfg.ingest.mfcc);
    spec.select_ids(meta.at("features").get<std::vector<std::string>>());
    if (spec.selection().size() != enc->config().feature_ranges.size() && !enc->config().feature_ranges.empty())
        throw InvalidDimension("feature selection does not match the encoder's fitted ranges");

    Globals g2 = g;
    const auto samples = load_samples(g2, cfg, cache, data, spec);
    const auto split = dataset::split_indices(samples, cfg.split);
    std::vector<std::size_t> idx;
    if (subset == "test") idx = split.test;
    else if (subset == "train") idx = split.train;
    else if (subset == "all") {
        idx.resize(samples.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    } else throw UsageError("eval: --subset must be test, train or all");
    if (idx.empty()) throw InvalidValue("eval: selected subset is empty");

    const auto set = encode_samples(*enc, samples, idx, cfg.jobs);
    const auto used = cfg.quantize_classes ? sign_quantized(mem) : mem;
    const auto ev = evaluate(used, set);
    const auto lat = measure_latency(spec, *enc, used, pick_windows(samples, idx, 100));
    json rep = metrics_report(ev, cfg, lat);
    rep["command"] = "eval";
    rep["subset"] = subset;
    rep["n"] = idx.size();
    fs::create_directories(g.out);
    std::ofstream(fs::path(g.out) / "eval_metrics.jsonl") << rep.dump() << '\n';
    write_roc(fs::path(g.out) / "eval_roc.txt", ev.roc);
    print_table(std::cout, {{"eval/" + subset, dataset::to_string(cfg.split.mode), ev.metrics, eval::roc_auc(ev.roc)}});
    return kExitOk;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = dataset::detail::trim(item); !t.empty()) out.emplace_back(t);
    return out;
}

std::vector<std::string> default_grid(const std::string& grid) {
    if (grid == "ngram") return {"2", "3", "4", "5", "6", "7"};
    if (grid == "lr") return {"1", "2", "3", "4", "5"};
    if (grid == "encoder")
        return {"kv_rl", "kv_sn", "sinusoid", "generic", "density",
                "ensemble_kv_rl", "ensemble_kv_sn", "ensemble_sinusoid", "ensemble_generic"};
    if (grid == "model") return {"vanilla", "adapt", "online", "refine", "neural", "dist"};
    throw UsageError("sweep: --grid must be one of ngram, lr, encoder, model");
}

int cmd_sweep(const Globals& g, const std::string& cache, const std::string& data, const std::string& grid,
              const std::string& values_opt, bool values_given) {
    const auto base = resolve_config(g);
    const auto values = values_given ? split_list(values_opt) : default_grid(grid);
    if (grid != "ngram" && grid != "lr" && grid != "encoder" && grid != "model") default_grid(grid);
    if (values.empty()) throw UsageError("sweep: empty grid");
    const auto spec = make_feature_spec(base);
    const auto samples = load_samples(g, base, cache, data, spec);

    std::vector<dataset::SplitMode> modes;
    if (g.split.empty()) modes = {dataset::SplitMode::Shuffled, dataset::SplitMode::Chronological};
    else modes = {base.split.mode};

    fs::create_directories(g.out);
    std::ofstream jl(fs::path(g.out) / "sweep.jsonl");
    std::vector<Row> rows;
    const std::string key = grid == "ngram"   ? "encoder.ngram_n"
                            : grid == "lr"    ? "model.lr"
                            : grid == "model" ? "model.kind"
                                              : "encoder.variant";
    const bool shares_encoding = grid == "lr" || grid == "model";
    for (const auto mode : modes) {
        auto cfg = base;
        cfg.split.mode = mode;
        std::unique_ptr<PreparedSplit> prep;
        if (shares_encoding) prep = std::make_unique<PreparedSplit>(samples, cfg);
        for (std::size_t k = 0; k < values.size(); ++k) {
            auto run_cfg = cfg;
            run_cfg.set(key, values[k]);
            run_cfg.validate();
            ExperimentResult res;
            if (shares_encoding) {
                res = prep->run(run_cfg.train, k + 1 == values.size());
            } else {
                PreparedSplit p(samples, run_cfg);
                res = p.run(run_cfg.train, true);
            }
            json rep = metrics_report(res.test, run_cfg, std::nullopt);
            rep["command"] = "sweep";
            rep["grid"] = grid;
            rep["value"] = values[k];
            rep["n_train"] = res.n_train;
            rep["n_test"] = res.n_test;
            rep["epochs_run"] = res.stats.epochs_run;
            jl << rep.dump() << '\n' << std::flush;
            rows.push_back({grid + "=" + values[k], dataset::to_string(mode), res.test.metrics, eval::roc_auc(res.test.roc)});
            std::cerr << grid << '=' << values[k] << " [" << dataset::to_string(mode) << "] acc "
                      << 100 * res.test.metrics.accuracy << "\n";
        }
    }
    print_table(std::cout, rows);
    std::ofstream table(fs::path(g.out) / "sweep_table.txt");
    print_table(table, rows);
    return kExitOk;
}

std::string cpu_model() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("model name", 0) == 0) {
            const auto c = line.find(':');
            return c == std::string::npos ? line : std::string(dataset::detail::trim(line.substr(c + 1)));
        }
    return "unknown";
}

/// Synthetic labeled windows (level uniform in [0, 0.16]) with features.
int cmd_bench(const Globals& g, const std::string& cache, const std::string& model_path, long long windows) {
    if (windows < 1) throw UsageError("bench: --windows must be >= 1");
    const auto n = static_cast<std::size_t>(windows);
    auto cfg = resolve_config(g);
    std::unique_ptr<Encoder> enc;
    AssociativeMemory mem;
    features::FeatureSpec spec = make_feature_spec(cfg);
    std::vector<RawWindow> pool;
    std::string source;

    std::vector<dataset::LabeledSample> samples;
    const bool have_cache = !cache.empty() && fs::exists(cache);
    if (!model_path.empty()) {
        mem = load_memory(model_path);
        std::ifstream in(model_path + ".json");
        if (!in) throw UsageError("bench: missing model metadata '" + model_path + ".json'");
        json meta;
        in >> meta;
        cfg = config_from_meta(meta);
        enc = encoder_from_metadata(meta);
        spec = features::FeatureSpec(cfg.ingest.mfcc);
        spec.select_ids(meta.at("features").get<std::vector<std::string>>());
        if (enc->dim() != mem.dim()) throw InvalidDimension("bench: model and encoder dimensions differ");
    }
    if (have_cache) {
        samples = dataset::read_cache(cache, spec);
        source = "cache";
    } else {
        samples = synthetic::labeled_windows(std::max<std::size_t>(n, 200), cfg.seed, spec, cfg.ingest.threshold);
        source = "synthetic";
    }
    if (!enc) {
        PreparedSplit prep(samples, cfg);
        auto res = prep.run(cfg.train, true);
        enc = encoder_from_metadata(model_metadata(res, cfg, {}));
        mem = res.memory;
    }
    for (std::size_t i = 0; pool.size() < n; i = (i + 1) % samples.size()) pool.push_back(samples[i].window);

    if (cfg.quantize_classes) mem = sign_quantized(mem);
    const auto lat = measure_latency(spec, *enc, mem, pool);
    json rep{{"command", "bench"},
             {"windows", n},
             {"source", source},
             {"per_window_latency_s", to_json(lat)},
             {"encoder", std::string(to_string(enc->config().variant))},
             {"dim", enc->dim()},
             {"hardware", {{"cpu", cpu_model()}, {"hardware_threads", std::thread::hardware_concurrency()},
                           {"note", "single thread, features + encode + infer per window"}}},
             {"seed", cfg.seed}};
    fs::create_directories(g.out);
    std::ofstream(fs::path(g.out) / "bench.json") << rep.dump(2) << '\n';
    std::cout << "per-window latency over " << n << " windows (" << source << "): mean " << lat.mean_s << " s, p50 "
              << lat.p50_s << " s, p95 " << lat.p95_s << " s\n";
    return kExitOk;
}

int cmd_synth(const std::string& dir, std::size_t participants, double minutes, std::uint64_t seed) {
    if (dir.empty()) throw UsageError("synth: --data-out is required");
    synthetic::Options opt;
    opt.participants = participants;
    opt.minutes = minutes;
    opt.seed = seed;
    synthetic::write_dataset(dir, opt);
    std::cout << "wrote synthetic dataset to " << dir << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HDC intoxication classifier"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_file, "key = value config file");
    app.add_option("--seed", g.seed, "global seed");
    app.add_option("--split", g.split, "shuffled | ordered");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_flag("--no-cache", g.no_cache, "ignore an existing sample cache");
    app.add_option("--jobs", g.jobs, "worker threads");
    app.add_option("--set", g.overrides, "config override key=value (repeatable)");

    std::string data, cache, model, subset = "test", grid, values, data_out;
    long long windows = 100;
    std::size_t participants = 3;
    double minutes = 20.0;

    auto* ing = app.add_subcommand("ingest", "parse the dataset into a sample cache");
    ing->add_option("--data", data, "dataset directory");
    ing->add_option("--cache", cache, "cache path (default <out>/samples.bin)");

    auto* tr = app.add_subcommand("train", "train and evaluate on the configured split");
    tr->add_option("--cache", cache);
    tr->add_option("--data", data, "ingest this directory first");

    auto* ev = app.add_subcommand("eval", "evaluate a saved model");
    ev->add_option("--model", model)->required();
    ev->add_option("--cache", cache);
    ev->add_option("--data", data);
    ev->add_option("--subset", subset, "test | train | all")->capture_default_str();

    auto* sw = app.add_subcommand("sweep", "grid sweep over one parameter for both split modes");
    sw->add_option("--grid", grid, "ngram | lr | encoder | model")->required();
    auto* values_opt = sw->add_option("--values", values, "comma-separated grid values");
    sw->add_option("--cache", cache);
    sw->add_option("--data", data);

    auto* be = app.add_subcommand("bench", "per-window latency");
    be->add_option("--windows", windows)->capture_default_str();
    be->add_option("--cache", cache);
    be->add_option("--model", model);

    auto* sy = app.add_subcommand("synth", "write a synthetic dataset in the Bar Crawl layout");
    sy->add_option("--data-out", data_out)->required();
    sy->add_option("--participants", participants)->capture_default_str();
    sy->add_option("--minutes", minutes)->capture_default_str();

    for (auto* s : {ing, tr, ev, sw, be, sy}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*ing) return cmd_ingest(g, data, cache);
        if (*tr) return cmd_train(g, cache, data);
        if (*ev) return cmd_eval(g, model, cache, data, subset);
        if (*sw) return cmd_sweep(g, cache, data, grid, values, values_opt->count() > 0);
        if (*be) return cmd_bench(g, cache, model, windows);
        if (*sy) return cmd_synth(data_out, participants, minutes, g.seed.value_or(0));
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidDimension& e) {
        std::cerr << "dimension error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnsupportedEncoder& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "data error: malformed metadata: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
