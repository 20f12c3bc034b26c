#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "hdtac/pipeline/config.hpp"
#include "hdtac/pipeline/pipeline.hpp"
#include "hdtac/pipeline/synthetic.hpp"

using namespace hdtac;
namespace fs = std::filesystem;

namespace {

// One ingest shared by the pipeline tests.
const std::vector<dataset::LabeledSample>& synthetic_samples() {
    static const auto samples = [] {
        const auto dir = fs::temp_directory_path() / ("hdtac_pipeline_" + std::to_string(getpid()));
        fs::remove_all(dir);
        synthetic::Options o;
        o.participants = 2;
        o.minutes = 8;
        o.seed = 3;
        synthetic::write_dataset(dir.string(), o);
        auto r = dataset::ingest(dir.string());
        fs::remove_all(dir);
        return dataset::project_samples(std::move(r.samples), make_feature_spec(PipelineConfig{}));
    }();
    return samples;
}

PipelineConfig small_config(EncoderVariant v) {
    PipelineConfig c;
    c.apply_seed(5);
    c.encoder.variant = v;
    c.encoder.dim = 2000;
    c.train.epochs = 8;
    return c;
}

}  // namespace

TEST(Config, ParseFileAndOverrides) {
    std::istringstream in(
        "# comment\n"
        "\n"
        "encoder.variant = kv_rl\n"
        "encoder.dim=4000\n"
        "  model.kind = neural  \n"
        "model.margin = 0.2\n"
        "model.early_stop = off\n"
        "split.mode = ordered\n"
        "dataset.filter_tau_min = 60\n"
        "seed = 9\n");
    const auto c = parse_config(in);
    EXPECT_EQ(c.encoder.variant, EncoderVariant::KV_RL);
    EXPECT_EQ(c.encoder.dim, 4000U);
    EXPECT_EQ(c.train.model, ModelKind::Neural);
    EXPECT_EQ(*c.train.margin, 0.2);
    EXPECT_FALSE(c.train.early_stop);
    EXPECT_EQ(c.split.mode, dataset::SplitMode::Chronological);
    EXPECT_EQ(c.ingest.filter_tau_s, 3600.0);
    EXPECT_EQ(c.encoder.seed, 9U);
    EXPECT_EQ(c.split.seed, 9U);
}

TEST(Config, ExplicitEncoderSeedSurvivesGlobalSeed) {
    PipelineConfig c;
    c.set("encoder.seed", "42");
    c.set("seed", "7");
    EXPECT_EQ(c.encoder.seed, 42U);
    EXPECT_EQ(c.split.seed, 7U);
}

TEST(Config, Errors) {
    PipelineConfig c;
    EXPECT_THROW(c.set("encoder.colour", "red"), InvalidConfig);
    EXPECT_THROW(c.set("encoder.dim", "ten"), InvalidConfig);
    EXPECT_THROW(c.set("model.early_stop", "maybe"), InvalidConfig);
    EXPECT_THROW(c.set("encoder.variant", "fourier"), InvalidConfig);
    std::istringstream bad("encoder.dim 10\n");
    EXPECT_THROW(parse_config(bad), InvalidConfig);
    c.set("split.ratio", "1.5");
    EXPECT_THROW(c.validate(), InvalidConfig);
    EXPECT_THROW(load_config("/nonexistent/hdtac.cfg"), InvalidConfig);
    PipelineConfig d;
    d.set("encoder.dim", "0");
    EXPECT_THROW(d.validate(), InvalidDimension);
}

TEST(Config, JsonRoundTripThroughSet) {
    PipelineConfig a;
    a.set("encoder.variant", "ensemble_kv_sn");
    a.set("model.kind", "dist");
    a.set("model.lr", "0.5");
    a.set("encoder.ngram_n", "4");
    PipelineConfig b;
    const auto j = a.to_json();
    for (auto it = j.begin(); it != j.end(); ++it)
        b.set(it.key(), it->is_string() ? it->get<std::string>() : it->dump());
    EXPECT_EQ(a.to_json(), b.to_json());
}

TEST(Pipeline, PercentileRange) {
    std::vector<double> v;
    for (int i = 0; i <= 1000; ++i) v.push_back(i);
    const auto r = percentile_range(v, 0.5);
    EXPECT_EQ(r.lo, 5.0);
    EXPECT_EQ(r.hi, 995.0);
    std::vector<double> flat(10, 2.0);
    const auto f = percentile_range(flat, 0.5);
    EXPECT_LT(f.lo, 2.0);
    EXPECT_GT(f.hi, 2.0);
}

TEST(Pipeline, SyntheticEndToEnd) {
    const auto& s = synthetic_samples();
    ASSERT_GT(s.size(), 150U);
    for (auto v : {EncoderVariant::KV_RL, EncoderVariant::Density, EncoderVariant::EnsembleKV_RL}) {
        const auto res = run_experiment(s, small_config(v));
        EXPECT_EQ(res.n_train + res.n_test, s.size());
        EXPECT_GT(res.test.metrics.accuracy, 0.8) << to_string(v);
        EXPECT_EQ(res.test.predicted.size(), res.n_test);
    }
}

TEST(Pipeline, PreparedSplitRunsAreRepeatable) {
    const auto& s = synthetic_samples();
    auto cfg = small_config(EncoderVariant::SinusoidProj);
    cfg.train.model = ModelKind::Neural;
    cfg.train.regen_rate = 0.05;
    PreparedSplit prep(s, cfg);
    const auto a = prep.run(cfg.train);
    const auto b = prep.run(cfg.train);
    EXPECT_EQ(a.memory, b.memory);
    EXPECT_FALSE(a.regen_log.empty());
    const auto c = run_experiment(s, cfg);
    EXPECT_EQ(a.memory, c.memory);
    EXPECT_EQ(a.test.predicted, c.test.predicted);
}

TEST(Pipeline, MetadataReplaysRegeneration) {
    const auto& s = synthetic_samples();
    auto cfg = small_config(EncoderVariant::Density);
    cfg.train.model = ModelKind::Dist;
    cfg.train.regen_rate = 0.05;
    PreparedSplit prep(s, cfg);
    const auto res = prep.run(cfg.train);
    ASSERT_FALSE(res.regen_log.empty());
    const auto meta = nlohmann::json::parse(model_metadata(res, cfg, features::default_selection_ids()).dump());
    const auto enc = encoder_from_metadata(meta);
    const auto replayed = encode_samples(*enc, s, prep.test_indices(), 1);
    EXPECT_EQ(evaluate(res.memory, replayed).predicted, res.test.predicted);
    // without the events the encodings differ
    const Encoder fresh(encoder_from_json(meta.at("encoder")));
    EXPECT_NE(encode_samples(fresh, s, prep.test_indices(), 1).data, replayed.data);
}
