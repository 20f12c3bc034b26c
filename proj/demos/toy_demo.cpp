// Trains a RefineHD model on synthetic gait windows and reports test accuracy.

#include <iostream>

#include "hdtac/hdtac.hpp"

int main() {
    using namespace hdtac;
    PipelineConfig cfg;
    cfg.encoder.dim = 4000;
    cfg.apply_seed(7);

    const auto spec = make_feature_spec(cfg);
    const auto samples = synthetic::labeled_windows(300, 7, spec, cfg.ingest.threshold);
    const auto res = run_experiment(samples, cfg);
    std::cout << "test accuracy " << 100.0 * res.test.metrics.accuracy << "% over " << res.n_test
              << " windows, " << res.stats.epochs_run << " epochs\n";
}
