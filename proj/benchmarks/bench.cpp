// Micro-benchmarks for the numeric hot paths: tail fitting, the SMO solver,
// curve construction, nearest-neighbor scoring, and mixup generation.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "lord/dataset.hpp"
#include "lord/metrics.hpp"
#include "lord/mixup.hpp"
#include "lord/osnn.hpp"
#include "lord/rng.hpp"
#include "lord/strategy.hpp"
#include "lord/svm.hpp"
#include "lord/weibull.hpp"

namespace {

std::vector<double> weibull_draws(std::size_t n) {
    lord::Rng rng(1);
    std::vector<double> out(n);
    for (double& d : out) d = 2.0 * std::pow(-std::log(1.0 - rng.uniform()), 1.0 / 1.5);
    return out;
}

void bm_weibull_fit(benchmark::State& state) {
    const auto draws = weibull_draws(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(lord::weibull_fit_mle(draws));
}
BENCHMARK(bm_weibull_fit)->Arg(64)->Arg(512)->Arg(4096);

void bm_smo_train(benchmark::State& state) {
    lord::Rng rng(2);
    const int per_class = static_cast<int>(state.range(0));
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < per_class; ++i) {
        x.push_back({rng.normal(), rng.normal()});
        y.push_back(+1);
        x.push_back({4.0 + rng.normal(), 4.0 + rng.normal()});
        y.push_back(-1);
    }
    const lord::KernelSpec kernel{lord::KernelSpec::Type::rbf, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(lord::smo_train_binary(x, y, 10.0, kernel));
}
BENCHMARK(bm_smo_train)->Arg(25)->Arg(100)->Arg(400);

lord::ScoreTable synthetic_table(std::size_t rows) {
    lord::Rng rng(3);
    lord::ScoreTable table;
    for (std::size_t i = 0; i < rows; ++i) {
        lord::ScoreRow row;
        row.category = i % 3 == 0 ? lord::TestCategory::kc
                                  : (i % 3 == 1 ? lord::TestCategory::kuc : lord::TestCategory::uuc);
        row.true_label = "c" + std::to_string(i % 5);
        row.predicted = rng.uniform() < 0.7 ? row.true_label : lord::kUnknownLabel;
        row.known_max = rng.uniform();
        table.rows.push_back(std::move(row));
    }
    return table;
}

void bm_oscr_curve(benchmark::State& state) {
    const auto table = synthetic_table(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(lord::oscr_curve(table, lord::EvalMode::biased));
}
BENCHMARK(bm_oscr_curve)->Arg(256)->Arg(2048)->Arg(16384);

void bm_osnn_score(benchmark::State& state) {
    const lord::SampleSet train = lord::synth_blobs(8, static_cast<int>(state.range(0)), 16, 1.0, 4);
    const lord::OsnnModel model = lord::fit_osnn(lord::apply_strategy(train, lord::StrategyKind::baseline));
    const std::vector<double> query(16, 5.0);
    for (auto _ : state) benchmark::DoNotOptimize(model.score(query));
}
BENCHMARK(bm_osnn_score)->Arg(25)->Arg(100)->Arg(400);

void bm_mixup_generation(benchmark::State& state) {
    const lord::SampleSet kc = lord::synth_blobs(6, 50, 8, 1.0, 5);
    const lord::CentroidStats stats = lord::centroid_stats(kc);
    lord::MixupConfig cfg;
    cfg.ratio = 1.0;
    cfg.alpha = state.range(0) / 10.0;
    cfg.seed = 6;
    for (auto _ : state) benchmark::DoNotOptimize(lord::generate_mixups(kc, stats, cfg));
}
BENCHMARK(bm_mixup_generation)->Arg(0)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
