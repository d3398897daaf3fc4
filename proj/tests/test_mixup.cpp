#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "lord/common.hpp"
#include "lord/mixup.hpp"

using namespace lord;

namespace {

SampleSet grid_classes(int per_class) {
    // Four classes on the corners of a 10x10 square.
    SampleSet out;
    const double cx[] = {0.0, 10.0, 0.0, 10.0};
    const double cy[] = {0.0, 0.0, 10.0, 10.0};
    const std::string names[] = {"a", "b", "c", "d"};
    Rng rng(5);
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < per_class; ++i)
            out.push_back({{cx[c] + 0.4 * rng.normal(), cy[c] + 0.4 * rng.normal()}, names[c]});
    return out;
}

}  // namespace

TEST_CASE("centroids and their mean distance come out by hand") {
    SampleSet train;
    train.push_back({{0.0, 0.0}, "a"});
    train.push_back({{2.0, 0.0}, "a"});
    train.push_back({{3.0, 0.0}, "b"});
    train.push_back({{0.0, 4.0}, "c"});

    const CentroidStats stats = centroid_stats(train);
    REQUIRE(stats.classes == std::vector<std::string>{"a", "b", "c"});
    CHECK(stats.centroids[0] == std::vector<double>{1.0, 0.0});
    CHECK(stats.centroids[1] == std::vector<double>{3.0, 0.0});
    CHECK(stats.centroids[2] == std::vector<double>{0.0, 4.0});
    // Pairwise distances 2, sqrt(17), 5.
    CHECK(stats.mean_centroid_distance == doctest::Approx((2.0 + std::sqrt(17.0) + 5.0) / 3.0).epsilon(1e-12));

    SampleSet bad = train;
    bad.push_back({{1.0, 1.0}, "u"});
    CHECK_THROWS_AS(centroid_stats(bad), InvalidArgument);
    CHECK_THROWS_AS(centroid_stats(SampleSet{{{0.0, 0.0}, "a"}, {{1.0, 0.0}, "a"}}), InvalidArgument);
}

TEST_CASE("mixing coefficients stay in the window with symmetric mean") {
    Rng rng(404);
    MixupConfig cfg;
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double l = sample_lambda(rng, cfg);
        CHECK(l >= 0.4);
        CHECK(l <= 0.6);
        sum += l;
    }
    CHECK(sum / 10000.0 == doctest::Approx(0.5).epsilon(0.02));

    cfg.beta_a = 0.5;
    CHECK_THROWS_AS(sample_lambda(rng, cfg), InvalidArgument);
    cfg = {};
    cfg.lambda_lo = 0.7;
    cfg.lambda_hi = 0.6;
    CHECK_THROWS_AS(sample_lambda(rng, cfg), InvalidArgument);
}

TEST_CASE("interpolation is exact and dimension-checked") {
    const std::vector<double> a{1.0, -2.0, 0.5};
    const std::vector<double> b{3.0, 4.0, -0.5};
    const std::vector<double> m = mix_features(a, b, 0.25);
    CHECK(m == std::vector<double>{0.25 * 1.0 + 0.75 * 3.0, 0.25 * -2.0 + 0.75 * 4.0, 0.25 * 0.5 + 0.75 * -0.5});
    CHECK_THROWS_AS(mix_features(a, std::vector<double>{1.0}, 0.5), InvalidArgument);
}

TEST_CASE("generation hits the rounded target with exact provenance") {
    const SampleSet train = grid_classes(12);  // 48 samples
    const CentroidStats stats = centroid_stats(train);

    MixupConfig cfg;
    cfg.ratio = 0.25;  // 48 * 0.25 = 12
    cfg.seed = 9;
    const MixupBatch batch = generate_mixups(train, stats, cfg);
    CHECK(batch.target == 12);
    CHECK(batch.accepted == 12);
    CHECK(batch.attempted == 12);  // no filter: every attempt lands
    CHECK(!batch.shortfall);
    REQUIRE(batch.samples.size() == 12);
    REQUIRE(batch.provenance.size() == 12);

    for (std::size_t k = 0; k < batch.samples.size(); ++k) {
        const auto& p = batch.provenance[k];
        CHECK(batch.samples[k].label == kUnknownLabel);
        CHECK(train[p.i].label != train[p.j].label);  // always a cross-class pair
        CHECK(p.lambda >= 0.4);
        CHECK(p.lambda <= 0.6);
        // Reconstruction from the recorded pair and coefficient is bit-exact.
        CHECK(batch.samples[k].features == mix_features(train[p.i].features, train[p.j].features, p.lambda));
    }

    // Half-away rounding of the target count.
    cfg.ratio = 0.26;  // 12.48 -> 12
    CHECK(generate_mixups(train, stats, cfg).target == 12);
    cfg.ratio = 12.5 / 48.0;
    CHECK(generate_mixups(train, stats, cfg).target == 13);
    cfg.ratio = 0.0;
    const MixupBatch empty = generate_mixups(train, stats, cfg);
    CHECK(empty.target == 0);
    CHECK(empty.attempted == 0);
    CHECK(empty.samples.empty());
}

TEST_CASE("generation is deterministic in the seed") {
    const SampleSet train = grid_classes(10);
    const CentroidStats stats = centroid_stats(train);
    MixupConfig cfg;
    cfg.ratio = 0.5;
    cfg.alpha = 0.3;
    cfg.seed = 77;

    const MixupBatch a = generate_mixups(train, stats, cfg);
    const MixupBatch b = generate_mixups(train, stats, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].features == b.samples[k].features);
    CHECK(a.attempted == b.attempted);

    cfg.seed = 78;
    const MixupBatch c = generate_mixups(train, stats, cfg);
    bool same = a.samples.size() == c.samples.size();
    if (same)
        for (std::size_t k = 0; k < a.samples.size(); ++k)
            if (a.samples[k].features != c.samples[k].features) same = false;
    CHECK(!same);
}

TEST_CASE("the occupation filter clears every centroid and tightens monotonically") {
    const SampleSet train = grid_classes(10);  // 40 samples
    const CentroidStats stats = centroid_stats(train);

    MixupConfig cfg;
    cfg.ratio = 10.0;        // target 400, far beyond the budget:
    cfg.max_attempts = 300;  // every run exhausts the same candidate stream
    cfg.seed = 21;

    std::uint64_t prev = 301;
    std::vector<MixupBatch> batches;
    for (const double alpha : {0.0, 0.3, 0.45, 0.6}) {
        cfg.alpha = alpha;
        MixupBatch b = generate_mixups(train, stats, cfg);
        CHECK(b.attempted == 300);
        CHECK(b.accepted <= prev);
        prev = b.accepted;

        const double threshold = alpha * stats.mean_centroid_distance;
        for (const auto& s : b.samples)
            for (const auto& c : stats.centroids) CHECK(lord::distance(s.features, c) > threshold);
        batches.push_back(std::move(b));
    }
    CHECK(batches.front().accepted == 300);  // alpha 0 keeps everything
    CHECK(batches.back().accepted < 300);    // a strict filter must drop some

    // Same candidate stream: a stricter run's output is a subsequence of a
    // looser run's output.
    for (std::size_t k = 0; k + 1 < batches.size(); ++k) {
        const auto& loose = batches[k].samples;
        const auto& strict = batches[k + 1].samples;
        std::size_t pos = 0;
        for (const auto& s : strict) {
            while (pos < loose.size() && loose[pos].features != s.features) ++pos;
            REQUIRE(pos < loose.size());
            ++pos;
        }
    }
}

TEST_CASE("an impossible filter reports a shortfall") {
    const SampleSet train = grid_classes(8);
    const CentroidStats stats = centroid_stats(train);
    MixupConfig cfg;
    cfg.ratio = 0.5;
    cfg.alpha = 10.0;  // no point can clear ten mean distances from every centroid
    cfg.max_attempts = 500;
    const MixupBatch batch = generate_mixups(train, stats, cfg);
    CHECK(batch.accepted == 0);
    CHECK(batch.attempted == 500);
    CHECK(batch.shortfall);

    const std::string path = "tmp_mixup_stats.json";
    save_mixup_stats(batch, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    const nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j["target"] == 16);
    CHECK(j["attempted"] == 500);
    CHECK(j["accepted"] == 0);
    CHECK(j["acceptance_rate"] == 0.0);
    CHECK(j["shortfall"] == true);
    std::remove(path.c_str());
}

TEST_CASE("generation validates its inputs") {
    const SampleSet train = grid_classes(5);
    const CentroidStats stats = centroid_stats(train);
    MixupConfig cfg;
    cfg.ratio = -0.5;
    CHECK_THROWS_AS(generate_mixups(train, stats, cfg), InvalidArgument);
    cfg = {};
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(generate_mixups(train, stats, cfg), InvalidArgument);
    cfg = {};
    SampleSet tainted = train;
    tainted.push_back({{0.0, 0.0}, "u"});
    CHECK_THROWS_AS(generate_mixups(tainted, stats, cfg), InvalidArgument);
    SampleSet single;
    single.push_back({{0.0, 0.0}, "a"});
    single.push_back({{1.0, 0.0}, "a"});
    CHECK_THROWS_AS(generate_mixups(single, stats, cfg), InvalidArgument);
}
