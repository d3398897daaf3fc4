#pragma once

#include <cstdint>
#include <span>

#include "lord/dataset.hpp"
#include "lord/rng.hpp"

namespace lord {

struct CentroidStats {
    std::vector<std::string> classes;
    std::vector<std::vector<double>> centroids;      // aligned with classes
    double mean_centroid_distance = 0.0;             // mean over unordered centroid pairs
};

// Per-class centroids of the known-class training samples plus the mean
// pairwise centroid distance used by the occupation filter.
CentroidStats centroid_stats(const SampleSet& train_kc);

struct MixupConfig {
    double beta_a = 2.0;
    double beta_b = 2.0;
    double lambda_lo = 0.4;
    double lambda_hi = 0.6;
    double ratio = 1.0;             // target count = round(ratio * |train_kc|)
    double alpha = 0.0;             // occupation filter scale; 0 accepts everything
    std::uint64_t seed = 0;
    std::uint64_t max_attempts = 0; // 0 = 100 * target
};

// Beta(a, b) draw rejected until it falls inside [lambda_lo, lambda_hi].
double sample_lambda(Rng& rng, const MixupConfig& cfg);

// Shared by generation and any later provenance audit so reconstruction is
// bit-exact.
std::vector<double> mix_features(std::span<const double> xi, std::span<const double> xj, double lambda);

struct MixupProvenance {
    std::size_t i = 0;
    std::size_t j = 0;
    double lambda = 0.0;
};

struct MixupBatch {
    SampleSet samples;  // unknown-marked
    std::vector<MixupProvenance> provenance;
    std::uint64_t target = 0;
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
    bool shortfall = false;
};

// Draws cross-class pairs uniformly, mixes them with a truncated Beta
// coefficient and keeps a candidate only if it clears every class centroid
// by alpha times the mean centroid distance. Stops at the target count or
// after the attempt budget, flagging any shortfall.
MixupBatch generate_mixups(const SampleSet& train_kc, const CentroidStats& stats, const MixupConfig& cfg);

// {attempted, accepted, acceptance_rate, target, shortfall} as JSON.
void save_mixup_stats(const MixupBatch& batch, const std::string& path);

}  // namespace lord
