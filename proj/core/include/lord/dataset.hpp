#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lord/error.hpp"

namespace lord {

// Marker used for unknown samples wherever labels appear in files or memory.
inline const std::string kUnknownLabel = "u";

struct Sample {
    std::vector<double> features;
    std::string label;

    bool is_unknown() const { return label == kUnknownLabel; }
};

using SampleSet = std::vector<Sample>;

// Dimensionality shared by every sample; throws on ragged input, 0 when empty.
std::size_t feature_dim(const SampleSet& samples);

// Distinct non-unknown labels in first-appearance order.
std::vector<std::string> distinct_labels(const SampleSet& samples);

// Role of a test sample: known class, known unknown, or unknown unknown.
enum class TestCategory { kc, kuc, uuc };

const char* to_string(TestCategory c);

struct TestSample {
    Sample sample;
    TestCategory category = TestCategory::kc;
};

// Train collection (known classes plus unknown-marked negatives) and a test
// collection whose rows carry their evaluation role.
struct OpenSetDataset {
    SampleSet train;
    std::vector<TestSample> test;
    std::vector<std::string> known_classes;
    std::vector<std::string> kuc_classes;
    std::vector<std::string> uuc_classes;
};

// Per-class training count; lo == hi gives a fixed count, otherwise counts
// are drawn uniformly from [lo, hi] per class.
struct CountRange {
    int lo = 0;
    int hi = 0;
};

struct SplitSpec {
    int n_kc = 0;
    int n_kuc = 0;
    int n_uuc = 0;
    CountRange train_per_class;
    double kuc_to_kc_sample_ratio = 0.33;
    std::uint64_t seed = 0;
};

// CSV rows are "label,f0,...,f{D-1}"; the token "u" marks unknown samples.
SampleSet load_features(const std::string& path, bool skip_header = false);
void save_features(const SampleSet& samples, const std::string& path);

// Isotropic Gaussian blobs around lattice centers spaced 10 apart; classes
// are labeled c0..c{n-1} and only the noise depends on the seed.
SampleSet synth_blobs(int n_classes, int per_class, int dim, double spread, std::uint64_t seed);

// Partitions pool classes into KC/KUC/UUC roles and splits samples so that
// the unknown training count honors the configured sample ratio.
OpenSetDataset make_split(const SampleSet& pool, const SplitSpec& spec);

// Class-role assignment persisted next to split CSVs.
struct SplitManifest {
    std::uint64_t seed = 0;
    std::vector<std::string> kc;
    std::vector<std::string> kuc;
    std::vector<std::string> uuc;
};

SplitManifest manifest_of(const OpenSetDataset& dataset, std::uint64_t seed);
void save_manifest(const SplitManifest& manifest, const std::string& path);
SplitManifest load_manifest(const std::string& path);

// Reattaches evaluation roles to raw test rows using the manifest.
std::vector<TestSample> tag_test_samples(const SampleSet& samples, const SplitManifest& manifest);

}  // namespace lord
