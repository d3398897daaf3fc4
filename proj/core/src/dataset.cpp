#include "lord/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lord/common.hpp"
#include "lord/rng.hpp"

namespace lord {

std::size_t feature_dim(const SampleSet& samples) {
    if (samples.empty()) return 0;
    const std::size_t dim = samples.front().features.size();
    for (const auto& s : samples) {
        if (s.features.size() != dim) throw InvalidArgument("sample set has inconsistent feature dimensions");
    }
    return dim;
}

std::vector<std::string> distinct_labels(const SampleSet& samples) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& s : samples) {
        if (s.is_unknown()) continue;
        if (seen.insert(s.label).second) out.push_back(s.label);
    }
    return out;
}

const char* to_string(TestCategory c) {
    switch (c) {
        case TestCategory::kc: return "kc";
        case TestCategory::kuc: return "kuc";
        case TestCategory::uuc: return "uuc";
    }
    return "?";
}

namespace {

double parse_feature(const std::string& token, std::size_t row) {
    double v = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError("row " + std::to_string(row) + ": bad feature value '" + token + "'");
    if (!std::isfinite(v))
        throw ParseError("row " + std::to_string(row) + ": feature value must be finite, got '" + token + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

SampleSet load_features(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open feature file: " + path);

    SampleSet out;
    std::string line;
    std::size_t row = 0;
    std::size_t dim = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (row == 1 && skip_header) continue;
        if (line.empty()) throw ParseError("row " + std::to_string(row) + ": empty row");

        const auto fields = split_csv_line(line);
        if (fields.size() < 2) throw ParseError("row " + std::to_string(row) + ": expected label and features");
        if (fields[0].empty()) throw ParseError("row " + std::to_string(row) + ": empty label");

        Sample s;
        s.label = fields[0];
        s.features.reserve(fields.size() - 1);
        for (std::size_t k = 1; k < fields.size(); ++k) s.features.push_back(parse_feature(fields[k], row));

        if (first_data_row) {
            dim = s.features.size();
            first_data_row = false;
        } else if (s.features.size() != dim) {
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(dim) + " features, got " +
                             std::to_string(s.features.size()));
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) throw ParseError("feature file has no data rows: " + path);
    return out;
}

void save_features(const SampleSet& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write feature file: " + path);
    for (const auto& s : samples) {
        out << s.label;
        for (double v : s.features) out << ',' << fmt_double(v);
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

SampleSet synth_blobs(int n_classes, int per_class, int dim, double spread, std::uint64_t seed) {
    if (n_classes < 1) throw InvalidArgument("synth_blobs: need at least one class");
    if (per_class < 1) throw InvalidArgument("synth_blobs: need at least one sample per class");
    if (dim < 1) throw InvalidArgument("synth_blobs: dimension must be positive");
    if (spread < 0.0) throw InvalidArgument("synth_blobs: spread must be non-negative");

    // Centers sit on an integer lattice scaled by 10 so any two are at least
    // 10 apart regardless of class count.
    int side = 1;
    while (std::pow(static_cast<double>(side), dim) < static_cast<double>(n_classes)) ++side;

    Rng rng(seed);
    SampleSet out;
    out.reserve(static_cast<std::size_t>(n_classes) * per_class);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<double> center(dim, 0.0);
        int rem = c;
        for (int k = 0; k < dim; ++k) {
            center[k] = 10.0 * (rem % side);
            rem /= side;
        }
        const std::string label = "c" + std::to_string(c);
        for (int i = 0; i < per_class; ++i) {
            Sample s;
            s.label = label;
            s.features.resize(dim);
            for (int k = 0; k < dim; ++k) s.features[k] = center[k] + spread * rng.normal();
            out.push_back(std::move(s));
        }
    }
    return out;
}

OpenSetDataset make_split(const SampleSet& pool, const SplitSpec& spec) {
    if (spec.n_kc < 1) throw ConfigError("split needs at least one known class");
    if (spec.n_kuc < 0 || spec.n_uuc < 0) throw ConfigError("class counts must be non-negative");
    if (spec.train_per_class.lo < 1 || spec.train_per_class.hi < spec.train_per_class.lo)
        throw ConfigError("train_per_class range is invalid");
    if (spec.kuc_to_kc_sample_ratio < 0.0) throw ConfigError("kuc_to_kc_sample_ratio must be non-negative");

    feature_dim(pool);
    for (const auto& s : pool) {
        if (s.is_unknown()) throw ConfigError("split pool must be fully labeled; found unknown-marked sample");
    }

    // Class ids in first-appearance order, then a seeded shuffle; role
    // prefixes are taken in KC, KUC, UUC order.
    std::vector<std::string> classes = distinct_labels(pool);
    const std::size_t wanted = static_cast<std::size_t>(spec.n_kc) + spec.n_kuc + spec.n_uuc;
    if (classes.size() < wanted)
        throw ConfigError("split needs " + std::to_string(wanted) + " distinct classes, pool has " +
                          std::to_string(classes.size()));

    Rng rng(spec.seed);
    rng.shuffle(classes);

    OpenSetDataset out;
    out.known_classes.assign(classes.begin(), classes.begin() + spec.n_kc);
    out.kuc_classes.assign(classes.begin() + spec.n_kc, classes.begin() + spec.n_kc + spec.n_kuc);
    out.uuc_classes.assign(classes.begin() + spec.n_kc + spec.n_kuc, classes.begin() + wanted);

    std::unordered_map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < pool.size(); ++i) by_class[pool[i].label].push_back(i);

    // Known classes: a seeded per-class shuffle, train prefix, remainder to test.
    std::vector<TestSample> test;
    for (const auto& cls : out.known_classes) {
        auto& idx = by_class[cls];
        rng.shuffle(idx);
        const int want = spec.train_per_class.lo == spec.train_per_class.hi
                             ? spec.train_per_class.lo
                             : spec.train_per_class.lo +
                                   static_cast<int>(rng.index(
                                       static_cast<std::uint64_t>(spec.train_per_class.hi - spec.train_per_class.lo + 1)));
        if (idx.size() < static_cast<std::size_t>(want))
            throw ConfigError("class '" + cls + "' has " + std::to_string(idx.size()) +
                              " samples, needs " + std::to_string(want) + " for training");
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k < static_cast<std::size_t>(want))
                out.train.push_back(pool[idx[k]]);
            else
                test.push_back({pool[idx[k]], TestCategory::kc});
        }
    }
    const std::size_t kc_train_total = out.train.size();

    // Known unknowns: pooled across KUC classes and subsampled uniformly so
    // the training count is ratio * |KC train| rounded half away from zero.
    const long long kuc_train_count = round_half_away(spec.kuc_to_kc_sample_ratio * static_cast<double>(kc_train_total));
    std::vector<std::size_t> kuc_pool;
    for (const auto& cls : out.kuc_classes) {
        for (std::size_t i : by_class[cls]) kuc_pool.push_back(i);
    }
    if (static_cast<long long>(kuc_pool.size()) < kuc_train_count)
        throw ConfigError("known-unknown classes supply " + std::to_string(kuc_pool.size()) +
                          " samples, ratio requires " + std::to_string(kuc_train_count));
    rng.shuffle(kuc_pool);
    for (std::size_t k = 0; k < kuc_pool.size(); ++k) {
        if (static_cast<long long>(k) < kuc_train_count) {
            Sample s = pool[kuc_pool[k]];
            s.label = kUnknownLabel;
            out.train.push_back(std::move(s));
        } else {
            test.push_back({pool[kuc_pool[k]], TestCategory::kuc});
        }
    }

    // Unknown unknowns never reach training.
    for (const auto& cls : out.uuc_classes) {
        for (std::size_t i : by_class[cls]) test.push_back({pool[i], TestCategory::uuc});
    }

    out.test = std::move(test);
    return out;
}

SplitManifest manifest_of(const OpenSetDataset& dataset, std::uint64_t seed) {
    SplitManifest m;
    m.seed = seed;
    m.kc = dataset.known_classes;
    m.kuc = dataset.kuc_classes;
    m.uuc = dataset.uuc_classes;
    return m;
}

void save_manifest(const SplitManifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path);
    out << "seed " << manifest.seed << '\n';
    for (const auto& c : manifest.kc) out << "kc " << c << '\n';
    for (const auto& c : manifest.kuc) out << "kuc " << c << '\n';
    for (const auto& c : manifest.uuc) out << "uuc " << c << '\n';
    if (!out) throw Error("write failed: " + path);
}

SplitManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path);
    SplitManifest m;
    std::string line;
    std::size_t row = 0;
    bool saw_seed = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t sep = line.find(' ');
        if (sep == std::string::npos || sep + 1 >= line.size())
            throw ParseError("manifest row " + std::to_string(row) + ": expected 'key value'");
        const std::string key = line.substr(0, sep);
        const std::string value = line.substr(sep + 1);
        if (key == "seed") {
            m.seed = std::stoull(value);
            saw_seed = true;
        } else if (key == "kc") {
            m.kc.push_back(value);
        } else if (key == "kuc") {
            m.kuc.push_back(value);
        } else if (key == "uuc") {
            m.uuc.push_back(value);
        } else {
            throw ParseError("manifest row " + std::to_string(row) + ": unknown key '" + key + "'");
        }
    }
    if (!saw_seed) throw ParseError("manifest is missing the seed: " + path);
    if (m.kc.empty()) throw ParseError("manifest lists no known classes: " + path);
    return m;
}

std::vector<TestSample> tag_test_samples(const SampleSet& samples, const SplitManifest& manifest) {
    std::unordered_map<std::string, TestCategory> role;
    for (const auto& c : manifest.kc) role[c] = TestCategory::kc;
    for (const auto& c : manifest.kuc) role[c] = TestCategory::kuc;
    for (const auto& c : manifest.uuc) role[c] = TestCategory::uuc;

    std::vector<TestSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.is_unknown()) throw ParseError("test rows must carry class labels; roles come from the manifest");
        const auto it = role.find(s.label);
        if (it == role.end()) throw ParseError("test label '" + s.label + "' is not in the manifest");
        out.push_back({s, it->second});
    }
    return out;
}

}  // namespace lord
