#include "lord/mixup.hpp"

#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "lord/common.hpp"

namespace lord {

CentroidStats centroid_stats(const SampleSet& train_kc) {
    const std::size_t dim = feature_dim(train_kc);
    std::unordered_map<std::string, std::size_t> index;
    CentroidStats stats;
    std::vector<std::size_t> counts;
    for (const auto& s : train_kc) {
        if (s.is_unknown()) throw InvalidArgument("centroid_stats: input must contain known-class samples only");
        auto [it, fresh] = index.emplace(s.label, stats.classes.size());
        if (fresh) {
            stats.classes.push_back(s.label);
            stats.centroids.emplace_back(dim, 0.0);
            counts.push_back(0);
        }
        auto& c = stats.centroids[it->second];
        for (std::size_t k = 0; k < dim; ++k) c[k] += s.features[k];
        counts[it->second]++;
    }
    if (stats.classes.size() < 2) throw InvalidArgument("centroid_stats: need at least two known classes");
    for (std::size_t c = 0; c < stats.centroids.size(); ++c) {
        for (double& v : stats.centroids[c]) v /= static_cast<double>(counts[c]);
    }

    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < stats.centroids.size(); ++a) {
        for (std::size_t b = a + 1; b < stats.centroids.size(); ++b) {
            total += distance(stats.centroids[a], stats.centroids[b]);
            ++pairs;
        }
    }
    stats.mean_centroid_distance = total / static_cast<double>(pairs);
    return stats;
}

double sample_lambda(Rng& rng, const MixupConfig& cfg) {
    if (cfg.beta_a < 1.0 || cfg.beta_b < 1.0) throw InvalidArgument("sample_lambda: beta shapes must be >= 1");
    if (!(cfg.lambda_lo >= 0.0) || !(cfg.lambda_hi <= 1.0) || !(cfg.lambda_lo < cfg.lambda_hi))
        throw InvalidArgument("sample_lambda: need 0 <= lambda_lo < lambda_hi <= 1");
    for (;;) {
        const double v = rng.beta(cfg.beta_a, cfg.beta_b);
        if (v >= cfg.lambda_lo && v <= cfg.lambda_hi) return v;
    }
}

std::vector<double> mix_features(std::span<const double> xi, std::span<const double> xj, double lambda) {
    if (xi.size() != xj.size()) throw InvalidArgument("mix_features: dimension mismatch");
    std::vector<double> out(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) out[k] = lambda * xi[k] + (1.0 - lambda) * xj[k];
    return out;
}

MixupBatch generate_mixups(const SampleSet& train_kc, const CentroidStats& stats, const MixupConfig& cfg) {
    if (cfg.ratio < 0.0) throw InvalidArgument("generate_mixups: ratio must be non-negative");
    if (cfg.alpha < 0.0) throw InvalidArgument("generate_mixups: alpha must be non-negative");
    feature_dim(train_kc);
    for (const auto& s : train_kc) {
        if (s.is_unknown()) throw InvalidArgument("generate_mixups: input must contain known-class samples only");
    }
    if (distinct_labels(train_kc).size() < 2) throw InvalidArgument("generate_mixups: need at least two known classes");

    MixupBatch batch;
    batch.target = static_cast<std::uint64_t>(round_half_away(cfg.ratio * static_cast<double>(train_kc.size())));
    if (batch.target == 0) return batch;
    const std::uint64_t budget = cfg.max_attempts ? cfg.max_attempts : 100 * batch.target;
    const double threshold = cfg.alpha * stats.mean_centroid_distance;

    Rng rng(cfg.seed);
    const std::uint64_t n = train_kc.size();
    while (batch.accepted < batch.target && batch.attempted < budget) {
        ++batch.attempted;
        const std::size_t i = static_cast<std::size_t>(rng.index(n));
        std::size_t j = static_cast<std::size_t>(rng.index(n));
        std::uint64_t guard = 0;
        while (train_kc[j].label == train_kc[i].label) {
            j = static_cast<std::size_t>(rng.index(n));
            if (++guard > 1000000) throw NumericError("generate_mixups: could not draw a cross-class partner");
        }
        const double lambda = sample_lambda(rng, cfg);
        std::vector<double> mixed = mix_features(train_kc[i].features, train_kc[j].features, lambda);

        bool keep = true;
        if (cfg.alpha > 0.0) {
            for (const auto& centroid : stats.centroids) {
                if (!(distance(mixed, centroid) > threshold)) {
                    keep = false;
                    break;
                }
            }
        }
        if (!keep) continue;

        batch.samples.push_back({std::move(mixed), kUnknownLabel});
        batch.provenance.push_back({i, j, lambda});
        ++batch.accepted;
    }
    batch.shortfall = batch.accepted < batch.target;
    return batch;
}

void save_mixup_stats(const MixupBatch& batch, const std::string& path) {
    nlohmann::json j;
    j["target"] = batch.target;
    j["attempted"] = batch.attempted;
    j["accepted"] = batch.accepted;
    j["acceptance_rate"] = batch.attempted == 0 ? 0.0 : static_cast<double>(batch.accepted) / static_cast<double>(batch.attempted);
    j["shortfall"] = batch.shortfall;
    std::ofstream out(path);
    if (!out) throw Error("cannot write mixup stats: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path);
}

}  // namespace lord
