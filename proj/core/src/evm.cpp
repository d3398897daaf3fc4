#include "lord/evm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <unordered_map>

#include "lord/common.hpp"
#include "lord/log.hpp"

namespace lord {

namespace {

constexpr double kTailFloor = 1e-12;
// All-equal tails have no finite Weibull MLE; approximate the point-mass
// limit with a sharp but finite shape.
constexpr double kDegenerateShape = 50.0;

void validate(const EvmConfig& cfg) {
    if (cfg.tail_size < 1) throw InvalidArgument("EvmConfig: tail_size must be >= 1");
    if (!(cfg.margin_scale > 0.0) || cfg.margin_scale > 1.0)
        throw InvalidArgument("EvmConfig: margin_scale must be in (0, 1]");
    if (!(cfg.cluster_eps > 0.0)) throw InvalidArgument("EvmConfig: cluster_eps must be positive");
    if (cfg.cluster_min_pts < 1) throw InvalidArgument("EvmConfig: cluster_min_pts must be >= 1");
    if (cfg.coverage_threshold < 0.0 || cfg.coverage_threshold >= 1.0)
        throw InvalidArgument("EvmConfig: coverage_threshold must be in [0, 1)");
}

WeibullParams fit_tail(std::vector<double>& tail, std::size_t& clamped) {
    for (double& v : tail) {
        if (v <= 0.0) {
            v = kTailFloor;
            ++clamped;
        }
    }
    const bool degenerate = tail.size() < 2 || std::all_of(tail.begin(), tail.end(), [&](double v) { return v == tail[0]; });
    if (degenerate) return {kDegenerateShape, std::max(tail[0], kTailFloor)};
    return weibull_fit_mle(tail);
}

// Greedy set cover: keep anchors until every member of the class is covered
// at the threshold. Each anchor covers itself (inclusion 1 at distance 0),
// so the loop always terminates with full coverage.
std::vector<ExtremeVector> reduce_anchors(const std::vector<ExtremeVector>& anchors,
                                          const std::vector<const Sample*>& members, double threshold) {
    const std::size_t n = members.size();
    std::vector<std::vector<bool>> covers(anchors.size(), std::vector<bool>(n, false));
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        for (std::size_t s = 0; s < n; ++s) {
            const double d = distance(anchors[a].anchor, members[s]->features);
            covers[a][s] = weibull_inclusion(d, anchors[a].weibull) >= threshold;
        }
    }
    std::vector<bool> covered(n, false);
    std::vector<bool> kept(anchors.size(), false);
    std::size_t remaining = n;
    while (remaining > 0) {
        std::size_t best = anchors.size();
        std::size_t best_gain = 0;
        for (std::size_t a = 0; a < anchors.size(); ++a) {
            if (kept[a]) continue;
            std::size_t gain = 0;
            for (std::size_t s = 0; s < n; ++s)
                if (!covered[s] && covers[a][s]) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = a;
            }
        }
        if (best == anchors.size()) break;  // nothing covers the remainder
        kept[best] = true;
        for (std::size_t s = 0; s < n; ++s) {
            if (!covered[s] && covers[best][s]) {
                covered[s] = true;
                --remaining;
            }
        }
    }
    std::vector<ExtremeVector> out;
    for (std::size_t a = 0; a < anchors.size(); ++a)
        if (kept[a]) out.push_back(anchors[a]);
    return out;
}

}  // namespace

EvmModel fit_evm(const StrategyView& view, const EvmConfig& cfg) {
    validate(cfg);
    if (view.samples.empty()) throw InvalidArgument("fit_evm: empty training view");

    EvmModel model;
    model.kind_ = view.kind;
    model.known_classes_ = view.known_classes;
    model.positive_classes_ = view.positive_classes;
    model.dim_ = feature_dim(view.samples);

    std::vector<bool> negative(view.samples.size(), false);
    for (std::size_t i : view.negative_pool) negative[i] = true;

    std::unordered_map<std::string, int> positive_index;
    for (std::size_t c = 0; c < view.positive_classes.size(); ++c)
        positive_index[view.positive_classes[c]] = static_cast<int>(c);

    std::vector<std::vector<std::size_t>> members(view.positive_classes.size());
    for (std::size_t i = 0; i < view.samples.size(); ++i) {
        if (negative[i]) continue;
        const auto it = positive_index.find(view.samples[i].label);
        if (it == positive_index.end())
            throw InvalidArgument("fit_evm: sample label '" + view.samples[i].label + "' is not a positive class");
        members[static_cast<std::size_t>(it->second)].push_back(i);
    }

    std::size_t clamped = 0;
    bool tail_clamped_warned = false;
    model.anchors_.resize(view.positive_classes.size());
    for (std::size_t c = 0; c < view.positive_classes.size(); ++c) {
        if (members[c].empty()) throw InvalidArgument("fit_evm: positive class '" + view.positive_classes[c] + "' has no samples");

        std::vector<std::size_t> rest;
        rest.reserve(view.samples.size() - members[c].size());
        for (std::size_t i = 0; i < view.samples.size(); ++i) {
            if (negative[i] || positive_index.at(view.samples[i].label) != static_cast<int>(c)) rest.push_back(i);
        }
        if (rest.empty())
            throw InvalidArgument("fit_evm: positive class '" + view.positive_classes[c] + "' has an empty rest pool");

        const std::size_t tau = std::min<std::size_t>(static_cast<std::size_t>(cfg.tail_size), rest.size());
        if (tau < static_cast<std::size_t>(cfg.tail_size) && !tail_clamped_warned) {
            log::warn("fit_evm: tail_size " + std::to_string(cfg.tail_size) + " clamped to rest-pool size " +
                      std::to_string(rest.size()));
            tail_clamped_warned = true;
        }

        model.anchors_[c].reserve(members[c].size());
        std::vector<double> dist(rest.size());
        for (std::size_t a : members[c]) {
            for (std::size_t r = 0; r < rest.size(); ++r)
                dist[r] = distance(view.samples[a].features, view.samples[rest[r]].features);
            std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(tau - 1), dist.end());
            std::vector<double> tail(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(tau));
            for (double& v : tail) v *= cfg.margin_scale;
            ExtremeVector ev;
            ev.anchor = view.samples[a].features;
            ev.weibull = fit_tail(tail, clamped);
            model.anchors_[c].push_back(std::move(ev));
        }
    }
    if (clamped > 0)
        log::warn("fit_evm: clamped " + std::to_string(clamped) + " non-positive tail distances to 1e-12");

    if (cfg.coverage_threshold > 0.0) {
        for (std::size_t c = 0; c < model.anchors_.size(); ++c) {
            std::vector<const Sample*> pts;
            pts.reserve(members[c].size());
            for (std::size_t i : members[c]) pts.push_back(&view.samples[i]);
            model.anchors_[c] = reduce_anchors(model.anchors_[c], pts, cfg.coverage_threshold);
        }
    }
    return model;
}

std::vector<double> EvmModel::class_inclusions(std::span<const double> x) const {
    if (x.size() != dim_) throw InvalidArgument("EvmModel: query dimension mismatch");
    std::vector<double> out(positive_classes_.size(), 0.0);
    for (std::size_t c = 0; c < anchors_.size(); ++c) {
        double best = 0.0;
        for (const auto& ev : anchors_[c]) {
            const double d = distance(x, ev.anchor);
            best = std::max(best, weibull_inclusion(d, ev.weibull));
        }
        out[c] = best;
    }
    return out;
}

ModelScore EvmModel::score(std::span<const double> x) const {
    const std::vector<double> inc = class_inclusions(x);
    ModelScore out;
    out.known.assign(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(known_classes_.size()));
    std::size_t arg = 0;
    for (std::size_t c = 1; c < inc.size(); ++c)
        if (inc[c] > inc[arg]) arg = c;
    for (std::size_t c = known_classes_.size(); c < inc.size(); ++c) out.unknown = std::max(out.unknown, inc[c]);
    out.predicted = arg < known_classes_.size() ? known_classes_[arg] : kUnknownLabel;
    return out;
}

std::vector<int> dbscan(const std::vector<std::vector<double>>& points, double eps, int min_pts) {
    if (!(eps > 0.0)) throw InvalidArgument("dbscan: eps must be positive");
    if (min_pts < 1) throw InvalidArgument("dbscan: min_pts must be >= 1");
    const std::size_t n = points.size();
    const double eps2 = eps * eps;

    // Neighborhoods include the point itself.
    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (squared_distance(points[i], points[j]) <= eps2) neighbors[i].push_back(j);
        }
    }

    std::vector<int> label(n, -1);
    std::vector<bool> visited(n, false);
    int next_cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (visited[i]) continue;
        if (neighbors[i].size() < static_cast<std::size_t>(min_pts)) continue;  // not a core point; may join later
        const int cluster = next_cluster++;
        std::deque<std::size_t> queue;
        queue.push_back(i);
        visited[i] = true;
        label[i] = cluster;
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            if (neighbors[p].size() < static_cast<std::size_t>(min_pts)) continue;  // border point: claimed, not expanded
            for (std::size_t q : neighbors[p]) {
                if (label[q] == -1) label[q] = cluster;
                if (!visited[q]) {
                    visited[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    return label;
}

namespace {

struct Reduced {
    std::vector<Sample> samples;  // centroids first, then noise singletons
};

Reduced reduce_group(const std::vector<const Sample*>& group, const std::string& label, const EvmConfig& cfg) {
    std::vector<std::vector<double>> pts;
    pts.reserve(group.size());
    for (const Sample* s : group) pts.push_back(s->features);
    const std::vector<int> cluster = dbscan(pts, cfg.cluster_eps, cfg.cluster_min_pts);

    int n_clusters = 0;
    for (int c : cluster) n_clusters = std::max(n_clusters, c + 1);

    Reduced out;
    const std::size_t dim = group.empty() ? 0 : group.front()->features.size();
    for (int c = 0; c < n_clusters; ++c) {
        std::vector<double> centroid(dim, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (cluster[i] != c) continue;
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += pts[i][k];
            ++count;
        }
        for (double& v : centroid) v /= static_cast<double>(count);
        out.samples.push_back({std::move(centroid), label});
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (cluster[i] == -1) out.samples.push_back({pts[i], label});
    }
    return out;
}

}  // namespace

StrategyView cevm_reduce(const StrategyView& view, const EvmConfig& cfg) {
    validate(cfg);
    feature_dim(view.samples);

    std::vector<bool> negative(view.samples.size(), false);
    for (std::size_t i : view.negative_pool) negative[i] = true;

    StrategyView out;
    out.kind = view.kind;
    out.known_classes = view.known_classes;
    out.positive_classes = view.known_classes;
    out.degraded_to_baseline = view.degraded_to_baseline;

    // Known classes reduce per class.
    for (const auto& cls : view.known_classes) {
        std::vector<const Sample*> group;
        for (std::size_t i = 0; i < view.samples.size(); ++i) {
            if (!negative[i] && view.samples[i].label == cls) group.push_back(&view.samples[i]);
        }
        Reduced red = reduce_group(group, cls, cfg);
        for (auto& s : red.samples) out.samples.push_back(std::move(s));
    }

    // Unknowns cluster as one unified set regardless of their pseudo-labels.
    std::vector<const Sample*> unknown_group;
    for (std::size_t i = 0; i < view.samples.size(); ++i) {
        if (negative[i] || view.is_pseudo(view.samples[i].label)) unknown_group.push_back(&view.samples[i]);
    }

    switch (view.kind) {
        case StrategyKind::baseline:
            break;
        case StrategyKind::spl: {
            if (!unknown_group.empty()) {
                const std::string shared = view.positive_classes.back();
                out.positive_classes.push_back(shared);
                out.pseudo_set_.insert(shared);
                Reduced red = reduce_group(unknown_group, shared, cfg);
                for (auto& s : red.samples) out.samples.push_back(std::move(s));
            }
            break;
        }
        case StrategyKind::mpl: {
            // Reduced centroids become independent pseudo-classes again.
            Reduced red = reduce_group(unknown_group, kUnknownLabel, cfg);
            std::size_t next = 0;
            std::string prefix = "pseudo:";
            const auto clashes = [&](const std::string& p) {
                return std::any_of(view.known_classes.begin(), view.known_classes.end(),
                                   [&](const std::string& c) { return c.compare(0, p.size(), p) == 0; });
            };
            while (clashes(prefix)) prefix.insert(prefix.begin(), '#');
            for (auto& s : red.samples) {
                const std::string label = prefix + std::to_string(next++);
                s.label = label;
                out.positive_classes.push_back(label);
                out.pseudo_set_.insert(label);
                out.samples.push_back(std::move(s));
            }
            break;
        }
        case StrategyKind::kvr: {
            // Only the known classes reduce; the negative pool passes through.
            for (std::size_t i = 0; i < view.samples.size(); ++i) {
                if (!negative[i]) continue;
                out.negative_pool.push_back(out.samples.size());
                out.samples.push_back(view.samples[i]);
            }
            break;
        }
    }
    return out;
}

void export_confidence_grid(const OpenSetModel& model, double x0, double x1, double y0, double y1, int resolution,
                            const std::string& path) {
    if (model.dim() != 2) throw InvalidArgument("export_confidence_grid: model must be two-dimensional");
    if (resolution < 2) throw InvalidArgument("export_confidence_grid: resolution must be >= 2");
    std::ofstream out(path);
    if (!out) throw Error("cannot write raster: " + path);
    out << "x,y,class,confidence\n";
    for (int iy = 0; iy < resolution; ++iy) {
        const double y = y0 + (y1 - y0) * iy / (resolution - 1);
        for (int ix = 0; ix < resolution; ++ix) {
            const double x = x0 + (x1 - x0) * ix / (resolution - 1);
            const double q[2] = {x, y};
            const ModelScore s = model.score(std::span<const double>(q, 2));
            for (std::size_t c = 0; c < model.known_classes().size(); ++c)
                out << fmt_double(x) << ',' << fmt_double(y) << ',' << model.known_classes()[c] << ','
                    << fmt_double(s.known[c]) << '\n';
            out << fmt_double(x) << ',' << fmt_double(y) << ",u," << fmt_double(s.unknown) << '\n';
        }
    }
    if (!out) throw Error("write failed: " + path);
}

}  // namespace lord
