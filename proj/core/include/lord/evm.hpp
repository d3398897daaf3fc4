#pragma once

#include "lord/model.hpp"
#include "lord/strategy.hpp"
#include "lord/weibull.hpp"

namespace lord {

struct EvmConfig {
    int tail_size = 75;              // tau: smallest rest-distances kept per anchor
    double margin_scale = 0.5;       // applied to each tail distance before the fit
    double cluster_eps = 1.0;        // cevm_reduce neighborhood radius
    int cluster_min_pts = 4;         // cevm_reduce core-point threshold
    double coverage_threshold = 0.0; // > 0 enables greedy set-cover anchor reduction
};

struct ExtremeVector {
    std::vector<double> anchor;
    WeibullParams weibull;
};

// Extreme value machine: every training sample of a positive class becomes
// an anchor carrying a Weibull over its margin-scaled distances to the rest
// classes. A class scores a query by its best anchor's inclusion value.
class EvmModel : public OpenSetModel {
public:
    const std::vector<std::string>& known_classes() const override { return known_classes_; }
    std::size_t dim() const override { return dim_; }
    ModelScore score(std::span<const double> x) const override;

    const std::vector<std::string>& positive_classes() const { return positive_classes_; }
    const std::vector<std::vector<ExtremeVector>>& anchors() const { return anchors_; }
    StrategyKind strategy() const { return kind_; }

    // Per-class inclusion of a query, aligned with positive_classes().
    std::vector<double> class_inclusions(std::span<const double> x) const;

private:
    friend EvmModel fit_evm(const StrategyView& view, const EvmConfig& cfg);
    friend class EvmIo;

    StrategyKind kind_ = StrategyKind::baseline;
    std::vector<std::string> known_classes_;
    std::vector<std::string> positive_classes_;
    std::vector<std::vector<ExtremeVector>> anchors_;  // aligned with positive_classes_
    std::size_t dim_ = 0;
};

// Under kvr the negative pool only ever supplies rest-class distances; under
// spl/mpl pseudo classes are fitted like any other positive class.
EvmModel fit_evm(const StrategyView& view, const EvmConfig& cfg);

// Density clustering; returns a cluster id per point, -1 for noise. The
// result is deterministic in the input order.
std::vector<int> dbscan(const std::vector<std::vector<double>>& points, double eps, int min_pts);

// Cluster-based model reduction: every known class collapses to its cluster
// centroids (noise points stay as singletons). Unknowns follow the strategy:
// spl centroids keep the shared pseudo-label, mpl centroids become fresh
// distinct pseudo-classes, kvr leaves the negative pool untouched.
StrategyView cevm_reduce(const StrategyView& view, const EvmConfig& cfg);

// Dense 2-D confidence raster over [x0,x1] x [y0,y1]; one CSV row per grid
// point and class (known classes plus the unknown channel).
void export_confidence_grid(const OpenSetModel& model, double x0, double x1, double y0, double y1, int resolution,
                            const std::string& path);

}  // namespace lord
