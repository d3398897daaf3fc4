#pragma once

#include "lord/model.hpp"
#include "lord/strategy.hpp"

namespace lord {

// Raw nearest-neighbor verdict: the distance ratio d_i/d_j between the two
// closest training samples of distinct classes, and 1 - ratio as confidence.
struct OsnnScore {
    std::string predicted;   // already mapped to C_K or the unknown marker
    double ratio = 1.0;
    double confidence = 0.0;
};

// Open-set nearest neighbor with a distance-ratio reject option. Stores the
// training view verbatim; queries run an exhaustive scan, which is adequate
// at desk scale. Under kvr a query whose nearest sample sits in the negative
// pool is forced to ratio 1 and the unknown label; under spl/mpl the pseudo
// classes compete for prediction like any other class.
class OsnnModel : public OpenSetModel {
public:
    const std::vector<std::string>& known_classes() const override { return view_.known_classes; }
    std::size_t dim() const override { return dim_; }
    ModelScore score(std::span<const double> x) const override;

    OsnnScore score_ratio(std::span<const double> x) const;

    const StrategyView& view() const { return view_; }

private:
    friend OsnnModel fit_osnn(const StrategyView& view);

    StrategyView view_;
    std::vector<int> group_;  // effective class per stored sample; -1 = negative pool
    std::size_t dim_ = 0;
};

OsnnModel fit_osnn(const StrategyView& view);

}  // namespace lord
