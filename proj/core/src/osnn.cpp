#include "lord/osnn.hpp"

#include <cmath>
#include <unordered_map>

#include "lord/common.hpp"

namespace lord {

OsnnModel fit_osnn(const StrategyView& view) {
    OsnnModel model;
    model.view_ = view;
    model.dim_ = feature_dim(view.samples);
    if (view.samples.empty()) throw InvalidArgument("fit_osnn: empty training view");

    std::unordered_map<std::string, int> positive_index;
    for (std::size_t i = 0; i < view.positive_classes.size(); ++i)
        positive_index[view.positive_classes[i]] = static_cast<int>(i);

    model.group_.resize(view.samples.size());
    std::vector<bool> negative(view.samples.size(), false);
    for (std::size_t i : view.negative_pool) negative[i] = true;

    int distinct_groups = 0;
    std::unordered_map<int, bool> seen;
    bool has_negative = false;
    for (std::size_t i = 0; i < view.samples.size(); ++i) {
        if (negative[i]) {
            model.group_[i] = -1;
            has_negative = true;
            continue;
        }
        const auto it = positive_index.find(view.samples[i].label);
        if (it == positive_index.end())
            throw InvalidArgument("fit_osnn: sample label '" + view.samples[i].label + "' is not a positive class");
        model.group_[i] = it->second;
        if (!seen[it->second]) {
            seen[it->second] = true;
            ++distinct_groups;
        }
    }
    if (distinct_groups + (has_negative ? 1 : 0) < 2)
        throw InvalidArgument("fit_osnn: need at least two distinct classes (or one class plus negatives)");
    return model;
}

OsnnScore OsnnModel::score_ratio(std::span<const double> x) const {
    if (x.size() != dim_) throw InvalidArgument("OsnnModel: query dimension mismatch");

    // Nearest stored sample; ties resolve to the lowest index.
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < view_.samples.size(); ++i) {
        const double d2 = squared_distance(x, view_.samples[i].features);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }

    OsnnScore out;
    const int g1 = group_[best];
    if (g1 < 0) {
        // kvr: nearest sample is a known unknown, the ratio saturates.
        out.predicted = kUnknownLabel;
        out.ratio = 1.0;
        out.confidence = 0.0;
        return out;
    }

    // Nearest sample of any other effective class.
    double second_d2 = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < view_.samples.size(); ++i) {
        if (group_[i] == g1) continue;
        const double d2 = squared_distance(x, view_.samples[i].features);
        if (d2 < second_d2) {
            second_d2 = d2;
            found = true;
        }
    }
    if (!found) throw NumericError("OsnnModel: no second class available for the distance ratio");

    const double di = std::sqrt(best_d2);
    const double dj = std::sqrt(second_d2);
    out.ratio = dj == 0.0 ? 1.0 : di / dj;  // coincident cross-class points: maximal ambiguity
    out.confidence = 1.0 - out.ratio;
    out.predicted = map_prediction(view_, view_.positive_classes[static_cast<std::size_t>(g1)]);
    return out;
}

ModelScore OsnnModel::score(std::span<const double> x) const {
    const OsnnScore raw = score_ratio(x);
    ModelScore out;
    out.known.assign(view_.known_classes.size(), 0.0);
    out.predicted = raw.predicted;
    if (raw.predicted == kUnknownLabel) {
        out.unknown = raw.confidence;
    } else {
        for (std::size_t k = 0; k < view_.known_classes.size(); ++k) {
            if (view_.known_classes[k] == raw.predicted) {
                out.known[k] = raw.confidence;
                break;
            }
        }
    }
    return out;
}

}  // namespace lord
