#include "lord/grid.hpp"

#include <algorithm>
#include <sstream>

#include "lord/log.hpp"
#include "lord/rng.hpp"

namespace lord {

std::vector<Params> lattice_points(const ParamGrid& grid) {
    for (const auto& [key, values] : grid)
        if (values.empty()) throw ConfigError("grid key '" + key + "' has no candidate values");
    std::vector<Params> points;
    points.emplace_back();
    for (const auto& [key, values] : grid) {
        std::vector<Params> next;
        next.reserve(points.size() * values.size());
        for (const auto& base : points)
            for (double v : values) {
                Params p = base;
                p[key] = v;
                next.push_back(std::move(p));
            }
        points = std::move(next);
    }
    return points;
}

namespace {

// Fold id per sample. Stratified mode deals each class's shuffled samples
// round-robin so every fold sees every class; the fallback deals the whole
// shuffled set the same way.
std::vector<int> assign_folds(const SampleSet& train, int folds, std::uint64_t seed, bool* stratified) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < train.size(); ++i) by_class[train[i].label].push_back(i);

    std::vector<std::string> sparse;
    for (const auto& [label, members] : by_class)
        if (members.size() < static_cast<std::size_t>(folds)) sparse.push_back(label);
    *stratified = sparse.empty();

    Rng rng(derive_seed(seed, "grid/folds"));
    std::vector<int> fold(train.size(), 0);
    if (*stratified) {
        for (auto& [label, members] : by_class) {
            (void)label;
            rng.shuffle(members);
            for (std::size_t k = 0; k < members.size(); ++k) fold[members[k]] = static_cast<int>(k % folds);
        }
    } else {
        std::ostringstream msg;
        msg << "grid_search: classes with fewer than " << folds << " samples (";
        for (std::size_t i = 0; i < sparse.size(); ++i) msg << (i ? ", " : "") << sparse[i];
        msg << "); using unstratified folds";
        log::warn(msg.str());
        std::vector<std::size_t> all(train.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        rng.shuffle(all);
        for (std::size_t k = 0; k < all.size(); ++k) fold[all[k]] = static_cast<int>(k % folds);
    }
    return fold;
}

}  // namespace

GridSearchResult grid_search(ModelFamily family, const ParamGrid& grid, const SampleSet& train, int folds,
                             std::uint64_t seed) {
    if (folds < 2) throw ConfigError("grid_search: folds must be at least 2");
    const auto points = lattice_points(grid);

    // Tuning never sees unknown-marked rows: the baseline view drops them.
    const StrategyView base = apply_strategy(train, StrategyKind::baseline);
    if (base.samples.empty()) throw ConfigError("grid_search: no known-class samples to validate on");

    GridSearchResult result;
    if (points.size() == 1) {
        result.best = points.front();
        result.best_accuracy = 0.0;
        result.searched = false;
        return result;
    }

    result.searched = true;
    const std::vector<int> fold = assign_folds(base.samples, folds, seed, &result.stratified);

    bool have_best = false;
    for (const auto& params : points) {
        GridPointScore score;
        score.params = params;
        double accuracy_sum = 0.0;
        int scored_folds = 0;
        for (int f = 0; f < folds; ++f) {
            SampleSet fit_set;
            std::vector<std::size_t> val;
            for (std::size_t i = 0; i < base.samples.size(); ++i) {
                if (fold[i] == f)
                    val.push_back(i);
                else
                    fit_set.push_back(base.samples[i]);
            }
            if (val.empty()) continue;
            ++scored_folds;
            try {
                const StrategyView fold_view = apply_strategy(fit_set, StrategyKind::baseline);
                const auto model = fit_model(family, fold_view, params, derive_seed(seed, "grid/fit"));
                std::size_t correct = 0;
                for (std::size_t i : val)
                    if (model->score(base.samples[i].features).predicted == base.samples[i].label) ++correct;
                accuracy_sum += static_cast<double>(correct) / static_cast<double>(val.size());
            } catch (const Error&) {
                ++score.error_folds;  // a fold this point cannot fit scores zero
            }
        }
        score.accuracy = scored_folds > 0 ? accuracy_sum / scored_folds : 0.0;
        if (!have_best || score.accuracy > result.best_accuracy) {
            have_best = true;
            result.best = params;
            result.best_accuracy = score.accuracy;
        }
        result.scores.push_back(std::move(score));
    }
    return result;
}

}  // namespace lord
