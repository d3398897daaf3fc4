#include "lord/strategy.hpp"

#include <algorithm>

namespace lord {

const char* to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::baseline: return "baseline";
        case StrategyKind::spl: return "spl";
        case StrategyKind::mpl: return "mpl";
        case StrategyKind::kvr: return "kvr";
    }
    return "?";
}

StrategyKind strategy_from_string(std::string_view name) {
    if (name == "baseline") return StrategyKind::baseline;
    if (name == "spl") return StrategyKind::spl;
    if (name == "mpl") return StrategyKind::mpl;
    if (name == "kvr") return StrategyKind::kvr;
    throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

namespace {

// Pseudo-labels must never collide with a user class id, so the prefix is
// extended until no input label starts with it.
std::string pseudo_prefix(const std::vector<std::string>& known) {
    std::string prefix = "pseudo:";
    for (;;) {
        const bool clash = std::any_of(known.begin(), known.end(), [&](const std::string& c) {
            return c.compare(0, prefix.size(), prefix) == 0;
        });
        if (!clash) return prefix;
        prefix.insert(prefix.begin(), '#');
    }
}

}  // namespace

StrategyView apply_strategy(const SampleSet& train, StrategyKind kind) {
    feature_dim(train);

    StrategyView view;
    view.known_classes = distinct_labels(train);
    if (view.known_classes.empty()) throw InvalidArgument("training collection has no known classes");

    const std::size_t n_unknown =
        static_cast<std::size_t>(std::count_if(train.begin(), train.end(), [](const Sample& s) { return s.is_unknown(); }));
    if (kind != StrategyKind::baseline && n_unknown == 0) {
        view = apply_strategy(train, StrategyKind::baseline);
        view.degraded_to_baseline = true;
        return view;
    }

    view.kind = kind;
    view.positive_classes = view.known_classes;
    switch (kind) {
        case StrategyKind::baseline: {
            for (const auto& s : train) {
                if (!s.is_unknown()) view.samples.push_back(s);
            }
            break;
        }
        case StrategyKind::spl: {
            const std::string shared = pseudo_prefix(view.known_classes) + "0";
            view.positive_classes.push_back(shared);
            view.pseudo_set_.insert(shared);
            for (const auto& s : train) {
                view.samples.push_back(s);
                if (s.is_unknown()) view.samples.back().label = shared;
            }
            break;
        }
        case StrategyKind::mpl: {
            const std::string prefix = pseudo_prefix(view.known_classes);
            std::size_t next = 0;
            for (const auto& s : train) {
                view.samples.push_back(s);
                if (s.is_unknown()) {
                    const std::string label = prefix + std::to_string(next++);
                    view.samples.back().label = label;
                    view.positive_classes.push_back(label);
                    view.pseudo_set_.insert(label);
                }
            }
            break;
        }
        case StrategyKind::kvr: {
            for (const auto& s : train) {
                if (s.is_unknown()) view.negative_pool.push_back(view.samples.size());
                view.samples.push_back(s);
            }
            break;
        }
    }
    return view;
}

std::string map_prediction(const StrategyView& view, const std::string& raw_label) {
    if (raw_label == kUnknownLabel) return kUnknownLabel;
    if (view.is_pseudo(raw_label)) return kUnknownLabel;
    if (std::find(view.known_classes.begin(), view.known_classes.end(), raw_label) != view.known_classes.end())
        return raw_label;
    throw InvalidArgument("label '" + raw_label + "' is outside the view's label universe");
}

}  // namespace lord
