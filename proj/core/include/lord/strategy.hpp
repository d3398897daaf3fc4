#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lord/dataset.hpp"

namespace lord {

// How unknown-marked training samples participate in supervision:
//   baseline - dropped entirely
//   spl      - one shared pseudo-label for all unknowns
//   mpl      - a unique pseudo-label per unknown sample
//   kvr      - unknowns are never positives, only rest-class negatives
enum class StrategyKind { baseline, spl, mpl, kvr };

const char* to_string(StrategyKind kind);
StrategyKind strategy_from_string(std::string_view name);

// Training-time relabeling of a sample collection. Known-class samples pass
// through verbatim; what happens to the unknowns depends on the kind.
struct StrategyView {
    StrategyKind kind = StrategyKind::baseline;
    SampleSet samples;
    std::vector<std::string> known_classes;     // C_K in first-appearance order
    std::vector<std::string> positive_classes;  // known classes, then pseudo-labels
    std::vector<std::size_t> negative_pool;     // kvr: indices usable only as negatives
    bool degraded_to_baseline = false;          // set when no unknowns were present

    std::size_t n_known() const { return known_classes.size(); }
    std::size_t n_pseudo() const { return positive_classes.size() - known_classes.size(); }
    bool is_pseudo(const std::string& label) const { return pseudo_set_.count(label) > 0; }

    std::unordered_set<std::string> pseudo_set_;
};

// Builds the view for one strategy. A non-baseline kind with zero unknown
// samples degrades to baseline and flags it, so sweeps can drive the unknown
// count down to zero without special cases.
StrategyView apply_strategy(const SampleSet& train, StrategyKind kind);

// Maps a raw model output label back to C_K or the unknown marker.
std::string map_prediction(const StrategyView& view, const std::string& raw_label);

}  // namespace lord
