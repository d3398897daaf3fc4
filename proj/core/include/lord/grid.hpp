#pragma once

#include <cstdint>
#include <vector>

#include "lord/family.hpp"

namespace lord {

// Hyperparameter lattice: each key maps to its candidate values. Points are
// enumerated with keys in map (alphabetical) order, the last key varying
// fastest, so "lattice order" is stable and documented.
using ParamGrid = std::map<std::string, std::vector<double>>;

std::vector<Params> lattice_points(const ParamGrid& grid);

struct GridPointScore {
    Params params;
    double accuracy = 0.0;  // mean validation accuracy over the folds
    int error_folds = 0;    // folds whose fit failed; they score zero
};

struct GridSearchResult {
    Params best;
    double best_accuracy = 0.0;
    bool searched = false;   // false for a single-point lattice (no folds run)
    bool stratified = true;  // false when sparse classes forced the fallback
    std::vector<GridPointScore> scores;
};

// Scores every lattice point by k-fold closed-set validation accuracy on the
// known-class samples only (unknown-marked rows are dropped first), so the
// winner is picked without peeking at unknowns and can be reused across all
// training strategies of the family. Folds are stratified per class unless
// some class has fewer samples than folds, in which case plain shuffled
// folds are used and a warning is emitted. Ties keep the earlier lattice
// point; a failed fold fit counts as zero accuracy for that fold.
GridSearchResult grid_search(ModelFamily family, const ParamGrid& grid, const SampleSet& train, int folds,
                             std::uint64_t seed);

}  // namespace lord
