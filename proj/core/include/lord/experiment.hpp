#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lord/dataset.hpp"
#include "lord/grid.hpp"
#include "lord/metrics.hpp"
#include "lord/mixup.hpp"

namespace lord {

struct SyntheticSpec {
    int classes = 8;
    int per_class = 60;
    int dim = 2;
    double spread = 1.0;
};

// Either a feature CSV on disk or a synthetic blob pool. The synthetic pool
// is generated once per run from a seed derived off the master seed, so all
// repeats draw their splits from the same pool.
struct DatasetSource {
    std::string csv;
    SyntheticSpec synthetic;

    bool from_file() const { return !csv.empty(); }
};

struct FamilyPlan {
    ModelFamily family = ModelFamily::osnn;
    ParamGrid grid;
};

// Mixup sweep: each (ratio, alpha) pair replaces the genuine unknown
// training rows with a generated batch. Empty ratios disable the sweep.
struct MixupPlan {
    std::vector<double> ratios;
    std::vector<double> alphas{0.0};
};

struct ExperimentConfig {
    DatasetSource dataset;
    SplitSpec split;  // the seed field is ignored; per-repeat seeds are derived
    std::vector<FamilyPlan> families;
    std::vector<StrategyKind> strategies;
    MixupPlan mixup;
    std::vector<EvalMode> modes{EvalMode::biased, EvalMode::unbiased};
    std::vector<double> ccr_targets{0.001, 0.01, 0.1};
    int repeats = 1;
    int folds = 5;
    std::uint64_t seed = 0;
};

// Strict JSON config: unknown keys anywhere are a ConfigError so typos fail
// loudly instead of silently running defaults.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// 16-hex-digit digest of the canonical config serialization (sorted keys,
// effective seed included); changes whenever any effective setting changes.
std::string config_digest(const ExperimentConfig& cfg);

// One unit of work: one family trained under one strategy on one training
// source for one repeat, evaluated under every configured mode. Cells are
// independent: each derives its seeds purely from the master seed and its
// own coordinates, so adding or removing other cells never shifts results.
struct CellResult {
    int repeat = 0;
    ModelFamily family = ModelFamily::osnn;
    StrategyKind strategy = StrategyKind::baseline;
    bool mixup_cell = false;
    double ratio = 0.0;  // mixup cells only
    double alpha = 0.0;  // mixup cells only

    std::string name;    // artifact file prefix, e.g. "r0_evm_kvr_genuine"
    std::string status;  // "ok", "skipped" (unsupported combo), or "error"
    std::string detail;  // reason when skipped or errored
    bool degraded_to_baseline = false;

    std::vector<EvalSummary> evals;       // aligned with the config's modes
    std::vector<std::string> oscr_files;  // relative to the run directory
    std::vector<std::string> roc_files;

    bool has_mixup_stats = false;
    MixupBatch mixup_stats;  // samples cleared; counters only

    double wall_seconds = 0.0;  // reported separately from the main report
};

struct GridOutcome {
    int repeat = 0;
    ModelFamily family = ModelFamily::osnn;
    bool ok = true;
    std::string error;
    GridSearchResult result;
};

struct RunReport {
    std::string digest;
    ExperimentConfig config;
    std::vector<GridOutcome> grids;
    std::vector<CellResult> cells;

    bool all_ok() const;  // no cell in the "error" state
};

// Runs every cell (repeats x families x strategies x training sources),
// writing split artifacts and per-mode curve CSVs under out_dir, then
// exports the report. A failing cell is recorded and the others proceed.
// jobs > 1 runs cells on a thread pool with results identical to the
// sequential order.
RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs = 1);

// Writes report.json (deterministic: byte-identical for identical config
// and seed) and timings.json (wall times, excluded from the main report so
// reruns can be compared byte for byte). Verifies every referenced curve
// file exists under out_dir.
void export_report(const RunReport& report, const std::string& out_dir);

}  // namespace lord
