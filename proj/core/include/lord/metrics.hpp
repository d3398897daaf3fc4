#pragma once

#include <cstdint>

#include "lord/model.hpp"

namespace lord {

// biased: false-positive pool is every unknown test row (known unknowns and
// unknown unknowns). unbiased: unknown unknowns only.
enum class EvalMode { biased, unbiased };

const char* to_string(EvalMode mode);
EvalMode eval_mode_from_string(std::string_view name);

struct ScoreRow {
    TestCategory category = TestCategory::kc;
    std::string true_label;          // class id for kc rows
    std::string predicted;           // known class or the unknown marker
    double known_max = 0.0;          // best known-class confidence
    double unknown_confidence = 0.0; // unknown-channel confidence
};

struct ScoreTable {
    std::vector<ScoreRow> rows;
};

// Scores every test sample once. Rows whose winner is the unknown channel
// keep the unknown confidence there and are rejected at every threshold.
ScoreTable build_score_table(const OpenSetModel& model, const std::vector<TestSample>& test);

struct CurvePoint {
    double delta = 0.0;
    double ccr = 0.0;
    double fpr = 0.0;
};

// Correct classification rate against false positive rate, swept over every
// distinct confidence plus sentinels at both infinities. Points arrive in
// descending-threshold order, so fpr ascends along the curve.
std::vector<CurvePoint> oscr_curve(const ScoreTable& table, EvalMode mode);

struct RocPoint {
    double delta = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> curve;
    double auc = 0.0;  // trapezoidal; tied scores earn half credit
};

// Known-vs-unknown detection using the best known-class confidence as the
// score for every row, including unknown-channel winners.
RocResult roc_auc(const ScoreTable& table, EvalMode mode);

// Linear interpolation between bracketing curve points; exact hits return
// the best CCR at that FPR, targets outside the achieved range clamp to the
// nearest endpoint.
double ccr_at_fpr(const std::vector<CurvePoint>& curve, double target_fpr);

void export_oscr_csv(const std::vector<CurvePoint>& curve, const std::string& path);
void export_roc_csv(const std::vector<RocPoint>& curve, const std::string& path);

struct EvalSummary {
    double auc = 0.0;
    std::vector<std::pair<double, double>> ccr_at;  // (target fpr, ccr)
    EvalMode mode = EvalMode::biased;
    std::uint64_t seed = 0;
    std::string config_digest;
};

void save_eval_summary(const EvalSummary& summary, const std::string& path);

}  // namespace lord
