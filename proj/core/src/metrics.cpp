#include "lord/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "lord/common.hpp"

namespace lord {

const char* to_string(EvalMode mode) {
    return mode == EvalMode::biased ? "biased" : "unbiased";
}

EvalMode eval_mode_from_string(std::string_view name) {
    if (name == "biased") return EvalMode::biased;
    if (name == "unbiased") return EvalMode::unbiased;
    throw InvalidArgument("unknown evaluation mode '" + std::string(name) + "'");
}

ScoreTable build_score_table(const OpenSetModel& model, const std::vector<TestSample>& test) {
    std::unordered_set<std::string> known(model.known_classes().begin(), model.known_classes().end());
    ScoreTable table;
    table.rows.reserve(test.size());
    for (const auto& t : test) {
        if (t.category == TestCategory::kc && known.count(t.sample.label) == 0)
            throw InvalidArgument("build_score_table: test class '" + t.sample.label + "' is unknown to the model");
        const ModelScore s = model.score(t.sample.features);
        ScoreRow row;
        row.category = t.category;
        row.true_label = t.sample.label;
        row.predicted = s.predicted;
        row.known_max = known_max(s);
        row.unknown_confidence = s.unknown;
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

bool in_pool(const ScoreRow& row, EvalMode mode) {
    if (mode == EvalMode::biased) return row.category != TestCategory::kc;
    return row.category == TestCategory::uuc;
}

// Thresholds: every distinct confidence plus sentinels, descending.
std::vector<double> thresholds(const ScoreTable& table) {
    std::set<double> values;
    for (const auto& row : table.rows) values.insert(row.known_max);
    std::vector<double> out;
    out.push_back(std::numeric_limits<double>::infinity());
    for (auto it = values.rbegin(); it != values.rend(); ++it) out.push_back(*it);
    out.push_back(-std::numeric_limits<double>::infinity());
    return out;
}

// Count of sorted values strictly greater than delta.
std::size_t count_above(const std::vector<double>& sorted_asc, double delta) {
    return sorted_asc.size() -
           static_cast<std::size_t>(std::upper_bound(sorted_asc.begin(), sorted_asc.end(), delta) - sorted_asc.begin());
}

}  // namespace

std::vector<CurvePoint> oscr_curve(const ScoreTable& table, EvalMode mode) {
    std::size_t n_known = 0, n_pool = 0;
    std::vector<double> correct_scores, accepted_pool_scores;
    for (const auto& row : table.rows) {
        if (row.category == TestCategory::kc) {
            ++n_known;
            if (row.predicted == row.true_label) correct_scores.push_back(row.known_max);
        } else if (in_pool(row, mode)) {
            ++n_pool;
            if (row.predicted != kUnknownLabel) accepted_pool_scores.push_back(row.known_max);
        }
    }
    if (n_known == 0) throw InvalidArgument("oscr_curve: no known test rows");
    if (n_pool == 0) throw InvalidArgument("oscr_curve: no unknown test rows under this mode");

    std::sort(correct_scores.begin(), correct_scores.end());
    std::sort(accepted_pool_scores.begin(), accepted_pool_scores.end());

    std::vector<CurvePoint> curve;
    for (double delta : thresholds(table)) {
        CurvePoint p;
        p.delta = delta;
        p.ccr = static_cast<double>(count_above(correct_scores, delta)) / static_cast<double>(n_known);
        p.fpr = static_cast<double>(count_above(accepted_pool_scores, delta)) / static_cast<double>(n_pool);
        curve.push_back(p);
    }
    return curve;
}

RocResult roc_auc(const ScoreTable& table, EvalMode mode) {
    std::size_t n_known = 0, n_pool = 0;
    std::vector<double> known_scores, pool_scores;
    for (const auto& row : table.rows) {
        if (row.category == TestCategory::kc) {
            ++n_known;
            known_scores.push_back(row.known_max);
        } else if (in_pool(row, mode)) {
            ++n_pool;
            pool_scores.push_back(row.known_max);
        }
    }
    if (n_known == 0) throw InvalidArgument("roc_auc: no known test rows");
    if (n_pool == 0) throw InvalidArgument("roc_auc: no unknown test rows under this mode");

    std::sort(known_scores.begin(), known_scores.end());
    std::sort(pool_scores.begin(), pool_scores.end());

    RocResult out;
    for (double delta : thresholds(table)) {
        RocPoint p;
        p.delta = delta;
        p.tpr = static_cast<double>(count_above(known_scores, delta)) / static_cast<double>(n_known);
        p.fpr = static_cast<double>(count_above(pool_scores, delta)) / static_cast<double>(n_pool);
        out.curve.push_back(p);
    }
    for (std::size_t k = 1; k < out.curve.size(); ++k) {
        const auto& a = out.curve[k - 1];
        const auto& b = out.curve[k];
        out.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return out;
}

double ccr_at_fpr(const std::vector<CurvePoint>& curve, double target_fpr) {
    if (curve.empty()) throw InvalidArgument("ccr_at_fpr: empty curve");
    if (target_fpr < 0.0 || target_fpr > 1.0) throw InvalidArgument("ccr_at_fpr: target must be in [0, 1]");

    std::vector<CurvePoint> pts = curve;
    std::stable_sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.fpr < b.fpr; });

    // Exact hit: best CCR among points at that FPR.
    double best = -1.0;
    for (const auto& p : pts) {
        if (p.fpr == target_fpr) best = std::max(best, p.ccr);
    }
    if (best >= 0.0) return best;

    if (target_fpr < pts.front().fpr) return pts.front().ccr;  // left-extend below the smallest achieved rate
    if (target_fpr > pts.back().fpr) return pts.back().ccr;

    for (std::size_t k = 1; k < pts.size(); ++k) {
        if (pts[k - 1].fpr < target_fpr && target_fpr < pts[k].fpr) {
            const double w = (target_fpr - pts[k - 1].fpr) / (pts[k].fpr - pts[k - 1].fpr);
            return pts[k - 1].ccr + w * (pts[k].ccr - pts[k - 1].ccr);
        }
    }
    return pts.back().ccr;  // unreachable with a sorted curve
}

void export_oscr_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write curve: " + path);
    out << "delta,ccr,fpr\n";
    for (const auto& p : curve) out << fmt_double(p.delta) << ',' << fmt_double(p.ccr) << ',' << fmt_double(p.fpr) << '\n';
    if (!out) throw Error("write failed: " + path);
}

void export_roc_csv(const std::vector<RocPoint>& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write curve: " + path);
    out << "delta,tpr,fpr\n";
    for (const auto& p : curve) out << fmt_double(p.delta) << ',' << fmt_double(p.tpr) << ',' << fmt_double(p.fpr) << '\n';
    if (!out) throw Error("write failed: " + path);
}

void save_eval_summary(const EvalSummary& summary, const std::string& path) {
    nlohmann::json j;
    j["auc"] = summary.auc;
    nlohmann::json ccr = nlohmann::json::object();
    for (const auto& [target, value] : summary.ccr_at) ccr[fmt_double(target)] = value;
    j["ccr_at_fpr"] = ccr;
    j["mode"] = to_string(summary.mode);
    j["seed"] = summary.seed;
    j["config_digest"] = summary.config_digest;
    std::ofstream out(path);
    if (!out) throw Error("cannot write summary: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path);
}

}  // namespace lord
