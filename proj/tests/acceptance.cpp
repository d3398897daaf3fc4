// Acceptance gate: nine independently checkable guarantees, one line each.
// Every check recomputes its expectation from first principles -- brute-force
// enumeration, finite differences, closed forms, or lattice search -- so the
// library is never asked to validate itself. Exit status is the number of
// failed checks. Run with --recompute-golden to re-derive the frozen
// regression values printed by the reference pipeline in this file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lord/dataset.hpp"
#include "lord/evm.hpp"
#include "lord/experiment.hpp"
#include "lord/linear.hpp"
#include "lord/metrics.hpp"
#include "lord/mixup.hpp"
#include "lord/osnn.hpp"
#include "lord/rng.hpp"
#include "lord/strategy.hpp"
#include "lord/svm.hpp"
#include "lord/weibull.hpp"

using namespace lord;

namespace {

// ---------------------------------------------------------------------------
// Frozen regression values for the fixed-seed 2-D benchmark in check 6.
// Derived once by the reference pipeline below (--recompute-golden) and
// pinned; the check asserts the live pipeline stays within kGoldenTolerance.
constexpr double kGoldenEvmKvrGain = 0.0064;                  // biased AUC, kvr minus baseline
constexpr double kGoldenOsnnConstrainedAuc = 0.9954333333;    // mixups filtered at full strength
constexpr double kGoldenOsnnUnconstrainedAuc = 0.8965555556;  // unfiltered mixups, same seed
constexpr double kGoldenTolerance = 0.005;

std::string fail(const std::string& msg) { return msg; }

template <class T>
std::string num(T v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

// Half-credit pairwise comparison: the probability a known row outscores a
// pool row, ties counting one half.
double pairwise_auc(const std::vector<double>& known, const std::vector<double>& pool) {
    double credit = 0.0;
    for (double k : known)
        for (double p : pool) {
            if (k > p)
                credit += 1.0;
            else if (k == p)
                credit += 0.5;
        }
    return credit / (static_cast<double>(known.size()) * static_cast<double>(pool.size()));
}

ScoreTable random_table(Rng& rng, int min_kuc) {
    const int n_classes = 1 + static_cast<int>(rng.index(5));
    const int n_known = 1 + static_cast<int>(rng.index(50));
    const int n_kuc = min_kuc + static_cast<int>(rng.index(26 - static_cast<std::uint64_t>(min_kuc)));
    const int n_uuc = 1 + static_cast<int>(rng.index(25));
    const auto cls = [&](int c) { return "c" + std::to_string(c); };
    const auto quantized = [&]() { return static_cast<double>(rng.index(12)) / 10.0; };

    ScoreTable table;
    for (int i = 0; i < n_known; ++i) {
        ScoreRow row;
        row.category = TestCategory::kc;
        row.true_label = cls(static_cast<int>(rng.index(static_cast<std::uint64_t>(n_classes))));
        const double r = rng.uniform();
        row.predicted = r < 0.7 ? row.true_label
                                : (r < 0.85 ? cls(static_cast<int>(rng.index(static_cast<std::uint64_t>(n_classes))))
                                            : kUnknownLabel);
        row.known_max = quantized();
        table.rows.push_back(std::move(row));
    }
    for (int i = 0; i < n_kuc + n_uuc; ++i) {
        ScoreRow row;
        row.category = i < n_kuc ? TestCategory::kuc : TestCategory::uuc;
        row.true_label = "x";
        row.predicted = rng.uniform() < 0.3 ? kUnknownLabel
                                            : cls(static_cast<int>(rng.index(static_cast<std::uint64_t>(n_classes))));
        row.known_max = quantized();
        table.rows.push_back(std::move(row));
    }
    return table;
}

bool in_pool(const ScoreRow& row, EvalMode mode) {
    if (mode == EvalMode::biased) return row.category != TestCategory::kc;
    return row.category == TestCategory::uuc;
}

// ---------------------------------------------------------------------------
// 1. Curve points against a per-threshold double loop; AUC against the
//    pairwise comparison oracle.
std::string check_metric_oracles() {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const ScoreTable table = random_table(rng, 0);
        for (const EvalMode mode : {EvalMode::biased, EvalMode::unbiased}) {
            std::size_t n_known = 0, n_pool = 0;
            std::set<double> distinct;
            for (const auto& row : table.rows) {
                distinct.insert(row.known_max);
                if (row.category == TestCategory::kc)
                    ++n_known;
                else if (in_pool(row, mode))
                    ++n_pool;
            }

            const auto curve = oscr_curve(table, mode);
            if (curve.size() != distinct.size() + 2)
                return fail("trial " + std::to_string(trial) + ": curve has " + std::to_string(curve.size()) +
                            " points, expected " + std::to_string(distinct.size() + 2));
            for (const auto& point : curve) {
                std::size_t correct = 0, accepted = 0;
                for (const auto& row : table.rows) {
                    if (row.category == TestCategory::kc) {
                        if (row.predicted == row.true_label && row.known_max > point.delta) ++correct;
                    } else if (in_pool(row, mode)) {
                        if (row.predicted != kUnknownLabel && row.known_max > point.delta) ++accepted;
                    }
                }
                const double ccr = static_cast<double>(correct) / static_cast<double>(n_known);
                const double fpr = static_cast<double>(accepted) / static_cast<double>(n_pool);
                if (point.ccr != ccr || point.fpr != fpr)
                    return fail("trial " + std::to_string(trial) + ": point at delta " + num(point.delta) +
                                " disagrees with the recount");
            }

            std::vector<double> known_scores, pool_scores;
            for (const auto& row : table.rows) {
                if (row.category == TestCategory::kc)
                    known_scores.push_back(row.known_max);
                else if (in_pool(row, mode))
                    pool_scores.push_back(row.known_max);
            }
            const double oracle = pairwise_auc(known_scores, pool_scores);
            const double auc = roc_auc(table, mode).auc;
            if (std::fabs(auc - oracle) > 1e-12)
                return fail("trial " + std::to_string(trial) + ": auc " + num(auc) + " vs pairwise " + num(oracle));
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// 2. Maximum-likelihood recovery on seeded draws, and no lattice point may
//    beat the returned likelihood.
std::string check_weibull_fit() {
    constexpr double kShape = 1.5, kScale = 2.0;
    Rng rng(202);
    std::vector<double> draws(2000);
    for (double& d : draws) d = kScale * std::pow(-std::log(1.0 - rng.uniform()), 1.0 / kShape);

    const WeibullParams fit = weibull_fit_mle(draws);
    if (std::fabs(fit.shape - kShape) / kShape > 0.07)
        return fail("shape " + num(fit.shape) + " is off by more than 7%");
    if (std::fabs(fit.scale - kScale) / kScale > 0.07)
        return fail("scale " + num(fit.scale) + " is off by more than 7%");

    double sum_log = 0.0;
    for (double d : draws) sum_log += std::log(d);
    const double n = static_cast<double>(draws.size());
    const double ll_fit = weibull_log_likelihood(draws, fit);
    // ll(k, s) = n ln k - n k ln s + (k - 1) sum(ln x) - sum(x^k) / s^k
    for (int a = 0; a < 200; ++a) {
        const double shape = 0.75 + 1.5 * a / 199.0;
        double sum_pow = 0.0;
        for (double d : draws) sum_pow += std::pow(d, shape);
        for (int b = 0; b < 200; ++b) {
            const double scale = 1.0 + 2.0 * b / 199.0;
            const double ll = n * std::log(shape) - n * shape * std::log(scale) + (shape - 1.0) * sum_log -
                              sum_pow / std::pow(scale, shape);
            if (ll > ll_fit + 1e-6 * std::fabs(ll_fit))
                return fail("lattice point (" + num(shape) + ", " + num(scale) + ") beats the fit by " +
                            num(ll - ll_fit));
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// 3. Analytic gradients against central differences; the uniform softmax is
//    the exact optimum for an unknown target.
std::string check_entropic_gradients() {
    Rng rng(303);
    constexpr double kStep = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(7));
        std::vector<double> logits(static_cast<std::size_t>(n));
        for (double& v : logits) v = 2.0 * rng.normal();
        const int target = static_cast<int>(rng.index(static_cast<std::uint64_t>(n) + 1)) - 1;

        const EntropicResult res = entropic_objective(logits, target);
        for (int k = 0; k < n; ++k) {
            std::vector<double> hi = logits, lo = logits;
            hi[static_cast<std::size_t>(k)] += kStep;
            lo[static_cast<std::size_t>(k)] -= kStep;
            const double diff =
                (entropic_objective(hi, target).loss - entropic_objective(lo, target).loss) / (2.0 * kStep);
            const double analytic = res.grad[static_cast<std::size_t>(k)];
            const double rel = std::fabs(analytic - diff) / std::max(1.0, std::fabs(analytic));
            if (rel > 1e-4)
                return fail("trial " + std::to_string(trial) + " component " + std::to_string(k) +
                            ": analytic " + num(analytic) + " vs numeric " + num(diff));
        }
    }
    for (int n = 2; n <= 8; ++n) {
        const std::vector<double> logits(static_cast<std::size_t>(n), 0.0);
        const double loss = entropic_objective(logits, -1).loss;
        if (std::fabs(loss - std::log(static_cast<double>(n))) > 1e-12)
            return fail("uniform loss for " + std::to_string(n) + " outputs is " + num(loss));
    }
    return {};
}

// ---------------------------------------------------------------------------
// 4. Class accounting per strategy, and known-class rows pass through every
//    view bit-identically.
std::string check_strategy_bookkeeping() {
    Rng rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n_classes = 1 + rng.index(5);
        const std::size_t n_unknown = 1 + rng.index(12);
        SampleSet train;
        for (std::size_t c = 0; c < n_classes; ++c)
            for (std::size_t i = 0, n = 1 + rng.index(8); i < n; ++i)
                train.push_back({{rng.normal(), rng.normal()}, "k" + std::to_string(c)});
        for (std::size_t i = 0; i < n_unknown; ++i) train.push_back({{rng.normal(), rng.normal()}, kUnknownLabel});
        rng.shuffle(train);

        SampleSet kc_rows;
        for (const auto& s : train)
            if (!s.is_unknown()) kc_rows.push_back(s);

        const StrategyView base = apply_strategy(train, StrategyKind::baseline);
        const StrategyView spl = apply_strategy(train, StrategyKind::spl);
        const StrategyView mpl = apply_strategy(train, StrategyKind::mpl);
        const StrategyView kvr = apply_strategy(train, StrategyKind::kvr);

        const std::size_t k = base.known_classes.size();
        if (base.positive_classes.size() != k) return fail("baseline changed the class count");
        if (spl.positive_classes.size() != k + 1) return fail("spl must add exactly one positive class");
        if (mpl.positive_classes.size() != k + n_unknown)
            return fail("mpl must add one positive class per unknown sample");
        if (kvr.positive_classes.size() != k || kvr.negative_pool.size() != n_unknown)
            return fail("kvr must add no classes and pool every unknown");

        for (const StrategyView* view : {&base, &spl, &mpl, &kvr}) {
            SampleSet seen;
            for (std::size_t i = 0; i < view->samples.size(); ++i) {
                const auto& s = view->samples[i];
                const bool negative = std::find(view->negative_pool.begin(), view->negative_pool.end(), i) !=
                                      view->negative_pool.end();
                if (!negative && !view->is_pseudo(s.label) && !s.is_unknown()) seen.push_back(s);
            }
            if (seen.size() != kc_rows.size()) return fail("a view lost or invented known-class rows");
            for (std::size_t i = 0; i < seen.size(); ++i)
                if (seen[i].label != kc_rows[i].label || seen[i].features != kc_rows[i].features)
                    return fail("known-class rows are not bit-identical across views");
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// 5. Interpolation coefficients stay inside their window with the right
//    mean; stricter filters never accept more; provenance reconstructs
//    every sample exactly.
std::string check_mixup_properties() {
    MixupConfig cfg;
    Rng rng(505);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double lambda = sample_lambda(rng, cfg);
        if (lambda < cfg.lambda_lo || lambda > cfg.lambda_hi)
            return fail("lambda " + num(lambda) + " escaped the window");
        sum += lambda;
    }
    const double mean = sum / 10000.0;
    if (std::fabs(mean - 0.5) > 0.01) return fail("lambda mean " + num(mean) + " is off by more than 0.01");

    const SampleSet kc = synth_blobs(4, 30, 2, 1.0, 55);
    const CentroidStats stats = centroid_stats(kc);
    std::uint64_t previous = std::numeric_limits<std::uint64_t>::max();
    for (const double alpha : {0.0, 0.6, 0.8, 1.0}) {
        MixupConfig sweep;
        sweep.ratio = 2.0;
        sweep.alpha = alpha;
        sweep.seed = 66;
        const MixupBatch batch = generate_mixups(kc, stats, sweep);
        if (batch.accepted > previous)
            return fail("alpha " + num(alpha) + " accepted " + std::to_string(batch.accepted) +
                        " > the looser filter's " + std::to_string(previous));
        previous = batch.accepted;

        if (batch.samples.size() != batch.provenance.size()) return fail("provenance rows out of step");
        for (std::size_t k = 0; k < batch.samples.size(); ++k) {
            const MixupProvenance& p = batch.provenance[k];
            if (kc[p.i].label == kc[p.j].label) return fail("a mixup pair shares one class");
            if (batch.samples[k].features != mix_features(kc[p.i].features, kc[p.j].features, p.lambda))
                return fail("sample " + std::to_string(k) + " does not reconstruct from its provenance");
            if (!batch.samples[k].is_unknown()) return fail("a mixup sample is not unknown-marked");
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// 6. Fixed-seed 2-D benchmark: three Gaussian known classes, a surrounding
//    ring of training unknowns, a disjoint test-only cluster. The rest-pool
//    strategy must beat its baseline by the frozen margin, and filtered
//    mixups must not lose to unfiltered ones.
struct RegressionValues {
    double evm_gain = 0.0;
    double osnn_constrained = 0.0;
    double osnn_unconstrained = 0.0;
};

RegressionValues run_regression_benchmark() {
    Rng rng(606);
    const double centers[3][2] = {{0.0, 0.0}, {6.0, 0.0}, {3.0, 5.0}};
    SampleSet train;
    std::vector<TestSample> test;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 200; ++i) {
            Sample s{{centers[c][0] + 0.8 * rng.normal(), centers[c][1] + 0.8 * rng.normal()},
                     "c" + std::to_string(c)};
            if (i % 2 == 0)
                train.push_back(std::move(s));
            else
                test.push_back({std::move(s), TestCategory::kc});
        }
    for (int i = 0; i < 200; ++i) {  // ring hugging the known region
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * rng.uniform();
        const double radius = 7.0 + 0.5 * rng.normal();
        Sample s{{3.0 + radius * std::cos(angle), 1.8 + radius * std::sin(angle)}, kUnknownLabel};
        if (i % 2 == 0)
            train.push_back(std::move(s));
        else
            test.push_back({std::move(s), TestCategory::kuc});
    }
    for (int i = 0; i < 200; ++i)  // disjoint cluster, test only
        test.push_back({{{25.0 + rng.normal(), 25.0 + rng.normal()}, "far"}, TestCategory::uuc});

    const auto biased_auc = [&](const OpenSetModel& model) {
        const ScoreTable table = build_score_table(model, test);
        std::vector<double> known_scores, pool_scores;
        for (const auto& row : table.rows) {
            if (row.category == TestCategory::kc)
                known_scores.push_back(row.known_max);
            else
                pool_scores.push_back(row.known_max);
        }
        return pairwise_auc(known_scores, pool_scores);  // reference AUC, not the library's
    };

    EvmConfig evm_cfg;
    evm_cfg.tail_size = 25;
    const EvmModel evm_base = fit_evm(apply_strategy(train, StrategyKind::baseline), evm_cfg);
    const EvmModel evm_kvr = fit_evm(apply_strategy(train, StrategyKind::kvr), evm_cfg);

    SampleSet kc_train;
    for (const auto& s : train)
        if (!s.is_unknown()) kc_train.push_back(s);
    const CentroidStats stats = centroid_stats(kc_train);
    const auto osnn_with_mixups = [&](double alpha) {
        MixupConfig cfg;
        cfg.ratio = 1.0;
        cfg.alpha = alpha;
        cfg.seed = 707;
        const MixupBatch batch = generate_mixups(kc_train, stats, cfg);
        SampleSet mixed = kc_train;
        mixed.insert(mixed.end(), batch.samples.begin(), batch.samples.end());
        return fit_osnn(apply_strategy(mixed, StrategyKind::spl));
    };

    RegressionValues values;
    values.evm_gain = biased_auc(evm_kvr) - biased_auc(evm_base);
    values.osnn_constrained = biased_auc(osnn_with_mixups(1.0));
    values.osnn_unconstrained = biased_auc(osnn_with_mixups(0.0));
    return values;
}

std::string check_regression_benchmark() {
    const RegressionValues v = run_regression_benchmark();
    if (!(v.evm_gain > 0.0)) return fail("rest-pool training gained " + num(v.evm_gain) + ", expected > 0");
    if (std::fabs(v.evm_gain - kGoldenEvmKvrGain) > kGoldenTolerance)
        return fail("gain " + num(v.evm_gain) + " drifted from the frozen " + num(kGoldenEvmKvrGain));
    if (v.osnn_constrained + 1e-9 < v.osnn_unconstrained)
        return fail("filtered mixups scored " + num(v.osnn_constrained) + " below unfiltered " +
                    num(v.osnn_unconstrained));
    if (std::fabs(v.osnn_constrained - kGoldenOsnnConstrainedAuc) > kGoldenTolerance)
        return fail("constrained auc " + num(v.osnn_constrained) + " drifted from the frozen " +
                    num(kGoldenOsnnConstrainedAuc));
    if (std::fabs(v.osnn_unconstrained - kGoldenOsnnUnconstrainedAuc) > kGoldenTolerance)
        return fail("unconstrained auc " + num(v.osnn_unconstrained) + " drifted from the frozen " +
                    num(kGoldenOsnnUnconstrainedAuc));
    return {};
}

// ---------------------------------------------------------------------------
// 7. The solver must reach the optimum: perfect separation on a separable
//    set with first-order conditions met, and a dual objective matching a
//    primal lattice search on a small dense instance.
std::string check_smo_solver() {
    Rng rng(777);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        x.push_back({0.8 * rng.normal(), 0.8 * rng.normal()});
        y.push_back(+1);
        x.push_back({6.0 + 0.8 * rng.normal(), 6.0 + 0.8 * rng.normal()});
        y.push_back(-1);
    }
    KernelSpec linear{KernelSpec::Type::linear, 1.0};
    const BinarySvm sep = smo_train_binary(x, y, 10.0, linear);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (sep.decision(x[i]) * y[i] <= 0.0) return fail("separable point " + std::to_string(i) + " misclassified");
    if (sep.info.violation > 1e-3) return fail("first-order violation " + num(sep.info.violation));
    double coef_sum = 0.0;
    for (double c : sep.coef) coef_sum += c;
    if (std::fabs(coef_sum) > 1e-9) return fail("equality constraint residual " + num(coef_sum));

    // Dense 12-point instance; compare the dual value to a primal search
    // over (w, b), which bounds it from above at the optimum.
    const std::vector<std::vector<double>> px = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0},
                                                 {2.0, 0.0}, {0.5, 0.5}, {1.5, 1.5}, {2.0, 2.0},
                                                 {3.0, 2.0}, {2.0, 3.0}, {1.0, 2.0}, {2.5, 1.5}};
    const std::vector<int> py = {+1, +1, +1, +1, +1, +1, -1, -1, -1, -1, -1, -1};
    const BinarySvm dense = smo_train_binary(px, py, 1.0, linear);
    if (dense.info.violation > 1e-3) return fail("dense instance violation " + num(dense.info.violation));

    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i = 0; i < dense.support_vectors.size(); ++i) {
        w0 += dense.coef[i] * dense.support_vectors[i][0];
        w1 += dense.coef[i] * dense.support_vectors[i][1];
    }
    const auto primal = [&](double a, double b, double bias) {
        double value = 0.5 * (a * a + b * b);
        for (std::size_t i = 0; i < px.size(); ++i)
            value += std::max(0.0, 1.0 - py[i] * (a * px[i][0] + b * px[i][1] + bias));
        return value;
    };
    double best = primal(w0, w1, dense.bias);
    for (int a = -60; a <= 60; ++a)
        for (int b = -60; b <= 60; ++b)
            for (int c = -60; c <= 60; ++c)
                best = std::min(best, primal(w0 + 0.005 * a, w1 + 0.005 * b, dense.bias + 0.005 * c));
    if (best < dense.info.objective - 1e-9)
        return fail("a primal point undercuts the dual value, gap " + num(dense.info.objective - best));
    if (std::fabs(dense.info.objective - best) > 1e-3)
        return fail("dual " + num(dense.info.objective) + " vs lattice primal " + num(best));

    SampleSet tiny = {{{0.0, 0.0}, "a"}, {{0.1, 0.0}, "a"}, {{0.0, 0.1}, "a"},
                      {{5.0, 5.0}, "b"}, {{5.1, 5.0}, "b"}};
    try {
        fit_wsvm(apply_strategy(tiny, StrategyKind::baseline), SvmParams{});
        return fail("a two-sample class was accepted");
    } catch (const InvalidArgument& e) {
        if (std::string(e.what()).find("needs at least 3") == std::string::npos)
            return fail(std::string("unexpected small-class message: ") + e.what());
    }
    return {};
}

// ---------------------------------------------------------------------------
// 8. The unbiased pool is exactly the biased pool minus the known-unknown
//    rows, and its rates match an independent enumeration.
std::string check_unbiased_pools() {
    Rng rng(808);
    for (int trial = 0; trial < 50; ++trial) {
        const ScoreTable table = random_table(rng, 1);
        std::size_t n_kuc = 0, n_uuc = 0, n_biased = 0;
        for (const auto& row : table.rows) {
            if (row.category == TestCategory::kuc) ++n_kuc;
            if (row.category == TestCategory::uuc) ++n_uuc;
            if (row.category != TestCategory::kc) ++n_biased;
        }
        if (n_uuc != n_biased - n_kuc) return fail("pool arithmetic broke");

        const auto curve = oscr_curve(table, EvalMode::unbiased);
        for (const auto& point : curve) {
            std::size_t accepted = 0;
            for (const auto& row : table.rows)
                if (row.category == TestCategory::uuc && row.predicted != kUnknownLabel &&
                    row.known_max > point.delta)
                    ++accepted;
            if (point.fpr != static_cast<double>(accepted) / static_cast<double>(n_uuc))
                return fail("trial " + std::to_string(trial) + ": unbiased fpr at delta " + num(point.delta) +
                            " disagrees with the enumeration");
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// 9. The bundled config runs to a byte-identical report under a fresh
//    directory and a parallel worker pool.
std::string check_toy_determinism() {
    const ExperimentConfig cfg = load_experiment_config(LORD_TOY_CONFIG);
    const std::filesystem::path a = std::filesystem::absolute("acceptance_toy_a");
    const std::filesystem::path b = std::filesystem::absolute("acceptance_toy_b");
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);

    const RunReport first = run_experiment(cfg, a.string(), 2);
    run_experiment(cfg, b.string(), 2);
    std::string bytes_a, bytes_b;
    for (auto [path, bytes] : {std::pair{a, &bytes_a}, std::pair{b, &bytes_b}}) {
        std::ifstream in(path / "report.json", std::ios::binary);
        if (!in) return fail("missing report under " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        *bytes = ss.str();
    }
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);

    if (!first.all_ok()) {
        for (const auto& cell : first.cells)
            if (cell.status == "error") return fail("cell " + cell.name + " failed: " + cell.detail);
    }
    if (bytes_a.empty() || bytes_a != bytes_b) return fail("reports differ between identical runs");
    return {};
}

struct Check {
    const char* label;
    std::function<std::string()> body;
    double limit_seconds;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::strcmp(argv[1], "--recompute-golden") == 0) {
        const RegressionValues v = run_regression_benchmark();
        std::printf("kGoldenEvmKvrGain = %.10f\n", v.evm_gain);
        std::printf("kGoldenOsnnConstrainedAuc = %.10f\n", v.osnn_constrained);
        std::printf("kGoldenOsnnUnconstrainedAuc = %.10f\n", v.osnn_unconstrained);
        return 0;
    }

    const std::vector<Check> checks = {
        {"metric curves match brute-force recounts", check_metric_oracles, 5.0},
        {"weibull fit beats a 200x200 parameter lattice", check_weibull_fit, 2.0},
        {"entropic gradients match central differences", check_entropic_gradients, 30.0},
        {"strategy views keep exact class accounting", check_strategy_bookkeeping, 30.0},
        {"mixup window, filter monotonicity, provenance", check_mixup_properties, 30.0},
        {"fixed-seed benchmark holds its frozen margins", check_regression_benchmark, 60.0},
        {"smo reaches the optimum on both instances", check_smo_solver, 30.0},
        {"unbiased pools drop exactly the known unknowns", check_unbiased_pools, 30.0},
        {"bundled config reruns byte-identically", check_toy_determinism, 120.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        try {
            detail = checks[i].body();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (detail.empty() && seconds > checks[i].limit_seconds)
            detail = "took " + num(seconds) + "s, limit " + num(checks[i].limit_seconds) + "s";
        const bool ok = detail.empty();
        failures += ok ? 0 : 1;
        std::printf("%s  %zu. %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", i + 1, checks[i].label, seconds,
                    ok ? "" : ": ", detail.c_str());
    }
    return failures;
}
