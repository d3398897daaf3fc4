#include "lord/svm.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lord/common.hpp"

namespace lord {

double kernel_eval(const KernelSpec& kernel, std::span<const double> a, std::span<const double> b) {
    switch (kernel.type) {
        case KernelSpec::Type::linear: {
            if (a.size() != b.size()) throw InvalidArgument("kernel_eval: dimension mismatch");
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
            return s;
        }
        case KernelSpec::Type::rbf: {
            if (!(kernel.gamma > 0.0)) throw InvalidArgument("kernel_eval: rbf gamma must be positive");
            return std::exp(-kernel.gamma * squared_distance(a, b));
        }
    }
    throw InvalidArgument("kernel_eval: unknown kernel type");
}

namespace {

// Dense symmetric kernel matrix; adequate at desk scale.
std::vector<double> gram(const std::vector<std::vector<double>>& x, const KernelSpec& kernel) {
    const std::size_t n = x.size();
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernel_eval(kernel, x[i], x[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    return k;
}

constexpr double kEtaFloor = 1e-12;

}  // namespace

double BinarySvm::decision(std::span<const double> x) const {
    double s = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) s += coef[i] * kernel_eval(kernel, support_vectors[i], x);
    return s;
}

BinarySvm smo_train_binary(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double penalty,
                           const KernelSpec& kernel, double tol, long long max_iter) {
    const std::size_t n = x.size();
    if (n < 2) throw InvalidArgument("smo_train_binary: need at least two samples");
    if (y.size() != n) throw InvalidArgument("smo_train_binary: label count mismatch");
    if (!(penalty > 0.0)) throw InvalidArgument("smo_train_binary: penalty must be positive");
    if (!(tol > 0.0)) throw InvalidArgument("smo_train_binary: tol must be positive");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == 1)
            has_pos = true;
        else if (v == -1)
            has_neg = true;
        else
            throw InvalidArgument("smo_train_binary: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw InvalidArgument("smo_train_binary: both classes must be present");

    const std::vector<double> k = gram(x, kernel);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G_i = (Q alpha)_i - 1 with Q_ij = y_i y_j K_ij

    const auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * k[i * n + j]; };

    long long it = 0;
    double violation = 0.0;
    for (;; ++it) {
        // Maximal violating pair.
        std::size_t i = n, j = n;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const bool in_up = (y[t] == 1 && alpha[t] < penalty) || (y[t] == -1 && alpha[t] > 0.0);
            const bool in_low = (y[t] == -1 && alpha[t] < penalty) || (y[t] == 1 && alpha[t] > 0.0);
            const double v = -y[t] * grad[t];
            if (in_up && v > m_up) {
                m_up = v;
                i = t;
            }
            if (in_low && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        violation = m_up - m_low;
        if (violation <= tol) break;
        if (it >= max_iter)
            throw NumericError("smo_train_binary: iteration cap " + std::to_string(max_iter) +
                               " reached with violation " + fmt_double(violation));

        // Step along alpha_i += y_i t, alpha_j -= y_j t (keeps y.alpha fixed).
        // The label signs square away in the curvature of that direction.
        double eta = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
        if (eta <= 0.0) eta = kEtaFloor;
        double step = violation / eta;
        const double up_i = y[i] == 1 ? penalty - alpha[i] : alpha[i];
        const double up_j = y[j] == 1 ? alpha[j] : penalty - alpha[j];
        step = std::min(step, std::min(up_i, up_j));

        const double di = y[i] * step;
        const double dj = -y[j] * step;
        alpha[i] += di;
        alpha[j] += dj;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
    }

    // Bias from the free support vectors, midpoint of the bounds otherwise.
    double bias = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < penalty) {
            bias += -y[t] * grad[t];
            ++free_count;
        }
    }
    if (free_count > 0) {
        bias /= static_cast<double>(free_count);
    } else {
        double m_up = -std::numeric_limits<double>::infinity(), m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const bool in_up = (y[t] == 1 && alpha[t] < penalty) || (y[t] == -1 && alpha[t] > 0.0);
            const bool in_low = (y[t] == -1 && alpha[t] < penalty) || (y[t] == 1 && alpha[t] > 0.0);
            const double v = -y[t] * grad[t];
            if (in_up) m_up = std::max(m_up, v);
            if (in_low) m_low = std::min(m_low, v);
        }
        bias = (m_up + m_low) / 2.0;
    }

    BinarySvm model;
    model.kernel = kernel;
    model.penalty = penalty;
    model.bias = bias;
    model.info.iterations = it;
    model.info.violation = violation;
    double sum_alpha = 0.0, quad = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        sum_alpha += alpha[t];
        quad += alpha[t] * grad[t];  // alpha.G = alpha.Q.alpha - sum alpha
    }
    model.info.objective = sum_alpha - 0.5 * (quad + sum_alpha);
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_vectors.push_back(x[t]);
            model.coef.push_back(alpha[t] * y[t]);
        }
    }
    return model;
}

double OneClassSvm::decision(std::span<const double> x) const {
    double s = -rho;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) s += coef[i] * kernel_eval(kernel, support_vectors[i], x);
    return s;
}

OneClassSvm train_one_class(const std::vector<std::vector<double>>& x, double nu, const KernelSpec& kernel, double tol,
                            long long max_iter) {
    const std::size_t n = x.size();
    if (n < 2) throw InvalidArgument("train_one_class: need at least two samples");
    if (!(nu > 0.0) || nu > 1.0) throw InvalidArgument("train_one_class: nu must be in (0, 1]");
    if (!(tol > 0.0)) throw InvalidArgument("train_one_class: tol must be positive");
    bool all_same = true;
    for (std::size_t i = 1; i < n && all_same; ++i) all_same = x[i] == x[0];
    if (all_same) throw NumericError("train_one_class: all training samples are identical");

    const std::vector<double> k = gram(x, kernel);
    const double ub = 1.0 / (nu * static_cast<double>(n));

    // Coefficients start on the boundary of the feasible simplex.
    std::vector<double> alpha(n, 0.0);
    double remaining = 1.0;
    for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
        alpha[i] = std::min(ub, remaining);
        remaining -= alpha[i];
    }

    std::vector<double> grad(n, 0.0);  // G_i = (K alpha)_i
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) s += k[i * n + t] * alpha[t];
        grad[i] = s;
    }

    long long it = 0;
    double violation = 0.0;
    for (;; ++it) {
        std::size_t i = n, j = n;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -grad[t];
            if (alpha[t] < ub && v > m_up) {
                m_up = v;
                i = t;
            }
            if (alpha[t] > 0.0 && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        violation = m_up - m_low;
        if (violation <= tol) break;
        if (it >= max_iter)
            throw NumericError("train_one_class: iteration cap " + std::to_string(max_iter) +
                               " reached with violation " + fmt_double(violation));

        double eta = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
        if (eta <= 0.0) eta = kEtaFloor;
        double step = violation / eta;
        step = std::min(step, std::min(ub - alpha[i], alpha[j]));

        alpha[i] += step;
        alpha[j] -= step;
        for (std::size_t t = 0; t < n; ++t) grad[t] += (k[t * n + i] - k[t * n + j]) * step;
    }

    double rho = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < ub) {
            rho += grad[t];
            ++free_count;
        }
    }
    if (free_count > 0) {
        rho /= static_cast<double>(free_count);
    } else {
        double m_up = -std::numeric_limits<double>::infinity(), m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (alpha[t] < ub) m_up = std::max(m_up, -grad[t]);
            if (alpha[t] > 0.0) m_low = std::min(m_low, -grad[t]);
        }
        rho = -(m_up + m_low) / 2.0;
    }

    OneClassSvm model;
    model.kernel = kernel;
    model.nu = nu;
    model.rho = rho;
    model.info.iterations = it;
    model.info.violation = violation;
    double obj = 0.0;
    for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * grad[t];
    model.info.objective = -0.5 * obj;  // maximized form of -1/2 a.K.a
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_vectors.push_back(x[t]);
            model.coef.push_back(alpha[t]);
        }
    }
    return model;
}

double ScoreCalibration::probability(double score) const {
    if (score <= shift) return 0.0;
    return weibull_cdf(score - shift, weibull);
}

ScoreCalibration calibrate_scores(std::vector<double> scores) {
    if (scores.empty()) throw InvalidArgument("calibrate_scores: empty score set");
    ScoreCalibration cal;
    cal.shift = *std::min_element(scores.begin(), scores.end());
    constexpr double kFloor = 1e-12;
    for (double& s : scores) s = std::max(s - cal.shift, kFloor);
    const bool degenerate =
        scores.size() < 2 || std::all_of(scores.begin(), scores.end(), [&](double v) { return v == scores[0]; });
    if (degenerate) {
        // Step calibration: probability jumps right above the shift point.
        cal.weibull = {1.0, std::max(*std::max_element(scores.begin(), scores.end()), kFloor)};
    } else {
        cal.weibull = weibull_fit_mle(scores);
    }
    return cal;
}

namespace {

struct PositiveGroups {
    std::vector<std::vector<std::size_t>> members;  // per positive class
    std::vector<bool> negative;
};

PositiveGroups group_positives(const StrategyView& view, const char* who) {
    if (view.kind == StrategyKind::mpl)
        throw UnsupportedStrategy(std::string(who) + ": mpl creates single-sample classes and is not supported");
    PositiveGroups out;
    out.negative.assign(view.samples.size(), false);
    for (std::size_t i : view.negative_pool) out.negative[i] = true;

    std::unordered_map<std::string, int> index;
    for (std::size_t c = 0; c < view.positive_classes.size(); ++c) index[view.positive_classes[c]] = static_cast<int>(c);
    out.members.resize(view.positive_classes.size());
    for (std::size_t i = 0; i < view.samples.size(); ++i) {
        if (out.negative[i]) continue;
        const auto it = index.find(view.samples[i].label);
        if (it == index.end())
            throw InvalidArgument(std::string(who) + ": sample label '" + view.samples[i].label + "' is not a positive class");
        out.members[static_cast<std::size_t>(it->second)].push_back(i);
    }
    for (std::size_t c = 0; c < out.members.size(); ++c) {
        if (out.members[c].size() < 3)
            throw InvalidArgument(std::string(who) + ": class '" + view.positive_classes[c] + "' has " +
                                  std::to_string(out.members[c].size()) + " samples, needs at least 3");
    }
    return out;
}

BinarySvm one_vs_rest(const StrategyView& view, const PositiveGroups& groups, std::size_t cls, const SvmParams& params,
                      const char* who) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (std::size_t i : groups.members[cls]) {
        x.push_back(view.samples[i].features);
        y.push_back(1);
    }
    const std::size_t n_pos = x.size();
    for (std::size_t i = 0; i < view.samples.size(); ++i) {
        if (groups.negative[i]) {
            x.push_back(view.samples[i].features);
            y.push_back(-1);
        } else if (view.samples[i].label != view.positive_classes[cls]) {
            x.push_back(view.samples[i].features);
            y.push_back(-1);
        }
    }
    if (x.size() == n_pos)
        throw InvalidArgument(std::string(who) + ": class '" + view.positive_classes[cls] + "' has an empty rest side");
    return smo_train_binary(x, y, params.penalty, params.kernel, params.tol, params.max_iter);
}

void validate_svm_params(const SvmParams& params) {
    if (!(params.penalty > 0.0)) throw InvalidArgument("SvmParams: penalty must be positive");
    if (!(params.nu > 0.0) || params.nu > 1.0) throw InvalidArgument("SvmParams: nu must be in (0, 1]");
    if (!(params.boundary_fraction > 0.0) || params.boundary_fraction > 1.0)
        throw InvalidArgument("SvmParams: boundary_fraction must be in (0, 1]");
}

}  // namespace

WsvmModel fit_wsvm(const StrategyView& view, const SvmParams& params) {
    validate_svm_params(params);
    const PositiveGroups groups = group_positives(view, "fit_wsvm");

    WsvmModel model;
    model.kind_ = view.kind;
    model.known_classes_ = view.known_classes;
    model.positive_classes_ = view.positive_classes;
    model.dim_ = feature_dim(view.samples);
    model.machines_.resize(view.positive_classes.size());

    for (std::size_t c = 0; c < view.positive_classes.size(); ++c) {
        auto& m = model.machines_[c];

        std::vector<std::vector<double>> pos;
        for (std::size_t i : groups.members[c]) pos.push_back(view.samples[i].features);
        m.one_class = train_one_class(pos, params.nu, params.kernel, params.tol, params.max_iter);
        m.binary = one_vs_rest(view, groups, c, params, "fit_wsvm");

        std::vector<double> oc_scores, bin_scores;
        for (const auto& p : pos) {
            oc_scores.push_back(m.one_class.decision(p));
            bin_scores.push_back(m.binary.decision(p));
        }
        m.one_class_cal = calibrate_scores(std::move(oc_scores));
        m.binary_cal = calibrate_scores(std::move(bin_scores));
    }
    return model;
}

ModelScore WsvmModel::score(std::span<const double> x) const {
    if (x.size() != dim_) throw InvalidArgument("WsvmModel: query dimension mismatch");
    ModelScore out;
    out.known.assign(known_classes_.size(), 0.0);
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t c = 0; c < machines_.size(); ++c) {
        const auto& m = machines_[c];
        const double p = m.one_class_cal.probability(m.one_class.decision(x)) * m.binary_cal.probability(m.binary.decision(x));
        if (p > best) {
            best = p;
            arg = c;
        }
        if (c < known_classes_.size())
            out.known[c] = p;
        else
            out.unknown = std::max(out.unknown, p);
    }
    out.predicted = arg < known_classes_.size() ? known_classes_[arg] : kUnknownLabel;
    return out;
}

PiSvmModel fit_pisvm(const StrategyView& view, const SvmParams& params) {
    validate_svm_params(params);
    const PositiveGroups groups = group_positives(view, "fit_pisvm");

    PiSvmModel model;
    model.kind_ = view.kind;
    model.known_classes_ = view.known_classes;
    model.positive_classes_ = view.positive_classes;
    model.dim_ = feature_dim(view.samples);
    model.machines_.resize(view.positive_classes.size());

    for (std::size_t c = 0; c < view.positive_classes.size(); ++c) {
        auto& m = model.machines_[c];
        m.binary = one_vs_rest(view, groups, c, params, "fit_pisvm");

        // Calibrate on the lowest positive decision values: the boundary side
        // of the class carries the open-set evidence.
        std::vector<double> scores;
        for (std::size_t i : groups.members[c]) scores.push_back(m.binary.decision(view.samples[i].features));
        std::sort(scores.begin(), scores.end());
        const std::size_t keep =
            std::min(scores.size(), static_cast<std::size_t>(std::ceil(params.boundary_fraction * static_cast<double>(scores.size()))));
        scores.resize(std::max<std::size_t>(keep, 1));
        m.cal = calibrate_scores(std::move(scores));
    }
    return model;
}

ModelScore PiSvmModel::score(std::span<const double> x) const {
    if (x.size() != dim_) throw InvalidArgument("PiSvmModel: query dimension mismatch");
    ModelScore out;
    out.known.assign(known_classes_.size(), 0.0);
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t c = 0; c < machines_.size(); ++c) {
        const double p = machines_[c].cal.probability(machines_[c].binary.decision(x));
        if (p > best) {
            best = p;
            arg = c;
        }
        if (c < known_classes_.size())
            out.known[c] = p;
        else
            out.unknown = std::max(out.unknown, p);
    }
    out.predicted = arg < known_classes_.size() ? known_classes_[arg] : kUnknownLabel;
    return out;
}

}  // namespace lord
