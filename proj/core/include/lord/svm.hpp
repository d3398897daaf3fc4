#pragma once

#include <cstdint>

#include "lord/model.hpp"
#include "lord/strategy.hpp"
#include "lord/weibull.hpp"

namespace lord {

struct KernelSpec {
    enum class Type { linear, rbf } type = Type::rbf;
    double gamma = 1.0;  // rbf only
};

double kernel_eval(const KernelSpec& kernel, std::span<const double> a, std::span<const double> b);

struct SolverInfo {
    long long iterations = 0;
    double violation = 0.0;  // final KKT violation m(alpha) - M(alpha)
    double objective = 0.0;  // maximized dual value
};

// Soft-margin binary machine trained by two-variable SMO with maximal
// violating pair selection. Stores support vectors only.
struct BinarySvm {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coef;  // alpha_i * y_i
    double bias = 0.0;
    KernelSpec kernel;
    double penalty = 1.0;
    SolverInfo info;

    double decision(std::span<const double> x) const;
};

BinarySvm smo_train_binary(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double penalty,
                           const KernelSpec& kernel, double tol = 1e-3, long long max_iter = 1000000);

// One-class nu-machine: box [0, 1/(nu n)] with coefficients summing to one.
struct OneClassSvm {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coef;  // alpha_i
    double rho = 0.0;
    KernelSpec kernel;
    double nu = 0.1;
    SolverInfo info;

    double decision(std::span<const double> x) const;  // sum_i coef_i K(sv_i, x) - rho
};

OneClassSvm train_one_class(const std::vector<std::vector<double>>& x, double nu, const KernelSpec& kernel,
                            double tol = 1e-3, long long max_iter = 1000000);

// Weibull calibration of a score channel, fitted on the positive class's
// training scores shifted to their minimum. Maps a raw decision value to a
// probability that is 0 at or below the weakest training score and grows
// monotonically with the score.
struct ScoreCalibration {
    double shift = 0.0;
    WeibullParams weibull;

    double probability(double score) const;
};

ScoreCalibration calibrate_scores(std::vector<double> scores);

struct SvmParams {
    double penalty = 10.0;  // binary C
    KernelSpec kernel;
    double nu = 0.1;                  // one-class machines
    double boundary_fraction = 0.25;  // pi-svm: share of lowest positive scores used for calibration
    double tol = 1e-3;
    long long max_iter = 1000000;
};

// One one-class plus one binary machine per positive class; the two
// calibrated channels fuse by product.
class WsvmModel : public OpenSetModel {
public:
    struct PerClass {
        BinarySvm binary;
        ScoreCalibration binary_cal;
        OneClassSvm one_class;
        ScoreCalibration one_class_cal;
    };

    const std::vector<std::string>& known_classes() const override { return known_classes_; }
    std::size_t dim() const override { return dim_; }
    ModelScore score(std::span<const double> x) const override;

    const std::vector<std::string>& positive_classes() const { return positive_classes_; }
    const std::vector<PerClass>& machines() const { return machines_; }
    StrategyKind strategy() const { return kind_; }

private:
    friend WsvmModel fit_wsvm(const StrategyView& view, const SvmParams& params);
    friend class SvmIo;

    StrategyKind kind_ = StrategyKind::baseline;
    std::vector<std::string> known_classes_;
    std::vector<std::string> positive_classes_;
    std::vector<PerClass> machines_;
    std::size_t dim_ = 0;
};

// Binary machine per positive class with a Weibull over the lowest-margin
// positive decision values; the score is that Weibull's CDF.
class PiSvmModel : public OpenSetModel {
public:
    struct PerClass {
        BinarySvm binary;
        ScoreCalibration cal;
    };

    const std::vector<std::string>& known_classes() const override { return known_classes_; }
    std::size_t dim() const override { return dim_; }
    ModelScore score(std::span<const double> x) const override;

    const std::vector<std::string>& positive_classes() const { return positive_classes_; }
    const std::vector<PerClass>& machines() const { return machines_; }
    StrategyKind strategy() const { return kind_; }

private:
    friend PiSvmModel fit_pisvm(const StrategyView& view, const SvmParams& params);
    friend class SvmIo;

    StrategyKind kind_ = StrategyKind::baseline;
    std::vector<std::string> known_classes_;
    std::vector<std::string> positive_classes_;
    std::vector<PerClass> machines_;
    std::size_t dim_ = 0;
};

// Both fits require at least three samples per positive class and reject
// mpl; under kvr the unknowns only enter the binary rest sides.
WsvmModel fit_wsvm(const StrategyView& view, const SvmParams& params);
PiSvmModel fit_pisvm(const StrategyView& view, const SvmParams& params);

}  // namespace lord
