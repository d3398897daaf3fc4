#pragma once

#include <cstdint>

#include "lord/model.hpp"
#include "lord/strategy.hpp"

namespace lord {

struct LinearTrainConfig {
    double learning_rate = 0.1;
    int epochs = 200;
    int batch_size = 32;
    double l2_penalty = 0.0;
    std::uint64_t seed = 0;
};

struct EntropicResult {
    double loss = 0.0;
    std::vector<double> grad;  // d loss / d logits
};

// Cross-entropy for a known target index; for target -1 (unknown) the loss
// is the mean negative log-softmax over all outputs, whose optimum is the
// uniform distribution (value ln C there, gradient zero).
EntropicResult entropic_objective(std::span<const double> logits, int target);

// Single softmax layer over raw features. Convex in the parameters, so
// zero initialization plus plain mini-batch gradient descent is enough.
class LinearModel : public OpenSetModel {
public:
    const std::vector<std::string>& known_classes() const override { return known_classes_; }
    std::size_t dim() const override { return dim_; }
    ModelScore score(std::span<const double> x) const override;

    std::vector<double> logits(std::span<const double> x) const;

    StrategyKind strategy() const { return kind_; }
    const std::vector<std::string>& output_classes() const { return output_classes_; }
    const std::vector<double>& weights() const { return w_; }  // row-major, outputs x dim
    const std::vector<double>& bias() const { return b_; }
    const std::vector<double>& epoch_losses() const { return epoch_losses_; }

    // Flat text document: header (strategy, dims, class order) then
    // row-major weights and the bias row, full round-trip precision.
    void save(const std::string& path) const;
    static LinearModel load(const std::string& path);

private:
    friend LinearModel fit_linear(const StrategyView& view, const LinearTrainConfig& cfg);

    StrategyKind kind_ = StrategyKind::baseline;
    std::vector<std::string> known_classes_;
    std::vector<std::string> output_classes_;  // known classes plus the spl pseudo-class
    std::vector<double> w_;                    // row-major, outputs x dim
    std::vector<double> b_;
    std::size_t dim_ = 0;
    std::vector<double> epoch_losses_;
};

// Supports baseline, spl (extra output unit) and kvr (negatives trained
// toward the uniform distribution); mpl is rejected as unsupported.
LinearModel fit_linear(const StrategyView& view, const LinearTrainConfig& cfg);

}  // namespace lord
