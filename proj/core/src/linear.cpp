#include "lord/linear.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "lord/common.hpp"
#include "lord/rng.hpp"

namespace lord {

namespace {

double log_sum_exp(std::span<const double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace

EntropicResult entropic_objective(std::span<const double> logits, int target) {
    const int n = static_cast<int>(logits.size());
    if (n < 1) throw InvalidArgument("entropic_objective: empty logits");
    if (target < -1 || target >= n) throw InvalidArgument("entropic_objective: target out of range");

    const double lse = log_sum_exp(logits);
    EntropicResult out;
    out.grad.resize(logits.size());
    for (int c = 0; c < n; ++c) out.grad[c] = std::exp(logits[c] - lse);  // softmax

    if (target >= 0) {
        out.loss = lse - logits[target];
        out.grad[target] -= 1.0;
    } else {
        // Unknown target: mean negative log-softmax over every output.
        double mean_logit = 0.0;
        for (double z : logits) mean_logit += z;
        mean_logit /= n;
        out.loss = lse - mean_logit;
        for (int c = 0; c < n; ++c) out.grad[c] -= 1.0 / n;
    }
    return out;
}

LinearModel fit_linear(const StrategyView& view, const LinearTrainConfig& cfg) {
    if (cfg.learning_rate <= 0.0) throw InvalidArgument("fit_linear: learning_rate must be positive");
    if (cfg.epochs < 1 || cfg.batch_size < 1) throw InvalidArgument("fit_linear: epochs and batch_size must be positive");
    if (cfg.l2_penalty < 0.0) throw InvalidArgument("fit_linear: l2_penalty must be non-negative");
    if (view.kind == StrategyKind::mpl)
        throw UnsupportedStrategy("fit_linear: mpl grows one output per unknown sample and is not supported");
    if (view.samples.empty()) throw InvalidArgument("fit_linear: empty training view");

    LinearModel model;
    model.kind_ = view.kind;
    model.known_classes_ = view.known_classes;
    model.output_classes_ = view.positive_classes;
    model.dim_ = feature_dim(view.samples);

    const std::size_t n_out = model.output_classes_.size();
    const std::size_t dim = model.dim_;
    model.w_.assign(n_out * dim, 0.0);
    model.b_.assign(n_out, 0.0);

    std::unordered_map<std::string, int> out_index;
    for (std::size_t c = 0; c < n_out; ++c) out_index[model.output_classes_[c]] = static_cast<int>(c);

    // Target output per sample; -1 sends the sample to the unknown objective.
    std::vector<int> target(view.samples.size());
    for (std::size_t i = 0; i < view.samples.size(); ++i) {
        const auto& label = view.samples[i].label;
        if (label == kUnknownLabel) {
            target[i] = -1;
        } else {
            const auto it = out_index.find(label);
            if (it == out_index.end()) throw InvalidArgument("fit_linear: label '" + label + "' is not an output class");
            target[i] = it->second;
        }
    }

    std::vector<double> z(n_out);
    const auto eval_logits = [&](std::span<const double> x) {
        for (std::size_t c = 0; c < n_out; ++c) {
            double s = model.b_[c];
            const double* row = model.w_.data() + c * dim;
            for (std::size_t k = 0; k < dim; ++k) s += row[k] * x[k];
            z[c] = s;
        }
    };
    const auto objective = [&]() {
        double total = 0.0;
        for (std::size_t i = 0; i < view.samples.size(); ++i) {
            eval_logits(view.samples[i].features);
            total += entropic_objective(z, target[i]).loss;
        }
        double reg = 0.0;
        for (double w : model.w_) reg += w * w;
        return total / static_cast<double>(view.samples.size()) + 0.5 * cfg.l2_penalty * reg;
    };

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(view.samples.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> gw(n_out * dim), gb(n_out);
    model.epoch_losses_.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
    model.epoch_losses_.push_back(objective());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double m = static_cast<double>(stop - start);
            std::fill(gw.begin(), gw.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            for (std::size_t p = start; p < stop; ++p) {
                const auto& x = view.samples[order[p]].features;
                eval_logits(x);
                const EntropicResult res = entropic_objective(z, target[order[p]]);
                for (std::size_t c = 0; c < n_out; ++c) {
                    const double g = res.grad[c];
                    gb[c] += g;
                    double* grow = gw.data() + c * dim;
                    for (std::size_t k = 0; k < dim; ++k) grow[k] += g * x[k];
                }
            }
            for (std::size_t c = 0; c < n_out; ++c) {
                model.b_[c] -= cfg.learning_rate * gb[c] / m;
                double* wrow = model.w_.data() + c * dim;
                const double* grow = gw.data() + c * dim;
                for (std::size_t k = 0; k < dim; ++k)
                    wrow[k] -= cfg.learning_rate * (grow[k] / m + cfg.l2_penalty * wrow[k]);
            }
        }
        model.epoch_losses_.push_back(objective());
    }
    return model;
}

std::vector<double> LinearModel::logits(std::span<const double> x) const {
    if (x.size() != dim_) throw InvalidArgument("LinearModel: query dimension mismatch");
    std::vector<double> z(output_classes_.size());
    for (std::size_t c = 0; c < z.size(); ++c) {
        double s = b_[c];
        const double* row = w_.data() + c * dim_;
        for (std::size_t k = 0; k < dim_; ++k) s += row[k] * x[k];
        z[c] = s;
    }
    return z;
}

ModelScore LinearModel::score(std::span<const double> x) const {
    const std::vector<double> z = logits(x);
    const double lse = log_sum_exp(z);

    ModelScore out;
    out.known.resize(known_classes_.size());
    std::size_t arg = 0;
    for (std::size_t c = 0; c < z.size(); ++c) {
        if (z[c] > z[arg]) arg = c;
        const double p = std::exp(z[c] - lse);
        if (c < known_classes_.size())
            out.known[c] = p;
        else
            out.unknown += p;  // spl pseudo-class probability
    }
    out.predicted = arg < known_classes_.size() ? known_classes_[arg] : kUnknownLabel;
    return out;
}

void LinearModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << "linear-model 1\n";
    out << "strategy " << to_string(kind_) << '\n';
    out << "dim " << dim_ << '\n';
    out << "outputs " << output_classes_.size() << '\n';
    out << "known " << known_classes_.size() << '\n';
    for (const auto& c : output_classes_) out << "class " << c << '\n';
    out << "weights\n";
    for (std::size_t c = 0; c < output_classes_.size(); ++c) {
        const double* row = w_.data() + c * dim_;
        for (std::size_t k = 0; k < dim_; ++k) out << (k ? " " : "") << fmt_double(row[k]);
        out << '\n';
    }
    out << "bias\n";
    for (std::size_t c = 0; c < b_.size(); ++c) out << (c ? " " : "") << fmt_double(b_[c]);
    out << '\n';
    if (!out) throw Error("write failed: " + path);
}

LinearModel LinearModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    std::string line;
    const auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) throw ParseError("model file truncated: " + path);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    if (next_line() != "linear-model 1") throw ParseError("not a linear model file: " + path);

    LinearModel model;
    std::size_t n_out = 0, n_known = 0;
    const auto field = [&](const std::string& key) -> std::string {
        const std::string l = next_line();
        if (l.compare(0, key.size() + 1, key + " ") != 0)
            throw ParseError("model file: expected '" + key + "' line");
        return l.substr(key.size() + 1);
    };
    model.kind_ = strategy_from_string(field("strategy"));
    model.dim_ = std::stoul(field("dim"));
    n_out = std::stoul(field("outputs"));
    n_known = std::stoul(field("known"));
    if (n_known == 0 || n_known > n_out) throw ParseError("model file: inconsistent class counts");
    for (std::size_t c = 0; c < n_out; ++c) {
        const std::string cls = field("class");
        model.output_classes_.push_back(cls);
        if (c < n_known) model.known_classes_.push_back(cls);
    }
    if (next_line() != "weights") throw ParseError("model file: expected 'weights'");
    model.w_.resize(n_out * model.dim_);
    for (std::size_t c = 0; c < n_out; ++c) {
        std::istringstream row(next_line());
        for (std::size_t k = 0; k < model.dim_; ++k) {
            std::string tok;
            if (!(row >> tok)) throw ParseError("model file: short weight row");
            model.w_[c * model.dim_ + k] = std::stod(tok);
        }
    }
    if (next_line() != "bias") throw ParseError("model file: expected 'bias'");
    std::istringstream row(next_line());
    model.b_.resize(n_out);
    for (std::size_t c = 0; c < n_out; ++c) {
        std::string tok;
        if (!(row >> tok)) throw ParseError("model file: short bias row");
        model.b_[c] = std::stod(tok);
    }
    return model;
}

}  // namespace lord
