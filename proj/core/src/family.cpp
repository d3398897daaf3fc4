#include "lord/family.hpp"

#include <cmath>
#include <set>

#include "lord/evm.hpp"
#include "lord/linear.hpp"
#include "lord/osnn.hpp"
#include "lord/svm.hpp"

namespace lord {

const char* to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::osnn: return "osnn";
        case ModelFamily::linear: return "linear";
        case ModelFamily::evm: return "evm";
        case ModelFamily::cevm: return "cevm";
        case ModelFamily::wsvm: return "wsvm";
        case ModelFamily::pisvm: return "pisvm";
    }
    return "?";
}

ModelFamily family_from_string(std::string_view name) {
    if (name == "osnn") return ModelFamily::osnn;
    if (name == "linear") return ModelFamily::linear;
    if (name == "evm") return ModelFamily::evm;
    if (name == "cevm") return ModelFamily::cevm;
    if (name == "wsvm") return ModelFamily::wsvm;
    if (name == "pisvm") return ModelFamily::pisvm;
    throw InvalidArgument("unknown model family '" + std::string(name) + "'");
}

bool family_supports(ModelFamily family, StrategyKind kind) {
    switch (family) {
        case ModelFamily::osnn:
        case ModelFamily::evm:
        case ModelFamily::cevm:
            return true;
        case ModelFamily::linear:
        case ModelFamily::wsvm:
        case ModelFamily::pisvm:
            return kind != StrategyKind::mpl;
    }
    return false;
}

namespace {

class ParamReader {
public:
    ParamReader(const Params& params, const char* who) : params_(params), who_(who) {}

    double get(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = params_.find(key);
        return it == params_.end() ? fallback : it->second;
    }

    int get_int(const std::string& key, int fallback) {
        const double v = get(key, static_cast<double>(fallback));
        const double r = std::nearbyint(v);
        if (r != v) throw InvalidArgument(std::string(who_) + ": parameter '" + key + "' must be integral");
        return static_cast<int>(r);
    }

    void finish() const {
        for (const auto& [key, value] : params_) {
            (void)value;
            if (used_.count(key) == 0)
                throw InvalidArgument(std::string(who_) + ": unknown parameter '" + key + "'");
        }
    }

private:
    const Params& params_;
    const char* who_;
    std::set<std::string> used_;
};

KernelSpec kernel_from(ParamReader& reader) {
    KernelSpec kernel;
    kernel.type = reader.get("kernel_linear", 0.0) != 0.0 ? KernelSpec::Type::linear : KernelSpec::Type::rbf;
    kernel.gamma = reader.get("gamma", 1.0);
    return kernel;
}

EvmConfig evm_config_from(ParamReader& reader) {
    EvmConfig cfg;
    cfg.tail_size = reader.get_int("tail_size", cfg.tail_size);
    cfg.margin_scale = reader.get("margin_scale", cfg.margin_scale);
    cfg.cluster_eps = reader.get("cluster_eps", cfg.cluster_eps);
    cfg.cluster_min_pts = reader.get_int("cluster_min_pts", cfg.cluster_min_pts);
    cfg.coverage_threshold = reader.get("coverage_threshold", cfg.coverage_threshold);
    return cfg;
}

SvmParams svm_params_from(ParamReader& reader) {
    SvmParams params;
    params.penalty = reader.get("penalty", params.penalty);
    params.kernel = kernel_from(reader);
    params.nu = reader.get("nu", params.nu);
    params.boundary_fraction = reader.get("boundary_fraction", params.boundary_fraction);
    params.tol = reader.get("tol", params.tol);
    params.max_iter = static_cast<long long>(reader.get("max_iter", static_cast<double>(params.max_iter)));
    return params;
}

}  // namespace

std::unique_ptr<OpenSetModel> fit_model(ModelFamily family, const StrategyView& view, const Params& params,
                                        std::uint64_t seed) {
    if (!family_supports(family, view.kind))
        throw UnsupportedStrategy(std::string(to_string(family)) + " does not support the " +
                                  to_string(view.kind) + " strategy");
    ParamReader reader(params, to_string(family));
    switch (family) {
        case ModelFamily::osnn: {
            reader.finish();
            return std::make_unique<OsnnModel>(fit_osnn(view));
        }
        case ModelFamily::linear: {
            LinearTrainConfig cfg;
            cfg.learning_rate = reader.get("learning_rate", cfg.learning_rate);
            cfg.epochs = reader.get_int("epochs", cfg.epochs);
            cfg.batch_size = reader.get_int("batch_size", cfg.batch_size);
            cfg.l2_penalty = reader.get("l2_penalty", cfg.l2_penalty);
            cfg.seed = seed;
            reader.finish();
            return std::make_unique<LinearModel>(fit_linear(view, cfg));
        }
        case ModelFamily::evm: {
            const EvmConfig cfg = evm_config_from(reader);
            reader.finish();
            return std::make_unique<EvmModel>(fit_evm(view, cfg));
        }
        case ModelFamily::cevm: {
            const EvmConfig cfg = evm_config_from(reader);
            reader.finish();
            return std::make_unique<EvmModel>(fit_evm(cevm_reduce(view, cfg), cfg));
        }
        case ModelFamily::wsvm: {
            const SvmParams svm = svm_params_from(reader);
            reader.finish();
            return std::make_unique<WsvmModel>(fit_wsvm(view, svm));
        }
        case ModelFamily::pisvm: {
            const SvmParams svm = svm_params_from(reader);
            reader.finish();
            return std::make_unique<PiSvmModel>(fit_pisvm(view, svm));
        }
    }
    throw InvalidArgument("fit_model: unknown family");
}

}  // namespace lord
