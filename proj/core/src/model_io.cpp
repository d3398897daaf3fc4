#include "lord/model_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "lord/error.hpp"
#include "lord/evm.hpp"
#include "lord/linear.hpp"
#include "lord/osnn.hpp"
#include "lord/svm.hpp"

namespace lord {

namespace {

using nlohmann::json;

json features_json(const std::vector<double>& v) { return json(v); }

std::vector<double> features_from(const json& j) { return j.get<std::vector<double>>(); }

json weibull_json(const WeibullParams& w) { return json{{"shape", w.shape}, {"scale", w.scale}}; }

WeibullParams weibull_from(const json& j) {
    WeibullParams w;
    w.shape = j.at("shape").get<double>();
    w.scale = j.at("scale").get<double>();
    return w;
}

json kernel_json(const KernelSpec& k) {
    return json{{"type", k.type == KernelSpec::Type::linear ? "linear" : "rbf"}, {"gamma", k.gamma}};
}

KernelSpec kernel_from(const json& j) {
    KernelSpec k;
    const auto type = j.at("type").get<std::string>();
    if (type == "linear")
        k.type = KernelSpec::Type::linear;
    else if (type == "rbf")
        k.type = KernelSpec::Type::rbf;
    else
        throw ParseError("unknown kernel type '" + type + "'");
    k.gamma = j.at("gamma").get<double>();
    return k;
}

json info_json(const SolverInfo& info) {
    return json{{"iterations", info.iterations}, {"violation", info.violation}, {"objective", info.objective}};
}

SolverInfo info_from(const json& j) {
    SolverInfo info;
    info.iterations = j.at("iterations").get<long long>();
    info.violation = j.at("violation").get<double>();
    info.objective = j.at("objective").get<double>();
    return info;
}

json vectors_json(const std::vector<std::vector<double>>& rows) {
    json out = json::array();
    for (const auto& row : rows) out.push_back(features_json(row));
    return out;
}

std::vector<std::vector<double>> vectors_from(const json& j) {
    std::vector<std::vector<double>> rows;
    rows.reserve(j.size());
    for (const auto& row : j) rows.push_back(features_from(row));
    return rows;
}

json binary_json(const BinarySvm& m) {
    return json{{"support_vectors", vectors_json(m.support_vectors)}, {"coef", m.coef},     {"bias", m.bias},
                {"kernel", kernel_json(m.kernel)},                    {"penalty", m.penalty}, {"info", info_json(m.info)}};
}

BinarySvm binary_from(const json& j) {
    BinarySvm m;
    m.support_vectors = vectors_from(j.at("support_vectors"));
    m.coef = j.at("coef").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.kernel = kernel_from(j.at("kernel"));
    m.penalty = j.at("penalty").get<double>();
    m.info = info_from(j.at("info"));
    return m;
}

json one_class_json(const OneClassSvm& m) {
    return json{{"support_vectors", vectors_json(m.support_vectors)}, {"coef", m.coef}, {"rho", m.rho},
                {"kernel", kernel_json(m.kernel)},                    {"nu", m.nu},     {"info", info_json(m.info)}};
}

OneClassSvm one_class_from(const json& j) {
    OneClassSvm m;
    m.support_vectors = vectors_from(j.at("support_vectors"));
    m.coef = j.at("coef").get<std::vector<double>>();
    m.rho = j.at("rho").get<double>();
    m.kernel = kernel_from(j.at("kernel"));
    m.nu = j.at("nu").get<double>();
    m.info = info_from(j.at("info"));
    return m;
}

json calibration_json(const ScoreCalibration& cal) {
    return json{{"shift", cal.shift}, {"weibull", weibull_json(cal.weibull)}};
}

ScoreCalibration calibration_from(const json& j) {
    ScoreCalibration cal;
    cal.shift = j.at("shift").get<double>();
    cal.weibull = weibull_from(j.at("weibull"));
    return cal;
}

json view_json(const StrategyView& view) {
    json samples = json::array();
    for (const auto& s : view.samples) samples.push_back(json{{"label", s.label}, {"features", features_json(s.features)}});
    return json{{"kind", to_string(view.kind)},
                {"samples", std::move(samples)},
                {"known_classes", view.known_classes},
                {"positive_classes", view.positive_classes},
                {"negative_pool", view.negative_pool},
                {"degraded_to_baseline", view.degraded_to_baseline}};
}

StrategyView view_from(const json& j) {
    StrategyView view;
    view.kind = strategy_from_string(j.at("kind").get<std::string>());
    for (const auto& row : j.at("samples")) {
        Sample s;
        s.label = row.at("label").get<std::string>();
        s.features = features_from(row.at("features"));
        view.samples.push_back(std::move(s));
    }
    view.known_classes = j.at("known_classes").get<std::vector<std::string>>();
    view.positive_classes = j.at("positive_classes").get<std::vector<std::string>>();
    view.negative_pool = j.at("negative_pool").get<std::vector<std::size_t>>();
    view.degraded_to_baseline = j.at("degraded_to_baseline").get<bool>();
    const std::unordered_set<std::string> known(view.known_classes.begin(), view.known_classes.end());
    for (const auto& label : view.positive_classes)
        if (known.count(label) == 0) view.pseudo_set_.insert(label);
    return view;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace

class EvmIo {
public:
    static json to_json(const EvmModel& m) {
        json anchors = json::array();
        for (const auto& group : m.anchors_) {
            json rows = json::array();
            for (const auto& ev : group)
                rows.push_back(json{{"anchor", features_json(ev.anchor)}, {"weibull", weibull_json(ev.weibull)}});
            anchors.push_back(std::move(rows));
        }
        return json{{"type", "evm"},
                    {"strategy", to_string(m.kind_)},
                    {"known_classes", m.known_classes_},
                    {"positive_classes", m.positive_classes_},
                    {"dim", m.dim_},
                    {"anchors", std::move(anchors)}};
    }

    static std::unique_ptr<EvmModel> from_json(const json& j) {
        auto m = std::make_unique<EvmModel>();
        m->kind_ = strategy_from_string(j.at("strategy").get<std::string>());
        m->known_classes_ = j.at("known_classes").get<std::vector<std::string>>();
        m->positive_classes_ = j.at("positive_classes").get<std::vector<std::string>>();
        m->dim_ = j.at("dim").get<std::size_t>();
        for (const auto& group : j.at("anchors")) {
            std::vector<ExtremeVector> rows;
            rows.reserve(group.size());
            for (const auto& row : group) {
                ExtremeVector ev;
                ev.anchor = features_from(row.at("anchor"));
                ev.weibull = weibull_from(row.at("weibull"));
                rows.push_back(std::move(ev));
            }
            m->anchors_.push_back(std::move(rows));
        }
        if (m->anchors_.size() != m->positive_classes_.size())
            throw ParseError("anchor group count does not match the class list");
        return m;
    }
};

class SvmIo {
public:
    static json wsvm_to_json(const WsvmModel& m) {
        json machines = json::array();
        for (const auto& per : m.machines_)
            machines.push_back(json{{"binary", binary_json(per.binary)},
                                    {"binary_cal", calibration_json(per.binary_cal)},
                                    {"one_class", one_class_json(per.one_class)},
                                    {"one_class_cal", calibration_json(per.one_class_cal)}});
        return json{{"type", "wsvm"},
                    {"strategy", to_string(m.kind_)},
                    {"known_classes", m.known_classes_},
                    {"positive_classes", m.positive_classes_},
                    {"dim", m.dim_},
                    {"machines", std::move(machines)}};
    }

    static std::unique_ptr<WsvmModel> from_wsvm_json(const json& j) {
        auto m = std::make_unique<WsvmModel>();
        m->kind_ = strategy_from_string(j.at("strategy").get<std::string>());
        m->known_classes_ = j.at("known_classes").get<std::vector<std::string>>();
        m->positive_classes_ = j.at("positive_classes").get<std::vector<std::string>>();
        m->dim_ = j.at("dim").get<std::size_t>();
        for (const auto& row : j.at("machines")) {
            WsvmModel::PerClass per;
            per.binary = binary_from(row.at("binary"));
            per.binary_cal = calibration_from(row.at("binary_cal"));
            per.one_class = one_class_from(row.at("one_class"));
            per.one_class_cal = calibration_from(row.at("one_class_cal"));
            m->machines_.push_back(std::move(per));
        }
        if (m->machines_.size() != m->positive_classes_.size())
            throw ParseError("machine count does not match the class list");
        return m;
    }

    static json pisvm_to_json(const PiSvmModel& m) {
        json machines = json::array();
        for (const auto& per : m.machines_)
            machines.push_back(json{{"binary", binary_json(per.binary)}, {"cal", calibration_json(per.cal)}});
        return json{{"type", "pisvm"},
                    {"strategy", to_string(m.kind_)},
                    {"known_classes", m.known_classes_},
                    {"positive_classes", m.positive_classes_},
                    {"dim", m.dim_},
                    {"machines", std::move(machines)}};
    }

    static std::unique_ptr<PiSvmModel> from_pisvm_json(const json& j) {
        auto m = std::make_unique<PiSvmModel>();
        m->kind_ = strategy_from_string(j.at("strategy").get<std::string>());
        m->known_classes_ = j.at("known_classes").get<std::vector<std::string>>();
        m->positive_classes_ = j.at("positive_classes").get<std::vector<std::string>>();
        m->dim_ = j.at("dim").get<std::size_t>();
        for (const auto& row : j.at("machines")) {
            PiSvmModel::PerClass per;
            per.binary = binary_from(row.at("binary"));
            per.cal = calibration_from(row.at("cal"));
            m->machines_.push_back(std::move(per));
        }
        if (m->machines_.size() != m->positive_classes_.size())
            throw ParseError("machine count does not match the class list");
        return m;
    }
};

void save_model(const OpenSetModel& model, const std::string& path) {
    if (const auto* linear = dynamic_cast<const LinearModel*>(&model)) {
        linear->save(path);
        return;
    }
    json doc;
    if (const auto* osnn = dynamic_cast<const OsnnModel*>(&model)) {
        doc = json{{"type", "osnn"}, {"view", view_json(osnn->view())}};
    } else if (const auto* evm = dynamic_cast<const EvmModel*>(&model)) {
        doc = EvmIo::to_json(*evm);
    } else if (const auto* wsvm = dynamic_cast<const WsvmModel*>(&model)) {
        doc = SvmIo::wsvm_to_json(*wsvm);
    } else if (const auto* pisvm = dynamic_cast<const PiSvmModel*>(&model)) {
        doc = SvmIo::pisvm_to_json(*pisvm);
    } else {
        throw InvalidArgument("save_model: unrecognized model type");
    }
    write_text(path, doc.dump(2) + "\n");
}

std::unique_ptr<OpenSetModel> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (text.empty()) throw ParseError("'" + path + "' is empty");
    if (text.rfind("linear-model", 0) == 0) return std::make_unique<LinearModel>(LinearModel::load(path));
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    try {
        const auto type = doc.at("type").get<std::string>();
        if (type == "osnn") return std::make_unique<OsnnModel>(fit_osnn(view_from(doc.at("view"))));
        if (type == "evm") return EvmIo::from_json(doc);
        if (type == "wsvm") return SvmIo::from_wsvm_json(doc);
        if (type == "pisvm") return SvmIo::from_pisvm_json(doc);
        throw ParseError("'" + path + "': unknown model type '" + type + "'");
    } catch (const json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

}  // namespace lord
