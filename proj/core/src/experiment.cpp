#include "lord/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "lord/common.hpp"
#include "lord/rng.hpp"
#include "lord/strategy.hpp"

namespace lord {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* name : allowed)
            if (key == name) {
                known = true;
                break;
            }
        if (!known) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

long long get_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    return v.get<long long>();
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

SyntheticSpec parse_synthetic(const json& obj) {
    expect_keys(obj, "dataset.synthetic", {"classes", "per_class", "dim", "spread"});
    SyntheticSpec spec;
    if (obj.contains("classes")) spec.classes = static_cast<int>(get_integer(obj["classes"], "dataset.synthetic.classes"));
    if (obj.contains("per_class"))
        spec.per_class = static_cast<int>(get_integer(obj["per_class"], "dataset.synthetic.per_class"));
    if (obj.contains("dim")) spec.dim = static_cast<int>(get_integer(obj["dim"], "dataset.synthetic.dim"));
    if (obj.contains("spread")) spec.spread = get_number(obj["spread"], "dataset.synthetic.spread");
    if (spec.classes < 1 || spec.per_class < 1 || spec.dim < 1 || !(spec.spread > 0.0))
        throw ConfigError("dataset.synthetic: classes, per_class, dim must be >= 1 and spread > 0");
    return spec;
}

SplitSpec parse_split(const json& obj) {
    expect_keys(obj, "split", {"n_kc", "n_kuc", "n_uuc", "train_per_class", "kuc_to_kc_sample_ratio"});
    for (const char* key : {"n_kc", "n_kuc", "n_uuc", "train_per_class"})
        if (!obj.contains(key)) throw ConfigError(std::string("split.") + key + " is required");
    SplitSpec spec;
    spec.n_kc = static_cast<int>(get_integer(obj["n_kc"], "split.n_kc"));
    spec.n_kuc = static_cast<int>(get_integer(obj["n_kuc"], "split.n_kuc"));
    spec.n_uuc = static_cast<int>(get_integer(obj["n_uuc"], "split.n_uuc"));
    const json& per = obj["train_per_class"];
    if (per.is_number_integer()) {
        const int n = static_cast<int>(per.get<long long>());
        spec.train_per_class = {n, n};
    } else if (per.is_array() && per.size() == 2) {
        spec.train_per_class.lo = static_cast<int>(get_integer(per[0], "split.train_per_class[0]"));
        spec.train_per_class.hi = static_cast<int>(get_integer(per[1], "split.train_per_class[1]"));
    } else {
        throw ConfigError("split.train_per_class must be an integer or [lo, hi]");
    }
    if (obj.contains("kuc_to_kc_sample_ratio"))
        spec.kuc_to_kc_sample_ratio = get_number(obj["kuc_to_kc_sample_ratio"], "split.kuc_to_kc_sample_ratio");
    return spec;
}

std::vector<FamilyPlan> parse_families(const json& obj) {
    if (!obj.is_object() || obj.empty()) throw ConfigError("families must be a non-empty object");
    std::vector<FamilyPlan> plans;
    for (const auto& [name, grid] : obj.items()) {
        FamilyPlan plan;
        plan.family = family_from_string(name);
        if (!grid.is_object()) throw ConfigError("families." + name + " must be an object of parameter lists");
        for (const auto& [key, values] : grid.items()) {
            std::vector<double> list;
            if (values.is_array()) {
                for (std::size_t i = 0; i < values.size(); ++i)
                    list.push_back(get_number(values[i], "families." + name + "." + key));
            } else {
                list.push_back(get_number(values, "families." + name + "." + key));
            }
            if (list.empty()) throw ConfigError("families." + name + "." + key + " has no candidate values");
            plan.grid[key] = std::move(list);
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

MixupPlan parse_mixup(const json& obj) {
    expect_keys(obj, "mixup", {"ratios", "alphas"});
    MixupPlan plan;
    if (obj.contains("ratios"))
        for (const auto& v : obj["ratios"]) {
            const double r = get_number(v, "mixup.ratios");
            if (!(r > 0.0)) throw ConfigError("mixup.ratios must be positive");
            plan.ratios.push_back(r);
        }
    if (obj.contains("alphas")) {
        plan.alphas.clear();
        for (const auto& v : obj["alphas"]) {
            const double a = get_number(v, "mixup.alphas");
            if (a < 0.0) throw ConfigError("mixup.alphas must be non-negative");
            plan.alphas.push_back(a);
        }
        if (plan.alphas.empty()) throw ConfigError("mixup.alphas must not be empty when given");
    }
    return plan;
}

std::string fmt_params(const Params& params) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : params) {
        if (!first) out += ", ";
        first = false;
        out += key + "=" + fmt_double(value);
    }
    return out + "}";
}

json params_json(const Params& params) {
    json out = json::object();
    for (const auto& [key, value] : params) out[key] = value;
    return out;
}

json canonical_config(const ExperimentConfig& cfg) {
    json doc;
    if (cfg.dataset.from_file()) {
        doc["dataset"] = json{{"csv", cfg.dataset.csv}};
    } else {
        doc["dataset"] = json{{"synthetic", json{{"classes", cfg.dataset.synthetic.classes},
                                                 {"per_class", cfg.dataset.synthetic.per_class},
                                                 {"dim", cfg.dataset.synthetic.dim},
                                                 {"spread", cfg.dataset.synthetic.spread}}}};
    }
    doc["split"] = json{{"n_kc", cfg.split.n_kc},
                        {"n_kuc", cfg.split.n_kuc},
                        {"n_uuc", cfg.split.n_uuc},
                        {"train_per_class", json::array({cfg.split.train_per_class.lo, cfg.split.train_per_class.hi})},
                        {"kuc_to_kc_sample_ratio", cfg.split.kuc_to_kc_sample_ratio}};
    json families = json::object();
    for (const auto& plan : cfg.families) {
        json grid = json::object();
        for (const auto& [key, values] : plan.grid) grid[key] = values;
        families[to_string(plan.family)] = std::move(grid);
    }
    doc["families"] = std::move(families);
    json strategies = json::array();
    for (const auto kind : cfg.strategies) strategies.push_back(to_string(kind));
    doc["strategies"] = std::move(strategies);
    doc["mixup"] = json{{"ratios", cfg.mixup.ratios}, {"alphas", cfg.mixup.alphas}};
    json modes = json::array();
    for (const auto mode : cfg.modes) modes.push_back(to_string(mode));
    doc["modes"] = std::move(modes);
    doc["ccr_targets"] = cfg.ccr_targets;
    doc["repeats"] = cfg.repeats;
    doc["folds"] = cfg.folds;
    doc["seed"] = cfg.seed;
    return doc;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.families.empty()) throw ConfigError("config needs at least one model family");
    if (cfg.strategies.empty()) throw ConfigError("config needs at least one strategy");
    if (cfg.modes.empty()) throw ConfigError("config needs at least one evaluation mode");
    if (cfg.ccr_targets.empty()) throw ConfigError("config needs at least one ccr target");
    for (double t : cfg.ccr_targets)
        if (!(t > 0.0 && t < 1.0)) throw ConfigError("ccr targets must lie strictly between 0 and 1");
    if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");
    if (cfg.folds < 2) throw ConfigError("folds must be at least 2");
    std::set<std::string> seen;
    for (const auto kind : cfg.strategies)
        if (!seen.insert(to_string(kind)).second) throw ConfigError("duplicate strategy in config");
    seen.clear();
    for (const auto mode : cfg.modes)
        if (!seen.insert(to_string(mode)).second) throw ConfigError("duplicate evaluation mode in config");
    seen.clear();
    for (const auto& plan : cfg.families)
        if (!seen.insert(to_string(plan.family)).second) throw ConfigError("duplicate model family in config");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    expect_keys(doc, "config",
                {"dataset", "split", "families", "strategies", "mixup", "modes", "ccr_targets", "repeats", "folds",
                 "seed"});
    for (const char* key : {"dataset", "split", "families", "strategies"})
        if (!doc.contains(key)) throw ConfigError(std::string("config.") + key + " is required");

    ExperimentConfig cfg;
    const json& dataset = doc["dataset"];
    expect_keys(dataset, "dataset", {"csv", "synthetic"});
    if (dataset.contains("csv") == dataset.contains("synthetic"))
        throw ConfigError("dataset needs exactly one of 'csv' or 'synthetic'");
    if (dataset.contains("csv")) {
        if (!dataset["csv"].is_string()) throw ConfigError("dataset.csv must be a string");
        cfg.dataset.csv = dataset["csv"].get<std::string>();
    } else {
        cfg.dataset.synthetic = parse_synthetic(dataset["synthetic"]);
    }
    cfg.split = parse_split(doc["split"]);
    cfg.families = parse_families(doc["families"]);
    if (!doc["strategies"].is_array() || doc["strategies"].empty())
        throw ConfigError("strategies must be a non-empty array");
    for (const auto& v : doc["strategies"]) {
        if (!v.is_string()) throw ConfigError("strategies entries must be strings");
        cfg.strategies.push_back(strategy_from_string(v.get<std::string>()));
    }
    if (doc.contains("mixup")) cfg.mixup = parse_mixup(doc["mixup"]);
    if (doc.contains("modes")) {
        cfg.modes.clear();
        for (const auto& v : doc["modes"]) {
            if (!v.is_string()) throw ConfigError("modes entries must be strings");
            cfg.modes.push_back(eval_mode_from_string(v.get<std::string>()));
        }
    }
    if (doc.contains("ccr_targets")) {
        cfg.ccr_targets.clear();
        for (const auto& v : doc["ccr_targets"]) cfg.ccr_targets.push_back(get_number(v, "ccr_targets"));
    }
    if (doc.contains("repeats")) cfg.repeats = static_cast<int>(get_integer(doc["repeats"], "repeats"));
    if (doc.contains("folds")) cfg.folds = static_cast<int>(get_integer(doc["folds"], "folds"));
    if (doc.contains("seed")) {
        const long long seed = get_integer(doc["seed"], "seed");
        if (seed < 0) throw ConfigError("seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str());
}

std::string config_digest(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const std::uint64_t h = fnv1a64(canonical_config(cfg).dump());
    char out[17];
    std::snprintf(out, sizeof(out), "%016" PRIx64, h);
    return std::string(out);
}

bool RunReport::all_ok() const {
    for (const auto& cell : cells)
        if (cell.status == "error") return false;
    return true;
}

namespace {

struct RepeatData {
    OpenSetDataset dataset;
    SampleSet kc_train;  // training rows minus the unknown-marked ones
};

std::string repeat_tag(int repeat) { return "r" + std::to_string(repeat); }

std::string source_tag(const CellResult& cell) {
    if (!cell.mixup_cell) return "genuine";
    return "mix" + fmt_double(cell.ratio) + "_a" + fmt_double(cell.alpha);
}

std::string cell_coordinates(const CellResult& cell) {
    std::string coord = "cell/" + repeat_tag(cell.repeat) + "/" + to_string(cell.family) + "/" +
                        to_string(cell.strategy);
    if (cell.mixup_cell)
        coord += "/mix/" + fmt_double(cell.ratio) + "/" + fmt_double(cell.alpha);
    else
        coord += "/genuine";
    return coord;
}

void run_cell(CellResult& cell, const ExperimentConfig& cfg, const RepeatData& repeat, const Params& params,
              const std::string& digest, const std::filesystem::path& out_dir) {
    const std::string coord = cell_coordinates(cell);

    SampleSet train;
    if (cell.mixup_cell) {
        MixupConfig mix;
        mix.ratio = cell.ratio;
        mix.alpha = cell.alpha;
        mix.seed = derive_seed(cfg.seed, coord + "/mixup");
        const CentroidStats stats = centroid_stats(repeat.kc_train);
        MixupBatch batch = generate_mixups(repeat.kc_train, stats, mix);
        train = repeat.kc_train;
        train.insert(train.end(), batch.samples.begin(), batch.samples.end());
        batch.samples.clear();
        batch.provenance.clear();
        cell.mixup_stats = std::move(batch);
        cell.has_mixup_stats = true;
    } else {
        train = repeat.dataset.train;
    }

    const StrategyView view = apply_strategy(train, cell.strategy);
    cell.degraded_to_baseline = view.degraded_to_baseline;

    const std::uint64_t fit_seed = derive_seed(cfg.seed, coord + "/fit");
    const auto model = fit_model(cell.family, view, params, fit_seed);
    const ScoreTable table = build_score_table(*model, repeat.dataset.test);

    for (const auto mode : cfg.modes) {
        const auto curve = oscr_curve(table, mode);
        const auto roc = roc_auc(table, mode);

        EvalSummary summary;
        summary.auc = roc.auc;
        for (double target : cfg.ccr_targets) summary.ccr_at.emplace_back(target, ccr_at_fpr(curve, target));
        summary.mode = mode;
        summary.seed = fit_seed;
        summary.config_digest = digest;
        cell.evals.push_back(std::move(summary));

        const std::string oscr_name = cell.name + "_" + to_string(mode) + "_oscr.csv";
        const std::string roc_name = cell.name + "_" + to_string(mode) + "_roc.csv";
        export_oscr_csv(curve, (out_dir / oscr_name).string());
        export_roc_csv(roc.curve, (out_dir / roc_name).string());
        cell.oscr_files.push_back(oscr_name);
        cell.roc_files.push_back(roc_name);
    }
    cell.status = "ok";
}

json mixup_stats_json(const MixupBatch& batch) {
    const double rate =
        batch.attempted > 0 ? static_cast<double>(batch.accepted) / static_cast<double>(batch.attempted) : 0.0;
    return json{{"target", batch.target},
                {"attempted", batch.attempted},
                {"accepted", batch.accepted},
                {"acceptance_rate", rate},
                {"shortfall", batch.shortfall}};
}

json ccr_map_json(const EvalSummary& summary) {
    json out = json::object();
    for (const auto& [target, ccr] : summary.ccr_at) out[fmt_double(target)] = ccr;
    return out;
}

struct SummaryKey {
    std::string family;
    std::string strategy;
    std::string source;
    std::string mode;

    bool operator<(const SummaryKey& other) const {
        return std::tie(family, strategy, source, mode) < std::tie(other.family, other.strategy, other.source, other.mode);
    }
};

struct SummaryAgg {
    int count = 0;
    double auc_sum = 0.0;
    std::vector<double> ccr_sums;
};

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    validate_config(cfg);
    if (jobs < 1) throw InvalidArgument("run_experiment: jobs must be at least 1");
    const std::filesystem::path dir(out_dir);
    try {
        std::filesystem::create_directories(dir);
    } catch (const std::filesystem::filesystem_error& e) {
        throw Error(std::string("cannot create run directory: ") + e.what());
    }

    RunReport report;
    report.config = cfg;
    report.digest = config_digest(cfg);

    const SampleSet pool = cfg.dataset.from_file()
                               ? load_features(cfg.dataset.csv)
                               : synth_blobs(cfg.dataset.synthetic.classes, cfg.dataset.synthetic.per_class,
                                             cfg.dataset.synthetic.dim, cfg.dataset.synthetic.spread,
                                             derive_seed(cfg.seed, "pool"));

    std::vector<RepeatData> repeats;
    for (int r = 0; r < cfg.repeats; ++r) {
        SplitSpec spec = cfg.split;
        spec.seed = derive_seed(cfg.seed, "split/" + repeat_tag(r));
        RepeatData data;
        data.dataset = make_split(pool, spec);
        for (const auto& sample : data.dataset.train)
            if (!sample.is_unknown()) data.kc_train.push_back(sample);

        save_features(data.dataset.train, (dir / (repeat_tag(r) + "_train.csv")).string());
        SampleSet test_rows;
        test_rows.reserve(data.dataset.test.size());
        for (const auto& row : data.dataset.test) test_rows.push_back(row.sample);
        save_features(test_rows, (dir / (repeat_tag(r) + "_test.csv")).string());
        save_manifest(manifest_of(data.dataset, spec.seed), (dir / (repeat_tag(r) + "_manifest.txt")).string());
        repeats.push_back(std::move(data));
    }

    // One hyperparameter winner per repeat and family, found on the known
    // classes only and reused by every strategy and mixup cell.
    for (int r = 0; r < cfg.repeats; ++r)
        for (const auto& plan : cfg.families) {
            GridOutcome outcome;
            outcome.repeat = r;
            outcome.family = plan.family;
            try {
                outcome.result = grid_search(plan.family, plan.grid, repeats[r].dataset.train, cfg.folds,
                                             derive_seed(cfg.seed, "grid/" + repeat_tag(r) + "/" + to_string(plan.family)));
            } catch (const std::exception& e) {
                outcome.ok = false;
                outcome.error = e.what();
            }
            report.grids.push_back(std::move(outcome));
        }
    const auto grid_of = [&](int repeat, ModelFamily family) -> const GridOutcome& {
        for (const auto& outcome : report.grids)
            if (outcome.repeat == repeat && outcome.family == family) return outcome;
        throw Error("missing grid outcome");  // unreachable by construction
    };

    for (int r = 0; r < cfg.repeats; ++r)
        for (const auto& plan : cfg.families)
            for (const auto strategy : cfg.strategies) {
                CellResult genuine;
                genuine.repeat = r;
                genuine.family = plan.family;
                genuine.strategy = strategy;
                report.cells.push_back(std::move(genuine));
                if (strategy == StrategyKind::baseline) continue;  // mixups replace KUCs, which baseline ignores
                for (double ratio : cfg.mixup.ratios)
                    for (double alpha : cfg.mixup.alphas) {
                        CellResult cell;
                        cell.repeat = r;
                        cell.family = plan.family;
                        cell.strategy = strategy;
                        cell.mixup_cell = true;
                        cell.ratio = ratio;
                        cell.alpha = alpha;
                        report.cells.push_back(std::move(cell));
                    }
            }
    for (auto& cell : report.cells)
        cell.name = repeat_tag(cell.repeat) + "_" + to_string(cell.family) + "_" + to_string(cell.strategy) + "_" +
                    source_tag(cell);

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= report.cells.size()) return;
            CellResult& cell = report.cells[i];
            const auto start = std::chrono::steady_clock::now();
            if (!family_supports(cell.family, cell.strategy)) {
                cell.status = "skipped";
                cell.detail = std::string(to_string(cell.family)) + " does not support the " +
                              to_string(cell.strategy) + " strategy";
            } else {
                const GridOutcome& grid = grid_of(cell.repeat, cell.family);
                if (!grid.ok) {
                    cell.status = "error";
                    cell.detail = "grid search failed: " + grid.error;
                } else {
                    try {
                        run_cell(cell, cfg, repeats[cell.repeat], grid.result.best, report.digest, dir);
                    } catch (const std::exception& e) {
                        cell.status = "error";
                        cell.detail = e.what();
                    }
                }
            }
            cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }

    export_report(report, out_dir);
    return report;
}

void export_report(const RunReport& report, const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    try {
        std::filesystem::create_directories(dir);
    } catch (const std::filesystem::filesystem_error& e) {
        throw Error(std::string("cannot create run directory: ") + e.what());
    }

    json doc;
    doc["digest"] = report.digest;
    doc["config"] = canonical_config(report.config);

    json grids = json::array();
    for (const auto& outcome : report.grids) {
        json row{{"repeat", outcome.repeat}, {"family", to_string(outcome.family)}, {"ok", outcome.ok}};
        if (outcome.ok) {
            row["best"] = params_json(outcome.result.best);
            row["best_accuracy"] = outcome.result.best_accuracy;
            row["searched"] = outcome.result.searched;
            row["stratified"] = outcome.result.stratified;
            json scores = json::array();
            for (const auto& score : outcome.result.scores)
                scores.push_back(json{{"params", params_json(score.params)},
                                      {"accuracy", score.accuracy},
                                      {"error_folds", score.error_folds}});
            row["scores"] = std::move(scores);
        } else {
            row["error"] = outcome.error;
        }
        grids.push_back(std::move(row));
    }
    doc["grids"] = std::move(grids);

    json cells = json::array();
    for (const auto& cell : report.cells) {
        json row{{"repeat", cell.repeat},   {"family", to_string(cell.family)},
                 {"strategy", to_string(cell.strategy)}, {"source", cell.mixup_cell ? "mixup" : "genuine"},
                 {"name", cell.name},       {"status", cell.status}};
        if (cell.mixup_cell) {
            row["ratio"] = cell.ratio;
            row["alpha"] = cell.alpha;
        }
        if (!cell.detail.empty()) row["detail"] = cell.detail;
        if (cell.status == "ok") {
            row["degraded_to_baseline"] = cell.degraded_to_baseline;
            json evals = json::array();
            for (std::size_t m = 0; m < cell.evals.size(); ++m) {
                const EvalSummary& summary = cell.evals[m];
                json entry{{"mode", to_string(summary.mode)},
                           {"auc", summary.auc},
                           {"ccr_at", ccr_map_json(summary)},
                           {"oscr_csv", cell.oscr_files[m]},
                           {"roc_csv", cell.roc_files[m]}};
                evals.push_back(std::move(entry));
            }
            row["evals"] = std::move(evals);
            if (cell.has_mixup_stats) row["mixup_stats"] = mixup_stats_json(cell.mixup_stats);
        }
        cells.push_back(std::move(row));

        for (const auto& name : cell.oscr_files)
            if (!std::filesystem::exists(dir / name)) throw Error("missing referenced curve file " + name);
        for (const auto& name : cell.roc_files)
            if (!std::filesystem::exists(dir / name)) throw Error("missing referenced curve file " + name);
    }
    doc["cells"] = std::move(cells);

    // Cross-repeat means, then gains against the family's genuine-baseline
    // row evaluated under the same mode.
    std::vector<SummaryKey> order;
    std::map<SummaryKey, SummaryAgg> agg;
    for (const auto& cell : report.cells) {
        if (cell.status != "ok") continue;
        for (const auto& summary : cell.evals) {
            const SummaryKey key{to_string(cell.family), to_string(cell.strategy), source_tag(cell),
                                 to_string(summary.mode)};
            auto it = agg.find(key);
            if (it == agg.end()) {
                order.push_back(key);
                it = agg.emplace(key, SummaryAgg{}).first;
                it->second.ccr_sums.assign(summary.ccr_at.size(), 0.0);
            }
            it->second.count += 1;
            it->second.auc_sum += summary.auc;
            for (std::size_t k = 0; k < summary.ccr_at.size(); ++k) it->second.ccr_sums[k] += summary.ccr_at[k].second;
        }
    }
    json summary_rows = json::array();
    for (const auto& key : order) {
        const SummaryAgg& a = agg.at(key);
        const double auc = a.auc_sum / a.count;
        json ccr = json::object();
        for (std::size_t k = 0; k < a.ccr_sums.size(); ++k)
            ccr[fmt_double(report.config.ccr_targets[k])] = a.ccr_sums[k] / a.count;
        json row{{"family", key.family}, {"strategy", key.strategy}, {"source", key.source},
                 {"mode", key.mode},     {"auc", auc},               {"ccr_at", ccr},
                 {"repeats_ok", a.count}};
        const SummaryKey ref{key.family, to_string(StrategyKind::baseline), "genuine", key.mode};
        const auto it = agg.find(ref);
        if (it != agg.end()) {
            const SummaryAgg& b = it->second;
            row["auc_gain"] = auc - b.auc_sum / b.count;
            json gain = json::object();
            for (std::size_t k = 0; k < a.ccr_sums.size(); ++k)
                gain[fmt_double(report.config.ccr_targets[k])] = a.ccr_sums[k] / a.count - b.ccr_sums[k] / b.count;
            row["ccr_gain"] = std::move(gain);
        }
        summary_rows.push_back(std::move(row));
    }
    doc["summary"] = std::move(summary_rows);

    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        if (!out) throw Error("cannot write report.json");
        out << doc.dump(2) << "\n";
        if (!out) throw Error("failed writing report.json");
    }

    json timings;
    double total = 0.0;
    json rows = json::array();
    for (const auto& cell : report.cells) {
        total += cell.wall_seconds;
        rows.push_back(json{{"name", cell.name}, {"seconds", cell.wall_seconds}});
    }
    timings["cells"] = std::move(rows);
    timings["total_seconds"] = total;
    std::ofstream out(dir / "timings.json", std::ios::binary);
    if (!out) throw Error("cannot write timings.json");
    out << timings.dump(2) << "\n";
    if (!out) throw Error("failed writing timings.json");
}

}  // namespace lord
