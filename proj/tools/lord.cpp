// Command-line front end: split generation, single-model training and
// evaluation, mixup batch synthesis, full experiment sweeps, and report
// re-emission. Every command is deterministic in its --seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lord/common.hpp"
#include "lord/dataset.hpp"
#include "lord/evm.hpp"
#include "lord/experiment.hpp"
#include "lord/family.hpp"
#include "lord/metrics.hpp"
#include "lord/mixup.hpp"
#include "lord/model_io.hpp"
#include "lord/rng.hpp"
#include "lord/strategy.hpp"

namespace {

using nlohmann::json;

lord::SampleSet build_pool(const lord::ExperimentConfig& cfg) {
    if (cfg.dataset.from_file()) return lord::load_features(cfg.dataset.csv);
    return lord::synth_blobs(cfg.dataset.synthetic.classes, cfg.dataset.synthetic.per_class, cfg.dataset.synthetic.dim,
                             cfg.dataset.synthetic.spread, lord::derive_seed(cfg.seed, "pool"));
}

lord::Params parse_params(const std::vector<std::string>& args) {
    lord::Params params;
    for (const auto& arg : args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos || eq == 0) throw lord::ConfigError("--param expects key=value, got '" + arg + "'");
        try {
            params[arg.substr(0, eq)] = std::stod(arg.substr(eq + 1));
        } catch (const std::exception&) {
            throw lord::ConfigError("--param value in '" + arg + "' is not a number");
        }
    }
    return params;
}

int cmd_split(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
    lord::ExperimentConfig cfg = lord::load_experiment_config(config_path);
    if (seed) cfg.seed = *seed;
    lord::SplitSpec spec = cfg.split;
    spec.seed = lord::derive_seed(cfg.seed, "split/r0");  // matches repeat 0 of a sweep
    const lord::OpenSetDataset dataset = lord::make_split(build_pool(cfg), spec);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    lord::save_features(dataset.train, (dir / "train.csv").string());
    lord::SampleSet test_rows;
    for (const auto& row : dataset.test) test_rows.push_back(row.sample);
    lord::save_features(test_rows, (dir / "test.csv").string());
    lord::save_manifest(lord::manifest_of(dataset, spec.seed), (dir / "manifest.txt").string());

    std::cout << "wrote " << dataset.train.size() << " training and " << dataset.test.size() << " test rows ("
              << dataset.known_classes.size() << " known, " << dataset.kuc_classes.size() << " known-unknown, "
              << dataset.uuc_classes.size() << " unknown-unknown classes) to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& train_csv, const std::string& family_name, const std::string& strategy_name,
              const std::vector<std::string>& param_args, std::uint64_t seed, const std::string& out_path) {
    const lord::SampleSet train = lord::load_features(train_csv);
    const lord::StrategyView view = lord::apply_strategy(train, lord::strategy_from_string(strategy_name));
    if (view.degraded_to_baseline)
        std::cerr << "note: no unknown-marked training rows; the model degrades to baseline\n";
    const auto model =
        lord::fit_model(lord::family_from_string(family_name), view, parse_params(param_args), seed);
    lord::save_model(*model, out_path);
    std::cout << "trained " << family_name << "/" << strategy_name << " on " << train.size() << " rows, saved to "
              << out_path << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& test_csv, const std::string& manifest_path,
             const std::string& mode_name, const std::vector<double>& ccr_targets, const std::string& out_dir,
             const std::string& grid_out, int grid_res) {
    const auto model = lord::load_model(model_path);
    const lord::SampleSet test_rows = lord::load_features(test_csv);
    const lord::SplitManifest manifest = lord::load_manifest(manifest_path);
    const std::vector<lord::TestSample> test = lord::tag_test_samples(test_rows, manifest);
    const lord::EvalMode mode = lord::eval_mode_from_string(mode_name);

    const lord::ScoreTable table = lord::build_score_table(*model, test);
    const auto curve = lord::oscr_curve(table, mode);
    const auto roc = lord::roc_auc(table, mode);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    lord::export_oscr_csv(curve, (dir / "oscr.csv").string());
    lord::export_roc_csv(roc.curve, (dir / "roc.csv").string());

    lord::EvalSummary summary;
    summary.auc = roc.auc;
    summary.mode = mode;
    summary.seed = manifest.seed;
    for (double target : ccr_targets) summary.ccr_at.emplace_back(target, lord::ccr_at_fpr(curve, target));
    lord::save_eval_summary(summary, (dir / "summary.json").string());

    if (!grid_out.empty()) {
        if (model->dim() != 2) throw lord::InvalidArgument("--grid-out needs a 2-dimensional model");
        double lo[2] = {0.0, 0.0}, hi[2] = {0.0, 0.0};
        bool first = true;
        for (const auto& row : test_rows) {
            for (int d = 0; d < 2; ++d) {
                if (first || row.features[d] < lo[d]) lo[d] = row.features[d];
                if (first || row.features[d] > hi[d]) hi[d] = row.features[d];
            }
            first = false;
        }
        if (first) throw lord::InvalidArgument("--grid-out needs a non-empty test set");
        const double mx = 0.1 * (hi[0] - lo[0]), my = 0.1 * (hi[1] - lo[1]);
        lord::export_confidence_grid(*model, lo[0] - mx, hi[0] + mx, lo[1] - my, hi[1] + my, grid_res, grid_out);
    }

    std::cout << lord::to_string(mode) << " auc " << lord::fmt_double(roc.auc);
    for (const auto& [target, ccr] : summary.ccr_at)
        std::cout << ", ccr@" << lord::fmt_double(target) << " " << lord::fmt_double(ccr);
    std::cout << "\n";
    return 0;
}

int cmd_mixup(const std::string& train_csv, double ratio, double alpha, std::uint64_t seed, const std::string& out_path,
              const std::string& stats_path) {
    const lord::SampleSet train = lord::load_features(train_csv);
    lord::SampleSet kc;
    for (const auto& sample : train)
        if (!sample.is_unknown()) kc.push_back(sample);
    lord::MixupConfig cfg;
    cfg.ratio = ratio;
    cfg.alpha = alpha;
    cfg.seed = seed;
    const lord::MixupBatch batch = lord::generate_mixups(kc, lord::centroid_stats(kc), cfg);
    lord::save_features(batch.samples, out_path);
    if (!stats_path.empty()) lord::save_mixup_stats(batch, stats_path);
    std::cout << "accepted " << batch.accepted << "/" << batch.target << " mixups in " << batch.attempted
              << " attempts" << (batch.shortfall ? " (shortfall)" : "") << ", saved to " << out_path << "\n";
    return batch.shortfall ? 1 : 0;
}

int cmd_sweep(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir, int jobs) {
    lord::ExperimentConfig cfg = lord::load_experiment_config(config_path);
    if (seed) cfg.seed = *seed;
    const lord::RunReport report = lord::run_experiment(cfg, out_dir, jobs);
    int ok = 0, skipped = 0, failed = 0;
    for (const auto& cell : report.cells) {
        if (cell.status == "ok")
            ++ok;
        else if (cell.status == "skipped")
            ++skipped;
        else
            ++failed;
    }
    std::cout << "sweep " << report.digest << ": " << ok << " cells ok, " << skipped << " skipped, " << failed
              << " failed; report at " << (std::filesystem::path(out_dir) / "report.json").string() << "\n";
    for (const auto& cell : report.cells)
        if (cell.status == "error") std::cerr << "cell " << cell.name << " failed: " << cell.detail << "\n";
    return report.all_ok() ? 0 : 1;
}

int cmd_report(const std::string& run_dir, const std::string& out_dir) {
    const std::filesystem::path dir(run_dir);
    std::ifstream in(dir / "report.json", std::ios::binary);
    if (!in) throw lord::Error("cannot open " + (dir / "report.json").string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw lord::ParseError(std::string("report.json: ") + e.what());
    }

    for (const auto& cell : doc.at("cells")) {
        if (cell.at("status") != "ok") continue;
        for (const auto& eval : cell.at("evals"))
            for (const char* key : {"oscr_csv", "roc_csv"}) {
                const std::string name = eval.at(key).get<std::string>();
                if (!std::filesystem::exists(dir / name))
                    throw lord::Error("report references missing curve file " + name);
            }
    }

    const std::filesystem::path target = out_dir.empty() ? dir : std::filesystem::path(out_dir);
    std::filesystem::create_directories(target);
    {
        std::ofstream out(target / "report.json", std::ios::binary);
        if (!out) throw lord::Error("cannot write " + (target / "report.json").string());
        out << doc.dump(2) << "\n";
    }

    std::printf("%-8s %-10s %-12s %-10s %12s %12s\n", "family", "strategy", "source", "mode", "auc", "auc_gain");
    for (const auto& row : doc.at("summary")) {
        const std::string gain = row.contains("auc_gain") ? lord::fmt_double(row.at("auc_gain").get<double>()) : "-";
        std::printf("%-8s %-10s %-12s %-10s %12s %12s\n", row.at("family").get<std::string>().c_str(),
                    row.at("strategy").get<std::string>().c_str(), row.at("source").get<std::string>().c_str(),
                    row.at("mode").get<std::string>().c_str(), lord::fmt_double(row.at("auc").get<double>()).c_str(),
                    gain.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"open-set recognition workbench: backgrounds, strategies, and benchmarks"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", train_csv, test_csv, manifest_path, model_path, out_path;
    std::string family_name, strategy_name = "baseline", mode_name = "biased", grid_out, stats_path, run_dir;
    std::vector<std::string> param_args;
    std::vector<double> ccr_targets = {0.001, 0.01, 0.1};
    std::uint64_t seed_value = 0;
    bool seed_given = false;
    double ratio = 1.0, alpha = 0.0;
    int jobs = 1, grid_res = 200;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_value, "Override the master seed")->each([&](const std::string&) {
            seed_given = true;
        });
    };

    auto* split = app.add_subcommand("split", "Generate a train/test split from a config's dataset section");
    split->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    split->add_option("--out-dir", out_dir, "Output directory");
    add_seed(split);

    auto* train = app.add_subcommand("train", "Train one model on a feature CSV");
    train->add_option("--train", train_csv, "Training feature CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--family", family_name, "Model family (osnn|linear|evm|cevm|wsvm|pisvm)")->required();
    train->add_option("--strategy", strategy_name, "Training strategy (baseline|spl|mpl|kvr)");
    train->add_option("--param", param_args, "Hyperparameter override key=value (repeatable)");
    train->add_option("--out", out_path, "Model output path")->required();
    add_seed(train);

    auto* eval = app.add_subcommand("eval", "Evaluate a saved model on a tagged test set");
    eval->add_option("--model", model_path, "Saved model file")->required()->check(CLI::ExistingFile);
    eval->add_option("--test", test_csv, "Test feature CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--manifest", manifest_path, "Split manifest with class roles")->required()->check(CLI::ExistingFile);
    eval->add_option("--mode", mode_name, "Evaluation mode (biased|unbiased)");
    eval->add_option("--ccr", ccr_targets, "False-positive-rate targets for CCR readouts");
    eval->add_option("--out-dir", out_dir, "Output directory");
    eval->add_option("--grid-out", grid_out, "Also export a 2-D confidence raster CSV here");
    eval->add_option("--grid-res", grid_res, "Raster resolution per axis")->check(CLI::PositiveNumber);

    auto* mixup = app.add_subcommand("mixup", "Synthesize unknown-marked mixup samples from known classes");
    mixup->add_option("--train", train_csv, "Training feature CSV (unknown rows are ignored)")
        ->required()
        ->check(CLI::ExistingFile);
    mixup->add_option("--ratio", ratio, "Target count as a fraction of the known training size");
    mixup->add_option("--alpha", alpha, "Occupation filter scale (0 disables the filter)");
    mixup->add_option("--out", out_path, "Batch output CSV")->required();
    mixup->add_option("--stats", stats_path, "Also write acceptance statistics JSON here");
    add_seed(mixup);

    auto* sweep = app.add_subcommand("sweep", "Run the full experiment grid from a config");
    sweep->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out-dir", out_dir, "Run directory for all artifacts");
    sweep->add_option("--jobs", jobs, "Worker threads for independent cells")->check(CLI::PositiveNumber);
    add_seed(sweep);

    auto* report = app.add_subcommand("report", "Validate and re-emit a run's report, printing the summary");
    report->add_option("--run", run_dir, "Run directory containing report.json")->required()->check(CLI::ExistingDirectory);
    report->add_option("--out-dir", out_path, "Re-emit into this directory instead of in place");

    CLI11_PARSE(app, argc, argv);

    const std::optional<std::uint64_t> seed_opt =
        seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt;
    try {
        if (app.got_subcommand(split)) return cmd_split(config_path, seed_opt, out_dir);
        if (app.got_subcommand(train))
            return cmd_train(train_csv, family_name, strategy_name, param_args, seed_value, out_path);
        if (app.got_subcommand(eval))
            return cmd_eval(model_path, test_csv, manifest_path, mode_name, ccr_targets, out_dir, grid_out, grid_res);
        if (app.got_subcommand(mixup)) return cmd_mixup(train_csv, ratio, alpha, seed_value, out_path, stats_path);
        if (app.got_subcommand(sweep)) return cmd_sweep(config_path, seed_opt, out_dir, jobs);
        if (app.got_subcommand(report)) return cmd_report(run_dir, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
