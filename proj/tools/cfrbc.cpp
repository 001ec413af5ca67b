// Command-line front end: train, eval, predict and experiment.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfrbc/model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cfrbc;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Bad invocation or missing input; mapped to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::istringstream in(text);
        double start = 0, stop = 0, step = 0;
        char c1 = 0, c2 = 0;
        if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0) {
            throw UsageError("--grid expects start:stop:step or a comma list");
        }
        const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
        return grid;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            grid.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("--grid: cannot parse '" + item + "'");
        }
    }
    return grid;
}

/// Flags shared by the commands that fit models. Only flags given on the
/// command line override the --config file.
struct FitFlags {
    std::string data;
    std::string label;
    std::string config_file;
    std::string kind;
    double test_fraction = 0;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::size_t generations = 0;
    std::size_t population = 0;
    double penalty_weight = 0;
    bool raw_penalty = false;
    std::string confidence;
    double lower_cap = 0;
    std::string grid;
    double order_alpha = 0;
    double order_beta = 0;
    std::string out;
    std::size_t repeats = 0;

    std::map<std::string, CLI::Option*> opts;

    void attach(CLI::App& cmd, bool with_repeats) {
        const ExperimentConfig d;
        opts["data"] = cmd.add_option("--data", data, "Input CSV (header row required)")->required();
        opts["label"] = cmd.add_option("--label", label, "Label column name (default: last column)");
        opts["config"] = cmd.add_option("--config", config_file,
                                        "JSON config file; explicit flags override it");
        opts["kind"] = cmd.add_option("--kind", kind, "Fuzzy set type")
                           ->check(CLI::IsMember({"t1", "ivt2"}))
                           ->default_str("t1");
        opts["test-fraction"] = cmd.add_option("--test-fraction", test_fraction, "Held-out fraction")
                                    ->default_str(std::to_string(d.split.test_fraction));
        opts["folds"] = cmd.add_option("--folds", folds, "Cross-conformal calibration folds")
                            ->default_str(std::to_string(d.split.calibration_folds));
        opts["seed"] = cmd.add_option("--seed", seed, "Seed for the split and the GA")->default_str("0");
        opts["generations"] = cmd.add_option("--generations", generations, "GA generations")
                                  ->default_str(std::to_string(d.ga.generations));
        opts["population"] = cmd.add_option("--population", population, "GA population size")
                                 ->default_str(std::to_string(d.ga.population_size));
        opts["penalty-weight"] =
            cmd.add_option("--penalty-weight", penalty_weight, "Weight of the set-size fitness penalty")
                ->default_str("0");
        opts["raw-penalty"] = cmd.add_flag("--raw-penalty", raw_penalty,
                                           "Do not normalize the penalty by N*(C-1)");
        opts["confidence"] =
            cmd.add_option("--confidence", confidence, "Rule confidence denominator")
                ->check(CLI::IsMember({"all-samples", "all-rules"}))
                ->default_str("all-samples");
        opts["lower-cap"] = cmd.add_option("--lower-cap", lower_cap, "IVT2 lower membership cap")
                                ->default_str("0.8");
        opts["grid"] = cmd.add_option("--grid", grid, "Significance grid, start:stop:step or a,b,c")
                           ->default_str("0.05:0.95:0.05");
        opts["order-alpha"] = cmd.add_option("--order-alpha", order_alpha, "Admissible order alpha")
                                  ->default_str("0.5");
        opts["order-beta"] = cmd.add_option("--order-beta", order_beta, "Admissible order beta")
                                 ->default_str("1");
        opts["out"] = cmd.add_option("--out", out, "Output directory")->default_str(".");
        if (with_repeats) {
            opts["repeats"] = cmd.add_option("--repeats", repeats, "Train/evaluate cycles")
                                  ->default_str(std::to_string(d.repeats));
        }
    }

    [[nodiscard]] bool given(const std::string& name) const {
        const auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }

    [[nodiscard]] ExperimentConfig resolve() const {
        ExperimentConfig c;
        if (given("config")) {
            std::ifstream in(config_file);
            if (!in) throw UsageError("cannot open config file " + config_file);
            merge_config(c, json::parse(in));
        }
        c.data_path = data;
        if (given("label")) c.label = label;
        if (given("kind")) c.kind = parse_fuzzy_kind(kind);
        if (given("test-fraction")) c.split.test_fraction = test_fraction;
        if (given("folds")) c.split.calibration_folds = folds;
        if (given("seed")) c.set_seed(seed);
        if (given("generations")) c.ga.generations = generations;
        if (given("population")) c.ga.population_size = population;
        if (given("penalty-weight")) c.ga.penalty_weight = penalty_weight;
        if (given("raw-penalty")) c.ga.raw_penalty = raw_penalty;
        if (given("confidence")) c.ga.confidence = parse_confidence_norm(confidence);
        if (given("lower-cap")) c.lower_cap = lower_cap;
        if (given("grid")) c.grid = parse_grid(grid);
        if (given("order-alpha")) c.order.alpha = order_alpha;
        if (given("order-beta")) c.order.beta = order_beta;
        if (given("out")) c.out_dir = out;
        if (given("repeats")) c.repeats = repeats;
        c.validate();
        return c;
    }
};

Dataset load_input(const std::string& path, const std::string& label) {
    if (!fs::exists(path)) throw UsageError("dataset not found: " + path);
    return load_csv(path, label.empty() ? LabelColumn{} : LabelColumn{label});
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::create_directories(dir);
    return fs::path(dir);
}

/// Writes every artifact or none of them.
void write_all(const std::vector<std::pair<fs::path, std::string>>& files) {
    std::vector<fs::path> written;
    try {
        for (const auto& [path, content] : files) {
            write_file_atomic(path, content);
            written.push_back(path);
        }
    } catch (...) {
        for (const auto& p : written) fs::remove(p);
        throw;
    }
}

std::string csv_with_config(const SweepResult& sweep, const json& config) {
    const std::string comment = "config: " + config.dump();
    return sweep_to_csv(sweep, std::span<const std::string>(&comment, 1));
}

int cmd_train(const FitFlags& flags) {
    const ExperimentConfig config = flags.resolve();
    const Dataset raw = load_input(config.data_path, config.label);
    const auto run = fit_on_split(raw, config);
    const fs::path dir = prepare_out_dir(config.out_dir);
    write_all({{dir / "model.json", to_json(run.model).dump(2) + "\n"}});
    std::cout << run.model.rule_base.describe(run.model.feature_names, run.model.class_names);
    std::cout << "calibration scores: " << run.model.calibration.size()
              << ", train rows: " << run.split.train_indices.size()
              << ", test rows: " << run.split.test_indices.size() << '\n';
    std::cout << "wrote " << (dir / "model.json").string() << '\n';
    return 0;
}

struct EvalFlags {
    std::string model;
    std::string data;
    std::string split_mode = "model";
    std::string grid;
    std::optional<double> significance;
    std::string out = ".";
};

int cmd_eval(const EvalFlags& flags) {
    if (!fs::exists(flags.model)) throw UsageError("model not found: " + flags.model);
    const Model model = load_model(flags.model);
    std::vector<double> grid = model.config.grid;
    if (flags.significance) grid = {*flags.significance};
    else if (!flags.grid.empty()) grid = parse_grid(flags.grid);
    validate_grid(grid);

    Dataset test;
    if (flags.split_mode == "model") {
        test = held_out(model, load_input(flags.data, model.config.label));
    } else {
        if (!fs::exists(flags.data)) throw UsageError("dataset not found: " + flags.data);
        const FeatureTable t = load_features(flags.data, model.feature_names, model.class_names);
        std::vector<int> labels;
        for (const auto& y : t.labels) {
            if (!y) throw DataError("evaluation data must carry a label column");
            labels.push_back(*y);
        }
        test = model.normalization.apply(
            Dataset(t.values, t.n_features, labels, model.class_names, model.feature_names));
    }

    const double acc = accuracy(model.rule_base, test, model.order());
    const SweepResult sweep = sweep_significance(model.rule_base, model.calibration, test, grid);
    const json config = to_json(model.config);
    json summary{{"config", config},
                 {"model", fs::absolute(flags.model).string()},
                 {"summary", to_json(RunSummary::from_runs(flags.data,
                                                           std::string(to_string(model.rule_base.kind())),
                                                           {acc}))},
                 {"test_rows", test.rows()},
                 {"sweep", to_json(sweep)}};
    const fs::path dir = prepare_out_dir(flags.out);
    write_all({{dir / "summary.json", summary.dump(2) + "\n"},
               {dir / "sweep.csv", csv_with_config(sweep, config)}});
    std::cout << "accuracy " << acc << " on " << test.rows() << " rows; wrote "
              << (dir / "summary.json").string() << " and " << (dir / "sweep.csv").string() << '\n';
    return 0;
}

struct PredictFlags {
    std::string model;
    std::string data;
    double significance = 0.1;
};

int cmd_predict(const PredictFlags& flags) {
    if (!fs::exists(flags.model)) throw UsageError("model not found: " + flags.model);
    if (!fs::exists(flags.data)) throw UsageError("input not found: " + flags.data);
    const Model model = load_model(flags.model);
    const FeatureTable t = load_features(flags.data, model.feature_names, model.class_names);
    const Interval threshold = model.calibration.threshold(flags.significance);
    std::ostringstream out;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const auto s = model.scores(t.row(i));
        const auto winner = classify(s.scores, model.order());
        json set = json::array();
        for (int c : classes_above(s.scores, threshold, model.order())) {
            set.push_back(model.class_names[static_cast<std::size_t>(c)]);
        }
        json scores = json::object();
        for (std::size_t c = 0; c < s.scores.size(); ++c) {
            scores[model.class_names[c]] = {s.scores[c].lower(), s.scores[c].upper()};
        }
        json line{{"row", i},
                  {"winner", winner ? json(model.class_names[static_cast<std::size_t>(*winner)])
                                    : json(nullptr)},
                  {"set", set},
                  {"rules", rules_above(s.associations, threshold, model.order())},
                  {"scores", scores},
                  {"significance", flags.significance}};
        out << line.dump() << '\n';
    }
    std::cout << out.str();
    return 0;
}

int cmd_experiment(const FitFlags& flags) {
    const ExperimentConfig config = flags.resolve();
    const Dataset raw = load_input(config.data_path, config.label);
    const auto result = run_experiment(raw, config, fs::path(config.data_path).stem().string());
    const json jconfig = to_json(config);
    json sweeps = json::array();
    for (const auto& s : result.sweeps) sweeps.push_back(to_json(s));
    json summary{{"config", jconfig},
                 {"summary", to_json(result.summary)},
                 {"mean_sweep", to_json(result.mean_sweep)},
                 {"sweeps", sweeps}};
    const fs::path dir = prepare_out_dir(config.out_dir);
    write_all({{dir / "summary.json", summary.dump(2) + "\n"},
               {dir / "sweep.csv", csv_with_config(result.mean_sweep, jconfig)}});
    std::cout << result.summary.dataset << " " << result.summary.kind << ": accuracy "
              << result.summary.accuracy << " +- " << result.summary.accuracy_std << " over "
              << config.repeats << " runs\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal fuzzy rule-based classification (Type-1 and interval Type-2)"};
    app.require_subcommand(1);
    app.footer("Environment: CONFORMAL_FRBC_THREADS caps worker threads.");

    FitFlags train_flags;
    auto* train = app.add_subcommand("train", "Evolve a rule base, calibrate it and write model.json");
    train_flags.attach(*train, false);

    EvalFlags eval_flags;
    auto* eval = app.add_subcommand("eval", "Accuracy and significance sweep of a trained model");
    eval->add_option("--model", eval_flags.model, "Model file written by train")->required();
    eval->add_option("--data", eval_flags.data, "CSV with labels")->required();
    eval->add_option("--split", eval_flags.split_mode,
                     "'model': evaluate the held-out rows of the model's split; 'none': all rows")
        ->check(CLI::IsMember({"model", "none"}))
        ->default_str("model");
    eval->add_option("--grid", eval_flags.grid, "Significance grid (default: the model's)");
    eval->add_option("--significance", eval_flags.significance, "Evaluate a single level");
    eval->add_option("--out", eval_flags.out, "Output directory")->default_str(".");

    PredictFlags predict_flags;
    auto* predict = app.add_subcommand("predict", "Prediction sets as JSON lines on stdout");
    predict->add_option("--model", predict_flags.model, "Model file written by train")->required();
    predict->add_option("--data", predict_flags.data, "CSV with the model's feature columns")->required();
    predict->add_option("--significance", predict_flags.significance, "Significance level")
        ->check(CLI::Range(0.0, 1.0))
        ->default_str("0.1");

    FitFlags exp_flags;
    auto* experiment = app.add_subcommand(
        "experiment", "Repeated split/train/evaluate cycles; mean accuracy and mean sweep");
    exp_flags.attach(*experiment, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*train) return cmd_train(train_flags);
        if (*eval) return cmd_eval(eval_flags);
        if (*predict) return cmd_predict(predict_flags);
        if (*experiment) return cmd_experiment(exp_flags);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
