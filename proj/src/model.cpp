#include "cfrbc/model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfrbc {

using nlohmann::json;

void ExperimentConfig::set_seed(std::uint64_t seed) {
    split.seed = seed;
    ga.seed = seed;
}

void ExperimentConfig::validate() const {
    ga.validate();
    split.validate();
    order.validate();
    validate_grid(grid);
    if (!(lower_cap > 0.0 && lower_cap <= 1.0)) {
        throw std::invalid_argument("lower membership cap must lie in (0,1]");
    }
    if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
}

ClassScores Model::scores(std::span<const double> raw_row) const {
    if (raw_row.size() != feature_names.size()) {
        throw DataError("expected " + std::to_string(feature_names.size()) + " features, got " +
                        std::to_string(raw_row.size()));
    }
    std::vector<double> row(raw_row.begin(), raw_row.end());
    normalization.apply_inplace(row);
    return rule_base.class_scores(row, order());
}

std::uint64_t fold_seed(std::uint64_t base, std::size_t fold) {
    // splitmix64 finalizer over (base, fold)
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(fold) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Model fit_model(const Dataset& raw_train, std::span<const Fold> folds, const ExperimentConfig& config) {
    config.validate();
    auto [train, params] = normalize(raw_train);

    const Trainer trainer = [&config](const Dataset& fit, std::size_t fold) {
        GAConfig ga = config.ga;
        ga.seed = fold_seed(config.ga.seed, fold);
        const auto parts = build_partitions(fit, config.kind, config.lower_cap);
        return evolve(fit, parts, ga, config.order).rule_base;
    };
    auto calibration = calibrate_cross(train, folds, trainer, config.order);

    const auto parts = build_partitions(train, config.kind, config.lower_cap);
    auto rb = evolve(train, parts, config.ga, config.order).rule_base;

    return Model{config,           raw_train.feature_names(), raw_train.class_names(),
                 std::move(params), std::move(rb),             std::move(calibration)};
}

SplitRun fit_on_split(const Dataset& raw, const ExperimentConfig& config) {
    Split s = split(raw, config.split);
    Model m = fit_model(s.train(raw), s.folds, config);
    return {std::move(m), std::move(s)};
}

Dataset held_out(const Model& model, const Dataset& raw) {
    if (raw.feature_names() != model.feature_names) {
        throw DataError("schema mismatch: dataset features do not match the model's " +
                        std::to_string(model.feature_names.size()) + " features");
    }
    if (raw.class_names() != model.class_names) {
        throw DataError("schema mismatch: dataset classes differ from the model's classes");
    }
    const Split s = split(raw, model.config.split);
    return model.normalization.apply(s.test(raw));
}

SweepResult average_sweeps(std::span<const SweepResult> sweeps) {
    if (sweeps.empty()) throw std::invalid_argument("no sweeps to average");
    SweepResult out;
    out.samples = sweeps.front().samples;
    out.classes = sweeps.front().classes;
    const auto n = static_cast<double>(sweeps.size());
    for (std::size_t l = 0; l < sweeps.front().levels.size(); ++l) {
        LevelMetrics m;
        m.significance = sweeps.front().levels[l].significance;
        m.threshold = sweeps.front().levels[l].threshold;
        for (const auto& s : sweeps) {
            const auto& x = s.levels.at(l);
            m.mean_set_size += x.mean_set_size / n;
            m.std_set_size += x.std_set_size / n;
            m.nonempty_frac += x.nonempty_frac / n;
            m.coverage += x.coverage / n;
            m.mean_rule_f1 += x.mean_rule_f1 / n;
        }
        out.levels.push_back(m);
    }
    return out;
}

ExperimentResult run_experiment(const Dataset& raw, const ExperimentConfig& config,
                                const std::string& dataset_name) {
    config.validate();
    std::vector<double> accuracies;
    ExperimentResult result;
    for (std::size_t r = 0; r < config.repeats; ++r) {
        ExperimentConfig c = config;
        c.set_seed(config.split.seed + r);
        const auto run = fit_on_split(raw, c);
        const Dataset test = run.model.normalization.apply(run.split.test(raw));
        accuracies.push_back(accuracy(run.model.rule_base, test, run.model.order()));
        result.sweeps.push_back(sweep_significance(run.model.rule_base, run.model.calibration, test,
                                                   config.grid));
    }
    result.summary = RunSummary::from_runs(dataset_name, std::string(to_string(config.kind)),
                                           std::move(accuracies));
    result.mean_sweep = average_sweeps(result.sweeps);
    return result;
}

// -- JSON --------------------------------------------------------------------

namespace {

json interval_json(const Interval& x) { return json::array({x.lower(), x.upper()}); }

Interval interval_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

Label label_from(const std::string& s) {
    if (s == "low") return Label::Low;
    if (s == "medium") return Label::Medium;
    if (s == "high") return Label::High;
    throw std::invalid_argument("unknown linguistic label '" + s + "'");
}

constexpr const char* kModelFormat = "conformal-frbc-model/1";

}  // namespace

json to_json(const ExperimentConfig& c) {
    return json{
        {"data", c.data_path},
        {"label", c.label},
        {"kind", std::string(to_string(c.kind))},
        {"lower_cap", c.lower_cap},
        {"ga",
         {{"population_size", c.ga.population_size},
          {"generations", c.ga.generations},
          {"mutation_rate", c.ga.mutation_rate},
          {"crossover_rate", c.ga.crossover_rate},
          {"tournament_size", c.ga.tournament_size},
          {"max_rules", c.ga.max_rules},
          {"max_antecedents", c.ga.max_antecedents},
          {"penalty_weight", c.ga.penalty_weight},
          {"raw_penalty", c.ga.raw_penalty},
          {"confidence", to_string(c.ga.confidence)},
          {"seed", c.ga.seed}}},
        {"split",
         {{"test_fraction", c.split.test_fraction},
          {"folds", c.split.calibration_folds},
          {"seed", c.split.seed}}},
        {"grid", c.grid},
        {"order", {{"alpha", c.order.alpha}, {"beta", c.order.beta}}},
        {"out", c.out_dir},
        {"repeats", c.repeats},
    };
}

void merge_config(ExperimentConfig& c, const json& j) {
    auto take = [](const json& obj, const char* key, auto& field) {
        if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    take(j, "data", c.data_path);
    take(j, "label", c.label);
    if (j.contains("kind")) c.kind = parse_fuzzy_kind(j.at("kind").get<std::string>());
    take(j, "lower_cap", c.lower_cap);
    if (j.contains("ga")) {
        const auto& g = j.at("ga");
        take(g, "population_size", c.ga.population_size);
        take(g, "generations", c.ga.generations);
        take(g, "mutation_rate", c.ga.mutation_rate);
        take(g, "crossover_rate", c.ga.crossover_rate);
        take(g, "tournament_size", c.ga.tournament_size);
        take(g, "max_rules", c.ga.max_rules);
        take(g, "max_antecedents", c.ga.max_antecedents);
        take(g, "penalty_weight", c.ga.penalty_weight);
        take(g, "raw_penalty", c.ga.raw_penalty);
        if (g.contains("confidence")) {
            c.ga.confidence = parse_confidence_norm(g.at("confidence").get<std::string>());
        }
        take(g, "seed", c.ga.seed);
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        take(s, "test_fraction", c.split.test_fraction);
        take(s, "folds", c.split.calibration_folds);
        take(s, "seed", c.split.seed);
    }
    take(j, "grid", c.grid);
    if (j.contains("order")) {
        take(j.at("order"), "alpha", c.order.alpha);
        take(j.at("order"), "beta", c.order.beta);
    }
    take(j, "out", c.out_dir);
    take(j, "repeats", c.repeats);
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    merge_config(c, j);
    return c;
}

json to_json(const Model& m) {
    json knots = json::array();
    for (const auto& lv : m.rule_base.partitions().variables) knots.push_back(lv.knots());
    json rules = json::array();
    for (const auto& r : m.rule_base.rules()) {
        json ants = json::array();
        for (const auto& a : r.antecedents) {
            ants.push_back({{"feature", a.feature}, {"label", std::string(to_string(a.label))}});
        }
        rules.push_back({{"antecedents", ants},
                         {"consequent", r.consequent},
                         {"dominance", interval_json(r.dominance)}});
    }
    json scores = json::array();
    for (const auto& s : m.calibration.scores()) scores.push_back(interval_json(s));
    return json{
        {"format", kModelFormat},
        {"config", to_json(m.config)},
        {"features", m.feature_names},
        {"classes", m.class_names},
        {"normalization", {{"means", m.normalization.means}, {"stds", m.normalization.stds}}},
        {"partitions",
         {{"kind", std::string(to_string(m.rule_base.kind()))},
          {"lower_cap", m.rule_base.partitions().lower_cap},
          {"knots", knots}}},
        {"order", {{"alpha", m.order().alpha}, {"beta", m.order().beta}}},
        {"rules", rules},
        {"calibration", {{"scores", scores}}},
    };
}

Model model_from_json(const json& j) {
    if (j.value("format", "") != kModelFormat) {
        throw std::invalid_argument("not a conformal-frbc model file");
    }
    Model m;
    m.config = config_from_json(j.at("config"));
    m.feature_names = j.at("features").get<std::vector<std::string>>();
    m.class_names = j.at("classes").get<std::vector<std::string>>();
    m.normalization.means = j.at("normalization").at("means").get<std::vector<double>>();
    m.normalization.stds = j.at("normalization").at("stds").get<std::vector<double>>();

    const auto& p = j.at("partitions");
    const auto knots = p.at("knots").get<std::vector<QuantileKnots>>();
    if (knots.size() != m.feature_names.size() || m.normalization.means.size() != knots.size() ||
        m.normalization.stds.size() != knots.size()) {
        throw std::invalid_argument("model file: feature count mismatch");
    }
    auto parts = partitions_from_knots(knots, parse_fuzzy_kind(p.at("kind").get<std::string>()),
                                       p.at("lower_cap").get<double>());

    std::vector<Rule> rules;
    for (const auto& rj : j.at("rules")) {
        Rule r;
        for (const auto& a : rj.at("antecedents")) {
            r.antecedents.push_back(
                {a.at("feature").get<std::size_t>(), label_from(a.at("label").get<std::string>())});
        }
        r.consequent = rj.at("consequent").get<int>();
        r.dominance = interval_from(rj.at("dominance"));
        rules.push_back(std::move(r));
    }
    m.rule_base = RuleBase(std::move(parts), std::move(rules), m.class_names.size(), m.config.ga.confidence);

    const OrderParams order{j.at("order").at("alpha").get<double>(),
                            j.at("order").at("beta").get<double>()};
    std::vector<Interval> scores;
    for (const auto& s : j.at("calibration").at("scores")) scores.push_back(interval_from(s));
    m.calibration = ConformalCalibration(std::move(scores), order);
    return m;
}

json to_json(const SweepResult& s) {
    json levels = json::array();
    for (const auto& l : s.levels) {
        json rules = json::array();
        for (const auto& r : l.rules) {
            rules.push_back({{"tp", r.tp},
                             {"fp", r.fp},
                             {"fn", r.fn},
                             {"precision", r.precision()},
                             {"recall", r.recall()},
                             {"f1", r.f1()}});
        }
        levels.push_back({{"significance", l.significance},
                          {"threshold", interval_json(l.threshold)},
                          {"mean_set_size", l.mean_set_size},
                          {"std_set_size", l.std_set_size},
                          {"nonempty_frac", l.nonempty_frac},
                          {"coverage", l.coverage},
                          {"mean_rule_f1", l.mean_rule_f1},
                          {"rules", rules}});
    }
    json out{{"samples", s.samples},
             {"classes", s.classes},
             {"levels", levels},
             {"rule_f1_definition",
              "TP: rule in conformal rule set and true class == consequent; FP: in set, true class "
              "!= consequent; FN: not in set, true class == consequent"}};
    out["first_all_nonempty"] = s.first_all_nonempty ? json(*s.first_all_nonempty) : json(nullptr);
    out["last_all_nonempty"] = s.last_all_nonempty ? json(*s.last_all_nonempty) : json(nullptr);
    return out;
}

json to_json(const RunSummary& s) {
    return {{"dataset", s.dataset},
            {"kind", s.kind},
            {"accuracy", s.accuracy},
            {"accuracy_std", s.accuracy_std},
            {"accuracies", s.accuracies},
            {"repeats", s.accuracies.size()}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void save_model(const Model& m, const std::filesystem::path& path) {
    write_file_atomic(path, to_json(m).dump(2) + "\n");
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model " + path.string());
    return model_from_json(json::parse(in));
}

}  // namespace cfrbc
