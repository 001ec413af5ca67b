#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cfrbc/model.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace cfrbc;

namespace {

Dataset dataset_from_rows(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                          std::vector<std::string> class_names,
                          std::vector<std::string> feature_names) {
    if (rows.empty()) throw DataError("dataset needs at least one row");
    const std::size_t f = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * f);
    for (const auto& r : rows) {
        if (r.size() != f) throw DataError("ragged feature rows");
        values.insert(values.end(), r.begin(), r.end());
    }
    if (feature_names.empty()) {
        for (std::size_t j = 0; j < f; ++j) feature_names.push_back("x" + std::to_string(j));
    }
    return {std::move(values), f, labels, std::move(class_names), std::move(feature_names)};
}

std::vector<std::vector<double>> dataset_rows(const Dataset& d) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        auto r = d.row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conformal prediction with Type-1 and interval Type-2 fuzzy rule-based classifiers";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>(), "lower"_a, "upper"_a)
        .def_property_readonly("lower", &Interval::lower)
        .def_property_readonly("upper", &Interval::upper)
        .def(py::self == py::self)
        .def("__repr__", [](const Interval& x) { return "Interval" + to_string(x); })
        .def("__iter__", [](const Interval& x) {
            return py::iter(py::make_tuple(x.lower(), x.upper()));
        });

    py::class_<OrderParams>(m, "OrderParams")
        .def(py::init([](double alpha, double beta) {
                 OrderParams p{alpha, beta};
                 p.validate();
                 return p;
             }),
             "alpha"_a = 0.5, "beta"_a = 1.0)
        .def_readwrite("alpha", &OrderParams::alpha)
        .def_readwrite("beta", &OrderParams::beta);

    m.def("k_a", &k_a, "x"_a, "a"_a, "(1-a)*lower + a*upper");
    m.def("leq_admissible", &leq_admissible, "x"_a, "y"_a, "order"_a = OrderParams{});
    m.def("less_admissible", &less_admissible, "x"_a, "y"_a, "order"_a = OrderParams{});
    m.def("sub_from_one", &sub_from_one, "x"_a);
    m.def("interval_product", &product, "x"_a, "y"_a);

    m.def("conformal_quantile",
          [](std::vector<Interval> scores, double significance, const OrderParams& order) {
              return ConformalCalibration(std::move(scores), order).quantile(significance);
          },
          "scores"_a, "significance"_a, "order"_a = OrderParams{});
    m.def("conformal_rank", &conformal_rank, "n"_a, "significance"_a);

    m.def("mcc",
          [](const std::vector<std::vector<std::size_t>>& confusion) {
              const std::size_t n = confusion.size();
              ConfusionMatrix cm(n, n);
              for (std::size_t i = 0; i < n; ++i) {
                  if (confusion[i].size() != n) throw std::invalid_argument("confusion must be square");
                  for (std::size_t j = 0; j < n; ++j) cm.add(i, j, confusion[i][j]);
              }
              return mcc(cm);
          },
          "confusion"_a, "Matthews correlation of a square confusion matrix (rows = truth)");

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_rows), "rows"_a, "labels"_a, "class_names"_a,
             "feature_names"_a = std::vector<std::string>{})
        .def_property_readonly("n_rows", &Dataset::rows)
        .def_property_readonly("n_features", &Dataset::features)
        .def_property_readonly("n_classes", &Dataset::classes)
        .def_property_readonly("labels", &Dataset::labels)
        .def_property_readonly("class_names", &Dataset::class_names)
        .def_property_readonly("feature_names", &Dataset::feature_names)
        .def("rows", &dataset_rows);

    m.def("load_csv",
          [](const std::filesystem::path& path, const std::string& label) {
              return load_csv(path, label.empty() ? LabelColumn{} : LabelColumn{label});
          },
          "path"_a, "label"_a = "");

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_property(
            "kind", [](const ExperimentConfig& c) { return std::string(to_string(c.kind)); },
            [](ExperimentConfig& c, const std::string& k) { c.kind = parse_fuzzy_kind(k); })
        .def_readwrite("lower_cap", &ExperimentConfig::lower_cap)
        .def_readwrite("grid", &ExperimentConfig::grid)
        .def_readwrite("order", &ExperimentConfig::order)
        .def_readwrite("repeats", &ExperimentConfig::repeats)
        .def_property(
            "generations", [](const ExperimentConfig& c) { return c.ga.generations; },
            [](ExperimentConfig& c, std::size_t v) { c.ga.generations = v; })
        .def_property(
            "population", [](const ExperimentConfig& c) { return c.ga.population_size; },
            [](ExperimentConfig& c, std::size_t v) { c.ga.population_size = v; })
        .def_property(
            "penalty_weight", [](const ExperimentConfig& c) { return c.ga.penalty_weight; },
            [](ExperimentConfig& c, double v) { c.ga.penalty_weight = v; })
        .def_property(
            "raw_penalty", [](const ExperimentConfig& c) { return c.ga.raw_penalty; },
            [](ExperimentConfig& c, bool v) { c.ga.raw_penalty = v; })
        .def_property(
            "confidence",
            [](const ExperimentConfig& c) { return std::string(to_string(c.ga.confidence)); },
            [](ExperimentConfig& c, const std::string& v) { c.ga.confidence = parse_confidence_norm(v); })
        .def_property(
            "folds", [](const ExperimentConfig& c) { return c.split.calibration_folds; },
            [](ExperimentConfig& c, std::size_t v) { c.split.calibration_folds = v; })
        .def_property(
            "test_fraction", [](const ExperimentConfig& c) { return c.split.test_fraction; },
            [](ExperimentConfig& c, double v) { c.split.test_fraction = v; })
        .def_property(
            "seed", [](const ExperimentConfig& c) { return c.split.seed; },
            [](ExperimentConfig& c, std::uint64_t s) { c.set_seed(s); })
        .def("to_json", [](const ExperimentConfig& c) { return to_json(c).dump(); });

    py::class_<Model>(m, "Model")
        .def_static("from_json", [](const std::string& s) {
            return model_from_json(nlohmann::json::parse(s));
        })
        .def_static("load", &load_model, "path"_a)
        .def("save", &save_model, "path"_a)
        .def("to_json", [](const Model& mdl) { return to_json(mdl).dump(); })
        .def_readonly("class_names", &Model::class_names)
        .def_readonly("feature_names", &Model::feature_names)
        .def_property_readonly("n_rules", [](const Model& mdl) { return mdl.rule_base.rules().size(); })
        .def_property_readonly("n_calibration", [](const Model& mdl) { return mdl.calibration.size(); })
        .def("describe", [](const Model& mdl) {
            return mdl.rule_base.describe(mdl.feature_names, mdl.class_names);
        })
        .def("quantile", [](const Model& mdl, double s) { return mdl.calibration.quantile(s); },
             "significance"_a)
        .def("threshold", [](const Model& mdl, double s) { return mdl.calibration.threshold(s); },
             "significance"_a)
        .def("class_scores", [](const Model& mdl, const std::vector<double>& row) {
            return mdl.scores(row).scores;
        }, "row"_a, "Per-class score intervals of an unnormalized row")
        .def("rule_associations", [](const Model& mdl, const std::vector<double>& row) {
            return mdl.scores(row).associations;
        }, "row"_a)
        .def("classify", [](const Model& mdl, const std::vector<double>& row) {
            return classify(mdl.scores(row).scores, mdl.order());
        }, "row"_a, "Winning class index or None")
        .def("predict_set", [](const Model& mdl, const std::vector<double>& row, double s) {
            return classes_above(mdl.scores(row).scores, mdl.calibration.threshold(s), mdl.order());
        }, "row"_a, "significance"_a)
        .def("predict_rules", [](const Model& mdl, const std::vector<double>& row, double s) {
            return rules_above(mdl.scores(row).associations, mdl.calibration.threshold(s), mdl.order());
        }, "row"_a, "significance"_a)
        .def("held_out", &held_out, "raw"_a,
             "Normalized test rows of `raw` under the model's stored split")
        .def("accuracy", [](const Model& mdl, const Dataset& normalized) {
            return accuracy(mdl.rule_base, normalized, mdl.order());
        }, "normalized"_a)
        .def("sweep", [](const Model& mdl, const Dataset& normalized, std::vector<double> grid) {
            if (grid.empty()) grid = mdl.config.grid;
            return to_json(sweep_significance(mdl.rule_base, mdl.calibration, normalized, grid)).dump();
        }, "normalized"_a, "grid"_a = std::vector<double>{});

    m.def("fit", [](const Dataset& raw, const ExperimentConfig& config) {
        py::gil_scoped_release release;
        return fit_on_split(raw, config).model;
    }, "raw"_a, "config"_a, "Split, calibrate and train; returns the model");

    m.def("run_experiment", [](const Dataset& raw, const ExperimentConfig& config,
                               const std::string& name) {
        ExperimentResult r;
        {
            py::gil_scoped_release release;
            r = run_experiment(raw, config, name);
        }
        nlohmann::json out{{"config", to_json(config)},
                           {"summary", to_json(r.summary)},
                           {"mean_sweep", to_json(r.mean_sweep)}};
        return out.dump();
    }, "raw"_a, "config"_a, "name"_a = "dataset");
}
