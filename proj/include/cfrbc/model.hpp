#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfrbc/conformal.hpp"
#include "cfrbc/dataset.hpp"
#include "cfrbc/metrics.hpp"
#include "cfrbc/optimizer.hpp"
#include "cfrbc/partitions.hpp"
#include "cfrbc/rulebase.hpp"

namespace cfrbc {

/// Everything needed to reproduce a run. Echoed into every output file.
struct ExperimentConfig {
    std::string data_path;
    std::string label;  // empty: last column
    FuzzyKind kind = FuzzyKind::T1;
    double lower_cap = kDefaultLowerCap;
    GAConfig ga;
    SplitSpec split;
    std::vector<double> grid = default_grid();
    OrderParams order;
    std::string out_dir = ".";
    std::size_t repeats = 5;

    /// Sets the split and GA seeds together.
    void set_seed(std::uint64_t seed);
    void validate() const;
};

/// A trained classifier together with its input transform and calibration.
struct Model {
    ExperimentConfig config;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    NormalizationParams normalization;
    RuleBase rule_base;
    ConformalCalibration calibration;

    [[nodiscard]] const OrderParams& order() const noexcept { return calibration.order(); }

    /// Inference on an unnormalized feature row.
    [[nodiscard]] ClassScores scores(std::span<const double> raw_row) const;
};

/// Seed for the GA run of calibration fold `fold` (the final model uses
/// the base seed itself).
std::uint64_t fold_seed(std::uint64_t base, std::size_t fold);

/// Normalizes `raw_train`, runs cross-conformal calibration over `folds`,
/// then fits the final rule base on the whole training part.
Model fit_model(const Dataset& raw_train, std::span<const Fold> folds, const ExperimentConfig& config);

struct SplitRun {
    Model model;
    Split split;
};

/// Splits `raw` with config.split and fits on the training part.
SplitRun fit_on_split(const Dataset& raw, const ExperimentConfig& config);

/// Test rows of `raw` under the model's stored split, normalized with the
/// model's transform.
Dataset held_out(const Model& model, const Dataset& raw);

struct ExperimentResult {
    RunSummary summary;
    /// Per-repeat sweeps, in seed order.
    std::vector<SweepResult> sweeps;
    /// Mean of the per-repeat sweeps (rule metrics left empty).
    SweepResult mean_sweep;
};

/// `config.repeats` full split/train/evaluate cycles with seeds
/// config.split.seed + 0, 1, ...
ExperimentResult run_experiment(const Dataset& raw, const ExperimentConfig& config,
                                const std::string& dataset_name);

SweepResult average_sweeps(std::span<const SweepResult> sweeps);

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Overlays the keys present in `j` onto `base`.
void merge_config(ExperimentConfig& base, const nlohmann::json& j);

nlohmann::json to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SweepResult& s);
nlohmann::json to_json(const RunSummary& s);

void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Writes `content` to `path` through a temporary file in the same
/// directory so a failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cfrbc
