#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfrbc/conformal.hpp"
#include "cfrbc/dataset.hpp"
#include "cfrbc/rulebase.hpp"

namespace cfrbc {

/// Contingency counts of one rule treated as a classifier of its consequent.
///
/// TP: rule survives the conformal cut and the true class is its consequent.
/// FP: rule survives, true class differs. FN: rule cut, true class matches.
struct RuleMetrics {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    [[nodiscard]] double precision() const noexcept;
    [[nodiscard]] double recall() const noexcept;
    /// 2TP / (2TP + FP + FN), 0 when the denominator is 0.
    [[nodiscard]] double f1() const noexcept;
};

struct LevelMetrics {
    double significance = 0.0;
    Interval threshold;
    double mean_set_size = 0.0;
    double std_set_size = 0.0;  // population std
    double nonempty_frac = 0.0;
    double coverage = 0.0;
    std::vector<RuleMetrics> rules;
    double mean_rule_f1 = 0.0;
};

struct SweepResult {
    std::vector<LevelMetrics> levels;
    std::size_t samples = 0;
    std::size_t classes = 0;
    /// Smallest grid level at which every sample has a non-empty set.
    std::optional<double> first_all_nonempty;
    /// Largest grid level at which every sample has a non-empty set.
    std::optional<double> last_all_nonempty;
};

/// 0.05, 0.10, ..., 0.95.
std::vector<double> default_grid();
/// Throws std::invalid_argument unless strictly increasing within (0,1).
void validate_grid(std::span<const double> grid);

/// Inference output for every row of a (normalized) dataset.
std::vector<ClassScores> score_dataset(const RuleBase& rb, const Dataset& data,
                                       const OrderParams& order);

/// Fraction of rows whose winner-take-all class equals the label; rows
/// without a prediction count as wrong. Throws DataError on an empty set.
double accuracy(const RuleBase& rb, const Dataset& test, const OrderParams& order);

SweepResult sweep_significance(const RuleBase& rb, const ConformalCalibration& cal,
                               const Dataset& test, std::span<const double> grid);
/// Same, from precomputed scores (one entry per label).
SweepResult sweep_scores(std::span<const Rule> rules, std::span<const ClassScores> scores,
                         std::span<const int> labels, const ConformalCalibration& cal,
                         std::span<const double> grid);

std::vector<RuleMetrics> rule_f1(const RuleBase& rb, const ConformalCalibration& cal,
                                 const Dataset& test, double significance);

/// Mean and population std over repeated runs.
struct RunSummary {
    std::string dataset;
    std::string kind;
    std::vector<double> accuracies;
    double accuracy = 0.0;
    double accuracy_std = 0.0;

    static RunSummary from_runs(std::string dataset, std::string kind, std::vector<double> accuracies);
};

/// One row per level: significance, mean_set_size, std_set_size,
/// nonempty_frac, coverage, mean_rule_f1. Lines starting with '#' before
/// the header carry metadata.
std::string sweep_to_csv(const SweepResult& sweep, std::span<const std::string> comments = {});

}  // namespace cfrbc
