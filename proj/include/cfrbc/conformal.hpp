#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cfrbc/dataset.hpp"
#include "cfrbc/interval.hpp"
#include "cfrbc/rulebase.hpp"

namespace cfrbc {

/// Sorted pool of nonconformity scores S_i = (1,1) - f(X_i)_{Y_i}.
///
/// Type-1 models produce degenerate intervals, so the scalar conformal
/// procedure is the special case of the interval one.
class ConformalCalibration {
public:
    ConformalCalibration() = default;

    /// Takes an unsorted pool and sorts it under the admissible order.
    ConformalCalibration(std::vector<Interval> scores, OrderParams order);

    [[nodiscard]] std::size_t size() const noexcept { return scores_.size(); }
    [[nodiscard]] const std::vector<Interval>& scores() const noexcept { return scores_; }
    [[nodiscard]] const OrderParams& order() const noexcept { return order_; }

    /// k-th smallest score with k = ceil((n+1)(1-significance)); [1,1]
    /// when k > n. Throws std::invalid_argument unless 0 < significance < 1.
    [[nodiscard]] Interval quantile(double significance) const;

    /// The score a class must reach: the k-th largest of the complements
    /// 1 - S_i, [0,0] when k > n. Equals 1 - quantile(significance) except
    /// where two scores tie on K_alpha, since 1 - x reverses the primary key
    /// but not the secondary one. Ranking on the score side keeps the
    /// threshold monotone in the significance level.
    [[nodiscard]] Interval threshold(double significance) const;

private:
    std::vector<Interval> scores_;
    std::vector<Interval> complements_;  // 1 - S_i, ascending
    OrderParams order_;
};

/// ceil((n+1)(1-significance)), treating products within 1e-9 of an
/// integer as that integer so that e.g. n=9, significance=0.1 yields 9.
std::size_t conformal_rank(std::size_t n, double significance);

/// Nonconformity score of a sample whose true class scored `true_score`.
inline Interval nonconformity(const Interval& true_score) { return sub_from_one(true_score); }

/// Fits a model on the given (already normalized) rows. The fold index
/// lets the caller derive per-fold seeds.
using Trainer = std::function<RuleBase(const Dataset& fit, std::size_t fold)>;

/// Cross-conformal calibration: each fold is scored by a model trained on
/// the remaining folds and all scores are pooled.
ConformalCalibration calibrate_cross(const Dataset& train, std::span<const Fold> folds,
                                     const Trainer& trainer, const OrderParams& order);

struct PredictionSet {
    std::vector<int> classes;  // ascending
    Interval threshold;
    double significance = 0.0;
};

struct RuleSet {
    std::vector<std::size_t> rules;  // ascending
};

/// Classes whose score is >= threshold under the admissible order.
std::vector<int> classes_above(std::span<const Interval> class_scores, const Interval& threshold,
                               const OrderParams& order);
/// Rules whose association is >= threshold under the admissible order.
std::vector<std::size_t> rules_above(std::span<const Interval> associations,
                                     const Interval& threshold, const OrderParams& order);

PredictionSet predict_set(const RuleBase& rb, const ConformalCalibration& cal,
                          std::span<const double> x, double significance);
RuleSet predict_rules(const RuleBase& rb, const ConformalCalibration& cal,
                      std::span<const double> x, double significance);

}  // namespace cfrbc
