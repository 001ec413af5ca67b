#include "cfrbc/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfrbc/parallel.hpp"

namespace cfrbc {

ConformalCalibration::ConformalCalibration(std::vector<Interval> scores, OrderParams order)
    : scores_(std::move(scores)), order_(order) {
    order_.validate();
    if (scores_.empty()) throw std::invalid_argument("calibration needs at least one score");
    std::sort(scores_.begin(), scores_.end(), AdmissibleLess{order_});
    complements_.reserve(scores_.size());
    for (const auto& s : scores_) complements_.push_back(sub_from_one(s));
    std::sort(complements_.begin(), complements_.end(), AdmissibleLess{order_});
}

std::size_t conformal_rank(std::size_t n, double significance) {
    if (!(significance > 0.0 && significance < 1.0)) {
        throw std::invalid_argument("significance must lie in (0,1)");
    }
    const double v = static_cast<double>(n + 1) * (1.0 - significance);
    const double nearest = std::round(v);
    const double k = std::abs(v - nearest) <= 1e-9 * std::max(1.0, v) ? nearest : std::ceil(v);
    return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

Interval ConformalCalibration::quantile(double significance) const {
    const std::size_t k = conformal_rank(scores_.size(), significance);
    if (k > scores_.size()) return {1.0, 1.0};
    return scores_[k - 1];
}

Interval ConformalCalibration::threshold(double significance) const {
    const std::size_t k = conformal_rank(complements_.size(), significance);
    if (k > complements_.size()) return {0.0, 0.0};
    return complements_[complements_.size() - k];
}

ConformalCalibration calibrate_cross(const Dataset& train, std::span<const Fold> folds,
                                     const Trainer& trainer, const OrderParams& order) {
    if (folds.empty()) throw std::invalid_argument("cross-conformal calibration needs folds");
    for (const auto& f : folds) {
        if (f.calibration.empty()) throw DataError("calibration fold has zero instances");
        if (f.fit.empty()) throw DataError("calibration fold leaves no rows to fit on");
    }
    std::vector<std::vector<Interval>> per_fold(folds.size());
    parallel_for(folds.size(), [&](std::size_t k) {
        const RuleBase rb = trainer(train.subset(folds[k].fit), k);
        auto& out = per_fold[k];
        out.reserve(folds[k].calibration.size());
        for (std::size_t i : folds[k].calibration) {
            const auto scores = rb.class_scores(train.row(i), order);
            out.push_back(nonconformity(scores.scores[static_cast<std::size_t>(train.label(i))]));
        }
    });
    std::vector<Interval> pool;
    for (auto& scores : per_fold) pool.insert(pool.end(), scores.begin(), scores.end());
    return {std::move(pool), order};
}

std::vector<int> classes_above(std::span<const Interval> class_scores, const Interval& threshold,
                               const OrderParams& order) {
    std::vector<int> out;
    for (std::size_t c = 0; c < class_scores.size(); ++c) {
        if (!less_admissible(class_scores[c], threshold, order)) out.push_back(static_cast<int>(c));
    }
    return out;
}

std::vector<std::size_t> rules_above(std::span<const Interval> associations,
                                     const Interval& threshold, const OrderParams& order) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < associations.size(); ++r) {
        if (!less_admissible(associations[r], threshold, order)) out.push_back(r);
    }
    return out;
}

PredictionSet predict_set(const RuleBase& rb, const ConformalCalibration& cal,
                          std::span<const double> x, double significance) {
    const Interval t = cal.threshold(significance);
    const auto scores = rb.class_scores(x, cal.order());
    return {classes_above(scores.scores, t, cal.order()), t, significance};
}

RuleSet predict_rules(const RuleBase& rb, const ConformalCalibration& cal,
                      std::span<const double> x, double significance) {
    const auto scores = rb.class_scores(x, cal.order());
    return {rules_above(scores.associations, cal.threshold(significance), cal.order())};
}

}  // namespace cfrbc
