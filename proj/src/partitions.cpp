#include "cfrbc/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfrbc {

std::string_view to_string(FuzzyKind kind) { return kind == FuzzyKind::T1 ? "t1" : "ivt2"; }

FuzzyKind parse_fuzzy_kind(std::string_view text) {
    if (text == "t1" || text == "T1") return FuzzyKind::T1;
    if (text == "ivt2" || text == "IVT2") return FuzzyKind::IVT2;
    throw std::invalid_argument("unknown fuzzy kind '" + std::string(text) + "'");
}

std::string_view to_string(Label label) {
    switch (label) {
        case Label::Low: return "low";
        case Label::Medium: return "medium";
        case Label::High: return "high";
    }
    return "?";
}

double MembershipFunction::upper(double x) const noexcept {
    if (x < a || x > d) return 0.0;
    if (x >= b && x <= c) return 1.0;
    if (x < b) return (x - a) / (b - a);
    return (d - x) / (d - c);
}

Interval MembershipFunction::evaluate(double x) const {
    const double u = upper(x);
    return {lower_scale * u, u};
}

LinguisticVariable::LinguisticVariable(std::size_t feature_index, const QuantileKnots& knots,
                                       FuzzyKind kind, double lower_cap)
    : feature_(feature_index), knots_(knots) {
    if (!std::is_sorted(knots.begin(), knots.end())) {
        throw std::invalid_argument("quantile knots must be non-decreasing");
    }
    if (!(lower_cap > 0.0 && lower_cap <= 1.0)) {
        throw std::invalid_argument("lower membership cap must lie in (0,1]");
    }
    const double scale = kind == FuzzyKind::T1 ? 1.0 : lower_cap;
    const auto [q0, q20, q50, q80, q100] = knots;
    functions_[0] = {q0, q0, q20, q50, scale};
    functions_[1] = {q20, q50, q50, q80, scale};
    functions_[2] = {q50, q80, q100, q100, scale};
}

Interval LinguisticVariable::membership(Label label, double x) const {
    return function(label).evaluate(std::clamp(x, knots_.front(), knots_.back()));
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Partitions build_partitions(const Dataset& train, FuzzyKind kind, double lower_cap) {
    if (train.rows() < 5) throw DataError("partitions need at least 5 training rows");
    Partitions p{kind, lower_cap, {}};
    std::vector<double> column(train.rows());
    for (std::size_t j = 0; j < train.features(); ++j) {
        for (std::size_t i = 0; i < train.rows(); ++i) column[i] = train.at(i, j);
        std::sort(column.begin(), column.end());
        if (column.front() == column.back()) {
            throw DataError("feature '" + train.feature_names()[j] +
                            "' has fewer than 2 distinct values; cannot build a partition");
        }
        const QuantileKnots knots{column.front(), quantile_sorted(column, 0.2),
                                  quantile_sorted(column, 0.5), quantile_sorted(column, 0.8),
                                  column.back()};
        p.variables.emplace_back(j, knots, kind, lower_cap);
    }
    return p;
}

Partitions partitions_from_knots(const std::vector<QuantileKnots>& knots, FuzzyKind kind,
                                 double lower_cap) {
    Partitions p{kind, lower_cap, {}};
    for (std::size_t j = 0; j < knots.size(); ++j) p.variables.emplace_back(j, knots[j], kind, lower_cap);
    return p;
}

MembershipTable::MembershipTable(const Partitions& partitions, const Dataset& data)
    : MembershipTable(partitions, data.values(), data.rows()) {}

MembershipTable::MembershipTable(const Partitions& partitions, std::span<const double> values,
                                 std::size_t rows)
    : rows_(rows), features_(partitions.features()) {
    if (values.size() != rows * features_) {
        throw DataError("membership table: expected " + std::to_string(features_) +
                        " features per row");
    }
    cells_.reserve(rows * features_ * kLabelCount);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < features_; ++j) {
            const auto& lv = partitions.variables[j];
            const double x = values[i * features_ + j];
            for (std::size_t l = 0; l < kLabelCount; ++l) {
                cells_.push_back(lv.membership(static_cast<Label>(l), x));
            }
        }
    }
}

}  // namespace cfrbc
