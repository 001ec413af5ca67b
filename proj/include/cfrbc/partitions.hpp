#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "cfrbc/dataset.hpp"
#include "cfrbc/interval.hpp"

namespace cfrbc {

enum class FuzzyKind { T1, IVT2 };

std::string_view to_string(FuzzyKind kind);
FuzzyKind parse_fuzzy_kind(std::string_view text);

enum class Label : unsigned char { Low = 0, Medium = 1, High = 2 };
inline constexpr std::size_t kLabelCount = 3;

std::string_view to_string(Label label);

/// Trapezoid a <= b <= c <= d for the upper membership function. The lower
/// membership is `lower_scale` times the upper one (1.0 for Type-1).
struct MembershipFunction {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double lower_scale = 1.0;

    /// Upper membership at x; no clamping of x.
    [[nodiscard]] double upper(double x) const noexcept;
    [[nodiscard]] Interval evaluate(double x) const;
};

/// Five quantile knots {min, q0.2, q0.5, q0.8, max} of one feature.
using QuantileKnots = std::array<double, 5>;

/// low / medium / high over one feature.
class LinguisticVariable {
public:
    LinguisticVariable(std::size_t feature_index, const QuantileKnots& knots, FuzzyKind kind,
                       double lower_cap);

    [[nodiscard]] std::size_t feature_index() const noexcept { return feature_; }
    [[nodiscard]] const QuantileKnots& knots() const noexcept { return knots_; }
    [[nodiscard]] const MembershipFunction& function(Label label) const {
        return functions_[static_cast<std::size_t>(label)];
    }

    /// Membership of `x`, clamped to [min, max] of the training data first.
    [[nodiscard]] Interval membership(Label label, double x) const;

private:
    std::size_t feature_;
    QuantileKnots knots_;
    std::array<MembershipFunction, kLabelCount> functions_;
};

/// Per-feature linguistic variables and the settings used to build them.
struct Partitions {
    FuzzyKind kind = FuzzyKind::T1;
    double lower_cap = 0.8;
    std::vector<LinguisticVariable> variables;

    [[nodiscard]] std::size_t features() const noexcept { return variables.size(); }
};

inline constexpr double kDefaultLowerCap = 0.8;

/// Linear-interpolation quantile of sorted data (type 7).
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Builds low/medium/high partitions from training quantiles.
/// Throws DataError for a feature with fewer than 2 distinct values or for
/// fewer than 5 rows. `lower_cap` is ignored for T1.
Partitions build_partitions(const Dataset& train, FuzzyKind kind,
                            double lower_cap = kDefaultLowerCap);

/// Rebuilds partitions from stored knots (model loading).
Partitions partitions_from_knots(const std::vector<QuantileKnots>& knots, FuzzyKind kind,
                                 double lower_cap);

/// Every (sample, feature, label) membership of a dataset, evaluated once.
class MembershipTable {
public:
    MembershipTable() = default;
    MembershipTable(const Partitions& partitions, const Dataset& data);
    MembershipTable(const Partitions& partitions, std::span<const double> values,
                    std::size_t rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t features() const noexcept { return features_; }
    [[nodiscard]] const Interval& at(std::size_t row, std::size_t feature, Label label) const {
        return cells_[(row * features_ + feature) * kLabelCount + static_cast<std::size_t>(label)];
    }

private:
    std::size_t rows_ = 0;
    std::size_t features_ = 0;
    std::vector<Interval> cells_;
};

}  // namespace cfrbc
