#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfrbc/interval.hpp"
#include "cfrbc/partitions.hpp"

namespace cfrbc {

inline constexpr std::size_t kMaxRules = 15;
inline constexpr std::size_t kMaxAntecedents = 3;

struct Antecedent {
    std::size_t feature = 0;
    Label label = Label::Low;

    friend bool operator==(const Antecedent&, const Antecedent&) = default;
};

/// IF x_f1 is l1 AND ... THEN class `consequent`, weighted by `dominance`.
struct Rule {
    std::vector<Antecedent> antecedents;
    int consequent = 0;
    Interval dominance;

    /// Throws std::invalid_argument for 0 or more than 3 antecedents or a
    /// repeated feature.
    void validate(std::size_t n_features, std::size_t n_classes) const;

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// Denominator of a rule's confidence.
/// AllRules: firing mass of every rule on the consequent-class samples.
/// AllSamples: the rule's own firing mass on every sample.
enum class ConfidenceNorm { AllRules, AllSamples };

std::string_view to_string(ConfidenceNorm c) noexcept;
/// Accepts "all-rules" or "all-samples".
ConfidenceNorm parse_confidence_norm(std::string_view s);

/// Support, confidence and their product for one rule.
struct DominanceTerms {
    Interval support;
    Interval confidence;
    Interval dominance;
    bool consequent_absent = false;
};

/// Output of inference for one sample.
struct ClassScores {
    std::vector<Interval> scores;        // per class, [0,0] when no rule
    std::vector<Interval> associations;  // per rule
};

/// Firing strengths of every rule on every sample, rule-major.
class FiringMatrix {
public:
    FiringMatrix(std::span<const Rule> rules, const MembershipTable& table);
    FiringMatrix(std::size_t n_rules, std::size_t n_samples, std::vector<Interval> cells);

    [[nodiscard]] std::size_t rules() const noexcept { return n_rules_; }
    [[nodiscard]] std::size_t samples() const noexcept { return n_samples_; }
    [[nodiscard]] const Interval& at(std::size_t rule, std::size_t sample) const {
        return cells_[rule * n_samples_ + sample];
    }

private:
    std::size_t n_rules_;
    std::size_t n_samples_;
    std::vector<Interval> cells_;
};

/// Product of the antecedent memberships of `rule` on one row.
Interval firing_strength(const Rule& rule, std::span<const double> x, const Partitions& partitions);
Interval firing_strength(const Rule& rule, const MembershipTable& table, std::size_t row);

/// Support, confidence and dominance of every rule on the labelled data
/// behind `firing`.
std::vector<DominanceTerms> dominance_terms(std::span<const Rule> rules, const FiringMatrix& firing,
                                            std::span<const int> labels, std::size_t n_classes,
                                            ConfidenceNorm norm = ConfidenceNorm::AllSamples);

class RuleBase {
public:
    RuleBase() = default;
    RuleBase(Partitions partitions, std::vector<Rule> rules, std::size_t n_classes,
             ConfidenceNorm confidence = ConfidenceNorm::AllSamples);

    [[nodiscard]] const Partitions& partitions() const noexcept { return partitions_; }
    [[nodiscard]] const std::vector<Rule>& rules() const noexcept { return rules_; }
    [[nodiscard]] std::size_t classes() const noexcept { return n_classes_; }
    [[nodiscard]] FuzzyKind kind() const noexcept { return partitions_.kind; }
    [[nodiscard]] ConfidenceNorm confidence() const noexcept { return confidence_; }

    /// Recomputes every rule's dominance on `train`. Returns the per-rule
    /// terms; rules whose consequent is absent keep dominance [0,0].
    std::vector<DominanceTerms> fit_dominance(const Dataset& train);
    std::vector<DominanceTerms> fit_dominance(const MembershipTable& table,
                                              std::span<const int> labels);

    [[nodiscard]] ClassScores class_scores(std::span<const double> x, const OrderParams& order) const;

    /// Human readable IF-THEN listing.
    [[nodiscard]] std::string describe(const std::vector<std::string>& feature_names,
                                       const std::vector<std::string>& class_names) const;

private:
    Partitions partitions_;
    std::vector<Rule> rules_;
    std::size_t n_classes_ = 0;
    ConfidenceNorm confidence_ = ConfidenceNorm::AllSamples;
};

/// Class scores from precomputed rule associations.
std::vector<Interval> aggregate_class_scores(std::span<const Rule> rules,
                                             std::span<const Interval> associations,
                                             std::size_t n_classes, const OrderParams& order);

/// Winner-take-all class; nullopt when every class score is [0,0].
/// Ties go to the lowest class index.
std::optional<int> classify(std::span<const Interval> class_scores, const OrderParams& order);
std::optional<int> classify(const RuleBase& rb, std::span<const double> x, const OrderParams& order);

/// Index of the rule that decides `winner` (largest association among its
/// rules, lowest index on ties); nullopt when the class has no rule.
std::optional<std::size_t> winning_rule(std::span<const Rule> rules,
                                        std::span<const Interval> associations, int winner,
                                        const OrderParams& order);

}  // namespace cfrbc
