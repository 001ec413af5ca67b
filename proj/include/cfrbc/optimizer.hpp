#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cfrbc/dataset.hpp"
#include "cfrbc/interval.hpp"
#include "cfrbc/partitions.hpp"
#include "cfrbc/rulebase.hpp"

namespace cfrbc {

struct GAConfig {
    std::size_t population_size = 30;
    std::size_t generations = 50;
    double mutation_rate = 0.1;
    double crossover_rate = 0.9;
    std::size_t tournament_size = 3;
    std::size_t max_rules = kMaxRules;
    std::size_t max_antecedents = kMaxAntecedents;
    /// Weight of the set-size penalty; 0 disables it.
    double penalty_weight = 0.0;
    /// Skip the N·(C-1) normalization of the penalty.
    bool raw_penalty = false;
    /// Confidence denominator used for dominance during and after evolution.
    ConfidenceNorm confidence = ConfidenceNorm::AllSamples;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Counts indexed by (true class, predicted class). The predicted axis may
/// be wider than the true axis, e.g. to hold a "no prediction" column.
class ConfusionMatrix {
public:
    ConfusionMatrix(std::size_t n_true, std::size_t n_predicted);

    void add(std::size_t truth, std::size_t predicted, std::size_t count = 1);
    [[nodiscard]] std::size_t at(std::size_t truth, std::size_t predicted) const {
        return counts_[truth * n_pred_ + predicted];
    }
    [[nodiscard]] std::size_t true_classes() const noexcept { return n_true_; }
    [[nodiscard]] std::size_t predicted_classes() const noexcept { return n_pred_; }
    [[nodiscard]] std::size_t total() const noexcept;

private:
    std::size_t n_true_;
    std::size_t n_pred_;
    std::vector<std::size_t> counts_;
};

/// Matthews correlation coefficient in its multiclass (covariance) form,
/// which reduces to the TP/TN/FP/FN formula for two classes. 0 when any
/// denominator factor vanishes.
double mcc(const ConfusionMatrix& m);
double mcc_binary(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);

/// Set-size penalty: sum over rules and samples of (C-1)·K_0.5(association).
/// Unless `raw`, divided by N·(C-1). `associations` is rule-major.
double conformal_penalty(std::span<const Interval> associations, std::size_t n_rules,
                         std::size_t n_samples, std::size_t n_classes, bool raw);

/// Fixed-length encoding: one gene per (rule slot, feature) with value
/// 0 = don't care or 1 + label, plus one consequent per slot. A slot is an
/// active rule when it has between 1 and max_antecedents non-zero genes.
class Genome {
public:
    Genome(std::size_t slots, std::size_t features);

    [[nodiscard]] std::size_t slots() const noexcept { return consequents_.size(); }
    [[nodiscard]] std::size_t features() const noexcept { return features_; }

    [[nodiscard]] std::uint8_t gene(std::size_t slot, std::size_t feature) const {
        return genes_[slot * features_ + feature];
    }
    void set_gene(std::size_t slot, std::size_t feature, std::uint8_t value);
    [[nodiscard]] int consequent(std::size_t slot) const { return consequents_[slot]; }
    void set_consequent(std::size_t slot, int cls) { consequents_[slot] = cls; }

    /// Active slots as rules (antecedents in feature order, dominance unset).
    [[nodiscard]] std::vector<Rule> decode(std::size_t max_antecedents = kMaxAntecedents) const;

    friend bool operator==(const Genome&, const Genome&) = default;

private:
    std::size_t features_;
    std::vector<std::uint8_t> genes_;
    std::vector<int> consequents_;
};

struct FitnessContext {
    const MembershipTable& table;
    std::span<const int> labels;
    std::size_t n_classes;
    OrderParams order;
    const GAConfig& config;
};

struct FitnessBreakdown {
    double fitness = -1.0;
    double mcc = -1.0;
    double penalty = 0.0;  // already normalized unless raw_penalty
    std::size_t active_rules = 0;
};

/// MCC of the decoded rule base on the context data minus the weighted
/// penalty. Samples left without a prediction count as errors. A genome
/// with no active rule scores -1.
FitnessBreakdown evaluate_genome(const Genome& g, const FitnessContext& ctx);
inline double fitness(const Genome& g, const FitnessContext& ctx) {
    return evaluate_genome(g, ctx).fitness;
}

struct EvolutionResult {
    RuleBase rule_base;
    Genome best;
    double best_fitness = -1.0;
    /// Best fitness after initialization and after every generation.
    std::vector<double> history;
};

/// Tournament selection, uniform slot-wise crossover, per-gene mutation
/// and single elitism. Deterministic for a given config.seed regardless of
/// thread count. Rules with K_0.5(dominance) < 0.005 or no training wins
/// are dropped from the result and dominance is refitted on `train`.
EvolutionResult evolve(const Dataset& train, const Partitions& partitions, const GAConfig& config,
                       const OrderParams& order);

/// Threshold on K_0.5(dominance) used by the post-evolution rule filter.
inline constexpr double kMinDominance = 0.005;

/// Applies the post-evolution rule filter to `rb` (already fitted on the
/// data behind `table`) and refits dominance on the survivors.
RuleBase prune_rules(const RuleBase& rb, const MembershipTable& table, std::span<const int> labels,
                     const OrderParams& order);

}  // namespace cfrbc
