#include "cfrbc/rulebase.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cfrbc {

void Rule::validate(std::size_t n_features, std::size_t n_classes) const {
    if (antecedents.empty() || antecedents.size() > kMaxAntecedents) {
        throw std::invalid_argument("a rule needs between 1 and 3 antecedents");
    }
    for (std::size_t i = 0; i < antecedents.size(); ++i) {
        if (antecedents[i].feature >= n_features) {
            throw std::invalid_argument("antecedent feature index out of range");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (antecedents[j].feature == antecedents[i].feature) {
                throw std::invalid_argument("antecedent features must be distinct");
            }
        }
    }
    if (consequent < 0 || static_cast<std::size_t>(consequent) >= n_classes) {
        throw std::invalid_argument("rule consequent out of range");
    }
}

Interval firing_strength(const Rule& rule, std::span<const double> x, const Partitions& partitions) {
    Interval w{1.0, 1.0};
    for (const auto& a : rule.antecedents) {
        w = product(w, partitions.variables.at(a.feature).membership(a.label, x[a.feature]));
    }
    return w;
}

Interval firing_strength(const Rule& rule, const MembershipTable& table, std::size_t row) {
    Interval w{1.0, 1.0};
    for (const auto& a : rule.antecedents) w = product(w, table.at(row, a.feature, a.label));
    return w;
}

FiringMatrix::FiringMatrix(std::span<const Rule> rules, const MembershipTable& table)
    : n_rules_(rules.size()), n_samples_(table.rows()) {
    cells_.reserve(n_rules_ * n_samples_);
    for (const auto& r : rules) {
        for (std::size_t i = 0; i < n_samples_; ++i) cells_.push_back(firing_strength(r, table, i));
    }
}

FiringMatrix::FiringMatrix(std::size_t n_rules, std::size_t n_samples, std::vector<Interval> cells)
    : n_rules_(n_rules), n_samples_(n_samples), cells_(std::move(cells)) {
    if (cells_.size() != n_rules_ * n_samples_) {
        throw std::invalid_argument("firing matrix size mismatch");
    }
}

namespace {

double ratio(double num, double den) { return den > 0.0 ? std::min(num / den, 1.0) : 0.0; }

Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

std::string_view to_string(ConfidenceNorm c) noexcept {
    return c == ConfidenceNorm::AllRules ? "all-rules" : "all-samples";
}

ConfidenceNorm parse_confidence_norm(std::string_view s) {
    if (s == "all-rules") return ConfidenceNorm::AllRules;
    if (s == "all-samples") return ConfidenceNorm::AllSamples;
    throw std::invalid_argument("unknown confidence normalization '" + std::string(s) +
                                "' (expected all-rules or all-samples)");
}

std::vector<DominanceTerms> dominance_terms(std::span<const Rule> rules, const FiringMatrix& firing,
                                            std::span<const int> labels, std::size_t n_classes,
                                            ConfidenceNorm norm) {
    const std::size_t n = labels.size();
    std::vector<std::size_t> class_count(n_classes, 0);
    for (int y : labels) ++class_count[static_cast<std::size_t>(y)];

    // Total firing mass of all rules per sample, endpoint-wise.
    std::vector<double> mass_lo(n, 0.0), mass_hi(n, 0.0);
    if (norm == ConfidenceNorm::AllRules) {
        for (std::size_t r = 0; r < rules.size(); ++r) {
            for (std::size_t i = 0; i < n; ++i) {
                mass_lo[i] += firing.at(r, i).lower();
                mass_hi[i] += firing.at(r, i).upper();
            }
        }
    }

    std::vector<DominanceTerms> out;
    out.reserve(rules.size());
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const auto cls = static_cast<std::size_t>(rules[r].consequent);
        DominanceTerms t;
        if (class_count[cls] == 0) {
            t.consequent_absent = true;
            out.push_back(t);
            continue;
        }
        double w_lo = 0.0, w_hi = 0.0, den_lo = 0.0, den_hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& w = firing.at(r, i);
            const bool own = static_cast<std::size_t>(labels[i]) == cls;
            if (own) {
                w_lo += w.lower();
                w_hi += w.upper();
            }
            if (norm == ConfidenceNorm::AllSamples) {
                den_lo += w.lower();
                den_hi += w.upper();
            } else if (own) {
                den_lo += mass_lo[i];
                den_hi += mass_hi[i];
            }
        }
        const auto count = static_cast<double>(class_count[cls]);
        t.support = {std::min(w_lo / count, 1.0), std::min(w_hi / count, 1.0)};
        // Endpoint-wise ratios need not be ordered once rules with different
        // antecedent counts are mixed; the hull keeps the result in L([0,1]).
        t.confidence = hull(ratio(w_lo, den_lo), ratio(w_hi, den_hi));
        t.dominance = product(t.support, t.confidence);
        out.push_back(t);
    }
    return out;
}

RuleBase::RuleBase(Partitions partitions, std::vector<Rule> rules, std::size_t n_classes,
                   ConfidenceNorm confidence)
    : partitions_(std::move(partitions)),
      rules_(std::move(rules)),
      n_classes_(n_classes),
      confidence_(confidence) {
    if (rules_.size() > kMaxRules) throw std::invalid_argument("a rule base holds at most 15 rules");
    for (const auto& r : rules_) r.validate(partitions_.features(), n_classes_);
}

std::vector<DominanceTerms> RuleBase::fit_dominance(const Dataset& train) {
    return fit_dominance(MembershipTable(partitions_, train), train.labels());
}

std::vector<DominanceTerms> RuleBase::fit_dominance(const MembershipTable& table,
                                                    std::span<const int> labels) {
    const FiringMatrix firing(rules_, table);
    auto terms = dominance_terms(rules_, firing, labels, n_classes_, confidence_);
    for (std::size_t r = 0; r < rules_.size(); ++r) rules_[r].dominance = terms[r].dominance;
    return terms;
}

ClassScores RuleBase::class_scores(std::span<const double> x, const OrderParams& order) const {
    ClassScores out;
    out.associations.reserve(rules_.size());
    for (const auto& r : rules_) {
        out.associations.push_back(product(firing_strength(r, x, partitions_), r.dominance));
    }
    out.scores = aggregate_class_scores(rules_, out.associations, n_classes_, order);
    return out;
}

std::vector<Interval> aggregate_class_scores(std::span<const Rule> rules,
                                             std::span<const Interval> associations,
                                             std::size_t n_classes, const OrderParams& order) {
    std::vector<Interval> scores(n_classes, Interval{0.0, 0.0});
    for (std::size_t r = 0; r < rules.size(); ++r) {
        auto& s = scores[static_cast<std::size_t>(rules[r].consequent)];
        s = max_admissible(s, associations[r], order);
    }
    return scores;
}

std::optional<int> classify(std::span<const Interval> class_scores, const OrderParams& order) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < class_scores.size(); ++c) {
        if (less_admissible(class_scores[best], class_scores[c], order)) best = c;
    }
    if (class_scores.empty() || class_scores[best] == Interval{0.0, 0.0}) return std::nullopt;
    return static_cast<int>(best);
}

std::optional<int> classify(const RuleBase& rb, std::span<const double> x, const OrderParams& order) {
    return classify(rb.class_scores(x, order).scores, order);
}

std::optional<std::size_t> winning_rule(std::span<const Rule> rules,
                                        std::span<const Interval> associations, int winner,
                                        const OrderParams& order) {
    std::optional<std::size_t> best;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        if (rules[r].consequent != winner) continue;
        if (!best || less_admissible(associations[*best], associations[r], order)) best = r;
    }
    return best;
}

std::string RuleBase::describe(const std::vector<std::string>& feature_names,
                               const std::vector<std::string>& class_names) const {
    std::ostringstream os;
    os.precision(4);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        const auto& rule = rules_[r];
        os << "R" << r << ": IF ";
        for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
            const auto& a = rule.antecedents[i];
            if (i > 0) os << " AND ";
            os << feature_names.at(a.feature) << " IS " << to_string(a.label);
        }
        os << " THEN class " << class_names.at(static_cast<std::size_t>(rule.consequent));
        if (rule.dominance.is_degenerate()) {
            os << "  (dominance " << rule.dominance.lower() << ")";
        } else {
            os << "  (dominance [" << rule.dominance.lower() << ", " << rule.dominance.upper() << "])";
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace cfrbc
