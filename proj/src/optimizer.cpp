#include "cfrbc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cfrbc/parallel.hpp"

namespace cfrbc {

void GAConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("population size must be at least 2");
    if (!(mutation_rate > 0.0 && mutation_rate < 1.0)) {
        throw std::invalid_argument("mutation rate must lie in (0,1)");
    }
    if (!(crossover_rate > 0.0 && crossover_rate < 1.0)) {
        throw std::invalid_argument("crossover rate must lie in (0,1)");
    }
    if (tournament_size < 1) throw std::invalid_argument("tournament size must be at least 1");
    if (max_rules < 1 || max_rules > kMaxRules) {
        throw std::invalid_argument("max_rules must lie in [1, 15]");
    }
    if (max_antecedents < 1 || max_antecedents > kMaxAntecedents) {
        throw std::invalid_argument("max_antecedents must lie in [1, 3]");
    }
    if (!(penalty_weight >= 0.0) || !std::isfinite(penalty_weight)) {
        throw std::invalid_argument("penalty weight must be a finite value >= 0");
    }
}

// -- MCC ---------------------------------------------------------------------

ConfusionMatrix::ConfusionMatrix(std::size_t n_true, std::size_t n_predicted)
    : n_true_(n_true), n_pred_(n_predicted), counts_(n_true * n_predicted, 0) {
    if (n_predicted < n_true) {
        throw std::invalid_argument("predicted axis must cover every true class");
    }
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::size_t count) {
    counts_.at(truth * n_pred_ + predicted) += count;
}

std::size_t ConfusionMatrix::total() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

double mcc(const ConfusionMatrix& m) {
    const std::size_t k = m.predicted_classes();
    std::vector<double> t(k, 0.0), p(k, 0.0);
    double correct = 0.0, s = 0.0;
    for (std::size_t i = 0; i < m.true_classes(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto c = static_cast<double>(m.at(i, j));
            t[i] += c;
            p[j] += c;
            s += c;
            if (i == j) correct += c;
        }
    }
    double tp = 0.0, pp = 0.0, tt = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        tp += t[j] * p[j];
        pp += p[j] * p[j];
        tt += t[j] * t[j];
    }
    const double den_p = s * s - pp;
    const double den_t = s * s - tt;
    if (den_p <= 0.0 || den_t <= 0.0) return 0.0;
    return (correct * s - tp) / (std::sqrt(den_p) * std::sqrt(den_t));
}

double mcc_binary(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
    const auto TP = static_cast<double>(tp), TN = static_cast<double>(tn);
    const auto FP = static_cast<double>(fp), FN = static_cast<double>(fn);
    const double den = (TP + FP) * (TP + FN) * (TN + FP) * (TN + FN);
    if (den == 0.0) return 0.0;
    return (TP * TN - FP * FN) / std::sqrt(den);
}

double conformal_penalty(std::span<const Interval> associations, std::size_t n_rules,
                         std::size_t n_samples, std::size_t n_classes, bool raw) {
    if (associations.size() != n_rules * n_samples) {
        throw std::invalid_argument("association matrix size mismatch");
    }
    if (n_samples == 0 || n_classes < 2) return 0.0;
    double sum = 0.0;
    for (const auto& a : associations) sum += k_a(a, 0.5);
    const auto wrong = static_cast<double>(n_classes - 1);
    const double l2 = wrong * sum;
    return raw ? l2 : l2 / (static_cast<double>(n_samples) * wrong);
}

// -- Genome ------------------------------------------------------------------

Genome::Genome(std::size_t slots, std::size_t features)
    : features_(features), genes_(slots * features, 0), consequents_(slots, 0) {}

void Genome::set_gene(std::size_t slot, std::size_t feature, std::uint8_t value) {
    if (value > kLabelCount) throw std::invalid_argument("gene value out of range");
    genes_[slot * features_ + feature] = value;
}

std::vector<Rule> Genome::decode(std::size_t max_antecedents) const {
    std::vector<Rule> rules;
    for (std::size_t s = 0; s < slots(); ++s) {
        Rule r;
        for (std::size_t f = 0; f < features_; ++f) {
            if (const auto g = gene(s, f); g != 0) {
                r.antecedents.push_back({f, static_cast<Label>(g - 1)});
            }
        }
        if (r.antecedents.empty() || r.antecedents.size() > max_antecedents) continue;
        r.consequent = consequents_[s];
        rules.push_back(std::move(r));
    }
    return rules;
}

// -- Fitness -----------------------------------------------------------------

namespace {

std::vector<Interval> associations_of(std::span<const Rule> rules, const FiringMatrix& firing,
                                      std::span<const DominanceTerms> terms) {
    std::vector<Interval> out;
    out.reserve(firing.rules() * firing.samples());
    for (std::size_t r = 0; r < rules.size(); ++r) {
        for (std::size_t i = 0; i < firing.samples(); ++i) {
            out.push_back(product(firing.at(r, i), terms[r].dominance));
        }
    }
    return out;
}

/// Class scores of sample i from rule-major associations.
void scores_for_sample(std::span<const Rule> rules, std::span<const Interval> assoc,
                       std::size_t n_samples, std::size_t i, const OrderParams& order,
                       std::vector<Interval>& scores) {
    std::fill(scores.begin(), scores.end(), Interval{0.0, 0.0});
    for (std::size_t r = 0; r < rules.size(); ++r) {
        auto& s = scores[static_cast<std::size_t>(rules[r].consequent)];
        s = max_admissible(s, assoc[r * n_samples + i], order);
    }
}

}  // namespace

FitnessBreakdown evaluate_genome(const Genome& g, const FitnessContext& ctx) {
    const auto rules = g.decode(ctx.config.max_antecedents);
    FitnessBreakdown out;
    out.active_rules = rules.size();
    if (rules.empty()) return out;

    const FiringMatrix firing(rules, ctx.table);
    const auto terms = dominance_terms(rules, firing, ctx.labels, ctx.n_classes, ctx.config.confidence);
    const auto assoc = associations_of(rules, firing, terms);

    const std::size_t n = ctx.labels.size();
    ConfusionMatrix cm(ctx.n_classes, ctx.n_classes + 1);
    std::vector<Interval> scores(ctx.n_classes);
    for (std::size_t i = 0; i < n; ++i) {
        scores_for_sample(rules, assoc, n, i, ctx.order, scores);
        const auto pred = classify(scores, ctx.order);
        cm.add(static_cast<std::size_t>(ctx.labels[i]),
               pred ? static_cast<std::size_t>(*pred) : ctx.n_classes);
    }
    out.mcc = mcc(cm);
    if (ctx.config.penalty_weight > 0.0) {
        out.penalty = conformal_penalty(assoc, rules.size(), n, ctx.n_classes, ctx.config.raw_penalty);
    }
    out.fitness = out.mcc - ctx.config.penalty_weight * out.penalty;
    return out;
}

// -- Evolution ---------------------------------------------------------------

namespace {

using Rng = std::mt19937_64;

/// Independent stream per (generation, individual) so results do not
/// depend on evaluation order.
Rng stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(index),
                      0x6366726bU};
    return Rng(seq);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

/// Seeds a slot from a random training sample: its best-matching label on
/// 1..max_antecedents random features, and its class as consequent.
void seed_slot(Genome& g, std::size_t slot, Rng& rng, const MembershipTable& table,
               std::span<const int> labels, std::size_t max_antecedents) {
    const std::size_t f = g.features();
    const std::size_t i = uniform_index(rng, table.rows());
    const std::size_t n_ant = 1 + uniform_index(rng, std::min(max_antecedents, f));
    std::vector<std::size_t> order(f);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = 0; k < n_ant; ++k) {
        std::swap(order[k], order[k + uniform_index(rng, f - k)]);
        const std::size_t feat = order[k];
        std::size_t best = 0;
        for (std::size_t l = 1; l < kLabelCount; ++l) {
            if (table.at(i, feat, static_cast<Label>(l)).upper() >
                table.at(i, feat, static_cast<Label>(best)).upper()) {
                best = l;
            }
        }
        g.set_gene(slot, feat, static_cast<std::uint8_t>(best + 1));
    }
    g.set_consequent(slot, labels[i]);
}

/// Every gene of a slot (antecedents and consequent) mutates independently
/// with probability rate/(F+1), so `rate` is the expected number of changes
/// per rule slot whatever the dimensionality.
void mutate(Genome& g, Rng& rng, double rate, std::size_t n_classes) {
    const std::size_t f = g.features();
    const double p = rate / static_cast<double>(f + 1);
    for (std::size_t s = 0; s < g.slots(); ++s) {
        for (std::size_t j = 0; j < f; ++j) {
            if (!coin(rng, p)) continue;
            const auto shift = static_cast<std::uint8_t>(1 + uniform_index(rng, kLabelCount));
            g.set_gene(s, j, static_cast<std::uint8_t>((g.gene(s, j) + shift) % (kLabelCount + 1)));
        }
        if (n_classes > 1 && coin(rng, p)) {
            const auto shift = static_cast<int>(1 + uniform_index(rng, n_classes - 1));
            g.set_consequent(s, (g.consequent(s) + shift) % static_cast<int>(n_classes));
        }
    }
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
    Genome child = a;
    for (std::size_t s = 0; s < a.slots(); ++s) {
        if (!coin(rng, 0.5)) continue;
        for (std::size_t j = 0; j < a.features(); ++j) child.set_gene(s, j, b.gene(s, j));
        child.set_consequent(s, b.consequent(s));
    }
    return child;
}

std::size_t tournament(const std::vector<double>& fitness, std::size_t size, Rng& rng) {
    std::size_t best = uniform_index(rng, fitness.size());
    for (std::size_t k = 1; k < size; ++k) {
        const std::size_t c = uniform_index(rng, fitness.size());
        if (fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best)) best = c;
    }
    return best;
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

RuleBase prune_rules(const RuleBase& rb, const MembershipTable& table, std::span<const int> labels,
                     const OrderParams& order) {
    const auto& rules = rb.rules();
    const FiringMatrix firing(rules, table);
    std::vector<std::size_t> wins(rules.size(), 0);
    std::vector<Interval> assoc(rules.size());
    std::vector<Interval> scores(rb.classes());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t r = 0; r < rules.size(); ++r) {
            assoc[r] = product(firing.at(r, i), rules[r].dominance);
        }
        scores = aggregate_class_scores(rules, assoc, rb.classes(), order);
        if (const auto winner = classify(scores, order)) {
            if (const auto r = winning_rule(rules, assoc, *winner, order)) ++wins[*r];
        }
    }
    std::vector<Rule> kept;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        if (k_a(rules[r].dominance, 0.5) >= kMinDominance && wins[r] > 0) kept.push_back(rules[r]);
    }
    if (kept.empty()) return rb;
    RuleBase out(rb.partitions(), std::move(kept), rb.classes(), rb.confidence());
    out.fit_dominance(table, labels);
    return out;
}

EvolutionResult evolve(const Dataset& train, const Partitions& partitions, const GAConfig& config,
                       const OrderParams& order) {
    config.validate();
    if (partitions.features() != train.features()) {
        throw std::invalid_argument("partitions do not match the training features");
    }
    const MembershipTable table(partitions, train);
    const auto labels = std::span<const int>(train.labels());
    const std::size_t n_classes = train.classes();
    const FitnessContext ctx{table, labels, n_classes, order, config};
    const std::size_t pop = config.population_size;

    std::vector<Genome> population(pop, Genome(config.max_rules, train.features()));
    std::vector<double> fit(pop);
    parallel_for(pop, [&](std::size_t j) {
        Rng rng = stream(config.seed, 0, j);
        for (std::size_t s = 0; s < config.max_rules; ++s) {
            seed_slot(population[j], s, rng, table, labels, config.max_antecedents);
        }
        fit[j] = fitness(population[j], ctx);
    });

    EvolutionResult result{RuleBase{}, population[0], 0.0, {}};
    result.history.push_back(fit[argmax(fit)]);

    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        std::vector<Genome> next(pop, population[0]);
        std::vector<double> next_fit(pop);
        const std::size_t elite = argmax(fit);
        next[0] = population[elite];
        next_fit[0] = fit[elite];
        parallel_for(pop - 1, [&](std::size_t k) {
            const std::size_t j = k + 1;
            Rng rng = stream(config.seed, gen, j);
            const std::size_t a = tournament(fit, config.tournament_size, rng);
            const std::size_t b = tournament(fit, config.tournament_size, rng);
            Genome child = coin(rng, config.crossover_rate)
                               ? crossover(population[a], population[b], rng)
                               : population[a];
            mutate(child, rng, config.mutation_rate, n_classes);
            next_fit[j] = fitness(child, ctx);
            next[j] = std::move(child);
        });
        population = std::move(next);
        fit = std::move(next_fit);
        result.history.push_back(fit[argmax(fit)]);
    }

    const std::size_t best = argmax(fit);
    result.best = population[best];
    result.best_fitness = fit[best];
    RuleBase rb(partitions, result.best.decode(config.max_antecedents), n_classes, config.confidence);
    rb.fit_dominance(table, labels);
    result.rule_base = prune_rules(rb, table, labels, order);
    return result;
}

}  // namespace cfrbc
