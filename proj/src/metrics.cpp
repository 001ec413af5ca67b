#include "cfrbc/metrics.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cfrbc {

double RuleMetrics::precision() const noexcept {
    return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double RuleMetrics::recall() const noexcept {
    return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double RuleMetrics::f1() const noexcept {
    const std::size_t den = 2 * tp + fp + fn;
    return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

std::vector<double> default_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
    return grid;
}

void validate_grid(std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("significance grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
            throw std::invalid_argument("significance levels must lie in (0,1)");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("significance grid must be strictly increasing");
        }
    }
}

std::vector<ClassScores> score_dataset(const RuleBase& rb, const Dataset& data,
                                       const OrderParams& order) {
    std::vector<ClassScores> out;
    out.reserve(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) out.push_back(rb.class_scores(data.row(i), order));
    return out;
}

double accuracy(const RuleBase& rb, const Dataset& test, const OrderParams& order) {
    if (test.rows() == 0) throw DataError("accuracy of an empty test set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.rows(); ++i) {
        const auto pred = classify(rb, test.row(i), order);
        if (pred && *pred == test.label(i)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.rows());
}

namespace {

LevelMetrics level_metrics(std::span<const Rule> rules, std::span<const ClassScores> scores,
                           std::span<const int> labels, const ConformalCalibration& cal,
                           double significance) {
    LevelMetrics m;
    m.significance = significance;
    m.threshold = cal.threshold(significance);
    m.rules.assign(rules.size(), RuleMetrics{});
    const auto& order = cal.order();
    double sum = 0.0, sum_sq = 0.0;
    std::size_t nonempty = 0, covered = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto set = classes_above(scores[i].scores, m.threshold, order);
        const auto size = static_cast<double>(set.size());
        sum += size;
        sum_sq += size * size;
        if (!set.empty()) ++nonempty;
        for (int c : set) {
            if (c == labels[i]) ++covered;
        }
        std::vector<bool> fired(rules.size(), false);
        for (std::size_t r : rules_above(scores[i].associations, m.threshold, order)) fired[r] = true;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const bool match = rules[r].consequent == labels[i];
            if (fired[r] && match) ++m.rules[r].tp;
            else if (fired[r]) ++m.rules[r].fp;
            else if (match) ++m.rules[r].fn;
        }
    }
    const auto n = static_cast<double>(scores.size());
    if (n > 0) {
        m.mean_set_size = sum / n;
        m.std_set_size = std::sqrt(std::max(0.0, sum_sq / n - m.mean_set_size * m.mean_set_size));
        m.nonempty_frac = static_cast<double>(nonempty) / n;
        m.coverage = static_cast<double>(covered) / n;
    }
    if (!rules.empty()) {
        double f1 = 0.0;
        for (const auto& r : m.rules) f1 += r.f1();
        m.mean_rule_f1 = f1 / static_cast<double>(rules.size());
    }
    return m;
}

}  // namespace

SweepResult sweep_scores(std::span<const Rule> rules, std::span<const ClassScores> scores,
                         std::span<const int> labels, const ConformalCalibration& cal,
                         std::span<const double> grid) {
    validate_grid(grid);
    if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels size mismatch");
    SweepResult out;
    out.samples = scores.size();
    out.classes = scores.empty() ? 0 : scores.front().scores.size();
    for (double s : grid) {
        out.levels.push_back(level_metrics(rules, scores, labels, cal, s));
        if (out.levels.back().nonempty_frac == 1.0) {
            if (!out.first_all_nonempty) out.first_all_nonempty = s;
            out.last_all_nonempty = s;
        }
    }
    return out;
}

SweepResult sweep_significance(const RuleBase& rb, const ConformalCalibration& cal,
                               const Dataset& test, std::span<const double> grid) {
    const auto scores = score_dataset(rb, test, cal.order());
    return sweep_scores(rb.rules(), scores, test.labels(), cal, grid);
}

std::vector<RuleMetrics> rule_f1(const RuleBase& rb, const ConformalCalibration& cal,
                                 const Dataset& test, double significance) {
    const auto scores = score_dataset(rb, test, cal.order());
    return level_metrics(rb.rules(), scores, test.labels(), cal, significance).rules;
}

RunSummary RunSummary::from_runs(std::string dataset, std::string kind, std::vector<double> accuracies) {
    if (accuracies.empty()) throw std::invalid_argument("run summary needs at least one run");
    RunSummary s{std::move(dataset), std::move(kind), std::move(accuracies), 0.0, 0.0};
    const auto n = static_cast<double>(s.accuracies.size());
    s.accuracy = std::accumulate(s.accuracies.begin(), s.accuracies.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : s.accuracies) ss += (a - s.accuracy) * (a - s.accuracy);
    s.accuracy_std = std::sqrt(ss / n);
    return s;
}

std::string sweep_to_csv(const SweepResult& sweep, std::span<const std::string> comments) {
    // Shortest representation that reads back to the same double.
    auto num = [](double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    std::ostringstream os;
    for (const auto& c : comments) os << "# " << c << '\n';
    os << "significance,mean_set_size,std_set_size,nonempty_frac,coverage,mean_rule_f1\n";
    for (const auto& l : sweep.levels) {
        os << num(l.significance) << ',' << num(l.mean_set_size) << ',' << num(l.std_set_size) << ','
           << num(l.nonempty_frac) << ',' << num(l.coverage) << ',' << num(l.mean_rule_f1) << '\n';
    }
    return os.str();
}

}  // namespace cfrbc
