// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfrbc/model.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cfrbc;

namespace {

const std::vector<std::string> kAllDatasets{"iris",       "glass", "haberman", "heart",
                                            "ionosphere", "wine",  "balance",  "pima"};

Dataset load(const std::string& name) { return load_csv(test_support::data_file(name)); }

ExperimentConfig config(FuzzyKind kind, std::uint64_t seed) {
    ExperimentConfig c;
    c.kind = kind;
    c.set_seed(seed);
    return c;
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// 1. Empirical coverage over 20 random 80/20 splits.
Outcome coverage() {
    Outcome o;
    const std::vector<double> levels{0.05, 0.1, 0.2};
    std::ostringstream d;
    for (const std::string name : {"iris", "heart"}) {
        const auto raw = load(name);
        for (auto kind : {FuzzyKind::T1, FuzzyKind::IVT2}) {
            auto c = config(kind, 1000);
            c.repeats = 20;
            c.grid = levels;
            const auto r = run_experiment(raw, c, name);
            d << name << '/' << to_string(kind) << ':';
            for (std::size_t l = 0; l < levels.size(); ++l) {
                const double cov = r.mean_sweep.levels[l].coverage;
                const bool ok = cov >= (1.0 - levels[l]) - 0.05;
                o.pass = o.pass && ok;
                d << ' ' << levels[l] << "->" << fmt("%.3f", cov) << (ok ? "" : "(!)");
            }
            d << "; ";
        }
    }
    o.detail = d.str();
    return o;
}

// 2. Quantile against brute-force sorted-rank selection.
Outcome quantile_oracle() {
    Outcome o;
    std::mt19937_64 rng(2);
    std::size_t mismatches = 0;
    const std::vector<OrderParams> orders{{0.5, 1.0}, {0.0, 1.0}, {1.0, 0.5}};
    for (int interval = 0; interval < 2; ++interval) {
        for (int t = 0; t < 10000; ++t) {
            std::vector<Interval> pool(1 + rng() % 200);
            for (auto& s : pool) {
                s = test_support::random_interval(rng, t % 3 == 0 ? 12 : 0);
                if (!interval) s = Interval::degenerate(s.upper());
            }
            const auto order = orders[static_cast<std::size_t>(t) % orders.size()];
            const int pct = 1 + static_cast<int>(rng() % 99);
            const ConformalCalibration cal(pool, order);
            if (!(cal.quantile(pct / 100.0) == oracle::conformal_quantile(pool, pct, order))) ++mismatches;
        }
    }
    o.pass = mismatches == 0;
    o.detail = std::to_string(mismatches) + " mismatches over 20000 pools";
    return o;
}

// 3. Total order axioms and refinement of the product order.
Outcome order_axioms() {
    Outcome o;
    std::mt19937_64 rng(3);
    std::size_t bad = 0;
    for (const OrderParams p : {OrderParams{0.5, 1.0}, OrderParams{0.0, 1.0}, OrderParams{1.0, 0.5}}) {
        for (int t = 0; t < 100000; ++t) {
            const int grid = t % 2 ? 8 : 0;
            const auto x = test_support::random_interval(rng, grid);
            const auto y = test_support::random_interval(rng, grid);
            const auto z = test_support::random_interval(rng, grid);
            const bool xy = leq_admissible(x, y, p), yx = leq_admissible(y, x, p);
            if (!(xy || yx)) ++bad;                                   // totality
            if (xy && yx && !(x == y)) ++bad;                          // antisymmetry
            if (xy && leq_admissible(y, z, p) && !leq_admissible(x, z, p)) ++bad;  // transitivity
            if (x.lower() <= y.lower() && x.upper() <= y.upper() && !xy) ++bad;  // refinement
        }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(bad) + " violations over 3x10^5 samples";
    return o;
}

// 4. Mean test accuracy over 5 seeded runs.
Outcome accuracy_ballpark() {
    Outcome o;
    std::ostringstream d;
    const std::vector<std::pair<std::string, double>> targets{
        {"iris", 0.90}, {"haberman", 0.68}, {"pima", 0.65}};
    for (const auto& [name, bound] : targets) {
        auto c = config(FuzzyKind::T1, 0);
        c.repeats = 5;
        c.grid = {0.5};
        const auto r = run_experiment(load(name), c, name);
        const bool ok = r.summary.accuracy >= bound;
        o.pass = o.pass && ok;
        d << name << ' ' << fmt("%.3f", r.summary.accuracy) << " (>= " << bound << ")"
          << (ok ? "" : "(!)") << "; ";
    }
    o.detail = d.str();
    return o;
}

struct Fitted {
    Model model;
    Dataset test;
};

Fitted fit(const std::string& name, FuzzyKind kind, std::uint64_t seed, double lower_cap = kDefaultLowerCap) {
    const auto raw = load(name);
    auto c = config(kind, seed);
    c.lower_cap = lower_cap;
    auto r = fit_on_split(raw, c);
    auto test = held_out(r.model, raw);
    return {std::move(r.model), std::move(test)};
}

// 5. Sets nested across the grid for every test sample.
Outcome nesting() {
    Outcome o;
    std::size_t checked = 0, bad = 0;
    for (const auto& name : kAllDatasets) {
        for (auto kind : {FuzzyKind::T1, FuzzyKind::IVT2}) {
            const auto f = fit(name, kind, 5);
            const auto grid = default_grid();
            for (std::size_t i = 0; i < f.test.rows(); ++i) {
                const auto s = f.model.rule_base.class_scores(f.test.row(i), f.model.order());
                std::vector<int> prev;
                for (std::size_t l = 0; l < grid.size(); ++l) {
                    const auto cur = classes_above(s.scores, f.model.calibration.threshold(grid[l]),
                                                   f.model.order());
                    if (l > 0 && !std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) ++bad;
                    prev = cur;
                    ++checked;
                }
            }
        }
    }
    o.pass = bad == 0 && checked > 0;
    o.detail = std::to_string(bad) + " violations over " + std::to_string(checked) +
               " consecutive-level checks (8 datasets, T1 and IVT2)";
    return o;
}

// 6. Iris IVT2 sweep shape.
Outcome sweep_shape(const std::filesystem::path& out_dir) {
    Outcome o;
    const auto raw = load("iris");
    auto c = config(FuzzyKind::IVT2, 0);
    c.repeats = 5;
    // the lowest level sits below 1/(n_cal+1), where the threshold is [0,0]
    c.grid = default_grid();
    c.grid.insert(c.grid.begin(), 0.005);
    const auto r = run_experiment(raw, c, "iris");
    const auto& lv = r.mean_sweep.levels;
    const std::vector<std::string> comments{"config: " + to_json(c).dump()};
    const auto csv = out_dir / "acceptance_iris_ivt2_sweep.csv";
    write_file_atomic(csv, sweep_to_csv(r.mean_sweep, comments));
    const double classes = static_cast<double>(raw.classes());
    bool monotone = true;
    for (std::size_t l = 1; l < lv.size(); ++l) {
        monotone = monotone && lv[l].mean_set_size <= lv[l - 1].mean_set_size + 1e-12 &&
                   lv[l].nonempty_frac <= lv[l - 1].nonempty_frac + 1e-12;
    }
    const bool starts_full = lv.front().mean_set_size == classes && lv.front().nonempty_frac == 1.0;
    const bool ends_small = lv.back().mean_set_size < 1.0 && lv.back().nonempty_frac < 1.0;
    o.pass = monotone && starts_full && ends_small;
    o.detail = "size " + fmt("%.2f", lv.front().mean_set_size) + " at s=0.005, " +
               fmt("%.2f", lv[1].mean_set_size) + " at 0.05, " + fmt("%.2f", lv.back().mean_set_size) +
               " at 0.95; non-empty " + fmt("%.2f", lv.front().nonempty_frac) + " -> " +
               fmt("%.2f", lv.back().nonempty_frac) + (monotone ? "; monotone" : "; NOT monotone") +
               "; csv " + csv.string();
    return o;
}

// 7. Set-size penalty at significance 0.5.
Outcome penalty_effect() {
    Outcome o;
    std::ostringstream d;
    int wins = 0;
    for (const std::string name : {"iris", "wine", "heart", "haberman"}) {
        const auto raw = load(name);
        auto run = [&](double w) {
            auto c = config(FuzzyKind::IVT2, 0);
            c.repeats = 5;
            c.grid = {0.5};
            c.ga.penalty_weight = w;
            return run_experiment(raw, c, name).mean_sweep.levels.front();
        };
        const auto plain = run(0.0);
        const auto penalized = run(0.01);
        const bool ok = penalized.mean_set_size <= plain.mean_set_size &&
                        penalized.nonempty_frac >= plain.nonempty_frac - 0.05;
        wins += ok;
        d << name << ' ' << fmt("%.3f", plain.mean_set_size) << "->" << fmt("%.3f", penalized.mean_set_size)
          << " (non-empty " << fmt("%.3f", plain.nonempty_frac) << "->"
          << fmt("%.3f", penalized.nonempty_frac) << ')' << (ok ? "" : "(x)") << "; ";
    }
    o.pass = wins >= 2;
    o.detail = std::to_string(wins) + "/4 datasets: " + d.str();
    return o;
}

// 8. IVT2 with lower cap 1 reproduces T1 exactly.
Outcome degeneracy() {
    Outcome o;
    std::size_t bad = 0, rows = 0;
    for (const auto& name : kAllDatasets) {
        const auto a = fit(name, FuzzyKind::T1, 8);
        const auto b = fit(name, FuzzyKind::IVT2, 8, 1.0);
        if (!(a.model.rule_base.rules() == b.model.rule_base.rules())) ++bad;
        for (std::size_t i = 0; i < a.test.rows(); ++i, ++rows) {
            const auto sa = a.model.rule_base.class_scores(a.test.row(i), a.model.order());
            const auto sb = b.model.rule_base.class_scores(b.test.row(i), b.model.order());
            if (classify(sa.scores, a.model.order()) != classify(sb.scores, b.model.order())) ++bad;
            for (double s : default_grid()) {
                if (classes_above(sa.scores, a.model.calibration.threshold(s), a.model.order()) !=
                    classes_above(sb.scores, b.model.calibration.threshold(s), b.model.order())) {
                    ++bad;
                }
            }
        }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(bad) + " differences over " + std::to_string(rows) + " test rows";
    return o;
}

// 9. Rule-wise sets only hold rules of classes in the class-wise set.
Outcome rule_consistency() {
    Outcome o;
    std::size_t bad = 0, checked = 0;
    for (const std::string name : {"wine", "glass"}) {
        for (auto kind : {FuzzyKind::T1, FuzzyKind::IVT2}) {
            const auto f = fit(name, kind, 9);
            const auto& rules = f.model.rule_base.rules();
            for (std::size_t i = 0; i < f.test.rows(); ++i) {
                for (double s : default_grid()) {
                    const auto set = predict_set(f.model.rule_base, f.model.calibration, f.test.row(i), s);
                    const auto rs = predict_rules(f.model.rule_base, f.model.calibration, f.test.row(i), s);
                    for (std::size_t r : rs.rules) {
                        if (!std::binary_search(set.classes.begin(), set.classes.end(), rules[r].consequent)) ++bad;
                    }
                    ++checked;
                }
            }
        }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(bad) + " violations over " + std::to_string(checked) + " predictions";
    return o;
}

// 10. MCC against the one-hot correlation oracle.
Outcome mcc_oracle() {
    Outcome o;
    std::mt19937_64 rng(10);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t c = t % 2 ? 2 : 3 + rng() % 5;
        const std::size_t extra = rng() % 2;
        const std::size_t scale = 1 + rng() % 200;
        ConfusionMatrix m(c, c + extra);
        std::vector<std::vector<std::size_t>> dense(c, std::vector<std::size_t>(c + extra));
        for (std::size_t i = 0; i < c; ++i) {
            for (std::size_t j = 0; j < c + extra; ++j) {
                const std::size_t v = rng() % 4 == 0 ? 0 : rng() % scale;
                m.add(i, j, v);
                dense[i][j] = v;
            }
        }
        worst = std::max(worst, std::abs(mcc(m) - oracle::mcc(dense)));
    }
    o.pass = worst <= 1e-12;
    o.detail = "max |diff| " + fmt("%.2e", worst) + " over 10^4 matrices";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path out_dir = argc > 1 ? argv[1] : ".";
    std::filesystem::create_directories(out_dir);
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, coverage},
        {2, quantile_oracle},
        {3, order_axioms},
        {4, accuracy_ballpark},
        {5, nesting},
        {6, [&] { return sweep_shape(out_dir); }},
        {7, penalty_effect},
        {8, degeneracy},
        {9, rule_consistency},
        {10, mcc_oracle},
    };
    int failed = 0;
    for (const auto& [id, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
