#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cfrbc/model.hpp"
#include "support.hpp"

using namespace cfrbc;

namespace {

ExperimentConfig quick(FuzzyKind kind, std::uint64_t seed) {
    ExperimentConfig c;
    c.kind = kind;
    c.ga.generations = 8;
    c.ga.population_size = 12;
    c.set_seed(seed);
    c.repeats = 2;
    return c;
}

}  // namespace

TEST_CASE("model JSON roundtrip is lossless") {
    const auto raw = load_csv(test_support::data_file("wine"));
    for (auto kind : {FuzzyKind::T1, FuzzyKind::IVT2}) {
        const auto m = fit_on_split(raw, quick(kind, 4)).model;
        const auto j = to_json(m);
        const auto back = model_from_json(nlohmann::json::parse(j.dump()));
        CHECK(to_json(back).dump() == j.dump());
        CHECK(back.rule_base.rules() == m.rule_base.rules());
        CHECK(back.calibration.scores() == m.calibration.scores());
        const auto test = held_out(m, raw);
        for (std::size_t i = 0; i < test.rows(); ++i) {
            const auto a = m.rule_base.class_scores(test.row(i), m.order());
            const auto b = back.rule_base.class_scores(test.row(i), back.order());
            CHECK(a.scores == b.scores);
            CHECK(a.associations == b.associations);
        }
    }
}

TEST_CASE("save and load through a file") {
    const auto raw = load_csv(test_support::data_file("iris"));
    const auto m = fit_on_split(raw, quick(FuzzyKind::IVT2, 9)).model;
    const auto dir = test_support::scratch("model_io");
    save_model(m, dir / "m.json");
    const auto back = load_model(dir / "m.json");
    CHECK(to_json(back) == to_json(m));
    CHECK_THROWS(load_model(dir / "missing.json"));
    test_support::write_text(dir / "bad.json", "{\"format\": 1");
    CHECK_THROWS(load_model(dir / "bad.json"));
}

TEST_CASE("fitting is deterministic for a seed") {
    const auto raw = load_csv(test_support::data_file("haberman"));
    const auto a = fit_on_split(raw, quick(FuzzyKind::T1, 21));
    const auto b = fit_on_split(raw, quick(FuzzyKind::T1, 21));
    CHECK(to_json(a.model).dump() == to_json(b.model).dump());
    CHECK(a.split.test_indices == b.split.test_indices);
}

TEST_CASE("the calibration pool holds one score per training row") {
    const auto raw = load_csv(test_support::data_file("iris"));
    const auto r = fit_on_split(raw, quick(FuzzyKind::T1, 2));
    CHECK(r.model.calibration.size() == r.split.train_indices.size());
    for (const auto& s : r.model.calibration.scores()) {
        CHECK(s.lower() >= 0.0);
        CHECK(s.upper() <= 1.0);
    }
}

TEST_CASE("held-out rows reject a different schema") {
    const auto iris = load_csv(test_support::data_file("iris"));
    const auto wine = load_csv(test_support::data_file("wine"));
    const auto m = fit_on_split(iris, quick(FuzzyKind::T1, 1)).model;
    CHECK_THROWS_AS(held_out(m, wine), DataError);
    CHECK(held_out(m, iris).rows() == 30);
    const std::vector<double> short_row{1.0, 2.0};
    CHECK_THROWS_AS((void)m.scores(short_row), DataError);
}

TEST_CASE("config JSON roundtrip and overlay") {
    auto c = quick(FuzzyKind::IVT2, 77);
    c.ga.penalty_weight = 0.01;
    c.ga.confidence = ConfidenceNorm::AllRules;
    c.order = OrderParams{0.3, 0.9};
    c.grid = {0.1, 0.2};
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.ga.confidence == ConfidenceNorm::AllRules);
    ExperimentConfig base;
    merge_config(base, nlohmann::json{{"kind", "ivt2"}});
    CHECK(base.kind == FuzzyKind::IVT2);
    CHECK(base.ga.generations == GAConfig{}.generations);
    ExperimentConfig bad;
    bad.lower_cap = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("experiment repeats use consecutive seeds") {
    const auto raw = load_csv(test_support::data_file("iris"));
    auto c = quick(FuzzyKind::T1, 30);
    const auto r = run_experiment(raw, c, "iris");
    REQUIRE(r.sweeps.size() == 2);
    REQUIRE(r.summary.accuracies.size() == 2);
    auto c1 = c;
    c1.set_seed(31);
    const auto single = fit_on_split(raw, c1);
    const auto test = held_out(single.model, raw);
    CHECK(r.summary.accuracies[1] ==
          doctest::Approx(accuracy(single.model.rule_base, test, single.model.order())));
    CHECK(r.mean_sweep.levels.size() == c.grid.size());
    CHECK(r.mean_sweep.levels[3].coverage ==
          doctest::Approx((r.sweeps[0].levels[3].coverage + r.sweeps[1].levels[3].coverage) / 2));
}

TEST_CASE("atomic writes leave no partial files") {
    const auto dir = test_support::scratch("atomic");
    write_file_atomic(dir / "a.txt", "hello");
    std::ifstream in(dir / "a.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "hello");
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
    CHECK(files == 1);
}
