#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cfrbc/dataset.hpp"
#include "support.hpp"

using namespace cfrbc;
using test_support::scratch;
using test_support::write_text;

TEST_CASE("iris loads with 150 rows, 4 features and 3 classes") {
    const auto d = load_csv(test_support::data_file("iris"));
    CHECK(d.rows() == 150);
    CHECK(d.features() == 4);
    CHECK(d.classes() == 3);
    CHECK(d.class_counts() == std::vector<std::size_t>{50, 50, 50});
}

TEST_CASE("every bundled dataset loads") {
    struct Shape {
        const char* name;
        std::size_t rows, features, classes;
    };
    for (const Shape& s : {Shape{"iris", 150, 4, 3}, Shape{"glass", 214, 9, 6},
                           Shape{"haberman", 306, 3, 2}, Shape{"heart", 270, 13, 2},
                           Shape{"ionosphere", 351, 33, 2}, Shape{"wine", 178, 13, 3},
                           Shape{"balance", 625, 4, 3}, Shape{"pima", 768, 8, 2}}) {
        CAPTURE(s.name);
        const auto d = load_csv(test_support::data_file(s.name));
        CHECK(d.rows() == s.rows);
        CHECK(d.features() == s.features);
        CHECK(d.classes() == s.classes);
    }
}

TEST_CASE("labels map in first-appearance order; label column by name or index") {
    const auto dir = scratch("labels");
    const auto p = write_text(dir / "a.csv", "y,x1,x2\nb,1,2\na,3,4\nb,5,6\n");
    const auto byname = load_csv(p, std::string("y"));
    CHECK(byname.class_names() == std::vector<std::string>{"b", "a"});
    CHECK(byname.labels() == std::vector<int>{0, 1, 0});
    CHECK(byname.feature_names() == std::vector<std::string>{"x1", "x2"});
    CHECK(byname.at(1, 1) == 4.0);
    const auto byindex = load_csv(p, std::size_t{0});
    CHECK(byindex.labels() == byname.labels());
    CHECK_THROWS_AS(load_csv(p, std::string("nope")), DataError);
}

TEST_CASE("single-class file is rejected") {
    const auto dir = scratch("single");
    const auto p = write_text(dir / "a.csv", "x,y\n1,a\n2,a\n3,a\n");
    CHECK_THROWS_WITH_AS(load_csv(p), doctest::Contains("fewer than 2 classes"), DataError);
}

TEST_CASE("a non-numeric cell names its row") {
    const auto dir = scratch("abc");
    std::string text = "x,y\n";
    for (int r = 1; r <= 9; ++r) text += (r == 7 ? std::string("abc") : std::to_string(r)) + "," + (r % 2 ? "a" : "b") + "\n";
    const auto p = write_text(dir / "a.csv", text);
    CHECK_THROWS_WITH_AS(load_csv(p), doctest::Contains("row 7"), DataError);
}

TEST_CASE("ragged rows, empty labels, missing files and non-finite cells are errors") {
    const auto dir = scratch("bad");
    CHECK_THROWS_AS(load_csv(write_text(dir / "r.csv", "x,y\n1,a\n2\n")), DataError);
    CHECK_THROWS_AS(load_csv(write_text(dir / "e.csv", "x,y\n1,a\n2,\n")), DataError);
    CHECK_THROWS_AS(load_csv(write_text(dir / "n.csv", "x,y\n1,a\nnan,b\n")), DataError);
    CHECK_THROWS_AS(load_csv(write_text(dir / "i.csv", "x,y\n1,a\ninf,b\n")), DataError);
    CHECK_THROWS_AS(load_csv(dir / "missing.csv"), DataError);
}

TEST_CASE("normalize uses the population standard deviation") {
    const Dataset d({2.0, 5.0, 4.0, 5.0}, 2, {0, 1}, {"a", "b"}, {"x", "c"});
    const auto n = normalize(d);
    CHECK(n.params.means[0] == 3.0);
    CHECK(n.params.stds[0] == 1.0);
    CHECK(n.data.at(0, 0) == -1.0);
    CHECK(n.data.at(1, 0) == 1.0);
    // constant column: mean kept, std forced to 1, values become 0
    CHECK(n.params.means[1] == 5.0);
    CHECK(n.params.stds[1] == 1.0);
    CHECK(n.data.at(0, 1) == 0.0);
    CHECK(n.data.at(1, 1) == 0.0);
}

TEST_CASE("constant column [5,5,5] maps to zeros") {
    const Dataset d({5.0, 5.0, 5.0}, 1, {0, 1, 0}, {"a", "b"}, {"x"});
    const auto n = normalize(d);
    CHECK(n.params.stds[0] == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(n.data.at(i, 0) == 0.0);
}

TEST_CASE("normalize needs two rows") {
    const Dataset d({1.0}, 1, {0}, {"a", "b"}, {"x"});
    CHECK_THROWS_AS(normalize(d), DataError);
}

TEST_CASE("normalization is idempotent on standardized data and invertible") {
    const auto d = load_csv(test_support::data_file("wine"));
    const auto once = normalize(d);
    const auto twice = normalize(once.data);
    for (std::size_t k = 0; k < d.values().size(); ++k) {
        CHECK(std::abs(twice.data.values()[k] - once.data.values()[k]) < 1e-9);
    }
    const auto back = once.params.invert(once.data);
    for (std::size_t k = 0; k < d.values().size(); ++k) {
        CHECK(std::abs(back.values()[k] - d.values()[k]) < 1e-9);
    }
}

TEST_CASE("split sizes, fold structure and determinism") {
    const auto d = load_csv(test_support::data_file("iris"));
    const SplitSpec spec{0.2, 5, 42};
    const auto s = split(d, spec);
    CHECK(s.train_indices.size() == 120);
    CHECK(s.test_indices.size() == 30);
    CHECK(s.stratified);
    REQUIRE(s.folds.size() == 5);

    std::vector<std::size_t> all = s.train_indices;
    all.insert(all.end(), s.test_indices.begin(), s.test_indices.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(150);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(all == expect);

    std::vector<int> seen(120, 0);
    for (const auto& f : s.folds) {
        CHECK(f.calibration.size() == 24);
        CHECK(f.fit.size() == 96);
        for (auto i : f.calibration) ++seen[i];
        std::set<std::size_t> fit(f.fit.begin(), f.fit.end());
        for (auto i : f.calibration) CHECK(fit.count(i) == 0);
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

    // stratified test part: 10 per class
    const auto test = s.test(d);
    CHECK(test.class_counts() == std::vector<std::size_t>{10, 10, 10});

    const auto again = split(d, spec);
    CHECK(again.train_indices == s.train_indices);
    CHECK(again.test_indices == s.test_indices);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(again.folds[k].fit == s.folds[k].fit);
        CHECK(again.folds[k].calibration == s.folds[k].calibration);
    }
    const auto other = split(d, SplitSpec{0.2, 5, 43});
    CHECK(other.test_indices != s.test_indices);
}

TEST_CASE("split falls back to an unstratified shuffle for rare classes") {
    std::vector<double> v;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        v.push_back(i);
        y.push_back(i < 3 ? 1 : 0);
    }
    const Dataset d(v, 1, y, {"a", "b"}, {"x"});
    const auto s = split(d, SplitSpec{0.25, 5, 1});
    CHECK_FALSE(s.stratified);
    CHECK(s.test_indices.size() == 10);
    std::size_t total = 0;
    for (const auto& f : s.folds) total += f.calibration.size();
    CHECK(total == 30);
}

TEST_CASE("split rejects more folds than training rows and bad fractions") {
    const Dataset d({1, 2, 3, 4, 5}, 1, {0, 1, 0, 1, 0}, {"a", "b"}, {"x"});
    CHECK_THROWS(split(d, SplitSpec{0.2, 5, 0}));
    CHECK_THROWS(split(d, SplitSpec{0.0, 2, 0}));
    CHECK_THROWS(split(d, SplitSpec{1.0, 2, 0}));
    CHECK_THROWS(split(d, SplitSpec{0.2, 1, 0}));
}

TEST_CASE("load_features checks the schema and maps optional labels") {
    const auto dir = scratch("features");
    const std::vector<std::string> feats{"x1", "x2"}, classes{"a", "b"};
    const auto ok = load_features(write_text(dir / "ok.csv", "x2,x1\n2,1\n4,3\n"), feats, classes);
    CHECK(ok.rows() == 2);
    CHECK(ok.row(1)[0] == 3.0);
    CHECK_FALSE(ok.labels[0].has_value());
    const auto lab = load_features(write_text(dir / "lab.csv", "x1,x2,y\n1,2,b\n"), feats, classes);
    CHECK(lab.labels[0] == 1);
    CHECK_THROWS_AS(load_features(write_text(dir / "short.csv", "x1\n1\n"), feats, classes), DataError);
    CHECK_THROWS_AS(load_features(write_text(dir / "unk.csv", "x1,x2,y\n1,2,c\n"), feats, classes),
                    DataError);
}
