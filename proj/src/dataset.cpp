#include "cfrbc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_map>

namespace cfrbc {

Dataset::Dataset(std::vector<double> values, std::size_t n_features, std::vector<int> labels,
                 std::vector<std::string> class_names, std::vector<std::string> feature_names)
    : values_(std::move(values)),
      n_features_(n_features),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      feature_names_(std::move(feature_names)) {
    if (n_features_ == 0) throw DataError("dataset has no feature columns");
    if (values_.size() != labels_.size() * n_features_) {
        throw DataError("feature matrix size does not match label count");
    }
    if (feature_names_.size() != n_features_) {
        throw DataError("feature name count does not match feature columns");
    }
    for (int y : labels_) {
        if (y < 0 || static_cast<std::size_t>(y) >= class_names_.size()) {
            throw DataError("label index out of range");
        }
    }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<double> values;
    values.reserve(indices.size() * n_features_);
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (std::size_t i : indices) {
        auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
        labels.push_back(labels_[i]);
    }
    return {std::move(values), n_features_, std::move(labels), class_names_, feature_names_};
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(classes(), 0);
    for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    RawTable t;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    t.header = split_line(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != t.header.size()) {
            throw DataError(path.string() + ": ragged row " + std::to_string(t.rows.size() + 1) +
                            " (line " + std::to_string(line_no) + ") has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

std::size_t resolve_label(const RawTable& t, const LabelColumn& label,
                          const std::filesystem::path& path) {
    if (std::holds_alternative<std::size_t>(label)) {
        const auto idx = std::get<std::size_t>(label);
        if (idx >= t.header.size()) {
            throw DataError(path.string() + ": label column index " + std::to_string(idx) +
                            " out of range");
        }
        return idx;
    }
    if (std::holds_alternative<std::string>(label)) {
        const auto& name = std::get<std::string>(label);
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        if (it == t.header.end()) {
            throw DataError(path.string() + ": no column named '" + name + "'");
        }
        return static_cast<std::size_t>(it - t.header.begin());
    }
    return t.header.size() - 1;
}

double parse_cell(const RawTable& t, std::size_t r, std::size_t c,
                  const std::filesystem::path& path) {
    double v = 0.0;
    if (!parse_double(t.rows[r][c], v)) {
        throw DataError(path.string() + ": row " + std::to_string(r + 1) + ", column '" +
                        t.header[c] + "': cannot parse '" + t.rows[r][c] +
                        "' as a finite number");
    }
    return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label) {
    const RawTable t = read_table(path);
    if (t.header.size() < 2) throw DataError(path.string() + ": need at least 2 columns");
    const std::size_t label_col = resolve_label(t, label, path);

    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c != label_col) feature_names.push_back(t.header[c]);
    }

    std::vector<double> values;
    values.reserve(t.rows.size() * feature_names.size());
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_index;

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c != label_col) values.push_back(parse_cell(t, r, c, path));
        }
        const std::string& name = t.rows[r][label_col];
        if (name.empty()) {
            throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has an empty label");
        }
        auto [it, inserted] = class_index.try_emplace(name, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(name);
        labels.push_back(it->second);
    }
    if (class_names.size() < 2) {
        throw DataError(path.string() + ": fewer than 2 classes in label column '" +
                        t.header[label_col] + "'");
    }
    return {std::move(values), feature_names.size(), std::move(labels), std::move(class_names),
            std::move(feature_names)};
}

FeatureTable load_features(const std::filesystem::path& path,
                           const std::vector<std::string>& feature_names,
                           const std::vector<std::string>& class_names) {
    const RawTable t = read_table(path);
    std::vector<std::size_t> columns;
    for (const auto& name : feature_names) {
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        if (it == t.header.end()) {
            throw DataError(path.string() + ": schema mismatch, missing feature column '" + name +
                            "'");
        }
        columns.push_back(static_cast<std::size_t>(it - t.header.begin()));
    }
    // Any single leftover column is taken as the label.
    std::optional<std::size_t> label_col;
    if (t.header.size() == feature_names.size() + 1) {
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (std::find(columns.begin(), columns.end(), c) == columns.end()) label_col = c;
        }
    } else if (t.header.size() != feature_names.size()) {
        throw DataError(path.string() + ": schema mismatch, expected " +
                        std::to_string(feature_names.size()) + " feature columns, found " +
                        std::to_string(t.header.size()) + " columns");
    }

    FeatureTable out;
    out.n_features = feature_names.size();
    out.values.reserve(t.rows.size() * out.n_features);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c : columns) out.values.push_back(parse_cell(t, r, c, path));
        if (label_col) {
            const auto& name = t.rows[r][*label_col];
            const auto it = std::find(class_names.begin(), class_names.end(), name);
            if (it == class_names.end()) {
                throw DataError(path.string() + ": row " + std::to_string(r + 1) +
                                ": unknown class '" + name + "'");
            }
            out.labels.emplace_back(static_cast<int>(it - class_names.begin()));
        } else {
            out.labels.emplace_back(std::nullopt);
        }
    }
    return out;
}

Dataset NormalizationParams::apply(const Dataset& d) const {
    if (d.features() != means.size()) {
        throw DataError("normalization expects " + std::to_string(means.size()) +
                        " features, dataset has " + std::to_string(d.features()));
    }
    std::vector<double> values = d.values();
    for (std::size_t i = 0; i < d.rows(); ++i) {
        apply_inplace(std::span<double>(values.data() + i * d.features(), d.features()));
    }
    return {std::move(values), d.features(), d.labels(), d.class_names(), d.feature_names()};
}

void NormalizationParams::apply_inplace(std::span<double> row) const {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - means[j]) / stds[j];
}

Dataset NormalizationParams::invert(const Dataset& d) const {
    std::vector<double> values = d.values();
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.features(); ++j) {
            auto& v = values[i * d.features() + j];
            v = v * stds[j] + means[j];
        }
    }
    return {std::move(values), d.features(), d.labels(), d.class_names(), d.feature_names()};
}

Normalized normalize(const Dataset& d) {
    if (d.rows() < 2) throw DataError("normalization needs at least 2 rows");
    const std::size_t n = d.rows();
    const std::size_t f = d.features();
    NormalizationParams p;
    p.means.assign(f, 0.0);
    p.stds.assign(f, 1.0);
    for (std::size_t j = 0; j < f; ++j) {
        bool constant = true;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += d.at(i, j);
            constant = constant && d.at(i, j) == d.at(0, j);
        }
        if (constant) {
            p.means[j] = d.at(0, j);
            continue;
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (d.at(i, j) - mean) * (d.at(i, j) - mean);
        p.means[j] = mean;
        p.stds[j] = std::sqrt(ss / static_cast<double>(n));
    }
    Dataset out = p.apply(d);
    return {std::move(out), std::move(p)};
}

void SplitSpec::validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw DataError("test fraction must lie in (0,1)");
    }
    if (calibration_folds < 2) throw DataError("calibration needs at least 2 folds");
}

Split split(const Dataset& d, const SplitSpec& spec) {
    spec.validate();
    const std::size_t n = d.rows();
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
    if (n_test == 0 || n_test >= n) {
        throw DataError("test fraction leaves an empty train or test partition");
    }
    const std::size_t n_train = n - n_test;
    const std::size_t k = spec.calibration_folds;
    if (k > n_train) {
        throw DataError(std::to_string(k) + " calibration folds exceed the " +
                        std::to_string(n_train) + " training rows");
    }

    std::mt19937_64 rng(spec.seed);
    const auto counts = d.class_counts();
    Split out;
    out.stratified = std::all_of(counts.begin(), counts.end(),
                                 [k](std::size_t c) { return c >= k; });

    // Groups are shuffled independently; with stratification there is one
    // group per class, otherwise one group holding every row.
    std::vector<std::vector<std::size_t>> groups;
    if (out.stratified) {
        groups.resize(d.classes());
        for (std::size_t i = 0; i < n; ++i) {
            groups[static_cast<std::size_t>(d.label(i))].push_back(i);
        }
    } else {
        groups.emplace_back(n);
        std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
    }
    for (auto& g : groups) std::shuffle(g.begin(), g.end(), rng);

    // Largest-remainder allocation of test rows across groups.
    std::vector<std::size_t> quota(groups.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t allocated = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double exact = static_cast<double>(groups[g].size()) * static_cast<double>(n_test) /
                             static_cast<double>(n);
        quota[g] = static_cast<std::size_t>(std::floor(exact));
        allocated += quota[g];
        remainders.emplace_back(exact - std::floor(exact), g);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; allocated < n_test; ++r, ++allocated) {
        ++quota[remainders[r % remainders.size()].second];
    }

    std::vector<std::size_t> fold_of(n, 0);
    std::size_t position = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t i = 0; i < groups[g].size(); ++i) {
            const std::size_t row = groups[g][i];
            if (i < quota[g]) {
                out.test_indices.push_back(row);
            } else {
                out.train_indices.push_back(row);
                fold_of[row] = position++ % k;
            }
        }
    }
    std::sort(out.test_indices.begin(), out.test_indices.end());
    std::sort(out.train_indices.begin(), out.train_indices.end());

    out.folds.resize(k);
    for (std::size_t t = 0; t < out.train_indices.size(); ++t) {
        const std::size_t f = fold_of[out.train_indices[t]];
        for (std::size_t j = 0; j < k; ++j) {
            (j == f ? out.folds[j].calibration : out.folds[j].fit).push_back(t);
        }
    }
    return out;
}

}  // namespace cfrbc
