#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cfrbc {

/// Raised for malformed or unusable input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major feature matrix plus class labels.
///
/// Immutable once constructed; all transformations return new instances.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<double> values, std::size_t n_features, std::vector<int> labels,
            std::vector<std::string> class_names, std::vector<std::string> feature_names);

    [[nodiscard]] std::size_t rows() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t features() const noexcept { return n_features_; }
    [[nodiscard]] std::size_t classes() const noexcept { return class_names_.size(); }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_features_, n_features_};
    }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        return values_[i * n_features_ + j];
    }
    [[nodiscard]] int label(std::size_t i) const { return labels_[i]; }

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }
    [[nodiscard]] const std::vector<std::string>& class_names() const noexcept {
        return class_names_;
    }
    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept {
        return feature_names_;
    }

    /// Rows selected by index, in the order given. Class and feature names are kept.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

    /// Per-class instance counts.
    [[nodiscard]] std::vector<std::size_t> class_counts() const;

private:
    std::vector<double> values_;
    std::size_t n_features_ = 0;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
    std::vector<std::string> feature_names_;
};

/// Selects the label column by header name or by zero-based index.
/// An empty selector picks the last column.
using LabelColumn = std::variant<std::monostate, std::string, std::size_t>;

/// Reads a comma-separated file whose first row is a header.
///
/// Labels are mapped to dense indices in first-appearance order.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label = {});

/// Reads feature rows against a known schema. Used for inference on
/// unlabeled inputs: the label column is optional and, when present, is
/// mapped through `class_names` (unknown names are a DataError).
struct FeatureTable {
    std::vector<double> values;
    std::size_t n_features = 0;
    std::vector<std::optional<int>> labels;

    [[nodiscard]] std::size_t rows() const noexcept {
        return n_features == 0 ? 0 : values.size() / n_features;
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_features, n_features};
    }
};
FeatureTable load_features(const std::filesystem::path& path,
                           const std::vector<std::string>& feature_names,
                           const std::vector<std::string>& class_names);

/// Per-feature z-score transform.
struct NormalizationParams {
    std::vector<double> means;
    std::vector<double> stds;

    [[nodiscard]] Dataset apply(const Dataset& d) const;
    void apply_inplace(std::span<double> row) const;
    [[nodiscard]] Dataset invert(const Dataset& d) const;
};

struct Normalized {
    Dataset data;
    NormalizationParams params;
};

/// Population mean/std per column; constant columns map to zero with std 1.
/// Throws DataError with fewer than 2 rows.
Normalized normalize(const Dataset& d);

struct SplitSpec {
    double test_fraction = 0.2;
    std::size_t calibration_folds = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Indices into the training partition.
struct Fold {
    std::vector<std::size_t> fit;
    std::vector<std::size_t> calibration;
};

struct Split {
    std::vector<std::size_t> train_indices;  // rows of the source dataset
    std::vector<std::size_t> test_indices;
    std::vector<Fold> folds;
    bool stratified = false;

    [[nodiscard]] Dataset train(const Dataset& d) const { return d.subset(train_indices); }
    [[nodiscard]] Dataset test(const Dataset& d) const { return d.subset(test_indices); }
};

/// Deterministic train/test split with K calibration folds over the
/// training part. Stratified when every class has at least K instances.
Split split(const Dataset& d, const SplitSpec& spec);

}  // namespace cfrbc
