#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "cfrbc/dataset.hpp"
#include "cfrbc/interval.hpp"

namespace test_support {

inline std::filesystem::path data_dir() { return CFRBC_DATA_DIR; }

inline std::filesystem::path data_file(const std::string& name) { return data_dir() / (name + ".csv"); }

/// Scratch directory unique to the calling test, emptied on creation.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cfrbc_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path;
}

/// Random interval; with `grid` > 0 the endpoints are multiples of
/// 1/grid so that ties in K_a are frequent.
inline cfrbc::Interval random_interval(std::mt19937_64& rng, int grid = 0) {
    double a, b;
    if (grid > 0) {
        std::uniform_int_distribution<int> d(0, grid);
        a = d(rng) / static_cast<double>(grid);
        b = d(rng) / static_cast<double>(grid);
    } else {
        std::uniform_real_distribution<double> d(0.0, 1.0);
        a = d(rng);
        b = d(rng);
    }
    if (a > b) std::swap(a, b);
    return {a, b};
}

/// Two well separated Gaussian blobs that differ only in feature 0.
inline cfrbc::Dataset blobs(std::size_t per_class, std::uint64_t seed, double gap = 6.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> values;
    std::vector<int> labels;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            values.push_back(c * gap + noise(rng));
            values.push_back(noise(rng));
            labels.push_back(c);
        }
    }
    return {std::move(values), 2, std::move(labels), {"a", "b"}, {"x0", "x1"}};
}

}  // namespace test_support
