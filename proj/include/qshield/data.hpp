// Copyright 2026 The qshield Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file data.hpp
 * Labelled feature matrices: the QFV1 file format, seeded train/test
 * splitting, train-set standardization, and a Gaussian-blob generator.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qshield::data {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FeatureSet {
    FeatureMatrix features; ///< n_samples x feature_dim
    std::vector<std::uint32_t> labels;
    std::size_t n_classes = 0;

    [[nodiscard]] std::size_t n_samples() const { return static_cast<std::size_t>(features.rows()); }
    [[nodiscard]] std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }
    [[nodiscard]] Eigen::VectorXd sample(std::size_t i) const {
        return features.row(static_cast<Eigen::Index>(i)).transpose();
    }

    /// Throws ArgumentError unless the set is non-empty, labels match rows,
    /// every label is below n_classes, and all features are finite.
    void validate() const;

    /// Rows `indices` in the given order.
    [[nodiscard]] FeatureSet subset(std::span<const std::size_t> indices) const;
};

/// QFV1 layout: "QFV1", u32 n_samples, u32 feature_dim, u32 n_classes, f32
/// features row-major, u32 labels; all little-endian with no padding.
std::vector<std::uint8_t> encode_features(const FeatureSet &set);
FeatureSet decode_features(std::span<const std::uint8_t> bytes);

FeatureSet load_features(const std::filesystem::path &path);
void save_features(const FeatureSet &set, const std::filesystem::path &path);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/**
 * Seeded partition of row indices. Stratified splits round
 * `train_fraction * class_count` per class; otherwise the whole set is
 * rounded once. Both index lists come back in ascending order.
 */
SplitIndices split_indices(const FeatureSet &set, const SplitSpec &spec);
std::pair<FeatureSet, FeatureSet> split(const FeatureSet &set, const SplitSpec &spec);

/// Per-dimension affine map fitted on a training set.
struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale; ///< max(std, kStdFloor)

    static constexpr double kStdFloor = 1e-8;

    static Standardization fit(const FeatureSet &train);
    [[nodiscard]] FeatureSet apply(const FeatureSet &set) const;
    [[nodiscard]] FeatureSet invert(const FeatureSet &set) const;
};

struct StandardizedSplit {
    FeatureSet train;
    FeatureSet test;
    Standardization stats;
};

StandardizedSplit standardize(const FeatureSet &train, const FeatureSet &test);

/**
 * `n_per_class` points per class from unit isotropic Gaussians. Class means
 * sit on a regular simplex with pairwise distance `class_separation`,
 * embedded along seeded orthonormal directions. Feature values are rounded
 * to float precision so the set survives a QFV1 round trip unchanged.
 */
FeatureSet synth_gaussian(std::size_t n_per_class, std::size_t feature_dim, std::size_t n_classes,
                          double class_separation, std::uint64_t seed);

} // namespace qshield::data
