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
#include "qshield/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "qshield/binary_io.hpp"
#include "qshield/errors.hpp"

namespace qshield::data {

namespace {

constexpr std::string_view kMagic = "QFV1";
constexpr std::size_t kHeaderBytes = 16;

std::string printable(std::string_view bytes) {
    std::string out;
    for (unsigned char c : bytes) {
        if (c >= 0x20 && c < 0x7f) {
            out += static_cast<char>(c);
        } else {
            constexpr char hex[] = "0123456789abcdef";
            out += "\\x";
            out += hex[c >> 4];
            out += hex[c & 0xf];
        }
    }
    return out;
}

} // namespace

void FeatureSet::validate() const {
    if (features.rows() == 0 || features.cols() == 0) {
        throw ArgumentError("feature set is empty");
    }
    if (labels.size() != n_samples()) {
        throw ArgumentError("feature set has " + std::to_string(n_samples()) + " rows but " +
                            std::to_string(labels.size()) + " labels");
    }
    if (n_classes == 0) {
        throw ArgumentError("feature set declares zero classes");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= n_classes) {
            throw ArgumentError("label " + std::to_string(labels[i]) + " at row " +
                                std::to_string(i) + " is not below n_classes " +
                                std::to_string(n_classes));
        }
    }
    if (!features.allFinite()) {
        throw ArgumentError("feature set contains non-finite values");
    }
}

FeatureSet FeatureSet::subset(std::span<const std::size_t> indices) const {
    FeatureSet out;
    out.n_classes = n_classes;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(indices[r]));
        out.labels.push_back(labels[indices[r]]);
    }
    return out;
}

std::vector<std::uint8_t> encode_features(const FeatureSet &set) {
    set.validate();
    detail::ByteWriter w;
    w.raw(kMagic);
    w.u32(static_cast<std::uint32_t>(set.n_samples()));
    w.u32(static_cast<std::uint32_t>(set.feature_dim()));
    w.u32(static_cast<std::uint32_t>(set.n_classes));
    for (Eigen::Index r = 0; r < set.features.rows(); ++r) {
        for (Eigen::Index c = 0; c < set.features.cols(); ++c) {
            w.f32(static_cast<float>(set.features(r, c)));
        }
    }
    for (std::uint32_t label : set.labels) {
        w.u32(label);
    }
    return w.take();
}

FeatureSet decode_features(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) {
        throw FormatError("truncated header: expected " + std::to_string(kHeaderBytes) +
                          " bytes, got " + std::to_string(bytes.size()));
    }
    detail::ByteReader r(bytes);
    const std::string magic = r.raw(4);
    if (magic != kMagic) {
        throw FormatError("bad magic '" + printable(magic) + "', expected 'QFV1'");
    }
    const std::uint64_t n = r.u32();
    const std::uint64_t d = r.u32();
    const std::uint64_t k = r.u32();
    if (n == 0 || d == 0 || k == 0) {
        throw FormatError("header declares an empty dimension (n_samples " + std::to_string(n) +
                          ", feature_dim " + std::to_string(d) + ", n_classes " +
                          std::to_string(k) + ")");
    }
    if (k > n) {
        throw FormatError("header declares " + std::to_string(k) + " classes for only " +
                          std::to_string(n) + " samples");
    }
    // n, d < 2^32 so n * (d + 1) fits; the factor 4 is checked separately.
    const std::uint64_t words = n * (d + 1);
    if (words > (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 4) {
        throw FormatError("header declares an impossibly large payload");
    }
    const std::uint64_t expected = kHeaderBytes + 4 * words;
    if (bytes.size() != expected) {
        throw FormatError(std::string(bytes.size() < expected ? "truncated payload" : "trailing bytes") +
                          ": header declares " + std::to_string(n) + " x " + std::to_string(d) +
                          " features, expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()));
    }

    FeatureSet set;
    set.n_classes = k;
    set.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index row = 0; row < set.features.rows(); ++row) {
        for (Eigen::Index col = 0; col < set.features.cols(); ++col) {
            const float v = r.f32();
            if (!std::isfinite(v)) {
                throw FormatError("non-finite feature at row " + std::to_string(row) + ", column " +
                                  std::to_string(col));
            }
            set.features(row, col) = v;
        }
    }
    std::vector<std::size_t> counts(k, 0);
    set.labels.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint32_t label = r.u32();
        if (label >= k) {
            throw FormatError("label " + std::to_string(label) + " at row " + std::to_string(i) +
                              " is not below n_classes " + std::to_string(k));
        }
        set.labels[i] = label;
        ++counts[label];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            throw FormatError("class " + std::to_string(c) + " of " + std::to_string(k) +
                              " has no samples");
        }
    }
    return set;
}

FeatureSet load_features(const std::filesystem::path &path) {
    const auto bytes = detail::read_file(path);
    try {
        return decode_features(bytes);
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_features(const FeatureSet &set, const std::filesystem::path &path) {
    const auto bytes = encode_features(set);
    detail::write_file(path, bytes);
}

SplitIndices split_indices(const FeatureSet &set, const SplitSpec &spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ArgumentError("train fraction must lie in (0, 1), got " +
                            std::to_string(spec.train_fraction));
    }
    set.validate();
    std::mt19937_64 rng(spec.seed);
    std::vector<std::vector<std::size_t>> groups;
    if (spec.stratified) {
        groups.resize(set.n_classes);
        for (std::size_t i = 0; i < set.n_samples(); ++i) {
            groups[set.labels[i]].push_back(i);
        }
        for (std::size_t c = 0; c < groups.size(); ++c) {
            if (groups[c].empty()) {
                throw ArgumentError("class " + std::to_string(c) +
                                    " has no samples; cannot stratify");
            }
        }
    } else {
        groups.emplace_back(set.n_samples());
        for (std::size_t i = 0; i < set.n_samples(); ++i) {
            groups[0][i] = i;
        }
    }

    SplitIndices out;
    for (auto &group : groups) {
        std::shuffle(group.begin(), group.end(), rng);
        const auto n_train = static_cast<std::size_t>(
            std::round(spec.train_fraction * static_cast<double>(group.size())));
        out.train.insert(out.train.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.insert(out.test.end(), group.begin() + static_cast<std::ptrdiff_t>(n_train), group.end());
    }
    if (out.train.empty() || out.test.empty()) {
        throw ArgumentError("split of " + std::to_string(set.n_samples()) + " samples at fraction " +
                            std::to_string(spec.train_fraction) + " leaves an empty side");
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<FeatureSet, FeatureSet> split(const FeatureSet &set, const SplitSpec &spec) {
    const SplitIndices idx = split_indices(set, spec);
    return {set.subset(idx.train), set.subset(idx.test)};
}

Standardization Standardization::fit(const FeatureSet &train) {
    if (train.n_samples() == 0) {
        throw ArgumentError("cannot fit standardization on an empty set");
    }
    const auto n = static_cast<double>(train.n_samples());
    Standardization stats;
    stats.mean.resize(train.features.cols());
    stats.scale.resize(train.features.cols());
    for (Eigen::Index c = 0; c < train.features.cols(); ++c) {
        const auto column = train.features.col(c);
        double mean = column.sum() / n;
        if (column.minCoeff() == column.maxCoeff()) {
            mean = column[0];
        }
        const double var = (column.array() - mean).square().sum() / n;
        stats.mean[c] = mean;
        stats.scale[c] = std::max(std::sqrt(var), kStdFloor);
    }
    return stats;
}

FeatureSet Standardization::apply(const FeatureSet &set) const {
    if (set.features.cols() != mean.size()) {
        throw ArgumentError("standardization fitted on " + std::to_string(mean.size()) +
                            " dimensions, applied to " + std::to_string(set.features.cols()));
    }
    FeatureSet out = set;
    out.features = (set.features.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
    return out;
}

FeatureSet Standardization::invert(const FeatureSet &set) const {
    if (set.features.cols() != mean.size()) {
        throw ArgumentError("standardization dimension mismatch");
    }
    FeatureSet out = set;
    out.features = (set.features.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
                   mean.transpose();
    return out;
}

StandardizedSplit standardize(const FeatureSet &train, const FeatureSet &test) {
    Standardization stats = Standardization::fit(train);
    return {stats.apply(train), stats.apply(test), std::move(stats)};
}

FeatureSet synth_gaussian(std::size_t n_per_class, std::size_t feature_dim, std::size_t n_classes,
                          double class_separation, std::uint64_t seed) {
    if (n_classes < 2) {
        throw ArgumentError("synthetic data needs at least 2 classes");
    }
    if (feature_dim + 1 < n_classes) {
        throw ArgumentError("feature_dim " + std::to_string(feature_dim) + " cannot hold " +
                            std::to_string(n_classes) + " simplex-placed class centers");
    }
    if (n_per_class == 0) {
        throw ArgumentError("n_per_class must be positive");
    }
    const auto k = static_cast<Eigen::Index>(n_classes);
    const auto d = static_cast<Eigen::Index>(feature_dim);

    // Simplex vertices e_c - centroid, scaled to pairwise distance
    // class_separation, expressed in a (k-1)-dim basis of their span.
    const Eigen::MatrixXd vertices =
        (Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k))) *
        (class_separation / std::numbers::sqrt2);
    const Eigen::MatrixXd span_basis =
        Eigen::HouseholderQR<Eigen::MatrixXd>(vertices).householderQ() * Eigen::MatrixXd::Identity(k, k - 1);
    const Eigen::MatrixXd coords = vertices * span_basis;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd gaussian(d, k - 1);
    for (Eigen::Index c = 0; c < gaussian.cols(); ++c) {
        for (Eigen::Index r = 0; r < gaussian.rows(); ++r) {
            gaussian(r, c) = normal(rng);
        }
    }
    const Eigen::MatrixXd directions =
        Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ() * Eigen::MatrixXd::Identity(d, k - 1);
    const Eigen::MatrixXd centers = coords * directions.transpose(); // k x d

    FeatureSet set;
    set.n_classes = n_classes;
    set.features.resize(static_cast<Eigen::Index>(n_per_class * n_classes), d);
    set.labels.reserve(n_per_class * n_classes);
    Eigen::Index row = 0;
    for (Eigen::Index c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n_per_class; ++i, ++row) {
            for (Eigen::Index j = 0; j < d; ++j) {
                const double v = centers(c, j) + normal(rng);
                set.features(row, j) = static_cast<double>(static_cast<float>(v));
            }
            set.labels.push_back(static_cast<std::uint32_t>(c));
        }
    }
    return set;
}

} // namespace qshield::data
