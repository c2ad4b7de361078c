#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nids/dataset.hpp"
#include "nids/rng.hpp"

namespace nids {

// --- column filtering -------------------------------------------------------

struct DropResult {
    Dataset dataset;
    std::vector<std::string> removed;
};

// Removes features whose sample variance is exactly zero (all values equal).
DropResult drop_zero_variance(const Dataset &ds);

// Greedy first-kept-wins correlation filter: scanning columns left to right,
// a feature is removed when |Pearson r| >= threshold against any feature
// already kept.
DropResult drop_correlated(const Dataset &ds, double threshold);

// --- splitting ---------------------------------------------------------------

enum class SplitOrder { kShuffled, kContiguous };

struct SplitResult {
    Dataset train;
    Dataset val;
    Dataset test;
};

// Per-class partition into three splits; each class is shuffled (or kept in
// file order for contiguous-time splits) and divided by cumulative rounding,
// so every split's share of a class is within 1/n_c of the requested
// fraction. Requires >= 3 samples per class.
SplitResult stratified_split(const Dataset &ds, std::array<double, 3> fractions, Rng &rng,
                             SplitOrder order = SplitOrder::kShuffled);

// --- scalers ------------------------------------------------------------------

// Monotone empirical-CDF map onto [0,1] via linear interpolation between
// stored training quantiles. Values beyond the fitted range clip to 0 or 1;
// a collapsed table (constant feature) maps everything to 0.
struct QuantileTransform {
    std::size_t n_quantiles = 0;
    std::vector<std::vector<double>> references; // per feature, sorted
};

QuantileTransform quantile_fit(const Matrix &train_features, std::size_t n_quantiles);
Matrix quantile_apply(const QuantileTransform &qt, const Matrix &features);

// (x - median) / IQR per feature; IQR of 0 falls back to a divisor of 1.
struct RobustScaler {
    std::vector<double> median;
    std::vector<double> iqr;
};

RobustScaler robust_scale_fit(const Matrix &train_features);
Matrix robust_scale_apply(const RobustScaler &rs, const Matrix &features);

// --- PCA -----------------------------------------------------------------------

struct PcaBasis {
    std::vector<double> mean;
    Matrix components;                   // d x k, orthonormal columns
    std::vector<double> explained_ratio; // kept components, non-increasing
};

// Centers on the training mean and keeps the smallest number of principal
// components whose cumulative explained-variance ratio reaches the target.
PcaBasis pca_fit(const Matrix &train_features, double variance_target = 0.99);
Matrix pca_apply(const PcaBasis &basis, const Matrix &features);

// Train-fitted [0,1] rescale used after PCA so the projected features can
// feed sigmoid visible units.
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;
};

MinMaxScaler minmax_fit(const Matrix &train_features);
Matrix minmax_apply(const MinMaxScaler &mm, const Matrix &features);

// --- fitted pipeline state ------------------------------------------------------

enum class ScalerKind { kQuantile, kRobust, kNone };

struct PipelineArtifact {
    std::vector<std::string> kept_columns; // after both drops, before PCA
    ScalerKind scaler = ScalerKind::kQuantile;
    QuantileTransform quantile;
    RobustScaler robust;
    std::optional<PcaBasis> pca;
    std::optional<MinMaxScaler> post_rescale;
    std::uint64_t fitted_rows = 0;

    // Applies the fitted scaler/PCA/rescale chain to rows that already use
    // kept_columns order.
    Matrix transform(const Matrix &features) const;
};

// Versioned artifact file: human-readable text header (format version,
// column names, shapes) followed by a checksummed f64 payload; round-trips
// bit-exactly.
void save_artifact(const PipelineArtifact &art, const std::filesystem::path &path);
PipelineArtifact load_artifact(const std::filesystem::path &path);

std::vector<std::byte> artifact_to_bytes(const PipelineArtifact &art);
PipelineArtifact artifact_from_bytes(std::span<const std::byte> bytes);

} // namespace nids
