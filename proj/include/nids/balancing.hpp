#pragma once

#include <map>
#include <string>
#include <vector>

#include "nids/dataset.hpp"
#include "nids/rng.hpp"

namespace nids {

enum class BalanceStrategy {
    kNone,
    kUndersample,
    kSmote,
    kSmoteUndersample,
    kClassWeights,
    kSampleWeights,
};

BalanceStrategy balance_strategy_from_name(const std::string &name);
const char *balance_strategy_name(BalanceStrategy s);

struct BalanceSpec {
    BalanceStrategy strategy = BalanceStrategy::kNone;
    // class index -> target count; empty means "derive with default_balance_targets"
    std::map<std::size_t, std::size_t> targets;
    std::size_t smote_k = 5;
};

// Default resampling recipe when no explicit targets are given: pivot on the
// third-largest class count; larger classes are undersampled down to it and
// smaller classes SMOTE-oversampled up to it (each only when the strategy
// includes that direction).
std::map<std::size_t, std::size_t> default_balance_targets(const std::vector<std::size_t> &counts);

// Uniform sampling without replacement down to the target counts; classes
// without a target (or already at/below it) are untouched.
Dataset random_undersample(const Dataset &ds, const std::map<std::size_t, std::size_t> &targets,
                           Rng &rng);

// SMOTE: each synthetic sample interpolates between a minority sample and
// one of its k nearest same-class neighbours (exact Euclidean k-NN).
// Originals are retained; a k >= class size is clamped to size-1 (warning via
// return count in stats).
struct SmoteStats {
    std::size_t synthetic_rows = 0;
    std::size_t k_clamped_classes = 0;
};

Dataset smote(const Dataset &ds, const std::map<std::size_t, std::size_t> &targets, std::size_t k,
              Rng &rng, SmoteStats *stats = nullptr);

// w_c = N_total / (n_classes * count_c); sum_c w_c * count_c == N_total.
std::vector<double> class_weights(const std::vector<std::size_t> &counts);

// Per-sample weight = class weight of the sample's class.
std::vector<double> sample_weights(const std::vector<int> &labels, std::size_t n_classes);

std::vector<std::size_t> class_counts(const std::vector<int> &labels, std::size_t n_classes);

// Applies a resampling strategy to a training split. Weight strategies leave
// the data untouched (weights are resolved at training time).
Dataset apply_resampling(const Dataset &train, const BalanceSpec &spec, Rng &rng,
                         SmoteStats *stats = nullptr);

} // namespace nids
