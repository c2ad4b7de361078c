#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nids/balancing.hpp"
#include "nids/dbn.hpp"
#include "nids/mlp.hpp"
#include "nids/pipeline.hpp"
#include "nids/rbm.hpp"

namespace nids {

enum class ModelKind { kDbn, kMlp };
enum class LabelMapKind { kCicids2017, kIdentity };

// Experiment configuration parsed from the sectioned key=value file format.
// Unknown sections or keys are rejected.
struct ExperimentConfig {
    std::uint64_t seed = 42;

    // [data]
    std::vector<std::filesystem::path> csv_paths;
    LabelMapKind label_map = LabelMapKind::kCicids2017;

    // [pipeline]
    double correlation_threshold = 0.9;
    std::size_t n_quantiles = 1000;
    ScalerKind scaler = ScalerKind::kQuantile;
    std::optional<double> pca_variance_target = 0.99;
    bool post_pca_rescale = true;
    std::array<double, 3> split_fractions{0.6, 0.2, 0.2};
    SplitOrder split_order = SplitOrder::kShuffled;

    // [balance]
    BalanceStrategy balance_strategy = BalanceStrategy::kNone;
    std::vector<std::pair<std::string, std::size_t>> balance_targets; // by class name
    std::size_t smote_k = 5;

    // [model]
    ModelKind model = ModelKind::kDbn;
    // hidden layer sizes; the input width always comes from the data
    std::vector<std::size_t> hidden_layers{128, 256, 128, 128, 64};

    // [pretrain]
    CdConfig pretrain;

    // [finetune]
    FineTuneConfig finetune;

    // [mlp]
    MlpTrainConfig mlp;

    // [sweep]
    std::vector<BalanceStrategy> sweep_strategies{
        BalanceStrategy::kNone,          BalanceStrategy::kUndersample,
        BalanceStrategy::kSmote,         BalanceStrategy::kSmoteUndersample,
        BalanceStrategy::kClassWeights,  BalanceStrategy::kSampleWeights,
    };
};

ExperimentConfig parse_config_text(const std::string &text);
ExperimentConfig load_config(const std::filesystem::path &path);

// Canonical text round-trip (used to echo the resolved configuration into
// model bundles).
std::string config_to_text(const ExperimentConfig &cfg);

} // namespace nids
