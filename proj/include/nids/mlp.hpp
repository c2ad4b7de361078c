#pragma once

#include <vector>

#include "nids/matrix.hpp"
#include "nids/rng.hpp"
#include "nids/train.hpp"

namespace nids {

// Baseline classifier: fully connected layers with ReLU hidden activations
// and a softmax output.
struct MlpModel {
    std::vector<std::size_t> layer_sizes; // [n_in, hidden..., n_classes]
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    bool trained = false;
};

struct MlpTrainConfig {
    std::vector<std::size_t> hidden{64, 64};
    std::size_t epochs = 10;
    double learning_rate = 0.02;
    std::size_t batch_size = 64;
    double momentum = 0.9;
    std::vector<double> class_weights;
    std::vector<double> sample_weights;
    bool weighted_batch_sampling = false;
};

MlpModel make_mlp(std::size_t n_in, std::span<const std::size_t> hidden, std::size_t n_classes,
                  Rng &rng);

Matrix mlp_forward(const MlpModel &model, const Matrix &batch);
std::vector<int> mlp_predict(const MlpModel &model, const Matrix &batch);

struct MlpGradients {
    double loss = 0.0;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

MlpGradients mlp_backprop(const MlpModel &model, const Matrix &x, const std::vector<int> &y,
                          std::span<const double> sample_weights);

struct MlpTrainResult {
    MlpModel model;
    TrainHistory history;
};

// SGD with momentum on (optionally weighted) cross-entropy. Keeps the
// parameters of the epoch with the best validation macro-F1.
MlpTrainResult mlp_train(const Matrix &x, const std::vector<int> &y, const Matrix &x_val,
                         const std::vector<int> &y_val, std::size_t n_classes,
                         const MlpTrainConfig &cfg, Rng &rng);

} // namespace nids
