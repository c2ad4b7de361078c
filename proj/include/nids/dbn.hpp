#pragma once

#include <vector>

#include "nids/rbm.hpp"
#include "nids/train.hpp"

namespace nids {

struct DbnArchitecture {
    // Unit counts from the input layer upward; consecutive entries define
    // each RBM's (visible, hidden) pair.
    std::vector<std::size_t> layer_sizes{49, 128, 256, 128, 128, 64};
    std::size_t n_classes = 6;
};

struct DbnModel {
    DbnArchitecture arch;
    std::vector<RbmParams> rbms;
    Matrix head_w; // last hidden size x n_classes
    std::vector<double> head_b;
    bool pretrained = false;
    bool head_ready = false;
    bool fine_tuned = false;
};

struct DbnPretrainResult {
    DbnModel model;
    std::vector<std::vector<double>> recon_mse; // per RBM, per epoch
};

// Layer-by-layer unsupervised pretraining. RBM l trains on the deterministic
// hidden probabilities of layer l-1 (no sampling between layers).
DbnPretrainResult greedy_pretrain(const DbnArchitecture &arch, const Matrix &data,
                                  const CdConfig &cfg, Rng &rng);

// Representation after the full sigmoid stack (visible biases unused).
Matrix dbn_hidden(const DbnModel &model, const Matrix &batch);

// Class probabilities: sigmoid stack, then softmax head.
Matrix dbn_forward(const DbnModel &model, const Matrix &batch);

// Argmax of dbn_forward; ties resolve to the lowest class index.
std::vector<int> dbn_predict(const DbnModel &model, const Matrix &batch);

struct FineTuneConfig {
    std::size_t epochs = 30;
    double learning_rate = 0.001;
    std::size_t batch_size = 128;
    Optimiser optimiser = Optimiser::kAdam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::vector<double> class_weights;  // empty = unweighted
    std::vector<double> sample_weights; // per training row; overrides class weights
    bool weighted_batch_sampling = false;
};

// Supervised fine-tuning by backpropagation through the unrolled stack.
// The head is Xavier-initialised if missing. Keeps the parameters of the
// epoch with the best validation macro-F1.
TrainHistory fine_tune(DbnModel &model, const Matrix &x, const std::vector<int> &y,
                       const Matrix &x_val, const std::vector<int> &y_val,
                       const FineTuneConfig &cfg, Rng &rng);

// Analytic loss + gradients for one batch; exposed for gradient checking.
struct DbnGradients {
    double loss = 0.0;
    std::vector<Matrix> w;                // per RBM layer
    std::vector<std::vector<double>> hbias;
    Matrix head_w;
    std::vector<double> head_b;
};

DbnGradients dbn_backprop(const DbnModel &model, const Matrix &x, const std::vector<int> &y,
                          std::span<const double> sample_weights);

} // namespace nids
