#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nids/matrix.hpp"
#include "nids/rng.hpp"

namespace nids {

enum class Optimiser { kAdam, kSgd };

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;

    void init(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
    }

    void step(std::span<double> param, std::span<const double> grad, double lr, double beta1,
              double beta2, double eps, std::size_t t);
};

struct MomentumState {
    std::vector<double> velocity;

    void init(std::size_t n) { velocity.assign(n, 0.0); }

    // v = momentum * v - lr * g; p += v
    void step(std::span<double> param, std::span<const double> grad, double lr, double momentum);
};

// Plain SGD step, p -= lr * g.
void sgd_step(std::span<double> param, std::span<const double> grad, double lr);

// Weighted softmax cross-entropy over a batch of logit rows.
//   loss = sum_i w_i * (logsumexp(logits_i) - logits_i[y_i]) / sum_i w_i
// dlogits (when non-null) receives w_i * (softmax(logits_i) - onehot_i) / sum w.
// An empty weight span means all ones.
double softmax_xent(const Matrix &logits, const std::vector<int> &labels,
                    std::span<const double> weights, Matrix *dlogits);

// Per-sample weights for a label vector: sample_weights wins over
// class_weights; both empty yields all ones.
std::vector<double> resolve_sample_weights(const std::vector<int> &labels,
                                           std::span<const double> class_weights,
                                           std::span<const double> sample_weights);

void check_labels(const std::vector<int> &labels, std::size_t n_classes);

// Mini-batch index plan for one epoch. Shuffled partition by default; with
// weighted sampling each batch is drawn with replacement with probability
// proportional to the sample weight (the weight then stays out of the loss).
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size,
                                                    Rng rng);
std::vector<std::vector<std::size_t>> epoch_batches_weighted(std::span<const double> weights,
                                                             std::size_t batch_size, Rng rng);

Matrix gather_rows(const Matrix &m, std::span<const std::size_t> idx);
std::vector<int> gather_labels(const std::vector<int> &labels, std::span<const std::size_t> idx);

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_macro_f1 = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0; // 1-based; 0 when no epoch ran
};

} // namespace nids
