#pragma once

#include <span>
#include <vector>

#include "nids/kernels.hpp"
#include "nids/matrix.hpp"
#include "nids/rng.hpp"

namespace nids {

// Restricted Boltzmann Machine parameters. W couples visible unit i with
// hidden unit j; vbias/hbias are the per-unit offsets of the energy model.
struct RbmParams {
    Matrix w; // n_visible x n_hidden
    std::vector<double> vbias;
    std::vector<double> hbias;

    std::size_t n_visible() const { return w.rows; }
    std::size_t n_hidden() const { return w.cols; }
};

// Xavier-initialised weights, zero biases.
RbmParams make_rbm(std::size_t n_visible, std::size_t n_hidden, Rng &rng);

struct CdConfig {
    int gibbs_steps = 1;
    double learning_rate = 0.1;
    double momentum = 0.9;
    std::size_t batch_size = 64;
    std::size_t epochs = 10;
};

// Momentum buffers matching an RbmParams layout.
struct CdVelocity {
    Matrix w;
    std::vector<double> vbias;
    std::vector<double> hbias;

    static CdVelocity zeros_like(const RbmParams &p);
};

// Energy of one joint configuration:
//   E(v,h) = -sum_i b_i v_i - sum_j c_j h_j - sum_ij v_i h_j w_ij
double energy(const RbmParams &p, std::span<const double> v, std::span<const double> h);

// log of the normalising constant, summing exp(-E) over every joint state.
// Marginalises hidden units analytically, then enumerates the 2^n_visible
// visible states in log space. Guarded: n_visible + n_hidden <= 20.
double log_partition(const RbmParams &p);
double partition_function(const RbmParams &p);

// p(v) with hidden units summed out. Same enumeration guard.
double marginal_v(const RbmParams &p, std::span<const double> v);

// Hidden conditional probabilities sigmoid(c + v W) for a batch of visible
// rows, and the symmetric visible conditional sigmoid(b + h W^T).
Matrix prop_up(const RbmParams &p, const Matrix &v);
Matrix prop_down(const RbmParams &p, const Matrix &h);

struct GibbsResult {
    Matrix h0_probs; // p(h|v0)
    Matrix vk_probs; // visible probabilities after k steps
    Matrix hk_probs; // hidden probabilities after k steps
};

// k alternating Gibbs steps starting from a batch of visible rows. Hidden
// states are sampled binary at every step; intermediate visible states are
// sampled binary as well, but the final step returns probabilities on both
// sides.
GibbsResult gibbs_chain(const RbmParams &p, const Matrix &v0, int k, Rng &rng);

// One Contrastive Divergence update on a mini-batch:
//   dW = lr * (v0^T h0_probs - vk^T hk_probs) / batch_rows
// with matching bias updates; momentum folds the previous velocity in.
// Returns the mean squared error between v0 and the first reconstruction.
double cd_update(RbmParams &p, const Matrix &batch, const CdConfig &cfg, CdVelocity &velocity,
                 Rng &rng);

// cfg.epochs passes of shuffled mini-batches (final partial batch included).
// Returns the mean squared reconstruction error of each epoch.
std::vector<double> pretrain(RbmParams &p, const Matrix &data, const CdConfig &cfg, Rng &rng);

} // namespace nids
