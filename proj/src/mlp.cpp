#include "nids/mlp.hpp"

#include <algorithm>
#include <numeric>

#include "nids/eval.hpp"
#include "nids/kernels.hpp"

namespace nids {

namespace {

void add_row_bias(Matrix &m, std::span<const double> bias) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        auto row = m.row(r);
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] += bias[j];
    }
}

// activations per layer; pre[l] holds the pre-activation of layer l+1
struct ForwardCache {
    std::vector<Matrix> acts;
    Matrix logits;
};

ForwardCache run_forward(const MlpModel &model, const Matrix &x) {
    ForwardCache cache;
    cache.acts.push_back(x);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Matrix z = matmul(cache.acts.back(), model.weights[l]);
        add_row_bias(z, model.biases[l]);
        if (l + 1 < model.weights.size())
            cache.acts.push_back(relu(z));
        else
            cache.logits = std::move(z);
    }
    return cache;
}

std::vector<int> argmax_rows(const Matrix &probs) {
    std::vector<int> out(probs.rows);
    for (std::size_t i = 0; i < probs.rows; ++i) {
        auto row = probs.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < row.size(); ++j)
            if (row[j] > row[best])
                best = j;
        out[i] = static_cast<int>(best);
    }
    return out;
}

} // namespace

MlpModel make_mlp(std::size_t n_in, std::span<const std::size_t> hidden, std::size_t n_classes,
                  Rng &rng) {
    if (n_in == 0 || n_classes < 2)
        throw ConfigError("make_mlp: invalid layer sizes");
    MlpModel model;
    model.layer_sizes.push_back(n_in);
    model.layer_sizes.insert(model.layer_sizes.end(), hidden.begin(), hidden.end());
    model.layer_sizes.push_back(n_classes);
    Rng init_rng = rng.child("init");
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        Rng layer_rng = init_rng.child(l);
        model.weights.push_back(
            xavier_init(model.layer_sizes[l], model.layer_sizes[l + 1], layer_rng));
        model.biases.emplace_back(model.layer_sizes[l + 1], 0.0);
    }
    return model;
}

Matrix mlp_forward(const MlpModel &model, const Matrix &batch) {
    if (model.weights.empty())
        throw StateError("mlp_forward: model has no layers");
    if (batch.cols != model.layer_sizes.front())
        throw ShapeError("mlp_forward: batch width does not match the input layer");
    ForwardCache cache = run_forward(model, batch);
    return softmax_rows(cache.logits);
}

std::vector<int> mlp_predict(const MlpModel &model, const Matrix &batch) {
    return argmax_rows(mlp_forward(model, batch));
}

MlpGradients mlp_backprop(const MlpModel &model, const Matrix &x, const std::vector<int> &y,
                          std::span<const double> sample_weights) {
    ForwardCache cache = run_forward(model, x);
    MlpGradients grads;
    Matrix dz;
    grads.loss = softmax_xent(cache.logits, y, sample_weights, &dz);
    grads.weights.resize(model.weights.size());
    grads.biases.resize(model.weights.size());

    for (std::size_t l = model.weights.size(); l-- > 0;) {
        grads.weights[l] = matmul_tn(cache.acts[l], dz);
        grads.biases[l].assign(model.biases[l].size(), 0.0);
        for (std::size_t r = 0; r < dz.rows; ++r)
            for (std::size_t j = 0; j < dz.cols; ++j)
                grads.biases[l][j] += dz(r, j);
        if (l == 0)
            break;
        Matrix da = matmul_nt(dz, model.weights[l]);
        // ReLU backward: gradient is zero wherever the activation was zero
        // (pre-activation <= 0).
        const Matrix &a = cache.acts[l];
        dz = Matrix(da.rows, da.cols);
        for (std::size_t i = 0; i < da.size(); ++i)
            dz.data[i] = a.data[i] > 0.0 ? da.data[i] : 0.0;
    }
    return grads;
}

MlpTrainResult mlp_train(const Matrix &x, const std::vector<int> &y, const Matrix &x_val,
                         const std::vector<int> &y_val, std::size_t n_classes,
                         const MlpTrainConfig &cfg, Rng &rng) {
    check_labels(y, n_classes);
    check_labels(y_val, n_classes);
    if (x.rows != y.size() || x_val.rows != y_val.size())
        throw ShapeError("mlp_train: feature/label row mismatch");
    if (cfg.batch_size == 0 || cfg.epochs == 0)
        throw ConfigError("mlp_train: epochs and batch size must be positive");
    if (!cfg.class_weights.empty() && cfg.class_weights.size() != n_classes)
        throw ConfigError("mlp_train: class weight count must equal n_classes");

    MlpTrainResult result;
    result.model = make_mlp(x.cols, cfg.hidden, n_classes, rng);
    MlpModel &model = result.model;

    const std::vector<double> weights =
        resolve_sample_weights(y, cfg.class_weights, cfg.sample_weights);

    std::vector<MomentumState> wstate(model.weights.size());
    std::vector<MomentumState> bstate(model.weights.size());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        wstate[l].init(model.weights[l].size());
        bstate[l].init(model.biases[l].size());
    }

    MlpModel best = model;
    double best_f1 = -1.0;
    const Rng batches_root = rng.child("batches");

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto plan = cfg.weighted_batch_sampling
                        ? epoch_batches_weighted(weights.empty() ? std::vector<double>(y.size(), 1.0)
                                                                 : weights,
                                                 cfg.batch_size, batches_root.child(epoch))
                        : epoch_batches(x.rows, cfg.batch_size, batches_root.child(epoch));
        double loss_sum = 0.0;
        double weight_sum = 0.0;
        for (const auto &batch_idx : plan) {
            Matrix bx = gather_rows(x, batch_idx);
            std::vector<int> by = gather_labels(y, batch_idx);
            std::vector<double> bw;
            if (!weights.empty() && !cfg.weighted_batch_sampling) {
                bw.resize(batch_idx.size());
                for (std::size_t i = 0; i < batch_idx.size(); ++i)
                    bw[i] = weights[batch_idx[i]];
            }
            MlpGradients grads = mlp_backprop(model, bx, by, bw);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                wstate[l].step(model.weights[l].data, grads.weights[l].data, cfg.learning_rate,
                               cfg.momentum);
                bstate[l].step(model.biases[l], grads.biases[l], cfg.learning_rate, cfg.momentum);
            }
            const double bw_total = bw.empty() ? static_cast<double>(batch_idx.size())
                                               : std::accumulate(bw.begin(), bw.end(), 0.0);
            loss_sum += grads.loss * bw_total;
            weight_sum += bw_total;
        }

        EpochStats stats;
        stats.train_loss = loss_sum / weight_sum;
        if (x_val.rows > 0) {
            ForwardCache cache = run_forward(model, x_val);
            stats.val_loss = softmax_xent(cache.logits, y_val, {}, nullptr);
            auto cm = confusion(y_val, argmax_rows(softmax_rows(cache.logits)), n_classes);
            stats.val_macro_f1 = metrics(cm).macro.f1;
            if (stats.val_macro_f1 > best_f1) {
                best_f1 = stats.val_macro_f1;
                best = model;
                result.history.best_epoch = epoch + 1;
            }
        }
        result.history.epochs.push_back(stats);
    }

    if (x_val.rows > 0 && result.history.best_epoch > 0)
        model = std::move(best);
    model.trained = true;
    return result;
}

} // namespace nids
