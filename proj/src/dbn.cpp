#include "nids/dbn.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nids/eval.hpp"

namespace nids {

namespace {

void check_arch(const DbnArchitecture &arch) {
    if (arch.layer_sizes.size() < 2)
        throw ConfigError("DBN architecture needs at least two layers");
    for (std::size_t s : arch.layer_sizes)
        if (s == 0)
            throw ConfigError("DBN layer sizes must be positive");
    if (arch.n_classes < 2)
        throw ConfigError("DBN needs at least two classes");
}

void add_row_bias(Matrix &m, std::span<const double> bias) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        auto row = m.row(r);
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] += bias[j];
    }
}

Matrix head_logits(const DbnModel &model, const Matrix &hidden) {
    Matrix logits = matmul(hidden, model.head_w);
    add_row_bias(logits, model.head_b);
    return logits;
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

struct ParamRefs {
    std::vector<std::span<double>> tensors;
};

ParamRefs collect_params(DbnModel &model) {
    ParamRefs refs;
    for (auto &rbm : model.rbms) {
        refs.tensors.push_back(rbm.w.data);
        refs.tensors.push_back(rbm.hbias);
    }
    refs.tensors.push_back(model.head_w.data);
    refs.tensors.push_back(model.head_b);
    return refs;
}

std::vector<std::span<const double>> collect_grads(const DbnGradients &g) {
    std::vector<std::span<const double>> out;
    for (std::size_t l = 0; l < g.w.size(); ++l) {
        out.push_back(g.w[l].data);
        out.push_back(g.hbias[l]);
    }
    out.push_back(g.head_w.data);
    out.push_back(g.head_b);
    return out;
}

} // namespace

DbnPretrainResult greedy_pretrain(const DbnArchitecture &arch, const Matrix &data,
                                  const CdConfig &cfg, Rng &rng) {
    check_arch(arch);
    if (data.cols != arch.layer_sizes.front())
        throw ConfigError("greedy_pretrain: data width does not match the input layer");

    DbnPretrainResult result;
    result.model.arch = arch;
    Matrix layer_input = data;
    const Rng stack_rng = rng.child("rbm");
    for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
        Rng layer_rng = stack_rng.child(l);
        RbmParams rbm = make_rbm(arch.layer_sizes[l], arch.layer_sizes[l + 1], layer_rng);
        result.recon_mse.push_back(pretrain(rbm, layer_input, cfg, layer_rng));
        layer_input = prop_up(rbm, layer_input);
        result.model.rbms.push_back(std::move(rbm));
    }
    result.model.pretrained = true;
    return result;
}

Matrix dbn_hidden(const DbnModel &model, const Matrix &batch) {
    Matrix a = batch;
    for (const auto &rbm : model.rbms)
        a = prop_up(rbm, a);
    return a;
}

Matrix dbn_forward(const DbnModel &model, const Matrix &batch) {
    if (!model.head_ready)
        throw StateError("dbn_forward: classification head not initialised");
    return softmax_rows(head_logits(model, dbn_hidden(model, batch)));
}

std::vector<int> dbn_predict(const DbnModel &model, const Matrix &batch) {
    return argmax_rows(dbn_forward(model, batch));
}

DbnGradients dbn_backprop(const DbnModel &model, const Matrix &x, const std::vector<int> &y,
                          std::span<const double> sample_weights) {
    if (!model.head_ready)
        throw StateError("dbn_backprop: classification head not initialised");

    // forward with cached activations
    std::vector<Matrix> acts;
    acts.reserve(model.rbms.size() + 1);
    acts.push_back(x);
    for (const auto &rbm : model.rbms)
        acts.push_back(prop_up(rbm, acts.back()));
    Matrix logits = head_logits(model, acts.back());

    DbnGradients grads;
    Matrix dlogits;
    grads.loss = softmax_xent(logits, y, sample_weights, &dlogits);

    grads.head_w = matmul_tn(acts.back(), dlogits);
    grads.head_b.assign(model.head_b.size(), 0.0);
    for (std::size_t r = 0; r < dlogits.rows; ++r)
        for (std::size_t j = 0; j < dlogits.cols; ++j)
            grads.head_b[j] += dlogits(r, j);

    Matrix da = matmul_nt(dlogits, model.head_w);
    grads.w.resize(model.rbms.size());
    grads.hbias.resize(model.rbms.size());
    for (std::size_t l = model.rbms.size(); l-- > 0;) {
        const Matrix &a = acts[l + 1];
        Matrix dz(a.rows, a.cols);
        for (std::size_t i = 0; i < a.size(); ++i)
            dz.data[i] = da.data[i] * a.data[i] * (1.0 - a.data[i]);
        grads.w[l] = matmul_tn(acts[l], dz);
        grads.hbias[l].assign(model.rbms[l].hbias.size(), 0.0);
        for (std::size_t r = 0; r < dz.rows; ++r)
            for (std::size_t j = 0; j < dz.cols; ++j)
                grads.hbias[l][j] += dz(r, j);
        if (l > 0)
            da = matmul_nt(dz, model.rbms[l].w);
    }
    return grads;
}

TrainHistory fine_tune(DbnModel &model, const Matrix &x, const std::vector<int> &y,
                       const Matrix &x_val, const std::vector<int> &y_val,
                       const FineTuneConfig &cfg, Rng &rng) {
    check_labels(y, model.arch.n_classes);
    check_labels(y_val, model.arch.n_classes);
    if (x.rows != y.size() || x_val.rows != y_val.size())
        throw ShapeError("fine_tune: feature/label row mismatch");
    if (cfg.batch_size == 0 || cfg.epochs == 0)
        throw ConfigError("fine_tune: epochs and batch size must be positive");
    if (!cfg.class_weights.empty() && cfg.class_weights.size() != model.arch.n_classes)
        throw ConfigError("fine_tune: class weight count must equal n_classes");

    const std::size_t last_hidden = model.arch.layer_sizes.back();
    if (!model.head_ready) {
        Rng head_rng = rng.child("head");
        model.head_w = xavier_init(last_hidden, model.arch.n_classes, head_rng);
        model.head_b.assign(model.arch.n_classes, 0.0);
        model.head_ready = true;
    }

    const std::vector<double> weights =
        resolve_sample_weights(y, cfg.class_weights, cfg.sample_weights);

    // optimiser state per tensor, in collect_params order
    auto refs = collect_params(model);
    std::vector<AdamState> adam(refs.tensors.size());
    std::vector<std::size_t> adam_t(refs.tensors.size(), 0);
    for (std::size_t i = 0; i < refs.tensors.size(); ++i)
        adam[i].init(refs.tensors[i].size());

    TrainHistory history;
    DbnModel best = model;
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
            DbnGradients grads = dbn_backprop(model, bx, by, bw);
            auto gspans = collect_grads(grads);
            refs = collect_params(model);
            for (std::size_t i = 0; i < refs.tensors.size(); ++i) {
                if (cfg.optimiser == Optimiser::kAdam) {
                    adam_t[i] += 1;
                    adam[i].step(refs.tensors[i], gspans[i], cfg.learning_rate, cfg.adam_beta1,
                                 cfg.adam_beta2, cfg.adam_eps, adam_t[i]);
                } else {
                    sgd_step(refs.tensors[i], gspans[i], cfg.learning_rate);
                }
            }
            double bw_total = bw.empty() ? static_cast<double>(batch_idx.size())
                                         : std::accumulate(bw.begin(), bw.end(), 0.0);
            loss_sum += grads.loss * bw_total;
            weight_sum += bw_total;
        }

        EpochStats stats;
        stats.train_loss = loss_sum / weight_sum;
        if (x_val.rows > 0) {
            Matrix val_logits = head_logits(model, dbn_hidden(model, x_val));
            stats.val_loss = softmax_xent(val_logits, y_val, {}, nullptr);
            auto cm = confusion(y_val, argmax_rows(softmax_rows(val_logits)),
                                model.arch.n_classes);
            stats.val_macro_f1 = metrics(cm).macro.f1;
            if (stats.val_macro_f1 > best_f1) {
                best_f1 = stats.val_macro_f1;
                best = model;
                history.best_epoch = epoch + 1;
            }
        }
        history.epochs.push_back(stats);
    }

    if (x_val.rows > 0 && history.best_epoch > 0)
        model = std::move(best);
    model.fine_tuned = true;
    return history;
}

} // namespace nids
