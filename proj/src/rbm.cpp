#include "nids/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nids {

namespace {

constexpr std::size_t kEnumerationLimit = 20;

double softplus(double x) {
    // log(1 + e^x) without overflow.
    if (x > 0.0)
        return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// -F(v) = b.v + sum_j softplus(c_j + (v W)_j); exp(-F(v)) = sum_h exp(-E(v,h)).
double neg_free_energy(const RbmParams &p, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.n_visible(); ++i)
        acc += p.vbias[i] * v[i];
    for (std::size_t j = 0; j < p.n_hidden(); ++j) {
        double x = p.hbias[j];
        for (std::size_t i = 0; i < p.n_visible(); ++i)
            x += v[i] * p.w(i, j);
        acc += softplus(x);
    }
    return acc;
}

void check_enumeration_guard(const RbmParams &p) {
    if (p.n_visible() + p.n_hidden() > kEnumerationLimit)
        throw CapacityError("exact RBM enumeration limited to n_visible + n_hidden <= 20");
}

void check_unit_interval(const Matrix &batch, const char *op) {
    for (double x : batch.data)
        if (!(x >= 0.0 && x <= 1.0))
            throw DomainError(std::string(op) + ": visible values must lie in [0,1]");
}

// Shuffled index permutation that depends only on (seed of rng, epoch).
std::vector<std::size_t> epoch_permutation(std::size_t n, Rng rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = rng.bounded(i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

struct ChainProbs {
    Matrix h0;
    Matrix v1; // first reconstruction, used as the training monitor
    Matrix vk;
    Matrix hk;
};

ChainProbs run_chain(const RbmParams &p, const Matrix &v0, int k, Rng &rng) {
    if (k < 1)
        throw DomainError("gibbs chain needs k >= 1");
    ChainProbs out;
    out.h0 = prop_up(p, v0);
    Matrix h_state = bernoulli_sample(out.h0, rng);
    for (int step = 1; step <= k; ++step) {
        out.vk = prop_down(p, h_state);
        if (step == 1)
            out.v1 = out.vk;
        if (step < k) {
            Matrix v_state = bernoulli_sample(out.vk, rng);
            out.hk = prop_up(p, v_state);
            h_state = bernoulli_sample(out.hk, rng);
        } else {
            out.hk = prop_up(p, out.vk);
        }
    }
    return out;
}

Matrix slice_rows(const Matrix &m, const std::vector<std::size_t> &order, std::size_t begin,
                  std::size_t end) {
    Matrix out(end - begin, m.cols);
    for (std::size_t r = begin; r < end; ++r) {
        auto src = m.row(order[r]);
        std::copy(src.begin(), src.end(), out.row(r - begin).begin());
    }
    return out;
}

} // namespace

RbmParams make_rbm(std::size_t n_visible, std::size_t n_hidden, Rng &rng) {
    RbmParams p;
    p.w = xavier_init(n_visible, n_hidden, rng);
    p.vbias.assign(n_visible, 0.0);
    p.hbias.assign(n_hidden, 0.0);
    return p;
}

CdVelocity CdVelocity::zeros_like(const RbmParams &p) {
    CdVelocity v;
    v.w = Matrix(p.w.rows, p.w.cols, 0.0);
    v.vbias.assign(p.vbias.size(), 0.0);
    v.hbias.assign(p.hbias.size(), 0.0);
    return v;
}

double energy(const RbmParams &p, std::span<const double> v, std::span<const double> h) {
    if (v.size() != p.n_visible() || h.size() != p.n_hidden())
        throw ShapeError("energy: state dimensions do not match parameters");
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        e -= p.vbias[i] * v[i];
    for (std::size_t j = 0; j < h.size(); ++j)
        e -= p.hbias[j] * h[j];
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0)
            continue;
        for (std::size_t j = 0; j < h.size(); ++j)
            e -= v[i] * h[j] * p.w(i, j);
    }
    return e;
}

double log_partition(const RbmParams &p) {
    check_enumeration_guard(p);
    const std::size_t nv = p.n_visible();
    const std::size_t states = std::size_t(1) << nv;
    std::vector<double> v(nv);
    // log-sum-exp over all visible states of -F(v)
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(states);
    for (std::size_t s = 0; s < states; ++s) {
        for (std::size_t i = 0; i < nv; ++i)
            v[i] = (s >> i) & 1u ? 1.0 : 0.0;
        terms[s] = neg_free_energy(p, v);
        mx = std::max(mx, terms[s]);
    }
    double sum = 0.0;
    for (double t : terms)
        sum += std::exp(t - mx);
    return mx + std::log(sum);
}

double partition_function(const RbmParams &p) { return std::exp(log_partition(p)); }

double marginal_v(const RbmParams &p, std::span<const double> v) {
    if (v.size() != p.n_visible())
        throw ShapeError("marginal_v: vector length does not match n_visible");
    return std::exp(neg_free_energy(p, v) - log_partition(p));
}

Matrix prop_up(const RbmParams &p, const Matrix &v) {
    if (v.cols != p.n_visible())
        throw ShapeError("prop_up: batch width does not match n_visible");
    Matrix act = matmul(v, p.w);
    for (std::size_t r = 0; r < act.rows; ++r) {
        auto row = act.row(r);
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] += p.hbias[j];
    }
    return sigmoid(act);
}

Matrix prop_down(const RbmParams &p, const Matrix &h) {
    if (h.cols != p.n_hidden())
        throw ShapeError("prop_down: batch width does not match n_hidden");
    Matrix act = matmul_nt(h, p.w);
    for (std::size_t r = 0; r < act.rows; ++r) {
        auto row = act.row(r);
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] += p.vbias[i];
    }
    return sigmoid(act);
}

GibbsResult gibbs_chain(const RbmParams &p, const Matrix &v0, int k, Rng &rng) {
    ChainProbs c = run_chain(p, v0, k, rng);
    return {std::move(c.h0), std::move(c.vk), std::move(c.hk)};
}

double cd_update(RbmParams &p, const Matrix &batch, const CdConfig &cfg, CdVelocity &velocity,
                 Rng &rng) {
    if (batch.rows == 0)
        throw DomainError("cd_update: empty batch");
    if (batch.cols != p.n_visible())
        throw ShapeError("cd_update: batch width does not match n_visible");
    check_unit_interval(batch, "cd_update");

    ChainProbs c = run_chain(p, batch, cfg.gibbs_steps, rng);
    const double inv_n = 1.0 / static_cast<double>(batch.rows);
    const double lr = cfg.learning_rate;

    // <v h>_data - <v h>_recon with hidden probabilities on both sides
    Matrix pos = matmul_tn(batch, c.h0);
    Matrix neg = matmul_tn(c.vk, c.hk);
    for (std::size_t i = 0; i < p.w.size(); ++i) {
        velocity.w.data[i] =
            cfg.momentum * velocity.w.data[i] + lr * (pos.data[i] - neg.data[i]) * inv_n;
        p.w.data[i] += velocity.w.data[i];
    }
    for (std::size_t i = 0; i < p.vbias.size(); ++i) {
        double diff = 0.0;
        for (std::size_t r = 0; r < batch.rows; ++r)
            diff += batch(r, i) - c.vk(r, i);
        velocity.vbias[i] = cfg.momentum * velocity.vbias[i] + lr * diff * inv_n;
        p.vbias[i] += velocity.vbias[i];
    }
    for (std::size_t j = 0; j < p.hbias.size(); ++j) {
        double diff = 0.0;
        for (std::size_t r = 0; r < batch.rows; ++r)
            diff += c.h0(r, j) - c.hk(r, j);
        velocity.hbias[j] = cfg.momentum * velocity.hbias[j] + lr * diff * inv_n;
        p.hbias[j] += velocity.hbias[j];
    }

    double sse = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double d = batch.data[i] - c.v1.data[i];
        sse += d * d;
    }
    return sse / static_cast<double>(batch.size());
}

std::vector<double> pretrain(RbmParams &p, const Matrix &data, const CdConfig &cfg, Rng &rng) {
    if (data.rows == 0)
        throw DomainError("pretrain: no training rows");
    if (cfg.learning_rate <= 0.0)
        throw DomainError("pretrain: learning rate must be positive");
    check_unit_interval(data, "pretrain");

    CdVelocity velocity = CdVelocity::zeros_like(p);
    std::vector<double> epoch_mse;
    epoch_mse.reserve(cfg.epochs);
    const Rng shuffle_root = rng.child("shuffle");
    const Rng gibbs_root = rng.child("gibbs");

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto order = epoch_permutation(data.rows, shuffle_root.child(epoch));
        Rng epoch_gibbs = gibbs_root.child(epoch);
        double weighted_mse = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < data.rows; start += cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(start + cfg.batch_size, data.rows);
            Matrix batch = slice_rows(data, order, start, end);
            Rng batch_rng = epoch_gibbs.child(batch_index);
            const double mse = cd_update(p, batch, cfg, velocity, batch_rng);
            weighted_mse += mse * static_cast<double>(end - start);
        }
        epoch_mse.push_back(weighted_mse / static_cast<double>(data.rows));
    }
    return epoch_mse;
}

} // namespace nids
