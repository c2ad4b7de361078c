#include "nids/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nids/error.hpp"

namespace nids {

void AdamState::step(std::span<double> param, std::span<const double> grad, double lr,
                     double beta1, double beta2, double eps, std::size_t t) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void MomentumState::step(std::span<double> param, std::span<const double> grad, double lr,
                         double momentum) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        velocity[i] = momentum * velocity[i] - lr * grad[i];
        param[i] += velocity[i];
    }
}

void sgd_step(std::span<double> param, std::span<const double> grad, double lr) {
    for (std::size_t i = 0; i < param.size(); ++i)
        param[i] -= lr * grad[i];
}

double softmax_xent(const Matrix &logits, const std::vector<int> &labels,
                    std::span<const double> weights, Matrix *dlogits) {
    if (logits.rows != labels.size())
        throw ShapeError("softmax_xent: logits/label count mismatch");
    if (!weights.empty() && weights.size() != labels.size())
        throw ShapeError("softmax_xent: weight count mismatch");

    double weight_sum = 0.0;
    if (weights.empty())
        weight_sum = static_cast<double>(labels.size());
    else
        weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (weight_sum <= 0.0)
        throw DomainError("softmax_xent: non-positive total weight");

    if (dlogits)
        *dlogits = Matrix(logits.rows, logits.cols);

    double loss = 0.0;
    for (std::size_t i = 0; i < logits.rows; ++i) {
        auto row = logits.row(i);
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= logits.cols)
            throw DataError("softmax_xent: label out of range");
        double mx = row[0];
        for (double v : row)
            mx = std::max(mx, v);
        double sum = 0.0;
        for (double v : row)
            sum += std::exp(v - mx);
        const double lse = mx + std::log(sum);
        const double w = weights.empty() ? 1.0 : weights[i];
        loss += w * (lse - row[static_cast<std::size_t>(y)]);
        if (dlogits) {
            auto drow = dlogits->row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                double p = std::exp(row[j] - lse);
                if (j == static_cast<std::size_t>(y))
                    p -= 1.0;
                drow[j] = w * p / weight_sum;
            }
        }
    }
    return loss / weight_sum;
}

std::vector<double> resolve_sample_weights(const std::vector<int> &labels,
                                           std::span<const double> class_weights,
                                           std::span<const double> sample_weights) {
    if (!sample_weights.empty()) {
        if (sample_weights.size() != labels.size())
            throw ShapeError("sample weight count does not match label count");
        return {sample_weights.begin(), sample_weights.end()};
    }
    if (class_weights.empty())
        return {};
    std::vector<double> w(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= class_weights.size())
            throw DataError("label out of range for class weights");
        w[i] = class_weights[static_cast<std::size_t>(y)];
    }
    return w;
}

void check_labels(const std::vector<int> &labels, std::size_t n_classes) {
    for (int y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= n_classes)
            throw DataError("label out of range: " + std::to_string(y));
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch_size,
                                                    Rng rng) {
    if (batch_size == 0)
        throw DomainError("batch size must be positive");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.bounded(i)]);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(start + batch_size, n);
        batches.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(start),
                             idx.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

std::vector<std::vector<std::size_t>> epoch_batches_weighted(std::span<const double> weights,
                                                             std::size_t batch_size, Rng rng) {
    if (batch_size == 0)
        throw DomainError("batch size must be positive");
    const std::size_t n = weights.size();
    std::vector<double> cumulative(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] < 0.0)
            throw DomainError("negative sample weight");
        total += weights[i];
        cumulative[i] = total;
    }
    if (total <= 0.0)
        throw DomainError("weighted sampling needs a positive total weight");

    std::vector<std::vector<std::size_t>> batches;
    std::size_t drawn = 0;
    while (drawn < n) {
        const std::size_t count = std::min(batch_size, n - drawn);
        std::vector<std::size_t> batch(count);
        for (std::size_t b = 0; b < count; ++b) {
            const double u = rng.next_double() * total;
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            batch[b] = std::min(static_cast<std::size_t>(it - cumulative.begin()), n - 1);
        }
        batches.push_back(std::move(batch));
        drawn += count;
    }
    return batches;
}

Matrix gather_rows(const Matrix &m, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), m.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        auto src = m.row(idx[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

std::vector<int> gather_labels(const std::vector<int> &labels, std::span<const std::size_t> idx) {
    std::vector<int> out(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        out[r] = labels[idx[r]];
    return out;
}

} // namespace nids
