#include "nids/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace nids {

namespace {

// Below this element count the OpenMP fork/join overhead dominates.
constexpr std::size_t kParallelGrain = 32 * 1024;

void check_matmul_shapes(std::size_t inner_a, std::size_t inner_b, const char *op) {
    if (inner_a != inner_b)
        throw ShapeError(std::string(op) + ": inner dimensions do not match");
}

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

namespace ref {

Matrix matmul(const Matrix &a, const Matrix &b) {
    check_matmul_shapes(a.cols, b.rows, "matmul");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < a.cols; ++t)
                acc += a(i, t) * b(t, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix &a, const Matrix &b) {
    check_matmul_shapes(a.rows, b.rows, "matmul_tn");
    Matrix c(a.cols, b.cols);
    for (std::size_t i = 0; i < a.cols; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < a.rows; ++t)
                acc += a(t, i) * b(t, j);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix &a, const Matrix &b) {
    check_matmul_shapes(a.cols, b.cols, "matmul_nt");
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.rows; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < a.cols; ++t)
                acc += a(i, t) * b(j, t);
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix sigmoid(const Matrix &x) {
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i)
        out.data[i] = sigmoid_scalar(x.data[i]);
    return out;
}

Matrix relu(const Matrix &x) {
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i)
        out.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
    return out;
}

Matrix softmax_rows(const Matrix &logits) {
    Matrix out(logits.rows, logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        auto v = softmax(logits.row(i));
        std::copy(v.begin(), v.end(), out.row(i).begin());
    }
    return out;
}

} // namespace ref

Matrix matmul(const Matrix &a, const Matrix &b) {
    check_matmul_shapes(a.cols, b.rows, "matmul");
    Matrix c(a.rows, b.cols, 0.0);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.rows);
    const std::size_t n = b.cols;
    const std::size_t k = a.cols;
    const bool parallel = a.rows * n * k >= kParallelGrain;
    // Each output row accumulates over t in ascending order, exactly as the
    // serial reference does, so the result is bit-identical for any thread
    // count.
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        double *crow = c.data.data() + static_cast<std::size_t>(i) * n;
        const double *arow = a.data.data() + static_cast<std::size_t>(i) * k;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = arow[t];
            const double *brow = b.data.data() + t * n;
            for (std::size_t j = 0; j < n; ++j)
                crow[j] += av * brow[j];
        }
    }
    require_finite(c, "matmul");
    return c;
}

Matrix matmul_tn(const Matrix &a, const Matrix &b) {
    check_matmul_shapes(a.rows, b.rows, "matmul_tn");
    Matrix c(a.cols, b.cols, 0.0);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.cols);
    const std::size_t n = b.cols;
    const std::size_t k = a.rows;
    const bool parallel = a.cols * n * k >= kParallelGrain;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        double *crow = c.data.data() + static_cast<std::size_t>(i) * n;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = a.data[t * a.cols + static_cast<std::size_t>(i)];
            const double *brow = b.data.data() + t * n;
            for (std::size_t j = 0; j < n; ++j)
                crow[j] += av * brow[j];
        }
    }
    require_finite(c, "matmul_tn");
    return c;
}

Matrix matmul_nt(const Matrix &a, const Matrix &b) {
    check_matmul_shapes(a.cols, b.cols, "matmul_nt");
    Matrix c(a.rows, b.rows, 0.0);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(a.rows);
    const std::size_t n = b.rows;
    const std::size_t k = a.cols;
    const bool parallel = a.rows * n * k >= kParallelGrain;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        const double *arow = a.data.data() + static_cast<std::size_t>(i) * k;
        double *crow = c.data.data() + static_cast<std::size_t>(i) * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double *brow = b.data.data() + j * k;
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t)
                acc += arow[t] * brow[t];
            crow[j] = acc;
        }
    }
    require_finite(c, "matmul_nt");
    return c;
}

Matrix transpose(const Matrix &m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            t(j, i) = m(i, j);
    return t;
}

Matrix sigmoid(const Matrix &x) {
    Matrix out(x.rows, x.cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out.data[static_cast<std::size_t>(i)] = sigmoid_scalar(x.data[static_cast<std::size_t>(i)]);
    return out;
}

Matrix relu(const Matrix &x) {
    Matrix out(x.rows, x.cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double v = x.data[static_cast<std::size_t>(i)];
        out.data[static_cast<std::size_t>(i)] = v > 0.0 ? v : 0.0;
    }
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty())
        throw ShapeError("softmax: empty logits");
    double mx = logits[0];
    for (double v : logits)
        mx = std::max(mx, v);
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (double &v : out)
        v /= sum;
    return out;
}

Matrix softmax_rows(const Matrix &logits) {
    Matrix out(logits.rows, logits.cols);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(logits.rows);
#pragma omp parallel for schedule(static) if (logits.size() >= kParallelGrain)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        auto v = softmax(logits.row(static_cast<std::size_t>(i)));
        std::copy(v.begin(), v.end(), out.row(static_cast<std::size_t>(i)).begin());
    }
    return out;
}

Matrix bernoulli_sample(const Matrix &probs, Rng &rng) {
    Matrix out(probs.rows, probs.cols);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs.data[i];
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError("bernoulli_sample: probability outside [0,1]");
        out.data[i] = rng.next_double() < p ? 1.0 : 0.0;
    }
    return out;
}

Matrix xavier_init(std::size_t rows, std::size_t cols, Rng &rng) {
    if (rows == 0 || cols == 0)
        throw ShapeError("xavier_init: zero dimension");
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix out(rows, cols);
    for (double &v : out.data)
        v = rng.uniform(-limit, limit);
    return out;
}

} // namespace nids
