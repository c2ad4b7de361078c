#pragma once

#include <vector>

#include "nids/matrix.hpp"
#include "nids/rng.hpp"

namespace nids {

// Core numeric kernels. The default entry points parallelise independent
// output elements with OpenMP; nids::ref holds the plain serial loops that
// the parallel versions must match bit for bit (each output element is
// accumulated in the same order in both, so results are identical regardless
// of thread count). tools/bench_kernels compares the two.

// c[i][j] = sum_t a[i][t] * b[t][j]
Matrix matmul(const Matrix &a, const Matrix &b);
// a is used transposed: c[i][j] = sum_t a[t][i] * b[t][j]
Matrix matmul_tn(const Matrix &a, const Matrix &b);
// b is used transposed: c[i][j] = sum_t a[i][t] * b[j][t]
Matrix matmul_nt(const Matrix &a, const Matrix &b);

Matrix transpose(const Matrix &m);

// Elementwise 1 / (1 + exp(-x)). Saturates to {0, 1}, never NaN.
Matrix sigmoid(const Matrix &x);
// Elementwise max(0, x).
Matrix relu(const Matrix &x);

// Numerically stable softmax of one logit vector (max subtraction).
std::vector<double> softmax(std::span<const double> logits);
// Row-wise softmax of a batch of logit rows.
Matrix softmax_rows(const Matrix &logits);

// Binary sample: entry is 1 with the given probability. Probabilities must
// lie in [0,1]. Draws consume the stream in row-major order.
Matrix bernoulli_sample(const Matrix &probs, Rng &rng);

// Glorot/Xavier uniform init: entries in +-sqrt(6 / (rows + cols)).
Matrix xavier_init(std::size_t rows, std::size_t cols, Rng &rng);

namespace ref {

// Serial reference kernels (naive loops, no OpenMP). Kept as the test oracle
// and benchmark baseline.
Matrix matmul(const Matrix &a, const Matrix &b);
Matrix matmul_tn(const Matrix &a, const Matrix &b);
Matrix matmul_nt(const Matrix &a, const Matrix &b);
Matrix sigmoid(const Matrix &x);
Matrix relu(const Matrix &x);
Matrix softmax_rows(const Matrix &logits);

} // namespace ref

} // namespace nids
