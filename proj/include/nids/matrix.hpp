#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "nids/error.hpp"

namespace nids {

// Dense row-major matrix of doubles. All model arithmetic runs in 64-bit
// floating point; persistence formats may narrow.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> values);

    double &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
};

bool is_finite(const Matrix &m);
bool is_finite(std::span<const double> v);

// Throws DomainError when the result of `op` contains NaN/Inf.
void require_finite(const Matrix &m, const char *op);

bool bitwise_equal(const Matrix &a, const Matrix &b);

} // namespace nids
