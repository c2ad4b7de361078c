#include "nids/matrix.hpp"

#include <cmath>
#include <cstring>

namespace nids {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> values) {
    Matrix m;
    m.rows = values.size();
    m.cols = values.size() ? values.begin()->size() : 0;
    m.data.reserve(m.rows * m.cols);
    for (const auto &row : values) {
        if (row.size() != m.cols)
            throw ShapeError("from_rows: ragged initializer");
        m.data.insert(m.data.end(), row.begin(), row.end());
    }
    return m;
}

bool is_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}

bool is_finite(const Matrix &m) { return is_finite(std::span<const double>(m.data)); }

void require_finite(const Matrix &m, const char *op) {
    if (!is_finite(m))
        throw DomainError(std::string(op) + ": result contains NaN or Inf");
}

bool bitwise_equal(const Matrix &a, const Matrix &b) {
    if (a.rows != b.rows || a.cols != b.cols)
        return false;
    if (a.data.empty())
        return true;
    return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

} // namespace nids
