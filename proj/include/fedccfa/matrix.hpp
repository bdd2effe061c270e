#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedccfa {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Just enough linear algebra for a
/// one-hidden-layer perceptron; no expression templates, no aliasing tricks.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// out = a * b^T + bias (bias broadcast over rows, may be empty).
Matrix matmul_transposed(const Matrix& a, const Matrix& b, std::span<const double> bias);

// Gathers the given rows of m into a new matrix.
Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);

}  // namespace fedccfa
