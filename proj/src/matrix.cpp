#include "fedccfa/matrix.hpp"

#include <cmath>

#include "fedccfa/error.hpp"

namespace fedccfa {

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ContractError("dot: length mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Matrix matmul_transposed(const Matrix& a, const Matrix& b, std::span<const double> bias) {
    if (a.cols() != b.cols()) {
        throw ContractError("matmul: inner dimension mismatch (" + std::to_string(a.cols()) +
                            " vs " + std::to_string(b.cols()) + ")");
    }
    if (!bias.empty() && bias.size() != b.rows()) {
        throw ContractError("matmul: bias length mismatch");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ar = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double s = bias.empty() ? 0.0 : bias[j];
            auto br = b.row(j);
            for (std::size_t k = 0; k < ar.size(); ++k) {
                s += ar[k] * br[k];
            }
            out(i, j) = s;
        }
    }
    return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= m.rows()) {
            throw ContractError("select_rows: index out of range");
        }
        auto src = m.row(rows[i]);
        auto dst = out.row(i);
        for (std::size_t k = 0; k < src.size(); ++k) {
            dst[k] = src[k];
        }
    }
    return out;
}

}  // namespace fedccfa
