// Dense row-major double matrix. Small and allocation-honest: this project
// never needs BLAS-scale sizes, so everything is plain loops.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace repunlearn {

struct Matrix {
    std::size_t rows{0};
    std::size_t cols{0};
    std::vector<double> data;  // row-major, rows*cols entries

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    bool empty() const { return rows == 0 || cols == 0; }
};

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);

// c = a * b^T  (the common layout for batch-times-weights)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// Throws std::invalid_argument if any entry is NaN/Inf.
void require_finite(const Matrix& m, const char* what);
void require_finite(std::span<const double> v, const char* what);

double squared_distance(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

// Rows of `m` selected by `idx`, in order.
Matrix take_rows(const Matrix& m, std::span<const std::size_t> idx);

Matrix identity(std::size_t n);

std::vector<double> column_mean(const Matrix& m);

}  // namespace repunlearn
