#ifndef PHASELAB_MATRIX_HPP
#define PHASELAB_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace phaselab {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const double& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) {
        return std::span<double>(data.data() + r * cols, cols);
    }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data.data() + r * cols, cols);
    }

    std::span<double> flat() { return std::span<double>(data); }
    std::span<const double> flat() const { return std::span<const double>(data); }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    bool operator==(const Matrix& o) const = default;

    static Matrix identity(std::size_t n);
};

// c = a * b. Dispatches to the OpenMP path when the product is large enough
// to pay for it. Both paths accumulate every output element in the same
// order, so the result is bit-identical regardless of thread count.
Matrix matmul(const Matrix& a, const Matrix& b);

// Single-threaded reference, kept as the oracle for the parallel path.
Matrix matmul_serial(const Matrix& a, const Matrix& b);

// Row-partitioned OpenMP implementation.
Matrix matmul_parallel(const Matrix& a, const Matrix& b);

// y = a * x with x.size() == a.cols.
Vector matvec(const Matrix& a, std::span<const double> x);

// y += a * x, y.size() == a.rows.
void matvec_add(const Matrix& a, std::span<const double> x, std::span<double> y);

// y += a^T * x with x.size() == a.rows, y.size() == a.cols.
void matvec_transposed_add(const Matrix& a, std::span<const double> x, std::span<double> y);

// a += x * y^T.
void outer_add(Matrix& a, std::span<const double> x, std::span<const double> y);

// y += alpha * x.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

bool all_finite(std::span<const double> v);

// log(sum_k exp(v[k])), shifted by max(v) so it never overflows.
double log_sum_exp(std::span<const double> v);

}  // namespace phaselab

#endif
