#include "phaselab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace phaselab {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWorkThreshold = 1u << 18;

void check_product_dims(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("matmul: inner dimensions differ: " +
                                    std::to_string(a.cols) + " vs " + std::to_string(b.rows));
    }
}

// One output row, ikj order so the inner loop walks b's rows contiguously.
inline void multiply_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t r) {
    const double* arow = a.data.data() + r * a.cols;
    double* crow = c.data.data() + r * c.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
        const double aik = arow[k];
        const double* brow = b.data.data() + k * b.cols;
        for (std::size_t j = 0; j < b.cols; ++j) {
            crow[j] += aik * brow[j];
        }
    }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul_serial(const Matrix& a, const Matrix& b) {
    check_product_dims(a, b);
    Matrix c(a.rows, b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) multiply_row(a, b, c, r);
    return c;
}

Matrix matmul_parallel(const Matrix& a, const Matrix& b) {
    check_product_dims(a, b);
    Matrix c(a.rows, b.cols);
    const auto n = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        multiply_row(a, b, c, static_cast<std::size_t>(r));
    }
    return c;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_product_dims(a, b);
    const std::size_t work = a.rows * a.cols * b.cols;
    return work >= kParallelWorkThreshold ? matmul_parallel(a, b) : matmul_serial(a, b);
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    Vector y(a.rows, 0.0);
    matvec_add(a, x, y);
    return y;
}

void matvec_add(const Matrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != a.cols || y.size() != a.rows) {
        throw std::invalid_argument("matvec: shape mismatch");
    }
    for (std::size_t r = 0; r < a.rows; ++r) {
        const double* arow = a.data.data() + r * a.cols;
        double acc = 0.0;
        for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * x[k];
        y[r] += acc;
    }
}

void matvec_transposed_add(const Matrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != a.rows || y.size() != a.cols) {
        throw std::invalid_argument("matvec_transposed: shape mismatch");
    }
    for (std::size_t r = 0; r < a.rows; ++r) {
        const double* arow = a.data.data() + r * a.cols;
        const double xr = x[r];
        for (std::size_t k = 0; k < a.cols; ++k) y[k] += xr * arow[k];
    }
}

void outer_add(Matrix& a, std::span<const double> x, std::span<const double> y) {
    if (x.size() != a.rows || y.size() != a.cols) {
        throw std::invalid_argument("outer_add: shape mismatch");
    }
    for (std::size_t r = 0; r < a.rows; ++r) {
        double* arow = a.data.data() + r * a.cols;
        const double xr = x[r];
        for (std::size_t k = 0; k < a.cols; ++k) arow[k] += xr * y[k];
    }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - m);
    return m + std::log(sum);
}

}  // namespace phaselab
