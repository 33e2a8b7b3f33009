// Serial vs OpenMP kernel comparison, plus sequence-model throughput.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "phaselab/lstm.hpp"
#include "phaselab/matrix.hpp"
#include "phaselab/rng.hpp"

using namespace phaselab;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Matrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    Matrix m(rows, cols);
    for (double& x : m.data) x = rng.uniform(-1.0, 1.0);
    return m;
}

void bench_matmul(std::size_t n, int reps, RngStream& rng) {
    const Matrix a = random_matrix(n, n, rng);
    const Matrix b = random_matrix(n, n, rng);

    auto t0 = Clock::now();
    double sink = 0.0;
    for (int r = 0; r < reps; ++r) sink += matmul_serial(a, b).data[0];
    const double serial_ms = ms_since(t0) / reps;

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) sink += matmul_parallel(a, b).data[0];
    const double parallel_ms = ms_since(t0) / reps;

    const double flops = 2.0 * static_cast<double>(n) * n * n;
    std::printf("matmul %4zu x %-4zu  serial %8.2f ms (%6.2f GFLOP/s)  omp %8.2f ms (%6.2f GFLOP/s)  speedup %.2fx\n",
                n, n, serial_ms, flops / serial_ms / 1e6, parallel_ms, flops / parallel_ms / 1e6,
                serial_ms / parallel_ms);
    (void)sink;
}

void bench_lstm(std::size_t hidden, std::size_t input, std::size_t steps, RngStream& rng) {
    const LstmParams cell = LstmParams::init(input, hidden, rng);
    std::vector<Vector> inputs(steps, Vector(input));
    for (Vector& v : inputs) {
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
    }

    LstmSequenceCache cache;
    const auto t0 = Clock::now();
    const auto outputs = lstm_forward(cell, initial_state(cell), inputs, &cache);
    const double fwd_ms = ms_since(t0);

    std::vector<Vector> upstream(steps, Vector(hidden, 1e-3));
    const auto t1 = Clock::now();
    const LstmGradients grads =
        lstm_backward(cell, inputs, initial_state(cell), cache, upstream);
    const double bwd_ms = ms_since(t1);

    std::printf("lstm hidden=%zu input=%zu T=%zu  forward %7.2f ms  backward %7.2f ms  (%.1f kframe/s fwd)\n",
                hidden, input, steps, fwd_ms, bwd_ms,
                static_cast<double>(steps) / fwd_ms);
    (void)outputs;
    (void)grads;
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    RngStream rng(42);
    bench_matmul(128, 20, rng);
    bench_matmul(256, 10, rng);
    bench_matmul(512, 4, rng);
    bench_lstm(128, 32, 2000, rng);
    bench_lstm(64, 32, 2000, rng);
    return 0;
}
