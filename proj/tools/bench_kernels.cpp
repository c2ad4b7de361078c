// Timing comparison between the serial reference kernels and the
// OpenMP-parallel ones, with a bitwise equality check on every result.
#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nids/kernels.hpp"

using nids::Matrix;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, nids::Rng &rng) {
    Matrix m(rows, cols);
    for (double &v : m.data)
        v = rng.uniform(-1.0, 1.0);
    return m;
}

double time_of(const std::function<Matrix()> &fn, Matrix &out, int reps) {
    using Clock = std::chrono::steady_clock;
    out = fn(); // warm-up, also the comparison value
    const auto start = Clock::now();
    for (int i = 0; i < reps; ++i) {
        Matrix r = fn();
        if (r.data[0] == 12345.6789) // keep the optimiser honest
            std::puts("");
    }
    return std::chrono::duration<double>(Clock::now() - start).count() / reps;
}

void report(const char *name, double gflop, double serial_s, double parallel_s, bool identical) {
    std::printf("%-24s %8.2f ms %8.2f ms  %5.2fx  %7.2f GF/s  %s\n", name, serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s, gflop / parallel_s,
                identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serial code\n");
#endif
    std::printf("%-24s %11s %11s %7s %13s\n", "kernel", "serial", "parallel", "speedup",
                "throughput");

    nids::Rng rng(7);
    const int reps = 5;

    {
        Matrix a = random_matrix(512, 384, rng);
        Matrix b = random_matrix(384, 512, rng);
        Matrix rs, rp;
        const double ts = time_of([&] { return nids::ref::matmul(a, b); }, rs, reps);
        const double tp = time_of([&] { return nids::matmul(a, b); }, rp, reps);
        report("matmul 512x384x512", 2.0 * 512 * 384 * 512 * 1e-9, ts, tp, bitwise_equal(rs, rp));
    }
    {
        Matrix a = random_matrix(384, 512, rng);
        Matrix b = random_matrix(384, 512, rng);
        Matrix rs, rp;
        const double ts = time_of([&] { return nids::ref::matmul_tn(a, b); }, rs, reps);
        const double tp = time_of([&] { return nids::matmul_tn(a, b); }, rp, reps);
        report("matmul_tn 512x384x512", 2.0 * 512 * 384 * 512 * 1e-9, ts, tp,
               bitwise_equal(rs, rp));
    }
    {
        Matrix a = random_matrix(512, 384, rng);
        Matrix b = random_matrix(512, 384, rng);
        Matrix rs, rp;
        const double ts = time_of([&] { return nids::ref::matmul_nt(a, b); }, rs, reps);
        const double tp = time_of([&] { return nids::matmul_nt(a, b); }, rp, reps);
        report("matmul_nt 512x384x512", 2.0 * 512 * 384 * 512 * 1e-9, ts, tp,
               bitwise_equal(rs, rp));
    }
    {
        Matrix x = random_matrix(2048, 512, rng);
        Matrix rs, rp;
        const double ts = time_of([&] { return nids::ref::sigmoid(x); }, rs, reps);
        const double tp = time_of([&] { return nids::sigmoid(x); }, rp, reps);
        report("sigmoid 2048x512", 2048.0 * 512 * 1e-9, ts, tp, bitwise_equal(rs, rp));
    }
    {
        Matrix x = random_matrix(2048, 512, rng);
        Matrix rs, rp;
        const double ts = time_of([&] { return nids::ref::softmax_rows(x); }, rs, reps);
        const double tp = time_of([&] { return nids::softmax_rows(x); }, rp, reps);
        report("softmax_rows 2048x512", 3.0 * 2048 * 512 * 1e-9, ts, tp, bitwise_equal(rs, rp));
    }
    return 0;
}
