#include <chrono>
#include <complex>
#include <cstdio>
#include <random>
#include <vector>

#include "zeno/kernels.hpp"

// Micro-benchmark of the dense kernels, one line per (operation, backend).
// Sizes mirror the simulation workloads: 37×37 density matrices and the
// (n_max+2)-dimensional reconstruction iterates.

namespace {

using zeno::kern::Ops;

std::vector<std::complex<double>> random_vec(std::size_t n,
                                             std::mt19937_64& eng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::complex<double>> v(n);
  for (auto& z : v) z = {u(eng), u(eng)};
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void bench_gemm(const char* label, const Ops& ops, int n, int reps) {
  std::mt19937_64 eng(7);
  const auto a = random_vec(std::size_t(n) * n, eng);
  const auto b = random_vec(std::size_t(n) * n, eng);
  std::vector<std::complex<double>> c(std::size_t(n) * n);
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r)
    ops.gemm(n, n, n, a.data(), b.data(), c.data());
  const double dt = seconds_since(t0);
  // 8 real flops per complex multiply-add.
  const double flops = 8.0 * n * n * double(n) * reps;
  std::printf("gemm   n=%-3d  %-7s  %8.1f Mflop/s  (%.3f s)\n", n, label,
              flops / dt / 1e6, dt);
}

void bench_axpy(const char* label, const Ops& ops, std::size_t n, int reps) {
  std::mt19937_64 eng(13);
  const auto x = random_vec(n, eng);
  auto y = random_vec(n, eng);
  const std::complex<double> alpha(0.7, -0.3);
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) ops.axpy(n, alpha, x.data(), y.data());
  const double dt = seconds_since(t0);
  const double flops = 8.0 * double(n) * reps;
  std::printf("axpy   n=%-5zu %-7s  %8.1f Mflop/s  (%.3f s)\n", n, label,
              flops / dt / 1e6, dt);
}

}  // namespace

int main() {
  std::printf("active backend: %s\n\n", zeno::kern::backend_name());

  const Ops& scalar = zeno::kern::scalar_ops();
  const Ops* avx2 = zeno::kern::avx2_ops();

  for (int n : {6, 37, 128}) {
    const int reps = n <= 37 ? 20000 : 500;
    bench_gemm("scalar", scalar, n, reps);
    if (avx2) bench_gemm("avx2", *avx2, n, reps);
  }
  std::printf("\n");
  for (std::size_t n : {1369u, 16384u}) {
    const int reps = 200000;
    bench_axpy("scalar", scalar, n, reps);
    if (avx2) bench_axpy("avx2", *avx2, n, reps);
  }
  return 0;
}
