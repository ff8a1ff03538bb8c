#include "specclip/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

namespace specclip::kernels {

namespace {

std::atomic<int> g_threads{0};

// Below this many flops the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelMin = 1 << 14;

inline double sum_squares_block(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

inline double max_abs_block(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

inline void gemm_row(std::size_t i, std::size_t k, std::size_t p, const double* a, const double* b,
                     double* c) {
  double* ci = c + i * p;
  std::fill(ci, ci + p, 0.0);
  const double* ai = a + i * k;
  for (std::size_t l = 0; l < k; ++l) {
    const double ail = ai[l];
    const double* bl = b + l * p;
    for (std::size_t j = 0; j < p; ++j) ci[j] += ail * bl[j];
  }
}

inline double clip_one(double x, double tau) { return std::clamp(x, -tau, tau); }

inline double shrink_one(double x, double c, double beta) {
  return beta * x * std::exp(-std::abs(x) / c);
}

int resolve_threads() {
  const int t = g_threads.load(std::memory_order_relaxed);
  return t > 0 ? t : omp_get_max_threads();
}

}  // namespace

namespace serial {

void gemm(std::size_t m, std::size_t k, std::size_t p, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) gemm_row(i, k, p, a, b, c);
}

double sum_squares(const double* x, std::size_t n) {
  double total = 0.0;
  for (std::size_t start = 0; start < n; start += kReduceBlock)
    total += sum_squares_block(x + start, std::min(kReduceBlock, n - start));
  return total;
}

double max_abs(const double* x, std::size_t n) { return max_abs_block(x, n); }

void hard_clip(const double* x, double* y, std::size_t n, double tau) {
  for (std::size_t i = 0; i < n; ++i) y[i] = clip_one(x[i], tau);
}

void smooth_shrink(const double* x, double* y, std::size_t n, double c, double beta) {
  for (std::size_t i = 0; i < n; ++i) y[i] = shrink_one(x[i], c, beta);
}

}  // namespace serial

namespace omp {

void gemm(std::size_t m, std::size_t k, std::size_t p, const double* a, const double* b, double* c) {
  const auto rows = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static) num_threads(resolve_threads())
  for (std::ptrdiff_t i = 0; i < rows; ++i) gemm_row(static_cast<std::size_t>(i), k, p, a, b, c);
}

double sum_squares(const double* x, std::size_t n) {
  const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) num_threads(resolve_threads())
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t start = static_cast<std::size_t>(b) * kReduceBlock;
    partial[static_cast<std::size_t>(b)] =
        sum_squares_block(x + start, std::min(kReduceBlock, n - start));
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for reduction(max : m) schedule(static) num_threads(resolve_threads())
  for (std::ptrdiff_t i = 0; i < nn; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

void hard_clip(const double* x, double* y, std::size_t n, double tau) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(resolve_threads())
  for (std::ptrdiff_t i = 0; i < nn; ++i) y[i] = clip_one(x[i], tau);
}

void smooth_shrink(const double* x, double* y, std::size_t n, double c, double beta) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(resolve_threads())
  for (std::ptrdiff_t i = 0; i < nn; ++i) y[i] = shrink_one(x[i], c, beta);
}

}  // namespace omp

void set_threads(int n) { g_threads.store(n < 0 ? 0 : n, std::memory_order_relaxed); }

int threads() { return resolve_threads(); }

namespace {
// Nested regions (e.g. inside a parallel sweep) always take the serial path.
bool go_parallel(std::size_t work) {
  return work >= kParallelMin && resolve_threads() > 1 && !omp_in_parallel();
}
}  // namespace

void gemm(std::size_t m, std::size_t k, std::size_t p, const double* a, const double* b, double* c) {
  if (go_parallel(m * k * p)) omp::gemm(m, k, p, a, b, c);
  else serial::gemm(m, k, p, a, b, c);
}

double sum_squares(const double* x, std::size_t n) {
  return go_parallel(n) ? omp::sum_squares(x, n) : serial::sum_squares(x, n);
}

double max_abs(const double* x, std::size_t n) {
  return go_parallel(n) ? omp::max_abs(x, n) : serial::max_abs(x, n);
}

void hard_clip(const double* x, double* y, std::size_t n, double tau) {
  if (go_parallel(n)) omp::hard_clip(x, y, n, tau);
  else serial::hard_clip(x, y, n, tau);
}

void smooth_shrink(const double* x, double* y, std::size_t n, double c, double beta) {
  if (go_parallel(n)) omp::smooth_shrink(x, y, n, c, beta);
  else serial::smooth_shrink(x, y, n, c, beta);
}

}  // namespace specclip::kernels
