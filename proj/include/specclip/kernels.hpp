#pragma once

#include <cstddef>

// Hot entry-wise and product kernels. Each exists in a serial reference form
// and an OpenMP form; the unqualified entry points dispatch on the thread
// setting. Reductions use fixed-size blocks combined in index order, so the
// OpenMP results are bit-identical to serial ones for any thread count.

namespace specclip::kernels {

inline constexpr std::size_t kReduceBlock = 4096;

namespace serial {
/// C (m x p) = A (m x k) * B (k x p), row-major, C overwritten.
void gemm(std::size_t m, std::size_t k, std::size_t p, const double* a, const double* b, double* c);
double sum_squares(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
void hard_clip(const double* x, double* y, std::size_t n, double tau);
void smooth_shrink(const double* x, double* y, std::size_t n, double c, double beta);
}  // namespace serial

namespace omp {
void gemm(std::size_t m, std::size_t k, std::size_t p, const double* a, const double* b, double* c);
double sum_squares(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
void hard_clip(const double* x, double* y, std::size_t n, double tau);
void smooth_shrink(const double* x, double* y, std::size_t n, double c, double beta);
}  // namespace omp

/// 0 means "use the OpenMP runtime default". 1 selects the serial kernels.
void set_threads(int n);
int threads();

void gemm(std::size_t m, std::size_t k, std::size_t p, const double* a, const double* b, double* c);
double sum_squares(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
void hard_clip(const double* x, double* y, std::size_t n, double tau);
void smooth_shrink(const double* x, double* y, std::size_t n, double c, double beta);

}  // namespace specclip::kernels
