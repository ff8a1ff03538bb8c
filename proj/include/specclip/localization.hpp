#pragma once

#include <cstddef>
#include <span>

#include "specclip/matrix.hpp"
#include "specclip/rng.hpp"

namespace specclip {

inline constexpr std::size_t kDefaultBaselineDraws = 256;

struct LocalizationComponents {
  double r_max = 0.0;
  double r = 0.0;
};

struct LocalizationReport {
  double r_max = 0.0;
  double r = 0.0;
  double ratio_R = 0.0;
  double baseline_median = 0.0;
  double normalized_R_hat = 0.0;
  double sigma1 = 0.0;
  double gap = 0.0;
  std::size_t direction = 0;
};

struct TaylorPrediction {
  double sigma1_base = 0.0;
  double first_order_term = 0.0;
  double predicted = 0.0;
  double remainder_bound = 0.0;
  double noise_op_norm = 0.0;
  double gap = 0.0;
  bool applicable = false;
};

/// Largest single-entry share and whole-matrix share of E's projection on
/// u v^T, both as fractions of ||E||_F^2.
LocalizationComponents localization_components(std::span<const double> u, std::span<const double> v,
                                               const Matrix& e);
/// r_max / r; throws DegenerateProjection when r == 0.
double localization_ratio(std::span<const double> u, std::span<const double> v, const Matrix& e);

/// Median of the ratio over i.i.d. standard Gaussian m x n matrices, using
/// the same direction pair. Draw d uses stream mix_stream(seed.stream, d).
double gaussian_baseline_median(std::span<const double> u, std::span<const double> v, std::size_t m,
                                std::size_t n, std::size_t draws, SeedSpec seed);

/// Uses the singular pair of g at index `direction` (0 = top).
LocalizationReport localization_report(const Matrix& g, const Matrix& e,
                                       std::size_t draws = kDefaultBaselineDraws,
                                       SeedSpec seed = {}, std::size_t direction = 0);

TaylorPrediction taylor_prediction(const Matrix& g, const Matrix& e);

double spearman_rho(std::span<const double> xs, std::span<const double> ys);

/// ceil(0.01 n) clamped to [10, n / 4].
std::size_t default_hill_k(std::size_t n);
/// Tail index 1 / H_k from the k largest |samples|.
double hill_estimator(std::span<const double> samples, std::size_t k);

}  // namespace specclip
