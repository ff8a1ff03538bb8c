#include "specclip/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "specclip/error.hpp"
#include "specclip/linalg.hpp"
#include "specclip/noise.hpp"

namespace specclip {

namespace {

void require_unit(std::span<const double> x, const char* what) {
  if (std::abs(norm2(x) - 1.0) > 1e-8) fail(Errc::NonUnitVector, std::string(what) + " is not unit length");
}

double median_of(std::vector<double> xs) {
  const std::size_t n = xs.size();
  std::sort(xs.begin(), xs.end());
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

LocalizationComponents localization_components(std::span<const double> u, std::span<const double> v,
                                               const Matrix& e) {
  if (u.size() != e.rows() || v.size() != e.cols()) fail(Errc::ShapeMismatch, "direction lengths");
  require_unit(u, "u");
  require_unit(v, "v");
  const double fro2 = inner(e, e);
  if (fro2 == 0.0) fail(Errc::ZeroNoise, "noise matrix is zero");
  double proj = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < e.rows(); ++i) {
    for (std::size_t j = 0; j < e.cols(); ++j) {
      const double t = u[i] * e(i, j) * v[j];
      proj += t;
      peak = std::max(peak, t * t);
    }
  }
  return {peak / fro2, proj * proj / fro2};
}

double localization_ratio(std::span<const double> u, std::span<const double> v, const Matrix& e) {
  const auto c = localization_components(u, v, e);
  if (c.r == 0.0) fail(Errc::DegenerateProjection, "noise has zero projection on u v^T");
  return c.r_max / c.r;
}

double gaussian_baseline_median(std::span<const double> u, std::span<const double> v, std::size_t m,
                                std::size_t n, std::size_t draws, SeedSpec seed) {
  if (draws < 64) fail(Errc::InvalidArgument, "baseline needs at least 64 draws");
  std::vector<double> ratios(draws);
  const auto nd = static_cast<std::ptrdiff_t>(draws);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t d = 0; d < nd; ++d) {
    const SeedSpec s{seed.seed, mix_stream(seed.stream, static_cast<std::uint64_t>(d))};
    const Matrix e = sample_gaussian(m, n, 1.0, s);
    const auto c = localization_components(u, v, e);
    // A Gaussian draw with exactly zero projection has probability zero.
    ratios[static_cast<std::size_t>(d)] = c.r > 0.0 ? c.r_max / c.r : INFINITY;
  }
  return median_of(std::move(ratios));
}

LocalizationReport localization_report(const Matrix& g, const Matrix& e, std::size_t draws,
                                       SeedSpec seed, std::size_t direction) {
  require_same_shape(g, e, "localization_report");
  const SvdResult s = full_svd(g);
  const Vector& sv = s.singular_values;
  if (direction >= sv.size()) fail(Errc::InvalidArgument, "direction index out of range");
  const double below = direction + 1 < sv.size() ? sv[direction] - sv[direction + 1] : sv[direction];
  const double above = direction > 0 ? sv[direction - 1] - sv[direction] : INFINITY;
  const double gap = std::min(below, above);
  if (!(gap > 1e-8 * sv[0])) fail(Errc::DegenerateSpectrum, "singular pair is not isolated");

  const Vector u = s.left(direction);
  const Vector v = s.right(direction);
  LocalizationReport rep;
  const auto c = localization_components(u, v, e);
  if (c.r == 0.0) fail(Errc::DegenerateProjection, "noise has zero projection on u v^T");
  rep.r_max = c.r_max;
  rep.r = c.r;
  rep.ratio_R = c.r_max / c.r;
  rep.baseline_median = gaussian_baseline_median(u, v, g.rows(), g.cols(), draws, seed);
  rep.normalized_R_hat = rep.ratio_R / rep.baseline_median;
  rep.sigma1 = sv[0];
  rep.gap = gap;
  rep.direction = direction;
  return rep;
}

TaylorPrediction taylor_prediction(const Matrix& g, const Matrix& e) {
  require_same_shape(g, e, "taylor_prediction");
  const SvdResult s = full_svd(g);
  const double s1 = s.singular_values[0];
  const double s2 = s.singular_values.size() > 1 ? s.singular_values[1] : 0.0;
  TaylorPrediction t;
  t.gap = s1 - s2;
  if (!(t.gap > 1e-8 * s1)) fail(Errc::DegenerateSpectrum, "top singular value is not isolated");
  t.sigma1_base = s1;
  t.first_order_term = bilinear(s.left(0), e, s.right(0));
  t.predicted = s1 + t.first_order_term;
  t.noise_op_norm = frobenius_norm(e) == 0.0 ? 0.0 : operator_norm(e);
  t.remainder_bound = 4.0 * t.noise_op_norm * t.noise_op_norm / t.gap;
  t.applicable = t.noise_op_norm < t.gap / 4.0;
  return t;
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(Errc::LengthMismatch, "spearman_rho inputs differ in length");
  if (xs.size() < 3) fail(Errc::InsufficientSamples, "spearman_rho needs at least 3 pairs");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double mean = 0.5 * static_cast<double>(xs.size() + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double a = rx[i] - mean;
    const double b = ry[i] - mean;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) fail(Errc::InvalidArgument, "spearman_rho of a constant sequence");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::size_t default_hill_k(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(n)));
  return std::max<std::size_t>(10, std::min(k, n / 4));
}

double hill_estimator(std::span<const double> samples, std::size_t k) {
  std::vector<double> mags;
  mags.reserve(samples.size());
  for (double x : samples)
    if (std::abs(x) > 0.0 && std::isfinite(x)) mags.push_back(std::abs(x));
  if (k < 10 || k >= mags.size()) {
    fail(Errc::InsufficientSamples, "hill_estimator needs 10 <= k < number of nonzero samples");
  }
  std::partial_sort(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k) + 1, mags.end(),
                    std::greater<>());
  const double base = std::log(mags[k]);
  double h = 0.0;
  for (std::size_t i = 0; i < k; ++i) h += std::log(mags[i]) - base;
  h /= static_cast<double>(k);
  if (!(h > 0.0)) fail(Errc::InsufficientSamples, "hill_estimator: tail is flat");
  return 1.0 / h;
}

}  // namespace specclip
