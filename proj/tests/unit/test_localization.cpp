#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "specclip/error.hpp"
#include "specclip/linalg.hpp"
#include "specclip/localization.hpp"
#include "specclip/noise.hpp"

using namespace specclip;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected specclip::Error";
  return Errc::InvalidArgument;
}

Vector basis(std::size_t n, std::size_t i) {
  Vector e(n, 0.0);
  e[i] = 1.0;
  return e;
}

// Gaussian bulk plus a strong rank-one spike with flat +-1 directions, so
// every |u_i v_j| is close to 1 / n.
Matrix spiked_signal(std::size_t n, std::uint64_t seed) {
  Philox rng({seed, 99});
  Vector a(n), b(n);
  for (double& x : a) x = (rng.next_u32() & 1u) ? 1.0 : -1.0;
  for (double& x : b) x = (rng.next_u32() & 1u) ? 1.0 : -1.0;
  normalize(a);
  normalize(b);
  return sample_gaussian(n, n, 1.0, {seed, 98}) + 80.0 * outer(a, b);
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

TEST(Components, SingleEntryExamples) {
  const Vector e1 = basis(3, 0);
  Matrix e(3, 3);
  e(0, 0) = 1.0;
  const auto c = localization_components(e1, e1, e);
  EXPECT_EQ(c.r_max, 1.0);
  EXPECT_EQ(c.r, 1.0);
  EXPECT_EQ(localization_ratio(e1, e1, e), 1.0);

  Matrix off(3, 3);
  off(1, 1) = 1.0;
  const auto z = localization_components(e1, e1, off);
  EXPECT_EQ(z.r_max, 0.0);
  EXPECT_EQ(z.r, 0.0);
  EXPECT_EQ(code_of([&] { localization_ratio(e1, e1, off); }), Errc::DegenerateProjection);
  EXPECT_EQ(code_of([&] { localization_ratio(e1, e1, Matrix(3, 3)); }), Errc::ZeroNoise);
  EXPECT_EQ(code_of([&] { localization_ratio(Vector{1, 1, 0}, e1, e); }), Errc::NonUnitVector);
  EXPECT_EQ(code_of([&] { localization_ratio(basis(2, 0), e1, e); }), Errc::ShapeMismatch);
}

TEST(Components, DenseRankOneMatchesBruteForce) {
  Philox rng({1, 0});
  const Vector u = sample_unit_sphere(7, rng);
  const Vector v = sample_unit_sphere(5, rng);
  const Matrix e = 2.5 * outer(u, v);
  double peak = 0.0;
  for (double ui : u)
    for (double vj : v) peak = std::max(peak, std::pow(ui * vj, 4));
  const auto c = localization_components(u, v, e);
  EXPECT_NEAR(c.r, 1.0, 1e-14);
  EXPECT_NEAR(c.r_max, peak, 1e-15);
}

TEST(Baseline, ScaleFreeAndStable) {
  Philox rng({2, 0});
  const Vector u = sample_unit_sphere(32, rng);
  const Vector v = sample_unit_sphere(32, rng);
  const Matrix e = sample_gaussian(32, 32, 1.0, {2, 1});
  EXPECT_NEAR(localization_ratio(u, v, 7.0 * e), localization_ratio(u, v, e),
              1e-12 * localization_ratio(u, v, e));
  const double m256 = gaussian_baseline_median(u, v, 32, 32, 256, {3, 0});
  const double m512 = gaussian_baseline_median(u, v, 32, 32, 512, {3, 0});
  // A 256-draw median carries roughly 15% relative error.
  EXPECT_NEAR(m512 / m256, 1.0, 0.3);
  EXPECT_EQ(m256, gaussian_baseline_median(u, v, 32, 32, 256, {3, 0}));
  EXPECT_EQ(code_of([&] { gaussian_baseline_median(u, v, 32, 32, 63, {}); }), Errc::InvalidArgument);
}

TEST(Report, GaussianNoiseIsOrderOne) {
  // Single draws are heavy tailed (the projection is a chi-square(1) variable),
  // so only the median over realizations is order one.
  const Matrix g = spiked_signal(64, 4);
  std::vector<double> r_hat;
  for (std::uint64_t t = 0; t < 24; ++t) {
    const Matrix e = sample_gaussian(64, 64, 1.0, {4, 100 + t});
    r_hat.push_back(localization_report(g, e, 256, {4, t}).normalized_R_hat);
  }
  const double med = median_of(r_hat);
  EXPECT_GE(med, 0.2);
  EXPECT_LE(med, 5.0);
}

TEST(Report, SpikeAndAlignedRegimes) {
  const Matrix g = spiked_signal(64, 5);
  const SvdResult s = full_svd(g);
  const Vector u = s.left(0), v = s.right(0);
  const auto iu = std::size_t(std::max_element(u.begin(), u.end(), [](double a, double b) {
                    return std::abs(a) < std::abs(b);
                  }) - u.begin());
  const auto iv = std::size_t(std::max_element(v.begin(), v.end(), [](double a, double b) {
                    return std::abs(a) < std::abs(b);
                  }) - v.begin());
  Matrix spike(64, 64);
  spike(iu, iv) = 10.0;
  // A lone entry gives r_max == r, so R is exactly 1 and R_hat is 1 / baseline.
  const LocalizationReport rs = localization_report(g, spike);
  EXPECT_DOUBLE_EQ(rs.ratio_R, 1.0);
  EXPECT_GE(rs.normalized_R_hat, 50.0);

  const LocalizationReport ra = localization_report(g, 3.0 * outer(u, v));
  EXPECT_LE(ra.normalized_R_hat, 0.02);
  EXPECT_EQ(code_of([&] { localization_report(Matrix::identity(4), Matrix::identity(4)); }),
            Errc::DegenerateSpectrum);
}

TEST(Taylor, DiagonalExamples) {
  const Matrix g{{2, 0}, {0, 1}};
  Matrix e(2, 2);
  e(0, 0) = 0.1;
  const TaylorPrediction t = taylor_prediction(g, e);
  EXPECT_DOUBLE_EQ(t.predicted, 2.1);
  EXPECT_NEAR(operator_norm(g + e), 2.1, 1e-14);
  EXPECT_TRUE(t.applicable);

  Matrix off(2, 2);
  off(0, 1) = 0.1;
  const TaylorPrediction o = taylor_prediction(g, off);
  EXPECT_EQ(o.first_order_term, 0.0);
  EXPECT_LE(std::abs(operator_norm(g + off) - 2.0), 4.0 * 0.01 / 1.0);
  EXPECT_NEAR(o.remainder_bound, 0.04, 1e-14);
}

TEST(Taylor, RandomPairsRespectRemainder) {
  int checked = 0;
  for (std::uint64_t t = 0; checked < 100; ++t) {
    const Matrix g = sample_gaussian(16, 16, 1.0, {6, t});
    const SpectralGapInfo info = spectral_gap(g);
    if (info.gap < 0.5) continue;
    Matrix e = sample_gaussian(16, 16, 1.0, {7, t});
    e *= (info.gap / 8.0) / operator_norm(e);
    const TaylorPrediction p = taylor_prediction(g, e);
    EXPECT_LE(std::abs(operator_norm(g + e) - p.predicted), p.remainder_bound);
    ++checked;
  }
}

TEST(Spearman, Examples) {
  const Vector xs{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(spearman_rho(xs, xs), 1.0);
  EXPECT_DOUBLE_EQ(spearman_rho(xs, Vector{10, 8, 6, 4, 2}), -1.0);
  EXPECT_NEAR(spearman_rho(Vector{1, 2, 2, 3}, Vector{1, 2, 3, 4}), 4.5 / std::sqrt(22.5), 1e-15);
  const Matrix am = sample_gaussian(1, 1000, 1.0, {8, 0});
  const Vector a(am.values().begin(), am.values().end());
  const Matrix bm = sample_gaussian(1, 1000, 1.0, {8, 1});
  const Vector b(bm.values().begin(), bm.values().end());
  EXPECT_LE(std::abs(spearman_rho(a, b)), 0.1);
  EXPECT_EQ(code_of([] { spearman_rho(Vector{1, 2}, Vector{1, 2}); }), Errc::InsufficientSamples);
  EXPECT_EQ(code_of([] { spearman_rho(Vector{1, 2, 3}, Vector{1, 2}); }), Errc::LengthMismatch);
  EXPECT_EQ(code_of([] { spearman_rho(Vector{1, 1, 1}, Vector{1, 2, 3}); }), Errc::InvalidArgument);
}

TEST(Spearman, InvariantUnderMonotoneMaps) {
  const Matrix am = sample_gaussian(1, 200, 1.0, {9, 0});
  const Matrix bm = sample_gaussian(1, 200, 1.0, {9, 1});
  Vector a(am.values().begin(), am.values().end()), b(bm.values().begin(), bm.values().end());
  for (std::size_t i = 0; i < a.size(); ++i) b[i] += a[i];
  const double rho = spearman_rho(a, b);
  Vector ea = a;
  for (double& x : ea) x = std::exp(3.0 * x);
  EXPECT_DOUBLE_EQ(spearman_rho(ea, b), rho);
  EXPECT_DOUBLE_EQ(spearman_rho(b, a), rho);
}

TEST(Hill, KnownTailIndices) {
  Philox rng({10, 0});
  Vector pareto(100000), cauchy(100000);
  for (double& x : pareto) x = std::pow(rng.uniform(), -0.5);
  for (double& x : cauchy) x = rng.cauchy(1.0);
  const double hp = hill_estimator(pareto, 1000);
  const double hc = hill_estimator(cauchy, 1000);
  EXPECT_GE(hp, 1.8);
  EXPECT_LE(hp, 2.2);
  EXPECT_GE(hc, 0.85);
  EXPECT_LE(hc, 1.15);
  EXPECT_EQ(code_of([] { hill_estimator(Vector(100, 3.0), 20); }), Errc::InsufficientSamples);
  EXPECT_EQ(code_of([] { hill_estimator(Vector(100, 3.0), 5); }), Errc::InsufficientSamples);
  EXPECT_EQ(default_hill_k(100000), 1000u);
  EXPECT_EQ(default_hill_k(100), 10u);
  EXPECT_EQ(default_hill_k(20), 10u);
}
