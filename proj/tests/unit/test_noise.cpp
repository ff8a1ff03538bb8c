#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "specclip/error.hpp"
#include "specclip/linalg.hpp"
#include "specclip/noise.hpp"
#include "specclip/quadrature.hpp"

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

double median_abs(std::span<const double> xs) {
  std::vector<double> a;
  for (double x : xs) a.push_back(std::abs(x));
  std::nth_element(a.begin(), a.begin() + a.size() / 2, a.end());
  return a[a.size() / 2];
}

}  // namespace

TEST(Contamination, GaussianMoments) {
  const Matrix e = sample_contamination(64, 64, {0.0, 1.0, HeavySpec::cauchy(1.0)}, {1, 0});
  double s1 = 0, s2 = 0;
  for (double x : e.values()) s1 += x;
  const double mean = s1 / 4096.0;
  for (double x : e.values()) s2 += (x - mean) * (x - mean);
  EXPECT_LE(std::abs(mean), 4.0 / 64.0);
  EXPECT_NEAR(std::sqrt(s2 / 4095.0), 1.0, 0.1);
}

TEST(Contamination, PureCauchyMedian) {
  for (double g : {0.5, 1.0, 4.0}) {
    const Matrix e = sample_contamination(256, 256, {1.0, 1.0, HeavySpec::cauchy(g)}, {2, 0});
    EXPECT_NEAR(median_abs(e.values()) / g, 1.0, 0.1);
  }
}

TEST(Contamination, ZeroNoiseAndValidation) {
  EXPECT_EQ(sample_contamination(3, 4, {0.0, 0.0, HeavySpec::cauchy(1.0)}, {3, 0}), Matrix(3, 4));
  EXPECT_EQ(code_of([] { ContaminationSpec{1.5, 1.0, {}}.validate(); }), Errc::InvalidSpec);
  EXPECT_EQ(code_of([] { ContaminationSpec{0.1, -1.0, {}}.validate(); }), Errc::InvalidSpec);
  EXPECT_EQ(code_of([] { ContaminationSpec{0.1, 1.0, HeavySpec::cauchy(0.0)}.validate(); }), Errc::InvalidSpec);
  EXPECT_EQ(code_of([] { ContaminationSpec{0.1, 1.0, HeavySpec::student_t(-1.0)}.validate(); }),
            Errc::InvalidSpec);
}

TEST(Contamination, MixtureFractionAndDeterminism) {
  // With sigma tiny, entries beyond 0.01 come from the heavy branch.
  const ContaminationSpec spec{0.3, 1e-6, HeavySpec::cauchy(1.0)};
  const Vector x = sample_scalar_noise(spec, 200000, {4, 0});
  const double frac = double(std::count_if(x.begin(), x.end(), [](double v) { return std::abs(v) > 0.01; })) /
                      double(x.size());
  const double expect = 0.3 * (1.0 - 2.0 * std::atan(0.01) / M_PI);
  EXPECT_NEAR(frac, expect, 0.005);
  EXPECT_EQ(sample_scalar_noise(spec, 1000, {4, 0}), sample_scalar_noise(spec, 1000, {4, 0}));
  EXPECT_NE(sample_scalar_noise(spec, 1000, {4, 0}), sample_scalar_noise(spec, 1000, {4, 1}));
}

TEST(Contamination, CauchyTailAgainstBound) {
  const double g = 1.5;
  const Vector x = sample_scalar_noise({1.0, 1.0, HeavySpec::cauchy(g)}, 1000000, {5, 0});
  const double tail =
      double(std::count_if(x.begin(), x.end(), [&](double v) { return std::abs(v) >= 10 * g; })) / double(x.size());
  EXPECT_NEAR(tail, 0.0634, 0.01);
  EXPECT_LE(tail, 2.0 / (10.0 * M_PI) + 0.001);
}

TEST(HeavySpec, DensitiesIntegrateToOne) {
  for (const HeavySpec& h : {HeavySpec::cauchy(0.7), HeavySpec::student_t(1.0, 3.0), HeavySpec::student_t(2.0),
                             HeavySpec::student_t(5.0, 0.5)}) {
    // Substitute x = tan(theta) to fold the infinite range onto (-pi/2, pi/2).
    const auto r = quad::integrate(
        [&](double th) {
          const double c = std::cos(th);
          return h.density(std::tan(th)) / (c * c);
        },
        -M_PI / 2, M_PI / 2, 1e-10);
    EXPECT_NEAR(r.value, 1.0, 1e-8) << describe(h);
  }
  EXPECT_DOUBLE_EQ(HeavySpec::cauchy(2.0).density(0.0), 1.0 / (2.0 * M_PI));
  EXPECT_EQ(HeavySpec::cauchy(1.0).collapse_constant(), 2.0);
  EXPECT_EQ(HeavySpec::student_t(2.0).collapse_constant(), 3.0);
  EXPECT_EQ(HeavySpec::student_t(1.0, 3.0).effective_gamma(), 3.0);
}

TEST(HeavySpec, StudentTScaleMatchesCauchy) {
  // t with one degree of freedom and scale s is Cauchy(0, s).
  const Vector x = sample_scalar_noise({1.0, 1.0, HeavySpec::student_t(1.0, 3.0)}, 200000, {6, 0});
  EXPECT_NEAR(median_abs(x) / 3.0, 1.0, 0.02);
  EXPECT_NEAR(HeavySpec::student_t(1.0, 3.0).density(1.3), HeavySpec::cauchy(3.0).density(1.3), 1e-15);
}

TEST(Subspace, RankAndScale) {
  EXPECT_EQ(code_of([] { sample_subspace(4, 4, {1.0, 0, false}, {}); }), Errc::InvalidSpec);
  EXPECT_EQ(code_of([] { sample_subspace(4, 3, {1.0, 4, false}, {}); }), Errc::RankTooLarge);

  const Matrix e = sample_subspace(256, 256, {100.0, 16, false}, {7, 0});
  const Vector s = singular_values(e);
  EXPECT_LT(s[16] / s[0], 1e-10);
  EXPECT_GT(s[15] / s[0], 1e-3);

  const Matrix o = sample_subspace(20, 12, {5.0, 3, true}, {7, 1});
  const Vector so = singular_values(o);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(so[i], 5.0, 1e-10);
  EXPECT_LT(so[3], 1e-10);
}

TEST(UnitSphere, IsUnitAndIsotropic) {
  Philox rng({8, 0});
  double first = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const Vector v = sample_unit_sphere(5, rng);
    EXPECT_NEAR(norm2(v), 1.0, 1e-14);
    first += v[0] * v[0];
  }
  EXPECT_NEAR(first / 20000.0, 0.2, 0.01);
}
