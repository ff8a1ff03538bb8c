#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "specclip/bayes.hpp"
#include "specclip/error.hpp"
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

ChannelSpec cauchy_channel(double alpha, double sigma_x = 1.0) {
  return ChannelSpec{sigma_x, ContaminationSpec{alpha, 1.0, HeavySpec::cauchy(1.0)}};
}

}  // namespace

TEST(Quadrature, KnownIntegrals) {
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(-x * x); }, -10, 10, 1e-12).value, std::sqrt(M_PI),
              1e-12);
  EXPECT_NEAR(quad::integrate([](double x) { return std::sin(x); }, 0, M_PI, 1e-12).value, 2.0, 1e-12);
  const auto kink = quad::integrate_split([](double x) { return std::abs(x - 0.3); }, -1, 1, {0.3, 5.0, -7.0}, 1e-12);
  EXPECT_NEAR(kink.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-13);
  EXPECT_EQ(quad::integrate([](double) { return 1.0; }, 2.0, 2.0, 1e-12).value, 0.0);
  EXPECT_EQ(code_of([] { quad::integrate([](double x) { return x > 0.5 ? NAN : x; }, 0, 1, 1e-12); }),
            Errc::QuadratureFailure);
}

TEST(Channel, ValidationAndGain) {
  EXPECT_DOUBLE_EQ(cauchy_channel(0.1, 2.0).beta(), 0.8);
  EXPECT_EQ(code_of([] { ChannelSpec{0.0, {}}.validate(); }), Errc::InvalidSpec);
  EXPECT_EQ(code_of([] { ChannelSpec{1.0, ContaminationSpec{0.5, 0.0, {}}}.validate(); }), Errc::InvalidSpec);
  EXPECT_NO_THROW((ChannelSpec{1.0, ContaminationSpec{1.0, 0.0, {}}}.validate()));
}

TEST(Retention, DegenerateMixtures) {
  for (double y : {-30.0, -1.0, 0.0, 0.5, 7.0, 100.0}) {
    EXPECT_EQ(retention_probability(y, cauchy_channel(0.0)), 1.0);
    EXPECT_EQ(retention_probability(y, cauchy_channel(1.0)), 0.0);
  }
}

TEST(Retention, RedescendsInTheTail) {
  const ChannelSpec spec = cauchy_channel(0.1);
  const double p2 = retention_probability(2.0, spec);
  const double p5 = retention_probability(5.0, spec);
  const double p10 = retention_probability(10.0, spec);
  EXPECT_LT(p10, p5);
  EXPECT_LT(p5, p2);
  EXPECT_GT(retention_probability(0.0, spec), 0.8);
  EXPECT_LT(retention_probability(40.0, spec), 1e-100);
  EXPECT_DOUBLE_EQ(retention_probability(-5.0, spec), p5);
}

TEST(Marginals, HeavyDensityIsNormalized) {
  const ChannelSpec spec = cauchy_channel(0.3, 1.5);
  // |y| <= 1000 through y = tan(theta); the rest is the Cauchy tail 2 / (pi * 1000).
  const double edge = std::atan(1000.0);
  const auto r = quad::integrate(
      [&](double th) {
        const double c = std::cos(th);
        return heavy_marginal_density(std::tan(th), spec) / (c * c);
      },
      -edge, edge, 1e-9, 1e-9);
  EXPECT_NEAR(r.value + 2.0 / (M_PI * 1000.0), 1.0, 1e-5);
  EXPECT_NEAR(gaussian_marginal_density(0.0, spec), 1.0 / std::sqrt(2 * M_PI * (2.25 + 1.0)), 1e-15);
}

TEST(Posterior, SymmetryAndGaussianCase) {
  const ChannelSpec spec = cauchy_channel(0.2);
  EXPECT_EQ(posterior_mean_oracle(0.0, spec).posterior_mean, 0.0);
  for (double y : {0.3, 2.0, 9.0}) {
    EXPECT_NEAR(posterior_mean_oracle(-y, spec).posterior_mean, -posterior_mean_oracle(y, spec).posterior_mean,
                1e-12);
  }
  const ChannelSpec clean = cauchy_channel(0.0, 2.0);
  for (double y : {-4.0, 0.7, 13.0}) EXPECT_EQ(posterior_mean_oracle(y, clean).posterior_mean, clean.beta() * y);
}

TEST(Posterior, BranchDecompositionIsConsistent) {
  const ChannelSpec spec = cauchy_channel(0.1);
  for (double y : {0.5, 1.0, 3.0, 6.0, 12.0, 40.0}) {
    const PosteriorDecomposition d = posterior_mean_oracle(y, spec);
    EXPECT_LT(d.consistency_error, 1e-9) << "y = " << y;
    EXPECT_NEAR(d.residual_rho, (1.0 - d.retention_pi) * d.heavy_mean, 1e-9);
  }
}

TEST(Posterior, CollapseAtLargeObservation) {
  const ChannelSpec spec = cauchy_channel(0.1);
  const PosteriorDecomposition d = posterior_mean_oracle(20.0, spec);
  const double bound = 3.0 * 2.0 / 20.0 * (1.0 - d.retention_pi);
  EXPECT_LE(std::abs(d.posterior_mean - d.retention_pi * spec.beta() * 20.0), bound + 1e-10);
}

TEST(Collapse, ExamplesAndGrid) {
  const ChannelSpec spec = cauchy_channel(0.1);
  const auto rows = posterior_collapse_check(spec, {0.0, 100.0});
  EXPECT_EQ(rows[0].heavy_mean, 0.0);
  EXPECT_NEAR(rows[1].bound, 0.06, 1e-15);
  EXPECT_FALSE(rows[1].violated);

  const ChannelSpec t2{2.0, ContaminationSpec{0.1, 1.0, HeavySpec::student_t(2.0)}};
  const auto r50 = posterior_collapse_check(t2, {50.0});
  EXPECT_NEAR(r50[0].bound, 0.72, 1e-15);
  EXPECT_FALSE(r50[0].violated);

  for (const auto& r : posterior_collapse_check(spec, log_grid(5.0, 100.0, 25))) {
    EXPECT_FALSE(r.violated) << "y = " << r.y;
    EXPECT_GT(r.heavy_mean, 0.0);
  }
}

TEST(Surrogate, GaussianChannelPrefersLargeTau) {
  const ChannelSpec clean = cauchy_channel(0.0);
  const auto grid = linear_grid(-10, 10, 21);
  const SurrogateProfile p = surrogate_error_profile(clean, 1.0, grid);
  EXPECT_GT(p.best_tau, 1e3);
  EXPECT_LT(p.best_max_err, surrogate_error_profile(clean, 100.0, grid).max_err);
  EXPECT_LT(p.best_max_err, 0.01);
}

TEST(Surrogate, ContaminatedChannelBestTau) {
  // The posterior mean rises like beta * y up to |y| ~ 4 and then drops within
  // a few units, which a single-scale shrinkage curve cannot follow closely.
  // Frozen from the quadrature oracle.
  const SurrogateProfile p = surrogate_error_profile(cauchy_channel(0.1), 1.0, linear_grid(-10, 10, 41));
  EXPECT_NEAR(p.best_tau, 5.26, 0.05);
  EXPECT_NEAR(p.best_max_err, 0.6225, 1e-3);
  EXPECT_LE(p.best_max_err, p.max_err);
  for (const auto& r : p.rows) {
    if (r.y == 0.0) {
      EXPECT_EQ(r.bayes, 0.0);
      EXPECT_EQ(r.surrogate, 0.0);
    }
  }
  EXPECT_EQ(code_of([] { surrogate_error_profile(cauchy_channel(0.1), 0.0, {1.0}); }),
            Errc::NonPositiveThreshold);
}

TEST(Factorization, ThresholdExistsForContaminatedChannel) {
  const ChannelSpec spec = cauchy_channel(0.1);
  const double y_star = factorization_threshold(spec, log_grid(1.0, 100.0, 40), 0.05);
  ASSERT_FALSE(std::isnan(y_star));
  EXPECT_GT(y_star, 1.0);
  EXPECT_LT(y_star, 100.0);
  EXPECT_TRUE(std::isnan(factorization_threshold(spec, {100.0}, 1e-12)));
}

TEST(Grids, Endpoints) {
  const auto lg = log_grid(5.0, 100.0, 7);
  EXPECT_EQ(lg.front(), 5.0);
  EXPECT_EQ(lg.back(), 100.0);
  EXPECT_NEAR(lg[1] / lg[0], lg[6] / lg[5], 1e-12);
  EXPECT_EQ(linear_grid(-1, 1, 5), (std::vector<double>{-1, -0.5, 0, 0.5, 1}));
  EXPECT_EQ(code_of([] { log_grid(0.0, 1.0, 3); }), Errc::InvalidArgument);
}
