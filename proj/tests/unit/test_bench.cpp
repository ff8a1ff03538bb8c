#include <gtest/gtest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>

#include "specclip/bench.hpp"
#include "specclip/error.hpp"
#include "specclip/linalg.hpp"

using namespace specclip;
using namespace specclip::bench;

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

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

SweepOptions tiny_sweep() {
  SweepOptions o;
  o.problem = {8, 8, 32};
  o.base.steps = 60;
  o.grid.methods = {Method::GD, Method::SpectralGD};
  o.grid.clips = {ClipKind::None, ClipKind::HardCoordinate, ClipKind::SmoothShrinkage};
  o.grid.alphas = {0.0, 0.5};
  o.grid.lrs = {0.01, 0.05};
  o.grid.quantiles = {0.9, 0.99};
  o.seeds = {0, 1, 2};
  return o;
}

}  // namespace

TEST(Problem, RealizableAndDeterministic) {
  const RegressionProblem p = make_problem({32, 32, 128}, 3);
  EXPECT_EQ(p.W_star.rows(), 32u);
  EXPECT_EQ(p.A.cols(), 128u);
  EXPECT_EQ(loss(p.W_star, p), 0.0);
  EXPECT_EQ(true_gradient(p.W_star, p), Matrix(32, 32));
  const RegressionProblem q = make_problem({32, 32, 128}, 3);
  EXPECT_EQ(p.A, q.A);
  EXPECT_EQ(p.W_star, q.W_star);
  EXPECT_NE(make_problem({32, 32, 128}, 4).A, p.A);
  EXPECT_EQ(code_of([] { make_problem(0, 3, 3, {}); }), Errc::InvalidArgument);
}

TEST(Problem, GradientMatchesFiniteDifferences) {
  const RegressionProblem p = make_problem({6, 5, 20}, 1);
  const Matrix w = sample_gaussian(6, 5, 1.0, {1, 7});
  const Matrix d = sample_gaussian(6, 5, 1.0, {1, 8});
  const Matrix g = true_gradient(w, p);
  const double h = 1e-5;
  const double fd = (loss(w + h * d, p) - loss(w - h * d, p)) / (2 * h);
  EXPECT_NEAR(fd, inner(g, d), 1e-6 * std::abs(inner(g, d)));
  EXPECT_LT(loss(w - 1e-3 * g, p), loss(w, p));
  // The fast path (W - W*) H agrees with the data form.
  const Matrix fast = matmul(w - p.W_star, p.H);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(fast.values()[k], g.values()[k], 1e-12);
  EXPECT_NEAR(0.5 * inner(w - p.W_star, g), loss(w, p), 1e-12 * loss(w, p));
  EXPECT_EQ(code_of([&] { true_gradient(Matrix(5, 6), p); }), Errc::ShapeMismatch);
}

TEST(Training, CleanRunDescends) {
  const RegressionProblem p = make_problem({16, 16, 64}, 0);
  RunConfig cfg;
  cfg.alpha = 0.0;
  cfg.noise_sigma = 0.0;
  cfg.lr = 0.05;
  cfg.steps = 500;
  const RunResult r = run_training(p, cfg, 0);
  EXPECT_FALSE(r.diverged);
  EXPECT_EQ(r.loss_curve.size(), 500u);
  EXPECT_LT(r.final_loss, r.initial_loss);
  EXPECT_LT(r.final_loss, 1e-4 * r.initial_loss);
  EXPECT_TRUE(std::isnan(r.wall_time));
  cfg.record_timing = true;
  EXPECT_GE(run_training(p, cfg, 0).wall_time, 0.0);
}

TEST(Training, DefaultStepsConvergeAtDeskScale) {
  const RegressionProblem p = make_problem(ProblemSpec{}, 0);
  RunConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.lr = 0.1;
  EXPECT_LT(run_training(p, cfg, 0).final_loss, 1e-6);
}

TEST(Training, HeavyNoiseBreaksVanillaGd) {
  const RegressionProblem p = make_problem(ProblemSpec{}, 0);
  RunConfig clean;
  clean.lr = 0.05;
  const double clean_loss = run_training(p, clean, 0).final_loss;
  RunConfig noisy = clean;
  noisy.alpha = 0.5;
  const RunResult r = run_training(p, noisy, 0);
  EXPECT_TRUE(r.diverged || r.final_loss > 10.0 * clean_loss) << r.final_loss << " vs " << clean_loss;
  RunConfig clipped = noisy;
  clipped.clip = ClipKind::SmoothShrinkage;
  EXPECT_LT(run_training(p, clipped, 0).final_loss, r.final_loss);
}

TEST(Training, TapeAndSeedAgree) {
  const RegressionProblem p = make_problem({8, 8, 32}, 2);
  RunConfig cfg;
  cfg.method = Method::SpectralGD;
  cfg.clip = ClipKind::HardCoordinate;
  cfg.alpha = 0.1;
  cfg.steps = 40;
  cfg.record_metric_curves = true;
  const RunResult a = run_training(p, cfg, 5);
  const RunResult b = run_training(p, cfg, NoiseTape(8, 8, cfg.noise(), 5, 40));
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  EXPECT_EQ(a.spectral_error_curve.size(), 40u);
  EXPECT_EQ(a.subspace_recovery_curve.size(), 40u);
  EXPECT_EQ(a.spectral_err_final, a.spectral_error_curve.back());
  EXPECT_EQ(code_of([&] { run_training(p, cfg, NoiseTape(8, 8, cfg.noise(), 5, 10)); }), Errc::InvalidArgument);
}

TEST(Training, SpectralStepHasFixedOperatorNorm) {
  // From W = 0 one spectral step moves W by lr * scale * msign(.), whose top singular value is lr * scale.
  const RegressionProblem p = make_problem({8, 8, 32}, 3);
  RunConfig cfg;
  cfg.method = Method::SpectralGD;
  cfg.steps = 1;
  cfg.lr = 0.02;
  const RunResult r = run_training(p, cfg, 1);
  const Matrix update = true_gradient(Matrix(8, 8), p) + step_noise(8, 8, cfg.noise(), 1, 0);
  const Matrix w1 = -(cfg.lr * update_scale(ScaleMode::Dims, 8, 8)) * msign(update);
  EXPECT_NEAR(operator_norm(w1), cfg.lr * 0.2 * std::sqrt(8.0), 1e-12);
  EXPECT_NEAR(r.final_loss, loss(w1, p), 1e-10 * loss(w1, p));
}

TEST(Speedup, Definitions) {
  const std::vector<double> base{10, 8, 6, 4, 2};
  EXPECT_DOUBLE_EQ(speedup_metric(base, base).value, 1.0);
  const std::vector<double> fast{10, 6, 2, 1, 0.5};
  EXPECT_DOUBLE_EQ(first_hit(base, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(first_hit(fast, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(first_hit(base, 5.0), 3.5);
  EXPECT_DOUBLE_EQ(first_hit(base, 100.0), 1.0);
  EXPECT_TRUE(std::isnan(first_hit(base, 1.0)));

  const std::vector<double> halved{8, 4, 2, 2, 2, 2, 2, 2, 2, 2};
  const std::vector<double> slow{10, 9, 8, 7, 6, 5, 4, 3, 2.5, 2};
  const Speedup s = speedup_metric(slow, halved);
  EXPECT_DOUBLE_EQ(s.value, 10.0 / 3.0);
  EXPECT_EQ(s.status, SpeedupStatus::Reached);

  const Speedup miss = speedup_metric(base, std::vector<double>{9, 8, 7, 6, 4});
  EXPECT_EQ(miss.status, SpeedupStatus::NotReached);
  EXPECT_DOUBLE_EQ(miss.value, 0.5);

  const Speedup bdiv = speedup_metric(std::vector<double>{1, INFINITY}, base);
  EXPECT_EQ(bdiv.status, SpeedupStatus::BaselineDiverged);
  const Speedup mdiv = speedup_metric(base, std::vector<double>{1, INFINITY});
  EXPECT_EQ(mdiv.status, SpeedupStatus::MethodDiverged);
  EXPECT_EQ(mdiv.value, 0.0);
  EXPECT_EQ(code_of([] { speedup_metric({}, {1.0}); }), Errc::InvalidArgument);
}

TEST(Subspace, RecoveryAngle) {
  const Matrix g = sample_gaussian(8, 8, 1.0, {4, 0});
  EXPECT_NEAR(subspace_recovery(g, g, 1), 0.0, 1e-7);
  EXPECT_NEAR(subspace_recovery(Matrix::diagonal(Vector{2, 1}), Matrix::diagonal(Vector{1, 2}), 1), M_PI / 2,
              1e-12);
}

TEST(Sweep, SingleCellMatchesDirectRuns) {
  SweepOptions o;
  o.problem = {8, 8, 32};
  o.base.steps = 50;
  o.grid.methods = {Method::GD};
  o.grid.clips = {ClipKind::SmoothShrinkage};
  o.grid.alphas = {0.1};
  o.grid.lrs = {0.05};
  o.grid.quantiles = {0.95};
  o.seeds = {3, 4, 5};
  const SweepResult r = grid_sweep(o);
  ASSERT_EQ(r.rows.size(), 3u);
  ASSERT_EQ(r.best.size(), 1u);
  std::vector<double> finals;
  for (std::size_t s = 0; s < 3; ++s) {
    RunConfig cfg = o.base;
    cfg.clip = ClipKind::SmoothShrinkage;
    cfg.alpha = 0.1;
    cfg.lr = 0.05;
    cfg.quantile = 0.95;
    const RunResult direct = run_training(make_problem(o.problem, o.seeds[s]), cfg, o.seeds[s]);
    EXPECT_EQ(r.rows[s].final_loss, direct.final_loss);
    finals.push_back(direct.final_loss);
  }
  EXPECT_EQ(r.best[0].median_final_loss, median(finals));
}

TEST(Sweep, TableShapeBestRowsAndBaselineSpeedup) {
  const SweepOptions o = tiny_sweep();
  const SweepResult r = grid_sweep(o);
  // Per alpha and method: 2 unclipped + 2 clips * 2 lrs * 2 quantiles cells.
  EXPECT_EQ(r.rows.size(), 2u * 2u * (2u + 8u) * 3u);
  EXPECT_EQ(r.best.size(), 2u * 2u * 3u);
  for (const BestRow& b : r.best) {
    for (std::size_t i = 0; i < r.rows.size(); i += 3) {
      const SweepRow& row = r.rows[i];
      if (row.method != b.method || row.clip != b.clip || row.alpha != b.alpha) continue;
      const double m = median({r.rows[i].final_loss, r.rows[i + 1].final_loss, r.rows[i + 2].final_loss});
      EXPECT_LE(b.median_final_loss, m);
    }
  }
  for (const BestRow& b : r.best) {
    if (b.clip == ClipKind::None) {
      EXPECT_DOUBLE_EQ(b.median_speedup, 1.0);
    }
  }
  for (const SweepRow& row : r.rows) {
    EXPECT_EQ(std::isnan(row.quantile), row.clip == ClipKind::None);
    EXPECT_TRUE(std::isnan(row.wall_time_s));
  }
  EXPECT_TRUE(r.curves.empty());
}

TEST(Sweep, IndependentOfThreadCount) {
  SweepOptions o = tiny_sweep();
  o.keep_curves = true;
  omp_set_num_threads(1);
  const SweepResult a = grid_sweep(o);
  omp_set_num_threads(4);
  const SweepResult b = grid_sweep(o);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_TRUE(same_bits(a.rows[i].final_loss, b.rows[i].final_loss)) << i;
    EXPECT_TRUE(same_bits(a.rows[i].speedup, b.rows[i].speedup)) << i;
    EXPECT_EQ(results_cells(a.rows[i]), results_cells(b.rows[i]));
  }
  EXPECT_EQ(a.curves, b.curves);
}

TEST(Sweep, CsvColumns) {
  const auto h = results_header();
  const std::vector<std::string> expected{"method", "clip", "stage", "alpha", "lr", "quantile", "seed",
                                          "final_loss", "diverged", "steps_to_target", "speedup",
                                          "spectral_err_final", "subspace_angle_final", "wall_time_s"};
  ASSERT_GE(h.size(), expected.size());
  EXPECT_TRUE(std::equal(expected.begin(), expected.end(), h.begin()));
  SweepRow row;
  EXPECT_EQ(results_cells(row).size(), h.size());
  EXPECT_EQ(best_cells(BestRow{}).size(), best_header().size());
  EXPECT_EQ(parse_method("spectral_gd"), Method::SpectralGD);
  EXPECT_STREQ(stage_of(Method::GD), "post");
  EXPECT_STREQ(stage_of(Method::SpectralGD), "pre");
}
