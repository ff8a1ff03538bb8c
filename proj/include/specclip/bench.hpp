#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specclip/clip.hpp"
#include "specclip/linalg.hpp"
#include "specclip/noise.hpp"
#include "specclip/optim.hpp"

namespace specclip::bench {

struct RegressionProblem {
  Matrix W_star;
  Matrix A;
  Matrix Y;
  /// A A^T / n, so the gradient is (W - W_star) H.
  Matrix H;
  std::size_t n = 0;
};

struct ProblemSpec {
  std::size_t d_out = 32;
  std::size_t d_h = 32;
  std::size_t n = 128;
};

RegressionProblem make_problem(std::size_t d_out, std::size_t d_h, std::size_t n, SeedSpec seed);
RegressionProblem make_problem(const ProblemSpec& spec, std::uint64_t seed);

/// (1 / 2n) ||W A - Y||_F^2
double loss(const Matrix& w, const RegressionProblem& p);
/// (1 / n) (W A - Y) A^T
Matrix true_gradient(const Matrix& w, const RegressionProblem& p);

enum class Method { GD, SpectralGD };

const char* to_string(Method m) noexcept;
Method parse_method(const std::string& name);
/// "post" for GD, "pre" for spectral GD.
const char* stage_of(Method m) noexcept;

struct RunConfig {
  Method method = Method::GD;
  /// None, HardCoordinate or SmoothShrinkage; thresholds come from the quantile.
  ClipKind clip = ClipKind::None;
  double lr = 0.01;
  double quantile = 0.99;
  double alpha = 0.0;
  double noise_sigma = 1.0;
  HeavySpec heavy = HeavySpec::student_t(1.0, 3.0);
  std::size_t steps = 500;
  ScaleMode scale_mode = ScaleMode::Dims;
  MsignOptions msign;
  /// Spectral-error and subspace curves cost one SVD pair per step; when off
  /// only their final values are computed.
  bool record_metric_curves = false;
  std::size_t subspace_k = 1;
  /// A run is stopped as diverged once the loss exceeds this multiple of the initial loss.
  double divergence_factor = 1e12;
  bool record_timing = false;

  void validate() const;
  ContaminationSpec noise() const;
};

struct RunResult {
  double initial_loss = 0.0;
  /// Loss after each step; entries after a divergence are +inf.
  std::vector<double> loss_curve;
  double final_loss = 0.0;
  bool diverged = false;
  std::vector<double> spectral_error_curve;
  std::vector<double> subspace_recovery_curve;
  double spectral_err_final = 0.0;
  double subspace_angle_final = 0.0;
  /// NaN unless timing was requested.
  double wall_time = 0.0;
};

/// Per-step noise matrices shared by every cell with the same (alpha, seed).
class NoiseTape {
 public:
  NoiseTape(std::size_t rows, std::size_t cols, const ContaminationSpec& spec, std::uint64_t seed,
            std::size_t steps);
  const Matrix& at(std::size_t step) const { return steps_.at(step); }
  std::size_t size() const { return steps_.size(); }

 private:
  std::vector<Matrix> steps_;
};

/// Noise matrix for one step; the stream depends on (alpha, step) only.
Matrix step_noise(std::size_t rows, std::size_t cols, const ContaminationSpec& spec, std::uint64_t seed,
                  std::size_t step);

RunResult run_training(const RegressionProblem& problem, const RunConfig& config, std::uint64_t seed);
RunResult run_training(const RegressionProblem& problem, const RunConfig& config, const NoiseTape& tape);

enum class SpeedupStatus { Reached, NotReached, BaselineDiverged, MethodDiverged };

const char* to_string(SpeedupStatus s) noexcept;

struct Speedup {
  double value = 1.0;
  /// Interpolated 1-based step where the method first reaches the target.
  double steps_to_target = 0.0;
  SpeedupStatus status = SpeedupStatus::Reached;
};

/// First (interpolated) step at which the curve is at or below target; NaN if never.
double first_hit(const std::vector<double>& curve, double target);

/// Target is the baseline's final loss; speedup is the ratio of first-hit
/// steps. A method that never reaches the target falls back to
/// target / method_final (< 1) flagged NotReached. A diverged method scores 0;
/// a diverged baseline gives +inf, or 1 when both diverge.
Speedup speedup_metric(const std::vector<double>& baseline_curve, const std::vector<double>& method_curve);

/// Largest principal angle between top-k left singular subspaces.
double subspace_recovery(const Matrix& g_clipped, const Matrix& g_true, std::size_t k);

struct SweepGrid {
  std::vector<Method> methods{Method::GD, Method::SpectralGD};
  std::vector<ClipKind> clips{ClipKind::None, ClipKind::HardCoordinate, ClipKind::SmoothShrinkage};
  std::vector<double> alphas{0.0, 1e-3, 1e-2, 5e-2, 1e-1, 0.5, 0.8, 1.0};
  std::vector<double> lrs{0.001, 0.005, 0.01, 0.02, 0.05, 0.1};
  std::vector<double> quantiles{0.90, 0.95, 0.99, 0.995, 0.999, 0.9995, 0.99999};
};

struct SweepRow {
  Method method = Method::GD;
  ClipKind clip = ClipKind::None;
  double alpha = 0.0;
  double lr = 0.0;
  /// NaN for unclipped cells.
  double quantile = 0.0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  bool diverged = false;
  double steps_to_target = 0.0;
  double speedup = 1.0;
  SpeedupStatus speedup_status = SpeedupStatus::Reached;
  double spectral_err_final = 0.0;
  double subspace_angle_final = 0.0;
  double wall_time_s = 0.0;
};

struct BestRow {
  Method method = Method::GD;
  ClipKind clip = ClipKind::None;
  double alpha = 0.0;
  double lr = 0.0;
  double quantile = 0.0;
  double median_final_loss = 0.0;
  double median_speedup = 1.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<BestRow> best;
  /// Loss curves keyed like rows, kept only when requested.
  std::vector<std::vector<double>> curves;
};

struct SweepOptions {
  ProblemSpec problem;
  RunConfig base;
  SweepGrid grid;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  bool keep_curves = false;
};

/// Cells run in parallel; rows come back in grid order regardless of schedule.
SweepResult grid_sweep(const SweepOptions& options);

double median(std::vector<double> xs);

std::vector<std::string> results_header();
std::vector<std::string> results_cells(const SweepRow& row);
std::vector<std::string> best_header();
std::vector<std::string> best_cells(const BestRow& row);

}  // namespace specclip::bench
