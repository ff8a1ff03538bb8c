#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "specclip/clip.hpp"
#include "specclip/linalg.hpp"
#include "specclip/noise.hpp"

namespace specclip {

struct TheoremConstants {
  double B = 1.0;
  double L = 1.0;
  double Delta = 1.0;
  double alpha = 0.0;
  double sigma = 1.0;
  double gamma = 1.0;
  std::size_t m = 1;
  std::size_t n = 1;

  void validate() const;
  double d() const { return static_cast<double>(m * n); }
  double r() const { return static_cast<double>(std::min(m, n)); }
  double q() const { return static_cast<double>(std::max(m, n)); }
  double D() const;
  ContaminationSpec noise() const;
};

enum class ThresholdKind { PostHard, PostSmooth, PreHard, PreSmooth };

const char* to_string(ThresholdKind kind) noexcept;
ThresholdKind parse_threshold_kind(const std::string& name);

/// Minimal admissible threshold of the given kind.
double threshold(ThresholdKind kind, const TheoremConstants& tc);

enum class PhiKind { Hard, Smooth };

/// Scalar clipping map: hard clip at t or smooth shrinkage with scale t.
struct Phi {
  PhiKind kind = PhiKind::Hard;
  double t = 1.0;

  double operator()(double x) const;
  /// Bound on |phi(x)|: t for hard clipping, t / e for smooth shrinkage.
  double range() const;
};

struct BiasVarianceBounds {
  double rho = 0.0;
  double v = 0.0;
};

/// Upper tail of the standard normal.
double normal_sf(double x);

BiasVarianceBounds bias_variance_bounds(const Phi& phi, const TheoremConstants& tc);

/// E phi(g + xi) for xi from the contamination mixture, by quadrature.
double relative_bias_oracle(const Phi& phi, double g, const ContaminationSpec& noise);
/// Var phi(g + xi) by quadrature.
double variance_oracle(const Phi& phi, double g, const ContaminationSpec& noise);

struct MonteCarloVariance {
  double variance = 0.0;
  double standard_error = 0.0;
};

MonteCarloVariance variance_monte_carlo(const Phi& phi, double g, const ContaminationSpec& noise,
                                        std::size_t draws, SeedSpec seed);

struct DerivativeDeficits {
  double gaussian = 0.0;
  double gaussian_bound = 0.0;
  double cauchy = 0.0;
  double cauchy_bound = 0.0;
};

/// 1 - E S_c'(sigma Z) and 1 - E S_c'(H) for H ~ Cauchy(0, gamma), with their bounds.
DerivativeDeficits derivative_deficits(double c, double sigma, double gamma);

bool log_device_premise(double a, double s, double x);
/// True iff the premise x >= 2 s a log(e + 2 s a) holds and a log(e + x) / x <= 1 / s.
bool log_device_check(double a, double s, double x);

/// Learning rate for post-clipping over K steps with |phi| <= range.
double post_step_size(const TheoremConstants& tc, double range, std::size_t horizon);
/// Learning rate for pre-clipping (matrix-sign) updates over T steps.
double pre_step_size(const TheoremConstants& tc, std::size_t horizon);
/// Envelope 2 tau sqrt(2 L Delta d / K) on the average squared gradient norm.
double post_hard_rate_bound(const TheoremConstants& tc, double tau, std::size_t horizon);

Matrix post_clip_step(const Matrix& x, const Matrix& grad_sample, const ClipSpec& phi, double eta);

enum class ScaleMode { Unit, Dims };

/// 1 for Unit, 0.2 sqrt(max(m, n)) for Dims.
double update_scale(ScaleMode mode, std::size_t m, std::size_t n);

Matrix pre_clip_step(const Matrix& x, const std::vector<Matrix>& samples, const ClipSpec& phi, double eta,
                     ScaleMode scale_mode = ScaleMode::Unit, const MsignOptions& msign_options = {});

}  // namespace specclip
