#include "specclip/optim.hpp"

#include <cmath>
#include <numbers>

#include "specclip/error.hpp"
#include "specclip/quadrature.hpp"
#include "specclip/rng.hpp"

namespace specclip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
constexpr double kOracleRelTol = 1e-10;

void require(bool ok, const char* what) {
  if (!ok) fail(Errc::InvalidConstants, what);
}

double sqrt_8_over_pi() { return std::sqrt(8.0 / kPi); }

// Points where phi changes piece, for the quadrature splits.
std::vector<double> phi_breaks(const Phi& phi) {
  if (phi.kind == PhiKind::Hard) return {-phi.t, phi.t};
  return {-phi.t, 0.0, phi.t};
}

// E f(g + sigma Z) for a piecewise-smooth f with the given breakpoints.
template <typename F>
double gaussian_expectation(F&& f, double g, double sigma, const std::vector<double>& breaks) {
  if (sigma == 0.0) return f(g);
  const double span = 12.0 * sigma;
  auto integrand = [&](double x) {
    const double z = (x - g) / sigma;
    return f(x) * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
  };
  return quad::integrate_split(integrand, g - span, g + span, breaks, 1e-300, kOracleRelTol).value;
}

// E f(g + H) for the heavy component, after the change of variables
// h = w tan(theta) that maps the real line onto (-pi/2, pi/2).
template <typename F>
double heavy_expectation(F&& f, double g, const HeavySpec& heavy, const std::vector<double>& breaks) {
  const double w = heavy.kind == HeavyKind::Cauchy ? heavy.gamma : heavy.scale;
  auto integrand = [&](double theta) {
    const double t = std::tan(theta);
    const double c = std::cos(theta);
    return f(g + w * t) * heavy.density(w * t) * w / (c * c);
  };
  std::vector<double> thetas;
  for (double b : breaks) thetas.push_back(std::atan((b - g) / w));
  // Decades of |h| / w, so features far out in the tail get their own pieces.
  for (double t = 1.0; t <= 1e8; t *= 10.0) {
    thetas.push_back(std::atan(t));
    thetas.push_back(-std::atan(t));
  }
  const double edge = kPi / 2.0;
  return quad::integrate_split(integrand, -edge, edge, thetas, 1e-300, kOracleRelTol).value;
}

template <typename F>
double mixture_expectation(F&& f, double g, const ContaminationSpec& noise,
                           const std::vector<double>& breaks) {
  noise.validate();
  double total = 0.0;
  if (noise.alpha < 1.0) total += (1.0 - noise.alpha) * gaussian_expectation(f, g, noise.sigma, breaks);
  if (noise.alpha > 0.0) total += noise.alpha * heavy_expectation(f, g, noise.heavy, breaks);
  return total;
}

}  // namespace

void TheoremConstants::validate() const {
  require(B >= 0.0 && std::isfinite(B), "B must be >= 0");
  require(L > 0.0 && std::isfinite(L), "L must be > 0");
  require(Delta > 0.0 && std::isfinite(Delta), "Delta must be > 0");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be >= 0");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be > 0");
  require(m >= 1 && n >= 1, "dimensions must be positive");
}

double TheoremConstants::D() const { return std::sqrt(q() / r()); }

ContaminationSpec TheoremConstants::noise() const {
  ContaminationSpec s;
  s.alpha = alpha;
  s.sigma = sigma;
  s.heavy = HeavySpec::cauchy(gamma);
  return s;
}

const char* to_string(ThresholdKind kind) noexcept {
  switch (kind) {
    case ThresholdKind::PostHard: return "post_hard";
    case ThresholdKind::PostSmooth: return "post_smooth";
    case ThresholdKind::PreHard: return "pre_hard";
    case ThresholdKind::PreSmooth: return "pre_smooth";
  }
  return "post_hard";
}

ThresholdKind parse_threshold_kind(const std::string& name) {
  if (name == "post_hard") return ThresholdKind::PostHard;
  if (name == "post_smooth") return ThresholdKind::PostSmooth;
  if (name == "pre_hard") return ThresholdKind::PreHard;
  if (name == "pre_smooth") return ThresholdKind::PreSmooth;
  fail(Errc::InvalidArgument, "unknown threshold kind '" + name + "'");
}

double threshold(ThresholdKind kind, const TheoremConstants& tc) {
  tc.validate();
  const double B = tc.B, s = tc.sigma, a = tc.alpha, g = tc.gamma;
  const double sr = std::sqrt(tc.r());
  const double gauss_mean = B + sqrt_8_over_pi() * (1.0 - a) * s;
  switch (kind) {
    case ThresholdKind::PostHard:
      return B + std::max(s * std::sqrt(2.0 * std::log(8.0)), 8.0 * a * g / kPi);
    case ThresholdKind::PostSmooth:
      return std::max(4.0 * gauss_mean, (64.0 * a * g / kPi) * std::log(kE + 64.0 * a / kPi));
    case ThresholdKind::PreHard:
      return B + std::max(s * std::sqrt(2.0 * std::log(16.0 * sr)), 16.0 * a * g * sr / kPi);
    case ThresholdKind::PreSmooth:
      return std::max(8.0 * sr * gauss_mean,
                      (128.0 * a * g * sr / kPi) * std::log(kE + 128.0 * a * sr / kPi));
  }
  return 0.0;
}

double Phi::operator()(double x) const {
  return kind == PhiKind::Hard ? hard_clip_scalar(x, t) : smooth_shrink_scalar(x, t);
}

double Phi::range() const { return kind == PhiKind::Hard ? t : t / kE; }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

BiasVarianceBounds bias_variance_bounds(const Phi& phi, const TheoremConstants& tc) {
  tc.validate();
  if (!(phi.t > 0.0)) fail(Errc::NonPositiveThreshold, "threshold must be positive");
  const double B = tc.B, s = tc.sigma, a = tc.alpha, g = tc.gamma;
  BiasVarianceBounds out;
  if (phi.kind == PhiKind::Hard) {
    const double tau = phi.t;
    if (!(tau > B)) fail(Errc::ThresholdBelowB, "hard threshold must exceed B");
    const double gauss = s > 0.0 ? 2.0 * (1.0 - a) * normal_sf((tau - B) / s) : 0.0;
    out.rho = gauss + (a * g / kPi) * (1.0 / (tau - B) + 1.0 / (tau + B));
    out.v = (1.0 - a) * s * s + 4.0 * a * g * tau / kPi;
  } else {
    const double c = phi.t;
    out.rho = (B + sqrt_8_over_pi() * (1.0 - a) * s) / c + (8.0 * a * g / (kPi * c)) * std::log(kE + c / g);
    out.v = (1.0 - a) * s * s + 8.0 * a * g * c / (kPi * kE);
  }
  return out;
}

double relative_bias_oracle(const Phi& phi, double g, const ContaminationSpec& noise) {
  if (!(phi.t > 0.0)) fail(Errc::NonPositiveThreshold, "threshold must be positive");
  return mixture_expectation(phi, g, noise, phi_breaks(phi));
}

double variance_oracle(const Phi& phi, double g, const ContaminationSpec& noise) {
  const auto br = phi_breaks(phi);
  const double m1 = mixture_expectation(phi, g, noise, br);
  const double m2 = mixture_expectation([&](double x) { const double y = phi(x); return y * y; }, g, noise, br);
  return std::max(0.0, m2 - m1 * m1);
}

MonteCarloVariance variance_monte_carlo(const Phi& phi, double g, const ContaminationSpec& noise,
                                        std::size_t draws, SeedSpec seed) {
  noise.validate();
  if (draws < 2) fail(Errc::InsufficientSamples, "variance needs at least 2 draws");
  std::vector<double> ys(draws);
  Philox rng(seed);
  double mean = 0.0;
  for (double& y : ys) {
    y = phi(g + noise.draw(rng));
    mean += y;
  }
  mean /= static_cast<double>(draws);
  double m2 = 0.0, m4 = 0.0;
  for (double y : ys) {
    const double d = (y - mean) * (y - mean);
    m2 += d;
    m4 += d * d;
  }
  const double nd = static_cast<double>(draws);
  MonteCarloVariance out;
  out.variance = m2 / (nd - 1.0);
  const double mu2 = m2 / nd;
  out.standard_error = std::sqrt(std::max(0.0, m4 / nd - mu2 * mu2) / nd);
  return out;
}

DerivativeDeficits derivative_deficits(double c, double sigma, double gamma) {
  if (!(c > 0.0)) fail(Errc::NonPositiveThreshold, "c must be positive");
  if (!(sigma >= 0.0 && gamma > 0.0)) fail(Errc::InvalidConstants, "need sigma >= 0 and gamma > 0");
  auto deriv = [c](double x) { return smooth_shrink_derivative(x, c); };
  const std::vector<double> br = {-c, 0.0, c};
  DerivativeDeficits d;
  d.gaussian = 1.0 - gaussian_expectation(deriv, 0.0, sigma, br);
  d.gaussian_bound = sqrt_8_over_pi() * sigma / c;
  d.cauchy = 1.0 - heavy_expectation(deriv, 0.0, HeavySpec::cauchy(gamma), br);
  d.cauchy_bound = (8.0 * gamma / (kPi * c)) * std::log(kE + c / gamma);
  return d;
}

bool log_device_premise(double a, double s, double x) {
  return x > 0.0 && x >= 2.0 * s * a * std::log(kE + 2.0 * s * a);
}

bool log_device_check(double a, double s, double x) {
  return log_device_premise(a, s, x) && a * std::log(kE + x) / x <= 1.0 / s;
}

double post_step_size(const TheoremConstants& tc, double range, std::size_t horizon) {
  tc.validate();
  require(range > 0.0, "clip range must be positive");
  require(horizon >= 1, "horizon must be >= 1");
  return std::sqrt(2.0 * tc.Delta / (tc.L * range * range * tc.d() * static_cast<double>(horizon)));
}

double pre_step_size(const TheoremConstants& tc, std::size_t horizon) {
  tc.validate();
  require(horizon >= 1, "horizon must be >= 1");
  return std::sqrt(2.0 * tc.Delta / (tc.L * tc.r() * static_cast<double>(horizon)));
}

double post_hard_rate_bound(const TheoremConstants& tc, double tau, std::size_t horizon) {
  tc.validate();
  require(horizon >= 1, "horizon must be >= 1");
  return 2.0 * tau * std::sqrt(2.0 * tc.L * tc.Delta * tc.d() / static_cast<double>(horizon));
}

Matrix post_clip_step(const Matrix& x, const Matrix& grad_sample, const ClipSpec& phi, double eta) {
  require_same_shape(x, grad_sample, "post_clip_step");
  if (!(eta >= 0.0)) fail(Errc::InvalidArgument, "eta must be >= 0");
  if (eta == 0.0) return x;
  return x - eta * apply_clip(grad_sample, phi);
}

double update_scale(ScaleMode mode, std::size_t m, std::size_t n) {
  return mode == ScaleMode::Unit ? 1.0 : 0.2 * std::sqrt(static_cast<double>(std::max(m, n)));
}

Matrix pre_clip_step(const Matrix& x, const std::vector<Matrix>& samples, const ClipSpec& phi, double eta,
                     ScaleMode scale_mode, const MsignOptions& msign_options) {
  if (samples.empty()) fail(Errc::InvalidArgument, "pre_clip_step needs at least one sample");
  if (!(eta >= 0.0)) fail(Errc::InvalidArgument, "eta must be >= 0");
  Matrix avg(x.rows(), x.cols());
  for (const Matrix& s : samples) {
    require_same_shape(x, s, "pre_clip_step");
    avg += apply_clip(s, phi);
  }
  if (eta == 0.0) return x;
  avg *= 1.0 / static_cast<double>(samples.size());
  return x - (eta * update_scale(scale_mode, x.rows(), x.cols())) * msign(avg, msign_options);
}

}  // namespace specclip
