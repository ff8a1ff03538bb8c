#include "specclip/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specclip/error.hpp"
#include "specclip/quadrature.hpp"

namespace specclip {

namespace {

constexpr double kRelTol = 1e-10;
// Prior mass beyond 12 standard deviations is below 1e-32.
constexpr double kPriorSpan = 12.0;

double normal_pdf(double x, double sd) {
  const double z = x / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double log_normal_pdf(double x, double sd) {
  const double z = x / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double heavy_width(const HeavySpec& h) { return h.kind == HeavyKind::Cauchy ? h.gamma : h.scale; }

std::vector<double> breakpoints(double y, const ChannelSpec& spec) {
  const double w = heavy_width(spec.noise.heavy);
  return {0.0, spec.beta() * y, y, y - w, y + w, -spec.sigma_x, spec.sigma_x};
}

// Integral of x^power * prior(x) * weight(y - x) over the prior's support.
template <typename W>
double prior_moment(double y, const ChannelSpec& spec, int power, W&& weight) {
  const double span = kPriorSpan * spec.sigma_x;
  auto f = [&](double x) {
    const double base = normal_pdf(x, spec.sigma_x) * weight(y - x);
    return power == 0 ? base : x * base;
  };
  return quad::integrate_split(f, -span, span, breakpoints(y, spec), 1e-300, kRelTol).value;
}

}  // namespace

void ChannelSpec::validate() const {
  if (!(sigma_x > 0.0) || !std::isfinite(sigma_x)) fail(Errc::InvalidSpec, "sigma_x must be > 0");
  noise.validate();
  if (noise.alpha < 1.0 && !(noise.sigma > 0.0)) {
    fail(Errc::InvalidSpec, "the Gaussian branch needs sigma > 0");
  }
}

double ChannelSpec::beta() const {
  const double sx2 = sigma_x * sigma_x;
  return sx2 / (sx2 + noise.sigma * noise.sigma);
}

double heavy_marginal_density(double y, const ChannelSpec& spec) {
  spec.validate();
  return prior_moment(y, spec, 0, [&](double e) { return spec.noise.heavy.density(e); });
}

double gaussian_marginal_density(double y, const ChannelSpec& spec) {
  spec.validate();
  return normal_pdf(y, std::hypot(spec.sigma_x, spec.noise.sigma));
}

double heavy_branch_mean(double y, const ChannelSpec& spec) {
  spec.validate();
  if (y == 0.0) return 0.0;
  auto h = [&](double e) { return spec.noise.heavy.density(e); };
  const double den = prior_moment(y, spec, 0, h);
  if (!(den > 0.0)) fail(Errc::QuadratureFailure, "heavy marginal density underflowed");
  return prior_moment(y, spec, 1, h) / den;
}

double retention_probability(double y, const ChannelSpec& spec) {
  spec.validate();
  const double alpha = spec.noise.alpha;
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return 0.0;
  const double fh = heavy_marginal_density(y, spec);
  const double log_fn = log_normal_pdf(y, std::hypot(spec.sigma_x, spec.noise.sigma));
  const double z = std::log(alpha / (1.0 - alpha)) + std::log(fh) - log_fn;
  return z > 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

PosteriorDecomposition posterior_mean_oracle(double y, const ChannelSpec& spec) {
  spec.validate();
  const double alpha = spec.noise.alpha;
  const double beta = spec.beta();
  PosteriorDecomposition d;
  d.y = y;
  d.retention_pi = retention_probability(y, spec);
  d.gaussian_branch = d.retention_pi * beta * y;
  d.heavy_mean = alpha > 0.0 ? heavy_branch_mean(y, spec) : 0.0;
  const double via_branches = d.gaussian_branch + (1.0 - d.retention_pi) * d.heavy_mean;

  if (y == 0.0) {
    d.posterior_mean = 0.0;
  } else if (alpha == 0.0) {
    d.posterior_mean = beta * y;
  } else {
    auto mixture = [&](double e) {
      const double g = alpha < 1.0 ? (1.0 - alpha) * normal_pdf(e, spec.noise.sigma) : 0.0;
      return g + alpha * spec.noise.heavy.density(e);
    };
    const double den = prior_moment(y, spec, 0, mixture);
    if (!(den > 0.0)) fail(Errc::QuadratureFailure, "marginal density underflowed");
    d.posterior_mean = prior_moment(y, spec, 1, mixture) / den;
  }
  d.residual_rho = d.posterior_mean - d.gaussian_branch;
  d.consistency_error = std::abs(d.posterior_mean - via_branches);
  return d;
}

std::vector<CollapseRow> posterior_collapse_check(const ChannelSpec& spec, const std::vector<double>& y_grid,
                                                  double tol) {
  spec.validate();
  const double c1 = spec.noise.heavy.collapse_constant();
  const double sx2 = spec.sigma_x * spec.sigma_x;
  std::vector<CollapseRow> rows;
  rows.reserve(y_grid.size());
  for (double y : y_grid) {
    CollapseRow r;
    r.y = y;
    r.heavy_mean = heavy_branch_mean(y, spec);
    r.bound = y == 0.0 ? INFINITY : 3.0 * c1 * sx2 / std::abs(y);
    r.violated = std::abs(r.heavy_mean) > r.bound + tol;
    rows.push_back(r);
  }
  return rows;
}

SurrogateProfile surrogate_error_profile(const ChannelSpec& spec, double tau,
                                         const std::vector<double>& y_grid, double tau_lo,
                                         double tau_hi) {
  spec.validate();
  if (!(tau > 0.0)) fail(Errc::NonPositiveThreshold, "tau must be positive");
  if (!(tau_lo > 0.0 && tau_hi > tau_lo)) fail(Errc::InvalidArgument, "bad tau search range");
  const double beta = spec.beta();
  std::vector<double> bayes(y_grid.size()), pis(y_grid.size());
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    const auto d = posterior_mean_oracle(y_grid[i], spec);
    bayes[i] = d.posterior_mean;
    pis[i] = d.retention_pi;
  }
  auto surrogate = [&](double y, double t) { return beta * std::exp(-std::abs(y) / t) * y; };
  auto max_err = [&](double t) {
    double m = 0.0;
    for (std::size_t i = 0; i < y_grid.size(); ++i)
      m = std::max(m, std::abs(bayes[i] - surrogate(y_grid[i], t)));
    return m;
  };

  SurrogateProfile p;
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    const double s = surrogate(y_grid[i], tau);
    p.rows.push_back({y_grid[i], pis[i], bayes[i], s, std::abs(bayes[i] - s)});
    p.max_err = std::max(p.max_err, p.rows.back().abs_err);
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(tau_lo), b = std::log(tau_hi);
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = max_err(std::exp(c)), fd = max_err(std::exp(d));
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = max_err(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = max_err(std::exp(d));
    }
  }
  p.best_tau = std::exp(0.5 * (a + b));
  p.best_max_err = max_err(p.best_tau);
  return p;
}

double factorization_threshold(const ChannelSpec& spec, std::vector<double> y_grid, double eps) {
  std::sort(y_grid.begin(), y_grid.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  double threshold = NAN;
  for (auto it = y_grid.rbegin(); it != y_grid.rend(); ++it) {
    if (std::abs(posterior_mean_oracle(*it, spec).residual_rho) > eps) break;
    threshold = std::abs(*it);
  }
  return threshold;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count < 2) fail(Errc::InvalidArgument, "log_grid needs 0 < lo <= hi, count >= 2");
  std::vector<double> g(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi >= lo)) fail(Errc::InvalidArgument, "linear_grid needs lo <= hi, count >= 2");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

}  // namespace specclip
