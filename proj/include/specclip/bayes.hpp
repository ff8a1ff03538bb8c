#pragma once

#include <vector>

#include "specclip/noise.hpp"

namespace specclip {

/// Scalar channel y = x + e with x ~ N(0, sigma_x^2) and e drawn from the
/// contamination mixture.
struct ChannelSpec {
  double sigma_x = 1.0;
  ContaminationSpec noise;

  void validate() const;
  /// Linear MMSE gain of the Gaussian branch.
  double beta() const;
};

struct PosteriorDecomposition {
  double y = 0.0;
  double posterior_mean = 0.0;
  double retention_pi = 1.0;
  /// pi(y) * beta * y
  double gaussian_branch = 0.0;
  /// E[x | y, heavy branch]
  double heavy_mean = 0.0;
  /// posterior_mean - gaussian_branch
  double residual_rho = 0.0;
  /// Gap between the direct mixture integral and the branch decomposition.
  double consistency_error = 0.0;
};

struct CollapseRow {
  double y = 0.0;
  double heavy_mean = 0.0;
  double bound = 0.0;
  bool violated = false;
};

struct SurrogateRow {
  double y = 0.0;
  double pi = 1.0;
  double bayes = 0.0;
  double surrogate = 0.0;
  double abs_err = 0.0;
};

struct SurrogateProfile {
  std::vector<SurrogateRow> rows;
  double max_err = 0.0;
  /// tau minimizing the max grid error, from golden-section search in log tau.
  double best_tau = 0.0;
  double best_max_err = 0.0;
};

inline constexpr double kBayesAbsTol = 1e-10;

/// Marginal density of y under the heavy branch, by quadrature.
double heavy_marginal_density(double y, const ChannelSpec& spec);
/// Marginal density of y under the Gaussian branch, closed form.
double gaussian_marginal_density(double y, const ChannelSpec& spec);
/// E[x | y, heavy branch] by quadrature.
double heavy_branch_mean(double y, const ChannelSpec& spec);

/// Posterior probability that the noise on y came from the Gaussian branch.
/// Exactly 1 for alpha == 0 and 0 for alpha == 1.
double retention_probability(double y, const ChannelSpec& spec);

PosteriorDecomposition posterior_mean_oracle(double y, const ChannelSpec& spec);

/// Heavy-branch mean against 3 C1 sigma_x^2 / |y|; violations beyond tol are flagged.
std::vector<CollapseRow> posterior_collapse_check(const ChannelSpec& spec, const std::vector<double>& y_grid,
                                                  double tol = 1e-8);

SurrogateProfile surrogate_error_profile(const ChannelSpec& spec, double tau,
                                         const std::vector<double>& y_grid, double tau_lo = 1e-2,
                                         double tau_hi = 1e4);

/// Smallest grid point from which |E[x|y] - pi(y) beta y| <= eps holds for
/// every larger grid point; NaN when no such point exists.
double factorization_threshold(const ChannelSpec& spec, std::vector<double> y_grid, double eps);

std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

}  // namespace specclip
