#pragma once

#include <cstddef>
#include <string>

#include "specclip/matrix.hpp"
#include "specclip/rng.hpp"

namespace specclip {

enum class HeavyKind { Cauchy, StudentT };

struct HeavySpec {
  HeavyKind kind = HeavyKind::Cauchy;
  /// Cauchy scale gamma.
  double gamma = 1.0;
  /// Student-t degrees of freedom and the multiplier applied to the standard variate.
  double nu = 1.0;
  double scale = 1.0;

  static HeavySpec cauchy(double gamma);
  static HeavySpec student_t(double nu, double scale = 1.0);

  double draw(Philox& rng) const;
  /// Density of the heavy component at x.
  double density(double x) const;
  /// Score/curvature constant of the heavy density: 2 for Cauchy, nu + 1 for t.
  double collapse_constant() const;
  /// Effective Cauchy-like scale: gamma, or the t scale when nu == 1.
  double effective_gamma() const;
};

struct ContaminationSpec {
  double alpha = 0.0;
  double sigma = 1.0;
  HeavySpec heavy;

  void validate() const;
  double draw(Philox& rng) const;
};

struct SubspaceSpec {
  double lambda = 1.0;
  std::size_t rank = 1;
  /// Orthonormalize the sampled directions instead of using raw sphere draws.
  bool orthonormalize = false;
};

Matrix sample_contamination(std::size_t m, std::size_t n, const ContaminationSpec& spec, SeedSpec seed);
Matrix sample_gaussian(std::size_t m, std::size_t n, double sigma, SeedSpec seed);
Matrix sample_subspace(std::size_t m, std::size_t n, const SubspaceSpec& spec, SeedSpec seed);
Vector sample_scalar_noise(const ContaminationSpec& spec, std::size_t count, SeedSpec seed);

/// Uniform draw from the unit sphere in R^dim.
Vector sample_unit_sphere(std::size_t dim, Philox& rng);

std::string describe(const HeavySpec& heavy);

}  // namespace specclip
