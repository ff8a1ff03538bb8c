#include "specclip/noise.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "specclip/error.hpp"

namespace specclip {

HeavySpec HeavySpec::cauchy(double gamma) {
  HeavySpec h;
  h.kind = HeavyKind::Cauchy;
  h.gamma = gamma;
  return h;
}

HeavySpec HeavySpec::student_t(double nu, double scale) {
  HeavySpec h;
  h.kind = HeavyKind::StudentT;
  h.nu = nu;
  h.scale = scale;
  return h;
}

double HeavySpec::draw(Philox& rng) const {
  if (kind == HeavyKind::Cauchy) return rng.cauchy(gamma);
  return scale * rng.student_t(nu);
}

double HeavySpec::density(double x) const {
  if (kind == HeavyKind::Cauchy) return gamma / (std::numbers::pi * (gamma * gamma + x * x));
  const double t = x / scale;
  const double lognorm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(nu * std::numbers::pi);
  return std::exp(lognorm - 0.5 * (nu + 1.0) * std::log1p(t * t / nu)) / scale;
}

double HeavySpec::collapse_constant() const {
  return kind == HeavyKind::Cauchy ? 2.0 : nu + 1.0;
}

double HeavySpec::effective_gamma() const {
  if (kind == HeavyKind::Cauchy) return gamma;
  if (nu == 1.0) return scale;
  fail(Errc::InvalidSpec, "theorem constants need a Cauchy heavy component");
}

void ContaminationSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(Errc::InvalidSpec, "alpha must lie in [0, 1]");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail(Errc::InvalidSpec, "sigma must be >= 0");
  if (heavy.kind == HeavyKind::Cauchy) {
    if (!(heavy.gamma > 0.0) || !std::isfinite(heavy.gamma)) fail(Errc::InvalidSpec, "gamma must be > 0");
  } else {
    if (!(heavy.nu > 0.0) || !std::isfinite(heavy.nu)) fail(Errc::InvalidSpec, "nu must be > 0");
    if (!(heavy.scale > 0.0) || !std::isfinite(heavy.scale)) fail(Errc::InvalidSpec, "scale must be > 0");
  }
}

double ContaminationSpec::draw(Philox& rng) const {
  // One uniform for the branch, then the branch draw; keeps the stream layout fixed.
  const double u = rng.uniform();
  if (u < alpha) return heavy.draw(rng);
  return sigma * rng.normal();
}

Matrix sample_contamination(std::size_t m, std::size_t n, const ContaminationSpec& spec, SeedSpec seed) {
  spec.validate();
  Matrix out(m, n);
  Philox rng(seed);
  for (double& x : out.values()) x = spec.draw(rng);
  return out;
}

Matrix sample_gaussian(std::size_t m, std::size_t n, double sigma, SeedSpec seed) {
  Matrix out(m, n);
  Philox rng(seed);
  for (double& x : out.values()) x = sigma * rng.normal();
  return out;
}

Vector sample_unit_sphere(std::size_t dim, Philox& rng) {
  Vector v(dim);
  do {
    for (double& x : v) x = rng.normal();
  } while (normalize(v) == 0.0);
  return v;
}

Matrix sample_subspace(std::size_t m, std::size_t n, const SubspaceSpec& spec, SeedSpec seed) {
  if (spec.rank == 0) fail(Errc::InvalidSpec, "subspace rank must be >= 1");
  if (spec.rank > std::min(m, n)) fail(Errc::RankTooLarge, "subspace rank exceeds min(m, n)");
  if (!(spec.lambda > 0.0)) fail(Errc::InvalidSpec, "lambda must be > 0");
  Philox rng(seed);
  std::vector<Vector> us, vs;
  for (std::size_t r = 0; r < spec.rank; ++r) {
    us.push_back(sample_unit_sphere(m, rng));
    vs.push_back(sample_unit_sphere(n, rng));
  }
  if (spec.orthonormalize) {
    for (auto* basis : {&us, &vs}) {
      for (std::size_t r = 0; r < basis->size(); ++r) {
        for (int pass = 0; pass < 2; ++pass)
          for (std::size_t s = 0; s < r; ++s) {
            const double p = dot((*basis)[s], (*basis)[r]);
            for (std::size_t i = 0; i < (*basis)[r].size(); ++i) (*basis)[r][i] -= p * (*basis)[s][i];
          }
        normalize((*basis)[r]);
      }
    }
  }
  Matrix out(m, n);
  for (std::size_t r = 0; r < spec.rank; ++r)
    for (std::size_t i = 0; i < m; ++i) {
      const double w = spec.lambda * us[r][i];
      for (std::size_t j = 0; j < n; ++j) out(i, j) += w * vs[r][j];
    }
  return out;
}

Vector sample_scalar_noise(const ContaminationSpec& spec, std::size_t count, SeedSpec seed) {
  spec.validate();
  Vector out(count);
  Philox rng(seed);
  for (double& x : out) x = spec.draw(rng);
  return out;
}

std::string describe(const HeavySpec& heavy) {
  std::ostringstream os;
  if (heavy.kind == HeavyKind::Cauchy) os << "cauchy(gamma=" << heavy.gamma << ")";
  else os << "student_t(nu=" << heavy.nu << ",scale=" << heavy.scale << ")";
  return os.str();
}

}  // namespace specclip
