#include "specclip/clip.hpp"

#include <algorithm>
#include <cmath>

#include "specclip/error.hpp"
#include "specclip/kernels.hpp"
#include "specclip/linalg.hpp"

namespace specclip {

namespace {

void require_positive(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    fail(Errc::NonPositiveThreshold, std::string(what) + " must be positive and finite");
  }
}

}  // namespace

const char* to_string(ClipKind kind) noexcept {
  switch (kind) {
    case ClipKind::None: return "none";
    case ClipKind::HardCoordinate: return "hard";
    case ClipKind::Global: return "global";
    case ClipKind::Spectral: return "spectral";
    case ClipKind::SmoothShrinkage: return "smooth";
  }
  return "none";
}

ClipKind parse_clip_kind(const std::string& name) {
  if (name == "none") return ClipKind::None;
  if (name == "hard" || name == "hard_coordinate") return ClipKind::HardCoordinate;
  if (name == "global") return ClipKind::Global;
  if (name == "spectral") return ClipKind::Spectral;
  if (name == "smooth" || name == "smooth_shrinkage") return ClipKind::SmoothShrinkage;
  fail(Errc::InvalidArgument, "unknown clip kind '" + name + "'");
}

void ClipSpec::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) fail(Errc::InvalidArgument, "beta must lie in (0, 1]");
  if (quantile) {
    if (!(*quantile > 0.0 && *quantile < 1.0)) fail(Errc::InvalidArgument, "quantile must lie in (0, 1)");
  } else if (kind != ClipKind::None) {
    require_positive(threshold, "threshold");
  }
}

double ClipSpec::resolve_threshold(const Matrix& a) const {
  return quantile ? quantile_threshold(a, *quantile) : threshold;
}

Matrix hard_clip(const Matrix& a, double tau) {
  require_positive(tau, "tau");
  Matrix out = a;
  kernels::hard_clip(a.values().data(), out.values().data(), a.size(), tau);
  return out;
}

Matrix global_clip(const Matrix& a, double c) {
  require_positive(c, "c");
  const double nrm = frobenius_norm(a);
  if (nrm <= c) return a;
  return a * (c / nrm);
}

Matrix spectral_clip(const Matrix& a, double c) {
  require_positive(c, "c");
  const SvdResult s = full_svd(a);
  if (s.singular_values[0] <= c) return a;
  Matrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
    const double sk = std::min(s.singular_values[k], c);
    if (sk == 0.0) break;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double w = sk * s.U(i, k);
      for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += w * s.V(j, k);
    }
  }
  return out;
}

Matrix smooth_shrinkage(const Matrix& a, double c, double beta) {
  require_positive(c, "c");
  if (!(beta > 0.0 && beta <= 1.0)) fail(Errc::InvalidArgument, "beta must lie in (0, 1]");
  Matrix out = a;
  kernels::smooth_shrink(a.values().data(), out.values().data(), a.size(), c, beta);
  return out;
}

double quantile_threshold(const Matrix& a, double q) {
  if (a.empty()) fail(Errc::EmptyMatrix, "quantile of empty matrix");
  if (!(q > 0.0 && q < 1.0)) fail(Errc::InvalidArgument, "quantile must lie in (0, 1)");
  std::vector<double> mags(a.size());
  std::transform(a.values().begin(), a.values().end(), mags.begin(),
                 [](double x) { return std::abs(x); });
  const double h = q * static_cast<double>(mags.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(lo), mags.end());
  const double xlo = mags[lo];
  double value = xlo;
  if (lo + 1 < mags.size()) {
    const double xhi = *std::min_element(mags.begin() + static_cast<std::ptrdiff_t>(lo) + 1, mags.end());
    value = xlo + (h - static_cast<double>(lo)) * (xhi - xlo);
  }
  return std::max(value, kQuantileFloor);
}

Matrix apply_clip(const Matrix& a, const ClipSpec& spec) {
  spec.validate();
  if (spec.kind == ClipKind::None) return a;
  const double t = spec.resolve_threshold(a);
  switch (spec.kind) {
    case ClipKind::HardCoordinate: return hard_clip(a, t);
    case ClipKind::Global: return global_clip(a, t);
    case ClipKind::Spectral: return spectral_clip(a, t);
    case ClipKind::SmoothShrinkage: return smooth_shrinkage(a, t, spec.beta);
    case ClipKind::None: break;
  }
  return a;
}

double hard_clip_scalar(double x, double tau) { return std::clamp(x, -tau, tau); }

double smooth_shrink_scalar(double x, double c) { return x * std::exp(-std::abs(x) / c); }

double smooth_shrink_derivative(double x, double c) {
  const double t = std::abs(x) / c;
  return std::exp(-t) * (1.0 - t);
}

}  // namespace specclip
