#pragma once

#include <optional>
#include <string>

#include "specclip/matrix.hpp"

namespace specclip {

enum class ClipKind { None, HardCoordinate, Global, Spectral, SmoothShrinkage };

const char* to_string(ClipKind kind) noexcept;
ClipKind parse_clip_kind(const std::string& name);

inline constexpr double kQuantileFloor = 1e-12;

/// When `quantile` is set the threshold is recomputed from each input as the
/// q-th quantile of its |entries| (before any beta scaling) and `threshold`
/// is ignored.
struct ClipSpec {
  ClipKind kind = ClipKind::None;
  double threshold = 1.0;
  double beta = 1.0;
  std::optional<double> quantile;

  void validate() const;
  /// Threshold that will be used for input `a`.
  double resolve_threshold(const Matrix& a) const;
};

Matrix hard_clip(const Matrix& a, double tau);
Matrix global_clip(const Matrix& a, double c);
Matrix spectral_clip(const Matrix& a, double c);
Matrix smooth_shrinkage(const Matrix& a, double c, double beta = 1.0);

/// Type-7 (linear interpolation) quantile of |entries|, floored at 1e-12.
double quantile_threshold(const Matrix& a, double q);

Matrix apply_clip(const Matrix& a, const ClipSpec& spec);

// Scalar forms used by the lemma oracles.
double hard_clip_scalar(double x, double tau);
double smooth_shrink_scalar(double x, double c);
double smooth_shrink_derivative(double x, double c);

}  // namespace specclip
