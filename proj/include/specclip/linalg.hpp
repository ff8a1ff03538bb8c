#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "specclip/matrix.hpp"

namespace specclip {

inline constexpr std::size_t kDefaultSvdMaxDim = 512;

/// Thin SVD: for an m x n input with r = min(m, n), U is m x r, V is n x r
/// and singular_values has r non-increasing entries. Singular vectors follow
/// the sign convention "first nonzero entry of each u_i is positive".
struct SvdResult {
  Vector singular_values;
  Matrix U;
  Matrix V;

  Vector left(std::size_t i) const { return U.column(i); }
  Vector right(std::size_t i) const { return V.column(i); }
};

struct SpectralGapInfo {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double gap = 0.0;
  bool degenerate = false;
};

struct SingularTriplet {
  double sigma = 0.0;
  Vector u;
  Vector v;
  bool converged = false;
  int iterations = 0;
};

double frobenius_norm(const Matrix& a);
double entry_max_norm(const Matrix& a);

/// One-sided Jacobi. Throws DimensionTooLarge when min(rows, cols) > max_dim.
SvdResult full_svd(const Matrix& a, std::size_t max_dim = kDefaultSvdMaxDim);
Vector singular_values(const Matrix& a, std::size_t max_dim = kDefaultSvdMaxDim);
double operator_norm(const Matrix& a);
double nuclear_norm(const Matrix& a);

/// Alternating power iteration from the normalized all-ones vector, with one
/// seeded random restart if the start is annihilated. When max_iter runs out
/// the best iterate comes back with converged == false.
SingularTriplet top_singular_triplet(const Matrix& a, double tol = 1e-10, int max_iter = 20000);

/// Throws DegenerateSpectrum only if `require_gap` is set; otherwise the flag
/// reports gap < gap_tol * sigma1.
SpectralGapInfo spectral_gap(const Matrix& a, double gap_tol = 1e-8,
                             std::size_t max_dim = kDefaultSvdMaxDim);

enum class MsignMethod { ExactSvd, NewtonSchulz };
enum class NsSchedule { Minimax, Muon };

struct MsignOptions {
  MsignMethod method = MsignMethod::ExactSvd;
  int ns_iters = 5;
  NsSchedule schedule = NsSchedule::Minimax;
  double rank_tol = 1e-12;
  double ns_tol = 0.01;
  /// Newton-Schulz only: confirm the output spectrum and raise NoConvergence
  /// when a non-null singular value lands outside [1 - ns_tol, 1 + ns_tol].
  bool ns_check = true;
};

/// Quintic coefficients (a, b, c) for iteration k of the chosen schedule.
std::array<double, 3> ns_coefficients(NsSchedule schedule, int k);

/// U V^T of a. ExactSvd takes square, well-conditioned inputs through a scaled
/// Newton polar iteration and everything else through the Jacobi SVD.
Matrix msign(const Matrix& a, const MsignOptions& options = {});


/// Largest principal angle (radians) between the spans of the top-k left
/// singular vectors of a and b.
double principal_angle(const Matrix& a, const Matrix& b, std::size_t k);

}  // namespace specclip
