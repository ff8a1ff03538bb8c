#include "specclip/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "specclip/error.hpp"
#include "specclip/kernels.hpp"
#include "specclip/rng.hpp"

namespace specclip {

namespace {

constexpr int kMaxSweeps = 80;

// Greedy minimax quintic schedule for inputs whose singular values, after
// Frobenius scaling, lie in [5e-3, 1]. Produced by
// tools/calibration/ns_schedule.py; five steps land in [0.99964, 1.00036].
constexpr std::array<std::array<double, 3>, 5> kMinimaxSchedule = {{
    {8.2987046767799537, -24.430501055578077, 18.090305909226853},
    {3.9152211524399694, -2.9211307259378709, 0.5592233767496233},
    {3.1746035913204622, -2.3804328986481722, 0.497826425535071},
    {2.1894627841637937, -1.5672205508815957, 0.4078871195747778},
    {1.8822789342037016, -1.2580638665159993, 0.37580706084729121},
}};
constexpr std::array<double, 3> kMuon = {3.4445, -4.7750, 2.0315};
constexpr std::array<double, 3> kClassical = {15.0 / 8.0, -10.0 / 8.0, 3.0 / 8.0};

// Four independent partial sums so the loop is not one long dependency chain.
double split_dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += x[i] * y[i];
    acc[1] += x[i + 1] * y[i + 1];
    acc[2] += x[i + 2] * y[i + 2];
    acc[3] += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) acc[0] += x[i] * y[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

// Jacobi on the rows of w (each row is one column of the tall input); vt
// accumulates the right rotations the same way.
void jacobi_rows(std::vector<double>& w, std::size_t ncol, std::size_t len,
                 std::vector<double>& vt) {
  const double eps = 1e-15;
  std::vector<double> sq(ncol);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    // Squared column norms are refreshed once per sweep and updated in
    // closed form after each rotation.
    for (std::size_t p = 0; p < ncol; ++p) sq[p] = kernels::serial::sum_squares(&w[p * len], len);
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < ncol; ++p) {
      // de Rijk ordering: pivot the largest remaining column into place.
      const std::size_t piv = static_cast<std::size_t>(
          std::max_element(sq.begin() + static_cast<std::ptrdiff_t>(p), sq.end()) - sq.begin());
      if (piv != p) {
        std::swap_ranges(w.begin() + static_cast<std::ptrdiff_t>(p * len),
                         w.begin() + static_cast<std::ptrdiff_t>((p + 1) * len),
                         w.begin() + static_cast<std::ptrdiff_t>(piv * len));
        std::swap_ranges(vt.begin() + static_cast<std::ptrdiff_t>(p * ncol),
                         vt.begin() + static_cast<std::ptrdiff_t>((p + 1) * ncol),
                         vt.begin() + static_cast<std::ptrdiff_t>(piv * ncol));
        std::swap(sq[p], sq[piv]);
      }
      double* wp = &w[p * len];
      for (std::size_t q = p + 1; q < ncol; ++q) {
        double* wq = &w[q * len];
        const double alpha = sq[p];
        const double beta = sq[q];
        const double gamma = split_dot(wp, wq, len);
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t i = 0; i < len; ++i) {
          const double x = wp[i];
          const double y = wq[i];
          wp[i] = c * x - s * y;
          wq[i] = s * x + c * y;
        }
        sq[p] = std::max(0.0, alpha - t * gamma);
        sq[q] = beta + t * gamma;
        double* vp = &vt[p * ncol];
        double* vq = &vt[q * ncol];
        for (std::size_t i = 0; i < ncol; ++i) {
          const double x = vp[i];
          const double y = vq[i];
          vp[i] = c * x - s * y;
          vq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) return;
  }
  fail(Errc::NoConvergence, "Jacobi SVD did not converge");
}

// Completes the unit rows of `basis` flagged missing with vectors orthogonal
// to every other row (Gram-Schmidt against the standard basis).
void complete_basis(std::vector<Vector>& basis, const std::vector<bool>& missing, std::size_t dim) {
  std::size_t probe = 0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (!missing[k]) continue;
    while (probe < dim) {
      Vector e(dim, 0.0);
      e[probe++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
          if (j == k || (missing[j] && j > k)) continue;
          const double proj = dot(basis[j], e);
          for (std::size_t i = 0; i < dim; ++i) e[i] -= proj * basis[j][i];
        }
      }
      if (normalize(e) > 1e-8) {
        basis[k] = std::move(e);
        break;
      }
    }
  }
}

SvdResult svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<double> w(n * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) w[j * m + i] = a(i, j);
  std::vector<double> vt(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) vt[j * n + j] = 1.0;

  jacobi_rows(w, n, m, vt);

  Vector sig(n);
  for (std::size_t j = 0; j < n; ++j)
    sig[j] = std::sqrt(kernels::serial::sum_squares(&w[j * m], m));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  const double smax = n ? sig[order[0]] : 0.0;
  // Columns this small carry no direction; their u is rebuilt by completion.
  const double null_cut = smax * 1e-14;
  std::vector<Vector> us(n), vs(n);
  std::vector<bool> missing(n, false);
  Vector sorted(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    sorted[k] = sig[j];
    vs[k].assign(vt.begin() + static_cast<std::ptrdiff_t>(j * n),
                 vt.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
    if (sig[j] > null_cut && sig[j] > 0.0) {
      us[k].assign(w.begin() + static_cast<std::ptrdiff_t>(j * m),
                   w.begin() + static_cast<std::ptrdiff_t>((j + 1) * m));
      for (double& x : us[k]) x /= sig[j];
    } else {
      us[k].assign(m, 0.0);
      missing[k] = true;
    }
  }
  complete_basis(us, missing, m);

  SvdResult out{std::move(sorted), Matrix(m, n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    auto first = std::find_if(us[k].begin(), us[k].end(), [](double x) { return x != 0.0; });
    const double sgn = (first != us[k].end() && *first < 0.0) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m; ++i) out.U(i, k) = sgn * us[k][i];
    for (std::size_t i = 0; i < n; ++i) out.V(i, k) = sgn * vs[k][i];
  }
  return out;
}

void enforce_u_sign(SvdResult& s) {
  for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
    double first = 0.0;
    for (std::size_t i = 0; i < s.U.rows(); ++i) {
      if (s.U(i, k) != 0.0) {
        first = s.U(i, k);
        break;
      }
    }
    if (first < 0.0) {
      for (std::size_t i = 0; i < s.U.rows(); ++i) s.U(i, k) = -s.U(i, k);
      for (std::size_t i = 0; i < s.V.rows(); ++i) s.V(i, k) = -s.V(i, k);
    }
  }
}

void require_nonempty(const Matrix& a, const char* where) {
  if (a.empty()) fail(Errc::EmptyMatrix, where);
}

}  // namespace

double frobenius_norm(const Matrix& a) {
  return std::sqrt(kernels::sum_squares(a.values().data(), a.size()));
}

double entry_max_norm(const Matrix& a) { return kernels::max_abs(a.values().data(), a.size()); }

SvdResult full_svd(const Matrix& a, std::size_t max_dim) {
  require_nonempty(a, "full_svd");
  if (a.min_dim() > max_dim) {
    fail(Errc::DimensionTooLarge, "min dimension " + std::to_string(a.min_dim()) +
                                      " exceeds svd_max_dim " + std::to_string(max_dim));
  }
  if (!a.all_finite()) fail(Errc::NonFinite, "full_svd input");
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdResult t = svd_tall(a.transpose());
  SvdResult out{std::move(t.singular_values), std::move(t.V), std::move(t.U)};
  enforce_u_sign(out);
  return out;
}

Vector singular_values(const Matrix& a, std::size_t max_dim) {
  return full_svd(a, max_dim).singular_values;
}

double operator_norm(const Matrix& a) { return singular_values(a).front(); }

double nuclear_norm(const Matrix& a) {
  const Vector s = singular_values(a);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

SingularTriplet top_singular_triplet(const Matrix& a, double tol, int max_iter) {
  require_nonempty(a, "top_singular_triplet");
  if (!(tol > 0.0)) fail(Errc::InvalidArgument, "tol must be positive");
  if (frobenius_norm(a) == 0.0) fail(Errc::ZeroMatrix, "top_singular_triplet of zero matrix");

  Vector v(a.cols(), 1.0);
  normalize(v);
  bool restarted = false;
  SingularTriplet best;
  double best_res = INFINITY;
  for (int it = 1; it <= max_iter; ++it) {
    Vector u = matvec(a, v);
    if (normalize(u) == 0.0) {
      if (restarted) break;
      restarted = true;
      Philox rng(SeedSpec{0x5eedull, a.rows() * 1315423911ull + a.cols()});
      for (double& x : v) x = rng.normal();
      normalize(v);
      continue;
    }
    Vector w = matvec_t(a, u);
    const double sigma = normalize(w);
    // Residuals of the pair (u, w) as a singular triplet.
    Vector av = matvec(a, w);
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) r1 += (av[i] - sigma * u[i]) * (av[i] - sigma * u[i]);
    Vector atu = matvec_t(a, u);
    for (std::size_t j = 0; j < w.size(); ++j)
      r2 += (atu[j] - sigma * w[j]) * (atu[j] - sigma * w[j]);
    const double res = std::max(std::sqrt(r1), std::sqrt(r2));
    if (res < best_res) {
      best_res = res;
      best = SingularTriplet{sigma, u, w, false, it};
    }
    if (res <= tol * sigma) {
      best.converged = true;
      break;
    }
    v = std::move(w);
  }
  auto first = std::find_if(best.u.begin(), best.u.end(), [](double x) { return x != 0.0; });
  if (first != best.u.end() && *first < 0.0) {
    for (double& x : best.u) x = -x;
    for (double& x : best.v) x = -x;
  }
  return best;
}

SpectralGapInfo spectral_gap(const Matrix& a, double gap_tol, std::size_t max_dim) {
  if (a.min_dim() < 2) fail(Errc::InvalidArgument, "spectral_gap needs min dimension >= 2");
  SpectralGapInfo info;
  if (a.min_dim() <= max_dim) {
    const Vector s = singular_values(a, max_dim);
    info.sigma1 = s[0];
    info.sigma2 = s[1];
  } else {
    const SingularTriplet t1 = top_singular_triplet(a);
    const Matrix deflated = a - t1.sigma * outer(t1.u, t1.v);
    info.sigma1 = t1.sigma;
    info.sigma2 = top_singular_triplet(deflated).sigma;
  }
  info.gap = std::max(0.0, info.sigma1 - info.sigma2);
  info.degenerate = info.gap < gap_tol * info.sigma1;
  return info;
}

std::array<double, 3> ns_coefficients(NsSchedule schedule, int k) {
  if (schedule == NsSchedule::Muon) return kMuon;
  if (k >= 0 && k < static_cast<int>(kMinimaxSchedule.size())) {
    return kMinimaxSchedule[static_cast<std::size_t>(k)];
  }
  return kClassical;
}

namespace {

constexpr int kPolarMaxIters = 30;
constexpr double kPolarPivotTol = 1e-10;

// Transposed inverse of the n x n row-major x by Gauss-Jordan with partial
// pivoting. False when a pivot falls below kPolarPivotTol * max |x_ij|.
bool inverse_transpose(const std::vector<double>& x, std::vector<double>& out, std::size_t n) {
  std::vector<double> a(x);
  std::vector<double> b(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i * n + i] = 1.0;
  const double floor = kPolarPivotTol * kernels::serial::max_abs(x.data(), x.size());
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (!(std::abs(a[piv * n + c]) > floor)) return false;
    if (piv != c) {
      std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(c * n), a.begin() + static_cast<std::ptrdiff_t>((c + 1) * n),
                       a.begin() + static_cast<std::ptrdiff_t>(piv * n));
      std::swap_ranges(b.begin() + static_cast<std::ptrdiff_t>(c * n), b.begin() + static_cast<std::ptrdiff_t>((c + 1) * n),
                       b.begin() + static_cast<std::ptrdiff_t>(piv * n));
    }
    const double d = 1.0 / a[c * n + c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c * n + j] *= d;
      b[c * n + j] *= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      const double f = a[r * n + c];
      if (r == c || f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[c * n + j];
        b[r * n + j] -= f * b[c * n + j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = b[j * n + i];
  return true;
}

// Scaled Newton iteration X <- (z X + X^{-T} / z) / 2 for the orthogonal polar
// factor of a square matrix, which equals U V^T. Empty when the input is too
// close to singular or the iteration stalls.
std::optional<Matrix> polar_newton(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<double> x(a.values().begin(), a.values().end());
  std::vector<double> y(n * n);
  const double stop = 1e-14 * std::sqrt(static_cast<double>(n));
  for (int it = 0; it < kPolarMaxIters; ++it) {
    if (!inverse_transpose(x, y, n)) return std::nullopt;
    const double z = std::sqrt(std::sqrt(kernels::serial::sum_squares(y.data(), y.size()) /
                                         kernels::serial::sum_squares(x.data(), x.size())));
    double step = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = 0.5 * (z * x[i] + y[i] / z);
      step += (v - x[i]) * (v - x[i]);
      x[i] = v;
    }
    if (std::sqrt(step) <= stop) {
      Matrix out(n, n);
      std::copy(x.begin(), x.end(), out.values().begin());
      return out;
    }
  }
  return std::nullopt;
}

Matrix msign_exact(const Matrix& a, double rank_tol) {
  if (a.rows() == a.cols()) {
    if (auto p = polar_newton(a)) return *p;
  }
  const SvdResult s = full_svd(a);
  Matrix out(a.rows(), a.cols());
  const double cut = rank_tol * s.singular_values[0];
  for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
    if (s.singular_values[k] <= cut) break;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double uik = s.U(i, k);
      for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += uik * s.V(j, k);
    }
  }
  return out;
}

Matrix msign_newton_schulz(const Matrix& a, const MsignOptions& opt) {
  const bool tall = a.rows() > a.cols();
  Matrix x = tall ? a.transpose() : a;
  x *= 1.0 / frobenius_norm(a);
  for (int k = 0; k < opt.ns_iters; ++k) {
    const auto [ca, cb, cc] = ns_coefficients(opt.schedule, k);
    const Matrix g = matmul_nt(x, x);
    Matrix poly = g * cb + matmul(g, g) * cc;
    x = x * ca + matmul(poly, x);
  }
  if (opt.ns_check) {
    // Eigenvalues of the small Gram matrix are the squared output singular values.
    const Vector lam = singular_values(matmul_nt(x, x));
    const double hi = (1.0 + opt.ns_tol) * (1.0 + opt.ns_tol);
    const double lo = (1.0 - opt.ns_tol) * (1.0 - opt.ns_tol);
    for (double l : lam) {
      if (l > hi || (l < lo && l > 1e-12)) {
        fail(Errc::NoConvergence, "Newton-Schulz output singular value " +
                                      std::to_string(std::sqrt(l)) + " outside tolerance");
      }
    }
  }
  return tall ? x.transpose() : x;
}

}  // namespace

Matrix msign(const Matrix& a, const MsignOptions& options) {
  require_nonempty(a, "msign");
  if (!a.all_finite()) fail(Errc::NonFinite, "msign input");
  if (frobenius_norm(a) == 0.0) fail(Errc::ZeroMatrix, "msign of zero matrix");
  if (options.method == MsignMethod::ExactSvd) return msign_exact(a, options.rank_tol);
  if (options.ns_iters < 1) fail(Errc::InvalidArgument, "ns_iters must be >= 1");
  return msign_newton_schulz(a, options);
}

double principal_angle(const Matrix& a, const Matrix& b, std::size_t k) {
  require_same_shape(a, b, "principal_angle");
  if (k == 0 || k > a.min_dim()) fail(Errc::InvalidArgument, "k must be in [1, min dim]");
  if (frobenius_norm(a) == 0.0 || frobenius_norm(b) == 0.0) {
    fail(Errc::ZeroMatrix, "principal_angle needs nonzero matrices");
  }
  const SvdResult sa = full_svd(a);
  const SvdResult sb = full_svd(b);
  for (const SvdResult* s : {&sa, &sb}) {
    if (k < s->singular_values.size() &&
        s->singular_values[k - 1] - s->singular_values[k] <= 1e-12 * s->singular_values[0]) {
      fail(Errc::DegenerateSpectrum, "top-k subspace is not separated from the rest");
    }
  }
  // sin of the largest angle is the norm of the part of b's basis outside a's.
  Matrix resid(a.rows(), k);
  for (std::size_t j = 0; j < k; ++j) {
    Vector w = sb.left(j);
    for (std::size_t i = 0; i < k; ++i) {
      const Vector ui = sa.left(i);
      const double p = dot(ui, w);
      for (std::size_t r = 0; r < w.size(); ++r) w[r] -= p * ui[r];
    }
    for (std::size_t r = 0; r < w.size(); ++r) resid(r, j) = w[r];
  }
  const double smax = singular_values(resid).front();
  return std::asin(std::clamp(smax, 0.0, 1.0));
}

}  // namespace specclip
