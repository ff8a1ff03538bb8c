#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <queue>
#include <string>
#include <vector>

#include "specclip/error.hpp"

namespace specclip::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Panel budget for the global adaptive driver.
inline constexpr std::size_t kMaxPanels = 4000;
/// Refinement aims for rel_tol, but the 7/15 error estimate bottoms out near
/// machine precision, so a result is only rejected when it misses this floor too.
inline constexpr double kAcceptRelTol = 1e-9;

namespace detail {

struct Panel {
  double a, b;
  Result r;
  bool operator<(const Panel& o) const { return r.error < o.r.error; }
};

template <typename F>
Panel panel(F& f, double a, double b) {
  Panel p{a, b, {}};
  p.r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.r.error, &p.r.l1);
  return p;
}

}  // namespace detail

/// Global adaptive 7/15-point Gauss-Kronrod over the pieces between sorted
/// breakpoints: the panel with the largest error is bisected until the summed
/// error is below max(abs_tol, rel_tol * L1). QuadratureFailure when the
/// result is not finite or misses max(abs_tol, max(rel_tol, kAcceptRelTol) * L1).
template <typename F>
Result integrate_split(F&& f, double a, double b, std::vector<double> breaks, double abs_tol,
                       double rel_tol = 1e-13) {
  if (a == b) return {};
  std::erase_if(breaks, [&](double x) { return !(x > a && x < b) || !std::isfinite(x); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.insert(breaks.begin(), a);
  breaks.push_back(b);

  std::priority_queue<detail::Panel> heap;
  Result total;
  auto push = [&](detail::Panel p) {
    total.value += p.r.value;
    total.error += p.r.error;
    total.l1 += p.r.l1;
    heap.push(p);
  };
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) push(detail::panel(f, breaks[k], breaks[k + 1]));
  while (std::isfinite(total.value) && total.error > std::max(abs_tol, rel_tol * total.l1) &&
         heap.size() < kMaxPanels) {
    const detail::Panel worst = heap.top();
    heap.pop();
    total.value -= worst.r.value;
    total.error -= worst.r.error;
    total.l1 -= worst.r.l1;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Too narrow to split further; keep it as is.
      push(worst);
      break;
    }
    push(detail::panel(f, worst.a, mid));
    push(detail::panel(f, mid, worst.b));
  }
  // Re-sum to shed the drift of the running updates.
  Result exact;
  while (!heap.empty()) {
    exact.value += heap.top().r.value;
    exact.error += heap.top().r.error;
    exact.l1 += heap.top().r.l1;
    heap.pop();
  }
  if (!std::isfinite(exact.value) ||
      exact.error > std::max(abs_tol, std::max(rel_tol, kAcceptRelTol) * exact.l1)) {
    fail(Errc::QuadratureFailure, "integral over [" + std::to_string(a) + ", " + std::to_string(b) +
                                      "] error estimate " + std::to_string(exact.error));
  }
  return exact;
}

template <typename F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 1e-13) {
  return integrate_split(std::forward<F>(f), a, b, {}, abs_tol, rel_tol);
}

}  // namespace specclip::quad
