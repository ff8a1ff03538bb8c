#include "specclip/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "specclip/bayes.hpp"
#include "specclip/clip.hpp"
#include "specclip/linalg.hpp"
#include "specclip/noise.hpp"
#include "specclip/optim.hpp"
#include "specclip/quadrature.hpp"

namespace specclip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
constexpr double kQuadSlack = 1e-9;

struct Worst {
  double measured = -INFINITY;
  double bound = 0.0;
  double margin = -INFINITY;
  std::size_t cases = 0;
  std::string where;

  void add(double m, double b, const std::string& at) {
    ++cases;
    if (m - b > margin) {
      margin = m - b;
      measured = m;
      bound = b;
      where = at;
    }
  }

  CheckResult result(std::string group, std::string name, double slack = 0.0) const {
    CheckResult c;
    c.group = std::move(group);
    c.name = std::move(name);
    c.measured = measured;
    c.bound = bound + slack;
    c.cases = cases;
    c.pass = cases > 0 && measured <= bound + slack;
    c.detail = "worst at " + where;
    return c;
  }
};

std::string tag(double B, double s, double a, double g, double r = 1.0) {
  std::ostringstream os;
  os << "B=" << B << " sigma=" << s << " alpha=" << a << " gamma=" << g << " r=" << r;
  return os.str();
}

TheoremConstants constants(double B, double s, double a, double g, std::size_t r) {
  TheoremConstants tc;
  tc.B = B;
  tc.sigma = s;
  tc.alpha = a;
  tc.gamma = g;
  tc.m = r;
  tc.n = r;
  return tc;
}

const std::vector<double> kBs{1.0, 5.0};
const std::vector<double> kSigmas{0.5, 1.0, 3.0};
const std::vector<double> kAlphas{0.0, 0.05, 0.3, 1.0};
const std::vector<double> kGammas{0.1, 1.0, 10.0};
const std::vector<std::size_t> kRanks{1, 4, 16, 64};
const std::vector<ThresholdKind> kKinds{ThresholdKind::PostHard, ThresholdKind::PostSmooth,
                                        ThresholdKind::PreHard, ThresholdKind::PreSmooth};

Phi phi_for(ThresholdKind kind, const TheoremConstants& tc) {
  const bool hard = kind == ThresholdKind::PostHard || kind == ThresholdKind::PreHard;
  return Phi{hard ? PhiKind::Hard : PhiKind::Smooth, threshold(kind, tc)};
}

bool is_post(ThresholdKind k) { return k == ThresholdKind::PostHard || k == ThresholdKind::PostSmooth; }

void relative_bias_checks(const VerifyOptions& opt, VerifyReport& rep) {
  for (ThresholdKind kind : kKinds) {
    Worst w;
    const std::vector<std::size_t> ranks = is_post(kind) ? std::vector<std::size_t>{1} : std::vector<std::size_t>{1, 16};
    for (double B : kBs)
      for (double s : kSigmas)
        for (double a : kAlphas)
          for (double g : kGammas)
            for (std::size_t r : ranks) {
              const TheoremConstants tc = constants(B, s, a, g, r);
              const Phi phi = phi_for(kind, tc);
              const double rho = bias_variance_bounds(phi, tc).rho;
              const auto grid = linear_grid(-B, B, opt.bias_grid);
              for (double gv : grid) {
                if (gv == 0.0) continue;
                const double m = relative_bias_oracle(phi, gv, tc.noise());
                w.add(std::abs(m - gv), rho * std::abs(gv) + kQuadSlack, tag(B, s, a, g, static_cast<double>(r)));
              }
            }
    rep.checks.push_back(w.result("relative_bias", std::string(to_string(kind)) + " |m(g)-g| <= rho|g|"));
  }
}

void threshold_checks(VerifyReport& rep) {
  const std::vector<double> Bs{0.0, 1.0, 5.0};
  for (ThresholdKind kind : kKinds) {
    Worst w;
    for (double B : Bs)
      for (double s : kSigmas)
        for (double a : kAlphas)
          for (double g : kGammas)
            for (std::size_t r : kRanks) {
              if (is_post(kind) && r != 1) continue;
              const TheoremConstants tc = constants(B, s, a, g, r);
              const double rho = bias_variance_bounds(phi_for(kind, tc), tc).rho;
              const double limit = is_post(kind) ? 0.5 : 1.0 / (4.0 * std::sqrt(static_cast<double>(r)));
              w.add(rho, limit, tag(B, s, a, g, static_cast<double>(r)));
            }
    rep.checks.push_back(w.result("threshold", std::string(to_string(kind)) +
                                                   (is_post(kind) ? " rho <= 1/2" : " rho <= 1/(4 sqrt r)")));
  }
}

void variance_checks(const VerifyOptions& opt, VerifyReport& rep) {
  Worst quad_w;
  for (ThresholdKind kind : kKinds)
    for (double B : kBs)
      for (double s : kSigmas)
        for (double a : kAlphas)
          for (double g : kGammas) {
            const TheoremConstants tc = constants(B, s, a, g, is_post(kind) ? 1 : 16);
            const Phi phi = phi_for(kind, tc);
            const double v = bias_variance_bounds(phi, tc).v;
            for (double gv : {-B, 0.0, 0.5 * B, B})
              quad_w.add(variance_oracle(phi, gv, tc.noise()), v * (1.0 + 1e-9) + kQuadSlack, tag(B, s, a, g));
          }
  rep.checks.push_back(quad_w.result("variance", "quadrature Var phi(g+xi) <= v"));

  // Monte Carlo at a few representative settings, with the quadrature value
  // as a cross-check on the sampler.
  Worst mc_w, cross_w;
  std::uint64_t stream = 1;
  for (ThresholdKind kind : kKinds)
    for (double a : {0.05, 0.3, 1.0})
      for (double gv : {0.0, 1.0}) {
        const TheoremConstants tc = constants(1.0, 1.0, a, 1.0, is_post(kind) ? 1 : 16);
        const Phi phi = phi_for(kind, tc);
        const double v = bias_variance_bounds(phi, tc).v;
        const auto mc = variance_monte_carlo(phi, gv, tc.noise(), opt.mc_draws, SeedSpec{opt.seed, stream++});
        const std::string at = std::string(to_string(kind)) + " alpha=" + std::to_string(a) + " g=" + std::to_string(gv);
        mc_w.add(mc.variance - opt.mc_slack_se * mc.standard_error, v, at);
        const double exact = variance_oracle(phi, gv, tc.noise());
        cross_w.add(std::abs(mc.variance - exact), opt.mc_slack_se * mc.standard_error, at);
      }
  rep.checks.push_back(mc_w.result("variance", "Monte Carlo Var - 5 SE <= v"));
  rep.checks.push_back(cross_w.result("variance", "Monte Carlo agrees with quadrature within 5 SE"));
}

void deficit_checks(VerifyReport& rep) {
  Worst wg, wc;
  for (double c : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0})
    for (double s : kSigmas)
      for (double g : kGammas) {
        const DerivativeDeficits d = derivative_deficits(c, s, g);
        const std::string at = "c=" + std::to_string(c) + " sigma=" + std::to_string(s) + " gamma=" + std::to_string(g);
        wg.add(d.gaussian, d.gaussian_bound + kQuadSlack, at);
        wc.add(d.cauchy, d.cauchy_bound + kQuadSlack, at);
      }
  rep.checks.push_back(wg.result("derivative_deficit", "1 - E S_c'(sigma Z) <= sqrt(8/pi) sigma / c"));
  rep.checks.push_back(wc.result("derivative_deficit", "1 - E S_c'(H) <= 8 gamma/(pi c) log(e + c/gamma)"));
}

void log_device_checks(VerifyReport& rep) {
  Worst w;
  std::size_t failures = 0;
  const auto as = log_grid(1e-3, 1e3, 19);
  const auto ss = log_grid(1.0, 1e3, 20);
  std::vector<double> a_lattice{0.0};
  a_lattice.insert(a_lattice.end(), as.begin(), as.end());
  for (double a : a_lattice)
    for (double s : ss) {
      const double x0 = 2.0 * s * a * std::log(kE + 2.0 * s * a);
      for (double mult : {1.0, 1.5, 10.0, 1e3}) {
        const double x = x0 > 0.0 ? x0 * mult : mult;
        if (!log_device_check(a, s, x)) ++failures;
        w.add(a * std::log(kE + x) / x, 1.0 / s, "a=" + std::to_string(a) + " s=" + std::to_string(s));
      }
    }
  CheckResult c = w.result("log_device", "a log(e+x)/x <= 1/s on a 20x20 (a, s) lattice");
  c.pass = c.pass && failures == 0;
  rep.checks.push_back(c);
}

void tail_checks(const VerifyOptions& opt, VerifyReport& rep) {
  Philox rng(SeedSpec{opt.seed, 0x7a11});
  const double n = static_cast<double>(opt.mc_draws);
  {
    Worst w;
    for (double g : {0.5, 1.0, 3.0})
      for (double k : {2.0, 10.0, 100.0}) {
        std::size_t hits = 0;
        const double a = k * g;
        for (std::size_t i = 0; i < opt.mc_draws; ++i) hits += std::abs(rng.cauchy(g)) >= a;
        const double p = static_cast<double>(hits) / n;
        const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n);
        w.add(p - opt.mc_slack_se * se, 2.0 * g / (kPi * a), "gamma=" + std::to_string(g) + " a=" + std::to_string(a));
      }
    rep.checks.push_back(w.result("tails", "P(|H| >= a) <= 2 gamma / (pi a)"));
  }
  {
    Worst w;
    for (double s : {0.5, 1.0, 3.0})
      for (double t : {1.0, 2.0, 3.0}) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < opt.mc_draws; ++i) hits += std::abs(s * rng.normal()) >= t * s;
        const double p = static_cast<double>(hits) / n;
        const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n);
        w.add(p - opt.mc_slack_se * se, 2.0 * std::exp(-t * t / 2.0), "sigma=" + std::to_string(s) + " t=" + std::to_string(t));
      }
    rep.checks.push_back(w.result("tails", "P(|Z| >= t) <= 2 exp(-t^2 / 2 sigma^2)"));
  }
  {
    Worst mc_w, quad_w;
    for (double g : {0.5, 1.0, 3.0})
      for (double a : {0.1, 1.0, 10.0, 100.0}) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < opt.mc_draws; ++i) {
          const double h = rng.cauchy(g);
          const double y = std::min(h * h, a * a);
          sum += y;
          sum2 += y * y;
        }
        const double mean = sum / n;
        const double se = std::sqrt(std::max(sum2 / n - mean * mean, 0.0) / n);
        const double bound = 4.0 * g * a / kPi;
        const std::string at = "gamma=" + std::to_string(g) + " a=" + std::to_string(a);
        mc_w.add(mean - 3.0 * se, bound, at);
        // Closed form: (2/pi)[gamma a - gamma^2 atan(a/gamma)] + a^2 (1 - (2/pi) atan(a/gamma)).
        const double at_ = std::atan(a / g);
        const double exact = (2.0 / kPi) * (g * a - g * g * at_) + a * a * (1.0 - 2.0 / kPi * at_);
        quad_w.add(exact, bound, at);
      }
    rep.checks.push_back(mc_w.result("tails", "Monte Carlo E min(H^2, a^2) - 3 SE <= 4 gamma a / pi"));
    rep.checks.push_back(quad_w.result("tails", "exact E min(H^2, a^2) <= 4 gamma a / pi"));
  }
}

void shrinkage_property_checks(VerifyReport& rep) {
  Worst range, lip, odd, tangent;
  for (double c : {0.1, 1.0, 7.0}) {
    const auto xs = linear_grid(-50.0 * c, 50.0 * c, 2001);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      range.add(std::abs(smooth_shrink_scalar(x, c)), c / kE * (1.0 + 1e-15), "c=" + std::to_string(c));
      odd.add(std::abs(smooth_shrink_scalar(-x, c) + smooth_shrink_scalar(x, c)), 0.0, "c=" + std::to_string(c));
      if (i > 0) {
        const double dx = xs[i] - xs[i - 1];
        lip.add(std::abs(smooth_shrink_scalar(xs[i], c) - smooth_shrink_scalar(xs[i - 1], c)), dx * (1.0 + 1e-12),
                "c=" + std::to_string(c));
      }
      // Tangent calibration: exp(-|y|/tau) <= min(1, (tau/e)/|y|), equality at |y| = tau.
      const double tau = c;
      if (x != 0.0) {
        tangent.add(std::exp(-std::abs(x) / tau), std::min(1.0, (tau / kE) / std::abs(x)) + 1e-15,
                    "tau=" + std::to_string(tau));
      }
    }
  }
  rep.checks.push_back(range.result("shrinkage", "|S_c(x)| <= c/e"));
  rep.checks.push_back(odd.result("shrinkage", "S_c odd"));
  rep.checks.push_back(lip.result("shrinkage", "S_c 1-Lipschitz"));
  rep.checks.push_back(tangent.result("shrinkage", "smooth damping <= hard damping at c = tau/e"));
}

void msign_descent_checks(const VerifyOptions& opt, VerifyReport& rep) {
  Worst fro, op, nuc;
  std::uint64_t stream = 100;
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{8, 8}, {16, 8}, {8, 24}, {32, 32}})
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
      Philox rng(SeedSpec{opt.seed, stream++});
      Matrix g(m, n);
      for (double& x : g.values()) x = rng.normal();
      const Matrix u = msign(g);
      const double r = static_cast<double>(std::min(m, n));
      const std::string at = std::to_string(m) + "x" + std::to_string(n);
      fro.add(inner(u, u), r + 1e-8, at);
      op.add(operator_norm(u), 1.0 + 1e-8, at);
      const double nn = nuclear_norm(g);
      nuc.add(std::abs(inner(g, u) - nn), 1e-8 * nn, at);
    }
  rep.checks.push_back(fro.result("msign_descent", "||msign(G)||_F^2 <= r"));
  rep.checks.push_back(op.result("msign_descent", "||msign(G)||_op <= 1"));
  rep.checks.push_back(nuc.result("msign_descent", "<G, msign(G)> = ||G||_*"));
}

}  // namespace

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; }));
}

VerifyReport run_lemma_suite(const VerifyOptions& opt) {
  VerifyReport rep;
  relative_bias_checks(opt, rep);
  threshold_checks(rep);
  variance_checks(opt, rep);
  deficit_checks(rep);
  log_device_checks(rep);
  tail_checks(opt, rep);
  shrinkage_property_checks(rep);
  msign_descent_checks(opt, rep);
  return rep;
}

}  // namespace specclip
