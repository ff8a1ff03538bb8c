#include "specclip/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "specclip/error.hpp"
#include "specclip/io.hpp"
#include "specclip/kernels.hpp"

namespace specclip::bench {

namespace {

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ull;

std::uint64_t noise_stream(const ContaminationSpec& spec, std::size_t step) {
  std::uint64_t h = mix_stream(kNoiseTag, std::bit_cast<std::uint64_t>(spec.alpha));
  h = mix_stream(h, std::bit_cast<std::uint64_t>(spec.sigma));
  return mix_stream(h, step);
}

Matrix fast_gradient(const Matrix& w, const RegressionProblem& p) { return matmul(w - p.W_star, p.H); }

struct StepMetrics {
  double spectral_err = NAN;
  double angle = NAN;
};

StepMetrics step_metrics(const Matrix& clipped, const Matrix& grad, std::size_t k) {
  StepMetrics m;
  try {
    m.spectral_err = std::abs(operator_norm(clipped) - operator_norm(grad));
    m.angle = subspace_recovery(clipped, grad, k);
  } catch (const Error&) {
    // Zero or degenerate matrices leave the metric undefined.
  }
  return m;
}

}  // namespace

RegressionProblem make_problem(std::size_t d_out, std::size_t d_h, std::size_t n, SeedSpec seed) {
  if (d_out == 0 || d_h == 0 || n == 0) fail(Errc::InvalidArgument, "problem dimensions must be positive");
  RegressionProblem p;
  Philox rng(seed);
  p.W_star = Matrix(d_out, d_h);
  for (double& x : p.W_star.values()) x = rng.normal();
  p.A = Matrix(d_h, n);
  for (double& x : p.A.values()) x = rng.normal();
  p.Y = matmul(p.W_star, p.A);
  p.H = matmul_nt(p.A, p.A) * (1.0 / static_cast<double>(n));
  p.n = n;
  return p;
}

RegressionProblem make_problem(const ProblemSpec& spec, std::uint64_t seed) {
  return make_problem(spec.d_out, spec.d_h, spec.n, SeedSpec{seed, 0});
}

double loss(const Matrix& w, const RegressionProblem& p) {
  const Matrix r = matmul(w, p.A) - p.Y;
  return kernels::sum_squares(r.values().data(), r.size()) / (2.0 * static_cast<double>(p.n));
}

Matrix true_gradient(const Matrix& w, const RegressionProblem& p) {
  require_same_shape(w, p.W_star, "true_gradient");
  return matmul_nt(matmul(w, p.A) - p.Y, p.A) * (1.0 / static_cast<double>(p.n));
}

const char* to_string(Method m) noexcept { return m == Method::GD ? "gd" : "spectral_gd"; }

Method parse_method(const std::string& name) {
  if (name == "gd") return Method::GD;
  if (name == "spectral_gd") return Method::SpectralGD;
  fail(Errc::InvalidArgument, "unknown method '" + name + "'");
}

const char* stage_of(Method m) noexcept { return m == Method::GD ? "post" : "pre"; }

void RunConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) fail(Errc::InvalidArgument, "lr must be > 0");
  if (!(quantile > 0.0 && quantile < 1.0)) fail(Errc::InvalidArgument, "quantile must lie in (0, 1)");
  if (steps < 1) fail(Errc::InvalidArgument, "steps must be >= 1");
  if (clip != ClipKind::None && clip != ClipKind::HardCoordinate && clip != ClipKind::SmoothShrinkage) {
    fail(Errc::InvalidArgument, "benchmark clip must be none, hard or smooth");
  }
  if (subspace_k < 1) fail(Errc::InvalidArgument, "subspace_k must be >= 1");
  noise().validate();
}

ContaminationSpec RunConfig::noise() const {
  ContaminationSpec s;
  s.alpha = alpha;
  s.sigma = noise_sigma;
  s.heavy = heavy;
  return s;
}

Matrix step_noise(std::size_t rows, std::size_t cols, const ContaminationSpec& spec, std::uint64_t seed,
                  std::size_t step) {
  return sample_contamination(rows, cols, spec, SeedSpec{seed, noise_stream(spec, step)});
}

NoiseTape::NoiseTape(std::size_t rows, std::size_t cols, const ContaminationSpec& spec, std::uint64_t seed,
                     std::size_t steps) {
  steps_.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) steps_.push_back(step_noise(rows, cols, spec, seed, k));
}

namespace {

template <typename NoiseAt>
RunResult train(const RegressionProblem& p, const RunConfig& cfg, NoiseAt&& noise_at) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t rows = p.W_star.rows();
  const std::size_t cols = p.W_star.cols();
  ClipSpec clip;
  clip.kind = cfg.clip;
  clip.quantile = cfg.quantile;
  const double scale = update_scale(cfg.scale_mode, rows, cols);

  RunResult res;
  res.loss_curve.reserve(cfg.steps);
  Matrix w(rows, cols);
  Matrix grad = fast_gradient(w, p);
  res.initial_loss = 0.5 * inner(w - p.W_star, grad);
  const double limit = cfg.divergence_factor * std::max(res.initial_loss, 1e-300);

  for (std::size_t k = 0; k < cfg.steps; ++k) {
    Matrix noisy = grad + noise_at(k);
    const Matrix update = apply_clip(noisy, clip);
    const bool last = k + 1 == cfg.steps;
    if (cfg.record_metric_curves || last) {
      const StepMetrics m = step_metrics(update, grad, cfg.subspace_k);
      if (cfg.record_metric_curves) {
        res.spectral_error_curve.push_back(m.spectral_err);
        res.subspace_recovery_curve.push_back(m.angle);
      }
      if (last) {
        res.spectral_err_final = m.spectral_err;
        res.subspace_angle_final = m.angle;
      }
    }
    if (cfg.method == Method::GD) {
      w -= cfg.lr * update;
    } else {
      w -= (cfg.lr * scale) * msign(update, cfg.msign);
    }
    grad = fast_gradient(w, p);
    const double l = 0.5 * inner(w - p.W_star, grad);
    if (!std::isfinite(l) || l > limit) {
      res.diverged = true;
      res.loss_curve.resize(cfg.steps, INFINITY);
      if (cfg.record_metric_curves) {
        res.spectral_error_curve.resize(cfg.steps, NAN);
        res.subspace_recovery_curve.resize(cfg.steps, NAN);
      }
      res.spectral_err_final = NAN;
      res.subspace_angle_final = NAN;
      break;
    }
    res.loss_curve.push_back(l);
  }
  res.final_loss = res.loss_curve.back();
  res.wall_time = cfg.record_timing
                      ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                      : NAN;
  return res;
}

}  // namespace

RunResult run_training(const RegressionProblem& problem, const RunConfig& config, std::uint64_t seed) {
  const ContaminationSpec spec = config.noise();
  const std::size_t rows = problem.W_star.rows(), cols = problem.W_star.cols();
  return train(problem, config, [&](std::size_t k) { return step_noise(rows, cols, spec, seed, k); });
}

RunResult run_training(const RegressionProblem& problem, const RunConfig& config, const NoiseTape& tape) {
  if (tape.size() < config.steps) fail(Errc::InvalidArgument, "noise tape shorter than the run");
  return train(problem, config, [&](std::size_t k) -> const Matrix& { return tape.at(k); });
}

const char* to_string(SpeedupStatus s) noexcept {
  switch (s) {
    case SpeedupStatus::Reached: return "reached";
    case SpeedupStatus::NotReached: return "not_reached";
    case SpeedupStatus::BaselineDiverged: return "baseline_diverged";
    case SpeedupStatus::MethodDiverged: return "method_diverged";
  }
  return "reached";
}

double first_hit(const std::vector<double>& curve, double target) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i] <= target) {
      if (i == 0) return 1.0;
      const double prev = curve[i - 1];
      const double frac = (prev - target) / (prev - curve[i]);
      return static_cast<double>(i) + std::clamp(frac, 0.0, 1.0);
    }
  }
  return NAN;
}

Speedup speedup_metric(const std::vector<double>& baseline_curve, const std::vector<double>& method_curve) {
  if (baseline_curve.empty() || method_curve.empty()) fail(Errc::InvalidArgument, "speedup needs non-empty curves");
  const double target = baseline_curve.back();
  const double method_final = method_curve.back();
  Speedup s;
  if (!std::isfinite(target)) {
    s.status = std::isfinite(method_final) ? SpeedupStatus::BaselineDiverged : SpeedupStatus::MethodDiverged;
    s.value = std::isfinite(method_final) ? INFINITY : 1.0;
    s.steps_to_target = NAN;
    return s;
  }
  if (!std::isfinite(method_final)) {
    // Reaching the target on the way to blowing up does not count.
    s.status = SpeedupStatus::MethodDiverged;
    s.value = 0.0;
    s.steps_to_target = NAN;
    return s;
  }
  const double base_steps = first_hit(baseline_curve, target);
  s.steps_to_target = first_hit(method_curve, target);
  if (std::isnan(s.steps_to_target)) {
    s.status = SpeedupStatus::NotReached;
    s.value = method_final > 0.0 ? target / method_final : 0.0;
    return s;
  }
  s.value = base_steps / s.steps_to_target;
  return s;
}

double subspace_recovery(const Matrix& g_clipped, const Matrix& g_true, std::size_t k) {
  return principal_angle(g_clipped, g_true, k);
}

double median(std::vector<double> xs) {
  if (xs.empty()) return NAN;
  std::sort(xs.begin(), xs.end(), [](double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  });
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {

struct Cell {
  Method method;
  ClipKind clip;
  std::size_t alpha_index;
  double lr;
  double quantile;
};

}  // namespace

SweepResult grid_sweep(const SweepOptions& opt) {
  const SweepGrid& g = opt.grid;
  if (g.methods.empty() || g.clips.empty() || g.alphas.empty() || g.lrs.empty() || opt.seeds.empty()) {
    fail(Errc::InvalidArgument, "sweep grids must be non-empty");
  }
  const bool any_clip = std::any_of(g.clips.begin(), g.clips.end(), [](ClipKind c) { return c != ClipKind::None; });
  if (any_clip && g.quantiles.empty()) fail(Errc::InvalidArgument, "quantile grid is empty");

  std::vector<Cell> cells;
  for (std::size_t ai = 0; ai < g.alphas.size(); ++ai)
    for (Method m : g.methods)
      for (ClipKind c : g.clips)
        for (double lr : g.lrs) {
          if (c == ClipKind::None) {
            cells.push_back({m, c, ai, lr, NAN});
          } else {
            for (double q : g.quantiles) cells.push_back({m, c, ai, lr, q});
          }
        }

  const std::size_t ns = opt.seeds.size();
  std::vector<RegressionProblem> problems(ns);
  for (std::size_t s = 0; s < ns; ++s) problems[s] = make_problem(opt.problem, opt.seeds[s]);

  SweepResult out;
  out.rows.resize(cells.size() * ns);
  std::vector<std::vector<double>> curves(cells.size() * ns);

  // Cells are grouped by alpha so only one alpha's noise tapes live at a time.
  std::size_t begin = 0;
  for (std::size_t ai = 0; ai < g.alphas.size(); ++ai) {
    std::size_t end = begin;
    while (end < cells.size() && cells[end].alpha_index == ai) ++end;

    RunConfig base = opt.base;
    base.alpha = g.alphas[ai];
    base.validate();
    const ContaminationSpec spec = base.noise();
    std::vector<NoiseTape> tapes;
    tapes.reserve(ns);
    for (std::size_t s = 0; s < ns; ++s)
      tapes.emplace_back(opt.problem.d_out, opt.problem.d_h, spec, opt.seeds[s], base.steps);

    const auto tasks = static_cast<std::ptrdiff_t>((end - begin) * ns);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < tasks; ++t) {
      const std::size_t idx = begin * ns + static_cast<std::size_t>(t);
      const Cell& cell = cells[idx / ns];
      const std::size_t s = idx % ns;
      RunConfig cfg = base;
      cfg.method = cell.method;
      cfg.clip = cell.clip;
      cfg.lr = cell.lr;
      if (cell.clip != ClipKind::None) cfg.quantile = cell.quantile;
      const RunResult r = run_training(problems[s], cfg, tapes[s]);
      SweepRow& row = out.rows[idx];
      row.method = cell.method;
      row.clip = cell.clip;
      row.alpha = g.alphas[ai];
      row.lr = cell.lr;
      row.quantile = cell.quantile;
      row.seed = opt.seeds[s];
      row.final_loss = r.final_loss;
      row.diverged = r.diverged;
      row.spectral_err_final = r.spectral_err_final;
      row.subspace_angle_final = r.subspace_angle_final;
      row.wall_time_s = r.wall_time;
      curves[idx] = r.loss_curve;
    }
    begin = end;
  }

  // Median over seeds per cell, then the best cell per (method, clip, alpha).
  std::vector<double> cell_median(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> finals(ns);
    for (std::size_t s = 0; s < ns; ++s) finals[s] = out.rows[c * ns + s].final_loss;
    cell_median[c] = median(finals);
  }
  using Key = std::tuple<int, int, std::size_t>;
  std::map<Key, std::size_t> best_cell;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Key key{static_cast<int>(cells[c].method), static_cast<int>(cells[c].clip), cells[c].alpha_index};
    auto it = best_cell.find(key);
    if (it == best_cell.end() || cell_median[c] < cell_median[it->second]) best_cell[key] = c;
  }

  const bool has_baseline = std::find(g.clips.begin(), g.clips.end(), ClipKind::None) != g.clips.end();
  for (std::size_t idx = 0; idx < out.rows.size(); ++idx) {
    SweepRow& row = out.rows[idx];
    const Cell& cell = cells[idx / ns];
    if (!has_baseline) {
      row.speedup = NAN;
      row.steps_to_target = NAN;
      continue;
    }
    const std::size_t base_cell =
        best_cell.at(Key{static_cast<int>(cell.method), static_cast<int>(ClipKind::None), cell.alpha_index});
    const Speedup sp = speedup_metric(curves[base_cell * ns + idx % ns], curves[idx]);
    row.speedup = sp.value;
    row.steps_to_target = sp.steps_to_target;
    row.speedup_status = sp.status;
  }

  // Emit best rows in grid order.
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Key key{static_cast<int>(cells[c].method), static_cast<int>(cells[c].clip), cells[c].alpha_index};
    if (best_cell.at(key) != c) continue;
    BestRow b;
    b.method = cells[c].method;
    b.clip = cells[c].clip;
    b.alpha = g.alphas[cells[c].alpha_index];
    b.lr = cells[c].lr;
    b.quantile = cells[c].quantile;
    b.median_final_loss = cell_median[c];
    std::vector<double> sps(ns);
    for (std::size_t s = 0; s < ns; ++s) sps[s] = out.rows[c * ns + s].speedup;
    b.median_speedup = median(sps);
    out.best.push_back(b);
  }
  if (opt.keep_curves) out.curves = std::move(curves);
  return out;
}

std::vector<std::string> results_header() {
  return {"method", "clip", "stage", "alpha", "lr", "quantile", "seed", "final_loss", "diverged",
          "steps_to_target", "speedup", "spectral_err_final", "subspace_angle_final", "wall_time_s",
          "speedup_status"};
}

std::vector<std::string> results_cells(const SweepRow& r) {
  using io::format_double;
  return {to_string(r.method), to_string(r.clip), stage_of(r.method), format_double(r.alpha),
          format_double(r.lr), format_double(r.quantile), std::to_string(r.seed), format_double(r.final_loss),
          r.diverged ? "1" : "0", format_double(r.steps_to_target), format_double(r.speedup),
          format_double(r.spectral_err_final), format_double(r.subspace_angle_final),
          format_double(r.wall_time_s), to_string(r.speedup_status)};
}

std::vector<std::string> best_header() {
  return {"method", "clip", "stage", "alpha", "lr", "quantile", "median_final_loss", "median_speedup"};
}

std::vector<std::string> best_cells(const BestRow& b) {
  using io::format_double;
  return {to_string(b.method), to_string(b.clip), stage_of(b.method), format_double(b.alpha),
          format_double(b.lr), format_double(b.quantile), format_double(b.median_final_loss),
          format_double(b.median_speedup)};
}

}  // namespace specclip::bench
