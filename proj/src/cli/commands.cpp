#include "cli/commands.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <sstream>

#include "cli/config.hpp"
#include "cli/manifest.hpp"
#include "specclip/bayes.hpp"
#include "specclip/bench.hpp"
#include "specclip/clip.hpp"
#include "specclip/error.hpp"
#include "specclip/kernels.hpp"
#include "specclip/linalg.hpp"
#include "specclip/localization.hpp"
#include "specclip/verify.hpp"

namespace specclip::cli {

namespace {

using io::format_double;

// JSON cannot hold inf/nan; they are written as null.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json norms_of(const Matrix& m) {
  return {{"inf", num(entry_max_norm(m))}, {"fro", num(frobenius_norm(m))}, {"sigma1", num(operator_norm(m))}};
}

std::string matrix_bytes(const Matrix& m, io::MatrixFormat f) {
  std::ostringstream os(std::ios::binary);
  if (f == io::MatrixFormat::Binary) io::write_binary(os, m);
  else io::write_csv(os, m);
  return os.str();
}

const char* matrix_ext(io::MatrixFormat f) { return f == io::MatrixFormat::Binary ? ".bin" : ".csv"; }

Json effective_config(Json config, const GlobalOptions& g) {
  if (g.seed) config["cli_seed"] = *g.seed;
  return config;
}

void apply_threads(const GlobalOptions& g) {
  kernels::set_threads(g.threads);
  if (g.threads > 0) omp_set_num_threads(g.threads);
}

// Runs a command body: config problems map to 2, numerical failures to 3.
int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    const bool input_problem = e.code() == Errc::ParseError || e.code() == Errc::IoError;
    err << (input_problem ? "input error: " : "numerical error: ") << e.what() << '\n';
    return input_problem ? kConfigError : kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace

int resolve_threads(std::optional<int> flag) {
  if (flag) return std::max(0, *flag);
  if (const char* env = std::getenv("SPECCLIP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return static_cast<int>(v);
  }
  return 0;
}

int cmd_clip(const GlobalOptions& g, const ClipArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    apply_threads(g);
    ClipSpec spec;
    try {
      spec.kind = parse_clip_kind(args.kind);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if (args.quantile && args.threshold) throw ConfigError("give either --threshold or --quantile, not both");
    if (args.quantile) spec.quantile = *args.quantile;
    else if (args.threshold) spec.threshold = *args.threshold;
    else if (spec.kind != ClipKind::None) throw ConfigError("clip needs --threshold or --quantile");
    spec.beta = args.beta;
    try {
      spec.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    const Matrix in = io::read_matrix(args.input);
    const Matrix clipped = apply_clip(in, spec);
    const double used = spec.kind == ClipKind::None ? NAN : spec.resolve_threshold(in);
    io::write_matrix(args.output, clipped, g.format);
    Json report = {{"kind", to_string(spec.kind)}, {"threshold", num(used)}, {"beta", spec.beta},
                   {"before", norms_of(in)}, {"after", norms_of(clipped)}};
    out << report.dump() << '\n';
    return int(kOk);
  });
}

int cmd_diagnose(const GlobalOptions& g, const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const Json raw = load_config(path);
    const DiagnoseConfig cfg = parse_diagnose(raw, g.seed);
    apply_threads(g);
    const std::string started = utc_timestamp();

    const Matrix signal = realize(cfg.signal, cfg.seed);
    const Matrix noise = realize(cfg.noise, cfg.seed);
    const LocalizationReport rep =
        localization_report(signal, noise, cfg.draws, SeedSpec{cfg.seed, 0xba5e}, cfg.direction);
    const SpectralGapInfo gap = spectral_gap(signal);

    Json spearman = nullptr;
    if (cfg.noise.kind != MatrixSource::Kind::File && cfg.realizations >= 3) {
      std::vector<double> peaks, tops;
      for (std::size_t k = 0; k < cfg.realizations; ++k) {
        const Matrix e = realize(cfg.noise, cfg.seed, 1000 + k);
        peaks.push_back(entry_max_norm(e));
        tops.push_back(operator_norm(e));
      }
      spearman = spearman_rho(peaks, tops);
    }
    Json hill = nullptr;
    try {
      const auto vals = noise.values();
      const std::size_t k = cfg.hill_k.value_or(default_hill_k(vals.size()));
      hill = hill_estimator(vals, k);
    } catch (const Error& e) {
      if (e.code() != Errc::InsufficientSamples) throw;
    }

    Json report = {{"r_max", rep.r_max},
                   {"r", rep.r},
                   {"R", rep.ratio_R},
                   {"baseline_median", rep.baseline_median},
                   {"R_hat", rep.normalized_R_hat},
                   {"sigma1", gap.sigma1},
                   {"gap", gap.gap},
                   {"direction", rep.direction},
                   {"spearman", spearman},
                   {"hill", hill}};
    OutputSet files;
    files.add("report.json", report.dump(2) + "\n");
    files.commit(g.out_dir, "diagnose", effective_config(raw, g), {cfg.seed}, started);
    out << report.dump() << '\n';
    return int(kOk);
  });
}

int cmd_noise(const GlobalOptions& g, const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const Json raw = load_config(path);
    const NoiseConfig cfg = parse_noise(raw, g.seed);
    const std::string started = utc_timestamp();
    const Matrix e = realize(cfg.source, cfg.seed);
    OutputSet files;
    const std::string name = std::string("noise") + matrix_ext(g.format);
    files.add(name, matrix_bytes(e, g.format));
    files.commit(g.out_dir, "noise", effective_config(raw, g), {cfg.seed}, started);
    Json summary = {{"file", name}, {"rows", e.rows()}, {"cols", e.cols()}, {"norms", norms_of(e)}};
    out << summary.dump() << '\n';
    return int(kOk);
  });
}

int cmd_bayes(const GlobalOptions& g, const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const Json raw = load_config(path);
    const BayesConfig cfg = parse_bayes(raw);
    const std::string started = utc_timestamp();
    const SurrogateProfile prof = surrogate_error_profile(cfg.channel, cfg.tau, cfg.y_grid, cfg.tau_lo, cfg.tau_hi);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : prof.rows) {
      rows.push_back({format_double(r.y), format_double(r.pi), format_double(r.bayes), format_double(r.surrogate),
                      format_double(r.abs_err)});
    }
    std::ostringstream csv;
    io::write_table(csv, {"y", "pi", "bayes_mean", "surrogate", "abs_err"}, rows);
    Json summary = {{"beta", cfg.channel.beta()},       {"tau", cfg.tau},
                    {"max_abs_err", prof.max_err},       {"best_tau", prof.best_tau},
                    {"best_max_abs_err", prof.best_max_err}};
    OutputSet files;
    files.add("bayes.csv", csv.str());
    files.add("summary.json", summary.dump(2) + "\n");
    files.commit(g.out_dir, "bayes", effective_config(raw, g), {}, started);
    out << summary.dump() << '\n';
    return int(kOk);
  });
}

int cmd_verify(const GlobalOptions& g, const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const Json raw = path.empty() ? Json::object() : load_config(path);
    const VerifyConfig cfg = parse_verify(raw, g.seed);
    apply_threads(g);
    const std::string started = utc_timestamp();
    const VerifyReport rep = run_lemma_suite(cfg.options);
    Json checks = Json::array();
    for (const auto& c : rep.checks) {
      checks.push_back({{"group", c.group}, {"name", c.name}, {"measured", num(c.measured)},
                        {"bound", num(c.bound)}, {"cases", c.cases}, {"status", c.pass ? "pass" : "fail"},
                        {"detail", c.detail}});
      out << (c.pass ? "pass  " : "FAIL  ") << c.group << ": " << c.name << "  (measured "
          << format_double(c.measured) << ", bound " << format_double(c.bound) << ", " << c.cases << " cases)\n";
    }
    Json report = {{"all_pass", rep.all_pass()}, {"failures", rep.failures()}, {"checks", checks}};
    OutputSet files;
    files.add("verify.json", report.dump(2) + "\n");
    files.commit(g.out_dir, "verify", effective_config(raw, g), {cfg.options.seed}, started);
    return rep.all_pass() ? int(kOk) : int(kVerifyFailed);
  });
}

int cmd_bench(const GlobalOptions& g, const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    const Json raw = load_config(path);
    const BenchConfig cfg = parse_bench(raw, g.seed);
    apply_threads(g);
    const std::string started = utc_timestamp();
    bench::SweepOptions opt = cfg.sweep;
    opt.keep_curves = cfg.emit_plot_data || g.emit_plot_data;
    const bench::SweepResult res = bench::grid_sweep(opt);

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : res.rows) rows.push_back(bench::results_cells(r));
    std::ostringstream results;
    io::write_table(results, bench::results_header(), rows);
    rows.clear();
    for (const auto& b : res.best) rows.push_back(bench::best_cells(b));
    std::ostringstream best;
    io::write_table(best, bench::best_header(), rows);

    OutputSet files;
    files.add("results.csv", results.str());
    files.add("best.csv", best.str());
    if (opt.keep_curves) {
      for (std::size_t i = 0; i < res.rows.size(); ++i) {
        std::ostringstream curve;
        curve << "step,loss\n";
        for (std::size_t k = 0; k < res.curves[i].size(); ++k)
          curve << (k + 1) << ',' << format_double(res.curves[i][k]) << '\n';
        char name[64];
        std::snprintf(name, sizeof name, "curves/row_%06zu.csv", i);
        files.add(name, curve.str());
      }
    }
    files.commit(g.out_dir, "bench", effective_config(raw, g), opt.seeds, started);
    out << "bench: " << res.rows.size() << " runs, " << res.best.size() << " best cells -> "
        << (g.out_dir / "results.csv").string() << '\n';
    return int(kOk);
  });
}

}  // namespace specclip::cli
