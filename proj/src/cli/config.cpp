#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "specclip/error.hpp"
#include "specclip/io.hpp"

namespace specclip::cli {

namespace {

void allow_only(const Json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!keys.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

template <typename T>
T get_req(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  return get_or<T>(j, key, T{}, where);
}

std::size_t get_size(const Json& j, const char* key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(where + ": '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> grid_from(const Json& j, const std::string& where) {
  if (j.is_array()) return j.get<std::vector<double>>();
  allow_only(j, {"lo", "hi", "count", "spacing"}, where);
  const double lo = get_req<double>(j, "lo", where);
  const double hi = get_req<double>(j, "hi", where);
  const std::size_t count = get_size(j, "count", 41, where);
  const std::string spacing = get_or<std::string>(j, "spacing", "linear", where);
  if (spacing == "log") return log_grid(lo, hi, count);
  if (spacing == "linear") return linear_grid(lo, hi, count);
  throw ConfigError(where + ": spacing must be 'linear' or 'log'");
}

// Any library validation error raised while parsing is a config error.
template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

Json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("schema") || j.at("schema") != kSchema) {
    throw ConfigError(std::string("config must declare \"schema\": \"") + kSchema + "\"");
  }
  j.erase("schema");
  return j;
}

HeavySpec parse_heavy(const Json& j) {
  const std::string where = "heavy";
  allow_only(j, {"kind", "gamma", "nu", "scale"}, where);
  const std::string kind = get_req<std::string>(j, "kind", where);
  if (kind == "cauchy") return HeavySpec::cauchy(get_or<double>(j, "gamma", 1.0, where));
  if (kind == "student_t") {
    return HeavySpec::student_t(get_req<double>(j, "nu", where), get_or<double>(j, "scale", 1.0, where));
  }
  throw ConfigError("heavy.kind must be 'cauchy' or 'student_t'");
}

ContaminationSpec parse_contamination(const Json& j) {
  const std::string where = "contamination";
  allow_only(j, {"alpha", "sigma", "heavy"}, where);
  ContaminationSpec c;
  c.alpha = get_req<double>(j, "alpha", where);
  c.sigma = get_or<double>(j, "sigma", 1.0, where);
  if (j.contains("heavy")) c.heavy = parse_heavy(j.at("heavy"));
  guarded([&] { c.validate(); return 0; });
  return c;
}

SubspaceSpec parse_subspace(const Json& j) {
  const std::string where = "subspace";
  allow_only(j, {"lambda", "rank", "orthonormalize"}, where);
  SubspaceSpec s;
  s.lambda = get_req<double>(j, "lambda", where);
  s.rank = get_size(j, "rank", 1, where);
  s.orthonormalize = get_or<bool>(j, "orthonormalize", false, where);
  if (!(s.lambda > 0.0) || s.rank == 0) throw ConfigError("subspace needs lambda > 0 and rank >= 1");
  return s;
}

Json to_json(const HeavySpec& h) {
  if (h.kind == HeavyKind::Cauchy) return {{"kind", "cauchy"}, {"gamma", h.gamma}};
  return {{"kind", "student_t"}, {"nu", h.nu}, {"scale", h.scale}};
}

Json to_json(const ContaminationSpec& c) {
  return {{"alpha", c.alpha}, {"sigma", c.sigma}, {"heavy", to_json(c.heavy)}};
}

MatrixSource parse_matrix_source(const Json& j, std::uint64_t default_stream) {
  const std::string where = "matrix source";
  allow_only(j, {"file", "gaussian", "contamination", "subspace", "planted_spike", "rows", "cols", "stream"}, where);
  MatrixSource s;
  s.stream = get_or<std::uint64_t>(j, "stream", default_stream, where);
  int kinds = 0;
  if (j.contains("file")) {
    s.kind = MatrixSource::Kind::File;
    s.file = get_req<std::string>(j, "file", where);
    ++kinds;
  }
  if (j.contains("gaussian")) {
    s.kind = MatrixSource::Kind::Gaussian;
    const Json& g = j.at("gaussian");
    allow_only(g, {"sigma"}, "gaussian");
    s.sigma = get_or<double>(g, "sigma", 1.0, "gaussian");
    ++kinds;
  }
  if (j.contains("contamination")) {
    s.kind = MatrixSource::Kind::Contamination;
    s.contamination = parse_contamination(j.at("contamination"));
    ++kinds;
  }
  if (j.contains("subspace")) {
    s.kind = MatrixSource::Kind::Subspace;
    s.subspace = parse_subspace(j.at("subspace"));
    ++kinds;
  }
  if (j.contains("planted_spike")) {
    s.kind = MatrixSource::Kind::PlantedSpike;
    const Json& p = j.at("planted_spike");
    allow_only(p, {"strength", "sigma"}, "planted_spike");
    s.strength = get_req<double>(p, "strength", "planted_spike");
    s.sigma = get_or<double>(p, "sigma", 1.0, "planted_spike");
    ++kinds;
  }
  if (kinds != 1) throw ConfigError("a matrix source needs exactly one of file/gaussian/contamination/subspace/planted_spike");
  if (s.kind != MatrixSource::Kind::File) {
    s.rows = get_size(j, "rows", 0, where);
    s.cols = get_size(j, "cols", 0, where);
    if (s.rows == 0 || s.cols == 0) throw ConfigError("generated matrices need positive rows and cols");
    if (s.kind == MatrixSource::Kind::Subspace && s.subspace.rank > std::min(s.rows, s.cols)) {
      throw ConfigError("subspace rank exceeds min(rows, cols)");
    }
  }
  return s;
}

Matrix realize(const MatrixSource& src, std::uint64_t seed, std::uint64_t stream_offset) {
  const SeedSpec ss{seed, mix_stream(src.stream, stream_offset)};
  switch (src.kind) {
    case MatrixSource::Kind::File: return io::read_matrix(src.file);
    case MatrixSource::Kind::Gaussian: return sample_gaussian(src.rows, src.cols, src.sigma, ss);
    case MatrixSource::Kind::Contamination: return sample_contamination(src.rows, src.cols, src.contamination, ss);
    case MatrixSource::Kind::Subspace: return sample_subspace(src.rows, src.cols, src.subspace, ss);
    case MatrixSource::Kind::PlantedSpike: {
      // strength * a b^T with flat +-1 directions, plus Gaussian bulk.
      Matrix g = sample_gaussian(src.rows, src.cols, src.sigma, ss);
      Philox rng(SeedSpec{seed, mix_stream(ss.stream, 1)});
      Vector a(src.rows), b(src.cols);
      for (double& x : a) x = (rng.next_u32() & 1u) ? 1.0 : -1.0;
      for (double& x : b) x = (rng.next_u32() & 1u) ? 1.0 : -1.0;
      normalize(a);
      normalize(b);
      return g + src.strength * outer(a, b);
    }
  }
  return Matrix();
}

DiagnoseConfig parse_diagnose(const Json& j, std::optional<std::uint64_t> seed_override) {
  const std::string where = "diagnose";
  allow_only(j, {"signal", "noise", "draws", "direction", "realizations", "hill_k", "seed"}, where);
  DiagnoseConfig c;
  if (!j.contains("signal") || !j.contains("noise")) throw ConfigError("diagnose needs 'signal' and 'noise'");
  c.signal = parse_matrix_source(j.at("signal"), 1);
  c.noise = parse_matrix_source(j.at("noise"), 2);
  c.draws = get_size(j, "draws", 256, where);
  c.direction = get_size(j, "direction", 0, where);
  c.realizations = get_size(j, "realizations", 32, where);
  if (j.contains("hill_k")) c.hill_k = get_size(j, "hill_k", 0, where);
  c.seed = seed_override.value_or(get_or<std::uint64_t>(j, "seed", 0, where));
  if (c.draws < 64) throw ConfigError("draws must be >= 64");
  if (c.realizations != 0 && c.realizations < 3) throw ConfigError("realizations must be 0 or >= 3");
  return c;
}

NoiseConfig parse_noise(const Json& j, std::optional<std::uint64_t> seed_override) {
  const std::string where = "noise";
  allow_only(j, {"source", "seed"}, where);
  NoiseConfig c;
  if (!j.contains("source")) throw ConfigError("noise needs 'source'");
  c.source = parse_matrix_source(j.at("source"), 0);
  if (c.source.kind == MatrixSource::Kind::File) throw ConfigError("noise source must be a generator");
  c.seed = seed_override.value_or(get_or<std::uint64_t>(j, "seed", 0, where));
  return c;
}

BayesConfig parse_bayes(const Json& j) {
  const std::string where = "bayes";
  allow_only(j, {"sigma_x", "noise", "tau", "y_grid", "tau_search"}, where);
  BayesConfig c;
  c.channel.sigma_x = get_or<double>(j, "sigma_x", 1.0, where);
  if (!j.contains("noise")) throw ConfigError("bayes needs 'noise'");
  c.channel.noise = parse_contamination(j.at("noise"));
  c.tau = get_or<double>(j, "tau", 1.0, where);
  c.y_grid = j.contains("y_grid") ? guarded([&] { return grid_from(j.at("y_grid"), "y_grid"); })
                                  : linear_grid(-10.0, 10.0, 81);
  if (j.contains("tau_search")) {
    const Json& t = j.at("tau_search");
    allow_only(t, {"lo", "hi"}, "tau_search");
    c.tau_lo = get_or<double>(t, "lo", c.tau_lo, "tau_search");
    c.tau_hi = get_or<double>(t, "hi", c.tau_hi, "tau_search");
  }
  guarded([&] { c.channel.validate(); return 0; });
  if (!(c.tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!(c.tau_lo > 0.0 && c.tau_hi > c.tau_lo)) throw ConfigError("tau_search needs 0 < lo < hi");
  if (c.y_grid.empty()) throw ConfigError("y_grid is empty");
  return c;
}

VerifyConfig parse_verify(const Json& j, std::optional<std::uint64_t> seed_override) {
  const std::string where = "verify";
  allow_only(j, {"mc_draws", "seed", "bias_grid", "mc_slack_se"}, where);
  VerifyConfig c;
  c.options.mc_draws = get_size(j, "mc_draws", c.options.mc_draws, where);
  c.options.seed = seed_override.value_or(get_or<std::uint64_t>(j, "seed", c.options.seed, where));
  c.options.bias_grid = get_size(j, "bias_grid", c.options.bias_grid, where);
  c.options.mc_slack_se = get_or<double>(j, "mc_slack_se", c.options.mc_slack_se, where);
  if (c.options.mc_draws < 1000) throw ConfigError("mc_draws must be >= 1000");
  if (c.options.bias_grid < 3) throw ConfigError("bias_grid must be >= 3");
  return c;
}

BenchConfig parse_bench(const Json& j, std::optional<std::uint64_t> seed_override) {
  const std::string where = "bench";
  allow_only(j, {"problem", "steps", "noise_sigma", "heavy", "methods", "clips", "alphas", "lrs", "quantiles",
                 "seeds", "record_timing", "record_metric_curves", "subspace_k", "emit_plot_data", "msign"},
             where);
  BenchConfig c;
  auto& s = c.sweep;
  if (j.contains("problem")) {
    const Json& p = j.at("problem");
    allow_only(p, {"d_out", "d_h", "n"}, "problem");
    s.problem.d_out = get_size(p, "d_out", 32, "problem");
    s.problem.d_h = get_size(p, "d_h", 32, "problem");
    s.problem.n = get_size(p, "n", 128, "problem");
    if (!s.problem.d_out || !s.problem.d_h || !s.problem.n) throw ConfigError("problem dimensions must be positive");
  }
  s.base.steps = get_size(j, "steps", s.base.steps, where);
  s.base.noise_sigma = get_or<double>(j, "noise_sigma", s.base.noise_sigma, where);
  if (j.contains("heavy")) s.base.heavy = parse_heavy(j.at("heavy"));
  s.base.record_timing = get_or<bool>(j, "record_timing", false, where);
  s.base.record_metric_curves = get_or<bool>(j, "record_metric_curves", false, where);
  s.base.subspace_k = get_size(j, "subspace_k", 1, where);
  if (j.contains("msign")) {
    const std::string m = get_or<std::string>(j, "msign", "exact_svd", where);
    if (m == "exact_svd") s.base.msign.method = MsignMethod::ExactSvd;
    else if (m == "newton_schulz") s.base.msign.method = MsignMethod::NewtonSchulz;
    else throw ConfigError("msign must be 'exact_svd' or 'newton_schulz'");
  }
  c.emit_plot_data = get_or<bool>(j, "emit_plot_data", false, where);

  guarded([&] {
    if (j.contains("methods")) {
      s.grid.methods.clear();
      for (const auto& m : j.at("methods")) s.grid.methods.push_back(bench::parse_method(m.get<std::string>()));
    }
    if (j.contains("clips")) {
      s.grid.clips.clear();
      for (const auto& k : j.at("clips")) s.grid.clips.push_back(parse_clip_kind(k.get<std::string>()));
    }
    if (j.contains("alphas")) s.grid.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("lrs")) s.grid.lrs = j.at("lrs").get<std::vector<double>>();
    if (j.contains("quantiles")) s.grid.quantiles = j.at("quantiles").get<std::vector<double>>();
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    return 0;
  });
  if (seed_override) {
    const std::size_t count = s.seeds.size();
    s.seeds.clear();
    for (std::size_t k = 0; k < count; ++k) s.seeds.push_back(*seed_override + k);
  }
  if (s.grid.methods.empty() || s.grid.clips.empty() || s.grid.alphas.empty() || s.grid.lrs.empty() ||
      s.seeds.empty()) {
    throw ConfigError("bench grids and seeds must be non-empty");
  }
  for (ClipKind k : s.grid.clips) {
    if (k != ClipKind::None && k != ClipKind::HardCoordinate && k != ClipKind::SmoothShrinkage) {
      throw ConfigError("bench clips must be none, hard or smooth");
    }
  }
  guarded([&] {
    for (double a : s.grid.alphas) {
      bench::RunConfig probe = s.base;
      probe.alpha = a;
      for (double lr : s.grid.lrs) {
        probe.lr = lr;
        probe.validate();
      }
      for (double q : s.grid.quantiles) {
        probe.quantile = q;
        probe.validate();
      }
    }
    return 0;
  });
  return c;
}

}  // namespace specclip::cli
