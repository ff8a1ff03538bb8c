#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specclip/bayes.hpp"
#include "specclip/bench.hpp"
#include "specclip/noise.hpp"
#include "specclip/verify.hpp"

namespace specclip::cli {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "specclip/1";

/// Raised for anything wrong with a config document; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a config file, checks the schema tag and strips it.
Json load_config(const std::filesystem::path& path);

HeavySpec parse_heavy(const Json& j);
ContaminationSpec parse_contamination(const Json& j);
SubspaceSpec parse_subspace(const Json& j);
Json to_json(const HeavySpec& h);
Json to_json(const ContaminationSpec& c);

/// Where a matrix comes from: a file, or a generator with its own seed stream.
struct MatrixSource {
  enum class Kind { File, Gaussian, Contamination, Subspace, PlantedSpike } kind = Kind::Gaussian;
  std::filesystem::path file;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double sigma = 1.0;
  double strength = 0.0;
  ContaminationSpec contamination;
  SubspaceSpec subspace;
  std::uint64_t stream = 0;
};

MatrixSource parse_matrix_source(const Json& j, std::uint64_t default_stream);
Matrix realize(const MatrixSource& src, std::uint64_t seed, std::uint64_t stream_offset = 0);

struct DiagnoseConfig {
  MatrixSource signal;
  MatrixSource noise;
  std::size_t draws = 256;
  std::size_t direction = 0;
  /// Extra noise draws used for the spectral-max Spearman correlation (generated sources only).
  std::size_t realizations = 32;
  std::optional<std::size_t> hill_k;
  std::uint64_t seed = 0;
};

struct NoiseConfig {
  MatrixSource source;
  std::uint64_t seed = 0;
};

struct BayesConfig {
  ChannelSpec channel;
  double tau = 1.0;
  std::vector<double> y_grid;
  double tau_lo = 1e-2;
  double tau_hi = 1e4;
};

struct VerifyConfig {
  VerifyOptions options;
};

struct BenchConfig {
  bench::SweepOptions sweep;
  bool emit_plot_data = false;
};

DiagnoseConfig parse_diagnose(const Json& j, std::optional<std::uint64_t> seed_override);
NoiseConfig parse_noise(const Json& j, std::optional<std::uint64_t> seed_override);
BayesConfig parse_bayes(const Json& j);
VerifyConfig parse_verify(const Json& j, std::optional<std::uint64_t> seed_override);
BenchConfig parse_bench(const Json& j, std::optional<std::uint64_t> seed_override);

}  // namespace specclip::cli
