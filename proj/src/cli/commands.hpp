#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "specclip/io.hpp"

namespace specclip::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalError = 3 };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "specclip-out";
  int threads = 0;
  io::MatrixFormat format = io::MatrixFormat::Csv;
  /// bench only; ORed with the config's emit_plot_data.
  bool emit_plot_data = false;
};

struct ClipArgs {
  std::filesystem::path input;
  std::filesystem::path output;
  std::string kind = "hard";
  std::optional<double> threshold;
  std::optional<double> quantile;
  double beta = 1.0;
};

int cmd_clip(const GlobalOptions& g, const ClipArgs& args, std::ostream& out, std::ostream& err);
int cmd_diagnose(const GlobalOptions& g, const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_noise(const GlobalOptions& g, const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_bayes(const GlobalOptions& g, const std::filesystem::path& config, std::ostream& out, std::ostream& err);
/// An empty config path runs the suite with default options.
int cmd_verify(const GlobalOptions& g, const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_bench(const GlobalOptions& g, const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Resolves --threads with SPECCLIP_THREADS as fallback; 0 means runtime default.
int resolve_threads(std::optional<int> flag);

}  // namespace specclip::cli
