#include <CLI11.hpp>

#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace specclip::cli;
  CLI::App app{"Entry-wise clipping toolkit for matrix gradients"};
  app.set_version_flag("--version", SPECCLIP_VERSION);
  app.require_subcommand(1);

  GlobalOptions global;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format = "csv";
  std::string out_dir = global.out_dir.string();
  app.add_option("--seed", seed, "Base seed (overrides the config)");
  app.add_option("--out-dir", out_dir, "Output directory for artifacts and the manifest");
  app.add_option("--threads", threads, "Worker threads; falls back to SPECCLIP_THREADS");
  app.add_option("--format", format, "Matrix output format")->check(CLI::IsMember({"csv", "bin"}));

  ClipArgs clip;
  auto* c = app.add_subcommand("clip", "Clip a matrix file");
  c->add_option("input", clip.input, "Input matrix (CSV or SPCMAT01)")->required();
  c->add_option("output", clip.output, "Output matrix path")->required();
  c->add_option("--kind", clip.kind, "none, hard, global, spectral or smooth");
  c->add_option("--threshold", clip.threshold, "Absolute threshold");
  c->add_option("--quantile", clip.quantile, "Quantile of |entries| used as the threshold");
  c->add_option("--beta", clip.beta, "Gain for smooth shrinkage, in (0, 1]");

  std::string config;
  auto add_config_cmd = [&](const char* name, const char* help, bool required) {
    auto* sub = app.add_subcommand(name, help);
    auto* opt = sub->add_option("config", config, "JSON config (schema specclip/1)");
    if (required) opt->required();
    return sub;
  };
  auto* diagnose = add_config_cmd("diagnose", "Localization diagnostics for a signal/noise pair", true);
  auto* noise = add_config_cmd("noise", "Sample a noise matrix", true);
  auto* bayes = add_config_cmd("bayes", "Posterior-mean oracle versus smooth shrinkage", true);
  auto* verify = add_config_cmd("verify", "Run the scalar lemma suite", false);
  auto* bench = add_config_cmd("bench", "Regression benchmark sweep", true);
  bench->add_flag("--emit-plot-data", global.emit_plot_data, "Write one loss-curve CSV per run under curves/");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  global.seed = seed;
  global.out_dir = out_dir;
  global.threads = resolve_threads(threads);
  global.format = format == "bin" ? specclip::io::MatrixFormat::Binary : specclip::io::MatrixFormat::Csv;

  if (*c) return cmd_clip(global, clip, std::cout, std::cerr);
  if (*diagnose) return cmd_diagnose(global, config, std::cout, std::cerr);
  if (*noise) return cmd_noise(global, config, std::cout, std::cerr);
  if (*bayes) return cmd_bayes(global, config, std::cout, std::cerr);
  if (*verify) return cmd_verify(global, config, std::cout, std::cerr);
  if (*bench) return cmd_bench(global, config, std::cout, std::cerr);
  return kConfigError;
}
