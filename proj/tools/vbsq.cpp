#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "vbsq/experiments.hpp"
#include "vbsq/verify.hpp"

namespace {

int env_threads() {
  const char* s = std::getenv("VBSQ_THREADS");
  if (!s || !*s) return 1;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (*end || v < 1 || v > 1024) {
    std::cerr << "VBSQ_THREADS: expected a positive integer, got '" << s << "'\n";
    std::exit(2);
  }
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vbsq: valence bond solid codes from SU(N) transfer matrices"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config or manifest");
  run->add_option("--config", config_path, "config JSON (or a previous manifest.json)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "master seed, overrides the config");
  run->add_option("--threads", threads, "worker threads, default $VBSQ_THREADS or 1")->check(CLI::Range(1, 1024));
  run->add_option("--out", out_dir, "output directory, overrides the config");

  vbsq::VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "Run the numerical self-checks");
  verify->add_flag("--fast", vopt.fast, "reduced set of checks");
  verify->add_flag("--mutate-lr-sign", vopt.mutate_lr_sign, "")->group("");

  auto* list = app.add_subcommand("list", "List experiments and their default parameters");

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& name : vbsq::experiment_names()) std::cout << name << " " << vbsq::default_params(name).dump() << "\n";
    return 0;
  }
  if (*verify) return vbsq::report_verify(vbsq::run_verify(vopt), std::cout);

  try {
    vbsq::ExperimentConfig cfg = vbsq::load_config(config_path);
    if (seed) cfg.seed = *seed;
    cfg.threads = threads ? *threads : env_threads();
    if (out_dir) cfg.output_dir = *out_dir;
    return vbsq::run_to_directory(cfg, std::cout, std::cerr);
  } catch (const vbsq::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
