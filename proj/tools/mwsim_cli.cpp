#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mwsim/config.hpp"
#include "mwsim/error.hpp"
#include "mwsim/io.hpp"
#include "mwsim/run.hpp"

namespace {

int exit_code(mwsim::ErrorCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matter-wave grating interferometry simulator"};
  app.set_version_flag("--version", std::string(MWSIM_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::string out_dir = ".";
  unsigned threads = 0;
  bool no_timing = false;

  const char* subcommands[][2] = {
      {"pattern", "Single (Monte Carlo averaged) diffraction pattern"},
      {"coherence", "Monte Carlo vs analytic partially coherent patterns over source sizes"},
      {"slitwidth", "Effective slit width table from wall interactions"},
      {"talbot-scan-l", "Talbot-Lau contrast versus L / T_L, with classical baseline"},
      {"talbot-scan-e", "Talbot-Lau contrast versus mean energy"},
      {"fields", "Critical stray electric and magnetic fields"},
  };
  for (auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed (overrides [mc] seed)");
    sub->add_option("--samples", samples, "Monte Carlo samples (overrides [mc] samples)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (0 = all)");
    sub->add_flag("--no-timing", no_timing, "Leave wall time out of the manifest");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(mwsim::ErrorCode::config);
  }

  try {
    const auto sub = mwsim::parse_subcommand(app.get_subcommands().front()->get_name());
    mwsim::RunConfig cfg;
    try {
      cfg = mwsim::parse_config(mwsim::read_text(config_path), sub);
    } catch (const mwsim::ConfigError& e) {
      throw mwsim::ConfigError(config_path + ": " + e.what());
    }
    if (seed) cfg.set_integer("mc", "seed", *seed);
    if (samples) cfg.set_integer("mc", "samples", *samples);
    mwsim::validate_config(cfg);

    mwsim::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.timing = !no_timing;
    const auto out = mwsim::run(cfg, opt);
    std::cout << out.summary;
    std::cout << "run_hash = " << out.run_hash << "\n";
    for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
    return 0;
  } catch (const mwsim::Error& e) {
    std::cerr << "mwsim: error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "mwsim: error: " << e.what() << "\n";
    return 1;
  }
}
