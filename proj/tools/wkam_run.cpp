// wkam_run: run one experiment described by a JSON config.
//
//   wkam_run run <config.json> [--out DIR] [--seed N] [--quiet]
//
// Exit codes: 0 all assertions pass, 1 assertion failure, 2 usage or
// config error (nothing is written in that case).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wkam/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"weak KAM experiment runner"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  bool quiet = false;
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_override, "output directory override");
  run->add_option("--seed", seed_override, "seed override")
      ->each([&](const std::string&) { have_seed = true; });
  run->add_flag("--quiet", quiet, "suppress the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::ifstream f(config_path, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "wkam_run: cannot read %s\n", config_path.c_str());
    return 2;
  }
  std::ostringstream buf;
  buf << f.rdbuf();

  wkam::ExperimentConfig cfg;
  try {
    cfg = wkam::ExperimentConfig::from_json_text(buf.str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wkam_run: invalid config: %s\n", e.what());
    return 2;
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (have_seed) {
    cfg.seed = seed_override;
    cfg.has_seed = true;
  }

  try {
    wkam::ExperimentResult res = wkam::run_experiment(cfg);
    wkam::write_artifacts(cfg.out_dir, res.artifacts);
    if (!quiet) {
      std::fprintf(stderr, "%s", res.summary.c_str());
      std::fprintf(stderr, "%s: %s (artifacts in %s)\n", cfg.kind.c_str(),
                   res.pass ? "pass" : "FAIL", cfg.out_dir.c_str());
    }
    return res.pass ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "wkam_run: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wkam_run: %s\n", e.what());
    return 1;
  }
}
