#pragma once

// Experiment runner behind the CLI: a JSON config selects one of five
// experiment kinds (cell | aim | lower-fuzz | mather | triangle); the run
// produces a report.json plus CSV artifacts and a manifest with content
// hashes. Everything is deterministic given the seed; only the timing
// field of the report may vary between runs.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wkam/lagrangian.hpp"
#include "wkam/torus.hpp"

namespace wkam {

struct ExperimentConfig {
  std::string kind;
  LagrangianSpec spec;
  GridSpec grid;
  std::uint64_t seed{0};
  bool has_seed{false};
  std::string out_dir{"."};

  // aim / triangle
  double epsilon{0.1};
  double r{10.0};
  double kappa{0.0};          // > 0 overrides the certified schedule
  double fineness{0.0};       // > 0 overrides the certified fineness bound
  std::vector<double> start;  // empty: drawn from the seed

  // lower-fuzz
  long long proposals{10000};
  int segments{32};

  // mather / triangle
  int modes{8};
  double vradius{4.0};
  int vnodes{128};  // velocity lattice per_axis (even)
  int lp_n{64};     // x-grid of the LP leg of a triangle run

  double residual_budget{0.1};  // cell viscosity-residual assertion
  double tolerance{0.05};       // triangle pairwise agreement

  // Throws std::invalid_argument on malformed JSON, unknown kinds, missing
  // mandatory fields (seed for stochastic kinds) or out-of-range values.
  static ExperimentConfig from_json_text(const std::string& text);
};

struct ExperimentResult {
  bool pass{false};
  // file name -> content, written in order; report.json always present
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::string summary;  // one line per assertion
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

// Create dir (recursively), write every artifact, then manifest.json
// listing name, byte count and FNV-1a hash of each file.
void write_artifacts(
    const std::string& dir,
    const std::vector<std::pair<std::string, std::string>>& artifacts);

}  // namespace wkam
