#include "wkam/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wkam/aiming.hpp"
#include "wkam/cell_solver.hpp"
#include "wkam/lower_bound.hpp"
#include "wkam/mather.hpp"

namespace wkam {

namespace {

using nlohmann::json;

struct Assertion {
  std::string name;
  bool pass;
  double value;
  double budget;
};

json assertions_json(const std::vector<Assertion>& as, std::string& summary) {
  json arr = json::array();
  for (const Assertion& a : as) {
    arr.push_back({{"name", a.name},
                   {"pass", a.pass},
                   {"value", a.value},
                   {"budget", a.budget}});
    char line[160];
    std::snprintf(line, sizeof(line), "%s %s: %.6g (budget %.6g)\n",
                  a.pass ? "pass" : "FAIL", a.name.c_str(), a.value, a.budget);
    summary += line;
  }
  return arr;
}

bool all_pass(const std::vector<Assertion>& as) {
  for (const Assertion& a : as)
    if (!a.pass) return false;
  return true;
}

TorusPoint start_point(const ExperimentConfig& cfg) {
  if (!cfg.start.empty()) {
    Vec v = Vec::zero(cfg.spec.dim);
    for (int i = 0; i < cfg.spec.dim; ++i) v[i] = cfg.start[static_cast<std::size_t>(i)];
    return wrap(v);
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v = Vec::zero(cfg.spec.dim);
  for (int i = 0; i < cfg.spec.dim; ++i) v[i] = u(rng);
  return wrap(v);
}

ExperimentResult finish(const ExperimentConfig& cfg, json& report,
                        std::vector<Assertion>& as, ExperimentResult& res,
                        std::chrono::steady_clock::time_point t0) {
  report["kind"] = cfg.kind;
  report["lagrangian"] = json::parse(cfg.spec.to_json_text());
  report["assertions"] = assertions_json(as, res.summary);
  res.pass = all_pass(as);
  report["pass"] = res.pass;
  report["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  res.artifacts.emplace_back("report.json", report.dump(2) + "\n");
  return res;
}

ExperimentResult run_cell(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  json report;
  std::vector<Assertion> as;

  CellSolution sol = solve_cell(cfg.spec, cfg.grid);
  report["hbar"] = sol.hbar;
  report["residual_sup"] = sol.residual_sup;
  report["iterations"] = sol.iterations;
  report["dt"] = sol.dt;
  as.push_back({"viscosity-residual", sol.residual_sup <= cfg.residual_budget,
                sol.residual_sup, cfg.residual_budget});
  res.artifacts.emplace_back("phi.csv", field_to_csv(sol.phi));
  return finish(cfg, report, as, res, t0);
}

ExperimentResult run_aim(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  json report;
  std::vector<Assertion> as;

  CellSolution sol = solve_cell(cfg.spec, cfg.grid);
  AimingSchedule sched = AimingSchedule::certified(cfg.spec, sol.phi, cfg.epsilon);
  double kappa = cfg.kappa > 0.0 ? cfg.kappa : sched.kappa;
  double bound = cfg.fineness > 0.0 ? cfg.fineness : sched.delta;
  Partition part = Partition::uniform(cfg.r, bound);
  TorusPoint y = start_point(cfg);

  ControlledProcess proc = simulate(y, sol.phi, kappa, part, cfg.spec, &sched);
  UpperEstimateReport rep =
      upper_estimate_check(proc, sol.phi, sol.hbar, cfg.epsilon, cfg.spec);

  report["hbar"] = sol.hbar;
  report["residual_sup"] = sol.residual_sup;
  report["epsilon"] = cfg.epsilon;
  report["r"] = cfg.r;
  report["kappa"] = kappa;
  report["fineness"] = part.fineness();
  report["steps"] = proc.steps;
  report["certified"] = rep.certified;
  report["average_cost"] = proc.cost / cfg.r;
  report["margin"] = rep.margin;
  report["bound"] = rep.bound;
  report["slack"] = rep.slack;
  report["terms"] = {{"dt", rep.term_dt},
                     {"mod_fineness", rep.term_mod_fineness},
                     {"mod_kappa", rep.term_mod_kappa},
                     {"c2kappa", rep.term_c2kappa}};
  if (!rep.note.empty()) report["note"] = rep.note;
  as.push_back({"upper-estimate", rep.pass, rep.margin, rep.bound + rep.slack});
  res.artifacts.emplace_back("trajectory.csv",
                             process_to_csv(proc, cfg.spec.dim));
  return finish(cfg, report, as, res, t0);
}

ExperimentResult run_lower_fuzz(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  json report;
  std::vector<Assertion> as;

  CellSolution sol = solve_cell(cfg.spec, cfg.grid);
  FuzzReport fz = adversarial_fuzz(cfg.spec, sol.phi, sol.hbar, cfg.r,
                                   cfg.proposals, cfg.seed, cfg.segments);
  double budget = sol.residual_sup * cfg.r + 1e-3 * cfg.r;

  report["hbar"] = sol.hbar;
  report["residual_sup"] = sol.residual_sup;
  report["r"] = cfg.r;
  report["proposals"] = fz.proposals;
  report["min_margin"] = fz.min_margin;
  report["budget"] = budget;
  as.push_back(
      {"lower-estimate", fz.min_margin >= -budget, fz.min_margin, -budget});
  res.artifacts.emplace_back("worst.csv", process_to_csv(fz.worst, cfg.spec.dim));
  return finish(cfg, report, as, res, t0);
}

VelocityBox lattice(const ExperimentConfig& cfg) {
  VelocityBox box;
  box.radius = cfg.vradius;
  box.per_axis = cfg.vnodes;
  return box;
}

ExperimentResult run_mather(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  json report;
  std::vector<Assertion> as;

  MatherSolution sol = solve_mather_lp(cfg.spec, cfg.grid, lattice(cfg),
                                       HolonomyBasis::make(cfg.spec.dim, cfg.modes));
  report["value"] = sol.value;
  report["iterations"] = sol.lp.iterations;
  report["primal_residual"] = sol.lp.primal_residual;
  report["comp_slackness"] = sol.lp.comp_slackness;
  report["status"] = sol.lp.status;
  as.push_back({"primal-feasible", sol.lp.primal_residual <= 1e-7,
                sol.lp.primal_residual, 1e-7});
  as.push_back({"complementary-slackness", sol.lp.comp_slackness <= 1e-6,
                sol.lp.comp_slackness, 1e-6});
  res.artifacts.emplace_back("measure.csv", measure_to_csv(sol.measure));
  return finish(cfg, report, as, res, t0);
}

ExperimentResult run_triangle(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  json report;
  std::vector<Assertion> as;

  // leg 1: the cell problem
  CellSolution cell = solve_cell(cfg.spec, cfg.grid);
  double h_cell = cell.hbar;

  // leg 2: the holonomic-measure LP
  MatherSolution lp =
      solve_mather_lp(cfg.spec, GridSpec::make(cfg.spec.dim, cfg.lp_n),
                      lattice(cfg), HolonomyBasis::make(cfg.spec.dim, cfg.modes));
  double h_lp = -lp.value;

  // leg 3: long-run average cost of a certified aiming trajectory
  AimingSchedule sched = AimingSchedule::certified(cfg.spec, cell.phi, cfg.epsilon);
  Partition part = Partition::uniform(cfg.r, sched.delta);
  ControlledProcess proc =
      simulate(start_point(cfg), cell.phi, sched.kappa, part, cfg.spec, &sched);
  double h_avg = -proc.cost / cfg.r;

  report["hbar_cell"] = h_cell;
  report["hbar_lp"] = h_lp;
  report["hbar_trajectory"] = h_avg;
  report["residual_sup"] = cell.residual_sup;
  report["lp_status"] = lp.lp.status;
  report["steps"] = proc.steps;
  report["certified"] = proc.certified;
  as.push_back({"cell-vs-lp", std::fabs(h_cell - h_lp) <= cfg.tolerance,
                std::fabs(h_cell - h_lp), cfg.tolerance});
  as.push_back({"cell-vs-trajectory", std::fabs(h_cell - h_avg) <= cfg.tolerance,
                std::fabs(h_cell - h_avg), cfg.tolerance});
  as.push_back({"lp-vs-trajectory", std::fabs(h_lp - h_avg) <= cfg.tolerance,
                std::fabs(h_lp - h_avg), cfg.tolerance});
  res.artifacts.emplace_back("phi.csv", field_to_csv(cell.phi));
  res.artifacts.emplace_back("measure.csv", measure_to_csv(lp.measure));
  res.artifacts.emplace_back("trajectory.csv",
                             process_to_csv(proc, cfg.spec.dim));
  return finish(cfg, report, as, res, t0);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);  // parse_error derives from std::exception
  ExperimentConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  if (cfg.kind != "cell" && cfg.kind != "aim" && cfg.kind != "lower-fuzz" &&
      cfg.kind != "mather" && cfg.kind != "triangle")
    throw std::invalid_argument("unknown experiment kind: " + cfg.kind);
  cfg.spec = LagrangianSpec::from_json_text(j.at("lagrangian").dump());
  int n = j.contains("grid") ? j["grid"].value("n", 256) : 256;
  cfg.grid = GridSpec::make(cfg.spec.dim, n);
  if (j.contains("seed")) {
    cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.has_seed = true;
  }
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.r = j.value("r", cfg.r);
  cfg.kappa = j.value("kappa", cfg.kappa);
  cfg.fineness = j.value("fineness", cfg.fineness);
  if (j.contains("start"))
    cfg.start = j["start"].get<std::vector<double>>();
  cfg.proposals = j.value("proposals", cfg.proposals);
  cfg.segments = j.value("segments", cfg.segments);
  cfg.modes = j.value("modes", cfg.modes);
  cfg.vradius = j.value("vradius", cfg.vradius);
  cfg.vnodes = j.value("vnodes", cfg.vnodes);
  cfg.lp_n = j.value("lp_n", cfg.lp_n);
  cfg.residual_budget = j.value("residual_budget", cfg.residual_budget);
  cfg.tolerance = j.value("tolerance", cfg.tolerance);

  if (!(cfg.epsilon > 0.0) || !(cfg.r > 0.0))
    throw std::invalid_argument("epsilon and r must be positive");
  if (cfg.proposals < 1 || cfg.segments < 1 || cfg.segments > 64)
    throw std::invalid_argument("proposals >= 1, 1 <= segments <= 64");
  if (cfg.modes < 0 || !(cfg.vradius > 0.0) || cfg.vnodes < 2 ||
      cfg.vnodes % 2 != 0)
    throw std::invalid_argument("modes >= 0, vradius > 0, vnodes even >= 2");
  if (!cfg.start.empty() &&
      cfg.start.size() != static_cast<std::size_t>(cfg.spec.dim))
    throw std::invalid_argument("start must have one entry per dimension");
  bool stochastic = cfg.kind == "lower-fuzz" ||
                    ((cfg.kind == "aim" || cfg.kind == "triangle") &&
                     cfg.start.empty());
  if (stochastic && !cfg.has_seed)
    throw std::invalid_argument("seed is mandatory for stochastic kinds");
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.kind == "cell") return run_cell(cfg);
  if (cfg.kind == "aim") return run_aim(cfg);
  if (cfg.kind == "lower-fuzz") return run_lower_fuzz(cfg);
  if (cfg.kind == "mather") return run_mather(cfg);
  if (cfg.kind == "triangle") return run_triangle(cfg);
  throw std::invalid_argument("unknown experiment kind: " + cfg.kind);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_artifacts(
    const std::string& dir,
    const std::vector<std::pair<std::string, std::string>>& artifacts) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json manifest;
  manifest["files"] = json::array();
  for (const auto& [name, content] : artifacts) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name + " under " + dir);
    f << content;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    manifest["files"].push_back(
        {{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex}});
  }
  std::ofstream m(fs::path(dir) / "manifest.json", std::ios::binary);
  m << manifest.dump(2) << "\n";
}

}  // namespace wkam
