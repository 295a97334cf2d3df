#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "holab/commands.hpp"

using namespace holab;

namespace {

struct Flags {
  std::optional<int> dim;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> config;
  std::vector<std::string> sets;

  std::optional<std::string> map, psi;
  std::vector<std::string> suites;
  std::optional<std::string> generator, qc_map;
  std::optional<int> resolution, iterations, curves;
  bool rho = false;
  std::optional<std::string> measure;
  std::optional<int> grid;
};

RunConfig build_config(const Flags& f) {
  RunConfig cfg;
  if (f.config) cfg.load_file(*f.config);
  for (const auto& s : f.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.dim) cfg.dim = *f.dim;
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.out) cfg.out = *f.out;
  if (f.map) cfg.map = *f.map;
  if (f.psi) cfg.psi = *f.psi;
  if (f.generator) cfg.modulus_generator = *f.generator;
  if (f.qc_map) cfg.modulus_map = *f.qc_map;
  if (f.resolution) cfg.modulus.resolution = *f.resolution;
  if (f.iterations) cfg.modulus.max_iterations = *f.iterations;
  if (f.curves) cfg.modulus_curves = *f.curves;
  if (f.rho) cfg.modulus_rho_csv = true;
  if (f.measure) cfg.carleson_measure = *f.measure;
  if (f.grid) cfg.carleson_grid = *f.grid;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-Orlicz membership experiments for quasiconformal maps"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--dim", f.dim, "Dimension n (2 or 3)");
  app.add_option("--seed", f.seed, "Seed for every quasi-random stream (mc.seed)");
  app.add_option("--workers", f.workers, "Worker threads");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--config", f.config, "Flat key = value config file");
  app.add_option("--set", f.sets, "Config override key=value (repeatable)");

  auto* analyze = app.add_subcommand("analyze", "Membership report for one map and growth function");
  analyze->add_option("--map", f.map, "Map token, e.g. identity, mobius:0.5,0.3, log1p, stretch:2, translate:2,0@log1p");
  analyze->add_option("--psi", f.psi, "Growth function: power:p, identity, counterexample1..3, expr:<pieces>");

  auto* counter = app.add_subcommand("counterexamples", "Run the three counterexample pairs and check their verdict splits");

  auto* lemmas = app.add_subcommand("lemmas", "Inequality suites over the builtin map matrix");
  lemmas->add_option("suites", f.suites, "Subset of lemma1 lemma2 lemma3 lemma4 lemma6 lemma7 lemma8 thm4");

  auto* modulus = app.add_subcommand("modulus", "Numeric modulus of a curve family");
  modulus->add_option("--generator", f.generator, "ring:r,R or radial:r_inner[,angular_radius]");
  modulus->add_option("--resolution", f.resolution, "Grid cells along the longest box side");
  modulus->add_option("--iterations", f.iterations, "Iteration cap");
  modulus->add_option("--curves", f.curves, "Sampled curves");
  modulus->add_option("--map", f.qc_map, "Also compare with the image family under this map");
  modulus->add_flag("--rho", f.rho, "Write the density to rho.csv");

  auto* carleson = app.add_subcommand("carleson", "Carleson norm of a measure on the ball");
  carleson->add_option("--measure", f.measure, "lebesgue, dyadic:<map>, ratio:<map>:<psi>, points:<csv>");
  carleson->add_option("--grid", f.grid, "Sphere grid size for ball centers");

  for (auto* sub : {analyze, counter, lemmas, modulus, carleson}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig cfg = build_config(f);
    CommandOutcome o;
    if (*analyze) {
      o = cmd_analyze(cfg);
    } else if (*counter) {
      o = cmd_counterexamples(cfg);
    } else if (*lemmas) {
      o = cmd_lemmas(cfg, f.suites);
    } else if (*modulus) {
      o = cmd_modulus(cfg);
    } else {
      o = cmd_carleson(cfg);
    }
    std::cout << o.summary;
    for (const auto& file : o.files) std::cout << "wrote " << (std::filesystem::path(cfg.out) / file).string() << "\n";
    return o.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
