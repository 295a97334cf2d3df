#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "holab/functionals.hpp"
#include "holab/lemmas.hpp"
#include "holab/modulus.hpp"

namespace holab {

/// Bad key, unparsable value, or a value below its minimum.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Settings shared by every subcommand. Keys are flat dotted names
/// (`quadrature.sphere_resolution = 512`); later assignments win, so a config
/// file is applied first and command-line flags after it.
struct RunConfig {
  std::string map = "identity";
  std::string psi = "power:1";
  int dim = 2;
  std::uint64_t seed = 1;  // mc.seed
  int workers = 1;
  std::string out = "holab-out";

  FunctionalConfig functional;

  std::string modulus_generator = "ring:1,2.718281828459045";
  std::string modulus_map;  // empty: no quasi-invariance check
  ModulusSolverParams modulus;
  int modulus_curves = 0;
  double modulus_slack = 1.25;
  bool modulus_rho_csv = false;

  std::string carleson_measure = "lebesgue";
  int carleson_grid = 0;
  int carleson_k_max = 40;
  int carleson_af_budget = 64;

  int lemma_samples = 200;
  int lemma1_samples = 1000;
  bool lemma_include_3d = true;

  void set(std::string_view key, std::string_view value);
  /// `key = value` lines; blank lines and `#` comments are skipped.
  void load_text(std::string_view text, const std::string& source = "<config>");
  void load_file(const std::filesystem::path& path);
  /// Throws ConfigError when a resolution or budget is below its minimum.
  void validate() const;

  /// Every key except out and workers with its current value, for provenance.
  nlohmann::ordered_json to_json() const;
  static const std::vector<std::string>& keys();

  FunctionalConfig functional_config() const;
  LemmaConfig lemma_config() const;
};

}  // namespace holab
