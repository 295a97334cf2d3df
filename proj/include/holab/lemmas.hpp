#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "holab/qcmap.hpp"

namespace holab {

enum class SuiteStatus { Pass, Fail, Inconclusive };
std::string to_string(SuiteStatus s);

/// One map (and growth function, where relevant) of an inequality suite.
struct LemmaRow {
  std::string map;
  int dim = 2;
  std::string psi;  // empty when the suite has no growth function
  /// Fitted constant at the base resolution and after one refinement.
  double constant = 0.0;
  double refined_constant = 0.0;
  bool stable = false;
  bool passed = false;
  bool inconclusive = false;
  /// Asserted only when the hypotheses hold; otherwise reported.
  bool asserted = true;
  std::vector<std::pair<std::string, double>> values;
  std::string note;
};

struct LemmaSuite {
  std::string name;
  std::string inequality;
  double stability_tolerance = 0.25;
  SuiteStatus status = SuiteStatus::Inconclusive;
  std::vector<LemmaRow> rows;
};

struct LemmaConfig {
  int samples = 200;          // random points for lemma2, lemma3, lemma4
  int lemma1_samples = 1000;  // random points for lemma1
  std::uint64_t seed = 1;
  bool include_3d = true;
  /// Use only the first k builtin maps in each dimension; 0 keeps all.
  int max_maps_per_dim = 0;
};

const std::vector<std::string>& lemma_suite_names();

/// Builtin maps used by the suites; `omit_origin` translates each so 0 is not in the image.
std::vector<QcMapPtr> builtin_matrix(int n, bool omit_origin);

/// Throws std::invalid_argument for an unknown name.
LemmaSuite run_lemma_suite(const std::string& name, const LemmaConfig& cfg = {});

}  // namespace holab
