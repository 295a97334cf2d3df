#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "holab/carleson.hpp"
#include "holab/config.hpp"
#include "holab/modulus.hpp"
#include "holab/report.hpp"

namespace holab {

/// Unparsable or inadmissible map, growth function, generator or measure spec.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitError = 4;

struct CommandOutcome {
  int exit_code = kExitOk;
  Json document;
  std::vector<std::string> files;  // written, relative to the output directory
  std::string summary;             // human-readable, one line per item
};

/// report.json, report.csv and plot/<criterion>.csv for (map, psi).
CommandOutcome cmd_analyze(const RunConfig& cfg);
/// The three counterexample pairs; exit 1 with a diff unless every expected verdict is observed.
CommandOutcome cmd_counterexamples(const RunConfig& cfg);
/// Empty selection runs every suite. Exit 3 if any suite is inconclusive, else 1 if any fails.
CommandOutcome cmd_lemmas(const RunConfig& cfg, const std::vector<std::string>& selection);
/// modulus.json, rho.csv on request; exit 1 when a requested quasi-invariance check misses its bracket.
CommandOutcome cmd_modulus(const RunConfig& cfg);
CommandOutcome cmd_carleson(const RunConfig& cfg);

/// `ring:r,R` (about the origin) or `radial:r_inner[,angular_radius]` (cap about e1).
CurveFamily parse_generator(std::string_view spec, int n, int curves = 0);
/// `lebesgue`, `dyadic:<map>`, `ratio:<map>:<psi>` or `points:<csv file>` (rows x,y[,z],mass).
BallMeasure parse_measure(std::string_view spec, const RunConfig& cfg);

}  // namespace holab
