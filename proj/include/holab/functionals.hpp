#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holab/classify.hpp"
#include "holab/growth.hpp"
#include "holab/qcmap.hpp"
#include "holab/sphere.hpp"

namespace holab {

enum class CriterionId { HPsiSup, BoundaryL1, NtmaxL1, MaxmodIntegral, AreaIntegral, ComponentNtmax, ConeAfSup };
std::string to_string(CriterionId id);

/// Cutoffs eps_1 > eps_2 > ... (distance to the boundary, or boundary angle / pi).
struct Schedule {
  std::vector<double> eps;
  static Schedule dyadic(int depth);
  std::vector<double> u() const;  // log(1/eps_k)
};

struct FunctionalConfig {
  int schedule_depth = 40;
  /// Uniform sphere grid size; 0 picks 1024 (n = 2) or 2048 (n = 3).
  int sphere_resolution = 0;
  /// Gauss-Legendre points per radial layer.
  int radial_points = 8;
  /// Angular nodes per shell in the area integral; 0 picks 256 (n = 2) or 512 (n = 3).
  int area_angular = 0;
  int cone_points = 32;
  int af_budget = 256;
  /// Extra polar-rule levels below the deepest cutoff near a boundary singularity.
  int polar_extra_levels = 8;
  int delta_depth = 16;
  std::uint64_t seed = 1;

  int resolved_sphere(int n) const;
  int resolved_area_angular(int n) const;
};

/// Integrand arguments and weights per cutoff level; a criterion's partials
/// are sum w psi(delta s) over the levels.
struct LevelSample {
  std::vector<double> weights;
  std::vector<double> sizes;
};

struct CriterionSamples {
  CriterionId id = CriterionId::HPsiSup;
  int component = 0;      // 1-based for ComponentNtmax
  std::string mode;       // "quadrature", "analytic", "mc"
  /// Cumulative levels are disjoint pieces of one integral; otherwise each
  /// level is a full integral and partials take the running maximum.
  bool cumulative = true;
  bool uses_delta = true;
  Schedule schedule;
  std::vector<LevelSample> levels;
  std::size_t nodes = 0;
  std::size_t inconclusive_nodes = 0;
};

struct CriterionResult {
  CriterionId id = CriterionId::HPsiSup;
  int component = 0;
  std::string mode;
  double delta = 1.0;
  std::vector<double> u;
  std::vector<double> partials;
  Verdict verdict = Verdict::Inconclusive;
  Classification fit;
  double value = 0.0;  // last partial
  /// Level and integrand argument where psi first overflowed, if it did.
  std::optional<int> overflow_level;
  std::optional<double> overflow_size;
};

CriterionResult evaluate(const CriterionSamples& samples, const GrowthFunction& psi, double delta);

// Sample builders: all map evaluation happens here, once per map.
CriterionSamples hpsi_sup_samples(const QcMap& f, const FunctionalConfig& cfg = {});
CriterionSamples boundary_samples(const QcMap& f, const FunctionalConfig& cfg = {});
CriterionSamples ntmax_samples(const QcMap& f, const FunctionalConfig& cfg = {});
/// Coordinate i is 1-based.
CriterionSamples component_ntmax_samples(const QcMap& f, int i, const FunctionalConfig& cfg = {});
CriterionSamples maxmod_samples(const QcMap& f, const FunctionalConfig& cfg = {},
                                std::optional<Schedule> schedule = std::nullopt);
/// analytic = true uses the conformal factor |f'| for a_f and requires a conformal map.
CriterionSamples area_samples(const QcMap& f, bool analytic, const FunctionalConfig& cfg = {},
                              std::optional<Schedule> schedule = std::nullopt);
CriterionSamples cone_af_samples(const QcMap& f, const FunctionalConfig& cfg = {});

CriterionResult hpsi_sup_integral(const QcMap& f, const GrowthFunction& psi, double delta,
                                  const FunctionalConfig& cfg = {});
CriterionResult boundary_lpsi(const QcMap& f, const GrowthFunction& psi, double delta,
                              const FunctionalConfig& cfg = {});
CriterionResult ntmax_lpsi(const QcMap& f, const GrowthFunction& psi, double delta,
                           const FunctionalConfig& cfg = {});
CriterionResult maxmod_integral(const QcMap& f, const GrowthFunction& psi, double delta,
                                const FunctionalConfig& cfg = {});
/// Analytic |f'| mode when the map is conformal, averaged derivative otherwise.
CriterionResult area_integral(const QcMap& f, const GrowthFunction& psi, const FunctionalConfig& cfg = {});
CriterionResult component_ntmax_lpsi(const QcMap& f, int i, const GrowthFunction& psi,
                                     const FunctionalConfig& cfg = {});
CriterionResult cone_af_sup_lpsi(const QcMap& f, const GrowthFunction& psi, const FunctionalConfig& cfg = {});

struct DeltaScanEntry {
  double delta = 1.0;
  Verdict verdict = Verdict::Inconclusive;
  double value = 0.0;
};

struct DeltaScan {
  std::vector<DeltaScanEntry> entries;  // delta = 2^-j, j = 0..depth, all run
  std::optional<double> first_finite;
  Verdict verdict = Verdict::Inconclusive;  // Finite for some delta, Divergent for all
  bool delta_independent = true;            // all conclusive entries agree
};

DeltaScan delta_scan(const CriterionSamples& samples, const GrowthFunction& psi, int depth = 16);

/// Every criterion's samples for one map, computed once and reused across psi.
struct MapSamples {
  std::string map_name;
  int dim = 2;
  std::vector<CriterionSamples> criteria;
};

MapSamples compute_samples(const QcMap& f, const FunctionalConfig& cfg = {});

struct CriterionReport {
  CriterionResult result;  // at the first finite delta, or delta = 1
  std::optional<DeltaScan> scan;
  Verdict verdict = Verdict::Inconclusive;
  bool binding = true;
  std::string group;  // "theorem1", "theorem2", "lemma8"
};

enum class Membership { In, Out, Inconclusive };
std::string to_string(Membership m);

struct MembershipReport {
  std::string map_name;
  std::string growth_name;
  int dim = 2;
  DoublingReport doubling;
  DoublingReport inverse_doubling;
  std::vector<CriterionReport> criteria;
  Verdict theorem1_verdict = Verdict::Inconclusive;
  bool theorem1_agree = true;
  bool theorem2_agree = true;  // meaningful when both doubling reports are positive
  /// Theorem-1 group and Theorem-2 group disagree while psi or psi^-1 is not doubling.
  bool counterexample_regime = false;
  Membership overall = Membership::Inconclusive;
  std::vector<std::string> flags;
};

MembershipReport membership_report(const MapSamples& samples, const GrowthFunction& psi,
                                   const FunctionalConfig& cfg = {});
MembershipReport membership_report(const QcMap& f, const GrowthFunction& psi, const FunctionalConfig& cfg = {});

/// Noncentered maximal function over caps of radius pi 2^-j (j = 0..levels)
/// centered at grid nodes; Mg >= g at every node.
std::vector<double> hl_maximal(const std::vector<double>& g, const SphereGrid& grid, int levels = 12);

}  // namespace holab
