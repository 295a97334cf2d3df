#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holab/classify.hpp"
#include "holab/functionals.hpp"
#include "holab/growth.hpp"
#include "holab/numerics.hpp"
#include "holab/qcmap.hpp"
#include "holab/sphere.hpp"

namespace holab {

/// Measure on B^n: a finite list of point masses or a density against Lebesgue measure.
struct BallMeasure {
  enum class Kind { PointMasses, Density };
  Kind kind = Kind::Density;
  int dim = 2;
  std::string name;
  std::vector<Vec> points;
  std::vector<double> masses;
  std::function<double(const Vec&)> density;
  /// Boundary direction where the density concentrates, if any.
  std::optional<Vec> peak;
  /// Multiplies every mass or density value.
  double scale = 1.0;

  double density_at(const Vec& x) const { return scale * density(x); }
  double total_point_mass() const;
};

BallMeasure point_masses(int n, std::vector<Vec> points, std::vector<double> masses, std::string name = "points");
BallMeasure density_measure(int n, std::function<double(const Vec&)> g, std::string name = "density");
BallMeasure lebesgue_measure(int n);
BallMeasure scaled(BallMeasure mu, double c);

/// Masses 2^{-k(n-1)} at the points x_k with |f(x_k)| = M(r_k, f), r_k = 1 - 2^-k, k = 1..k_max.
BallMeasure dyadic_point_measure(const QcMap& f, const SphereGrid& grid, int k_max = 40);

/// Density psi(a_f(x)(1-|x|)) / psi(|f(x)|) / (1-|x|), with a_f from
/// averaged_derivative_value(f, x, af_budget, seed). Throws
/// std::invalid_argument when 0 lies in f(B^n) and std::domain_error if f
/// vanishes at an evaluation point.
BallMeasure ratio_measure(QcMapPtr f, const GrowthFunction& psi, int af_budget = 64, std::uint64_t seed = 1);

struct CarlesonParams {
  int grid_resolution = 0;  // 0 picks 256 (n = 2) or 128 (n = 3)
  /// Ball radii; empty picks 2, 1, 1/2, ..., 2^-12.
  std::vector<double> radii;
  int max_layers = 40;  // dyadic height layers below each ball
  int min_layers = 8;
  double layer_tolerance = 1e-8;
  int radial_points = 4;
  int angular_points = 0;  // 0 picks 16 (n = 2) or 8 (n = 3)
  int azimuth = 8;
};

struct CarlesonEstimate {
  double norm = 0.0;  // sup of mu(B(omega, r) cap B^n) / r^{n-1} over reliable balls
  Vec witness_omega;
  double witness_r = 0.0;
  std::size_t balls = 0;
  std::size_t unreliable_balls = 0;
  std::size_t divergent_balls = 0;
  /// More than 5% of the balls unreliable.
  bool flagged = false;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> radii;
  std::vector<double> per_radius;  // sup over omega at each radius
  /// Sup of the ratio with every ball truncated to its first j + 1 height layers
  /// (density measures only).
  std::vector<double> cutoff_profile;
};

/// Mass of mu in the closed ball B(omega, r) intersected with B^n, with its layer
/// contributions for density measures.
struct BallMass {
  double mass = 0.0;
  std::vector<double> layers;
  bool reliable = true;
  bool divergent = false;
};
BallMass ball_mass(const BallMeasure& mu, const Vec& omega, double r, const CarlesonParams& params = {});

CarlesonEstimate carleson_norm(const BallMeasure& mu, const CarlesonParams& params = {});

std::vector<double> default_carleson_radii();

struct EmbeddingParams {
  /// Empty picks 2^0, ..., 2^-8.
  std::vector<double> deltas;
  FunctionalConfig boundary;  // right-hand side
  int radial_panels = 24;     // left-hand side quadrature for density measures
  int radial_points = 6;
  int angular_resolution = 0;  // 0 picks 512 (n = 2) or 1024 (n = 3)
  int max_exponent = 40;       // C1 search up to 2^max_exponent
  /// Carleson norm used for C2; computed with default parameters when absent.
  std::optional<double> carleson_norm;
  bool check_refinement = true;
};

struct EmbeddingEntry {
  double delta = 1.0;
  double lhs = 0.0;  // at the fitted C1
  double rhs = 0.0;  // integral of psi(delta |f(omega)|) over the sphere
};

struct EmbeddingReport {
  bool vacuous = false;  // some right-hand side is not finite
  Verdict rhs_verdict = Verdict::Finite;
  double carleson_norm = 0.0;
  double c2 = 1.0;  // smallest power of 2 >= max(1, Carleson norm)
  std::optional<double> c1;
  std::optional<double> refined_c1;
  bool stable = false;  // C1 found at both resolutions, within one doubling
  bool holds = false;
  std::vector<EmbeddingEntry> entries;
};

/// Integral of psi(delta |f| / c1) against mu.
double embedding_lhs(const QcMap& f, const GrowthFunction& psi, const BallMeasure& mu, double delta, double c1,
                     const EmbeddingParams& params = {});

EmbeddingReport embedding_check(const QcMap& f, const GrowthFunction& psi, const BallMeasure& mu,
                                const EmbeddingParams& params = {});

}  // namespace holab
