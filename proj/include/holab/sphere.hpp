#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "holab/numerics.hpp"

namespace holab {

/// Nodes and weights on S^{n-1}; weights sum to the sphere measure.
///
/// n = 2: N equally spaced angles 2*pi*(j + 1/2)/N.
/// n = 3: equal-area partition into two polar caps and latitude collars, each
/// cell of area 4*pi/N; collar cell counts follow the recursive zonal rule.
class SphereGrid {
 public:
  static SphereGrid make(int n, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Vec>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const Vec& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double total_weight() const;

  double integrate(const std::function<double(const Vec&)>& g) const;

  /// Index of the node closest to `omega`.
  std::size_t nearest(const Vec& omega) const;

  void write_csv(std::ostream& out) const;

 private:
  int dim_ = 2;
  int resolution_ = 0;
  std::vector<Vec> nodes_;
  std::vector<double> weights_;
};

/// A general quadrature rule on the sphere (not necessarily equal weights).
struct SphereRule {
  int dim = 2;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  /// Measure of the part of the sphere the rule leaves out (the polar rule's tip).
  double excluded_measure = 0.0;
};

SphereRule uniform_rule(const SphereGrid& grid);

/// Rule graded toward `pole`: level k covers polar angles [pi 2^-k, pi 2^-k+1],
/// each level split into two panels of Gauss-Legendre nodes in log(angle).
/// The tip cap of angle pi 2^-levels is excluded. n = 3 adds `azimuth` equally
/// spaced azimuths per ring.
SphereRule polar_rule(const Vec& pole, int levels, int points_per_panel = 8, int azimuth = 32);

/// Geodesic angle between unit vectors, accurate for small angles.
double angle_between(const Vec& a, const Vec& b);

/// Spherical cap S_x: radial projection of the Whitney ball B_x of radius (1-|x|)/2.
struct Cap {
  Vec center;
  double angular_radius = kPi;  // pi means the whole sphere
};

Cap cap_of(const Vec& x);
/// sigma of a cap of the given angular radius on S^{n-1}.
double cap_area(int n, double angular_radius);
/// sigma(S_x); the whole sphere when B_x contains the origin.
double cap_measure(const Vec& x);

/// Whitney ball B_x: center x, radius (1-|x|)/2.
inline double whitney_radius(const Vec& x) { return 0.5 * (1.0 - x.norm()); }

/// omega in S_x.
bool cap_membership(const Vec& omega, const Vec& x);
/// x in Gamma(omega), the union of B_{t omega} over 0 <= t < 1. Closed form:
/// sqrt(3) |x - (x.omega) omega| < 1 - x.omega, or |x| < 1/2 when the
/// nearest ball is the one at the origin. Contains every x with omega in S_x.
bool cone_membership(const Vec& omega, const Vec& x);

/// Gauss-Legendre nodes in u = log 1/(1-r) for integrals over r in [r_inner, r_outer].
struct RadialNode {
  double r = 0.0;
  double u = 0.0;
  double weight = 0.0;  // dr weight
};
std::vector<RadialNode> log_radial_rule(double r_inner, double r_outer, int panels, int points);

/// Outer radius used for integrals that reach the unit sphere.
inline constexpr double kBoundaryCutoff = 1e-12;

struct BallQuadrature {
  double r_inner = 0.0;
  double r_outer = 1.0;
  int radial_panels = 32;
  int radial_points = 8;
  /// n = 2: equally spaced angles; n = 3: quasi-random sphere points per shell.
  int angular_resolution = 1024;
  /// When set, angles follow polar_rule around this direction instead.
  std::optional<Vec> peak;
  int peak_levels = 40;
  std::uint64_t seed = 1;
};

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  bool reliable = true;
  std::size_t nonfinite_nodes = 0;
  std::size_t evaluations = 0;
};

/// Integral of g over {r_inner < |x| < r_outer} in polar coordinates with the
/// log radial substitution; the error estimate compares against a rule with
/// half the radial panels and half the angular nodes.
IntegralEstimate ball_integral(int n, const std::function<double(const Vec&)>& g,
                               const BallQuadrature& q = {});

}  // namespace holab
