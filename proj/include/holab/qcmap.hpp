#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "holab/numerics.hpp"
#include "holab/sphere.hpp"

namespace holab {

/// Raised when a map violates orientation (J_f <= 0) or another structural requirement.
class InvalidMap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quasiconformal test map on the unit ball B^n.
///
/// Implementations are immutable; every evaluator is pure and may be called
/// from several threads at once.
class QcMap {
 public:
  QcMap(int dim, std::string name, double k_bound);
  virtual ~QcMap() = default;

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  /// Known bound K with |Df|^n <= K J_f.
  double k_bound() const { return k_bound_; }

  virtual Vec eval(const Vec& x) const = 0;
  /// Df(x); the default uses central differences with step 1e-6 (1 - |x|).
  virtual Mat differential(const Vec& x) const;
  virtual double jacobian(const Vec& x) const;
  virtual bool has_analytic_differential() const { return false; }

  /// d(f(x), boundary of f(B^n)) when a closed form is known.
  virtual std::optional<double> analytic_boundary_distance(const Vec& x) const;
  /// |f'(x)| (the conformal stretch factor) for conformal maps.
  virtual std::optional<double> conformal_factor(const Vec& x) const;
  /// Mean of log J_f over the ball B(center, radius), when a closed form or a
  /// one-dimensional reduction is available.
  virtual std::optional<double> mean_log_jacobian(const Vec& center, double radius) const;
  /// y in f(B^n).
  virtual bool image_contains(const Vec& y) const = 0;
  bool omits_origin() const { return !image_contains(zero_vec(dim_)); }
  /// Boundary direction where f is unbounded, if any.
  virtual std::optional<Vec> boundary_singularity() const { return std::nullopt; }

  Mat finite_difference_differential(const Vec& x) const;

 private:
  int dim_;
  std::string name_;
  double k_bound_;
};

using QcMapPtr = std::shared_ptr<const QcMap>;

QcMapPtr make_identity(int n);
/// f(x) + y0 for a base map f.
QcMapPtr make_translate(QcMapPtr base, const Vec& y0);
/// Mobius automorphism of B^n sending a to 0, |a| < 1.
QcMapPtr make_mobius(const Vec& a);
/// log(1 + z) on the unit disk (n = 2), as (log|z+1|, arg(z+1)).
QcMapPtr make_planar_log1p();
/// |x|^(alpha-1) x, alpha > 0.
QcMapPtr make_radial_stretch(int n, double alpha);

/// Map from a CLI token: identity, mobius:ax,ay[,az], log1p, stretch:alpha,
/// translate:y1,y2[,y3][@<inner token>].
QcMapPtr parse_map(std::string_view token, int n);

/// Largest singular value of Df(x). Throws std::domain_error outside the open ball.
double operator_norm_Df(const QcMap& f, const Vec& x);

/// max over quasi-random sample points of |Df|^n / J_f. Throws InvalidMap on J_f <= 0.
double dilatation_check(const QcMap& f, int samples, std::uint64_t seed = 1);

/// Dense sample f((1 - 1e-9) omega) of the image boundary, cached per map.
class ImageBoundarySample {
 public:
  ImageBoundarySample(const QcMap& f, int points);
  double distance(const Vec& y) const;
  /// Distance to the nearest sample plus the sample spacing at that point.
  std::pair<double, double> distance_and_spacing(const Vec& y) const;
  /// Largest gap between neighbouring finite image samples (n = 2, not counting
  /// the gap across a boundary singularity) or the largest nearest-neighbour
  /// distance over a subsample (n = 3).
  double resolution() const { return resolution_; }
  std::size_t size() const { return points_.size(); }

 private:
  double local_spacing(std::size_t i) const;

  int dim_ = 2;
  std::size_t wrap_ = static_cast<std::size_t>(-1);
  std::vector<Vec> points_;
  double resolution_ = 0.0;
};

struct BoundaryDistance {
  double value = 0.0;
  std::string method;      // "analytic" or "boundary-sample"
  double resolution = 0.0; // sample spacing near the closest boundary point; 0 if analytic
};

BoundaryDistance boundary_distance(const QcMap& f, const Vec& x);
BoundaryDistance boundary_distance(const QcMap& f, const Vec& x, const ImageBoundarySample& sample);

struct AvgDerivativeSample {
  Vec x;
  double value = 0.0;
  std::string method;  // "quadrature" (n = 2) or "qmc" (n = 3)
  double std_error = 0.0;
  int evaluations = 0;
};

/// a_f(x) = exp of the mean of (1/n) log J_f over B_x.
AvgDerivativeSample avg_derivative(const QcMap& f, const Vec& x, int budget = 256,
                                   std::uint64_t seed = 1);

/// a_f(x) from the cheapest available source: |f'(x)| for conformal maps, the
/// map's mean_log_jacobian, then avg_derivative.
double averaged_derivative_value(const QcMap& f, const Vec& x, int budget = 256, std::uint64_t seed = 1);

enum class LimitStatus { Converged, Divergent, Inconclusive };
std::string to_string(LimitStatus s);

struct RadialLimit {
  Vec value;
  LimitStatus status = LimitStatus::Inconclusive;
  /// |f(r_k omega)| along r_k = 1 - 2^-k, k = 1..levels.
  std::vector<double> norms;
};

RadialLimit radial_limit(const QcMap& f, const Vec& omega, int levels = 48);

struct MaxModulus {
  double value = 0.0;
  Vec direction;
};

/// sup |f(r omega)| over the grid, refined by golden-section search along great circles.
MaxModulus max_modulus(const QcMap& f, double r, const SphereGrid& grid);

/// Running maximum of |f| (component < 0) or |f_component| over the Whitney balls
/// B_{t_j omega}, t_j = 1 - 2^-j, j = 0..depth; entry j is the sup through depth j.
std::vector<double> cone_sup_profile(const QcMap& f, const Vec& omega, int depth, int component = -1,
                                     int points_per_ball = 32, std::uint64_t seed = 1);

/// Running maximum of g over the same Whitney-ball samples of Gamma(omega).
std::vector<double> cone_sup_profile(int n, const Vec& omega, int depth,
                                     const std::function<double(const Vec&)>& g, int points_per_ball = 32,
                                     std::uint64_t seed = 1);

double nontangential_max(const QcMap& f, const Vec& omega, int depth, int points_per_ball = 32,
                         std::uint64_t seed = 1);
/// Coordinate index i is 1-based.
double component_nontangential_max(const QcMap& f, int i, const Vec& omega, int depth,
                                   int points_per_ball = 32, std::uint64_t seed = 1);

/// diam f(B_x), from the image of a sample of the sphere bounding B_x.
double image_ball_diameter(const QcMap& f, const Vec& x, int samples = 256);

/// Quasi-random points in B^n, in a fixed order for a given seed.
std::vector<Vec> ball_samples(int n, int count, std::uint64_t seed, double max_radius = 1.0);

}  // namespace holab
