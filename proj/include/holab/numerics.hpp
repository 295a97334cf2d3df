#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace holab {

constexpr int kMaxDim = 3;

/// Point or vector in R^n, n <= 3, stored inline (no heap allocation).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
/// n x n matrix, n <= 3.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(int n);

/// Surface measure of the unit sphere S^{n-1} (2*pi for n = 2, 4*pi for n = 3).
double sphere_measure(int n);
/// Lebesgue measure of the unit ball B^n.
double ball_volume(int n);

Vec zero_vec(int n);
Vec basis_vec(int n, int axis);

/// Orthonormal vectors spanning the tangent space of the sphere at `pole`.
std::vector<Vec> tangent_frame(const Vec& pole);

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
inline constexpr int kMaxGauss = 64;
/// points in 1..kMaxGauss.
const GaussRule& gauss_legendre(int points);

/// Halton low-discrepancy sequence with a seeded Cranley-Patterson rotation.
class HaltonSequence {
 public:
  HaltonSequence(int dims, std::uint64_t seed);

  /// Point `index` of the sequence, each coordinate in [0, 1).
  void point(std::uint64_t index, std::span<double> out) const;
  int dims() const { return static_cast<int>(shift_.size()); }

 private:
  std::vector<double> shift_;
};

/// Maps a point of [0,1)^{n-1} to the unit sphere (equal-area parametrization).
Vec square_to_sphere(int n, std::span<const double> v);
/// Maps a point of [0,1)^n to the unit ball, uniformly in volume.
Vec cube_to_ball(int n, std::span<const double> v);

/// 2^k as a double for moderately sized integer k.
inline double pow2(int k) { return std::ldexp(1.0, k); }

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

/// Ordinary least-squares fit y = a + b x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Shortest decimal string that round-trips to `v` ("2", "0.5", "1e-09").
std::string format_number(double v);

}  // namespace holab
