#include "holab/numerics.hpp"

#include <array>
#include <charconv>
#include <random>
#include <stdexcept>
#include <string>

namespace holab {

void require_dim(int n) {
  if (n < 2 || n > kMaxDim) {
    throw std::invalid_argument("unsupported dimension " + std::to_string(n) +
                                " (supported: 2, 3)");
  }
}

double sphere_measure(int n) {
  require_dim(n);
  return n == 2 ? 2.0 * kPi : 4.0 * kPi;
}

double ball_volume(int n) {
  require_dim(n);
  return n == 2 ? kPi : 4.0 * kPi / 3.0;
}

Vec zero_vec(int n) { return Vec::Zero(n); }

Vec basis_vec(int n, int axis) {
  Vec e = Vec::Zero(n);
  e(axis) = 1.0;
  return e;
}

std::vector<Vec> tangent_frame(const Vec& pole) {
  const int n = static_cast<int>(pole.size());
  if (n == 2) {
    Vec t(2);
    t << -pole(1), pole(0);
    return {t};
  }
  int axis = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(pole(i)) < std::abs(pole(axis))) axis = i;
  }
  Eigen::Vector3d p(pole(0), pole(1), pole(2));
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e(axis) = 1.0;
  Eigen::Vector3d t1 = (e - e.dot(p) * p).normalized();
  Eigen::Vector3d t2 = p.cross(t1);
  Vec a(3), b(3);
  a << t1(0), t1(1), t1(2);
  b << t2(0), t2(1), t2(2);
  return {a, b};
}

namespace {

GaussRule build_gauss(int m) {
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  return rule;
}

constexpr std::array<int, 12> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

const GaussRule& gauss_legendre(int points) {
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> r(kMaxGauss + 1);
    for (int m = 1; m <= kMaxGauss; ++m) r[m] = build_gauss(m);
    return r;
  }();
  if (points < 1 || points > kMaxGauss) {
    throw std::invalid_argument("Gauss-Legendre order out of range");
  }
  return rules[points];
}

HaltonSequence::HaltonSequence(int dims, std::uint64_t seed) {
  if (dims < 1 || dims > static_cast<int>(kPrimes.size())) {
    throw std::invalid_argument("Halton dimension out of range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  shift_.resize(dims);
  for (auto& s : shift_) s = uni(rng);
}

void HaltonSequence::point(std::uint64_t index, std::span<double> out) const {
  for (std::size_t d = 0; d < shift_.size(); ++d) {
    const std::uint64_t base = kPrimes[d];
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double value = 0.0;
    std::uint64_t i = index + 1;
    while (i > 0) {
      value += f * static_cast<double>(i % base);
      i /= base;
      f *= inv;
    }
    value += shift_[d];
    out[d] = value - std::floor(value);
  }
}

Vec square_to_sphere(int n, std::span<const double> v) {
  Vec w(n);
  if (n == 2) {
    double theta = 2.0 * kPi * v[0];
    w << std::cos(theta), std::sin(theta);
    return w;
  }
  double z = 1.0 - 2.0 * v[0];
  double phi = 2.0 * kPi * v[1];
  double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  w << s * std::cos(phi), s * std::sin(phi), z;
  return w;
}

Vec cube_to_ball(int n, std::span<const double> v) {
  double r = std::pow(v[0], 1.0 / n);
  return r * square_to_sphere(n, v.subspan(1));
}

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a == kInf || b == kInf) return kInf;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  LinearFit fit;
  if (m < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = syy - fit.slope * sxy;
  fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  return fit;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace holab
