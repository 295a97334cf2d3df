#include "holab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace holab {

namespace {

Vec from_z_phi(double z, double phi) {
  double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  Vec w(3);
  w << s * std::cos(phi), s * std::sin(phi), z;
  return w;
}

Vec from_angle(double theta) {
  Vec w(2);
  w << std::cos(theta), std::sin(theta);
  return w;
}

double cap_area_from_angle(double theta) { return 2.0 * kPi * (1.0 - std::cos(theta)); }

}  // namespace

SphereGrid SphereGrid::make(int n, int resolution) {
  require_dim(n);
  if (resolution < 8) throw std::invalid_argument("sphere grid resolution must be >= 8");
  SphereGrid g;
  g.dim_ = n;
  g.resolution_ = resolution;
  if (n == 2) {
    const double w = 2.0 * kPi / resolution;
    for (int j = 0; j < resolution; ++j) {
      g.nodes_.push_back(from_angle(2.0 * kPi * (j + 0.5) / resolution));
      g.weights_.push_back(w);
    }
    return g;
  }

  const int total = resolution;
  const double cell = 4.0 * kPi / total;
  const double polar = std::acos(1.0 - cell / (2.0 * kPi));
  const double ideal_collar = std::sqrt(cell);
  const int collars = std::max(1, static_cast<int>(std::lround((kPi - 2.0 * polar) / ideal_collar)));
  const double fitted = (kPi - 2.0 * polar) / collars;

  std::vector<int> counts = {1};
  double carry = 0.0;
  for (int i = 0; i < collars; ++i) {
    double a = cap_area_from_angle(polar + (i + 1) * fitted) - cap_area_from_angle(polar + i * fitted);
    double ideal = a / cell + carry;
    int m = std::max(1, static_cast<int>(std::lround(ideal)));
    carry = ideal - m;
    counts.push_back(m);
  }
  counts.push_back(1);
  int sum = 0;
  for (int c : counts) sum += c;
  const double w = 4.0 * kPi / sum;

  int before = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const int m = counts[b];
    double z_top = 1.0 - 2.0 * before / sum;
    double z_bot = 1.0 - 2.0 * (before + m) / sum;
    before += m;
    if (b == 0 || b + 1 == counts.size()) {
      Vec pole = Vec::Zero(3);
      pole(2) = b == 0 ? 1.0 : -1.0;
      g.nodes_.push_back(pole);
      g.weights_.push_back(w);
      continue;
    }
    double z = 0.5 * (z_top + z_bot);
    double offset = (b % 2 == 0) ? 0.5 : 0.0;
    for (int k = 0; k < m; ++k) {
      g.nodes_.push_back(from_z_phi(z, 2.0 * kPi * (k + offset) / m));
      g.weights_.push_back(w);
    }
  }
  return g;
}

double SphereGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double SphereGrid::integrate(const std::function<double(const Vec&)>& g) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * g(nodes_[i]);
  return s;
}

std::size_t SphereGrid::nearest(const Vec& omega) const {
  std::size_t best = 0;
  double best_dot = -2.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    double d = nodes_[i].dot(omega);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

void SphereGrid::write_csv(std::ostream& out) const {
  out << (dim_ == 2 ? "index,x,y,weight\n" : "index,x,y,z,weight\n");
  out << std::setprecision(12);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out << i;
    for (int d = 0; d < dim_; ++d) out << ',' << nodes_[i](d);
    out << ',' << weights_[i] << '\n';
  }
}

SphereRule uniform_rule(const SphereGrid& grid) {
  SphereRule r;
  r.dim = grid.dim();
  r.nodes = grid.nodes();
  r.weights = grid.weights();
  return r;
}

SphereRule polar_rule(const Vec& pole, int levels, int points_per_panel, int azimuth) {
  const int n = static_cast<int>(pole.size());
  require_dim(n);
  if (levels < 1) throw std::invalid_argument("polar rule needs at least one level");
  const GaussRule& gl = gauss_legendre(points_per_panel);
  std::vector<Vec> frame = tangent_frame(pole);
  SphereRule rule;
  rule.dim = n;
  for (int k = 1; k <= levels; ++k) {
    double lo = std::log(kPi) - k * std::log(2.0);
    double hi = lo + std::log(2.0);
    for (int panel = 0; panel < 2; ++panel) {
      double a = lo + 0.5 * panel * (hi - lo);
      double b = a + 0.5 * (hi - lo);
      for (int i = 0; i < points_per_panel; ++i) {
        double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
        double t = std::exp(s);
        double w = 0.5 * (b - a) * gl.weights[i] * t;
        double c = std::cos(t), sn = std::sin(t);
        if (n == 2) {
          rule.nodes.push_back(c * pole + sn * frame[0]);
          rule.weights.push_back(w);
          rule.nodes.push_back(c * pole - sn * frame[0]);
          rule.weights.push_back(w);
        } else {
          double wa = w * sn * 2.0 * kPi / azimuth;
          double shift = 0.5 * ((k + panel) % 2);
          for (int j = 0; j < azimuth; ++j) {
            double phi = 2.0 * kPi * (j + shift) / azimuth;
            rule.nodes.push_back(c * pole + sn * (std::cos(phi) * frame[0] + std::sin(phi) * frame[1]));
            rule.weights.push_back(wa);
          }
        }
      }
    }
  }
  rule.excluded_measure = cap_area(n, kPi * std::ldexp(1.0, -levels));
  return rule;
}

double angle_between(const Vec& a, const Vec& b) {
  double dot = a.dot(b);
  double cross;
  if (a.size() == 2) {
    cross = std::abs(a(0) * b(1) - a(1) * b(0));
  } else {
    Eigen::Vector3d u(a(0), a(1), a(2)), v(b(0), b(1), b(2));
    cross = u.cross(v).norm();
  }
  return std::atan2(cross, dot);
}

Cap cap_of(const Vec& x) {
  Cap c;
  double r = x.norm();
  double rho = 0.5 * (1.0 - r);
  if (r <= rho) {
    c.center = basis_vec(static_cast<int>(x.size()), 0);
    c.angular_radius = kPi;
    return c;
  }
  c.center = x / r;
  c.angular_radius = std::asin(rho / r);
  return c;
}

double cap_area(int n, double angular_radius) {
  require_dim(n);
  double a = std::clamp(angular_radius, 0.0, kPi);
  return n == 2 ? 2.0 * a : 2.0 * kPi * (1.0 - std::cos(a));
}

double cap_measure(const Vec& x) {
  if (x.norm() >= 1.0) throw std::domain_error("cap_measure needs |x| < 1");
  return cap_area(static_cast<int>(x.size()), cap_of(x).angular_radius);
}

bool cap_membership(const Vec& omega, const Vec& x) {
  Cap c = cap_of(x);
  if (c.angular_radius >= kPi) return true;
  return angle_between(omega, c.center) < c.angular_radius;
}

bool cone_membership(const Vec& omega, const Vec& x) {
  double a = x.dot(omega);
  double b = (x - a * omega).norm();
  if (a - b / std::sqrt(3.0) < 0.0) return x.norm() < 0.5;
  return std::sqrt(3.0) * b < 1.0 - a;
}

std::vector<RadialNode> log_radial_rule(double r_inner, double r_outer, int panels, int points) {
  if (!(r_inner >= 0.0) || !(r_outer > r_inner) || r_outer > 1.0) {
    throw std::invalid_argument("radial rule needs 0 <= r_inner < r_outer <= 1");
  }
  if (r_outer >= 1.0) r_outer = 1.0 - kBoundaryCutoff;
  const GaussRule& gl = gauss_legendre(points);
  double ua = -std::log1p(-r_inner);
  double ub = -std::log1p(-r_outer);
  double h = (ub - ua) / panels;
  std::vector<RadialNode> out;
  out.reserve(static_cast<std::size_t>(panels) * points);
  for (int p = 0; p < panels; ++p) {
    double mid = ua + (p + 0.5) * h;
    for (int i = 0; i < points; ++i) {
      RadialNode node;
      node.u = mid + 0.5 * h * gl.nodes[i];
      node.r = -std::expm1(-node.u);
      node.weight = 0.5 * h * gl.weights[i] * std::exp(-node.u);
      out.push_back(node);
    }
  }
  return out;
}

namespace {

struct Sum {
  double value = 0.0;
  std::size_t nonfinite = 0;
  std::size_t evaluations = 0;
};

Sum integrate_shells(int n, const std::function<double(const Vec&)>& g,
                     const std::vector<RadialNode>& radial,
                     const std::function<const SphereRule&(std::size_t)>& angular) {
  Sum s;
  for (std::size_t k = 0; k < radial.size(); ++k) {
    const RadialNode& rn = radial[k];
    const SphereRule& rule = angular(k);
    double jac = std::pow(rn.r, n - 1) * rn.weight;
    double shell = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      double v = g(rn.r * rule.nodes[i]);
      ++s.evaluations;
      if (!std::isfinite(v)) {
        ++s.nonfinite;
        continue;
      }
      shell += rule.weights[i] * v;
    }
    s.value += jac * shell;
  }
  return s;
}

SphereRule qmc_rule(int n, int points, std::uint64_t seed, std::uint64_t offset) {
  HaltonSequence seq(n - 1, seed);
  SphereRule rule;
  rule.dim = n;
  double v[2];
  for (int i = 0; i < points; ++i) {
    seq.point(offset + i, std::span<double>(v, n - 1));
    rule.nodes.push_back(square_to_sphere(n, std::span<const double>(v, n - 1)));
    rule.weights.push_back(sphere_measure(n) / points);
  }
  return rule;
}

}  // namespace

IntegralEstimate ball_integral(int n, const std::function<double(const Vec&)>& g,
                               const BallQuadrature& q) {
  require_dim(n);
  if (q.angular_resolution < 8) throw std::invalid_argument("angular resolution must be >= 8");
  auto fine_r = log_radial_rule(q.r_inner, q.r_outer, q.radial_panels, q.radial_points);
  auto coarse_r = log_radial_rule(q.r_inner, q.r_outer, std::max(1, q.radial_panels / 2), q.radial_points);

  SphereRule fixed_fine, fixed_coarse;
  const bool per_shell = !q.peak && n == 3;
  if (q.peak) {
    fixed_fine = polar_rule(*q.peak, q.peak_levels, 8, 32);
    fixed_coarse = polar_rule(*q.peak, q.peak_levels, 4, 16);
  } else if (n == 2) {
    fixed_fine = uniform_rule(SphereGrid::make(2, q.angular_resolution));
    fixed_coarse.dim = 2;
    for (std::size_t i = 0; i < fixed_fine.nodes.size(); i += 2) {
      fixed_coarse.nodes.push_back(fixed_fine.nodes[i]);
      fixed_coarse.weights.push_back(2.0 * fixed_fine.weights[i]);
    }
  }

  const int m = q.angular_resolution;
  SphereRule scratch;
  auto fine_angles = [&](std::size_t k) -> const SphereRule& {
    if (!per_shell) return fixed_fine;
    scratch = qmc_rule(n, m, q.seed, k * static_cast<std::uint64_t>(m));
    return scratch;
  };
  auto coarse_angles = [&](std::size_t k) -> const SphereRule& {
    if (!per_shell) return fixed_coarse;
    scratch = qmc_rule(n, m / 2, q.seed, k * static_cast<std::uint64_t>(m));
    return scratch;
  };

  Sum fine = integrate_shells(n, g, fine_r, fine_angles);
  Sum radial_coarse = integrate_shells(n, g, coarse_r, fine_angles);
  Sum angular_coarse = integrate_shells(n, g, fine_r, coarse_angles);

  IntegralEstimate est;
  est.value = fine.value;
  est.error = std::abs(fine.value - radial_coarse.value) + std::abs(fine.value - angular_coarse.value);
  est.nonfinite_nodes = fine.nonfinite;
  est.reliable = fine.nonfinite == 0 && std::isfinite(fine.value);
  est.evaluations = fine.evaluations + radial_coarse.evaluations + angular_coarse.evaluations;
  return est;
}

}  // namespace holab
