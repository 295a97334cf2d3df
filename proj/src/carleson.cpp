#include "holab/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "holab/parallel.hpp"

namespace holab {

namespace {

struct Node1d {
  double x;
  double w;
};

/// Gauss-Legendre on [a, b]: panels no wider than max_width, or geometrically
/// graded toward b when `graded` (panels of width (b - a) 2^-g down to 2^-levels).
std::vector<Node1d> interval_rule(double a, double b, int points, bool graded, int levels = 30,
                                  double max_width = kPi / 4.0) {
  std::vector<Node1d> out;
  const GaussRule& g = gauss_legendre(points);
  auto panel = [&](double lo, double hi) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      out.push_back({0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[i], 0.5 * (hi - lo) * g.weights[i]});
    }
  };
  if (!graded) {
    const int m = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int i = 0; i < m; ++i) panel(a + (b - a) * i / m, a + (b - a) * (i + 1) / m);
    return out;
  }
  double hi = b;
  for (int l = 1; l <= levels; ++l) {
    double lo = b - (b - a) * std::ldexp(1.0, -l + 1);
    double mid = b - (b - a) * std::ldexp(1.0, -l);
    panel(lo, mid);
    hi = mid;
  }
  panel(hi, b);
  return out;
}

double ratio_power(double r, int n) { return std::pow(r, n - 1); }

}  // namespace

double BallMeasure::total_point_mass() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return scale * s;
}

BallMeasure point_masses(int n, std::vector<Vec> points, std::vector<double> masses, std::string name) {
  require_dim(n);
  if (points.size() != masses.size()) throw std::invalid_argument("points and masses differ in length");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (masses[i] < 0.0) throw std::invalid_argument("negative point mass");
    if (points[i].size() != n || points[i].norm() >= 1.0) throw std::invalid_argument("point mass outside the ball");
  }
  BallMeasure mu;
  mu.kind = BallMeasure::Kind::PointMasses;
  mu.dim = n;
  mu.name = std::move(name);
  mu.points = std::move(points);
  mu.masses = std::move(masses);
  return mu;
}

BallMeasure density_measure(int n, std::function<double(const Vec&)> g, std::string name) {
  require_dim(n);
  BallMeasure mu;
  mu.kind = BallMeasure::Kind::Density;
  mu.dim = n;
  mu.name = std::move(name);
  mu.density = std::move(g);
  return mu;
}

BallMeasure lebesgue_measure(int n) { return density_measure(n, [](const Vec&) { return 1.0; }, "lebesgue"); }

BallMeasure scaled(BallMeasure mu, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("measure scale must be nonnegative");
  mu.scale *= c;
  mu.name = format_number(c) + "*" + mu.name;
  return mu;
}

BallMeasure dyadic_point_measure(const QcMap& f, const SphereGrid& grid, int k_max) {
  const int n = f.dim();
  if (k_max < 1 || k_max > 50) throw std::invalid_argument("k_max must lie in [1, 50]");
  std::vector<Vec> pts(k_max);
  std::vector<double> masses(k_max);
  parallel_for(k_max, [&](std::size_t i) {
    int k = static_cast<int>(i) + 1;
    double r = 1.0 - std::ldexp(1.0, -k);
    pts[i] = r * max_modulus(f, r, grid).direction;
    masses[i] = std::ldexp(1.0, -k * (n - 1));
  });
  return point_masses(n, std::move(pts), std::move(masses), "dyadic:" + f.name());
}

BallMeasure ratio_measure(QcMapPtr f, const GrowthFunction& psi, int af_budget, std::uint64_t seed) {
  if (f->image_contains(zero_vec(f->dim()))) {
    throw std::invalid_argument("ratio measure needs 0 outside f(B^n); translate the map first");
  }
  auto g = [f, psi, af_budget, seed](const Vec& x) {
    double h = 1.0 - x.norm();
    if (!(h > 0.0)) return 0.0;
    double m = f->eval(x).norm();
    if (m == 0.0) throw std::domain_error("map vanishes inside the ball");
    double a = averaged_derivative_value(*f, x, af_budget, seed);
    return eval(psi, a * h) / eval(psi, m) / h;
  };
  BallMeasure mu = density_measure(f->dim(), g, "ratio:" + f->name() + ":" + psi.name());
  mu.peak = f->boundary_singularity();
  return mu;
}

std::vector<double> default_carleson_radii() {
  std::vector<double> r;
  for (int j = -1; j <= 12; ++j) r.push_back(std::ldexp(1.0, -j));
  return r;
}

BallMass ball_mass(const BallMeasure& mu, const Vec& omega, double r, const CarlesonParams& params) {
  const int n = mu.dim;
  BallMass out;
  if (mu.kind == BallMeasure::Kind::PointMasses) {
    for (std::size_t i = 0; i < mu.points.size(); ++i) {
      // closed ball, with rounding-level slack so boundary ties count
      if ((mu.points[i] - omega).norm() <= r * (1.0 + 1e-12)) out.mass += mu.masses[i];
    }
    out.mass *= mu.scale;
    return out;
  }
  const int ang = params.angular_points > 0 ? params.angular_points : (n == 2 ? 16 : 8);
  auto frame = tangent_frame(omega);
  // signed angle of the density peak from omega (n = 2)
  std::optional<double> peak_angle;
  if (mu.peak && n == 2) peak_angle = std::atan2(mu.peak->dot(frame[0]), mu.peak->dot(omega));
  const double H = std::min(r, 1.0);
  const GaussRule& gh = gauss_legendre(params.radial_points);
  double total = 0.0;
  for (int j = 0; j < params.max_layers; ++j) {
    const double a = H * std::ldexp(1.0, -(j + 1)), b = H * std::ldexp(1.0, -j);
    double layer = 0.0;
    for (std::size_t q = 0; q < gh.nodes.size(); ++q) {
      const double h = 0.5 * (a + b) + 0.5 * (b - a) * gh.nodes[q];
      const double wh = 0.5 * (b - a) * gh.weights[q];
      const double rho = 1.0 - h;
      double c = (rho * rho + 1.0 - r * r) / (2.0 * rho);
      if (c >= 1.0) continue;
      const double alpha = std::acos(std::max(-1.0, c));
      double shell = 0.0;
      if (n == 2) {
        std::vector<Node1d> phis;
        if (peak_angle && std::abs(*peak_angle) < alpha) {
          phis = interval_rule(-alpha, *peak_angle, std::max(4, ang / 2), true, 24);
          auto right = interval_rule(*peak_angle, alpha, std::max(4, ang / 2), true, 24);
          for (auto& p : right) p.x = *peak_angle + alpha - p.x;
          phis.insert(phis.end(), right.begin(), right.end());
        } else {
          phis = interval_rule(-alpha, alpha, ang, false);
        }
        for (const auto& p : phis) {
          Vec x = rho * (std::cos(p.x) * omega + std::sin(p.x) * frame[0]);
          shell += p.w * mu.density_at(x);
        }
        shell *= rho;
      } else {
        for (const auto& p : interval_rule(0.0, alpha, ang, false, 0, kPi / 8.0)) {
          double ring = 0.0;
          for (int k = 0; k < params.azimuth; ++k) {
            double t = 2.0 * kPi * (k + 0.5) / params.azimuth;
            Vec x = rho * (std::cos(p.x) * omega +
                           std::sin(p.x) * (std::cos(t) * frame[0] + std::sin(t) * frame[1]));
            ring += mu.density_at(x);
          }
          shell += p.w * std::sin(p.x) * ring * (2.0 * kPi / params.azimuth);
        }
        shell *= rho * rho;
      }
      layer += wh * shell;
    }
    if (!std::isfinite(layer)) {
      out.reliable = false;
      out.mass = layer;
      return out;
    }
    out.layers.push_back(layer);
    total += layer;
    const int done = j + 1;
    if (done >= params.min_layers && layer <= params.layer_tolerance * total &&
        (layer == 0.0 || layer <= 0.75 * out.layers[j - 1])) {
      break;
    }
  }
  out.mass = total;
  const std::size_t L = out.layers.size();
  if (static_cast<int>(L) == params.max_layers) {
    double last = out.layers[L - 1];
    double earlier = L > 8 ? out.layers[L - 9] : out.layers[0];
    if (last > 0.5 * earlier) {
      out.divergent = true;
    } else if (last > 1e-6 * total) {
      out.reliable = false;
    }
  }
  return out;
}

CarlesonEstimate carleson_norm(const BallMeasure& mu, const CarlesonParams& params) {
  const int n = mu.dim;
  const int res = params.grid_resolution > 0 ? params.grid_resolution : (n == 2 ? 256 : 128);
  SphereGrid grid = SphereGrid::make(n, res);
  CarlesonEstimate est;
  est.radii = params.radii.empty() ? default_carleson_radii() : params.radii;
  for (double r : est.radii) {
    if (!(r > 0.0 && r <= 2.0)) throw std::invalid_argument("Carleson radii must lie in (0, 2]");
  }
  const std::size_t nr = est.radii.size();
  est.balls = grid.size() * nr;
  std::vector<BallMass> masses(est.balls);
  parallel_for(est.balls, [&](std::size_t b) {
    masses[b] = ball_mass(mu, grid.node(b / nr), est.radii[b % nr], params);
  });
  est.per_radius.assign(nr, 0.0);
  est.witness_omega = grid.node(0);
  est.witness_r = est.radii[0];
  const bool density = mu.kind == BallMeasure::Kind::Density;
  if (density) est.cutoff_profile.assign(params.max_layers, 0.0);
  for (std::size_t b = 0; b < est.balls; ++b) {
    const BallMass& m = masses[b];
    const double scale = ratio_power(est.radii[b % nr], n);
    if (m.divergent) ++est.divergent_balls;
    if (!m.reliable) ++est.unreliable_balls;
    if (density && (m.reliable || m.divergent)) {
      double partial = 0.0;
      for (int j = 0; j < params.max_layers; ++j) {
        if (j < static_cast<int>(m.layers.size())) partial += m.layers[j];
        est.cutoff_profile[j] = std::max(est.cutoff_profile[j], partial / scale);
      }
    }
    if (!m.reliable || m.divergent) continue;
    double ratio = m.mass / scale;
    est.per_radius[b % nr] = std::max(est.per_radius[b % nr], ratio);
    if (ratio > est.norm) {
      est.norm = ratio;
      est.witness_omega = grid.node(b / nr);
      est.witness_r = est.radii[b % nr];
    }
  }
  est.flagged = est.unreliable_balls > 0.05 * est.balls;
  if (est.divergent_balls > 0) {
    est.verdict = Verdict::Divergent;
  } else if (est.flagged) {
    est.verdict = Verdict::Inconclusive;
  } else {
    est.verdict = Verdict::Finite;
  }
  return est;
}

namespace {

struct LhsNodes {
  std::vector<double> weight;  // quadrature weight times mass or density
  std::vector<double> size;    // |f(x)|
};

LhsNodes lhs_nodes(const QcMap& f, const BallMeasure& mu, const EmbeddingParams& params, int refine) {
  LhsNodes out;
  if (mu.kind == BallMeasure::Kind::PointMasses) {
    for (std::size_t i = 0; i < mu.points.size(); ++i) {
      out.weight.push_back(mu.scale * mu.masses[i]);
      out.size.push_back(f.eval(mu.points[i]).norm());
    }
    return out;
  }
  const int n = mu.dim;
  int ang = params.angular_resolution > 0 ? params.angular_resolution : (n == 2 ? 512 : 1024);
  SphereRule rule = mu.peak ? polar_rule(*mu.peak, 40, 8 * refine, 32 * refine)
                            : uniform_rule(SphereGrid::make(n, ang * refine));
  auto radial = log_radial_rule(0.0, 1.0 - kBoundaryCutoff, params.radial_panels * refine, params.radial_points);
  const std::size_t na = rule.nodes.size();
  out.weight.resize(radial.size() * na);
  out.size.resize(radial.size() * na);
  parallel_for(radial.size(), [&](std::size_t i) {
    const RadialNode& rn = radial[i];
    const double wr = rn.weight * std::pow(rn.r, n - 1);
    for (std::size_t k = 0; k < na; ++k) {
      Vec x = rn.r * rule.nodes[k];
      out.weight[i * na + k] = wr * rule.weights[k] * mu.density_at(x);
      out.size[i * na + k] = f.eval(x).norm();
    }
  });
  return out;
}

double lhs_value(const LhsNodes& nodes, const GrowthFunction& psi, double delta, double c1) {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.weight.size(); ++i) {
    if (nodes.weight[i] != 0.0) s += nodes.weight[i] * eval(psi, delta * nodes.size[i] / c1);
  }
  return s;
}

std::optional<double> fit_c1(const LhsNodes& nodes, const GrowthFunction& psi, const std::vector<double>& deltas,
                             const std::vector<double>& rhs, double c2, int max_exponent) {
  for (int a = 0; a <= max_exponent; ++a) {
    double c1 = std::ldexp(1.0, a);
    bool ok = true;
    for (std::size_t d = 0; d < deltas.size() && ok; ++d) {
      ok = lhs_value(nodes, psi, deltas[d], c1) <= c2 * rhs[d] * (1.0 + 1e-12);
    }
    if (ok) return c1;
  }
  return std::nullopt;
}

}  // namespace

double embedding_lhs(const QcMap& f, const GrowthFunction& psi, const BallMeasure& mu, double delta, double c1,
                     const EmbeddingParams& params) {
  return lhs_value(lhs_nodes(f, mu, params, 1), psi, delta, c1);
}

EmbeddingReport embedding_check(const QcMap& f, const GrowthFunction& psi, const BallMeasure& mu,
                                const EmbeddingParams& params) {
  if (f.dim() != mu.dim) throw std::invalid_argument("map and measure dimensions differ");
  EmbeddingReport rep;
  std::vector<double> deltas = params.deltas;
  if (deltas.empty()) {
    for (int j = 0; j <= 8; ++j) deltas.push_back(std::ldexp(1.0, -j));
  }
  auto rhs_at = [&](const FunctionalConfig& cfg, std::vector<double>& rhs) {
    rhs.clear();
    for (double d : deltas) {
      CriterionResult res = boundary_lpsi(f, psi, d, cfg);
      if (res.verdict != Verdict::Finite) {
        rep.rhs_verdict = res.verdict;
        return false;
      }
      rhs.push_back(res.value);
    }
    return true;
  };
  std::vector<double> rhs;
  if (!rhs_at(params.boundary, rhs)) {
    rep.vacuous = true;
    return rep;
  }
  rep.carleson_norm = params.carleson_norm ? *params.carleson_norm : carleson_norm(mu).norm;
  rep.c2 = 1.0;
  while (rep.c2 < rep.carleson_norm) rep.c2 *= 2.0;

  LhsNodes nodes = lhs_nodes(f, mu, params, 1);
  rep.c1 = fit_c1(nodes, psi, deltas, rhs, rep.c2, params.max_exponent);
  const double c1 = rep.c1 ? *rep.c1 : std::ldexp(1.0, params.max_exponent);
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    rep.entries.push_back({deltas[d], lhs_value(nodes, psi, deltas[d], c1), rhs[d]});
  }
  rep.holds = rep.c1.has_value();
  if (params.check_refinement) {
    FunctionalConfig fine = params.boundary;
    fine.sphere_resolution = 2 * (fine.sphere_resolution > 0 ? fine.sphere_resolution : (f.dim() == 2 ? 1024 : 2048));
    std::vector<double> rhs_fine;
    if (rhs_at(fine, rhs_fine)) {
      rep.refined_c1 = fit_c1(lhs_nodes(f, mu, params, 2), psi, deltas, rhs_fine, rep.c2, params.max_exponent);
    }
    rep.stable = rep.c1 && rep.refined_c1 && std::abs(std::log2(*rep.c1 / *rep.refined_c1)) <= 1.0;
  }
  return rep;
}

}  // namespace holab
