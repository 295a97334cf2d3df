#include "holab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "holab/parallel.hpp"

namespace holab {

namespace {

constexpr double kGoldenAngle = 2.399963229728653;

/// Quasi-uniform directions in a cap: equally spaced angles (n = 2) or a
/// Fibonacci spiral with z uniform in [cos alpha, 1] (n = 3).
std::vector<Vec> cap_directions(const Cap& e, int count) {
  const int n = static_cast<int>(e.center.size());
  std::vector<Vec> out;
  const double alpha = std::min(e.angular_radius, kPi);
  if (n == 2) {
    double theta0 = std::atan2(e.center(1), e.center(0));
    for (int j = 0; j < count; ++j) {
      double t = theta0 - alpha + 2.0 * alpha * (j + 0.5) / count;
      Vec w(2);
      w << std::cos(t), std::sin(t);
      out.push_back(w);
    }
    return out;
  }
  auto frame = tangent_frame(e.center);
  const double zmin = std::cos(alpha);
  for (int j = 0; j < count; ++j) {
    double z = 1.0 - (1.0 - zmin) * (j + 0.5) / count;
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = j * kGoldenAngle;
    out.push_back(z * e.center + s * (std::cos(phi) * frame[0] + std::sin(phi) * frame[1]));
  }
  return out;
}

std::vector<Vec> segment(const Vec& a, const Vec& b, int vertices) {
  std::vector<Vec> out;
  for (int i = 0; i < vertices; ++i) {
    double t = static_cast<double>(i) / (vertices - 1);
    out.push_back((1.0 - t) * a + t * b);
  }
  return out;
}

struct Incidence {
  std::vector<std::size_t> row_start;
  std::vector<std::uint32_t> cell;
  std::vector<double> length;
  std::vector<std::int64_t> cell_key;  // linear grid index of each compressed cell
  std::vector<int> dims;
  Vec lo;
  double h = 0.0;
};

Incidence build_incidence(const CurveFamily& family, int resolution) {
  const int n = family.dim;
  Incidence inc;
  Vec lo = Vec::Constant(n, kInf), hi = Vec::Constant(n, -kInf);
  for (const auto& c : family.curves) {
    for (const Vec& p : c) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  double side = (hi - lo).maxCoeff();
  if (!(side > 0.0)) throw std::invalid_argument("curve family has an empty bounding box");
  inc.h = side / resolution;
  inc.lo = lo - Vec::Constant(n, 2.0 * inc.h);
  for (int a = 0; a < n; ++a) inc.dims.push_back(static_cast<int>(std::ceil((hi(a) - lo(a)) / inc.h)) + 4);

  std::unordered_map<std::int64_t, std::uint32_t> compress;
  auto key_of = [&](const int* idx) {
    std::int64_t k = 0;
    for (int a = n - 1; a >= 0; --a) k = k * inc.dims[a] + idx[a];
    return k;
  };
  inc.row_start.push_back(0);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (const auto& c : family.curves) {
    row.clear();
    for (std::size_t s = 0; s + 1 < c.size(); ++s) {
      const Vec& p = c[s];
      Vec d = c[s + 1] - p;
      double len = d.norm();
      if (len == 0.0) continue;
      int idx[kMaxDim], step[kMaxDim];
      double tmax[kMaxDim], tdelta[kMaxDim];
      for (int a = 0; a < n; ++a) {
        double x = (p(a) - inc.lo(a)) / inc.h;
        idx[a] = std::clamp(static_cast<int>(std::floor(x)), 0, inc.dims[a] - 1);
        if (d(a) > 0.0) {
          step[a] = 1;
          tmax[a] = ((idx[a] + 1) * inc.h + inc.lo(a) - p(a)) / d(a);
          tdelta[a] = inc.h / d(a);
        } else if (d(a) < 0.0) {
          step[a] = -1;
          tmax[a] = (idx[a] * inc.h + inc.lo(a) - p(a)) / d(a);
          tdelta[a] = -inc.h / d(a);
        } else {
          step[a] = 0;
          tmax[a] = kInf;
          tdelta[a] = kInf;
        }
      }
      double t = 0.0;
      while (t < 1.0) {
        int axis = 0;
        for (int a = 1; a < n; ++a) {
          if (tmax[a] < tmax[axis]) axis = a;
        }
        double next = std::min(tmax[axis], 1.0);
        if (next > t) {
          std::int64_t key = key_of(idx);
          auto [it, fresh] = compress.try_emplace(key, static_cast<std::uint32_t>(inc.cell_key.size()));
          if (fresh) inc.cell_key.push_back(key);
          row.emplace_back(it->second, (next - t) * len);
        }
        t = next;
        if (t >= 1.0) break;
        idx[axis] += step[axis];
        tmax[axis] += tdelta[axis];
        if (idx[axis] < 0 || idx[axis] >= inc.dims[axis]) break;
      }
    }
    std::sort(row.begin(), row.end());
    std::size_t start = inc.cell.size();
    for (const auto& [cell, l] : row) {
      if (inc.cell.size() > start && inc.cell.back() == cell) {
        inc.length.back() += l;
      } else {
        inc.cell.push_back(cell);
        inc.length.push_back(l);
      }
    }
    inc.row_start.push_back(inc.cell.size());
  }
  return inc;
}

class DualProblem {
 public:
  DualProblem(const Incidence& inc, int n) : inc_(inc), n_(n), vol_(std::pow(inc.h, n)) {}

  std::size_t curves() const { return inc_.row_start.size() - 1; }
  std::size_t cells() const { return inc_.cell_key.size(); }

  /// rho(lambda) and the dual objective.
  double rho_of(const std::vector<double>& lambda, std::vector<double>& rho) const {
    rho.assign(cells(), 0.0);
    for (std::size_t i = 0; i < curves(); ++i) {
      if (lambda[i] == 0.0) continue;
      for (std::size_t k = inc_.row_start[i]; k < inc_.row_start[i + 1]; ++k) rho[inc_.cell[k]] += lambda[i] * inc_.length[k];
    }
    double energy = 0.0;
    const double scale = 1.0 / (n_ * vol_);
    for (double& r : rho) {
      r = r > 0.0 ? std::pow(r * scale, 1.0 / (n_ - 1)) : 0.0;
      energy += std::pow(r, n_);
    }
    double sum = 0.0;
    for (double l : lambda) sum += l;
    return sum + (1.0 - n_) * vol_ * energy;
  }

  void line_integrals(const std::vector<double>& rho, std::vector<double>& out) const {
    out.assign(curves(), 0.0);
    for (std::size_t i = 0; i < curves(); ++i) {
      double s = 0.0;
      for (std::size_t k = inc_.row_start[i]; k < inc_.row_start[i + 1]; ++k) s += rho[inc_.cell[k]] * inc_.length[k];
      out[i] = s;
    }
  }

  double energy(const std::vector<double>& rho, double scale) const {
    double e = 0.0;
    for (double r : rho) e += std::pow(scale * r, n_);
    return e * vol_;
  }

 private:
  const Incidence& inc_;
  int n_;
  double vol_;
};

}  // namespace

double exact_radial_modulus(double sigma_e, double r, int n) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("inner radius must lie in (0, 1)");
  return sigma_e * std::pow(std::log(1.0 / r), 1 - n);
}

double ring_modulus_upper(double r, double R, int n) {
  if (!(r > 0.0 && R > r)) throw std::invalid_argument("ring needs 0 < r < R");
  return sphere_measure(n) * std::pow(std::log(R / r), 1 - n);
}

int default_curve_count(int n) { return n == 2 ? 2048 : 4096; }

int default_resolution(int n) { return n == 2 ? 256 : 64; }

int scaled_curve_count(int n, int resolution) {
  double scale = std::pow(static_cast<double>(resolution) / default_resolution(n), n - 1);
  return static_cast<int>(std::lround(default_curve_count(n) * std::max(scale, 1.0)));
}

CurveFamily radial_family(const Cap& e, double r_inner, int curves, int vertices) {
  const int n = static_cast<int>(e.center.size());
  require_dim(n);
  if (curves <= 0) curves = default_curve_count(n);
  if (vertices < 2) throw std::invalid_argument("curves need at least two vertices");
  CurveFamily out;
  out.dim = n;
  out.generator = "radial";
  for (const Vec& w : cap_directions(e, curves)) out.curves.push_back(segment(r_inner * w, w, vertices));
  out.exact_reference = exact_radial_modulus(cap_area(n, std::min(e.angular_radius, kPi)), r_inner, n);
  return out;
}

CurveFamily ring_family(const Vec& center, double r, double R, int curves, int vertices) {
  const int n = static_cast<int>(center.size());
  require_dim(n);
  if (curves <= 0) curves = default_curve_count(n);
  if (vertices < 2) throw std::invalid_argument("curves need at least two vertices");
  CurveFamily out;
  out.dim = n;
  out.generator = "ring";
  Cap all{basis_vec(n, n - 1), kPi};
  for (const Vec& w : cap_directions(all, curves)) out.curves.push_back(segment(center + r * w, center + R * w, vertices));
  out.exact_reference = ring_modulus_upper(r, R, n);
  return out;
}

CurveFamily map_family(const QcMap& f, const CurveFamily& family, double max_segment) {
  if (family.dim != f.dim()) throw std::invalid_argument("map and family dimensions differ");
  CurveFamily out;
  out.dim = family.dim;
  out.generator = "image:" + f.name() + "(" + family.generator + ")";
  out.curves.resize(family.curves.size());
  auto image = [&](const Vec& x) {
    if (x.norm() > 1.0 + 1e-12) throw std::domain_error("curve vertex outside the closed unit ball");
    return f.eval(x.norm() > 1.0 ? Vec(x / x.norm()) : x);
  };
  parallel_for(family.curves.size(), [&](std::size_t c) {
    const auto& curve = family.curves[c];
    auto& poly = out.curves[c];
    if (curve.empty()) return;
    poly.push_back(image(curve[0]));
    for (std::size_t s = 0; s + 1 < curve.size(); ++s) {
      // depth-first bisection of the preimage segment
      std::vector<std::pair<double, double>> stack{{1.0, 0.0}};
      Vec fa = poly.back();
      while (!stack.empty()) {
        auto [hi, lo] = stack.back();
        Vec x = (1.0 - hi) * curve[s] + hi * curve[s + 1];
        Vec fx = image(x);
        if ((fx - fa).norm() > max_segment && hi - lo > 1e-9) {
          stack.back() = {0.5 * (lo + hi), lo};
          stack.insert(stack.end() - 1, {hi, 0.5 * (lo + hi)});
          continue;
        }
        poly.push_back(fx);
        fa = fx;
        stack.pop_back();
      }
    }
  });
  return out;
}

ModulusEstimate numeric_modulus(const CurveFamily& family, const ModulusSolverParams& params) {
  const int n = family.dim;
  require_dim(n);
  if (family.curves.empty()) throw std::invalid_argument("empty curve family");
  ModulusEstimate est;
  est.resolution = params.resolution > 0 ? params.resolution : default_resolution(n);
  Incidence inc = build_incidence(family, est.resolution);
  DualProblem dual(inc, n);
  est.cell_size = inc.h;
  est.cells = dual.cells();
  est.curves = dual.curves();
  est.nonzeros = inc.cell.size();
  est.exact_reference = family.exact_reference;

  const std::size_t m = dual.curves();
  std::vector<double> lambda(m, 0.0), y(m, 0.0), next(m), grad(m), line(m), rho, rho_y, best_rho;
  double best = kInf, best_dual = -kInf, best_scale = 1.0;
  double step = 1.0, momentum = 1.0, prev_dual = -kInf;
  // initial step from the diagonal of A A^T / (2 vol) at n = 2
  {
    double rowmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t k = inc.row_start[i]; k < inc.row_start[i + 1]; ++k) s += inc.length[k] * inc.length[k];
      rowmax = std::max(rowmax, s);
    }
    step = 2.0 * std::pow(inc.h, n) / std::max(rowmax, 1e-300);
  }
  int it = 0;
  for (; it < params.max_iterations; ++it) {
    double gy = dual.rho_of(y, rho_y);
    dual.line_integrals(rho_y, line);
    for (std::size_t i = 0; i < m; ++i) grad[i] = 1.0 - line[i];
    double gnext = 0.0;
    for (int tries = 0; tries < 60; ++tries) {
      double lin = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        next[i] = std::max(0.0, y[i] + step * grad[i]);
        double d = next[i] - y[i];
        lin += grad[i] * d;
        quad += d * d;
      }
      gnext = dual.rho_of(next, rho);
      if (gnext >= gy + lin - quad / (2.0 * step) - 1e-15 * std::abs(gy)) break;
      step *= 0.5;
    }
    // primal candidate: rho(next) scaled to satisfy every constraint
    dual.line_integrals(rho, line);
    double low = *std::min_element(line.begin(), line.end());
    if (low > 0.0) {
      double scale = 1.0 / low;
      double value = dual.energy(rho, scale);
      if (value < best) {
        best = value;
        best_rho = rho;
        best_scale = scale;
      }
    }
    best_dual = std::max(best_dual, gnext);
    if (it % 50 == 0) est.history.push_back(best);
    if (std::isfinite(best) && best - best_dual <= params.tolerance * best) {
      est.converged = true;
      ++it;
      break;
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (gnext < prev_dual) {
      // adaptive restart
      momentum = 1.0;
      y = next;
    } else {
      double beta = (momentum - 1.0) / t_next;
      for (std::size_t i = 0; i < m; ++i) y[i] = std::max(0.0, next[i] + beta * (next[i] - lambda[i]));
      momentum = t_next;
    }
    prev_dual = gnext;
    lambda.swap(next);
    step *= 1.05;
  }
  est.iterations = it;
  est.value = best;
  est.dual_bound = best_dual;
  if (est.exact_reference && std::isfinite(best)) est.relative_error = best / *est.exact_reference - 1.0;
  if (!best_rho.empty()) {
    est.rho.resize(best_rho.size());
    for (std::size_t c = 0; c < best_rho.size(); ++c) est.rho[c] = best_scale * best_rho[c];
    dual.line_integrals(est.rho, line);
    est.min_constraint = *std::min_element(line.begin(), line.end());
    est.cell_centers.reserve(inc.cell_key.size());
    for (std::int64_t key : inc.cell_key) {
      Vec c(n);
      for (int a = 0; a < n; ++a) {
        c(a) = inc.lo(a) + (static_cast<double>(key % inc.dims[a]) + 0.5) * inc.h;
        key /= inc.dims[a];
      }
      est.cell_centers.push_back(c);
    }
  }
  return est;
}

void write_rho_csv(const ModulusEstimate& est, std::ostream& out) {
  const int n = est.cell_centers.empty() ? 2 : static_cast<int>(est.cell_centers[0].size());
  out << (n == 2 ? "x,y,rho\n" : "x,y,z,rho\n");
  char buf[64];
  for (std::size_t c = 0; c < est.rho.size(); ++c) {
    for (int a = 0; a < n; ++a) {
      std::snprintf(buf, sizeof buf, "%.12g,", est.cell_centers[c](a));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g\n", est.rho[c]);
    out << buf;
  }
}

QuasiInvarianceReport quasi_invariance_check(const QcMap& f, const CurveFamily& family,
                                             const ModulusSolverParams& params, double slack) {
  QuasiInvarianceReport rep;
  rep.k_bound = f.k_bound();
  rep.slack = slack;
  rep.original = numeric_modulus(family, params);
  // image segments no longer than half a cell of the image grid
  Vec lo = Vec::Constant(f.dim(), kInf), hi = Vec::Constant(f.dim(), -kInf);
  for (const auto& c : family.curves) {
    for (const Vec& p : c) {
      Vec q = f.eval(p.norm() > 1.0 ? Vec(p / p.norm()) : p);
      lo = lo.cwiseMin(q);
      hi = hi.cwiseMax(q);
    }
  }
  const int res = rep.original.resolution;
  double target = 0.5 * (hi - lo).maxCoeff() / res;
  rep.image = numeric_modulus(map_family(f, family, target), params);
  rep.ratio = rep.image.value / rep.original.value;
  rep.converged = rep.original.converged && rep.image.converged;
  const double bound = rep.k_bound * slack;
  rep.within = rep.ratio >= 1.0 / bound && rep.ratio <= bound;
  return rep;
}

}  // namespace holab
