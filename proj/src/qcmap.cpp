#include "holab/qcmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace holab {

namespace {

constexpr double kGolden = 0.6180339887498949;

void require_inside(const Vec& x) {
  if (!(x.norm() < 1.0)) throw std::domain_error("point outside the open unit ball");
}

/// Maximizer of g on [a, b] by golden-section search.
template <class G>
double golden_max(G g, double a, double b, int iterations = 60) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < iterations; ++i) {
    if (gc < gd) {
      a = c;
      c = d;
      gc = gd;
      d = a + kGolden * (b - a);
      gd = g(d);
    } else {
      b = d;
      d = c;
      gd = gc;
      c = b - kGolden * (b - a);
      gc = g(c);
    }
  }
  return gc > gd ? c : d;
}

std::string vec_token(const Vec& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_number(v(i));
  }
  return s;
}

Vec parse_vec(std::string_view text, int n, std::string_view what) {
  std::vector<double> vals;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw std::invalid_argument("bad number '" + item + "' in " + std::string(what));
    }
    vals.push_back(v);
  }
  if (vals.empty() || static_cast<int>(vals.size()) > n) {
    throw std::invalid_argument(std::string(what) + " needs 1.." + std::to_string(n) + " coordinates");
  }
  Vec out = Vec::Zero(n);
  for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<int>(i)) = vals[i];
  return out;
}

class IdentityMap final : public QcMap {
 public:
  explicit IdentityMap(int n) : QcMap(n, "identity", 1.0) {}
  Vec eval(const Vec& x) const override { return x; }
  Mat differential(const Vec& x) const override { return Mat::Identity(x.size(), x.size()); }
  double jacobian(const Vec&) const override { return 1.0; }
  bool has_analytic_differential() const override { return true; }
  std::optional<double> analytic_boundary_distance(const Vec& x) const override {
    return 1.0 - x.norm();
  }
  std::optional<double> conformal_factor(const Vec&) const override { return 1.0; }
  bool image_contains(const Vec& y) const override { return y.norm() < 1.0; }
};

class TranslateMap final : public QcMap {
 public:
  TranslateMap(QcMapPtr base, Vec y0, std::string name)
      : QcMap(base->dim(), std::move(name), base->k_bound()), base_(std::move(base)), y0_(std::move(y0)) {}
  Vec eval(const Vec& x) const override { return base_->eval(x) + y0_; }
  Mat differential(const Vec& x) const override { return base_->differential(x); }
  double jacobian(const Vec& x) const override { return base_->jacobian(x); }
  bool has_analytic_differential() const override { return base_->has_analytic_differential(); }
  std::optional<double> analytic_boundary_distance(const Vec& x) const override {
    return base_->analytic_boundary_distance(x);
  }
  std::optional<double> conformal_factor(const Vec& x) const override {
    return base_->conformal_factor(x);
  }
  std::optional<double> mean_log_jacobian(const Vec& center, double radius) const override {
    return base_->mean_log_jacobian(center, radius);
  }
  bool image_contains(const Vec& y) const override { return base_->image_contains(y - y0_); }
  std::optional<Vec> boundary_singularity() const override { return base_->boundary_singularity(); }

 private:
  QcMapPtr base_;
  Vec y0_;
};

class MobiusMap final : public QcMap {
 public:
  explicit MobiusMap(Vec a)
      : QcMap(static_cast<int>(a.size()), "mobius:" + vec_token(a), 1.0), a_(std::move(a)), a2_(a_.squaredNorm()) {}

  Vec eval(const Vec& x) const override {
    Vec d = x - a_;
    return ((1.0 - a2_) * d - d.squaredNorm() * a_) / denom(x);
  }
  Mat differential(const Vec& x) const override {
    const int n = static_cast<int>(x.size());
    Vec d = x - a_;
    Vec num = (1.0 - a2_) * d - d.squaredNorm() * a_;
    Mat dnum = (1.0 - a2_) * Mat::Identity(n, n) - 2.0 * a_ * d.transpose();
    double den = denom(x);
    Vec grad = -2.0 * a_ + 2.0 * a2_ * x;
    return (dnum * den - num * grad.transpose()) / (den * den);
  }
  double jacobian(const Vec& x) const override {
    return std::pow(*conformal_factor(x), static_cast<double>(dim()));
  }
  bool has_analytic_differential() const override { return true; }
  std::optional<double> analytic_boundary_distance(const Vec& x) const override {
    return 1.0 - eval(x).norm();
  }
  std::optional<double> conformal_factor(const Vec& x) const override {
    return (1.0 - a2_) / denom(x);
  }
  bool image_contains(const Vec& y) const override { return y.norm() < 1.0; }

 private:
  double denom(const Vec& x) const { return 1.0 - 2.0 * x.dot(a_) + x.squaredNorm() * a2_; }
  Vec a_;
  double a2_;
};

class PlanarLog1p final : public QcMap {
 public:
  PlanarLog1p() : QcMap(2, "log1p", 1.0) {}

  Vec eval(const Vec& x) const override {
    double re = x(0) + 1.0, im = x(1);
    Vec y(2);
    y << 0.5 * std::log(re * re + im * im), std::atan2(im, re);
    return y;
  }
  Mat differential(const Vec& x) const override {
    double re = x(0) + 1.0, im = x(1);
    double m = re * re + im * im;
    double a = re / m, b = -im / m;  // 1/(z+1)
    Mat d(2, 2);
    d << a, -b, b, a;
    return d;
  }
  double jacobian(const Vec& x) const override {
    double re = x(0) + 1.0, im = x(1);
    return 1.0 / (re * re + im * im);
  }
  bool has_analytic_differential() const override { return true; }
  std::optional<double> conformal_factor(const Vec& x) const override {
    double re = x(0) + 1.0, im = x(1);
    return 1.0 / std::hypot(re, im);
  }
  bool image_contains(const Vec& y) const override {
    if (!(std::abs(y(1)) < 0.5 * kPi)) return false;
    double e = std::exp(y(0));
    return std::hypot(e * std::cos(y(1)) - 1.0, e * std::sin(y(1))) < 1.0;
  }
  std::optional<Vec> boundary_singularity() const override { return -basis_vec(2, 0); }

  // The image boundary is the curve (log(2 cos s), s), |s| < pi/2. With
  // s = +-(pi/2 - e^v) the far ends of the curve stay resolved in v.
  std::optional<double> analytic_boundary_distance(const Vec& x) const override {
    Vec y = eval(x);
    auto dist = [&](double v, double sign) {
      double e = std::exp(v);
      double bx = std::log(2.0 * std::sin(e));
      double by = sign * (0.5 * kPi - e);
      return std::hypot(y(0) - bx, y(1) - by);
    };
    const double v_hi = std::log(0.5 * kPi);
    const double v_lo = -45.0;
    const int samples = 2048;
    const double h = (v_hi - v_lo) / (samples - 1);
    double best = kInf;
    for (double sign : {-1.0, 1.0}) {
      int arg = 0;
      double local = kInf;
      for (int i = 0; i < samples; ++i) {
        double d = dist(v_lo + i * h, sign);
        if (d < local) {
          local = d;
          arg = i;
        }
      }
      double a = v_lo + std::max(0, arg - 1) * h;
      double b = v_lo + std::min(samples - 1, arg + 1) * h;
      double v = golden_max([&](double t) { return -dist(t, sign); }, a, b, 80);
      best = std::min({best, local, dist(v, sign)});
    }
    return best;
  }
};

/// Mean of log|y| over a ball of radius rho whose center is at distance d from 0.
double mean_log_norm(int n, double d, double rho) {
  if (n == 2) {
    // log|y| is harmonic off 0; inside, the logarithmic potential of a uniform disk
    if (d >= rho) return std::log(d);
    return std::log(rho) - 0.5 + 0.5 * d * d / (rho * rho);
  }
  // shell-area reduction: area of {|y| = s} inside the ball, integrated against log s
  const GaussRule& g = gauss_legendre(32);
  auto panel = [&](double a, double b, auto&& area) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      double s = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i];
      sum += 0.5 * (b - a) * g.weights[i] * std::log(s) * area(s);
    }
    return sum;
  };
  auto partial = [&](double s) { return kPi * s * (rho * rho - (s - d) * (s - d)) / d; };
  auto full = [&](double s) { return 4.0 * kPi * s * s; };
  double total = 0.0;
  if (d >= rho) {
    total = panel(d - rho, d + rho, partial);
  } else {
    const double inner = rho - d;
    // graded panels toward s = 0 for the s^2 log s factor
    double hi = inner;
    for (int k = 0; k < 20; ++k) {
      total += panel(0.5 * hi, hi, full);
      hi *= 0.5;
    }
    total += panel(0.0, hi, full);
    if (d > 0.0) total += panel(inner, rho + d, partial);
  }
  return total / (4.0 / 3.0 * kPi * rho * rho * rho);
}

class RadialStretch final : public QcMap {
 public:
  RadialStretch(int n, double alpha)
      : QcMap(n, "stretch:" + format_number(alpha), std::pow(std::max(alpha, 1.0 / alpha), n - 1)),
        alpha_(alpha) {}

  Vec eval(const Vec& x) const override {
    double r = x.norm();
    if (r == 0.0) return x;
    return std::pow(r, alpha_ - 1.0) * x;
  }
  Mat differential(const Vec& x) const override {
    const int n = static_cast<int>(x.size());
    double r = x.norm();
    if (r == 0.0) return (alpha_ == 1.0 ? 1.0 : 0.0) * Mat::Identity(n, n);
    Vec u = x / r;
    return std::pow(r, alpha_ - 1.0) * (Mat::Identity(n, n) + (alpha_ - 1.0) * u * u.transpose());
  }
  double jacobian(const Vec& x) const override {
    double r = x.norm();
    return alpha_ * std::pow(r, dim() * (alpha_ - 1.0));
  }
  bool has_analytic_differential() const override { return true; }
  std::optional<double> analytic_boundary_distance(const Vec& x) const override {
    return 1.0 - std::pow(x.norm(), alpha_);
  }
  std::optional<double> conformal_factor(const Vec&) const override {
    if (alpha_ == 1.0) return 1.0;
    return std::nullopt;
  }
  // log J = log alpha + n (alpha - 1) log|y|
  std::optional<double> mean_log_jacobian(const Vec& center, double radius) const override {
    return std::log(alpha_) + dim() * (alpha_ - 1.0) * mean_log_norm(dim(), center.norm(), radius);
  }
  bool image_contains(const Vec& y) const override { return y.norm() < 1.0; }

 private:
  double alpha_;
};

}  // namespace

QcMap::QcMap(int dim, std::string name, double k_bound)
    : dim_(dim), name_(std::move(name)), k_bound_(k_bound) {
  require_dim(dim);
}

Mat QcMap::finite_difference_differential(const Vec& x) const {
  const int n = dim_;
  double h = 1e-6 * (1.0 - x.norm());
  Mat d(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e = basis_vec(n, j) * h;
    d.col(j) = (eval(x + e) - eval(x - e)) / (2.0 * h);
  }
  return d;
}

Mat QcMap::differential(const Vec& x) const { return finite_difference_differential(x); }

double QcMap::jacobian(const Vec& x) const { return differential(x).determinant(); }

std::optional<double> QcMap::analytic_boundary_distance(const Vec&) const { return std::nullopt; }

std::optional<double> QcMap::mean_log_jacobian(const Vec&, double) const { return std::nullopt; }

std::optional<double> QcMap::conformal_factor(const Vec&) const { return std::nullopt; }

QcMapPtr make_identity(int n) { return std::make_shared<IdentityMap>(n); }

QcMapPtr make_translate(QcMapPtr base, const Vec& y0) {
  if (y0.size() != base->dim()) throw std::invalid_argument("translation vector has wrong dimension");
  std::string name = "translate:" + vec_token(y0);
  if (base->name() != "identity") name += "@" + base->name();
  return std::make_shared<TranslateMap>(std::move(base), y0, std::move(name));
}

QcMapPtr make_mobius(const Vec& a) {
  require_dim(static_cast<int>(a.size()));
  if (!(a.norm() < 1.0)) throw std::invalid_argument("mobius parameter needs |a| < 1");
  return std::make_shared<MobiusMap>(a);
}

QcMapPtr make_planar_log1p() { return std::make_shared<PlanarLog1p>(); }

QcMapPtr make_radial_stretch(int n, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("radial stretch needs alpha > 0");
  }
  return std::make_shared<RadialStretch>(n, alpha);
}

QcMapPtr parse_map(std::string_view token, int n) {
  require_dim(n);
  auto starts = [&](std::string_view p) { return token.substr(0, p.size()) == p; };
  if (token == "identity") return make_identity(n);
  if (token == "log1p") {
    if (n != 2) throw std::invalid_argument("log1p is a planar map (dimension 2 only)");
    return make_planar_log1p();
  }
  if (starts("mobius:")) return make_mobius(parse_vec(token.substr(7), n, "mobius"));
  if (starts("stretch:")) {
    Vec a = parse_vec(token.substr(8), 1, "stretch");
    return make_radial_stretch(n, a(0));
  }
  if (starts("translate:")) {
    std::string_view rest = token.substr(10);
    std::size_t at = rest.find('@');
    QcMapPtr base = at == std::string_view::npos ? make_identity(n) : parse_map(rest.substr(at + 1), n);
    return make_translate(base, parse_vec(rest.substr(0, at), n, "translate"));
  }
  throw std::invalid_argument("unknown map '" + std::string(token) + "'");
}

double operator_norm_Df(const QcMap& f, const Vec& x) {
  require_inside(x);
  Eigen::JacobiSVD<Mat> svd(f.differential(x));
  return svd.singularValues()(0);
}

std::vector<Vec> ball_samples(int n, int count, std::uint64_t seed, double max_radius) {
  HaltonSequence seq(n, seed);
  std::vector<Vec> out;
  out.reserve(count);
  double v[3];
  for (int i = 0; i < count; ++i) {
    seq.point(i, std::span<double>(v, n));
    out.push_back(max_radius * cube_to_ball(n, std::span<const double>(v, n)));
  }
  return out;
}

double dilatation_check(const QcMap& f, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("dilatation_check needs samples >= 1");
  double worst = 0.0;
  for (const Vec& x : ball_samples(f.dim(), samples, seed)) {
    double j = f.jacobian(x);
    if (!(j > 0.0)) {
      throw InvalidMap("J_f <= 0 for " + f.name() + " at a sample point");
    }
    double norm = operator_norm_Df(f, x);
    worst = std::max(worst, std::pow(norm, f.dim()) / j);
  }
  return worst;
}

ImageBoundarySample::ImageBoundarySample(const QcMap& f, int points) : dim_(f.dim()) {
  auto grid = SphereGrid::make(dim_, points);
  auto singular = f.boundary_singularity();
  std::size_t wrap = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Vec y = f.eval((1.0 - 1e-9) * grid.node(i));
    if (!y.allFinite()) continue;
    points_.push_back(y);
  }
  if (points_.empty()) throw InvalidMap("image boundary sample of " + f.name() + " is empty");
  if (dim_ == 2) {
    if (singular) {
      // split the closed curve at the sample pair straddling the singular direction
      double best = -2.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec& a = grid.node(i);
        const Vec& b = grid.node((i + 1) % grid.size());
        Vec mid = (a + b).normalized();
        if (mid.dot(*singular) > best) {
          best = mid.dot(*singular);
          wrap = i;
        }
      }
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (i == wrap) continue;
      resolution_ = std::max(resolution_, (points_[i] - points_[(i + 1) % points_.size()]).norm());
    }
    wrap_ = wrap;
  } else {
    std::size_t stride = std::max<std::size_t>(1, points_.size() / 200);
    for (std::size_t i = 0; i < points_.size(); i += stride) resolution_ = std::max(resolution_, local_spacing(i));
  }
}

double ImageBoundarySample::local_spacing(std::size_t i) const {
  const std::size_t m = points_.size();
  if (dim_ == 2) {
    double s = 0.0;
    if (i != wrap_) s = std::max(s, (points_[i] - points_[(i + 1) % m]).norm());
    std::size_t prev = (i + m - 1) % m;
    if (prev != wrap_) s = std::max(s, (points_[i] - points_[prev]).norm());
    return s;
  }
  double nearest = kInf;
  for (std::size_t j = 0; j < m; ++j) {
    if (j != i) nearest = std::min(nearest, (points_[i] - points_[j]).norm());
  }
  return nearest;
}

std::pair<double, double> ImageBoundarySample::distance_and_spacing(const Vec& y) const {
  double best = kInf;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double d = (points_[i] - y).squaredNorm();
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return {std::sqrt(best), local_spacing(arg)};
}

double ImageBoundarySample::distance(const Vec& y) const { return distance_and_spacing(y).first; }

BoundaryDistance boundary_distance(const QcMap& f, const Vec& x) {
  require_inside(x);
  if (auto d = f.analytic_boundary_distance(x)) return {*d, "analytic", 0.0};
  ImageBoundarySample sample(f, f.dim() == 2 ? 100000 : 10000);
  return boundary_distance(f, x, sample);
}

BoundaryDistance boundary_distance(const QcMap& f, const Vec& x, const ImageBoundarySample& sample) {
  require_inside(x);
  auto [d, spacing] = sample.distance_and_spacing(f.eval(x));
  return {d, "boundary-sample", spacing};
}

namespace {

double checked_log_jacobian(const QcMap& f, const Vec& y) {
  double j = f.jacobian(y);
  if (!(j > 0.0)) throw InvalidMap("J_f <= 0 for " + f.name() + " inside a Whitney ball");
  return std::log(j);
}

// Mean of log J_f over the disk B(x, rho) by a Gauss-Legendre x uniform-angle product rule.
double planar_mean_log_jacobian(const QcMap& f, const Vec& x, double rho, int radial, int angular) {
  const GaussRule& gl = gauss_legendre(radial);
  double sum = 0.0;
  for (int i = 0; i < radial; ++i) {
    double s = 0.5 * rho * (gl.nodes[i] + 1.0);
    double w = 0.5 * rho * gl.weights[i] * s * (2.0 * kPi / angular);
    for (int k = 0; k < angular; ++k) {
      double th = 2.0 * kPi * (k + 0.5) / angular;
      Vec y(2);
      y << x(0) + s * std::cos(th), x(1) + s * std::sin(th);
      sum += w * checked_log_jacobian(f, y);
    }
  }
  return sum / (kPi * rho * rho);
}

}  // namespace

double averaged_derivative_value(const QcMap& f, const Vec& x, int budget, std::uint64_t seed) {
  if (auto c = f.conformal_factor(x)) return *c;
  if (x.norm() < 1.0) {
    if (auto m = f.mean_log_jacobian(x, whitney_radius(x))) return std::exp(*m / f.dim());
  }
  return avg_derivative(f, x, budget, seed).value;
}

AvgDerivativeSample avg_derivative(const QcMap& f, const Vec& x, int budget, std::uint64_t seed) {
  require_inside(x);
  if (budget < 64) throw std::invalid_argument("avg_derivative needs budget >= 64");
  const int n = f.dim();
  const double rho = whitney_radius(x);
  AvgDerivativeSample s;
  s.x = x;
  if (n == 2) {
    int radial = std::clamp(static_cast<int>(std::lround(std::sqrt(budget / 4.0))), 4, 64);
    int angular = std::max(8, budget / radial);
    double fine = planar_mean_log_jacobian(f, x, rho, radial, angular);
    double coarse = planar_mean_log_jacobian(f, x, rho, std::max(2, radial / 2), angular / 2);
    s.value = std::exp(fine / n);
    // The floor keeps the estimate meaningful once the two rules agree to rounding.
    s.std_error = s.value * std::max(std::abs(fine - coarse) / n, 1e-12);
    s.method = "quadrature";
    s.evaluations = radial * angular + std::max(2, radial / 2) * (angular / 2);
    return s;
  }
  constexpr int kShifts = 8;
  const int per = std::max(8, budget / kShifts);
  double means[kShifts];
  double total = 0.0;
  for (int k = 0; k < kShifts; ++k) {
    double acc = 0.0;
    for (const Vec& p : ball_samples(n, per, seed + 7919u * (k + 1))) acc += checked_log_jacobian(f, x + rho * p);
    means[k] = acc / per;
    total += means[k];
  }
  double mean = total / kShifts;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (kShifts - 1);
  s.value = std::exp(mean / n);
  s.std_error = s.value * std::max(std::sqrt(var / kShifts) / n, 1e-12);
  s.method = "qmc";
  s.evaluations = per * kShifts;
  return s;
}

std::string to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::Converged:
      return "converged";
    case LimitStatus::Divergent:
      return "divergent";
    case LimitStatus::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

RadialLimit radial_limit(const QcMap& f, const Vec& omega, int levels) {
  if (levels < 6 || levels > 52) throw std::invalid_argument("radial_limit levels must be in [6, 52]");
  RadialLimit out;
  std::vector<Vec> v;
  for (int k = 1; k <= levels; ++k) {
    double r = 1.0 - std::ldexp(1.0, -k);
    Vec y = f.eval(r * omega);
    if (!y.allFinite()) {
      out.status = LimitStatus::Divergent;
      out.norms.push_back(kInf);
      out.value = v.empty() ? y : v.back();
      return out;
    }
    v.push_back(y);
    out.norms.push_back(y.norm());
  }
  const int m = static_cast<int>(v.size());
  std::vector<double> d(m - 1);
  for (int k = 0; k + 1 < m; ++k) d[k] = (v[k + 1] - v[k]).norm();
  out.value = v.back();
  const double scale = std::max(1.0, out.norms.back());
  if (d.back() <= 1e-13 * scale) {
    out.status = LimitStatus::Converged;
    return out;
  }
  double q = 0.0;
  int counted = 0;
  for (int k = m - 5; k + 1 < m - 1; ++k) {
    if (d[k] > 0.0) {
      q += d[k + 1] / d[k];
      ++counted;
    }
  }
  q = counted ? q / counted : 1.0;
  if (q <= 0.75) {
    out.status = LimitStatus::Converged;
    out.value = v.back() + (v.back() - v[m - 2]) * (q / (1.0 - q));
    return out;
  }
  bool growing = true;
  for (int k = m - 6; k + 1 < m; ++k) growing = growing && out.norms[k + 1] > out.norms[k];
  out.status = (growing && q >= 0.9) ? LimitStatus::Divergent : LimitStatus::Inconclusive;
  return out;
}

MaxModulus max_modulus(const QcMap& f, double r, const SphereGrid& grid) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("max_modulus needs 0 < r < 1");
  if (grid.dim() != f.dim()) throw std::invalid_argument("grid dimension does not match the map");
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = f.eval(r * grid.node(i)).norm();
    if (v > best_val * (1.0 + 1e-13)) {
      best_val = v;
      best = i;
    }
  }
  Vec dir = grid.node(best);
  const int n = f.dim();
  const double span = n == 2 ? 2.0 * kPi / grid.size() : std::sqrt(4.0 * kPi / grid.size());
  auto along = [&](const Vec& base, const Vec& tangent, double t) {
    Vec w = std::cos(t) * base + std::sin(t) * tangent;
    return Vec(w / w.norm());
  };
  const int sweeps = n == 2 ? 1 : 4;
  for (int s = 0; s < sweeps; ++s) {
    for (const Vec& tangent : tangent_frame(dir)) {
      auto g = [&](double t) { return f.eval(r * along(dir, tangent, t)).norm(); };
      double t = golden_max(g, -span, span);
      double val = g(t);
      if (val > best_val * (1.0 + 1e-13)) {  // ignore rounding-level gains
        best_val = val;
        dir = along(dir, tangent, t);
      }
    }
  }
  return {best_val, dir};
}

std::vector<double> cone_sup_profile(int n, const Vec& omega, int depth,
                                     const std::function<double(const Vec&)>& g, int points_per_ball,
                                     std::uint64_t seed) {
  if (depth < 1) throw std::invalid_argument("cone depth must be >= 1");
  std::vector<Vec> offsets;
  for (int axis = 0; axis < n; ++axis) {
    offsets.push_back(0.95 * basis_vec(n, axis));
    offsets.push_back(-0.95 * basis_vec(n, axis));
  }
  for (const Vec& p : ball_samples(n, points_per_ball, seed)) offsets.push_back(p);
  std::vector<double> profile;
  double running = 0.0;
  for (int j = 0; j <= depth; ++j) {
    double t = 1.0 - std::ldexp(1.0, -j);
    double rho = 0.5 * (1.0 - t);
    Vec c = t * omega;
    running = std::max(running, g(c));
    for (const Vec& o : offsets) {
      double v = g(c + rho * o);
      if (std::isnan(v)) continue;
      running = std::max(running, v);
    }
    profile.push_back(running);
  }
  return profile;
}

std::vector<double> cone_sup_profile(const QcMap& f, const Vec& omega, int depth, int component,
                                     int points_per_ball, std::uint64_t seed) {
  if (component >= f.dim()) throw std::invalid_argument("component index out of range");
  auto size = [&](const Vec& x) {
    Vec y = f.eval(x);
    return component < 0 ? y.norm() : std::abs(y(component));
  };
  return cone_sup_profile(f.dim(), omega, depth, size, points_per_ball, seed);
}

double nontangential_max(const QcMap& f, const Vec& omega, int depth, int points_per_ball,
                         std::uint64_t seed) {
  return cone_sup_profile(f, omega, depth, -1, points_per_ball, seed).back();
}

double component_nontangential_max(const QcMap& f, int i, const Vec& omega, int depth,
                                   int points_per_ball, std::uint64_t seed) {
  if (i < 1 || i > f.dim()) throw std::invalid_argument("component index must be in 1..n");
  return cone_sup_profile(f, omega, depth, i - 1, points_per_ball, seed).back();
}

double image_ball_diameter(const QcMap& f, const Vec& x, int samples) {
  require_inside(x);
  const int n = f.dim();
  const double rho = whitney_radius(x);
  auto grid = SphereGrid::make(n, std::max(8, samples));
  std::vector<Vec> img;
  img.reserve(grid.size());
  for (const Vec& w : grid.nodes()) img.push_back(f.eval(x + rho * w));
  double diam = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    for (std::size_t j = i + 1; j < img.size(); ++j) diam = std::max(diam, (img[i] - img[j]).squaredNorm());
  }
  return std::sqrt(diam);
}

}  // namespace holab
