#include "holab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "expression.hpp"
#include "holab/numerics.hpp"

namespace holab {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kLog2 = std::numbers::ln2;

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

double fd_step(double t) { return std::max(1e-6, 1e-6 * t); }

}  // namespace

GrowthFunction::GrowthFunction(Kind kind, std::string name, double exponent)
    : kind_(kind), name_(std::move(name)), exponent_(exponent) {}

GrowthFunction GrowthFunction::power(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("power growth needs a finite exponent p > 0");
  }
  return GrowthFunction(Kind::Power, "power:" + format_number(p), p);
}

GrowthFunction GrowthFunction::identity() { return GrowthFunction(Kind::Identity, "identity", 1.0); }

GrowthFunction GrowthFunction::counterexample1() {
  GrowthFunction g(Kind::Counterexample1, "counterexample1", 1.0);
  g.breakpoints_ = {0.5};
  return g;
}

GrowthFunction GrowthFunction::counterexample2() {
  return GrowthFunction(Kind::Counterexample2, "counterexample2", 1.0);
}

GrowthFunction GrowthFunction::counterexample3() {
  GrowthFunction g(Kind::Counterexample3, "counterexample3", 1.0);
  g.breakpoints_ = {1.0};
  return g;
}

GrowthFunction GrowthFunction::expression(std::string_view text) {
  GrowthFunction g(Kind::Expression, "expr:" + std::string(text), 1.0);
  auto pw = std::make_shared<PiecewiseExpression>(PiecewiseExpression::parse(text));
  g.breakpoints_ = pw->breakpoints();
  g.expr_ = std::move(pw);
  double at_zero = g.value(0.0);
  if (!(std::abs(at_zero) <= 1e-12)) {
    throw std::invalid_argument("growth expression must vanish at t = 0");
  }
  double prev = at_zero;
  for (int i = 0; i <= 96; ++i) {
    double t = std::pow(10.0, -6.0 + 12.0 * i / 96.0);
    double v = g.value(t);
    if (std::isnan(v) || v <= prev) {
      throw std::invalid_argument("growth expression is not strictly increasing near t = " +
                                  format_number(t));
    }
    prev = v;
    if (std::isinf(v)) break;
  }
  return g;
}

GrowthFunction GrowthFunction::parse(std::string_view spec) {
  if (spec == "identity") return identity();
  if (spec == "counterexample1") return counterexample1();
  if (spec == "counterexample2") return counterexample2();
  if (spec == "counterexample3") return counterexample3();
  if (starts_with(spec, "power:")) {
    std::string arg(spec.substr(6));
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) {
      throw std::invalid_argument("bad power exponent in '" + std::string(spec) + "'");
    }
    return power(p);
  }
  if (starts_with(spec, "expr:")) return expression(spec.substr(5));
  throw std::invalid_argument("unknown growth function '" + std::string(spec) + "'");
}

double GrowthFunction::value(double t) const {
  if (t == 0.0) return kind_ == Kind::Expression ? (*expr_)(0.0) : 0.0;
  if (std::isinf(t)) return kInf;
  switch (kind_) {
    case Kind::Power:
      return std::pow(t, exponent_);
    case Kind::Identity:
      return t;
    case Kind::Counterexample1:
      return t < 0.5 ? -1.0 / std::log(t) : 2.0 * t / kLog2;
    case Kind::Counterexample2:
      return std::expm1(t * t);
    case Kind::Counterexample3:
      return t <= 1.0 ? 2.0 * kE * t : std::exp(t * t) + kE;
    case Kind::Expression: {
      double v = (*expr_)(t);
      return std::isnan(v) ? kInf : v;
    }
  }
  return kInf;
}

double GrowthFunction::log_value(double t) const {
  if (t == 0.0) return -kInf;
  if (std::isinf(t)) return kInf;
  switch (kind_) {
    case Kind::Power:
      return exponent_ * std::log(t);
    case Kind::Identity:
      return std::log(t);
    case Kind::Counterexample1:
      return t < 0.5 ? -std::log(-std::log(t)) : std::log(2.0 * t / kLog2);
    case Kind::Counterexample2: {
      double s = t * t;
      return s < 1.0 ? std::log(std::expm1(s)) : s + std::log1p(-std::exp(-s));
    }
    case Kind::Counterexample3:
      return t <= 1.0 ? std::log(2.0 * kE * t) : t * t + std::log1p(std::exp(1.0 - t * t));
    case Kind::Expression:
      return std::log(value(t));
  }
  return kInf;
}

double GrowthFunction::inverse_value(double y) const {
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return kInf;
  switch (kind_) {
    case Kind::Power:
      return std::pow(y, 1.0 / exponent_);
    case Kind::Identity:
      return y;
    case Kind::Counterexample1:
      return y < 1.0 / kLog2 ? std::exp(-1.0 / y) : y * kLog2 / 2.0;
    case Kind::Counterexample2:
      return std::sqrt(std::log1p(y));
    case Kind::Counterexample3:
      return y <= 2.0 * kE ? y / (2.0 * kE) : std::sqrt(std::log(y - kE));
    case Kind::Expression:
      return bisect_inverse(y);
  }
  return kInf;
}

double GrowthFunction::log_inverse_value(double y) const {
  if (y == 0.0) return -kInf;
  if (std::isinf(y)) return kInf;
  switch (kind_) {
    case Kind::Power:
      return std::log(y) / exponent_;
    case Kind::Counterexample1:
      if (y < 1.0 / kLog2) return -1.0 / y;
      break;
    default:
      break;
  }
  return std::log(inverse_value(y));
}

double GrowthFunction::bisect_inverse(double y) const {
  double lo = 0.0;
  double hi = 1.0;
  while (value(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) {
      throw std::overflow_error("inverse of " + name_ + " out of range at y = " + format_number(y));
    }
  }
  for (int it = 0; it < 2000 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (value(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(value(lo) - y) <= std::abs(value(hi) - y) ? lo : hi;
}

double GrowthFunction::analytic_derivative(double t) const {
  switch (kind_) {
    case Kind::Power:
      return exponent_ * std::pow(t, exponent_ - 1.0);
    case Kind::Identity:
      return 1.0;
    case Kind::Counterexample1: {
      if (t >= 0.5) return 2.0 / kLog2;
      double l = std::log(t);
      return 1.0 / (t * l * l);
    }
    case Kind::Counterexample2:
      return 2.0 * t * std::exp(t * t);
    case Kind::Counterexample3:
      return t <= 1.0 ? 2.0 * kE : 2.0 * t * std::exp(t * t);
    case Kind::Expression:
      return finite_difference_derivative(*this, t);
  }
  return kInf;
}

double eval(const GrowthFunction& psi, double t) {
  if (std::isnan(t) || t < 0.0) {
    throw std::domain_error("growth function " + psi.name() + " evaluated at negative t");
  }
  return psi.value(t);
}

double finite_difference_derivative(const GrowthFunction& psi, double t) {
  double h = fd_step(t);
  double lo = std::max(0.0, t - h);
  double hi = t + h;
  return (psi.value(hi) - psi.value(lo)) / (hi - lo);
}

DerivativeValue derivative(const GrowthFunction& psi, double t) {
  if (std::isnan(t) || t <= 0.0) {
    throw std::domain_error("derivative of " + psi.name() + " needs t > 0");
  }
  double h = fd_step(t);
  DerivativeValue d;
  for (double b : psi.breakpoints()) {
    if (std::abs(t - b) <= h) {
      d.at_breakpoint = true;
      if (psi.has_analytic_derivative()) {
        d.value = psi.analytic_derivative(t);
      } else if (t >= b) {
        d.value = (psi.value(t + h) - psi.value(t)) / h;
      } else {
        d.value = (psi.value(t) - psi.value(t - h)) / h;
      }
      return d;
    }
  }
  d.value = psi.has_analytic_derivative() ? psi.analytic_derivative(t)
                                          : finite_difference_derivative(psi, t);
  return d;
}

double inverse(const GrowthFunction& psi, double y) {
  if (std::isnan(y) || y < 0.0) {
    throw std::domain_error("inverse of " + psi.name() + " needs y >= 0");
  }
  double t = psi.inverse_value(y);
  if (std::isinf(t) && std::isfinite(y)) {
    throw std::overflow_error("inverse of " + psi.name() + " out of range at y = " + format_number(y));
  }
  return t;
}

std::string to_string(DoublingVerdict v) {
  switch (v) {
    case DoublingVerdict::Doubling:
      return "doubling";
    case DoublingVerdict::NotDoubling:
      return "not-doubling";
    case DoublingVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {

template <class LogFn>
DoublingReport classify_doubling(const std::string& name, LogFn log_fn, const DoublingGrid& grid) {
  if (!(grid.t_min > 0.0) || !(grid.t_max > grid.t_min) || grid.samples < 16) {
    throw std::invalid_argument("doubling grid needs 0 < t_min < t_max and samples >= 16");
  }
  const double l0 = std::log(grid.t_min);
  const double l1 = std::log(grid.t_max);

  auto log_ratio_grid = [&](int samples, std::vector<double>& ts) {
    std::vector<double> out(samples);
    ts.resize(samples);
    for (int i = 0; i < samples; ++i) {
      double t = std::exp(l0 + (l1 - l0) * i / (samples - 1));
      ts[i] = t;
      double base = log_fn(t);
      if (base == -kInf) {
        throw std::invalid_argument("malformed growth function " + name + ": vanishes at t = " +
                                    format_number(t));
      }
      double top = log_fn(2.0 * t);
      out[i] = (std::isinf(top) && std::isinf(base)) ? kInf : top - base;
    }
    return out;
  };

  std::vector<double> ts;
  std::vector<double> lr = log_ratio_grid(grid.samples, ts);

  DoublingReport rep;
  rep.name = name;
  rep.t_min = grid.t_min;
  rep.t_max = grid.t_max;
  rep.samples = grid.samples;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < lr.size(); ++i) {
    if (lr[i] > lr[arg]) arg = i;
  }
  rep.witness_t = ts[arg];
  rep.constant_estimate = std::max(1.0, std::exp(lr[arg]));

  const double log_threshold = std::log(grid.blowup_threshold);
  const double decade = std::log(10.0);
  auto monotone_blowup = [&](bool high_end) {
    const int n = static_cast<int>(lr.size());
    int end = high_end ? n - 1 : 0;
    if (!(lr[end] > log_threshold)) return false;
    int step = high_end ? -1 : 1;
    for (int i = end; i + step >= 0 && i + step < n; i += step) {
      if (std::abs(std::log(ts[i + step]) - std::log(ts[end])) > decade) break;
      double tol = 1e-12 * std::max(1.0, std::abs(lr[i]));
      if (lr[i + step] > lr[i] + tol) return false;
    }
    return true;
  };

  if (monotone_blowup(true) || monotone_blowup(false)) {
    rep.verdict = DoublingVerdict::NotDoubling;
    return rep;
  }

  double prev = lr[arg];
  bool stable = std::isfinite(prev);
  int samples = grid.samples;
  for (int level = 0; level < 2 && stable; ++level) {
    samples = 2 * samples - 1;
    std::vector<double> t2;
    std::vector<double> refined = log_ratio_grid(samples, t2);
    double best = *std::max_element(refined.begin(), refined.end());
    if (!std::isfinite(best) || std::abs(std::exp(best - prev) - 1.0) > grid.stabilization_tolerance) {
      stable = false;
    }
    prev = best;
  }
  rep.verdict = stable ? DoublingVerdict::Doubling : DoublingVerdict::Inconclusive;
  return rep;
}

}  // namespace

DoublingReport doubling_report(const GrowthFunction& psi, const DoublingGrid& grid) {
  return classify_doubling(psi.name(), [&](double t) { return psi.log_value(t); }, grid);
}

DoublingReport inverse_doubling_report(const GrowthFunction& psi, const DoublingGrid& grid) {
  return classify_doubling(psi.name() + "^-1", [&](double y) { return psi.log_inverse_value(y); },
                           grid);
}

ScaledBoundExponents scaled_bound_exponents(const GrowthFunction& psi, double cap) {
  static constexpr double kCandidates[] = {1, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  constexpr int kGrid = 49;
  std::vector<double> la(kGrid), lpsi(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    la[i] = std::log(1e-6) + std::log(1e12) * i / (kGrid - 1);
    lpsi[i] = psi.log_value(std::exp(la[i]));
  }
  auto holds = [&](double p, double q) {
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) {
        double d = la[i] - la[j];
        double lhs = lpsi[i] - lpsi[j];
        if (std::isnan(lhs)) return false;
        double rhs = p * kLog2 + log_add_exp(p * d, d / q);
        if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) return false;
      }
    }
    return true;
  };
  ScaledBoundExponents out;
  for (double p : kCandidates) {
    if (p > cap) break;
    for (double q : kCandidates) {
      if (q > cap) break;
      if (holds(p, q)) {
        out.found = true;
        out.p = p;
        out.q = q;
        return out;
      }
    }
  }
  return out;
}

}  // namespace holab
