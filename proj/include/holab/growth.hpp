#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace holab {

class PiecewiseExpression;

/// A growth function psi: [0, inf] -> [0, inf], psi(0) = 0, strictly increasing.
///
/// Builtins carry closed forms for psi, psi', psi^{-1} and log psi; expression
/// growth functions fall back to finite differences and bracketed bisection.
/// Values are immutable after construction and safe to share across threads.
/// Arithmetic saturates: overflow yields +inf, never an exception.
class GrowthFunction {
 public:
  enum class Kind { Power, Identity, Counterexample1, Counterexample2, Counterexample3, Expression };

  /// psi(t) = t^p, p > 0.
  static GrowthFunction power(double p);
  static GrowthFunction identity();
  /// 1/log(1/t) for t < 1/2, 2t/log 2 for t >= 1/2: doubling, inverse not doubling.
  static GrowthFunction counterexample1();
  /// exp(t^2) - 1: not doubling.
  static GrowthFunction counterexample2();
  /// 2e t for t <= 1, exp(t^2) + e for t > 1: not doubling.
  static GrowthFunction counterexample3();
  /// Piecewise closed-form expression in `t`, e.g. "2*e*t for t<=1; exp(t^2)+e".
  static GrowthFunction expression(std::string_view text);

  /// Builtin token (`power:p`, `identity`, `counterexample1..3`) or `expr:<pieces>`.
  static GrowthFunction parse(std::string_view spec);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double exponent() const { return exponent_; }

  double value(double t) const;
  /// log psi(t), accurate where psi itself overflows.
  double log_value(double t) const;
  double inverse_value(double y) const;
  /// log psi^{-1}(y), accurate where psi^{-1}(y) underflows.
  double log_inverse_value(double y) const;

  bool has_analytic_derivative() const { return kind_ != Kind::Expression; }
  bool has_analytic_inverse() const { return kind_ != Kind::Expression; }
  /// Points where psi is only one-sided differentiable.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  double analytic_derivative(double t) const;

 private:
  GrowthFunction(Kind kind, std::string name, double exponent);

  double bisect_inverse(double y) const;

  Kind kind_;
  std::string name_;
  double exponent_ = 1.0;
  std::vector<double> breakpoints_;
  std::shared_ptr<const PiecewiseExpression> expr_;
};

/// psi(t). Throws std::domain_error for negative or NaN t; psi(inf) = inf.
double eval(const GrowthFunction& psi, double t);

struct DerivativeValue {
  double value = 0.0;
  /// Set when t sits within the finite-difference step of a breakpoint; the
  /// value is then the right-sided derivative (left-sided below the breakpoint).
  bool at_breakpoint = false;
};
DerivativeValue derivative(const GrowthFunction& psi, double t);
/// Central difference with step max(1e-6, 1e-6 t); exposed for cross-checks.
double finite_difference_derivative(const GrowthFunction& psi, double t);

/// psi^{-1}(y). Throws std::overflow_error when y exceeds the numeric range of psi.
double inverse(const GrowthFunction& psi, double y);

enum class DoublingVerdict { Doubling, NotDoubling, Inconclusive };
std::string to_string(DoublingVerdict v);

struct DoublingReport {
  std::string name;
  double constant_estimate = 1.0;  // sup of the sampled ratio, may be +inf
  DoublingVerdict verdict = DoublingVerdict::Inconclusive;
  double witness_t = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  int samples = 0;
};

struct DoublingGrid {
  double t_min = 1e-9;
  double t_max = 1e9;
  int samples = 512;
  double blowup_threshold = 1e6;
  double stabilization_tolerance = 0.01;
};

/// Samples psi(2t)/psi(t) on a log-spaced grid and classifies doubling.
DoublingReport doubling_report(const GrowthFunction& psi, const DoublingGrid& grid = {});
/// The same classification applied to psi^{-1}.
DoublingReport inverse_doubling_report(const GrowthFunction& psi, const DoublingGrid& grid = {});

struct ScaledBoundExponents {
  bool found = false;
  double p = 0.0;
  double q = 0.0;
};

/// Smallest grid exponents p, q >= 1 with
///   psi(a)/psi(b) <= 2^p (a^p/b^p + a^{1/q}/b^{1/q})
/// on a sampled (a, b) grid. Diagnostics only.
ScaledBoundExponents scaled_bound_exponents(const GrowthFunction& psi, double cap = 32.0);

}  // namespace holab
