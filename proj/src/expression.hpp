#pragma once

#include <functional>
#include <string_view>
#include <vector>

namespace holab {

/// Compiled closed-form formula in the single variable `t`.
///
/// Grammar: + - * / ^, unary minus, parentheses, numbers, the constants e and
/// pi, and the functions exp, log, sqrt, abs, sin, cos.
class Formula {
 public:
  static Formula parse(std::string_view text);
  double operator()(double t) const { return fn_(t); }

 private:
  std::function<double(double)> fn_;
};

/// Piecewise formula: each piece applies below its bound, the last piece above all.
class PiecewiseExpression {
 public:
  /// "f1 for t<b1; f2 for t<=b2; f3"
  static PiecewiseExpression parse(std::string_view text);

  double operator()(double t) const;
  std::vector<double> breakpoints() const;

 private:
  struct Piece {
    Formula formula;
    double bound = 0.0;
    bool inclusive = false;
  };
  std::vector<Piece> pieces_;
  Formula tail_;
};

}  // namespace holab
