#include "expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace holab {

namespace {

using Fn = std::function<double(double)>;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Fn parse_all() {
    Fn fn = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return fn;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("formula '" + std::string(text_) + "': " + what + " at offset " +
                                std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn expr() {
    Fn lhs = term();
    for (;;) {
      if (accept('+')) {
        Fn rhs = term();
        lhs = [lhs, rhs](double t) { return lhs(t) + rhs(t); };
      } else if (accept('-')) {
        Fn rhs = term();
        lhs = [lhs, rhs](double t) { return lhs(t) - rhs(t); };
      } else {
        return lhs;
      }
    }
  }

  Fn term() {
    Fn lhs = unary();
    for (;;) {
      if (accept('*')) {
        Fn rhs = unary();
        lhs = [lhs, rhs](double t) { return lhs(t) * rhs(t); };
      } else if (accept('/')) {
        Fn rhs = unary();
        lhs = [lhs, rhs](double t) { return lhs(t) / rhs(t); };
      } else {
        return lhs;
      }
    }
  }

  Fn unary() {
    if (accept('-')) {
      Fn inner = unary();
      return [inner](double t) { return -inner(t); };
    }
    if (accept('+')) return unary();
    return power();
  }

  Fn power() {
    Fn base = primary();
    if (accept('^')) {
      Fn exponent = unary();
      return [base, exponent](double t) { return std::pow(base(t), exponent(t)); };
    }
    return base;
  }

  Fn primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Fn inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E') &&
          pos_ + 1 < text_.size() &&
          (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '-' ||
           text_[pos_ + 1] == '+')) {
        pos_ += 2;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
      double v = std::stod(std::string(text_.substr(start, pos_ - start)));
      return [v](double) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      if (name == "t") return [](double t) { return t; };
      if (name == "e") return [](double) { return std::numbers::e; };
      if (name == "pi") return [](double) { return std::numbers::pi; };
      double (*unary_fn)(double) = nullptr;
      if (name == "exp") unary_fn = [](double x) { return std::exp(x); };
      if (name == "log") unary_fn = [](double x) { return std::log(x); };
      if (name == "sqrt") unary_fn = [](double x) { return std::sqrt(x); };
      if (name == "abs") unary_fn = [](double x) { return std::abs(x); };
      if (name == "sin") unary_fn = [](double x) { return std::sin(x); };
      if (name == "cos") unary_fn = [](double x) { return std::cos(x); };
      if (!unary_fn) fail("unknown identifier '" + name + "'");
      if (!accept('(')) fail("expected '(' after " + name);
      Fn arg = expr();
      if (!accept(')')) fail("expected ')'");
      return [unary_fn, arg](double t) { return unary_fn(arg(t)); };
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Formula Formula::parse(std::string_view text) {
  Formula f;
  f.fn_ = Parser(text).parse_all();
  return f;
}

PiecewiseExpression PiecewiseExpression::parse(std::string_view text) {
  PiecewiseExpression pw;
  std::vector<std::string_view> segments;
  std::size_t start = 0;
  for (;;) {
    std::size_t semi = text.find(';', start);
    segments.push_back(trim(text.substr(start, semi == std::string_view::npos ? semi : semi - start)));
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    std::string_view seg = segments[i];
    if (seg.empty()) throw std::invalid_argument("empty piece in growth expression");
    std::size_t at = seg.find(" for ");
    if (i + 1 == segments.size()) {
      if (at != std::string_view::npos) {
        throw std::invalid_argument("last piece of a growth expression must be unconditional");
      }
      pw.tail_ = Formula::parse(seg);
      break;
    }
    if (at == std::string_view::npos) {
      throw std::invalid_argument("piece '" + std::string(seg) + "' needs a 'for t<bound' clause");
    }
    std::string_view cond = trim(seg.substr(at + 5));
    Piece piece;
    piece.formula = Formula::parse(trim(seg.substr(0, at)));
    if (cond.substr(0, 3) == "t<=") {
      piece.inclusive = true;
      cond.remove_prefix(3);
    } else if (cond.substr(0, 2) == "t<") {
      cond.remove_prefix(2);
    } else {
      throw std::invalid_argument("condition must read 't<bound' or 't<=bound'");
    }
    piece.bound = Formula::parse(cond)(0.0);
    if (!pw.pieces_.empty() && piece.bound < pw.pieces_.back().bound) {
      throw std::invalid_argument("piece bounds must be nondecreasing");
    }
    pw.pieces_.push_back(std::move(piece));
  }
  return pw;
}

double PiecewiseExpression::operator()(double t) const {
  for (const auto& p : pieces_) {
    if (t < p.bound || (p.inclusive && t == p.bound)) return p.formula(t);
  }
  return tail_(t);
}

std::vector<double> PiecewiseExpression::breakpoints() const {
  std::vector<double> b;
  for (const auto& p : pieces_) b.push_back(p.bound);
  return b;
}

}  // namespace holab
