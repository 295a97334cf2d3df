#include <doctest.h>

#include <cmath>
#include <vector>

#include "holab/classify.hpp"
#include "holab/growth.hpp"

using namespace holab;

namespace {

std::vector<double> dyadic_u(int k) {
  std::vector<double> u;
  for (int i = 1; i <= k; ++i) u.push_back(i * std::log(2.0));
  return u;
}

}  // namespace

TEST_CASE("geometric convergence is finite") {
  auto u = dyadic_u(40);
  std::vector<double> p;
  for (double x : u) p.push_back(3.0 - std::exp(-x));
  auto c = classify(u, p);
  CHECK(c.verdict == Verdict::Finite);
  CHECK(c.last_gap < 1e-9);
}

TEST_CASE("constant sequence is finite") {
  auto u = dyadic_u(20);
  std::vector<double> p(20, 1.5);
  CHECK(classify(u, p).verdict == Verdict::Finite);
}

TEST_CASE("log log growth is divergent") {
  // partials of int dr / ((1-r) log 1/(1-r)) are log u + const
  auto u = dyadic_u(40);
  std::vector<double> p;
  for (double x : u) p.push_back(2.0 + std::log(x));
  auto c = classify(u, p);
  CHECK(c.verdict == Verdict::Divergent);
  CHECK(c.best.model == "log");
  CHECK(c.best.r_squared > 0.999);
}

TEST_CASE("linear and exponential growth are divergent") {
  auto u = dyadic_u(30);
  std::vector<double> lin, ex;
  for (double x : u) {
    lin.push_back(1.0 + 0.5 * x);
    ex.push_back(std::exp(0.3 * x));
  }
  auto a = classify(u, lin);
  CHECK(a.verdict == Verdict::Divergent);
  CHECK(a.best.model == "linear");
  auto b = classify(u, ex);
  CHECK(b.verdict == Verdict::Divergent);
  CHECK(b.best.model == "exp");
}

TEST_CASE("overflow is divergent") {
  auto u = dyadic_u(5);
  std::vector<double> p{1.0, 2.0, 1e300, INFINITY, INFINITY};
  auto c = classify(u, p);
  CHECK(c.verdict == Verdict::Divergent);
  CHECK(c.rule == "overflow");
}

TEST_CASE("slow convergence is inconclusive") {
  // partials 1 - 1/u converge, but too slowly for the 0.5% gap rule at u ~ 5
  auto u = dyadic_u(8);
  std::vector<double> p;
  for (double x : u) p.push_back(1.0 - 1.0 / x);
  CHECK(classify(u, p).verdict == Verdict::Inconclusive);
}

TEST_CASE("tail probe sees divergence past the schedule") {
  // increments e^{-u} psi(delta u) with psi = e^{t^2} - 1 and small delta: the
  // partials look converged over the schedule, but psi eventually beats e^{-u}
  auto psi = GrowthFunction::counterexample2();
  const double delta = std::ldexp(1.0, -16);
  auto u = dyadic_u(40);
  std::vector<double> p, sizes;
  double acc = 0.0;
  for (double x : u) {
    acc += std::exp(-x) * psi.value(delta * x);
    p.push_back(acc);
    sizes.push_back(x);
  }
  TailProbe probe{sizes, [&](double s) { return psi.log_value(delta * s); }};
  auto plain = classify(u, p);
  CHECK(plain.verdict == Verdict::Finite);
  auto probed = classify(u, p, &probe);
  CHECK(probed.verdict == Verdict::Divergent);
  CHECK(probed.rule == "tail-probe");

  // the same increments under psi(t) = t^2 stay summable
  auto sq = GrowthFunction::power(2.0);
  std::vector<double> q;
  acc = 0.0;
  for (double x : u) {
    acc += std::exp(-x) * sq.value(delta * x);
    q.push_back(acc);
  }
  TailProbe probe2{sizes, [&](double s) { return sq.log_value(delta * s); }};
  auto fine = classify(u, q, &probe2);
  CHECK(fine.verdict == Verdict::Finite);
  CHECK(fine.tail.size_model == "linear");
  CHECK(fine.tail.remainder < 1e-9 * q.back());
}

TEST_CASE("tail probe on a decaying argument with a slowly decaying psi") {
  // constant level measure, argument e^{-u}, psi = 1/log(1/t): harmonic tail
  auto psi = GrowthFunction::counterexample1();
  auto u = dyadic_u(40);
  std::vector<double> p, sizes;
  double acc = 0.0;
  for (double x : u) {
    double s = std::exp(-x);
    acc += psi.value(s);
    p.push_back(acc);
    sizes.push_back(s);
  }
  TailProbe probe{sizes, [&](double s) { return psi.log_value(s); }};
  auto c = classify(u, p, &probe);
  CHECK(c.verdict == Verdict::Divergent);
  CHECK(c.tail.size_model == "exp-decay");
}
