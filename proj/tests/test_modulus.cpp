#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "holab/modulus.hpp"

using namespace holab;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ModulusSolverParams at(int resolution) {
  ModulusSolverParams p;
  p.resolution = resolution;
  return p;
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(exact_radial_modulus(2.0 * kPi, std::exp(-1.0), 2) == doctest::Approx(2.0 * kPi));
  CHECK(exact_radial_modulus(2.0 * kPi, std::exp(-1.0), 3) == doctest::Approx(2.0 * kPi));
  CHECK(exact_radial_modulus(1e-14, 0.5, 2) < 1e-13);
  CHECK(ring_modulus_upper(1.0, std::exp(1.0), 2) == doctest::Approx(2.0 * kPi));
  CHECK(ring_modulus_upper(1.0, std::exp(2.0), 3) == doctest::Approx(kPi));
  CHECK(ring_modulus_upper(1.0, 1e300, 2) < 0.01);
  CHECK_THROWS(exact_radial_modulus(1.0, 1.0, 2));
  CHECK_THROWS(ring_modulus_upper(2.0, 1.0, 2));
  CHECK(scaled_curve_count(2, 512) == 4096);
  CHECK(scaled_curve_count(3, 128) == 16384);
}

TEST_CASE("planar families against closed forms") {
  auto ring = ring_family(zero_vec(2), 1.0, std::exp(1.0));
  auto full = radial_family(Cap{basis_vec(2, 0), kPi}, std::exp(-1.0));
  auto arc = radial_family(Cap{basis_vec(2, 1), kPi / 3.0}, std::exp(-1.0));
  CHECK(*full.exact_reference == doctest::Approx(2.0 * kPi));
  CHECK(*arc.exact_reference == doctest::Approx(2.0 * kPi / 3.0));
  for (const auto* fam : {&ring, &full, &arc}) {
    auto coarse = numeric_modulus(*fam);
    CHECK(coarse.converged);
    CHECK(std::abs(*coarse.relative_error) < 0.10);
    auto fine = numeric_modulus(*fam, at(512));
    CHECK(std::abs(*fine.relative_error) < 0.05);
  }
  auto thousand = numeric_modulus(ring_family(zero_vec(2), 1.0, std::exp(1.0), 1000));
  CHECK(std::abs(*thousand.relative_error) < 0.10);
}

TEST_CASE("spatial ring with the default and scaled curve counts") {
  auto est = numeric_modulus(ring_family(zero_vec(3), 1.0, std::exp(2.0)));
  CHECK(*est.exact_reference == doctest::Approx(kPi));
  CHECK(std::abs(*est.relative_error) < 0.15);
  auto hemi = numeric_modulus(radial_family(Cap{basis_vec(3, 2), kPi / 2.0}, std::exp(-1.0)));
  CHECK(std::abs(*hemi.relative_error) < 0.10);
}

TEST_CASE("feasibility and monotone history") {
  auto est = numeric_modulus(radial_family(Cap{basis_vec(2, 0), 1.0}, 0.3));
  CHECK(est.min_constraint >= 1.0 - 1e-9);
  CHECK(est.dual_bound <= est.value * (1.0 + 1e-12));
  REQUIRE(!est.history.empty());
  for (std::size_t i = 1; i < est.history.size(); ++i) CHECK(est.history[i] <= est.history[i - 1]);
  CHECK(est.rho.size() == est.cells);
  std::ostringstream csv;
  write_rho_csv(est, csv);
  std::string s = csv.str();
  CHECK(s.rfind("x,y,rho\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == est.cells + 1);
}

TEST_CASE("a superset family does not have smaller modulus") {
  auto all = ring_family(zero_vec(2), 0.5, 1.0);
  CurveFamily half = all;
  half.curves.clear();
  for (std::size_t i = 0; i < all.curves.size(); i += 2) half.curves.push_back(all.curves[i]);
  auto big = numeric_modulus(all), small = numeric_modulus(half);
  CHECK(big.value >= small.value * (1.0 - 2.0 * ModulusSolverParams{}.tolerance));
}

TEST_CASE("dilation invariance") {
  auto base = ring_family(v2(0.1, -0.2), 0.3, 0.9);
  CurveFamily scaled = base;
  for (auto& c : scaled.curves) {
    for (auto& p : c) p *= 3.0;
  }
  auto a = numeric_modulus(base), b = numeric_modulus(scaled);
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-6));
  CHECK(b.cell_size == doctest::Approx(3.0 * a.cell_size));
}

TEST_CASE("single axis-aligned segment") {
  // one curve crossing k cells of side h: rho = 1/L on them, value = h^{n-1} L^{1-n}
  for (int n : {2, 3}) {
    const double L = 0.75;
    CurveFamily seg;
    seg.dim = n;
    seg.generator = "segment";
    Vec a = zero_vec(n), b = zero_vec(n);
    a(0) = -0.3;
    b(0) = -0.3 + L;
    for (int i = 1; i < n; ++i) a(i) = b(i) = 0.1;
    seg.curves.push_back({a, b});
    std::vector<double> scaled;
    for (int res : {32, 64, 128}) {
      auto est = numeric_modulus(seg, at(res));
      scaled.push_back(est.value / std::pow(est.cell_size, n - 1));
    }
    for (double s : scaled) CHECK(s == doctest::Approx(std::pow(L, 1 - n)).epsilon(0.05));
    CHECK(std::abs(scaled[1] / scaled[0] - 1.0) < 0.05);
    CHECK(std::abs(scaled[2] / scaled[1] - 1.0) < 0.05);
  }
}

TEST_CASE("image families") {
  auto fam = radial_family(Cap{basis_vec(2, 0), 1.0}, 0.3, 64, 5);
  auto same = map_family(*make_identity(2), fam, 1.0);
  REQUIRE(same.curves.size() == fam.curves.size());
  for (std::size_t c = 0; c < fam.curves.size(); ++c) {
    REQUIRE(same.curves[c].size() == fam.curves[c].size());
    for (std::size_t i = 0; i < fam.curves[c].size(); ++i) CHECK((same.curves[c][i] - fam.curves[c][i]).norm() < 1e-15);
  }

  auto mob = make_mobius(v2(0.4, 0.2));
  auto img = map_family(*mob, fam, 1e-2);
  for (std::size_t c = 0; c < fam.curves.size(); ++c) {
    const auto& pre = fam.curves[c];
    const auto& im = img.curves[c];
    CHECK((im.front() - mob->eval(pre.front())).norm() < 1e-12);
    CHECK((im.back() - mob->eval(pre.back())).norm() < 1e-12);
    for (std::size_t i = 0; i + 1 < im.size(); ++i) CHECK((im[i + 1] - im[i]).norm() <= 1e-2);
  }

  auto sq = make_radial_stretch(2, 2.0);
  auto ring = map_family(*sq, ring_family(zero_vec(2), 0.25, 0.5, 128), 1e-2);
  for (const auto& c : ring.curves) {
    CHECK(c.front().norm() == doctest::Approx(0.0625));
    CHECK(c.back().norm() == doctest::Approx(0.25));
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].norm() > c[i - 1].norm());
  }

  CurveFamily outside = fam;
  outside.curves[0].back() *= 1.5;
  CHECK_THROWS_AS(map_family(*mob, outside), std::domain_error);
}

TEST_CASE("quasi-invariance") {
  auto mob = make_mobius(v2(0.3, -0.2));
  auto conf = quasi_invariance_check(*mob, ring_family(v2(0.05, 0.0), 0.2, 0.6));
  CHECK(conf.converged);
  CHECK(conf.within);
  CHECK(conf.ratio == doctest::Approx(1.0).epsilon(0.1));

  // the image of ring(0, 1/4, 1/2) under |x| x is ring(0, 1/16, 1/4): half the modulus
  auto sq = make_radial_stretch(2, 2.0);
  auto st = quasi_invariance_check(*sq, ring_family(zero_vec(2), 0.25, 0.5));
  CHECK(st.k_bound == doctest::Approx(2.0));
  CHECK(st.within);
  CHECK(st.ratio == doctest::Approx(0.5).epsilon(0.1));
}
