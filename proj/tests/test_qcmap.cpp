#include <doctest.h>

#include <cmath>
#include <random>

#include "holab/qcmap.hpp"

using namespace holab;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

std::vector<QcMapPtr> builtin_matrix() {
  return {make_identity(2),
          make_identity(3),
          make_mobius(v2(0.3, -0.4)),
          make_mobius(v3(0.2, 0.5, -0.1)),
          make_planar_log1p(),
          make_radial_stretch(2, 2.0),
          make_radial_stretch(3, 0.5),
          make_translate(make_identity(2), v2(2.0, 0.0))};
}

}  // namespace

TEST_CASE("builtin constructors and tokens") {
  auto id = make_identity(2);
  CHECK(id->k_bound() == 1.0);
  CHECK(id->jacobian(v2(0.3, 0.1)) == 1.0);

  auto lg = make_planar_log1p();
  CHECK(lg->eval(v2(0, 0)).norm() == 0.0);
  CHECK(*lg->conformal_factor(v2(0, 0)) == doctest::Approx(1.0));

  auto st = make_radial_stretch(2, 2.0);
  CHECK((st->eval(v2(0.5, 0)) - v2(0.25, 0)).norm() < 1e-15);
  CHECK(st->k_bound() == 2.0);
  CHECK(make_radial_stretch(3, 3.0)->k_bound() == 9.0);
  CHECK(make_radial_stretch(3, 1.0 / 3.0)->k_bound() == doctest::Approx(9.0));

  CHECK_THROWS_AS(make_radial_stretch(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_radial_stretch(2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_mobius(v2(1.0, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(parse_map("log1p", 3), std::invalid_argument);
  CHECK_THROWS_AS(parse_map("spiral", 2), std::invalid_argument);

  CHECK(parse_map("mobius:0.3,0", 3)->name() == "mobius:0.3,0,0");
  CHECK(parse_map("stretch:2", 2)->name() == "stretch:2");
  auto tr = parse_map("translate:2,0@mobius:0.5,0", 2);
  CHECK(tr->name() == "translate:2,0@mobius:0.5,0");
  CHECK(tr->omits_origin());
  CHECK_FALSE(parse_map("log1p", 2)->omits_origin());
  CHECK_FALSE(parse_map("translate:0.5,0", 2)->omits_origin());
}

TEST_CASE("Mobius map fixes the ball and sends a to 0") {
  Vec a = v3(0.2, 0.5, -0.1);
  auto m = make_mobius(a);
  CHECK(m->eval(a).norm() < 1e-15);
  CHECK((m->eval(zero_vec(3)) + a).norm() < 1e-15);
  for (const Vec& x : ball_samples(3, 200, 3)) CHECK(m->eval(x).norm() < 1.0);
  for (const Vec& w : SphereGrid::make(3, 64).nodes()) {
    CHECK(m->eval(w).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("operator norm of Df") {
  CHECK(operator_norm_Df(*make_identity(3), v3(0.1, 0.2, 0.3)) == doctest::Approx(1.0));
  CHECK(operator_norm_Df(*make_planar_log1p(), v2(0, 0)) == doctest::Approx(1.0));
  CHECK(operator_norm_Df(*make_radial_stretch(2, 2.0), v2(0.3, 0.4)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(operator_norm_Df(*make_identity(2), v2(1.0, 0.0)), std::domain_error);
}

TEST_CASE("analytic differentials agree with finite differences") {
  for (const auto& f : builtin_matrix()) {
    for (const Vec& x : ball_samples(f->dim(), 50, 5, 0.9)) {
      if (x.norm() < 1e-3) continue;
      Mat a = f->differential(x);
      Mat d = f->finite_difference_differential(x);
      CHECK((a - d).norm() <= 1e-5 * std::max(1.0, a.norm()));
      CHECK(f->jacobian(x) == doctest::Approx(a.determinant()).epsilon(1e-10));
    }
  }
}

TEST_CASE("dilatation bounds") {
  CHECK(dilatation_check(*make_identity(2), 100) == doctest::Approx(1.0));
  CHECK(dilatation_check(*make_mobius(v2(0.6, 0.2)), 500) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dilatation_check(*make_mobius(v3(0.1, -0.3, 0.6)), 500) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dilatation_check(*make_radial_stretch(3, 3.0), 500) == doctest::Approx(9.0).epsilon(1e-6));
  for (const auto& f : builtin_matrix()) {
    CHECK(dilatation_check(*f, 1000) <= f->k_bound() * (1.0 + 1e-6));
  }
}

TEST_CASE("builtins are injective on sampled pairs") {
  std::mt19937_64 rng(3);
  for (const auto& f : builtin_matrix()) {
    auto pts = ball_samples(f->dim(), 400, 9);
    double worst = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        worst = std::min(worst, (f->eval(pts[i]) - f->eval(pts[j])).norm());
      }
    }
    CHECK(worst > 0.0);
  }
}

TEST_CASE("boundary distance") {
  Vec x = v2(0.3, -0.5);
  auto d = boundary_distance(*make_identity(2), x);
  CHECK(d.value == doctest::Approx(1.0 - x.norm()));
  CHECK(d.method == "analytic");

  Vec a = v2(0.4, 0.3);
  CHECK(boundary_distance(*make_mobius(a), a).value == doctest::Approx(1.0));

  auto lg = make_planar_log1p();
  CHECK(boundary_distance(*lg, v2(0, 0)).value == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  // boundary-sampling oracle at resolution about 1e-4
  ImageBoundarySample sample(*lg, 100000);
  auto sampled = boundary_distance(*lg, v2(0, 0), sample);
  CHECK(sampled.method == "boundary-sample");
  CHECK(sampled.resolution < 1e-4);
  CHECK(sampled.value == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  for (const Vec& p : ball_samples(2, 40, 17, 0.9)) {
    if ((p + v2(1, 0)).norm() < 0.2) continue;
    double exact = *lg->analytic_boundary_distance(p);
    CHECK(boundary_distance(*lg, p, sample).value == doctest::Approx(exact).epsilon(1e-4));
  }
  // image of the stretch is the ball again
  auto st = make_radial_stretch(2, 2.0);
  ImageBoundarySample st_sample(*st, 20000);
  Vec q = v2(0.2, 0.6);
  CHECK(boundary_distance(*st, q, st_sample).value ==
        doctest::Approx(*st->analytic_boundary_distance(q)).epsilon(1e-6));
}

TEST_CASE("averaged derivative") {
  auto id = avg_derivative(*make_identity(2), v2(0.2, 0.1));
  CHECK(id.value == doctest::Approx(1.0));
  auto id3 = avg_derivative(*make_identity(3), v3(0.2, 0.1, 0.0));
  CHECK(id3.value == doctest::Approx(1.0));
  CHECK(id3.method == "qmc");

  auto lg = make_planar_log1p();
  auto at0 = avg_derivative(*lg, v2(0, 0));
  CHECK(at0.std_error < 0.02);
  CHECK(std::abs(at0.value - 1.0) <= 3.0 * at0.std_error);
  auto at_half = avg_derivative(*lg, v2(0.5, 0));
  CHECK(std::abs(at_half.value - 2.0 / 3.0) <= 3.0 * at_half.std_error);
  CHECK_THROWS_AS(avg_derivative(*lg, v2(0, 0), 32), std::invalid_argument);

  // n = 3 Mobius: log of the conformal factor is not harmonic, but a_f stays
  // comparable to |f'| at the center of B_x
  auto m3 = make_mobius(v3(0.3, 0.0, 0.4));
  for (const Vec& x : ball_samples(3, 10, 4, 0.95)) {
    auto s = avg_derivative(*m3, x, 512);
    double ratio = s.value / *m3->conformal_factor(x);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
}

TEST_CASE("radial limits") {
  Vec w = v2(0.6, 0.8);
  auto id = radial_limit(*make_identity(2), w);
  CHECK(id.status == LimitStatus::Converged);
  CHECK((id.value - w).norm() < 1e-12);

  auto lg = make_planar_log1p();
  auto at1 = radial_limit(*lg, v2(1, 0));
  CHECK(at1.status == LimitStatus::Converged);
  CHECK(at1.value(0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(at1.value(1)) < 1e-12);

  auto atm1 = radial_limit(*lg, v2(-1, 0));
  CHECK(atm1.status == LimitStatus::Divergent);

  // closed form at e^{i theta}: log(2 cos(theta/2)) + i theta/2
  double th = 2.0;
  auto gen = radial_limit(*lg, v2(std::cos(th), std::sin(th)));
  CHECK(gen.status == LimitStatus::Converged);
  CHECK(gen.value(0) == doctest::Approx(std::log(2.0 * std::cos(th / 2.0))).epsilon(1e-9));
  CHECK(gen.value(1) == doctest::Approx(th / 2.0).epsilon(1e-9));
}

TEST_CASE("maximum modulus") {
  auto g2 = SphereGrid::make(2, 256);
  CHECK(max_modulus(*make_identity(2), 0.7, g2).value == doctest::Approx(0.7));
  auto lg = make_planar_log1p();
  for (double r : {0.5, 0.9, 0.999}) {
    auto mm = max_modulus(*lg, r, g2);
    CHECK(mm.value >= std::log(1.0 / (1.0 - r)) - 1e-12);
    CHECK(mm.direction(0) < -0.99);
  }
  Vec y0 = v2(0.3, -0.4);
  auto tr = make_translate(make_identity(2), y0);
  CHECK(max_modulus(*tr, 0.6, g2).value == doctest::Approx(0.6 + y0.norm()).epsilon(1e-10));
  auto g3 = SphereGrid::make(3, 400);
  Vec y3 = v3(0.1, 0.2, -0.3);
  auto tr3 = make_translate(make_identity(3), y3);
  CHECK(max_modulus(*tr3, 0.5, g3).value == doctest::Approx(0.5 + y3.norm()).epsilon(1e-8));
}

TEST_CASE("non-tangential maximal function") {
  auto id = make_identity(2);
  Vec w = v2(0, 1);
  auto prof = cone_sup_profile(*id, w, 30);
  for (std::size_t j = 1; j < prof.size(); ++j) CHECK(prof[j] >= prof[j - 1]);
  CHECK(prof.back() < 1.0);
  CHECK(prof.back() > 1.0 - 1e-8);

  auto lg = make_planar_log1p();
  double at1 = nontangential_max(*lg, v2(1, 0), 30);
  CHECK(at1 > 0.6);
  CHECK(at1 < 1.0);
  for (double th : {0.0, 1.0, 2.5, 3.1}) {
    Vec om = v2(std::cos(th), std::sin(th));
    CHECK(component_nontangential_max(*lg, 2, om, 30) <= kPi);
    CHECK(nontangential_max(*lg, om, 30) >= radial_limit(*lg, om).norms[29] - 1e-12);
  }
  CHECK(component_nontangential_max(*id, 1, v2(1, 0), 30) > 1.0 - 1e-8);
  auto st = make_radial_stretch(3, 2.0);
  double c = component_nontangential_max(*st, 1, v3(1, 0, 0), 30);
  CHECK(c < 1.0);
  CHECK(c > 1.0 - 1e-8);
  CHECK_THROWS_AS(component_nontangential_max(*id, 3, v2(1, 0), 5), std::invalid_argument);
}

TEST_CASE("image ball diameter") {
  Vec x = v2(0.5, 0.2);
  CHECK(image_ball_diameter(*make_identity(2), x) == doctest::Approx(1.0 - x.norm()).epsilon(1e-12));
  auto st = make_radial_stretch(2, 2.0);
  Vec y = v2(0.5, 0.0);
  // the Whitney ball [0.25, 0.75] on the axis maps onto [0.0625, 0.5625]
  CHECK(image_ball_diameter(*st, y) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(image_ball_diameter(*st, y) <= 0.5);
}

TEST_CASE("radial stretch averaged derivative reduces to a one-dimensional integral") {
  for (int n : {2, 3}) {
    auto f = make_radial_stretch(n, 2.0);
    for (double r : {0.0, 0.2, 0.5, 0.95}) {
      Vec x = basis_vec(n, 0) * r;
      auto mc = avg_derivative(*f, x, 4096, 7);
      double exact = averaged_derivative_value(*f, x);
      CHECK(std::abs(exact - mc.value) <= 4.0 * mc.std_error + 1e-9 * exact);
    }
  }
  auto g = make_translate(make_radial_stretch(3, 0.5), basis_vec(3, 1) * 3.0);
  Vec x = basis_vec(3, 2) * 0.4;
  CHECK(averaged_derivative_value(*g, x) ==
        doctest::Approx(averaged_derivative_value(*make_radial_stretch(3, 0.5), x)));
  auto mob = make_mobius(basis_vec(2, 0) * 0.3);
  CHECK(averaged_derivative_value(*mob, x.head(2)) == *mob->conformal_factor(x.head(2)));
}

TEST_CASE("max modulus keeps the first grid node when |f| is constant on the circle") {
  for (int n : {2, 3}) {
    auto grid = SphereGrid::make(n, 128);
    for (double r : {0.5, 0.999}) {
      CHECK(max_modulus(*make_identity(n), r, grid).direction == grid.node(0));
    }
  }
}
