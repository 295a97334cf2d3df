#include <doctest.h>

#include <cmath>
#include <sstream>

#include "holab/commands.hpp"

using namespace holab;

TEST_CASE("config text: comments, whitespace, later keys win") {
  RunConfig cfg;
  cfg.load_text(
      "# header\n"
      "\n"
      "quadrature.sphere_resolution = 512   # trailing comment\n"
      "  mc.seed=7\n"
      "psi = counterexample1\n"
      "mc.seed = 9\n"
      "modulus.tolerance = 1e-3\n"
      "lemmas.include_3d = false\n");
  CHECK(cfg.functional.sphere_resolution == 512);
  CHECK(cfg.seed == 9);
  CHECK(cfg.psi == "counterexample1");
  CHECK(cfg.modulus.tolerance == 1e-3);
  CHECK_FALSE(cfg.lemma_include_3d);
  CHECK(cfg.functional_config().seed == 9);
  CHECK(cfg.lemma_config().seed == 9);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors name the line") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.set("no.such.key", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.set("dim", "two"), ConfigError);
  CHECK_THROWS_AS(cfg.set("dim", "2.5"), ConfigError);
  CHECK_THROWS_AS(cfg.set("lemmas.include_3d", "maybe"), ConfigError);
  try {
    cfg.load_text("dim = 2\nmissing equals\n", "run.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(cfg.load_file("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("config validation enforces minimums") {
  auto bad = [](const char* key, const char* value) {
    RunConfig cfg;
    cfg.set(key, value);
    return [cfg] { cfg.validate(); };
  };
  CHECK_THROWS_AS(bad("dim", "4")(), ConfigError);
  CHECK_THROWS_AS(bad("quadrature.sphere_resolution", "8")(), ConfigError);
  CHECK_NOTHROW(bad("quadrature.sphere_resolution", "0")());
  CHECK_THROWS_AS(bad("quadrature.radial_points", "65")(), ConfigError);
  CHECK_THROWS_AS(bad("mc.af_budget", "32")(), ConfigError);
  CHECK_THROWS_AS(bad("delta.depth", "4")(), ConfigError);
  CHECK_THROWS_AS(bad("schedule.depth", "61")(), ConfigError);
  CHECK_THROWS_AS(bad("modulus.slack", "0.5")(), ConfigError);
  CHECK_THROWS_AS(bad("workers", "0")(), ConfigError);
}

TEST_CASE("recorded config covers every key but out and workers") {
  RunConfig cfg;
  auto j = cfg.to_json();
  CHECK(j.size() + 2 == RunConfig::keys().size());
  CHECK_FALSE(j.contains("out"));
  CHECK_FALSE(j.contains("workers"));
  CHECK(j["schedule.depth"] == 40);
  CHECK(j["psi"] == "power:1");
}

TEST_CASE("number rendering") {
  CHECK(json_number(0.1).get<double>() == 0.1);
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(json_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(json_number(std::nan("")) == "nan");
  // shortest round trip in JSON, 12 significant digits in CSV
  Json j = json_number(1.0 / 3.0);
  CHECK(std::stod(j.dump()) == 1.0 / 3.0);
  CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(csv_number(2.0) == "2");
  CHECK(csv_number(1e-20) == "1e-20");
}

TEST_CASE("generator specs") {
  auto ring = parse_generator("ring:1,2.718281828459045", 2, 64);
  CHECK(ring.generator == "ring");
  CHECK(ring.curves.size() == 64);
  CHECK(*ring.exact_reference == doctest::Approx(2.0 * kPi));
  auto radial = parse_generator("radial:0.5,1.0471975511965976", 3, 100);
  CHECK(radial.dim == 3);
  CHECK(radial.generator == "radial");
  CHECK_THROWS_AS(parse_generator("ring:2,1", 2), SpecError);
  CHECK_THROWS_AS(parse_generator("ring:1", 2), SpecError);
  CHECK_THROWS_AS(parse_generator("radial:1.5", 2), SpecError);
  CHECK_THROWS_AS(parse_generator("radial:0.5,4", 2), SpecError);
  CHECK_THROWS_AS(parse_generator("spiral:1", 2), SpecError);
  CHECK_THROWS_AS(parse_generator("ring:1,x", 2), SpecError);
}

TEST_CASE("measure specs") {
  RunConfig cfg;
  CHECK(parse_measure("lebesgue", cfg).kind == BallMeasure::Kind::Density);
  auto dy = parse_measure("dyadic:identity", cfg);
  CHECK(dy.kind == BallMeasure::Kind::PointMasses);
  CHECK(dy.points.size() == 40);
  // the split between map and psi tokens is found by parsing both sides
  auto ratio = parse_measure("ratio:translate:2,0@mobius:0.5,0.3:power:2", cfg);
  CHECK(ratio.kind == BallMeasure::Kind::Density);
  CHECK(std::isfinite(ratio.density_at(zero_vec(2))));
  CHECK_THROWS_AS(parse_measure("ratio:identity:power:1", cfg), SpecError);
  CHECK_THROWS_AS(parse_measure("ratio:identity", cfg), SpecError);
  CHECK_THROWS_AS(parse_measure("points:/nonexistent.csv", cfg), SpecError);
  CHECK_THROWS_AS(parse_measure("gaussian", cfg), SpecError);
}

TEST_CASE("report csv has one row per criterion per delta") {
  auto f = make_identity(2);
  FunctionalConfig fc;
  fc.sphere_resolution = 256;
  fc.schedule_depth = 16;
  fc.delta_depth = 8;
  auto rep = membership_report(*f, GrowthFunction::power(2.0), fc);
  std::ostringstream out;
  write_report_csv(rep, out);
  std::size_t expected = 1;  // header
  for (const auto& c : rep.criteria) expected += c.scan ? c.scan->entries.size() : 1;
  std::string s = out.str();
  CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == expected);

  std::ostringstream plot;
  write_plot_data(rep.criteria.front().result, plot);
  std::string p = plot.str();
  CHECK(p.rfind("k,u,partial\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(p.begin(), p.end(), '\n')) ==
        rep.criteria.front().result.partials.size() + 1);

  auto j = to_json(rep);
  CHECK(j["overall"] == "in");
  CHECK(j["criteria"].size() == rep.criteria.size());
}
