// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance <path to holab CLI> [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "holab/commands.hpp"
#include "holab/functionals.hpp"
#include "holab/growth.hpp"
#include "holab/lemmas.hpp"
#include "holab/modulus.hpp"
#include "holab/qcmap.hpp"

using namespace holab;
namespace fs = std::filesystem;

namespace {

std::string g_cli;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// composite Simpson rule, n even
template <class F>
double simpson(F g, double a, double b, int n = 200000) {
  double h = (b - a) / n, s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("holab-acceptance-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1. identity map, psi = t^p
Outcome closed_forms() {
  Outcome o{true, ""};
  double worst = 0.0, slowest = 0.0;
  auto record = [&](double value, double oracle, double secs) {
    worst = std::max(worst, std::abs(value / oracle - 1.0));
    slowest = std::max(slowest, secs);
  };
  for (double p : {0.5, 1.0, 2.0}) {
    auto psi = GrowthFunction::power(p);
    for (int n : {2, 3}) {
      Timer t;
      auto h = hpsi_sup_integral(*make_identity(n), psi, 1.0);
      record(h.value, sphere_measure(n), t.seconds());
      o.pass = o.pass && h.verdict == Verdict::Finite;
    }
    auto id = make_identity(2);
    {
      Timer t;
      auto m = maxmod_integral(*id, psi, 1.0);
      record(m.value, 1.0 / (p + 1.0), t.seconds());
      o.pass = o.pass && m.verdict == Verdict::Finite;
    }
    {
      // 2 pi int_0^1 (1-r)^{p-1} r dr with 1 - r = v^2, which removes the endpoint singularity
      double oracle = 2.0 * kPi * simpson([&](double v) { return 2.0 * std::pow(v, 2.0 * p - 1.0) * (1.0 - v * v); },
                                          0.0, 1.0);
      Timer t;
      auto a = area_integral(*id, psi);
      record(a.value, oracle, t.seconds());
      o.pass = o.pass && a.verdict == Verdict::Finite;
    }
  }
  o.pass = o.pass && worst < 0.01 && slowest < 10.0;
  o.detail = "12 cases, worst relative error " + fmt("%.2e", worst) + ", slowest " + fmt("%.2f", slowest) + " s";
  return o;
}

// 2. counterexample verdict splits
Outcome counterexamples() {
  RunConfig cfg;
  cfg.out = scratch_dir("counterexamples").string();
  Timer t;
  auto r = cmd_counterexamples(cfg);
  double secs = t.seconds();
  const auto& pairs = r.document["result"]["pairs"];
  double normalized = pairs[2]["area_value"]["normalized"].get<double>();
  Outcome o;
  o.pass = r.exit_code == kExitOk && std::abs(normalized / 4.0 - 1.0) < 0.02 && secs < 120.0;
  o.detail = std::string(r.exit_code == kExitOk ? "3/3 splits match" : "split mismatch") +
             ", pair 3 normalized area " + fmt("%.6f", normalized) + ", " + fmt("%.1f", secs) + " s";
  if (r.exit_code != kExitOk) o.detail += "\n" + r.summary;
  return o;
}

// 3. pair 1 area partials grow like log log(1/eps)
Outcome divergence_rate() {
  Schedule s;
  s.eps = {1e-3, 1e-4, 1e-5, 1e-6};
  auto samples = area_samples(*make_identity(2), true, {}, s);
  auto r = evaluate(samples, GrowthFunction::counterexample1(), 1.0);
  std::vector<double> x;
  for (double e : s.eps) x.push_back(std::log(std::log(1.0 / e)));
  auto fit = fit_line(x, r.partials);
  // psi_1(t) = 1/log(1/t) on t < 1/2: the increment is 2 pi int (1-u) du / (u log 1/u)
  // over [1e-6, 1e-3], in s = log(1/u): 2 pi int (1 - e^-s)/s ds
  double oracle = 2.0 * kPi * simpson([](double v) { return (1.0 - std::exp(-v)) / v; }, std::log(1e3), std::log(1e6));
  double increment = r.partials.back() - r.partials.front();
  Outcome o;
  o.pass = fit.r_squared > 0.99 && std::abs(increment / oracle - 1.0) < 0.01;
  o.detail = "R^2 = " + fmt("%.6f", fit.r_squared) + ", increment " + fmt("%.6f", increment) + " vs 1D oracle " +
             fmt("%.6f", oracle);
  return o;
}

// 4. equivalence matrix over the builtin cross product
Outcome equivalence_matrix() {
  const std::vector<GrowthFunction> psis{GrowthFunction::power(0.5),      GrowthFunction::power(1.0),
                                         GrowthFunction::power(2.0),      GrowthFunction::counterexample1(),
                                         GrowthFunction::counterexample2(), GrowthFunction::counterexample3()};
  const std::set<std::string> regimes{"counterexample1", "counterexample2", "counterexample3"};
  auto maps = builtin_matrix(2, false);
  for (const auto& f : builtin_matrix(3, false)) maps.push_back(f);
  int cases = 0, t1_bad = 0, t2_bad = 0, unflagged = 0, flagged = 0, inconclusive = 0;
  std::string where;
  for (const auto& f : maps) {
    auto samples = compute_samples(*f);
    for (const auto& psi : psis) {
      auto rep = membership_report(samples, psi);
      ++cases;
      if (!rep.theorem1_agree) {
        ++t1_bad;
        where += " t1:" + f->name() + "/" + psi.name();
      }
      if (!rep.theorem2_agree) {
        ++t2_bad;
        where += " t2:" + f->name() + "/" + psi.name();
      }
      if (rep.theorem1_verdict == Verdict::Inconclusive) ++inconclusive;
      // any disagreement between the Theorem-1 verdict and a conclusive Theorem-2 criterion
      bool differs = false;
      for (const auto& c : rep.criteria) {
        if (c.group == "theorem2" && c.verdict != Verdict::Inconclusive && rep.theorem1_verdict != Verdict::Inconclusive &&
            c.verdict != rep.theorem1_verdict) {
          differs = true;
        }
      }
      if (rep.counterexample_regime) ++flagged;
      if (differs && !(rep.counterexample_regime && regimes.count(psi.name()))) {
        ++unflagged;
        where += " unflagged:" + f->name() + "/" + psi.name();
      }
      if (rep.counterexample_regime && !regimes.count(psi.name())) {
        ++unflagged;
        where += " spurious-flag:" + f->name() + "/" + psi.name();
      }
    }
  }
  Outcome o;
  o.pass = t1_bad == 0 && t2_bad == 0 && unflagged == 0;
  o.detail = std::to_string(maps.size()) + " maps x " + std::to_string(psis.size()) + " psi = " + std::to_string(cases) +
             " cases; theorem-1 disagreements " + std::to_string(t1_bad) + ", theorem-2 disagreements " +
             std::to_string(t2_bad) + ", flagged regimes " + std::to_string(flagged) + ", unexplained " +
             std::to_string(unflagged) + ", inconclusive " + std::to_string(inconclusive) + where;
  return o;
}

// 5. modulus closed forms and quasi-invariance
Outcome modulus() {
  Outcome o{true, ""};
  double slowest = 0.0;
  std::ostringstream d;
  auto run = [&](const std::string& name, const CurveFamily& fam, int resolution, double tol) {
    ModulusSolverParams params;
    params.resolution = resolution;
    Timer t;
    auto e = numeric_modulus(fam, params);
    slowest = std::max(slowest, t.seconds());
    bool ok = std::abs(*e.relative_error) < tol;
    o.pass = o.pass && ok;
    d << name << "@" << e.resolution << " " << fmt("%+.2f%%", 100.0 * *e.relative_error) << (ok ? "" : " (FAIL)")
      << "; ";
  };
  const int fine = 2 * default_resolution(2);
  const int fine_curves = scaled_curve_count(2, fine);
  struct Planar {
    std::string name;
    std::function<CurveFamily(int)> make;
  };
  const Planar planar[] = {
      {"ring(1,e)", [](int c) { return ring_family(zero_vec(2), 1.0, std::exp(1.0), c); }},
      {"radial(1/e)", [](int c) { return radial_family(Cap{basis_vec(2, 0), kPi}, std::exp(-1.0), c); }},
      {"radial(1/e,pi/3)", [](int c) { return radial_family(Cap{basis_vec(2, 1), kPi / 3.0}, std::exp(-1.0), c); }},
  };
  for (const auto& p : planar) {
    run(p.name, p.make(0), 0, 0.10);
    run(p.name, p.make(fine_curves), fine, 0.05);
  }
  run("ring3(1,e^2)", ring_family(zero_vec(3), 1.0, std::exp(2.0)), 0, 0.15);

  Vec a(2);
  a << 0.5, 0.3;
  for (const auto& f : {make_mobius(a), make_radial_stretch(2, 2.0)}) {
    Timer t;
    auto q = quasi_invariance_check(*f, ring_family(zero_vec(2), 0.25, 0.5), {}, 1.25);
    slowest = std::max(slowest, t.seconds());
    o.pass = o.pass && q.within;
    d << f->name() << " ratio " << fmt("%.4f", q.ratio) << " (K=" << fmt("%g", q.k_bound) << ")"
      << (q.within ? "" : " (FAIL)") << "; ";
  }
  o.pass = o.pass && slowest < 300.0;
  o.detail = d.str() + "slowest " + fmt("%.1f", slowest) + " s";
  return o;
}

// 6. a_f = |f'| for the conformal planar builtins
Outcome conformal_af() {
  Vec a(2);
  a << 0.5, 0.3;
  Outcome o{true, ""};
  double worst_dev = 0.0, worst_err = 0.0;
  auto xs = ball_samples(2, 100, 6);
  for (const auto& f : {make_planar_log1p(), make_mobius(a)}) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto s = avg_derivative(*f, xs[i], 256, 100 + i);
      double c = *f->conformal_factor(xs[i]);
      double rel_err = s.std_error / s.value;
      double dev = std::abs(s.value / c - 1.0);
      worst_err = std::max(worst_err, rel_err);
      worst_dev = std::max(worst_dev, rel_err > 0.0 ? dev / rel_err : (dev > 0.0 ? kInf : 0.0));
      o.pass = o.pass && rel_err < 0.02 && dev < 3.0 * rel_err;
    }
  }
  o.detail = "log1p and mobius at 100 points: max |a_f/|f'| - 1| / stderr = " + fmt("%.3f", worst_dev) +
             ", max relative stderr " + fmt("%.2e", worst_err);
  return o;
}

// 7. lemma suites on the builtin matrix
Outcome lemma_suites() {
  RunConfig cfg;
  cfg.out = scratch_dir("lemmas").string();
  Timer t;
  auto r = cmd_lemmas(cfg, {});
  Outcome o;
  o.pass = r.exit_code == kExitOk;
  std::string s = r.summary;
  for (auto& ch : s) {
    if (ch == '\n') ch = ';';
  }
  o.detail = s + " " + fmt("%.0f", t.seconds()) + " s";
  return o;
}

// 8. doubling verdicts of the builtin growth functions
Outcome growth_classification() {
  struct Expect {
    GrowthFunction psi;
    DoublingVerdict forward;
    std::optional<DoublingVerdict> inverse;
  };
  const Expect cases[] = {
      {GrowthFunction::counterexample1(), DoublingVerdict::Doubling, DoublingVerdict::NotDoubling},
      {GrowthFunction::counterexample2(), DoublingVerdict::NotDoubling, std::nullopt},
      {GrowthFunction::counterexample3(), DoublingVerdict::NotDoubling, std::nullopt},
      {GrowthFunction::identity(), DoublingVerdict::Doubling, DoublingVerdict::Doubling},
      {GrowthFunction::power(0.5), DoublingVerdict::Doubling, DoublingVerdict::Doubling},
      {GrowthFunction::power(2.0), DoublingVerdict::Doubling, DoublingVerdict::Doubling},
  };
  Outcome o{true, ""};
  for (const auto& c : cases) {
    auto f = doubling_report(c.psi);
    auto i = inverse_doubling_report(c.psi);
    bool ok = f.verdict == c.forward && (!c.inverse || i.verdict == *c.inverse);
    o.pass = o.pass && ok;
    o.detail += c.psi.name() + " " + to_string(f.verdict) + "/" + to_string(i.verdict) + (ok ? "" : " (FAIL)") + "; ";
  }
  return o;
}

// 9. byte-identical JSON when a command is rerun with the same seed
Outcome determinism() {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"analyze --map log1p --psi counterexample3", "report.json"},
      {"analyze --map mobius:0.5,0.3,-0.2 --psi power:2 --dim 3", "report.json"},
      {"counterexamples", "counterexamples.json"},
      {"--set lemmas.samples=40 --set lemmas.lemma1_samples=100 lemmas lemma1 lemma2 lemma4 thm4",
       "lemmas.json"},
      {"modulus --generator ring:0.25,0.5 --map stretch:2", "modulus.json"},
      {"--dim 3 modulus --generator ring:1,7.38905609893065", "modulus.json"},
      {"carleson --measure ratio:translate:0,2@log1p:power:0.5", "carleson.json"},
      {"carleson --measure dyadic:stretch:0.5", "carleson.json"},
  };
  auto base = scratch_dir("determinism");
  Outcome o{true, ""};
  int same = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string docs[3];
    // third run with a different worker count: results must not depend on it
    for (int k = 0; k < 3; ++k) {
      auto dir = base / (std::to_string(i) + "-" + std::to_string(k));
      std::string cmd = "\"" + g_cli + "\" --seed 11 --workers " + (k == 2 ? "3" : "1") + " --out \"" + dir.string() +
                        "\" " + runs[i].first + " > /dev/null 2>&1";
      int rc = std::system(cmd.c_str());
      docs[k] = rc == -1 ? "" : slurp(dir / runs[i].second);
    }
    bool ok = !docs[0].empty() && docs[0] == docs[1] && docs[0] == docs[2];
    same += ok;
    if (!ok) o.detail += "differs: " + runs[i].first + "; ";
    o.pass = o.pass && ok;
  }
  o.detail += std::to_string(same) + "/" + std::to_string(runs.size()) +
              " commands byte-identical across reruns and worker counts";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <holab CLI> [criteria...]\n");
    return 2;
  }
  g_cli = argv[1];
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"closed-form integrals", closed_forms}},
      {2, {"counterexample splits", counterexamples}},
      {3, {"pair 1 divergence rate", divergence_rate}},
      {4, {"equivalence matrix", equivalence_matrix}},
      {5, {"modulus", modulus}},
      {6, {"conformal a_f identity", conformal_af}},
      {7, {"lemma suites", lemma_suites}},
      {8, {"growth classification", growth_classification}},
      {9, {"determinism", determinism}},
  };
  std::set<int> selected;
  for (int i = 2; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& [id, c] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    Timer t;
    Outcome o;
    try {
      o = c.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %d  %-24s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", id, c.first.c_str(), t.seconds(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
