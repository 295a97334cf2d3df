#include "holab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "holab/parallel.hpp"

namespace holab {

namespace {

constexpr int kRadialLimitLevels = 52;

bool is_conformal(const QcMap& f) { return f.conformal_factor(zero_vec(f.dim())).has_value(); }

/// Angular rule for sphere integrals of f: graded toward the boundary
/// singularity when there is one, with the excluded tip added as one node at
/// the pole.
SphereRule angular_rule(const QcMap& f, int uniform_resolution, int polar_levels) {
  if (auto pole = f.boundary_singularity()) {
    SphereRule rule = polar_rule(*pole, polar_levels, 8, 32);
    rule.nodes.push_back(*pole);
    rule.weights.push_back(rule.excluded_measure);
    rule.excluded_measure = 0.0;
    return rule;
  }
  return uniform_rule(SphereGrid::make(f.dim(), uniform_resolution));
}

int polar_levels(const FunctionalConfig& cfg, const Schedule& s) {
  int deepest = static_cast<int>(std::ceil(std::log2(1.0 / s.eps.back())));
  return std::max(deepest, cfg.schedule_depth) + cfg.polar_extra_levels;
}

CriterionSamples make_samples(CriterionId id, bool cumulative, const Schedule& schedule) {
  CriterionSamples out;
  out.id = id;
  out.cumulative = cumulative;
  out.schedule = schedule;
  out.levels.resize(schedule.eps.size());
  return out;
}

/// Snapshot samples where node i contributes value[i][k] at level k.
void fill_snapshot(CriterionSamples& out, const SphereRule& rule, const std::vector<std::vector<double>>& values) {
  for (std::size_t k = 0; k < out.levels.size(); ++k) {
    auto& level = out.levels[k];
    level.weights = rule.weights;
    level.sizes.resize(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) level.sizes[i] = values[i][k];
  }
  out.nodes = rule.nodes.size();
}

struct RadialLayerNode {
  std::size_t level;
  double r;
  double u;
  double weight;  // du weight
};

std::vector<RadialLayerNode> layered_radial_nodes(const Schedule& s, int points) {
  const GaussRule& gl = gauss_legendre(points);
  std::vector<RadialLayerNode> out;
  double u_prev = 0.0;
  auto u = s.u();
  auto panel = [&](std::size_t k, double a, double b) {
    double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      double uu = mid + half * gl.nodes[j];
      out.push_back({k, -std::expm1(-uu), uu, half * gl.weights[j]});
    }
  };
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (k == 0) {
      // panels graded toward r = 0, where powers of r are not smooth
      double lo = 0.0;
      for (int g = 16; g >= 0; --g) {
        double hi = u[0] * std::ldexp(1.0, -2 * g);
        panel(0, lo, hi);
        lo = hi;
      }
    } else {
      panel(k, u_prev, u[k]);
    }
    u_prev = u[k];
  }
  return out;
}

CriterionSamples cone_samples(const QcMap& f, CriterionId id, int component, const FunctionalConfig& cfg) {
  Schedule s = Schedule::dyadic(cfg.schedule_depth);
  CriterionSamples out = make_samples(id, false, s);
  out.component = component + 1;
  out.mode = "quadrature";
  SphereRule rule = angular_rule(f, cfg.resolved_sphere(f.dim()), polar_levels(cfg, s));
  std::vector<std::vector<double>> values(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    auto profile = cone_sup_profile(f, rule.nodes[i], cfg.schedule_depth, component, cfg.cone_points, cfg.seed);
    values[i].assign(profile.begin() + 1, profile.end());
  });
  fill_snapshot(out, rule, values);
  return out;
}

}  // namespace

std::string to_string(CriterionId id) {
  switch (id) {
    case CriterionId::HPsiSup:
      return "H_psi_sup";
    case CriterionId::BoundaryL1:
      return "boundary_L1";
    case CriterionId::NtmaxL1:
      return "ntmax_L1";
    case CriterionId::MaxmodIntegral:
      return "maxmod_integral";
    case CriterionId::AreaIntegral:
      return "area_integral";
    case CriterionId::ComponentNtmax:
      return "component_ntmax";
    case CriterionId::ConeAfSup:
      return "cone_af_sup";
  }
  return "unknown";
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::In:
      return "in";
    case Membership::Out:
      return "out";
    case Membership::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Schedule Schedule::dyadic(int depth) {
  if (depth < 2) throw std::invalid_argument("schedule depth must be >= 2");
  Schedule s;
  for (int k = 1; k <= depth; ++k) s.eps.push_back(std::ldexp(1.0, -k));
  return s;
}

std::vector<double> Schedule::u() const {
  std::vector<double> out;
  for (double e : eps) out.push_back(std::log(1.0 / e));
  return out;
}

int FunctionalConfig::resolved_sphere(int n) const {
  if (sphere_resolution > 0) return sphere_resolution;
  return n == 2 ? 1024 : 2048;
}

int FunctionalConfig::resolved_area_angular(int n) const {
  if (area_angular > 0) return area_angular;
  return n == 2 ? 256 : 512;
}

CriterionResult evaluate(const CriterionSamples& samples, const GrowthFunction& psi, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  CriterionResult out;
  out.id = samples.id;
  out.component = samples.component;
  out.mode = samples.mode;
  out.delta = delta;
  out.u = samples.schedule.u();
  TailProbe probe;
  probe.log_psi = [&psi, delta](double s) { return psi.log_value(delta * s); };
  double acc = 0.0;
  double last_size = 0.0;
  for (std::size_t k = 0; k < samples.levels.size(); ++k) {
    const auto& level = samples.levels[k];
    double sum = 0.0, biggest = level.sizes.empty() ? last_size : 0.0;
    for (std::size_t i = 0; i < level.sizes.size(); ++i) {
      double s = level.sizes[i];
      biggest = std::max(biggest, s);
      sum += level.weights[i] * eval(psi, delta * s);
    }
    if (!std::isfinite(sum) && !out.overflow_level) {
      out.overflow_level = static_cast<int>(k) + 1;
      out.overflow_size = biggest;
    }
    acc = samples.cumulative ? acc + sum : std::max(acc, sum);
    out.partials.push_back(acc);
    probe.sizes.push_back(biggest);
    last_size = biggest;
  }
  out.fit = classify(out.u, out.partials, &probe);
  out.verdict = out.fit.verdict;
  if (samples.nodes > 0 && samples.inconclusive_nodes * 100 > samples.nodes && out.verdict == Verdict::Finite) {
    out.verdict = Verdict::Inconclusive;
    out.fit.rule = "radial-limits-inconclusive";
  }
  out.value = out.partials.empty() ? 0.0 : out.partials.back();
  return out;
}

CriterionSamples hpsi_sup_samples(const QcMap& f, const FunctionalConfig& cfg) {
  Schedule s = Schedule::dyadic(cfg.schedule_depth);
  CriterionSamples out = make_samples(CriterionId::HPsiSup, false, s);
  out.mode = "quadrature";
  SphereRule rule = angular_rule(f, cfg.resolved_sphere(f.dim()), polar_levels(cfg, s));
  std::vector<std::vector<double>> values(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    for (double e : s.eps) values[i].push_back(f.eval((1.0 - e) * rule.nodes[i]).norm());
  });
  fill_snapshot(out, rule, values);
  return out;
}

CriterionSamples boundary_samples(const QcMap& f, const FunctionalConfig& cfg) {
  Schedule s = Schedule::dyadic(cfg.schedule_depth);
  CriterionSamples out = make_samples(CriterionId::BoundaryL1, true, s);
  out.mode = "quadrature";
  auto pole = f.boundary_singularity();
  SphereRule rule = pole ? polar_rule(*pole, polar_levels(cfg, s), 8, 32)
                         : uniform_rule(SphereGrid::make(f.dim(), cfg.resolved_sphere(f.dim())));
  std::vector<double> sizes(rule.nodes.size());
  std::vector<char> bad(rule.nodes.size(), 0);
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    RadialLimit lim = radial_limit(f, rule.nodes[i], kRadialLimitLevels);
    if (lim.status == LimitStatus::Converged) {
      sizes[i] = lim.value.norm();
    } else {
      // |f| along the ray is the best available lower bound for the limit
      sizes[i] = lim.norms.empty() ? 0.0 : lim.norms.back();
      bad[i] = 1;
    }
  });
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    std::size_t level = 0;
    if (pole) {
      double frac = angle_between(rule.nodes[i], *pole) / kPi;
      if (frac < s.eps.back()) continue;
      while (level + 1 < s.eps.size() && frac < s.eps[level]) ++level;
    }
    out.levels[level].weights.push_back(rule.weights[i]);
    out.levels[level].sizes.push_back(sizes[i]);
    out.inconclusive_nodes += bad[i];
    ++out.nodes;
  }
  return out;
}

CriterionSamples ntmax_samples(const QcMap& f, const FunctionalConfig& cfg) {
  return cone_samples(f, CriterionId::NtmaxL1, -1, cfg);
}

CriterionSamples component_ntmax_samples(const QcMap& f, int i, const FunctionalConfig& cfg) {
  if (i < 1 || i > f.dim()) throw std::invalid_argument("component index must be in 1..n");
  CriterionSamples out = cone_samples(f, CriterionId::ComponentNtmax, i - 1, cfg);
  out.uses_delta = false;
  return out;
}

CriterionSamples maxmod_samples(const QcMap& f, const FunctionalConfig& cfg, std::optional<Schedule> schedule) {
  Schedule s = schedule ? *schedule : Schedule::dyadic(cfg.schedule_depth);
  CriterionSamples out = make_samples(CriterionId::MaxmodIntegral, true, s);
  out.mode = "quadrature";
  const int n = f.dim();
  auto grid = SphereGrid::make(n, cfg.resolved_sphere(n));
  auto nodes = layered_radial_nodes(s, cfg.radial_points);
  std::vector<double> sizes(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t j) { sizes[j] = max_modulus(f, nodes[j].r, grid).value; });
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    auto& level = out.levels[nodes[j].level];
    // (1-r)^{n-2} dr = e^{-(n-1)u} du
    level.weights.push_back(std::exp(-(n - 1) * nodes[j].u) * nodes[j].weight);
    level.sizes.push_back(sizes[j]);
  }
  out.nodes = nodes.size();
  return out;
}

CriterionSamples area_samples(const QcMap& f, bool analytic, const FunctionalConfig& cfg,
                              std::optional<Schedule> schedule) {
  if (analytic && !is_conformal(f)) throw std::invalid_argument("analytic area mode needs a conformal map");
  Schedule s = schedule ? *schedule : Schedule::dyadic(cfg.schedule_depth);
  CriterionSamples out = make_samples(CriterionId::AreaIntegral, true, s);
  out.mode = analytic ? "analytic" : "mc";
  out.uses_delta = false;
  const int n = f.dim();
  SphereRule rule = angular_rule(f, cfg.resolved_area_angular(n), polar_levels(cfg, s));
  auto radial = layered_radial_nodes(s, cfg.radial_points);
  std::vector<std::vector<double>> sizes(radial.size());
  parallel_for(radial.size(), [&](std::size_t j) {
    const double r = radial[j].r;
    sizes[j].resize(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      Vec x = r * rule.nodes[i];
      double a = analytic ? *f.conformal_factor(x)
                          : avg_derivative(f, x, cfg.af_budget, cfg.seed + 104729u * j + i).value;
      sizes[j][i] = a * (1.0 - r);
    }
  });
  for (std::size_t j = 0; j < radial.size(); ++j) {
    auto& level = out.levels[radial[j].level];
    // dx/(1-|x|) = r^{n-1} du dsigma
    double radial_weight = std::pow(radial[j].r, n - 1) * radial[j].weight;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      level.weights.push_back(radial_weight * rule.weights[i]);
      level.sizes.push_back(sizes[j][i]);
    }
  }
  out.nodes = radial.size() * rule.nodes.size();
  return out;
}

CriterionSamples cone_af_samples(const QcMap& f, const FunctionalConfig& cfg) {
  Schedule s = Schedule::dyadic(cfg.schedule_depth);
  CriterionSamples out = make_samples(CriterionId::ConeAfSup, false, s);
  const bool analytic = is_conformal(f);
  out.mode = analytic ? "analytic" : "mc";
  out.uses_delta = false;
  const int n = f.dim();
  SphereRule rule = angular_rule(f, std::min(cfg.resolved_sphere(n), 512), polar_levels(cfg, s));
  auto g = [&](const Vec& x) {
    double a = analytic ? *f.conformal_factor(x) : avg_derivative(f, x, 64, cfg.seed).value;
    return a * (1.0 - x.norm());
  };
  std::vector<std::vector<double>> values(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    auto profile = cone_sup_profile(n, rule.nodes[i], cfg.schedule_depth, g, analytic ? cfg.cone_points : 4, cfg.seed);
    values[i].assign(profile.begin() + 1, profile.end());
  });
  fill_snapshot(out, rule, values);
  return out;
}

CriterionResult hpsi_sup_integral(const QcMap& f, const GrowthFunction& psi, double delta,
                                  const FunctionalConfig& cfg) {
  return evaluate(hpsi_sup_samples(f, cfg), psi, delta);
}

CriterionResult boundary_lpsi(const QcMap& f, const GrowthFunction& psi, double delta, const FunctionalConfig& cfg) {
  return evaluate(boundary_samples(f, cfg), psi, delta);
}

CriterionResult ntmax_lpsi(const QcMap& f, const GrowthFunction& psi, double delta, const FunctionalConfig& cfg) {
  return evaluate(ntmax_samples(f, cfg), psi, delta);
}

CriterionResult maxmod_integral(const QcMap& f, const GrowthFunction& psi, double delta,
                                const FunctionalConfig& cfg) {
  return evaluate(maxmod_samples(f, cfg), psi, delta);
}

CriterionResult area_integral(const QcMap& f, const GrowthFunction& psi, const FunctionalConfig& cfg) {
  return evaluate(area_samples(f, is_conformal(f), cfg), psi, 1.0);
}

CriterionResult component_ntmax_lpsi(const QcMap& f, int i, const GrowthFunction& psi,
                                     const FunctionalConfig& cfg) {
  return evaluate(component_ntmax_samples(f, i, cfg), psi, 1.0);
}

CriterionResult cone_af_sup_lpsi(const QcMap& f, const GrowthFunction& psi, const FunctionalConfig& cfg) {
  return evaluate(cone_af_samples(f, cfg), psi, 1.0);
}

DeltaScan delta_scan(const CriterionSamples& samples, const GrowthFunction& psi, int depth) {
  if (depth < 8) throw std::invalid_argument("delta scan depth must be >= 8");
  DeltaScan out;
  bool any_finite = false, all_divergent = true;
  std::optional<Verdict> seen;
  for (int j = 0; j <= depth; ++j) {
    double delta = std::ldexp(1.0, -j);
    CriterionResult r = evaluate(samples, psi, delta);
    out.entries.push_back({delta, r.verdict, r.value});
    if (r.verdict == Verdict::Finite && !any_finite) {
      any_finite = true;
      out.first_finite = delta;
    }
    all_divergent = all_divergent && r.verdict == Verdict::Divergent;
    if (r.verdict != Verdict::Inconclusive) {
      if (seen && *seen != r.verdict) out.delta_independent = false;
      seen = r.verdict;
    }
  }
  out.verdict = any_finite ? Verdict::Finite : all_divergent ? Verdict::Divergent : Verdict::Inconclusive;
  return out;
}

MapSamples compute_samples(const QcMap& f, const FunctionalConfig& cfg) {
  MapSamples out;
  out.map_name = f.name();
  out.dim = f.dim();
  out.criteria.push_back(hpsi_sup_samples(f, cfg));
  out.criteria.push_back(boundary_samples(f, cfg));
  out.criteria.push_back(ntmax_samples(f, cfg));
  out.criteria.push_back(maxmod_samples(f, cfg));
  if (is_conformal(f)) out.criteria.push_back(area_samples(f, true, cfg));
  out.criteria.push_back(area_samples(f, false, cfg));
  for (int i = 1; i <= f.dim(); ++i) out.criteria.push_back(component_ntmax_samples(f, i, cfg));
  out.criteria.push_back(cone_af_samples(f, cfg));
  return out;
}

MembershipReport membership_report(const MapSamples& samples, const GrowthFunction& psi, const FunctionalConfig& cfg) {
  MembershipReport rep;
  rep.map_name = samples.map_name;
  rep.growth_name = psi.name();
  rep.dim = samples.dim;
  rep.doubling = doubling_report(psi);
  rep.inverse_doubling = inverse_doubling_report(psi);
  const bool both_doubling =
      rep.doubling.verdict == DoublingVerdict::Doubling && rep.inverse_doubling.verdict == DoublingVerdict::Doubling;
  const bool has_analytic_area = std::any_of(samples.criteria.begin(), samples.criteria.end(), [](const auto& c) {
    return c.id == CriterionId::AreaIntegral && c.mode == "analytic";
  });

  for (const auto& cs : samples.criteria) {
    CriterionReport cr;
    switch (cs.id) {
      case CriterionId::HPsiSup:
      case CriterionId::BoundaryL1:
      case CriterionId::NtmaxL1:
      case CriterionId::MaxmodIntegral:
        cr.group = "theorem1";
        break;
      case CriterionId::AreaIntegral:
      case CriterionId::ComponentNtmax:
        cr.group = "theorem2";
        cr.binding = both_doubling && !(cs.id == CriterionId::AreaIntegral && cs.mode == "mc" && has_analytic_area);
        break;
      case CriterionId::ConeAfSup:
        cr.group = "lemma8";
        cr.binding = false;
        break;
    }
    if (cs.uses_delta) {
      cr.scan = delta_scan(cs, psi, cfg.delta_depth);
      cr.verdict = cr.scan->verdict;
      cr.result = evaluate(cs, psi, cr.scan->first_finite.value_or(1.0));
      if (!cr.scan->delta_independent && both_doubling) rep.flags.push_back("delta-dependence:" + to_string(cs.id));
    } else {
      cr.result = evaluate(cs, psi, 1.0);
      cr.verdict = cr.result.verdict;
    }
    rep.criteria.push_back(std::move(cr));
  }

  // Theorem 1 group
  std::optional<Verdict> t1;
  for (const auto& cr : rep.criteria) {
    if (cr.group != "theorem1" || cr.verdict == Verdict::Inconclusive) continue;
    if (t1 && *t1 != cr.verdict) rep.theorem1_agree = false;
    t1 = cr.verdict;
  }
  if (!rep.theorem1_agree) {
    rep.flags.push_back("theorem1-disagreement");
    rep.theorem1_verdict = Verdict::Inconclusive;
  } else if (t1) {
    rep.theorem1_verdict = *t1;
  }

  // Theorem 2 group against the Theorem 1 verdict
  bool t2_differs = false;
  for (const auto& cr : rep.criteria) {
    if (cr.group != "theorem2" || cr.verdict == Verdict::Inconclusive) continue;
    if (cr.result.id == CriterionId::AreaIntegral && cr.result.mode == "mc" && has_analytic_area) continue;
    if (rep.theorem1_verdict != Verdict::Inconclusive && cr.verdict != rep.theorem1_verdict) t2_differs = true;
  }
  if (both_doubling) {
    rep.theorem2_agree = !t2_differs;
    if (t2_differs) rep.flags.push_back("theorem2-disagreement");
  } else if (t2_differs) {
    rep.counterexample_regime = true;
    rep.flags.push_back("counterexample-regime");
  }

  // the two area modes should agree
  std::optional<Verdict> analytic_area, mc_area;
  for (const auto& cr : rep.criteria) {
    if (cr.result.id != CriterionId::AreaIntegral) continue;
    (cr.result.mode == "analytic" ? analytic_area : mc_area) = cr.verdict;
  }
  if (analytic_area && mc_area && *analytic_area != Verdict::Inconclusive && *mc_area != Verdict::Inconclusive &&
      *analytic_area != *mc_area) {
    rep.flags.push_back("area-mode-disagreement");
  }

  std::optional<Verdict> overall;
  bool conflict = false;
  for (const auto& cr : rep.criteria) {
    if (!cr.binding || cr.verdict == Verdict::Inconclusive) continue;
    if (overall && *overall != cr.verdict) conflict = true;
    overall = cr.verdict;
  }
  if (conflict || !overall) {
    rep.overall = Membership::Inconclusive;
  } else {
    rep.overall = *overall == Verdict::Finite ? Membership::In : Membership::Out;
  }
  return rep;
}

MembershipReport membership_report(const QcMap& f, const GrowthFunction& psi, const FunctionalConfig& cfg) {
  return membership_report(compute_samples(f, cfg), psi, cfg);
}

std::vector<double> hl_maximal(const std::vector<double>& g, const SphereGrid& grid, int levels) {
  const std::size_t n = grid.size();
  if (g.size() != n) throw std::invalid_argument("sampled function does not match the grid");
  std::vector<double> out(g);
  std::vector<std::size_t> order(n);
  std::vector<double> angle(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) angle[i] = angle_between(grid.node(c), grid.node(i));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
    // cap averages for radii pi 2^-j, from small to large
    std::vector<double> avg(levels + 1, 0.0);
    std::vector<std::size_t> count(levels + 1, 0);
    double sw = 0.0, sg = 0.0;
    std::size_t m = 0;
    for (int j = levels; j >= 0; --j) {
      double radius = kPi * std::ldexp(1.0, -j);
      while (m < n && angle[order[m]] <= radius * (1.0 + 1e-12)) {
        sw += grid.weight(order[m]);
        sg += grid.weight(order[m]) * g[order[m]];
        ++m;
      }
      count[j] = m;
      avg[j] = sw > 0.0 ? sg / sw : 0.0;
    }
    // node at rank m lies in every cap whose count exceeds m
    std::vector<double> best_from(levels + 2, 0.0);
    for (int jj = 0; jj <= levels; ++jj) best_from[jj + 1] = std::max(best_from[jj], avg[jj]);
    for (std::size_t rank = 0; rank < n; ++rank) {
      // caps j with count[j] > rank: j from 0 up to the largest such j
      int last = -1;
      for (int jj = levels; jj >= 0; --jj) {
        if (count[jj] > rank) {
          last = jj;
          break;
        }
      }
      if (last < 0) continue;
      std::size_t node = order[rank];
      out[node] = std::max(out[node], best_from[last + 1]);
    }
  }
  return out;
}

}  // namespace holab
