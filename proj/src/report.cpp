#include "holab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace holab {

Json json_number(double v) {
  if (std::isfinite(v)) return Json(v);
  return Json(format_number(v));
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

Json optional_number(const std::optional<double>& v) { return v ? json_number(*v) : Json(nullptr); }

}  // namespace

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_number(v(i)));
  return a;
}

Json to_json(const DoublingReport& r) {
  Json j;
  j["name"] = r.name;
  j["constant_estimate"] = json_number(r.constant_estimate);
  j["verdict"] = to_string(r.verdict);
  j["witness_t"] = json_number(r.witness_t);
  j["grid"] = {{"t_min", json_number(r.t_min)}, {"t_max", json_number(r.t_max)}, {"samples", r.samples}};
  return j;
}

Json to_json(const Classification& c) {
  Json j;
  j["verdict"] = to_string(c.verdict);
  j["rule"] = c.rule;
  j["last_gap"] = json_number(c.last_gap);
  j["increment_ratio"] = json_number(c.increment_ratio);
  Json fits = Json::array();
  for (const auto& f : c.fits) {
    fits.push_back({{"model", f.model},
                    {"intercept", json_number(f.intercept)},
                    {"slope", json_number(f.slope)},
                    {"r_squared", json_number(f.r_squared)}});
  }
  j["fits"] = fits;
  j["best_model"] = c.best.model;
  if (c.tail.available) {
    j["tail"] = {{"divergent", c.tail.divergent},
                 {"size_model", c.tail.size_model},
                 {"measure_rate", json_number(c.tail.measure_rate)},
                 {"remainder", json_number(c.tail.remainder)}};
  } else {
    j["tail"] = nullptr;
  }
  return j;
}

Json to_json(const CriterionResult& r) {
  Json j;
  j["criterion"] = to_string(r.id);
  if (r.id == CriterionId::ComponentNtmax) j["component"] = r.component;
  j["mode"] = r.mode;
  j["delta"] = json_number(r.delta);
  j["verdict"] = to_string(r.verdict);
  j["value"] = json_number(r.value);
  j["u"] = numbers(r.u);
  j["partials"] = numbers(r.partials);
  j["classification"] = to_json(r.fit);
  j["overflow_level"] = r.overflow_level ? Json(*r.overflow_level) : Json(nullptr);
  j["overflow_size"] = optional_number(r.overflow_size);
  return j;
}

Json to_json(const CriterionReport& r) {
  Json j;
  j["criterion"] = to_string(r.result.id);
  if (r.result.id == CriterionId::ComponentNtmax) j["component"] = r.result.component;
  j["mode"] = r.result.mode;
  j["group"] = r.group;
  j["binding"] = r.binding;
  j["verdict"] = to_string(r.verdict);
  if (r.scan) {
    Json entries = Json::array();
    for (const auto& e : r.scan->entries) {
      entries.push_back({{"delta", json_number(e.delta)}, {"verdict", to_string(e.verdict)}, {"value", json_number(e.value)}});
    }
    j["delta_scan"] = {{"entries", entries},
                       {"first_finite", optional_number(r.scan->first_finite)},
                       {"verdict", to_string(r.scan->verdict)},
                       {"delta_independent", r.scan->delta_independent},
                       {"note", "finite scan delta = 2^-j stands in for 'for some delta > 0'"}};
  } else {
    j["delta_scan"] = nullptr;
  }
  j["result"] = to_json(r.result);
  return j;
}

Json to_json(const MembershipReport& r) {
  Json j;
  j["map"] = r.map_name;
  j["psi"] = r.growth_name;
  j["dim"] = r.dim;
  j["doubling"] = to_json(r.doubling);
  j["inverse_doubling"] = to_json(r.inverse_doubling);
  j["overall"] = to_string(r.overall);
  j["theorem1_verdict"] = to_string(r.theorem1_verdict);
  j["theorem1_agree"] = r.theorem1_agree;
  j["theorem2_agree"] = r.theorem2_agree;
  j["counterexample_regime"] = r.counterexample_regime;
  j["flags"] = r.flags;
  Json crit = Json::array();
  for (const auto& c : r.criteria) crit.push_back(to_json(c));
  j["criteria"] = crit;
  return j;
}

Json to_json(const LemmaSuite& s) {
  Json j;
  j["name"] = s.name;
  j["inequality"] = s.inequality;
  j["stability_tolerance"] = json_number(s.stability_tolerance);
  j["status"] = to_string(s.status);
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json row;
    row["map"] = r.map;
    row["dim"] = r.dim;
    row["psi"] = r.psi.empty() ? Json(nullptr) : Json(r.psi);
    row["constant"] = json_number(r.constant);
    row["refined_constant"] = json_number(r.refined_constant);
    row["stable"] = r.stable;
    row["passed"] = r.passed;
    row["inconclusive"] = r.inconclusive;
    row["asserted"] = r.asserted;
    Json values = Json::object();
    for (const auto& [k, v] : r.values) values[k] = json_number(v);
    row["values"] = values;
    row["note"] = r.note;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

Json to_json(const ModulusEstimate& e) {
  Json j;
  j["value"] = json_number(e.value);
  j["dual_bound"] = json_number(e.dual_bound);
  j["exact_reference"] = optional_number(e.exact_reference);
  j["relative_error"] = optional_number(e.relative_error);
  j["resolution"] = e.resolution;
  j["cell_size"] = json_number(e.cell_size);
  j["cells"] = e.cells;
  j["curves"] = e.curves;
  j["nonzeros"] = e.nonzeros;
  j["iterations"] = e.iterations;
  j["converged"] = e.converged;
  j["min_constraint"] = json_number(e.min_constraint);
  j["history"] = numbers(e.history);
  return j;
}

Json to_json(const QuasiInvarianceReport& r) {
  Json j;
  j["ratio"] = json_number(r.ratio);
  j["k_bound"] = json_number(r.k_bound);
  j["slack"] = json_number(r.slack);
  j["bracket"] = {json_number(1.0 / (r.k_bound * r.slack)), json_number(r.k_bound * r.slack)};
  j["converged"] = r.converged;
  j["within"] = r.within;
  j["original"] = to_json(r.original);
  j["image"] = to_json(r.image);
  return j;
}

Json to_json(const CarlesonEstimate& e) {
  Json j;
  j["norm"] = json_number(e.norm);
  j["verdict"] = to_string(e.verdict);
  j["witness"] = {{"omega", to_json(e.witness_omega)}, {"r", json_number(e.witness_r)}};
  j["balls"] = e.balls;
  j["unreliable_balls"] = e.unreliable_balls;
  j["divergent_balls"] = e.divergent_balls;
  j["flagged"] = e.flagged;
  j["radii"] = numbers(e.radii);
  j["per_radius"] = numbers(e.per_radius);
  j["cutoff_profile"] = numbers(e.cutoff_profile);
  return j;
}

Json envelope(const std::string& schema, const std::string& command, const Json& config, Json result) {
  Json j;
  j["schema"] = schema;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = config;
  j["result"] = std::move(result);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_report_csv(const MembershipReport& r, std::ostream& out) {
  out << "map,psi,dim,criterion,component,mode,group,binding,delta,verdict,value\n";
  for (const auto& c : r.criteria) {
    auto prefix = [&] {
      out << r.map_name << ',' << r.growth_name << ',' << r.dim << ',' << to_string(c.result.id) << ','
          << (c.result.id == CriterionId::ComponentNtmax ? std::to_string(c.result.component) : "") << ','
          << c.result.mode << ',' << c.group << ',' << (c.binding ? "true" : "false") << ',';
    };
    if (c.scan) {
      for (const auto& e : c.scan->entries) {
        prefix();
        out << csv_number(e.delta) << ',' << to_string(e.verdict) << ',' << csv_number(e.value) << '\n';
      }
    } else {
      prefix();
      out << ',' << to_string(c.verdict) << ',' << csv_number(c.result.value) << '\n';
    }
  }
}

void write_plot_data(const CriterionResult& r, std::ostream& out) {
  out << "k,u,partial\n";
  for (std::size_t k = 0; k < r.partials.size(); ++k) {
    out << k + 1 << ',' << csv_number(k < r.u.size() ? r.u[k] : std::nan("")) << ',' << csv_number(r.partials[k])
        << '\n';
  }
}

std::string plot_stem(const CriterionResult& r) {
  std::string s = to_string(r.id);
  if (r.id == CriterionId::ComponentNtmax) s += "-" + std::to_string(r.component);
  return s + "-" + r.mode;
}

}  // namespace holab
