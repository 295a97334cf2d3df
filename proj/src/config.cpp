#include "holab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace holab {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<nlohmann::ordered_json(const RunConfig&)> get;
};

#define HOLAB_INT(NAME, FIELD)                                                                   \
  Key {                                                                                          \
    NAME, [](RunConfig& c, std::string_view v) { c.FIELD = parse_number<int>(NAME, v); },        \
        [](const RunConfig& c) { return nlohmann::ordered_json(c.FIELD); }                       \
  }
#define HOLAB_DOUBLE(NAME, FIELD)                                                                \
  Key {                                                                                          \
    NAME, [](RunConfig& c, std::string_view v) { c.FIELD = parse_number<double>(NAME, v); },     \
        [](const RunConfig& c) { return nlohmann::ordered_json(c.FIELD); }                       \
  }
#define HOLAB_STRING(NAME, FIELD)                                                                \
  Key {                                                                                          \
    NAME, [](RunConfig& c, std::string_view v) { c.FIELD = std::string(v); },                    \
        [](const RunConfig& c) { return nlohmann::ordered_json(c.FIELD); }                       \
  }
#define HOLAB_BOOL(NAME, FIELD)                                                                  \
  Key {                                                                                          \
    NAME, [](RunConfig& c, std::string_view v) { c.FIELD = parse_bool(NAME, v); },               \
        [](const RunConfig& c) { return nlohmann::ordered_json(c.FIELD); }                       \
  }

const std::vector<Key>& key_table() {
  static const std::vector<Key> table{
      HOLAB_STRING("map", map),
      HOLAB_STRING("psi", psi),
      HOLAB_INT("dim", dim),
      Key{"mc.seed", [](RunConfig& c, std::string_view v) { c.seed = parse_number<std::uint64_t>("mc.seed", v); },
          [](const RunConfig& c) { return nlohmann::ordered_json(c.seed); }},
      HOLAB_INT("mc.af_budget", functional.af_budget),
      HOLAB_INT("workers", workers),
      HOLAB_STRING("out", out),
      HOLAB_INT("quadrature.sphere_resolution", functional.sphere_resolution),
      HOLAB_INT("quadrature.radial_points", functional.radial_points),
      HOLAB_INT("quadrature.area_angular", functional.area_angular),
      HOLAB_INT("quadrature.cone_points", functional.cone_points),
      HOLAB_INT("quadrature.polar_extra_levels", functional.polar_extra_levels),
      HOLAB_INT("schedule.depth", functional.schedule_depth),
      HOLAB_INT("delta.depth", functional.delta_depth),
      HOLAB_STRING("modulus.generator", modulus_generator),
      HOLAB_STRING("modulus.map", modulus_map),
      HOLAB_INT("modulus.resolution", modulus.resolution),
      HOLAB_INT("modulus.max_iterations", modulus.max_iterations),
      HOLAB_DOUBLE("modulus.tolerance", modulus.tolerance),
      HOLAB_INT("modulus.curves", modulus_curves),
      HOLAB_DOUBLE("modulus.slack", modulus_slack),
      HOLAB_BOOL("modulus.rho_csv", modulus_rho_csv),
      HOLAB_STRING("carleson.measure", carleson_measure),
      HOLAB_INT("carleson.grid_resolution", carleson_grid),
      HOLAB_INT("carleson.k_max", carleson_k_max),
      HOLAB_INT("carleson.af_budget", carleson_af_budget),
      HOLAB_INT("lemmas.samples", lemma_samples),
      HOLAB_INT("lemmas.lemma1_samples", lemma1_samples),
      HOLAB_BOOL("lemmas.include_3d", lemma_include_3d),
  };
  return table;
}

#undef HOLAB_INT
#undef HOLAB_DOUBLE
#undef HOLAB_STRING
#undef HOLAB_BOOL

void at_least(const char* key, long long v, long long lo) {
  if (v < lo) throw ConfigError(std::string(key) + " must be >= " + std::to_string(lo));
}

// 0 selects the dimension default
void auto_or_at_least(const char* key, long long v, long long lo) {
  if (v != 0 && v < lo) throw ConfigError(std::string(key) + " must be 0 (default) or >= " + std::to_string(lo));
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const auto& k : key_table()) {
    if (k.name == key) {
      k.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown config key: " + std::string(key));
}

void RunConfig::load_text(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set(s.substr(0, eq), s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

void RunConfig::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  at_least("workers", workers, 1);
  at_least("mc.af_budget", functional.af_budget, 64);
  auto_or_at_least("quadrature.sphere_resolution", functional.sphere_resolution, 16);
  at_least("quadrature.radial_points", functional.radial_points, 2);
  if (functional.radial_points > kMaxGauss) {
    throw ConfigError("quadrature.radial_points must be <= " + std::to_string(kMaxGauss));
  }
  auto_or_at_least("quadrature.area_angular", functional.area_angular, 16);
  at_least("quadrature.cone_points", functional.cone_points, 8);
  at_least("quadrature.polar_extra_levels", functional.polar_extra_levels, 0);
  at_least("schedule.depth", functional.schedule_depth, 8);
  if (functional.schedule_depth > 60) throw ConfigError("schedule.depth must be <= 60");
  at_least("delta.depth", functional.delta_depth, 8);
  if (functional.delta_depth > 40) throw ConfigError("delta.depth must be <= 40");
  auto_or_at_least("modulus.resolution", modulus.resolution, 8);
  at_least("modulus.max_iterations", modulus.max_iterations, 1);
  if (!(modulus.tolerance > 0.0)) throw ConfigError("modulus.tolerance must be > 0");
  auto_or_at_least("modulus.curves", modulus_curves, 16);
  if (!(modulus_slack >= 1.0)) throw ConfigError("modulus.slack must be >= 1");
  auto_or_at_least("carleson.grid_resolution", carleson_grid, 16);
  at_least("carleson.k_max", carleson_k_max, 1);
  if (carleson_k_max > 60) throw ConfigError("carleson.k_max must be <= 60");
  at_least("carleson.af_budget", carleson_af_budget, 64);
  at_least("lemmas.samples", lemma_samples, 10);
  at_least("lemmas.lemma1_samples", lemma1_samples, 10);
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  // placement and thread count do not change results
  for (const auto& k : key_table()) {
    if (k.name != "out" && k.name != "workers") j[k.name] = k.get(*this);
  }
  return j;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& k : key_table()) v.push_back(k.name);
    return v;
  }();
  return names;
}

FunctionalConfig RunConfig::functional_config() const {
  FunctionalConfig c = functional;
  c.seed = seed;
  return c;
}

LemmaConfig RunConfig::lemma_config() const {
  LemmaConfig c;
  c.samples = lemma_samples;
  c.lemma1_samples = lemma1_samples;
  c.seed = seed;
  c.include_3d = lemma_include_3d;
  return c;
}

}  // namespace holab
