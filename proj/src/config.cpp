#include "stochlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stochlab/error.hpp"

namespace stochlab {

namespace {

using Schema = std::map<std::string, std::string>;

const std::string ys_default = "one, w_T, w_T_sq, sin_omega, cos_omega, w_half";
const std::string lags_default = "1/256, 1/128, 1/64, 1/32, 1/16, 1/8";

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s = {
      {"isometry", {{"steps", "512"}, {"horizon", "1"}, {"identity_paths", "1000"}, {"z_limit", "3"}}},
      {"mollifier",
       {{"steps", "2048"}, {"rho", "1/5, 1/10, 1/20, 1/40"}, {"delta", "1/20"}, {"tolerance", "1e-8"},
        {"mass_tolerance", "1e-6"}, {"p", "3"}}},
      {"translate",
       {{"which", "transport, claw"}, {"cells", "128"}, {"steps", "2048"}, {"horizon", "1/10"}, {"n", "2, 8, 32"},
        {"h_ladder", lags_default}, {"slope_min", "0.4"}, {"uniformity", "1.5"}, {"coupling_scale", "1"},
        {"claw_flux_perturbation", "0.5"}, {"claw_noise_perturbation", "0.1"}, {"claw_viscosity_scale", "0.1"}}},
      {"counterexample",
       {{"which", "sine, spike"}, {"n", "4, 16, 64"}, {"spike_n", "4, 16"}, {"steps", "512"}, {"spike_steps", "256"},
        {"tolerance", "0.03"}, {"coupling_scale", "1"}}},
      {"theorem21",
       {{"n", "1, 4, 16"}, {"steps", "256"}, {"horizon", "1"}, {"rho", "1/5, 1/10, 1/20"}, {"decomposition_n", "4"},
        {"coupling_scale", "1"}, {"ratio", "1/3"}, {"ys", ys_default}}},
      {"l1mode",
       {{"n", "2, 8, 32"}, {"steps", "256"}, {"horizon", "1"}, {"cells", "64"}, {"mode", "strong"}, {"ratio", "1/4"},
        {"p", "3"}, {"growth_factor", "2"}, {"coupling_scale", "1"}, {"ys", ys_default}}},
      {"corollary42",
       {{"parts", "control, pathwise, isometry"}, {"n", "1, 4, 16, 64"}, {"steps", "512"}, {"horizon", "1"},
        {"coupling_scale", "1"}, {"ratio", "1/3"}}},
      {"transport",
       {{"n", "2, 8, 32"}, {"cells", "128"}, {"steps", "2048"}, {"horizon", "1/10"}, {"refine", "4"}, {"dim", "1"},
        {"noise", "multiplicative"}, {"noise_amplitude", "0.5"}, {"noise_perturbation", "0"}, {"drift", "1"},
        {"swing", "0.5"}, {"velocity_perturbation", "0.5"}, {"forcing", "0"}, {"source_perturbation", "0"},
        {"initial_perturbation", "0.5"}, {"initial_randomness", "0"}, {"viscosity_scale", "1"}, {"p", "3"},
        {"coupling_scale", "1"}, {"ratio", "1/3"}, {"ys", ys_default}}},
      {"claw",
       {{"n", "2, 4, 8, 16"}, {"cells", "128"}, {"steps", "2048"}, {"horizon", "1/10"}, {"refine", "4"},
        {"flux", "burgers"}, {"flux_perturbation", "0.5"}, {"noise_amplitude", "0.5"}, {"noise_perturbation", "0.1"},
        {"viscosity_scale", "0.1"}, {"xi_bins", "256"}, {"kappa_levels", "17"}, {"riemann_cells", "128, 256, 512"},
        {"riemann_horizon", "1/2"}, {"h_ladder", lags_default}, {"ratio", "1/3"}, {"refinement_ratio", "1.5"},
        {"coupling_scale", "1"}, {"ys", ys_default}}},
  };
  return s;
}

const std::map<std::string, std::string>& sample_suggestions() {
  static const std::map<std::string, std::string> s = {
      {"isometry", "100000"}, {"mollifier", "100"}, {"translate", "1000"}, {"counterexample", "100000"},
      {"theorem21", "10000"}, {"l1mode", "10000"},  {"corollary42", "10000"}, {"transport", "200"},
      {"claw", "100"}};
  return s;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string where(const ConfigSection& s, const std::string& key) {
  return "[" + s.name() + "] key '" + key + "'";
}

}  // namespace

double parse_number(const std::string& token) {
  const auto t = trim(token);
  const auto slash = t.find('/');
  const auto one = [&t](const std::string& x) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(x, &used);
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + t + "'");
    }
    if (used != x.size() || !std::isfinite(v)) throw ConfigError("malformed number '" + t + "'");
    return v;
  };
  if (slash == std::string::npos) return one(t);
  const double den = one(trim(t.substr(slash + 1)));
  if (den == 0.0) throw ConfigError("zero denominator in '" + t + "'");
  return one(trim(t.substr(0, slash))) / den;
}

std::string ConfigSection::text(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError(where(*this, key) + " is missing");
  return it->second;
}

double ConfigSection::number(const std::string& key) const {
  try {
    return parse_number(text(key));
  } catch (const ConfigError& e) {
    throw ConfigError(where(*this, key) + ": " + e.what());
  }
}

std::size_t ConfigSection::count(const std::string& key) const {
  const double v = number(key);
  if (v < 0.0 || v != std::floor(v)) throw ConfigError(where(*this, key) + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t ConfigSection::seed() const {
  const auto t = text("seed");
  try {
    std::size_t used = 0;
    const auto v = std::stoull(t, &used);
    if (used != t.size() || t.front() == '-') throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where(*this, "seed") + " must be a nonnegative integer");
  }
}

bool ConfigSection::flag(const std::string& key) const {
  const auto t = text(key);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(where(*this, key) + " must be true or false");
}

std::vector<double> ConfigSection::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : split_list(text(key))) {
    try {
      out.push_back(parse_number(w));
    } catch (const ConfigError& e) {
      throw ConfigError(where(*this, key) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::size_t> ConfigSection::counts(const std::string& key) const {
  std::vector<std::size_t> out;
  for (double v : numbers(key)) {
    if (v < 1.0 || v != std::floor(v)) throw ConfigError(where(*this, key) + " entries must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<std::string> ConfigSection::words(const std::string& key) const { return split_list(text(key)); }

std::vector<const ConfigSection*> ConfigPlan::of_kind(const std::string& kind) const {
  std::vector<const ConfigSection*> out;
  for (const auto& s : sections)
    if (s.kind == kind) out.push_back(&s);
  return out;
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> k;
    for (const auto& [name, schema] : schemas()) k.push_back(name);
    return k;
  }();
  return kinds;
}

const std::map<std::string, std::string>& accepted_keys(const std::string& kind) {
  const auto it = schemas().find(kind);
  if (it == schemas().end()) throw ConfigError("unknown experiment kind '" + kind + "'");
  return it->second;
}

ConfigPlan parse_config(std::string_view text) {
  ConfigPlan plan;
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto s = trim(std::string_view(raw).substr(0, raw.find_first_of("#;")));
    if (s.empty()) continue;
    const std::string at = "line " + std::to_string(line) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(at + "unterminated section header");
      const auto inner = trim(std::string_view(s).substr(1, s.size() - 2));
      ConfigSection sec;
      sec.line = line;
      const auto colon = inner.find(':');
      sec.kind = trim(inner.substr(0, colon));
      if (colon != std::string::npos) sec.label = trim(inner.substr(colon + 1));
      if (!schemas().count(sec.kind)) {
        std::string list;
        for (const auto& k : experiment_kinds()) list += (list.empty() ? "" : ", ") + k;
        throw ConfigError(at + "unknown experiment kind '" + sec.kind + "' (accepted: " + list + ")");
      }
      if (!names.insert(sec.name()).second) throw ConfigError(at + "duplicate section [" + sec.name() + "]");
      plan.sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(at + "expected 'key = value'");
    if (plan.sections.empty()) throw ConfigError(at + "key outside of any section");
    auto& sec = plan.sections.back();
    const auto key = trim(std::string_view(s).substr(0, eq));
    const auto value = trim(std::string_view(s).substr(eq + 1));
    const auto& schema = schemas().at(sec.kind);
    if (key != "seed" && key != "samples" && !schema.count(key)) {
      std::string list = "seed, samples";
      for (const auto& [k, d] : schema) list += ", " + k;
      throw ConfigError(at + "unknown key '" + key + "' in [" + sec.name() + "] (accepted: " + list + ")");
    }
    if (!sec.values.emplace(key, value).second)
      throw ConfigError(at + "duplicate key '" + key + "' in [" + sec.name() + "]");
  }

  for (auto& sec : plan.sections) {
    const std::string at = "[" + sec.name() + "] (line " + std::to_string(sec.line) + "): ";
    if (!sec.has("seed")) throw ConfigError(at + "missing required key 'seed' (suggested default: seed = 1)");
    if (!sec.has("samples"))
      throw ConfigError(at + "missing required key 'samples' (suggested default: samples = " +
                        sample_suggestions().at(sec.kind) + ")");
    sec.seed();
    double samples = 0.0;
    try {
      samples = parse_number(sec.values.at("samples"));
    } catch (const ConfigError&) {
      throw ConfigError(at + "key 'samples' is not a number");
    }
    if (samples <= 0.0 || samples != std::floor(samples))
      throw ConfigError(at + "key 'samples' must be a positive integer, got " + sec.values.at("samples"));
    for (const auto& [k, d] : schemas().at(sec.kind)) sec.values.emplace(k, d);
  }
  return plan;
}

ConfigPlan load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace stochlab
