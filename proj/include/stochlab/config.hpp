#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stochlab {

/// `[kind]` or `[kind:label]` followed by `key = value` lines. Comments
/// start with # or ;. Lists are comma separated; numbers may be fractions
/// such as 1/256.
struct ConfigSection {
  std::string kind;
  std::string label;
  std::size_t line = 0;
  std::map<std::string, std::string> values;

  std::string name() const { return label.empty() ? kind : kind + ":" + label; }
  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t seed() const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;
};

struct ConfigPlan {
  std::vector<ConfigSection> sections;
  std::vector<const ConfigSection*> of_kind(const std::string& kind) const;
};

/// Experiment kinds accepted as section names.
const std::vector<std::string>& experiment_kinds();

/// Parses and validates: known kinds and keys, no duplicates, seed and
/// samples present, samples positive, numeric values well formed. Missing
/// optional keys are filled with their defaults.
ConfigPlan parse_config(std::string_view text);
ConfigPlan load_config(const std::string& path);

/// Accepted keys of a kind with their default values ("" for required keys).
const std::map<std::string, std::string>& accepted_keys(const std::string& kind);

double parse_number(const std::string& token);

}  // namespace stochlab
