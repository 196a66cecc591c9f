#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "infocons/errors.hpp"

namespace infocons {

enum class ScenarioKind { discrete_check, flow_demo, htheorem, hilbert_demo, relax };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);
std::vector<ScenarioKind> all_scenario_kinds();

enum class ValueType { integer, real, text, integer_list, real_list, word_list };

/// One recognised key. Keys without a default are required.
struct KeySpec {
  std::string key;
  ValueType type = ValueType::real;
  std::optional<std::string> fallback;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  /// Allowed words for text and word_list values (empty: anything).
  std::vector<std::string> choices;
  std::size_t min_items = 1;
  std::size_t max_items = 16;
  std::string help;
};

/// Keys accepted by a scenario of the given kind (`kind` itself excluded).
const std::vector<KeySpec>& scenario_schema(ScenarioKind kind);

struct ScenarioIssue {
  std::size_t line = 0;  // 0 when the issue has no source line
  std::string key;
  std::string message;
};

class ScenarioError : public Error {
 public:
  explicit ScenarioError(std::vector<ScenarioIssue> issues);
  const std::vector<ScenarioIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ScenarioIssue> issues_;
};

using ScenarioValue = std::variant<long long, double, std::string, std::vector<long long>, std::vector<double>,
                                   std::vector<std::string>>;

/// A validated, defaults-filled set of typed parameters.
class Scenario {
 public:
  explicit Scenario(ScenarioKind kind);

  ScenarioKind kind() const noexcept { return kind_; }

  /// Parses `text` against the schema and stores it. Throws ScenarioError.
  void set(const std::string& key, const std::string& text);
  bool has(const std::string& key) const { return values_.contains(key); }

  long long integer(const std::string& key) const;
  double real(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<long long> integers(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  const std::vector<std::string>& words(const std::string& key) const;

  /// Canonical `key = value` text for every stored key, sorted by key.
  std::string canonical() const;
  const std::map<std::string, ScenarioValue>& values() const noexcept { return values_; }

 private:
  friend Scenario parse_scenario(std::string_view text);
  friend Scenario make_scenario(ScenarioKind, const std::vector<std::pair<std::string, std::string>>&);

  ScenarioKind kind_;
  std::map<std::string, ScenarioValue> values_;
  std::map<std::string, std::string> raw_;
};

/// Parses the line-oriented format: `key = value`, `#` starts a comment,
/// blank lines are ignored, `kind` is required. Every problem found is
/// reported in one ScenarioError, each with its line number.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Builds a scenario from key/value pairs (command-line flags) with defaults
/// filled in.
Scenario make_scenario(ScenarioKind kind, const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace infocons
