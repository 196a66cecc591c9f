#include "infocons/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "infocons/csv.hpp"

namespace infocons {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

KeySpec spec(std::string key, ValueType type, std::optional<std::string> fallback, std::string help) {
  KeySpec k;
  k.key = std::move(key);
  k.type = type;
  k.fallback = std::move(fallback);
  k.help = std::move(help);
  return k;
}

KeySpec ranged(KeySpec k, double lo, double hi) {
  k.min = lo;
  k.max = hi;
  return k;
}

KeySpec words(KeySpec k, std::vector<std::string> choices) {
  k.choices = std::move(choices);
  return k;
}

KeySpec items(KeySpec k, std::size_t lo, std::size_t hi) {
  k.min_items = lo;
  k.max_items = hi;
  return k;
}

const std::vector<std::string> kMuPresets{"uniform", "exponential_tilt", "gaussian", "von_mises"};
const std::vector<std::string> kLaws{"zero",        "constant",   "cellular", "shear_wave", "diagonal_wave",
                                     "mixed_wave",  "linear_y",   "quadratic", "expansion", "shear",
                                     "rotation"};
const std::vector<std::string> kBoundaries{"periodic", "reflecting"};

std::vector<KeySpec> common_keys() {
  return {
      ranged(spec("seed", ValueType::integer, "0", "master seed for every random stream"), 0, 9.2e18),
      spec("output.dir", ValueType::text, "infocons_out", "directory receiving CSVs and run_meta.txt"),
  };
}

std::vector<KeySpec> grid_flow_keys(const std::string& shape, const std::string& boundary, const std::string& mu,
                                    std::optional<std::string> law, const std::string& amplitude,
                                    const std::string& width, const std::string& span, const std::string& step,
                                    const std::string& snapshots) {
  return {
      items(ranged(spec("grid.shape", ValueType::integer_list, shape, "cells per axis"), 1, 4096), 2, 2),
      items(words(spec("space.boundary", ValueType::word_list, boundary, "boundary per axis"), kBoundaries), 2, 2),
      words(spec("mu.preset", ValueType::text, mu, "density of states"), kMuPresets),
      spec("mu.strength", ValueType::real, "1", "tilt rate or von Mises concentration"),
      ranged(spec("mu.width", ValueType::real, "0.3", "Gaussian bump width"), 1e-6, kInf),
      words(spec("stream.preset", ValueType::text, std::move(law), "velocity law"), kLaws),
      spec("stream.amplitude", ValueType::real, amplitude, "stream amplitude or field rate"),
      items(ranged(spec("stream.modes", ValueType::integer_list, "1,1", "wave numbers for cellular"), 1, 64), 2,
            2),
      items(spec("rho.center", ValueType::real_list, "0.5,0.5", "centre of the initial Gaussian blob"), 2, 2),
      items(ranged(spec("rho.width", ValueType::real_list, width, "widths of the initial blob"), 1e-6, kInf), 2, 2),
      ranged(spec("time.span", ValueType::real, span, "final time"), 1e-12, kInf),
      ranged(spec("time.step", ValueType::real, step, "RK4 step"), 1e-9, kInf),
      ranged(spec("time.snapshots", ValueType::integer, snapshots, "number of snapshot intervals"), 1, 100000),
  };
}

std::vector<KeySpec> build_schema(ScenarioKind kind) {
  std::vector<KeySpec> keys = common_keys();
  auto add = [&](std::vector<KeySpec> more) { keys.insert(keys.end(), more.begin(), more.end()); };
  switch (kind) {
    case ScenarioKind::discrete_check:
      add({
          spec("matrix", ValueType::text, std::nullopt, "CSV file with n rows of n reals"),
          spec("mu", ValueType::text, "", "CSV file with state weights (uniform if empty)"),
          ranged(spec("certify.tolerance", ValueType::real, "1e-9", "entry-wise 0/1 tolerance"), 0, 1),
          ranged(spec("certify.trials", ValueType::integer, "500", "random witness distributions"), 0, 1e7),
      });
      break;
    case ScenarioKind::flow_demo:
      add(grid_flow_keys("128,128", "periodic,periodic", "von_mises", std::nullopt, "0.03", "0.25,0.25", "10",
                         "0.02", "10"));
      add({
          ranged(spec("probe.points", ValueType::integer, "100", "interior points for div(mu v)"), 1, 1e7),
          ranged(spec("probe.h", ValueType::real, "1e-3", "finite-difference step for div(mu v)"), 1e-9, 0.1),
      });
      break;
    case ScenarioKind::htheorem:
      add(grid_flow_keys("512,128", "periodic,reflecting", "uniform", "shear", "1", "0.05,0.2", "20", "0.05",
                         "20"));
      add({
          items(ranged(spec("coarse.factor", ValueType::integer_list, "4,4", "fine cells per coarse cell"), 1, 4096),
                2, 2),
      });
      break;
    case ScenarioKind::hilbert_demo:
      add({
          ranged(spec("modes.count", ValueType::integer, "4", "number of box modes"), 1, 1024),
          ranged(spec("time.span", ValueType::real, "0.6366197723675814", "final time"), 0, kInf),
          ranged(spec("time.snapshots", ValueType::integer, "10", "number of snapshot intervals"), 1, 100000),
          ranged(spec("fd.step", ValueType::real, "1e-4", "finite-difference step"), 1e-12, 1),
      });
      break;
    case ScenarioKind::relax:
      add({
          ranged(spec("modes.count", ValueType::integer, "16", "number of box modes"), 1, 1024),
          ranged(spec("trajectories", ValueType::integer, "100000", "ensemble size"), 1, 1e9),
          ranged(spec("time.t_final", ValueType::real, "6.366197723675814", "final time (ten box periods)"), 1e-12,
                 kInf),
          ranged(spec("time.snapshots", ValueType::integer, "20", "number of snapshot intervals"), 1, 100000),
          ranged(spec("time.step", ValueType::real, "2e-3", "RK4 macro step"), 1e-9, kInf),
          items(ranged(spec("grid.fine", ValueType::integer_list, "64,64", "Born-density grid"), 1, 4096), 2, 2),
          items(ranged(spec("grid.coarse", ValueType::integer_list, "16,16", "histogram grid"), 1, 4096), 2, 2),
          words(spec("initial", ValueType::text, "ground_state", "initial ensemble"), {"ground_state", "born"}),
          ranged(spec("node.floor", ValueType::real, "1e-6", "|psi| floor for the guidance law"), 0, kInf),
          ranged(spec("node.min_step", ValueType::real, "1e-6", "smallest step before capping"), 1e-12, kInf),
          ranged(spec("node.speed_cap", ValueType::real, "1e3", "speed cap near nodes"), 1e-12, kInf),
          ranged(spec("step.max_displacement", ValueType::real, "0.03", "largest move per step"), 1e-9, kInf),
          ranged(spec("degraded.fraction", ValueType::real, "0.01", "lost fraction flagged as degraded"), 0, 1),
      });
      break;
  }
  return keys;
}

const KeySpec* find_spec(ScenarioKind kind, std::string_view key) {
  const auto& schema = scenario_schema(kind);
  const auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.key == key; });
  return it == schema.end() ? nullptr : &*it;
}

std::optional<long long> to_integer(std::string_view s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    // Accept integral reals such as 1e5.
    double d = 0.0;
    const auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec2 != std::errc{} || q != s.data() + s.size() || d != std::floor(d) || std::abs(d) > 9.2e18)
      return std::nullopt;
    return static_cast<long long>(d);
  }
  return v;
}

std::optional<double> to_real(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Parses `text` for `k`; returns an error message on failure.
std::variant<ScenarioValue, std::string> parse_value(const KeySpec& k, const std::string& text) {
  auto range_error = [&](double v) -> std::optional<std::string> {
    if (v < k.min || v > k.max)
      return "value " + csv::format_number(v) + " out of range [" + csv::format_number(k.min) + ", " +
             csv::format_number(k.max) + "]";
    return std::nullopt;
  };
  auto choice_error = [&](const std::string& w) -> std::optional<std::string> {
    if (k.choices.empty() || std::find(k.choices.begin(), k.choices.end(), w) != k.choices.end()) return std::nullopt;
    std::string all;
    for (const auto& c : k.choices) all += (all.empty() ? "" : ", ") + c;
    return "'" + w + "' is not one of: " + all;
  };

  switch (k.type) {
    case ValueType::integer: {
      const auto v = to_integer(text);
      if (!v) return "expected an integer, got '" + text + "'";
      if (auto e = range_error(static_cast<double>(*v))) return *e;
      return ScenarioValue{*v};
    }
    case ValueType::real: {
      const auto v = to_real(text);
      if (!v) return "expected a number, got '" + text + "'";
      if (auto e = range_error(*v)) return *e;
      return ScenarioValue{*v};
    }
    case ValueType::text: {
      if (auto e = choice_error(text)) return *e;
      return ScenarioValue{text};
    }
    default:
      break;
  }

  const auto parts = split_list(text);
  if (parts.size() < k.min_items || parts.size() > k.max_items) {
    const std::string want = k.min_items == k.max_items ? std::to_string(k.min_items)
                                                        : std::to_string(k.min_items) + " to " +
                                                              std::to_string(k.max_items);
    return "expected " + want + " comma-separated items, got " + std::to_string(parts.size());
  }
  if (k.type == ValueType::integer_list) {
    std::vector<long long> out;
    for (const auto& p : parts) {
      const auto v = to_integer(p);
      if (!v) return "expected an integer item, got '" + p + "'";
      if (auto e = range_error(static_cast<double>(*v))) return *e;
      out.push_back(*v);
    }
    return ScenarioValue{out};
  }
  if (k.type == ValueType::real_list) {
    std::vector<double> out;
    for (const auto& p : parts) {
      const auto v = to_real(p);
      if (!v) return "expected a numeric item, got '" + p + "'";
      if (auto e = range_error(*v)) return *e;
      out.push_back(*v);
    }
    return ScenarioValue{out};
  }
  std::vector<std::string> out;
  for (const auto& p : parts) {
    if (auto e = choice_error(p)) return *e;
    out.push_back(p);
  }
  return ScenarioValue{out};
}

std::string describe(const std::vector<ScenarioIssue>& issues) {
  std::string msg = issues.size() == 1 ? "scenario has 1 error" : "scenario has " + std::to_string(issues.size()) + " errors";
  for (const auto& i : issues) {
    msg += "\n  ";
    if (i.line > 0) msg += "line " + std::to_string(i.line) + ": ";
    if (!i.key.empty()) msg += "'" + i.key + "': ";
    msg += i.message;
  }
  return msg;
}

template <class T>
const T& typed(const std::map<std::string, ScenarioValue>& values, const std::string& key, const char* what) {
  const auto it = values.find(key);
  if (it == values.end()) throw Error("scenario has no key '" + key + "'");
  const T* v = std::get_if<T>(&it->second);
  if (!v) throw Error("scenario key '" + key + "' is not " + what);
  return *v;
}

void fill_defaults(Scenario& s, std::vector<ScenarioIssue>& issues, const std::set<std::string>& present) {
  for (const auto& k : scenario_schema(s.kind())) {
    if (present.contains(k.key)) continue;
    if (!k.fallback) {
      issues.push_back({0, k.key, "required key missing for kind " + std::string(to_string(s.kind()))});
      continue;
    }
    s.set(k.key, *k.fallback);
  }
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::discrete_check: return "discrete-check";
    case ScenarioKind::flow_demo: return "flow-demo";
    case ScenarioKind::htheorem: return "htheorem";
    case ScenarioKind::hilbert_demo: return "hilbert-demo";
    case ScenarioKind::relax: return "relax";
  }
  return "unknown";
}

std::vector<ScenarioKind> all_scenario_kinds() {
  return {ScenarioKind::discrete_check, ScenarioKind::flow_demo, ScenarioKind::htheorem, ScenarioKind::hilbert_demo,
          ScenarioKind::relax};
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
  for (auto k : all_scenario_kinds())
    if (to_string(k) == text) return k;
  return std::nullopt;
}

const std::vector<KeySpec>& scenario_schema(ScenarioKind kind) {
  static const std::vector<std::vector<KeySpec>> schemas = [] {
    std::vector<std::vector<KeySpec>> out;
    for (auto k : all_scenario_kinds()) out.push_back(build_schema(k));
    return out;
  }();
  return schemas.at(static_cast<std::size_t>(kind));
}

ScenarioError::ScenarioError(std::vector<ScenarioIssue> issues) : Error(describe(issues)), issues_(std::move(issues)) {}

Scenario::Scenario(ScenarioKind kind) : kind_(kind) {}

void Scenario::set(const std::string& key, const std::string& text) {
  const KeySpec* k = find_spec(kind_, key);
  if (!k) throw ScenarioError({{0, key, "unknown key for kind " + std::string(to_string(kind_))}});
  auto parsed = parse_value(*k, trim(text));
  if (auto* msg = std::get_if<std::string>(&parsed)) throw ScenarioError({{0, key, *msg}});
  values_[key] = std::get<ScenarioValue>(std::move(parsed));
  raw_[key] = trim(text);
}

long long Scenario::integer(const std::string& key) const { return typed<long long>(values_, key, "an integer"); }
double Scenario::real(const std::string& key) const { return typed<double>(values_, key, "a number"); }
const std::string& Scenario::text(const std::string& key) const { return typed<std::string>(values_, key, "text"); }
std::vector<long long> Scenario::integers(const std::string& key) const {
  return typed<std::vector<long long>>(values_, key, "an integer list");
}
std::vector<double> Scenario::reals(const std::string& key) const {
  return typed<std::vector<double>>(values_, key, "a number list");
}
const std::vector<std::string>& Scenario::words(const std::string& key) const {
  return typed<std::vector<std::string>>(values_, key, "a word list");
}

std::string Scenario::canonical() const {
  std::string out = "kind = " + std::string(to_string(kind_)) + "\n";
  for (const auto& [key, raw] : raw_) out += key + " = " + raw + "\n";
  return out;
}

Scenario parse_scenario(std::string_view text) {
  struct Entry {
    std::size_t line;
    std::string key;
    std::string value;
  };
  std::vector<ScenarioIssue> issues;
  std::vector<Entry> entries;
  std::optional<ScenarioKind> kind;
  std::size_t kind_line = 0;
  std::set<std::string> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line_no, "", "expected 'key = value'"});
      continue;
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      issues.push_back({line_no, "", "missing key before '='"});
      continue;
    }
    if (!seen.insert(key).second) {
      issues.push_back({line_no, key, "duplicate key"});
      continue;
    }
    if (key == "kind") {
      kind = parse_scenario_kind(value);
      kind_line = line_no;
      if (!kind) {
        std::string all;
        for (auto k : all_scenario_kinds()) all += (all.empty() ? "" : ", ") + std::string(to_string(k));
        issues.push_back({line_no, key, "unknown kind '" + value + "' (expected one of: " + all + ")"});
      }
      continue;
    }
    entries.push_back({line_no, std::move(key), std::move(value)});
  }

  if (!kind) {
    if (kind_line == 0) issues.push_back({0, "kind", "required key missing"});
    throw ScenarioError(std::move(issues));
  }

  Scenario s(*kind);
  std::set<std::string> present;
  for (const auto& e : entries) {
    const KeySpec* k = find_spec(*kind, e.key);
    if (!k) {
      issues.push_back({e.line, e.key, "unknown key for kind " + std::string(to_string(*kind))});
      continue;
    }
    present.insert(e.key);
    auto parsed = parse_value(*k, e.value);
    if (auto* msg = std::get_if<std::string>(&parsed)) {
      issues.push_back({e.line, e.key, *msg});
      continue;
    }
    s.values_[e.key] = std::get<ScenarioValue>(std::move(parsed));
    s.raw_[e.key] = e.value;
  }
  fill_defaults(s, issues, present);
  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario make_scenario(ScenarioKind kind, const std::vector<std::pair<std::string, std::string>>& pairs) {
  Scenario s(kind);
  std::vector<ScenarioIssue> issues;
  std::set<std::string> present;
  for (const auto& [key, value] : pairs) {
    try {
      s.set(key, value);
      present.insert(key);
    } catch (const ScenarioError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  fill_defaults(s, issues, present);
  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return s;
}

}  // namespace infocons
