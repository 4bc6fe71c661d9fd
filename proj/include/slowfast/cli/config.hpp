#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slowfast/error.hpp"
#include "slowfast/ode/types.hpp"

namespace slowfast::cli {

enum class Experiment { Simulate, BernoulliCheck, DelayReport, Crossings, AsymptoteCheck, CanardScan };

inline constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::Simulate, "simulate"},
    {Experiment::BernoulliCheck, "bernoulli-check"},
    {Experiment::DelayReport, "delay-report"},
    {Experiment::Crossings, "crossings"},
    {Experiment::AsymptoteCheck, "asymptote-check"},
    {Experiment::CanardScan, "canard-scan"},
};

[[nodiscard]] inline std::string_view to_string(Experiment e) {
  for (const auto& [k, n] : kExperimentNames)
    if (k == e) return n;
  return "?";
}

[[nodiscard]] inline std::optional<Experiment> experiment_from(std::string_view s) {
  for (const auto& [k, n] : kExperimentNames)
    if (n == s) return k;
  return std::nullopt;
}

enum class ModelKind { Enhanced, Transcritical, Vdp };

/// Every field of every experiment. Fields that an experiment does not use
/// keep their defaults and are ignored.
struct ExperimentConfig {
  Experiment experiment = Experiment::Simulate;

  // model
  ModelKind model = ModelKind::Enhanced;
  double epsilon = 0.01;
  double c = 0.0;
  double x0 = 0.5;
  double y0 = 0.0;
  Chart chart = Chart::XY;

  ToleranceConfig tol{};

  // experiment-specific
  double t_end = 100.0;
  double delta = 0.05;
  double T = 10.0;
  double t_max = 1e5;
  double horizon = 200.0;
  std::uint64_t n_crossings = 10;
  double oracle_tol = 1e-6;
  std::vector<double> epsilon_list;
  std::vector<double> x0_list;
  std::pair<double, double> c_range{-0.5, 0.05};
  std::pair<double, double> thresholds{0.2, 0.6};
  double tol_c = 1e-14;

  // output
  std::uint64_t max_points = 0;  // 0 keeps every accepted step

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void config_error(const std::string& msg) {
  throw Error(ErrorKind::ConfigError, msg);
}

inline double parse_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end || !std::isfinite(out))
    config_error(key + ": expected a finite number, got \"" + std::string(v) + "\"");
  return out;
}

inline std::uint64_t parse_uint(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end)
    config_error(key + ": expected a non-negative integer, got \"" + std::string(v) + "\"");
  return out;
}

inline std::vector<double> parse_list(const std::string& key, std::string_view v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto item = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
    if (item.empty()) config_error(key + ": empty list element in \"" + std::string(v) + "\"");
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::pair<double, double> parse_pair(const std::string& key, std::string_view v) {
  const auto l = parse_list(key, v);
  if (l.size() != 2) config_error(key + ": expected two comma-separated numbers");
  return {l[0], l[1]};
}

// Shortest decimal that parses back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field number(std::string key, T ExperimentConfig::*m) {
  return {key,
          [m, key](ExperimentConfig& c, const std::string& v) {
            if constexpr (std::is_same_v<T, double>)
              c.*m = parse_double(key, v);
            else
              c.*m = parse_uint(key, v);
          },
          [m](const ExperimentConfig& c) {
            if constexpr (std::is_same_v<T, double>)
              return fmt(c.*m);
            else
              return std::to_string(c.*m);
          }};
}

template <class T>
Field tol_number(std::string key, T ToleranceConfig::*m) {
  return {key,
          [m, key](ExperimentConfig& c, const std::string& v) {
            if constexpr (std::is_same_v<T, double>)
              c.tol.*m = parse_double(key, v);
            else
              c.tol.*m = parse_uint(key, v);
          },
          [m](const ExperimentConfig& c) {
            if constexpr (std::is_same_v<T, double>)
              return fmt(c.tol.*m);
            else
              return std::to_string(c.tol.*m);
          }};
}

inline Field pair_field(std::string key, std::pair<double, double> ExperimentConfig::*m) {
  return {key, [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_pair(key, v); },
          [m](const ExperimentConfig& c) { return fmt((c.*m).first) + ", " + fmt((c.*m).second); }};
}

inline Field list_field(std::string key, std::vector<double> ExperimentConfig::*m) {
  return {key, [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_list(key, v); },
          [m](const ExperimentConfig& c) { return fmt_list(c.*m); }};
}

inline const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    v.push_back({"experiment",
                 [](ExperimentConfig& c, const std::string& s) {
                   const auto e = experiment_from(s);
                   if (!e)
                     config_error("experiment: unknown value \"" + s +
                                  "\" (accepted: simulate, bernoulli-check, delay-report, "
                                  "crossings, asymptote-check, canard-scan)");
                   c.experiment = *e;
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.experiment)); }});
    v.push_back({"model",
                 [](ExperimentConfig& c, const std::string& s) {
                   if (s == "enhanced") c.model = ModelKind::Enhanced;
                   else if (s == "transcritical") c.model = ModelKind::Transcritical;
                   else if (s == "vdp") c.model = ModelKind::Vdp;
                   else config_error("model: unknown value \"" + s + "\" (accepted: enhanced, transcritical, vdp)");
                 },
                 [](const ExperimentConfig& c) {
                   switch (c.model) {
                     case ModelKind::Enhanced: return std::string("enhanced");
                     case ModelKind::Transcritical: return std::string("transcritical");
                     case ModelKind::Vdp: return std::string("vdp");
                   }
                   return std::string("?");
                 }});
    v.push_back(number("epsilon", &ExperimentConfig::epsilon));
    v.push_back(number("c", &ExperimentConfig::c));
    v.push_back(number("x0", &ExperimentConfig::x0));
    v.push_back(number("y0", &ExperimentConfig::y0));
    v.push_back({"chart",
                 [](ExperimentConfig& c, const std::string& s) {
                   if (s == "xy") c.chart = Chart::XY;
                   else if (s == "uy") c.chart = Chart::UY;
                   else if (s == "xg") c.chart = Chart::XG;
                   else config_error("chart: unknown value \"" + s + "\" (accepted: xy, uy, xg)");
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.chart)); }});
    v.push_back(tol_number("tol.rel_tol", &ToleranceConfig::rel_tol));
    v.push_back(tol_number("tol.abs_tol", &ToleranceConfig::abs_tol));
    v.push_back(tol_number("tol.max_step", &ToleranceConfig::max_step));
    v.push_back(tol_number("tol.min_step", &ToleranceConfig::min_step));
    v.push_back(tol_number("tol.event_time_tol", &ToleranceConfig::event_time_tol));
    v.push_back(tol_number("tol.max_steps", &ToleranceConfig::max_steps));
    v.push_back(number("t_end", &ExperimentConfig::t_end));
    v.push_back(number("delta", &ExperimentConfig::delta));
    v.push_back(number("T", &ExperimentConfig::T));
    v.push_back(number("t_max", &ExperimentConfig::t_max));
    v.push_back(number("horizon", &ExperimentConfig::horizon));
    v.push_back(number("n_crossings", &ExperimentConfig::n_crossings));
    v.push_back(number("oracle_tol", &ExperimentConfig::oracle_tol));
    v.push_back(list_field("epsilon_list", &ExperimentConfig::epsilon_list));
    v.push_back(list_field("x0_list", &ExperimentConfig::x0_list));
    v.push_back(pair_field("c_range", &ExperimentConfig::c_range));
    v.push_back(pair_field("thresholds", &ExperimentConfig::thresholds));
    v.push_back(number("tol_c", &ExperimentConfig::tol_c));
    v.push_back(number("output.max_points", &ExperimentConfig::max_points));
    return v;
  }();
  return f;
}

inline std::string suggestion(const std::string& key) {
  std::string best;
  std::size_t best_d = 3;
  for (const auto& f : fields()) {
    const auto d = edit_distance(key, f.key);
    if (d < best_d) {
      best_d = d;
      best = f.key;
    }
  }
  return best.empty() ? std::string() : " (did you mean \"" + best + "\"?)";
}

}  // namespace detail

/// Splits "key = value" lines. '#' starts a comment; blank lines are skipped.
/// A key may appear only once.
[[nodiscard]] inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      detail::config_error("line " + std::to_string(lineno) + ": expected key = value");
    const auto key = detail::trim(std::string_view(body).substr(0, eq));
    const auto value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) detail::config_error("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      detail::config_error(key + ": given more than once (line " + std::to_string(lineno) + ")");
  }
  return kv;
}

/// Parses "key=value" as given to --override.
[[nodiscard]] inline std::pair<std::string, std::string> parse_override(std::string_view s) {
  const auto eq = s.find('=');
  if (eq == std::string_view::npos)
    detail::config_error("override \"" + std::string(s) + "\" must have the form key=value");
  return {detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1))};
}

/// Range checks. Messages name the key and the accepted range.
inline void validate(const ExperimentConfig& c, const std::set<std::string>& given = {}) {
  auto fail = [](const std::string& m) { detail::config_error(m); };
  auto positive = [&](const char* key, double v) {
    if (!(v > 0.0)) fail(std::string(key) + " must be > 0 (got " + detail::fmt(v) + ")");
  };
  auto need = [&](const char* key) {
    if (!given.empty() && !given.count(key))
      fail(std::string(key) + " is required for experiment " + std::string(to_string(c.experiment)));
  };
  if (!(c.epsilon > 0.0))
    fail("epsilon (ε) must be > 0 (got " + detail::fmt(c.epsilon) + ")");
  for (double e : c.epsilon_list)
    if (!(e > 0.0)) fail("epsilon_list: every ε must be > 0 (got " + detail::fmt(e) + ")");
  try {
    c.tol.validate();
  } catch (const Error& e) {
    fail(std::string("tol.") + e.what());
  }

  switch (c.experiment) {
    case Experiment::Simulate:
      need("epsilon"); need("x0"); need("y0");
      positive("t_end", c.t_end);
      if (c.chart == Chart::UY && !(std::abs(c.x0) < 1.0))
        fail("x0 must satisfy |x0| < 1 for chart uy (got " + detail::fmt(c.x0) + ")");
      if (c.chart != Chart::XY && c.model != ModelKind::Enhanced)
        fail("chart must be xy for models other than enhanced");
      break;
    case Experiment::BernoulliCheck: {
      positive("oracle_tol", c.oracle_tol);
      const auto xs = c.x0_list.empty() ? std::vector<double>{c.x0} : c.x0_list;
      for (double x : xs)
        if (!(x > 0.0 && x < c.y0 / 2.0))
          fail("x0 must satisfy 0 < x0 < y0/2 (got x0=" + detail::fmt(x) + ", y0=" + detail::fmt(c.y0) + ")");
      break;
    }
    case Experiment::DelayReport:
      need("epsilon");
      if (!(std::abs(c.x0) < 1.0)) fail("x0 must satisfy |x0| < 1 (got " + detail::fmt(c.x0) + ")");
      if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta (δ) must lie in (0, 1) (got " + detail::fmt(c.delta) + ")");
      if (!(c.T >= 0.0)) fail("T must be >= 0 (got " + detail::fmt(c.T) + ")");
      positive("t_max", c.t_max);
      break;
    case Experiment::Crossings:
      need("epsilon");
      if (!(std::abs(c.x0) < 1.0)) fail("x0 must satisfy |x0| < 1 (got " + detail::fmt(c.x0) + ")");
      if (c.n_crossings < 1) fail("n_crossings must be >= 1");
      positive("t_max", c.t_max);
      break;
    case Experiment::AsymptoteCheck:
      need("epsilon"); need("x0");
      if (!(std::abs(c.x0) > 1.0)) fail("x0 must satisfy |x0| > 1 (got " + detail::fmt(c.x0) + ")");
      positive("horizon", c.horizon);
      break;
    case Experiment::CanardScan:
      need("epsilon_list");
      if (!(c.c_range.first < c.c_range.second)) fail("c_range must satisfy low < high");
      if (!(0.0 < c.thresholds.first && c.thresholds.first < c.thresholds.second))
        fail("thresholds must satisfy 0 < low < high");
      positive("tol_c", c.tol_c);
      break;
  }
}

/// Parses a flat key = value config, applies overrides (which may replace
/// keys from the text), fills in defaults and validates.
[[nodiscard]] inline ExperimentConfig parse_config(
    std::string_view text, const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  auto kv = parse_key_values(text);
  for (const auto& [k, v] : overrides) kv[k] = v;

  ExperimentConfig cfg;
  std::set<std::string> given;
  const auto& fs = detail::fields();
  for (const auto& [k, v] : kv) {
    auto it = std::find_if(fs.begin(), fs.end(), [&](const detail::Field& f) { return f.key == k; });
    if (it == fs.end()) detail::config_error("unknown key \"" + k + "\"" + detail::suggestion(k));
    it->set(cfg, v);
    given.insert(k);
  }
  if (!given.count("experiment")) detail::config_error("experiment is required");
  validate(cfg, given);
  return cfg;
}

/// Writes every key, so parse_config(serialize(c)) == c.
[[nodiscard]] inline std::string serialize(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : detail::fields()) out += f.key + " = " + f.get(c) + "\n";
  return out;
}

}  // namespace slowfast::cli
