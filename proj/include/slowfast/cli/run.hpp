#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slowfast/analysis/asymptote.hpp"
#include "slowfast/analysis/crossings.hpp"
#include "slowfast/analysis/delay.hpp"
#include "slowfast/analysis/strip.hpp"
#include "slowfast/analysis/transcritical_delay.hpp"
#include "slowfast/canard/scan.hpp"
#include "slowfast/cli/config.hpp"
#include "slowfast/cli/output.hpp"
#include "slowfast/models/charts.hpp"
#include "slowfast/models/enhanced.hpp"
#include "slowfast/models/transcritical.hpp"
#include "slowfast/models/vdp.hpp"
#include "slowfast/ode/integrate.hpp"
#include "slowfast/version.hpp"

namespace slowfast::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kBudget = 4, kIo = 5 };

[[nodiscard]] constexpr int exit_code_for(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::ConfigError:
      return kConfig;
    case ErrorKind::NotFoundWithinBudget:
    case ErrorKind::IncompleteSummary:
      return kBudget;
    case ErrorKind::IoError:
      return kIo;
    default:
      return kNumerical;
  }
}

struct Artifact {
  std::string name;
  std::string content;
};

struct ExperimentResult {
  std::vector<Artifact> files;
  std::string status = "ok";
  int exit_code = kOk;
  std::string message;
};

struct RunManifest {
  json doc;
  int exit_code = kOk;
};

namespace detail {

inline std::string report_text(const json& j) { return j.dump(2) + "\n"; }

// "NotFoundWithinBudget" -> "not_found_within_budget"
inline std::string snake_case(std::string_view name) {
  std::string out;
  for (char ch : name) {
    if (ch >= 'A' && ch <= 'Z') {
      if (!out.empty()) out += '_';
      out += static_cast<char>(ch - 'A' + 'a');
    } else {
      out += ch;
    }
  }
  return out;
}

template <std::size_t N>
std::string trajectory_csv(const TrajectoryN<N>& tr, const std::vector<std::string>& names,
                           std::uint64_t max_points) {
  std::vector<std::string> header{"t"};
  header.insert(header.end(), names.begin(), names.end());
  header.push_back("kind");
  header.push_back("event_id");
  CsvTable csv(header);

  const std::size_t n = tr.samples.size();
  const std::size_t stride = (max_points == 0 || n <= max_points)
                                 ? 1
                                 : (n + max_points - 1) / max_points;
  std::size_t ev = 0;
  auto emit_events_before = [&](double t) {
    while (ev < tr.events.size() && tr.events[ev].t_event <= t) {
      const auto& e = tr.events[ev++];
      std::vector<std::string> row{cell(e.t_event)};
      for (std::size_t k = 0; k < N; ++k) row.push_back(cell(e.state.q[k]));
      row.push_back("event");
      row.push_back(e.event_id);
      csv.row(row);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (i % stride != 0 && i + 1 != n) continue;
    const auto& s = tr.samples[i];
    emit_events_before(s.t);
    std::vector<std::string> row{cell(s.t)};
    for (std::size_t k = 0; k < N; ++k) row.push_back(cell(s.q[k]));
    row.push_back("sample");
    row.push_back("");
    csv.row(row);
  }
  emit_events_before(std::numeric_limits<double>::infinity());
  return csv.str();
}

inline ExperimentResult run_simulate(const ExperimentConfig& c) {
  SystemModel m;
  Vec2 q0{c.x0, c.y0};
  std::vector<std::string> names{"x", "y"};
  switch (c.model) {
    case ModelKind::Enhanced:
      m = make_enhanced_delay(c.epsilon, c.chart);
      if (c.chart == Chart::UY) {
        q0 = chart_transform(q0, Chart::XY, Chart::UY);
        names = {"u", "y"};
      } else if (c.chart == Chart::XG) {
        q0 = {c.x0, c.y0 - c.x0};
        names = {"x", "g"};
      }
      break;
    case ModelKind::Transcritical:
      m = make_transcritical_dynamical(c.epsilon);
      break;
    case ModelKind::Vdp:
      m = make_vdp_canard(c.epsilon, c.c);
      break;
  }
  const State s0{0.0, q0};
  const IntegrateOptions opts{m.chart == Chart::XY ? c.chart : m.chart};
  const Trajectory tr = c.chart == Chart::XG
                            ? integrate<2>(m, s0, c.t_end, c.tol, m.standard_events, opts,
                                           Rosenbrock23{})
                            : integrate<2>(m, s0, c.t_end, c.tol, m.standard_events, opts);

  ExperimentResult r;
  r.files.push_back({"trajectory.csv", trajectory_csv(tr, names, c.max_points)});
  json rep{{"experiment", "simulate"},
           {"model", m.name},
           {"chart", std::string(to_string(tr.chart))},
           {"termination", std::string(to_string(tr.termination))},
           {"accepted_steps", tr.accepted_steps},
           {"rejected_steps", tr.rejected_steps},
           {"events", tr.events.size()},
           {"t_final", tr.back().t},
           {"state_final", {tr.back().q[0], tr.back().q[1]}}};
  r.files.push_back({"report.json", report_text(rep)});
  if (tr.termination == Termination::StepBudget) {
    r.status = "step_budget";
    r.exit_code = kBudget;
  } else if (tr.termination == Termination::StepFloor) {
    r.status = "step_floor";
    r.exit_code = kNumerical;
  }
  return r;
}

inline ExperimentResult run_bernoulli(const ExperimentConfig& c) {
  const auto eps_list = c.epsilon_list.empty() ? std::vector<double>{c.epsilon} : c.epsilon_list;
  const auto x0_list = c.x0_list.empty() ? std::vector<double>{c.x0} : c.x0_list;
  CsvTable csv({"epsilon", "x0", "y0", "t", "x_numeric", "x_closed_form", "rel_err"});
  json cases = json::array();
  double worst = 0.0;
  for (double eps : eps_list)
    for (double x0 : x0_list) {
      // Compare here rather than inside, so the table is written on mismatch too.
      const auto rep = verify_transcritical_delay(x0, c.y0, eps,
                                                  std::numeric_limits<double>::max(), [&] {
                                                    ToleranceConfig t = transcritical_tolerances();
                                                    t.max_steps = c.tol.max_steps;
                                                    return t;
                                                  }());
      for (const auto& row : rep.rows)
        csv.row({cell(eps), cell(x0), cell(c.y0), cell(row.t), cell(row.x_numeric),
                 cell(row.x_closed_form), cell(row.rel_err)});
      worst = std::max(worst, rep.max_rel_err);
      cases.push_back({{"epsilon", eps},
                       {"x0", x0},
                       {"y0", c.y0},
                       {"max_rel_err", rep.max_rel_err},
                       {"max_x", rep.max_x},
                       {"t_max_x", rep.t_max_x},
                       {"delay_holds", rep.delay_holds},
                       {"x_mid", rep.x_mid},
                       {"log_x_mid", rep.log_x_mid}});
    }
  ExperimentResult r;
  r.files.push_back({"bernoulli.csv", csv.str()});
  r.files.push_back({"report.json", report_text({{"experiment", "bernoulli-check"},
                                                 {"oracle_tol", c.oracle_tol},
                                                 {"max_rel_err", worst},
                                                 {"cases", cases}})});
  if (worst > c.oracle_tol) {
    r.status = "oracle_mismatch";
    r.exit_code = kNumerical;
    r.message = "max relative error " + detail::fmt(worst) + " exceeds oracle_tol " +
                detail::fmt(c.oracle_tol);
  }
  return r;
}

inline ExperimentResult run_delay(const ExperimentConfig& c) {
  EnhancedDelayBudget budget{c.t_max, c.tol.max_steps};
  const auto out = verify_enhanced_delay(c.x0, c.y0, c.epsilon, c.delta, c.T, budget, c.tol);
  CsvTable csv({"index", "branch", "enter_t", "exit_t", "duration", "y_enter", "y_exit", "open"});
  for (std::size_t i = 0; i < out.passes.size(); ++i) {
    const auto& [b, p] = out.passes[i];
    csv.row({cell(static_cast<std::uint64_t>(i)), b, cell(p.enter_t), cell(p.exit_t),
             cell(p.duration), cell(p.y_enter), cell(p.y_exit), cell(p.open)});
  }
  json rep{{"experiment", "delay-report"},
           {"delta", c.delta},
           {"T", c.T},
           {"found", out.found},
           {"passes", out.passes.size()},
           {"crossings", out.crossings},
           {"a_n", out.a_n},
           {"t_reached", out.t_reached}};
  if (out.found)
    rep["witness"] = {{"pass_index", out.pass_index},
                      {"branch", out.branch},
                      {"enter_t", out.witness.enter_t},
                      {"exit_t", out.witness.exit_t},
                      {"duration", out.witness.duration},
                      {"open", out.witness.open}};
  ExperimentResult r;
  r.files.push_back({"passes.csv", csv.str()});
  r.files.push_back({"report.json", report_text(rep)});
  if (!out.found) {
    r.status = "not_found_within_budget";
    r.exit_code = kBudget;
    r.message = "no pass longer than T within the budget";
  }
  return r;
}

inline ExperimentResult run_crossings(const ExperimentConfig& c) {
  StripRunSpec spec{c.x0, c.y0, c.epsilon, c.delta, c.n_crossings, c.t_max, c.tol};
  const auto tr = run_strip(spec);
  auto rep = crossing_sequences(tr, c.epsilon);
  rep.truncate(c.n_crossings);
  CsvTable csv({"n", "t_n", "a_n", "theta_n", "xi_n", "log_one_minus_xi2", "res_w_t",
                "res_w_theta", "res_telescoping", "ineq_squares", "ineq_sum"});
  for (const auto& e : rep.entries)
    csv.row({cell(e.n), cell(e.t), cell(e.a), cell(e.theta), cell(e.xi), cell(e.log_one_minus_xi2),
             cell(e.res_w_t), cell(e.res_w_theta), cell(e.res_telescoping), cell(e.ineq_squares),
             cell(e.ineq_sum)});
  json j{{"experiment", "crossings"},
         {"crossings", rep.entries.size()},
         {"first_index", rep.first_index},
         {"alternating", rep.alternating},
         {"max_identity_residual", rep.max_identity_residual()},
         {"inequalities_hold", rep.inequalities_hold()},
         {"a_n", rep.a_n()}};
  if (rep.entries.size() >= 5) {
    const auto g = a_n_growth(rep);
    j["growth"] = {{"increments", g.increments},
                   {"strictly_increasing", g.strictly_increasing},
                   {"slope", g.slope}};
  }
  ExperimentResult r;
  r.files.push_back({"crossings.csv", csv.str()});
  r.files.push_back({"report.json", report_text(j)});
  if (rep.entries.size() < c.n_crossings) {
    r.status = "not_found_within_budget";
    r.exit_code = kBudget;
    r.message = "only " + std::to_string(rep.entries.size()) + " crossings before t_max";
  }
  return r;
}

inline ExperimentResult run_asymptote(const ExperimentConfig& c) {
  ToleranceConfig tol = asymptote_tolerances();
  tol.max_steps = c.tol.max_steps;
  const auto rep = asymptote_check(c.x0, c.epsilon, c.horizon, 1e-9, 0.1, tol);
  CsvTable csv({"t", "gap"});
  const std::size_t n = rep.gaps.size();
  const std::size_t stride =
      (c.max_points == 0 || n <= c.max_points) ? 1 : (n + c.max_points - 1) / c.max_points;
  for (std::size_t i = 0; i < n; ++i)
    if (i % stride == 0 || i + 1 == n) csv.row({cell(rep.gaps[i].t), cell(rep.gaps[i].gap)});
  ExperimentResult r;
  r.files.push_back({"gap.csv", csv.str()});
  r.files.push_back({"report.json", report_text({{"experiment", "asymptote-check"},
                                                 {"x0", rep.x0},
                                                 {"y0", rep.y0},
                                                 {"epsilon", rep.eps},
                                                 {"horizon", rep.horizon},
                                                 {"alpha0", rep.alpha0},
                                                 {"bound", rep.bound},
                                                 {"sup_gap", rep.sup_gap},
                                                 {"t_sup", rep.t_sup},
                                                 {"min_gap", rep.min_gap},
                                                 {"gap_at_horizon", rep.gap_at_horizon},
                                                 {"x_at_horizon", rep.x_at_horizon},
                                                 {"above_line", rep.above_line},
                                                 {"bound_satisfied", rep.bound_satisfied},
                                                 {"steps", rep.steps}})});
  return r;
}

inline ExperimentResult run_canard(const ExperimentConfig& c) {
  WindowOptions opt;
  opt.c_range = c.c_range;
  opt.tol_c = c.tol_c;
  opt.summary.tol = c.tol;
  const auto fit = window_scaling(c.epsilon_list, c.thresholds, opt);
  CsvTable csv({"epsilon", "a_ref", "c_low_transition", "c_high_transition", "width",
                "resolution", "at_floor"});
  for (const auto& p : fit.points)
    csv.row({cell(p.eps), cell(p.a_ref), cell(p.low.midpoint()), cell(p.high.midpoint()),
             cell(p.width), cell(p.resolution), cell(p.at_floor)});
  ExperimentResult r;
  r.files.push_back({"canard.csv", csv.str()});
  r.files.push_back({"report.json", report_text({{"experiment", "canard-scan"},
                                                 {"slope", fit.slope},
                                                 {"intercept", fit.intercept},
                                                 {"r_squared", fit.r_squared},
                                                 {"used", fit.used}})});
  return r;
}

}  // namespace detail

[[nodiscard]] inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::Simulate: return detail::run_simulate(c);
    case Experiment::BernoulliCheck: return detail::run_bernoulli(c);
    case Experiment::DelayReport: return detail::run_delay(c);
    case Experiment::Crossings: return detail::run_crossings(c);
    case Experiment::AsymptoteCheck: return detail::run_asymptote(c);
    case Experiment::CanardScan: return detail::run_canard(c);
  }
  throw Error(ErrorKind::ConfigError, "unknown experiment");
}

/// Runs the experiment, writes each output atomically into out_dir and the
/// manifest (manifest.json) last. Library errors become a manifest with an
/// error status and the matching exit code; outputs are only written when
/// the experiment produced them.
[[nodiscard]] inline RunManifest run(const ExperimentConfig& c, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string());

  ExperimentResult res;
  try {
    res = run_experiment(c);
  } catch (const BlowUpError& e) {
    res = {{}, "blow_up", kNumerical, e.what()};
  } catch (const Error& e) {
    res = {{}, detail::snake_case(to_string(e.kind())), exit_code_for(e.kind()), e.what()};
  }

  json outputs = json::array();
  for (const auto& f : res.files) {
    atomic_write(out_dir / f.name, f.content);
    outputs.push_back(
        {{"file", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
  }
  RunManifest m;
  m.exit_code = res.exit_code;
  m.doc = {{"tool", "slowfast"},
           {"version", kVersion},
           {"experiment", std::string(to_string(c.experiment))},
           {"config", serialize(c)},
           {"status", res.status},
           {"exit_code", res.exit_code},
           {"message", res.message},
           {"outputs", outputs}};
  m.doc["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  atomic_write(out_dir / "manifest.json", m.doc.dump(2) + "\n");
  return m;
}

}  // namespace slowfast::cli
