// Acceptance suite: one line per criterion, "PASS" or "FAIL", followed by the
// measured quantities. `--only N` runs a single criterion (used by ctest).

#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "slowfast/cli/config.hpp"
#include "slowfast/cli/output.hpp"
#include "slowfast/cli/run.hpp"
#include "slowfast/slowfast.hpp"

using namespace slowfast;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check; the criterion passes only if every sub-check does.
  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "[x] ") << what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// 1: numeric transcritical runs against the closed form.
void bernoulli_oracle(Outcome& o) {
  double worst = 0.0;
  for (double eps : {0.1, 0.05, 0.02})
    for (double x0 : {0.05, 0.1, 0.4}) {
      try {
        const auto r = verify_transcritical_delay(x0, 1.0, eps, 1e-6);
        worst = std::max(worst, r.max_rel_err);
      } catch (const Error& e) {
        o.check(false, "eps=" + num(eps) + " x0=" + num(x0) + ": " + e.what());
      }
    }
  o.check(worst <= 1e-6, "max rel err " + num(worst) + " (tol 1e-6) over 9 grid points");
}

// 2: I(2 y0 / eps) -> 2 / y0.
void integral_limit(Outcome& o) {
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::string vals;
  for (double eps : {0.1, 0.05, 0.02, 0.01}) {
    const double d = std::abs(bernoulli_integral(1.0, eps, 2.0 / eps).value() - 2.0);
    decreasing = decreasing && d < prev;
    prev = d;
    vals += (vals.empty() ? "" : ", ") + num(d);
  }
  o.check(decreasing, "|I-2| = " + vals + " strictly decreasing");
  o.check(prev <= 0.05, "|I-2| at eps=0.01 is " + num(prev) + " (<= 0.05)");
}

// 3: max x over (0, 2 y0/eps) below x0, and x(y0/eps) < 1e-6 x0.
void transcritical_bound(Outcome& o) {
  int below = 0, mid_ok = 0, total = 0;
  double worst_ratio = 0.0, worst_mid = 0.0;
  for (double eps : {0.05, 0.02})
    for (double x0 : {0.05, 0.1, 0.4}) {
      const auto r = verify_transcritical_delay(x0, 1.0, eps, 1e-6);
      ++total;
      if (r.max_x < x0) ++below;
      if (r.x_mid < 1e-6 * x0) ++mid_ok;
      worst_ratio = std::max(worst_ratio, r.max_x / x0);
      worst_mid = std::max(worst_mid, r.x_mid / x0);
    }
  o.check(below == total, "max x < x0 at " + std::to_string(below) + "/" +
                              std::to_string(total) + " grid points (worst max x / x0 = " +
                              num(worst_ratio) + ")");
  o.check(mid_ok == total, "x(y0/eps) < 1e-6 x0 at " + std::to_string(mid_ok) + "/" +
                               std::to_string(total) + " (worst ratio " + num(worst_mid) + ")");
}

// 4: w non-decreasing on 20 strip starts, dPhi/dt against a finite difference.
void lyapunov_monotone(Outcome& o) {
  const double xs[] = {-0.9, -0.4, 0.0, 0.3, 0.8};
  const double ys[] = {-1.2, -0.2, 0.5, 1.5};
  double worst_drop = -std::numeric_limits<double>::infinity(), worst_fd = 0.0;
  std::size_t checked = 0, runs = 0;
  for (double eps : {0.05, 0.01})
    for (double x0 : xs)
      for (double y0 : ys) {
        const auto m = make_enhanced_delay(eps, Chart::UY);
        const Vec2 q0 = chart_transform({x0, y0}, Chart::XY, Chart::UY);
        const auto tr = integrate<2>(m, State{0.0, q0}, 20.0 / eps, ToleranceConfig{}, {},
                                     IntegrateOptions{Chart::UY});
        ++runs;
        for (std::size_t i = 1; i < tr.samples.size(); ++i) {
          const auto& a = tr.samples[i - 1].q;
          const auto& b = tr.samples[i].q;
          worst_drop = std::max(worst_drop, w_uy(a[0], a[1], eps) - w_uy(b[0], b[1], eps));
        }
        // Centered difference of Phi along the field in 50-digit arithmetic.
        for (const auto& s : tr.samples) {
          const double rate = phi_rate(s.q[0], s.q[1]);
          if (!(std::abs(rate) > 1e-10)) continue;
          const Vec2 f = m(0.0, s.q);
          using Real = boost::multiprecision::cpp_bin_float_50;
          const Real h("1e-15");
          auto P = [&](int k) {
            const Real u = Real(s.q[0]) + k * h * f[0], y = Real(s.q[1]) + k * h * f[1];
            const Real d = tanh(u) - y;
            return Real(d * d / 2 + eps * log(cosh(u)));
          };
          const double fd = static_cast<double>((P(1) - P(-1)) / (2 * h));
          worst_fd = std::max(worst_fd, std::abs(fd - rate) / std::abs(rate));
          ++checked;
        }
      }
  o.check(worst_drop <= 1e-12,
          "largest step-to-step drop of w " + num(worst_drop) + " (slack 1e-12) over " +
              std::to_string(runs) + " runs");
  o.check(worst_fd <= 1e-4, "finite-difference dPhi/dt rel err " + num(worst_fd) + " (tol 1e-4) at " +
                                std::to_string(checked) + " samples");
}

// 5: 2 Phi(u, y) = w(x, y) on random strip points.
void two_phi_equals_w(Outcome& o) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(-5.0, 5.0), ue(0.005, 0.5);
  double worst = 0.0;
  int n = 0;
  while (n < 1000) {
    const double x = ux(rng), y = uy(rng), eps = ue(rng);
    if (!(std::abs(x) < 1.0)) continue;
    ++n;
    const double wv = w(x, y, eps);
    const double res = std::abs(2.0 * phi(std::atanh(x), y, eps) - wv);
    worst = std::max(worst, std::abs(wv) > 1.0 ? res / std::abs(wv) : res);
  }
  o.check(worst <= 1e-12, "max residual " + num(worst) + " (tol 1e-12) over 1000 points");
}

CrossingReport strip_crossings(double x0, double y0, std::size_t n) {
  StripRunSpec spec;
  spec.x0 = x0;
  spec.y0 = y0;
  spec.eps = 0.01;
  spec.n_crossings = n;
  return crossing_sequences(run_strip(spec), spec.eps);
}

// 6: ordering, identities and inequalities over the first 10 crossings.
void crossing_identities(Outcome& o) {
  auto r = strip_crossings(0.5, 0.0, 11);
  r.truncate(10);
  o.check(r.entries.size() == 10, std::to_string(r.entries.size()) + " crossings");
  bool ordered = true;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    const double t_next = i + 1 < r.entries.size() ? r.entries[i + 1].t : e.t + 1e300;
    ordered = ordered && e.has_next && e.t < e.theta && e.theta < t_next;
  }
  o.check(ordered, "t_n < theta_n < t_{n+1}");
  o.check(r.max_identity_residual() <= 1e-6,
          "identity residual " + num(r.max_identity_residual()) + " (tol 1e-6)");
  o.check(r.inequalities_hold(), "both inequalities hold");
  o.check(r.alternating, "y(t_n) alternates in sign");
}

// 7: a_n strictly increasing, increments within 5% of 2 from n = 10 on.
void unbounded_growth(Outcome& o) {
  const auto r = strip_crossings(0.5, 0.0, 30);
  const std::size_t from = static_cast<std::size_t>(std::max(0, 10 - r.first_index));
  const auto fit = a_n_growth(r, from, 0.05);
  o.check(fit.strictly_increasing, "a_n strictly increasing over " +
                                       std::to_string(r.entries.size()) + " crossings (a_last = " +
                                       num(r.entries.back().a) + ")");
  o.check(fit.approaches_two, "max |increment - 2| / 2 for n >= 10 is " +
                                  num(fit.max_rel_deviation_from_two) + " (band 0.05)");
}

// 8: a residence pass longer than T, and growing pass durations.
void enhanced_delay(Outcome& o) {
  const auto out = verify_enhanced_delay(0.5, 0.0, 0.01, 0.05, 10.0);
  o.check(out.found, out.found ? "witness pass " + std::to_string(out.pass_index) + " on " +
                                     out.branch + " lasting " + num(out.witness.duration)
                               : std::string("no witness within budget"));

  EnhancedDelayBudget budget;
  budget.t_max = 20000.0;
  const auto longer = verify_enhanced_delay(0.5, 0.0, 0.01, 0.05, 1e12, budget);
  std::vector<double> d;
  for (const auto& [branch, p] : longer.passes)
    if (!p.open) d.push_back(p.duration);
  bool increasing = d.size() >= 6;
  for (std::size_t i = 1; i < d.size(); ++i) increasing = increasing && d[i] > d[i - 1];
  std::string list;
  for (std::size_t i = 0; i < std::min<std::size_t>(d.size(), 8); ++i)
    list += (i ? ", " : "") + num(d[i]);
  o.check(increasing, std::to_string(d.size()) + " closed passes, durations " + list +
                          (d.size() > 8 ? ", ..." : "") + " strictly increasing");
}

// 9: the mirrored start reproduces t_n and a_n.
void symmetry(Outcome& o) {
  const auto p = strip_crossings(0.5, 0.0, 10);
  const auto m = strip_crossings(-0.5, 0.0, 10);
  o.check(p.entries.size() == m.entries.size() && !p.entries.empty(),
          std::to_string(p.entries.size()) + " vs " + std::to_string(m.entries.size()) +
              " crossings");
  double dt = 0.0, da = 0.0;
  for (std::size_t i = 0; i < std::min(p.entries.size(), m.entries.size()); ++i) {
    dt = std::max(dt, std::abs(p.entries[i].t - m.entries[i].t) / p.entries[i].t);
    da = std::max(da, std::abs(p.entries[i].a - m.entries[i].a) / p.entries[i].a);
  }
  o.check(dt <= 1e-9 && da <= 1e-9, "max rel diff t_n " + num(dt) + ", a_n " + num(da));
}

// 10: outside the strip the orbit stays above y = x and approaches it.
void outside_asymptotics(Outcome& o) {
  const auto r = asymptote_check(3.0, 0.1, 200.0, 1e-9, 0.1);
  o.check(r.above_line, "min (y - x) = " + num(r.min_gap) + " (>= -1e-9)");
  o.check(r.gap_at_horizon <= 0.1 * r.sup_gap,
          "(y - x)(200) = " + num(r.gap_at_horizon) + " vs 10% of max " + num(0.1 * r.sup_gap));
  o.check(r.bound_satisfied, "sup (y - x) = " + num(r.sup_gap) + " at t = " + num(r.t_sup) +
                                 " vs 1/(2 alpha0) (1 + 0.1) = " + num(r.bound * 1.1));
}

// 11: canard window narrows with eps; log width linear in 1/eps.
void canard_window(Outcome& o) {
  const auto fit = window_scaling({0.12, 0.1, 0.08});
  bool resolved = true, decreasing = true;
  std::string widths;
  for (std::size_t i = 0; i < fit.points.size(); ++i) {
    resolved = resolved && !fit.points[i].at_floor;
    if (i) decreasing = decreasing && fit.points[i].width < fit.points[i - 1].width;
    widths += (i ? ", " : "") + num(fit.points[i].width);
  }
  o.check(resolved, "all transitions bracketed above the resolution floor");
  o.check(decreasing, "widths " + widths + " for eps 0.12, 0.1, 0.08");
  o.check(fit.slope < 0.0 && fit.r_squared >= 0.9,
          "slope " + num(fit.slope) + ", R^2 " + num(fit.r_squared));
}

// 12: config round trip, byte-identical reruns, interrupted writes.
void plumbing(Outcome& o) {
  using namespace slowfast::cli;
  const auto cfg = parse_config(
      "experiment = crossings\nepsilon = 0.02\nx0 = 0.5\ny0 = 0\nn_crossings = 6\n"
      "tol.rel_tol = 1e-10\n");
  o.check(parse_config(serialize(cfg)) == cfg, "config round trip");

  const fs::path base = fs::temp_directory_path() / ("slowfast_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  const auto a = run(cfg, base / "a");
  const auto b = run(cfg, base / "b");
  bool same = a.exit_code == kOk && a.doc["outputs"] == b.doc["outputs"];
  for (const char* f : {"crossings.csv", "report.json"})
    same = same && read_file(base / "a" / f) == read_file(base / "b" / f);
  o.check(same, "reruns byte-identical");

  const fs::path target = base / "atomic.json";
  atomic_write(target, std::string_view("complete\n"));
  const pid_t pid = ::fork();
  if (pid == 0) {
    atomic_write(target, [](std::ostream& os) {
      os << "partial" << std::flush;
      ::raise(SIGKILL);
    });
    ::_exit(0);
  }
  int st = 0;
  ::waitpid(pid, &st, 0);
  o.check(pid > 0 && WIFSIGNALED(st) && read_file(target) == "complete\n",
          "killed writer leaves previous content");
  fs::remove_all(base);
}

struct Criterion {
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-12)")->check(CLI::Range(0, 12));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"closed-form oracle", bernoulli_oracle},
      {"integral limit", integral_limit},
      {"transcritical delay bound", transcritical_bound},
      {"lyapunov monotonicity", lyapunov_monotone},
      {"2 phi = w", two_phi_equals_w},
      {"crossing identities", crossing_identities},
      {"unbounded growth", unbounded_growth},
      {"enhanced delay", enhanced_delay},
      {"mirror symmetry", symmetry},
      {"outside-strip asymptotics", outside_asymptotics},
      {"canard window", canard_window},
      {"plumbing", plumbing},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    Outcome o;
    try {
      criteria[i].run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("error: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::printf("%s c%02zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
