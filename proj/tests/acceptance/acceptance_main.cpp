// Acceptance criteria, one PASS/FAIL line each. Exit status is the number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dmoc/baselines/baselines.hpp"
#include "dmoc/cli/config.hpp"
#include "dmoc/cli/runs.hpp"
#include "dmoc/diff/derivatives.hpp"
#include "dmoc/discmech/discmech.hpp"
#include "dmoc/ocp/ocp.hpp"
#include "dmoc/problems/problems.hpp"
#include "dmoc/simulate/simulate.hpp"
#include "dmoc/sqp/sqp.hpp"

using namespace dmoc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Solved {
  Nlp nlp;
  sqp::SqpResult r;
  bool ok() const { return r.status == sqp::SqpStatus::converged; }
};

Solved solve(const Ocp& ocp, const std::string& method, const sqp::SqpOptions& opts = {}) {
  Solved s{transcribe_method(ocp, method), {}};
  s.r = sqp::solve(s.nlp, initial_guess(s.nlp), opts);
  return s;
}

Ocp benchmark(const std::string& name, int N) {
  return name == "orbital" ? problems::orbital_transfer({}, N) : problems::two_link({}, N);
}

bool in_band(double x, double lo, double hi) { return x >= lo && x <= hi; }

// 1. DMOC and Hamiltonian midpoint solutions coincide.
Outcome equivalence() {
  const auto t0 = Clock::now();
  sqp::SqpOptions o;
  o.stationarity_tol = 1e-10;
  o.feasibility_tol = 1e-10;
  const Ocp ocp = benchmark("orbital", 32);
  const Solved a = solve(ocp, "dmoc", o), b = solve(ocp, "ham-midpoint", o);
  const double dt = seconds_since(t0);
  Outcome out;
  if (!a.ok() || !b.ok()) {
    out.summary = "solver status dmoc=" + sqp::to_string(a.r.status) + " ham=" + sqp::to_string(b.r.status);
    return out;
  }
  const SolutionGap g = compare_solutions(a.nlp, a.r.x, b.nlp, b.r.x);
  out.pass = g.configuration_gap <= 1e-6 && g.objective_gap <= 1e-8 && dt <= 60.0;
  out.summary = fmt("orbital N=32: configuration gap %.3e (<= 1e-6), objective gap %.3e (<= 1e-8), %.2f s (<= 60)",
                    g.configuration_gap, g.objective_gap, dt);
  out.details.push_back(fmt("objectives dmoc %.17g ham %.17g; control gap %.3e, velocity gap %.3e", a.r.objective,
                            b.r.objective, g.control_gap, g.velocity_gap));
  return out;
}

// 2. Telescoped Noether residual: exact for DMOC and Hamiltonian midpoint,
// not for the velocity form.
Outcome noether_balance() {
  const Ocp ocp = benchmark("orbital", 64);
  Outcome out;
  double totals[3];
  double scale = 1.0;
  const char* methods[3] = {"dmoc", "ham-midpoint", "vel-midpoint"};
  for (int i = 0; i < 3; ++i) {
    const Solved s = solve(ocp, methods[i]);
    if (!s.ok()) {
      out.summary = std::string(methods[i]) + " did not converge: " + sqp::to_string(s.r.status);
      return out;
    }
    const NoetherAudit a = method_noether_audit(s.nlp, s.r.x, 0);
    totals[i] = std::fabs(a.total);
    if (i == 0) scale = a.scale;
    out.details.push_back(fmt("%s: total %.3e, max |delta_k| %.3e, scale %.6g", methods[i], a.total, a.max_abs, a.scale));
  }
  const double bound = 1e-9 * scale;
  const double factor = totals[2] / std::max({totals[0], totals[1], 1e-300});
  out.pass = totals[0] <= bound && totals[1] <= bound && totals[2] >= 100 * totals[0] && totals[2] >= 100 * totals[1];
  out.summary = fmt("orbital N=64: |total| dmoc %.3e, ham %.3e (<= %.3e); vel %.3e, factor %.3e (>= 100)", totals[0],
                    totals[1], bound, totals[2], factor);
  return out;
}

// 3. Self-convergence slopes against N=512.
Outcome convergence_order() {
  const auto t0 = Clock::now();
  Outcome out;
  out.pass = true;
  std::string summary;
  for (const std::string name : {"orbital", "two-link"}) {
    cli::RunConfig cfg = cli::parse_config(cli::Json{{"problem", name}, {"method", "dmoc"}});
    cfg.converge.grids = {8, 16, 32, 64, 128, 512};
    try {
      const cli::ConvergenceStudy st = cli::convergence_study(cfg);
      const bool ok = in_band(st.q_slope, 1.7, 2.3) && in_band(st.u_slope, 1.7, 2.3);
      out.pass = out.pass && ok;
      summary += fmt("%s q %.3f u %.3f%s; ", name.c_str(), st.q_slope, st.u_slope, ok ? "" : " (out of band)");
      for (const cli::ConvergenceRow& row : st.rows) {
        out.details.push_back(fmt("%s N=%d q_error %.3e u_error %.3e", name.c_str(), row.N, row.q_error, row.u_error));
      }
      std::string pairs = name + " pairwise q:";
      for (double s : st.q_pair_slopes) pairs += fmt(" %.3f", s);
      pairs += "  u:";
      for (double s : st.u_pair_slopes) pairs += fmt(" %.3f", s);
      out.details.push_back(pairs);
    } catch (const std::exception& e) {
      out.pass = false;
      summary += name + " failed: " + e.what() + "; ";
    }
  }
  const double dt = seconds_since(t0);
  out.pass = out.pass && dt <= 600.0;
  out.summary = summary + fmt("slopes in [1.7, 2.3]; %.1f s (<= 600)", dt);
  return out;
}

// 4. Consistency order of midpoint L_d and f_d^± against the exact-discrete oracle.
Outcome consistency() {
  const std::vector<double> grid{0.2, 0.1, 0.05, 0.025, 0.0125};
  struct Case {
    const char* name;
    LagrangianSystem sys;
    State x0;
    double u;
  };
  const std::vector<Case> cases{
      {"pendulum", problems::pendulum(), {Vec::Constant(1, 0.8), Vec::Constant(1, 0.3)}, 0.5},
      {"orbital", problems::orbital_system({}), {Vec{{1.0, 0.0}}, Vec{{0.0, 1.0}}}, 0.1},
  };
  Outcome out;
  out.pass = true;
  for (const Case& c : cases) {
    const int m = c.sys.m;
    const double u = c.u;
    const ConsistencyReport r = consistency_order(c.sys, c.x0, [m, u](double) { return Vec::Constant(m, u); }, grid);
    auto ok = [](double order, bool exact) { return exact || in_band(order, 1.8, 2.2); };
    const bool pass = ok(r.lagrangian_order, r.lagrangian_exact) && ok(r.force_minus_order, r.force_minus_exact) &&
                      ok(r.force_plus_order, r.force_plus_exact);
    out.pass = out.pass && pass;
    out.summary += fmt("%s L_d %.3f f- %.3f f+ %.3f%s; ", c.name, r.lagrangian_order, r.force_minus_order,
                       r.force_plus_order, pass ? "" : " (out of band)");
    out.details.push_back(fmt("%s f- + f+ order %.3f; smallest-h errors L_d %.3e f- %.3e f+ %.3e", c.name,
                              r.force_sum_order, r.lagrangian_error.back(), r.force_minus_error.back(),
                              r.force_plus_error.back()));
  }
  out.summary += "orders 2.0 +- 0.2";
  return out;
}

// 5. Multipliers satisfy the midpoint adjoint recursion.
Outcome adjoint_structure() {
  Outcome out;
  out.pass = true;
  for (const std::string name : {"orbital", "two-link"}) {
    for (int N : {32, 64}) {
      const Solved s = solve(benchmark(name, N), "dmoc");
      if (!s.ok()) {
        out.pass = false;
        out.summary += fmt("%s N=%d not converged; ", name.c_str(), N);
        continue;
      }
      const AdjointExtract a = extract_adjoints(s.nlp, s.r.x, s.r.lambda);
      const bool ok = a.max_residual <= 1e-6 * a.scale;
      out.pass = out.pass && ok;
      out.summary += fmt("%s N=%d %.3e; ", name.c_str(), N, a.max_residual / a.scale);
    }
  }
  out.summary += "relative residual <= 1e-6";
  return out;
}

// 6. Variable counts and their ratios.
Outcome problem_sizes() {
  Outcome out;
  int mismatches = 0;
  double ratio_o = 0.0, ratio_t = 0.0;
  bool monotone = true;
  for (int N = 2; N <= 128; ++N) {
    for (const std::string name : {"orbital", "two-link"}) {
      const Ocp ocp = benchmark(name, N);
      const int n = ocp.sys.n, m = ocp.sys.m;
      const int d = transcribe(ocp).num_vars, h = transcribe_hamiltonian_midpoint(ocp).num_vars;
      const int v = transcribe_velocity_midpoint(ocp).num_vars;
      mismatches += (d != n * (N + 1) + m * N) + (h != 2 * n * (N + 1) + m * N) + (v != h);
      const double ratio = double(d) / h;
      double& prev = name == "orbital" ? ratio_o : ratio_t;
      monotone = monotone && ratio > prev;
      prev = ratio;
    }
  }
  const double gap_o = std::fabs(ratio_o - 3.0 / 5.0), gap_t = std::fabs(ratio_t - 2.0 / 3.0);
  // (3N+2)/(5N+4) − 3/5 = −2/(5(5N+4)); (4N+2)/(6N+4) − 2/3 = −1/(3(3N+2)).
  const double bound_o = 2.0 / (5.0 * (5 * 128 + 4)), bound_t = 1.0 / (3.0 * (3 * 128 + 2));
  out.pass = mismatches == 0 && monotone && gap_o <= bound_o * (1 + 1e-12) && gap_t <= bound_t * (1 + 1e-12);
  out.summary = fmt("N=2..128: %d count mismatches; N=128 ratios orbital %.6f (3/5), two-link %.6f (2/3)%s", mismatches,
                    ratio_o, ratio_t, monotone ? "" : ", not monotone");
  return out;
}

// 7. Unforced rollouts: bounded pendulum energy, conserved orbital momentum.
Outcome structure_preservation() {
  Outcome out;
  const int N = 10000;
  const double h = 0.1;
  const RolloutResult pend = rollout(problems::pendulum(), Vec::Constant(1, 1.0), Vec::Zero(1),
                                     std::vector<Vec>(N, Vec::Zero(1)), h, N);
  const EnergyStats e = energy_series(pend);
  const double E0 = pend.energies.front();
  const RolloutResult orb = rollout(problems::orbital_system({}), Vec{{1.0, 0.0}}, Vec{{0.2, 1.15}},
                                    std::vector<Vec>(N, Vec::Zero(1)), h, N);
  const double J0 = orb.momenta.front()[1];
  double drift = 0.0, scale = std::fabs(J0);
  for (const Vec& p : orb.momenta) {
    drift = std::max(drift, std::fabs(p[1] - J0));
    scale = std::max(scale, std::fabs(p[1]));
  }
  scale = std::max(1.0, scale);
  out.pass = e.max_deviation <= 0.05 * E0 && std::fabs(e.slope) <= 1e-8 && drift <= 1e-10 * scale;
  out.summary = fmt("pendulum 1e4 steps: max |E-E0| %.3e (<= %.3e), slope %.3e (<= 1e-8); orbital momentum drift %.3e "
                    "(<= %.3e)",
                    e.max_deviation, 0.05 * E0, e.slope, drift, 1e-10 * scale);
  return out;
}

// 8. AD derivatives against central differences.
Outcome derivatives() {
  Outcome out;
  int checks = 0, failures = 0;
  double worst = 0.0;
  for (const std::string name : {"orbital", "two-link"}) {
    const Ocp ocp = benchmark(name, 16);
    for (const std::string& method : method_names()) {
      const Solved s = solve(ocp, method);
      for (const auto& [where, x] : {std::pair{"guess", initial_guess(s.nlp)}, std::pair{"solution", s.r.x}}) {
        for (const auto& [what, map] : {std::pair{"objective", s.nlp.objective_map()},
                                        std::pair{"constraints", s.nlp.constraint_map()}}) {
          const diff::FdReport r = diff::fd_check(map, x, 1e-6);
          ++checks;
          worst = std::max(worst, r.max_rel_deviation);
          if (!r.pass) {
            ++failures;
            out.details.push_back(fmt("%s %s %s at %s: rel dev %.3e", name.c_str(), method.c_str(), what, where,
                                      r.max_rel_deviation));
          }
        }
      }
      if (!s.ok()) out.details.push_back(name + " " + method + " solve status " + sqp::to_string(s.r.status));
    }
  }
  out.pass = failures == 0;
  out.summary = fmt("%d/%d maps pass, worst rel dev %.3e (<= 1e-6)", checks - failures, checks, worst);
  return out;
}

// 9. Minor-work units, DMOC against the Hamiltonian baseline.
Outcome work_comparison() {
  Outcome out;
  out.pass = true;
  for (const std::string name : {"orbital", "two-link"}) {
    for (int N : {16, 32, 64}) {
      const Ocp ocp = benchmark(name, N);
      const Solved d = solve(ocp, "dmoc"), h = solve(ocp, "ham-midpoint");
      const bool ok = d.ok() && h.ok() && d.r.work_units <= h.r.work_units;
      out.pass = out.pass && ok;
      out.summary += fmt("%s N=%d %.3f%s; ", name.c_str(), N, double(d.r.work_units) / h.r.work_units, ok ? "" : "*");
      out.details.push_back(fmt("%s N=%d work dmoc %ld ham %ld; major %d vs %d; objective %.10g vs %.10g", name.c_str(),
                                N, d.r.work_units, h.r.work_units, d.r.major_iterations, h.r.major_iterations,
                                d.r.objective, h.r.objective));
    }
  }
  out.summary = "work ratio dmoc/ham " + out.summary + "(* = dmoc above ham)";
  return out;
}

}  // namespace

int main() {
  sqp::load_lapack();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"equivalence", equivalence},          {"noether-balance", noether_balance},
      {"convergence-order", convergence_order}, {"consistency-order", consistency},
      {"adjoint-structure", adjoint_structure}, {"problem-sizes", problem_sizes},
      {"structure-preservation", structure_preservation}, {"derivatives", derivatives},
      {"work-comparison", work_comparison},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.summary = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.summary.c_str());
    for (const std::string& d : o.details) std::printf("       %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed;
}
