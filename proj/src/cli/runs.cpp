#include "dmoc/cli/runs.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "dmoc/baselines/baselines.hpp"
#include "dmoc/detail/convert.hpp"
#include "dmoc/errors.hpp"
#include "dmoc/simulate/simulate.hpp"

namespace dmoc::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

Json metadata() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return Json{{"timestamp", buf}};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string lines(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& l : v) s += l + "\n";
  return s;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json counts_json(const Nlp& nlp) {
  return Json{{"variables", nlp.num_vars}, {"constraints", nlp.num_cons}};
}

// JSON has no infinity; the exact flag carries that case.
Json slope_json(double s, bool exact) { return exact || !std::isfinite(s) ? Json(nullptr) : Json(s); }

Json noether_json(const Nlp& nlp, const Eigen::VectorXd& x, int generator, bool per_step) {
  if (generator >= static_cast<int>(nlp.ocp->sys.symmetry_generators.size())) return Json(nullptr);
  const NoetherAudit a = method_noether_audit(nlp, x, generator);
  Json j{{"generator", generator},
         {"total", a.total},
         {"max_abs", a.max_abs},
         {"sum_abs", a.sum_abs},
         {"scale", a.scale},
         {"relative_total", std::fabs(a.total) / a.scale}};
  if (per_step) {
    Json rows = Json::array();
    for (std::size_t k = 0; k < a.residuals.size(); ++k) {
      rows.push_back(Json{{"k", k},
                          {"delta", a.residuals[k]},
                          {"momentum_change", a.momenta[k + 1] - a.momenta[k]},
                          {"forcing", a.forcing[k]},
                          {"symmetry_breaking", a.symmetry_breaking[k]}});
    }
    j["steps"] = rows;
  }
  return j;
}

Json result_json(const SolvedInstance& s) {
  const auto& r = s.result;
  const KktReport kkt = kkt_check(s.nlp, r.x, r.lambda);
  return Json{{"status", sqp::to_string(r.status)},
              {"objective", r.objective},
              {"major_iterations", r.major_iterations},
              {"minor_iterations", r.minor_iterations},
              {"work_units", r.work_units},
              {"kkt",
               {{"stationarity", kkt.stationarity},
                {"feasibility", kkt.feasibility},
                {"complementarity", kkt.complementarity}}},
              {"counts", counts_json(s.nlp)}};
}

std::string header(const std::string& title) { return "# " + title; }

void write_solution_files(const fs::path& dir, const SolvedInstance& s, const std::string& csv_name) {
  const DiscreteTrajectory t = decode_trajectory(s.nlp, s.result.x);
  write_file(dir / csv_name, trajectory_csv(s.nlp.ocp->sys, t, native_momenta(s.nlp, s.result.x)));
}

int exit_for(const SolvedInstance& s) { return s.converged() ? exit_ok : exit_solver_failure; }

std::vector<double> pair_slopes(const std::vector<ConvergenceRow>& rows, double ConvergenceRow::*err) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out.push_back(std::log(rows[i - 1].*err / rows[i].*err) / std::log(rows[i - 1].h / rows[i].h));
  }
  return out;
}

ConvergenceRow row_of(const SolvedInstance& s) {
  ConvergenceRow r;
  r.N = s.nlp.ocp->N;
  r.h = s.nlp.ocp->h();
  r.objective = s.result.objective;
  r.work_units = s.result.work_units;
  r.major_iterations = s.result.major_iterations;
  return r;
}

}  // namespace

SolvedInstance solve_instance(const RunConfig& cfg, const std::string& method, int N, const sqp::SqpOptions& opts,
                              const DiscreteTrajectory* warm) {
  SolvedInstance s{transcribe_method(build_problem(cfg, N), method), {}, {}};
  Eigen::VectorXd x0 = s.nlp.initial_guess;
  if (warm != nullptr) {
    const DiscreteTrajectory g = resample(*warm, N);
    x0 = pack_guess(s.nlp, g.q, g.u);
  }
  s.result = sqp::solve(s.nlp, x0, opts, [&s](const sqp::SqpIterate& it) { s.log.push_back(sqp::format_iterate(it)); });
  return s;
}

std::string trajectory_csv(const LagrangianSystem& sys, const DiscreteTrajectory& traj, const std::vector<Vec>& momenta) {
  auto label = [](const std::vector<std::string>& labels, const char* prefix, int i) {
    return i < static_cast<int>(labels.size()) ? labels[i] : prefix + std::to_string(i + 1);
  };
  std::string s = "t";
  for (int i = 0; i < sys.n; ++i) s += ",q_" + label(sys.q_labels, "q", i);
  for (int i = 0; i < sys.m; ++i) s += ",u_" + label(sys.u_labels, "u", i);
  for (int i = 0; i < sys.n; ++i) s += ",p_" + label(sys.q_labels, "q", i);
  s += "\n";
  for (int k = 0; k <= traj.N; ++k) {
    s += num(k * traj.h);
    for (int i = 0; i < sys.n; ++i) s += "," + num(traj.q[k][i]);
    for (int i = 0; i < sys.m; ++i) s += k < traj.N ? "," + num(traj.u[k][i]) : std::string(",");
    for (int i = 0; i < sys.n; ++i) s += "," + num(momenta[k][i]);
    s += "\n";
  }
  return s;
}

Json layout_json(const Nlp& nlp) {
  auto blocks = [](const Layout& l) {
    Json a = Json::array();
    for (const auto& b : l.blocks) {
      a.push_back(Json{{"name", b.name}, {"offset", b.offset}, {"count", b.count}, {"width", b.width}, {"owner", b.owner}});
    }
    return a;
  };
  return Json{{"variables", blocks(nlp.variables)}, {"rows", blocks(nlp.rows)}};
}

ConvergenceStudy convergence_study(const RunConfig& cfg) {
  sqp::load_lapack();
  const std::vector<int>& grids = cfg.converge.grids;
  const int ref_N = grids.back();
  sqp::SqpOptions opts = cfg.solver;
  opts.feasibility_tol = cfg.converge.feasibility_tol;

  ConvergenceStudy study;
  study.reference_N = ref_N;
  auto require = [](const SolvedInstance& s, const std::string& what) {
    if (!s.converged()) {
      throw RunFailure(what + ": solver status " + sqp::to_string(s.result.status) + " after " +
                       std::to_string(s.result.major_iterations) + " iterations");
    }
  };

  // Mesh sequencing up to the reference.
  std::vector<int> chain;
  for (int N = grids.front(); N < ref_N; N *= 2) chain.push_back(N);
  chain.push_back(ref_N);
  SolvedInstance cur;
  DiscreteTrajectory prev;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    cur = solve_instance(cfg, cfg.method, chain[i], opts, i == 0 ? nullptr : &prev);
    study.log.push_back(header("reference chain N=" + std::to_string(chain[i]) +
                               (i == 0 ? " (initial guess)" : " (warm start)")));
    study.log.insert(study.log.end(), cur.log.begin(), cur.log.end());
    require(cur, "converge: reference chain at N=" + std::to_string(chain[i]));
    prev = decode_trajectory(cur.nlp, cur.result.x);
    study.chain.push_back(row_of(cur));
  }
  study.reference = prev;
  study.reference_momenta = native_momenta(cur.nlp, cur.result.x);
  study.reference_objective = cur.result.objective;

  // Coarse grids from the resampled reference, in parallel.
  const std::vector<int> coarse(grids.begin(), grids.end() - 1);
  std::vector<SolvedInstance> runs(coarse.size());
  std::vector<std::exception_ptr> errors(coarse.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < coarse.size(); i = next++) {
      try {
        runs[i] = solve_instance(cfg, cfg.method, coarse[i], opts, &study.reference);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int workers = cfg.converge.workers > 0 ? cfg.converge.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, static_cast<int>(coarse.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  double q_scale = 1.0, u_scale = 1.0;
  for (const auto& q : study.reference.q) q_scale = std::max(q_scale, q.lpNorm<Eigen::Infinity>());
  for (const auto& u : study.reference.u) u_scale = std::max(u_scale, u.lpNorm<Eigen::Infinity>());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const int N = coarse[i];
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        throw RunFailure("converge: sub-run N=" + std::to_string(N) + ": " + e.what());
      }
    }
    study.log.push_back(header("grid N=" + std::to_string(N) + " (warm start from reference)"));
    study.log.insert(study.log.end(), runs[i].log.begin(), runs[i].log.end());
    require(runs[i], "converge: sub-run N=" + std::to_string(N));
    const DiscreteTrajectory t = decode_trajectory(runs[i].nlp, runs[i].result.x);
    const DiscreteTrajectory ref_on_grid = resample(study.reference, N);
    const int stride = ref_N / N;
    ConvergenceRow row = row_of(runs[i]);
    for (int k = 0; k <= N; ++k) {
      row.q_error = std::max(row.q_error, (t.q[k] - study.reference.q[k * stride]).lpNorm<Eigen::Infinity>());
    }
    for (int k = 0; k < N; ++k) {
      row.u_error = std::max(row.u_error, (t.u[k] - ref_on_grid.u[k]).lpNorm<Eigen::Infinity>());
    }
    study.rows.push_back(row);
  }

  std::vector<double> h, eq, eu;
  for (const auto& r : study.rows) {
    h.push_back(r.h);
    eq.push_back(r.q_error);
    eu.push_back(r.u_error);
  }
  // Round-off-level errors (e.g. a problem the scheme solves exactly) are
  // reported as exact rather than fitted.
  auto tiny = [](const std::vector<double>& e, double scale) {
    return std::all_of(e.begin(), e.end(), [scale](double v) { return v <= 1e-10 * scale; });
  };
  study.q_exact = tiny(eq, q_scale);
  study.u_exact = tiny(eu, u_scale);
  study.q_slope = study.q_exact ? INFINITY : loglog_slope(h, eq);
  study.u_slope = study.u_exact ? INFINITY : loglog_slope(h, eu);
  if (!study.q_exact) study.q_pair_slopes = pair_slopes(study.rows, &ConvergenceRow::q_error);
  if (!study.u_exact) study.u_pair_slopes = pair_slopes(study.rows, &ConvergenceRow::u_error);
  return study;
}

RunOutput run_solve(const RunConfig& cfg) {
  sqp::load_lapack();
  const fs::path dir = prepare_dir(cfg.output_dir);
  const SolvedInstance s = solve_instance(cfg, cfg.method, cfg.N, cfg.solver);
  RunOutput out;
  out.report = Json{{"metadata", metadata()}, {"command", "solve"}, {"config", to_json(cfg)}};
  out.report["result"] = result_json(s);
  out.report["noether"] = noether_json(s.nlp, s.result.x, cfg.audit.generator, false);
  out.report["layout"] = layout_json(s.nlp);
  write_file(dir / "iterations.log", lines(s.log));
  write_solution_files(dir, s, "trajectory.csv");
  write_file(dir / "report.json", out.report.dump(2) + "\n");
  out.exit_code = exit_for(s);
  return out;
}

RunOutput run_converge(const RunConfig& cfg) {
  const fs::path dir = prepare_dir(cfg.output_dir);
  RunOutput out;
  out.report = Json{{"metadata", metadata()}, {"command", "converge"}, {"config", to_json(cfg)}};
  ConvergenceStudy st;
  try {
    st = convergence_study(cfg);
  } catch (const RunFailure& e) {
    out.report["status"] = "failed";
    out.report["error"] = e.what();
    write_file(dir / "report.json", out.report.dump(2) + "\n");
    out.exit_code = exit_solver_failure;
    return out;
  }
  auto rows_json = [](const std::vector<ConvergenceRow>& rows, bool errors) {
    Json a = Json::array();
    for (const auto& r : rows) {
      Json j{{"N", r.N}, {"h", r.h}};
      if (errors) {
        j["q_error"] = r.q_error;
        j["u_error"] = r.u_error;
      }
      j["objective"] = r.objective;
      j["work_units"] = r.work_units;
      j["major_iterations"] = r.major_iterations;
      a.push_back(j);
    }
    return a;
  };
  out.report["status"] = "converged";
  out.report["reference"] = Json{{"N", st.reference_N}, {"objective", st.reference_objective}};
  out.report["chain"] = rows_json(st.chain, false);
  out.report["grids"] = rows_json(st.rows, true);
  out.report["slopes"] = Json{{"q", slope_json(st.q_slope, st.q_exact)},
                              {"u", slope_json(st.u_slope, st.u_exact)},
                              {"q_exact", st.q_exact},
                              {"u_exact", st.u_exact},
                              {"q_pairs", st.q_pair_slopes},
                              {"u_pairs", st.u_pair_slopes}};
  write_file(dir / "iterations.log", lines(st.log));
  write_file(dir / "trajectory.csv", trajectory_csv(build_problem(cfg, st.reference_N).sys, st.reference,
                                                    st.reference_momenta));
  write_file(dir / "report.json", out.report.dump(2) + "\n");
  return out;
}

RunOutput run_audit(const RunConfig& cfg) {
  sqp::load_lapack();
  const fs::path dir = prepare_dir(cfg.output_dir);
  const Ocp problem = build_problem(cfg, cfg.N);
  const int n_gen = static_cast<int>(problem.sys.symmetry_generators.size());
  RunOutput out;
  out.report = Json{{"metadata", metadata()}, {"command", "audit"}, {"config", to_json(cfg)}};

  if (cfg.audit.rollout) {
    const RolloutConfig& r = *cfg.audit.rollout;
    const std::vector<Vec> controls(static_cast<std::size_t>(r.steps), Vec::Zero(problem.sys.m));
    const RolloutResult res = rollout(problem.sys, r.q0, r.qdot0, controls, r.h, r.steps);
    const EnergyStats e = energy_series(res);
    const double E0 = res.energies.front();
    out.report["mode"] = "rollout";
    out.report["energy"] = Json{{"initial", E0},
                                {"max_deviation", e.max_deviation},
                                {"relative_max_deviation", e.max_deviation / std::max(std::fabs(E0), 1e-300)},
                                {"drift_slope", e.slope}};
    if (n_gen == 0) {
      out.report["momentum"] = Json{{"generator", nullptr},
                                    {"max_deviation", 0.0},
                                    {"note", "no symmetry generator; energy series only"}};
    } else {
      if (cfg.audit.generator >= n_gen) throw ConfigError("audit.generator: problem has " + std::to_string(n_gen) +
                                                          " symmetry generator(s)");
      const auto& xi = problem.sys.symmetry_generators[cfg.audit.generator];
      std::vector<double> J;
      for (int k = 0; k <= r.steps; ++k) {
        const Vec g = detail::to_eigen(xi(detail::to_std(res.trajectory.q[k])), "audit generator");
        J.push_back(res.momenta[k].dot(g));
      }
      double dev = 0.0, scale = 1.0;
      for (double v : J) {
        dev = std::max(dev, std::fabs(v - J.front()));
        scale = std::max(scale, std::fabs(v));
      }
      out.report["momentum"] = Json{{"generator", cfg.audit.generator},
                                    {"initial", J.front()},
                                    {"max_deviation", dev},
                                    {"scale", scale},
                                    {"relative_max_deviation", dev / scale}};
    }
    write_file(dir / "iterations.log", "");
    write_file(dir / "trajectory.csv", trajectory_csv(problem.sys, res.trajectory, res.momenta));
    write_file(dir / "report.json", out.report.dump(2) + "\n");
    return out;
  }

  if (n_gen == 0) throw ConfigError("audit: problem '" + cfg.problem + "' has no symmetry generator");
  if (cfg.audit.generator >= n_gen) {
    throw ConfigError("audit.generator: problem has " + std::to_string(n_gen) + " symmetry generator(s)");
  }
  const SolvedInstance s = solve_instance(cfg, cfg.method, cfg.N, cfg.solver);
  out.report["mode"] = "solve";
  out.report["result"] = result_json(s);
  out.report["noether"] = noether_json(s.nlp, s.result.x, cfg.audit.generator, true);
  write_file(dir / "iterations.log", lines(s.log));
  write_solution_files(dir, s, "trajectory.csv");
  write_file(dir / "report.json", out.report.dump(2) + "\n");
  out.exit_code = exit_for(s);
  return out;
}

RunOutput run_compare(const RunConfig& a, const RunConfig& b) {
  if (a.problem != b.problem || a.params != b.params || a.N != b.N) {
    throw ConfigError("compare: configs must share problem, params and N");
  }
  sqp::load_lapack();
  const fs::path dir = prepare_dir(a.output_dir);
  const SolvedInstance sa = solve_instance(a, a.method, a.N, a.solver);
  const SolvedInstance sb = solve_instance(b, b.method, b.N, b.solver);
  RunOutput out;
  out.report = Json{{"metadata", metadata()}, {"command", "compare"}, {"config", to_json(a)}, {"config_b", to_json(b)}};
  out.report["a"] = result_json(sa);
  out.report["b"] = result_json(sb);
  if (sa.converged() && sb.converged()) {
    const SolutionGap g = compare_solutions(sa.nlp, sa.result.x, sb.nlp, sb.result.x);
    out.report["gaps"] = Json{{"state", g.state_gap},
                              {"configuration", g.configuration_gap},
                              {"velocity", g.velocity_gap},
                              {"control", g.control_gap},
                              {"objective", g.objective_gap}};
  } else {
    out.report["gaps"] = nullptr;
  }
  out.report["ratios"] = Json{
      {"variables", static_cast<double>(sa.nlp.num_vars) / sb.nlp.num_vars},
      {"constraints", static_cast<double>(sa.nlp.num_cons) / sb.nlp.num_cons},
      {"work_units", sb.result.work_units > 0 ? Json(static_cast<double>(sa.result.work_units) / sb.result.work_units)
                                              : Json(nullptr)},
      {"minor_iterations", sb.result.minor_iterations > 0
                               ? Json(static_cast<double>(sa.result.minor_iterations) / sb.result.minor_iterations)
                               : Json(nullptr)}};
  std::vector<std::string> log{header("a: " + a.method)};
  log.insert(log.end(), sa.log.begin(), sa.log.end());
  log.push_back(header("b: " + b.method));
  log.insert(log.end(), sb.log.begin(), sb.log.end());
  write_file(dir / "iterations.log", lines(log));
  write_solution_files(dir, sa, "trajectory.csv");
  write_solution_files(dir, sb, "trajectory_b.csv");
  write_file(dir / "report.json", out.report.dump(2) + "\n");
  out.exit_code = sa.converged() && sb.converged() ? exit_ok : exit_solver_failure;
  return out;
}

}  // namespace dmoc::cli
