#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dmoc/cli/config.hpp"
#include "dmoc/ocp/nlp.hpp"
#include "dmoc/sqp/sqp.hpp"

namespace dmoc::cli {

enum ExitCode : int { exit_ok = 0, exit_solver_failure = 1, exit_config_error = 2 };

/// A solve or sub-run did not converge; the message names the run.
class RunFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolvedInstance {
  Nlp nlp;
  sqp::SqpResult result;
  std::vector<std::string> log;  ///< formatted iterates

  bool converged() const { return result.status == sqp::SqpStatus::converged; }
};

/// Transcribes cfg's problem on N intervals with `method` and solves from the
/// documented initial guess, or from `warm` resampled onto the grid.
SolvedInstance solve_instance(const RunConfig& cfg, const std::string& method, int N, const sqp::SqpOptions& opts,
                              const DiscreteTrajectory* warm = nullptr);

struct ConvergenceRow {
  int N = 0;
  double h = 0.0;
  double q_error = 0.0;  ///< max_k ‖q_k − q_ref(t_k)‖∞
  double u_error = 0.0;  ///< max_k ‖u_k − u_ref(t_{k+1/2})‖∞
  double objective = 0.0;
  long work_units = 0;
  int major_iterations = 0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;   ///< coarse grids, increasing N
  std::vector<ConvergenceRow> chain;  ///< mesh-sequencing solves up to the reference
  int reference_N = 0;
  double reference_objective = 0.0;
  double q_slope = 0.0;  ///< least-squares log-log slope over all coarse grids
  double u_slope = 0.0;
  std::vector<double> q_pair_slopes;  ///< between consecutive grids
  std::vector<double> u_pair_slopes;
  bool q_exact = false;  ///< all errors at round-off level; slope not fitted
  bool u_exact = false;
  std::vector<std::string> log;
  DiscreteTrajectory reference;
  std::vector<Vec> reference_momenta;
};

/// Same-method self-convergence against the largest grid. The reference is
/// reached by mesh sequencing from the coarsest grid (linear guess there,
/// then doubling with resampled warm starts); each coarse grid is solved from
/// the resampled reference, so all grids follow one local minimizer.
/// Coarse solves fan out over cfg.converge.workers threads. Throws RunFailure.
ConvergenceStudy convergence_study(const RunConfig& cfg);

struct RunOutput {
  Json report;
  int exit_code = exit_ok;
};

/// Each writes report.json, trajectory.csv and iterations.log to cfg.output_dir.
RunOutput run_solve(const RunConfig& cfg);
RunOutput run_converge(const RunConfig& cfg);
RunOutput run_audit(const RunConfig& cfg);
/// Files go to a's output directory; b's trajectory is written as trajectory_b.csv.
RunOutput run_compare(const RunConfig& a, const RunConfig& b);

/// Rows t, q..., u..., p... with 17 significant digits; the u cells of the
/// last node are empty (controls live on intervals).
std::string trajectory_csv(const LagrangianSystem& sys, const DiscreteTrajectory& traj, const std::vector<Vec>& momenta);

/// Variable and row layout of an NLP, for decoding solution vectors.
Json layout_json(const Nlp& nlp);

}  // namespace dmoc::cli
