#pragma once

// Executes MP-ARK steps and trajectories under a precision pair: implicit
// stages whose low-precision diagonal entry is nonzero are solved by Newton
// at the pair's low level and re-cast (bit-exactly) to the high level;
// explicit stages and the final combination run at the high level.

#include <vector>

#include "newton.hpp"
#include "precision.hpp"
#include "problems.hpp"
#include "tableaus.hpp"

namespace mpark {

struct IntegratorConfig {
  PrecisionPair pair;
  double dt = 0.0;
  int steps = 0;
  int newton_max_iters = 20;
  double newton_tol_factor = 10.0;
  int store_every = 0;  // 0: keep initial and final states only
  // Additive perturbation applied to every low-precision evaluation
  // (realizes F_eps = F + eps*tau with a caller-chosen eps*tau).
  std::vector<double> feps_injection;
};

struct Trajectory {
  std::vector<double> times;               // snapshot times
  std::vector<std::vector<Quad>> states;   // snapshots, widened to Quad
  std::vector<int> newton_iters;           // per completed step
  std::vector<double> stage_residuals;     // worst converged residual per step
  int steps_completed = 0;
  SolveStatus status = SolveStatus::Ok;

  const std::vector<Quad>& final_state() const { return states.back(); }
  double newton_iters_mean() const {
    if (newton_iters.empty()) return 0.0;
    long total = 0;
    for (int v : newton_iters) total += v;
    return static_cast<double>(total) / static_cast<double>(newton_iters.size());
  }
};

// Number of steps for a dt that is expected to divide t_final; fails (-1)
// when round(t_final/dt) drifts from t_final by more than a few ulp.
int steps_for(double t_final, double dt);

Trajectory integrate(const OdeProblem& p, const MpTableau& t, const IntegratorConfig& cfg);

// Single step, exposed for stage-level tests. u holds the state at the high
// level widened to Quad; the result is written back into u.
SolveStatus step_once(const OdeProblem& p, const MpTableau& t, const IntegratorConfig& cfg,
                      std::vector<Quad>& u, int* newton_iters_out);

// Classical fourth-order Runge-Kutta at one precision level; ground truth
// for convergence studies (level Extended by default at call sites).
std::vector<Quad> rk4_reference(const OdeProblem& p, double dt_ref, PrecisionLevel level,
                                SolveStatus* status = nullptr);

}  // namespace mpark
