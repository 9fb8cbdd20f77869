#pragma once

// Sweep driver: convergence studies, observed-order estimation, efficiency
// (error vs runtime) runs, and the largest-stable-dt ladder search. Errors
// are max-norm differences against an RK4 reference, with both solutions
// widened to f128 before differencing.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "integrator.hpp"
#include "precision.hpp"
#include "problems.hpp"
#include "tableaus.hpp"

namespace mpark {

struct ProblemSpec {
  std::string name = "vdp";  // vdp | burgers | dahlquist | heat
  double alpha = 1.0;
  int nx = 50;
  std::complex<double> lambda{-1.0, 0.0};
};

OdeProblem build_problem(const ProblemSpec& spec);

struct SweepSpec {
  ProblemSpec problem;
  std::string method = "imr";
  int corrections = 0;
  std::vector<PrecisionPair> pairs;
  std::vector<double> dts;
  int ref_factor = 20;  // dt_ref = min(dt) / ref_factor
  PrecisionLevel ref_level = PrecisionLevel::Extended;
  int repetitions = 1;
  int threads = 1;  // 0 = hardware concurrency
  uint64_t seed = 0;
  bool timing_exclusive = false;
  int newton_max_iters = 20;
  double newton_tol_factor = 10.0;
  std::optional<std::pair<double, double>> order_window;  // [dt_hi, dt_lo]
  // stable-dt search
  double dt_max = 0.05;
  int levels = 6;
  double blowup_factor = 1e3;
};

// Parses the JSON config tree; unknown keys are rejected, missing ones take
// the defaults above. Throws std::invalid_argument on malformed input.
SweepSpec sweep_from_json(const std::string& text);
std::string sweep_to_json(const SweepSpec& spec);  // fully resolved form

struct ConvRow {
  std::string method;
  int corrections = 0;
  std::string pair;
  double dt = 0.0;
  double error = 0.0;  // +inf when the run failed
  double wall_s = 0.0;
  std::string status;  // ok | not_converged | singular_jacobian | overflow
  double newton_iters_mean = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvRow> rows;
  // observed least-squares order per pair over the configured window
  std::vector<std::pair<std::string, double>> observed_orders;
  double dt_ref = 0.0;
  double ref_self_check = 0.0;  // ||ref(dt_ref) - ref(dt_ref/2)||_inf
};

ConvergenceReport run_convergence(const SweepSpec& spec);
// Same sweep with a discarded warm-up run and median-of-repetitions timing;
// requires repetitions >= 3.
ConvergenceReport run_efficiency(const SweepSpec& spec);

// Least-squares slope of log(error) against log(dt). Returns +inf when any
// error is zero (exact match sentinel); requires at least two points.
double observed_order(std::span<const std::pair<double, double>> dt_error);

struct PlateauVerdict {
  bool plateau = false;
  double onset_dt = 0.0;  // largest dt whose trailing 3-point slope < 0.5; 0 if none
  double first3_slope = 0.0;
  double last3_slope = 0.0;
};

// Operates on the rows of one pair, sorted by descending dt, ok rows only.
PlateauVerdict classify_plateau(std::span<const std::pair<double, double>> dt_error,
                                int design_order);

struct StableDtRow {
  std::string method;
  int corrections = 0;
  std::string pair;
  double largest_dt = 0.0;  // 0 when no ladder dt was stable
  std::vector<std::pair<double, std::string>> ladder;  // (dt, verdict)
};

struct StableDtReport {
  std::vector<StableDtRow> rows;
  double ref_norm = 0.0;
  double blowup_threshold = 0.0;
};

// Walks dt_max, dt_max/2, ... for `levels` rungs; a run is stable when it
// completes with every Newton solve converged and final error at most
// blowup_factor * ||u_ref||_inf.
StableDtRow find_largest_stable_dt(const MpTableau& t, PrecisionPair pair, const OdeProblem& p,
                                   double dt_max, int levels, double blowup_factor,
                                   const SweepSpec& spec, const std::vector<Quad>& u_ref);

StableDtReport run_stable_dt(const SweepSpec& spec);

}  // namespace mpark
