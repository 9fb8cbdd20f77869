#pragma once

// Linear stability and roundoff-sensitivity analysis: the stochastic
// stability polynomial Psi_eps over a complex-z grid, the mixed-model
// heat-equation stability matrix and its spectral radius, the sensitivity
// metric |Psi| A_eps e, and the roundoff growth bounds derived from it.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "newton.hpp"
#include "tableaus.hpp"

namespace mpark {

using Cplx = std::complex<double>;

// Psi_eps = 1 + z b (I - z(A + A_eps) - z*eps_tilde*diag(tau))^-1 e.
// tau has one entry per stage, each in [-1/2, 1/2]; the perturbed resolvent
// models per-stage stochastic roundoff scaled by eps_tilde = eps/lambda.
Cplx psi_eps(const MpTableau& t, Cplx z, double eps_tilde, std::span<const double> tau,
             SolveStatus* status = nullptr);

// eps_tilde = 0 case: the classical stability function 1 + z btilde (I - z Atilde)^-1 e.
Cplx stability_function(const MpTableau& t, Cplx z, SolveStatus* status = nullptr);

struct StabilityGridSpec {
  double re_min = -40.0, re_max = 5.0;
  double im_min = -20.0, im_max = 20.0;
  int nx = 400, ny = 400;
  double eps_tilde = 0.0;
  int samples = 16;
  uint64_t seed = 0;
  int threads = 1;
};

struct StabilityGrid {
  StabilityGridSpec spec;
  std::vector<uint8_t> cells;  // ny rows of nx, 1 = stable for every sample
  double stable_fraction() const;
};

// Classifies each cell stable iff |Psi_eps| <= 1 for all of spec.samples
// independent tau draws. Cell randomness is seeded per (i, j), so results
// are identical at any thread count. Singular resolvents count as unstable.
StabilityGrid stability_region(const MpTableau& t, const StabilityGridSpec& spec);

enum class HeatOp { Centered, Spectral };

struct MixedModelSpec {
  int nx = 64;
  int corrections = 0;
  double cfl = 0.1;  // dt / dx^2
  HeatOp implicit_op = HeatOp::Centered;
  HeatOp explicit_op = HeatOp::Spectral;
};

// Spectral radius of P = I + dt*De*(I + dt/2*De)^c * (I - dt/2*Di)^-1, with
// the explicit/implicit operators selected above. Both are circulant, so the
// radius is the max over Fourier modes of the scalar amplification factor.
double mixed_model_radius(const MixedModelSpec& spec);

// Same quantity from a dense eigensolve of the assembled matrix P; the
// brute-force equivalence check for the per-mode formula.
double mixed_model_radius_dense(const MixedModelSpec& spec);

// Sum_j |Psi_j| (|A_eps| e)_j for real z, with Psi = z b (I - z Atilde)^-1.
double sensitivity_metric(const MpTableau& t, double z, SolveStatus* status = nullptr);

// Per-step amplification of an injected stage perturbation for the implicit
// midpoint rule with c corrections: (z/2)^(c+1) / (1 - z/2).
double closed_form_imr_perturbation(double z, int corrections);

// Which error model drives the per-step roundoff term.
enum class GrowthModel {
  PerStepEpsDt,  // perturbation enters through F_eps only: eps*dt per step
  PerStepEps,    // implicit results re-cast at eps level: eps per step
};

// Upper bound on |u^n - U^n| after n steps at the stated model. Requires the
// scheme itself stable, |1 + Psi e| <= 1; dt accompanies z (z = lambda*dt).
double roundoff_growth_bound(const MpTableau& t, double z, double eps, int n_steps, double dt,
                             GrowthModel model, SolveStatus* status = nullptr);

}  // namespace mpark
