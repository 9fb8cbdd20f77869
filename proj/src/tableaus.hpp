#pragma once

// Coefficient arrays for the mixed-precision additive Runge-Kutta methods
// and the order-condition residuals checked on them.
//
// An MpTableau carries two Butcher arrays: (A, b) weight high-precision
// evaluations F and (A_eps, b_eps) weight low-precision evaluations F_eps.
// Derived quantities (Atilde = A + A_eps, btilde, ctilde = Atilde*e,
// c_eps = A_eps*e) are recomputed on demand, never stored.
//
// Correction-expanded methods encode their explicit correction sweeps as
// extra stages so that stability and order analysis see a single tableau.

#include <map>
#include <string>
#include <vector>

#include "scalars.hpp"

namespace mpark {

struct MpTableau {
  std::string name;
  int stages = 0;
  int corrections = 0;   // explicit correction count encoded in the stages
  int design_order = 0;  // classical order of the underlying scheme
  // row-major stages x stages
  std::vector<Quad> a;
  std::vector<Quad> a_eps;
  std::vector<Quad> b;
  std::vector<Quad> b_eps;

  Quad at_a(int i, int j) const { return a[static_cast<size_t>(i) * stages + j]; }
  Quad at_ae(int i, int j) const { return a_eps[static_cast<size_t>(i) * stages + j]; }

  std::vector<Quad> a_tilde() const;
  std::vector<Quad> b_tilde() const;
  std::vector<Quad> c_tilde() const;
  std::vector<Quad> c_eps() const;

  // Enforces the diagonally-implicit structure: zero above the diagonal in
  // both arrays, and at most one of A_ii, A_eps_ii nonzero per stage.
  // Returns an empty string when valid, else a description of the violation.
  std::string structure_error() const;
};

// Implicit midpoint rule with m explicit corrections (m >= 0); m+1 stages.
MpTableau imr_tableau(int corrections);

// Two-stage third-order SDIRK expanded with corrections; the argument m
// follows the scheme's own counting: m = 1 is the uncorrected method,
// each increment adds one explicit correction per implicit stage (2m stages).
MpTableau sdirk_tableau(int m);

// Four-stage third-order additive method with internally suppressed
// low-precision perturbation error (second order in the perturbation).
MpTableau novel_a_tableau();

// gamma = (sqrt(3)+3)/6, the SDIRK diagonal weight.
Quad sdirk_gamma();

// Lookup by CLI name ("imr", "sdirk", "novela") and correction count.
// Throws std::invalid_argument for unknown names or invalid corrections.
MpTableau make_tableau(const std::string& method, int corrections);

struct OrderReport {
  // consistency residuals up to order 3, keyed by formula
  std::map<std::string, double> scheme;
  // the fifteen perturbation rows, non-smooth uses componentwise |.| first
  std::map<std::string, double> nonsmooth;
  std::map<std::string, double> smooth;
  int design_order = 0;
};

OrderReport order_report(const MpTableau& t);

// Plain-text serialization: rows of decimal literals, parseable back.
std::string tableau_to_text(const MpTableau& t);
MpTableau tableau_from_text(const std::string& text);  // throws std::invalid_argument

}  // namespace mpark
