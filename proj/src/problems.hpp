#pragma once

// The autonomous test systems. Each problem carries its right-hand side and
// analytic Jacobian instantiated at all four scalar types, so the same code
// path serves both the high-precision evaluation F and the low-precision
// evaluation F_eps (native arithmetic in the requested type rounds every
// intermediate result to that type).

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "precision.hpp"
#include "scalars.hpp"

namespace mpark {

template <class N>
struct ProblemKernels {
  // f := F(y)
  std::function<void(std::span<const N>, std::span<N>)> rhs;
  // J := dF/dy, dense row-major dim x dim
  std::function<void(std::span<const N>, std::span<N>)> jac;
};

struct OdeProblem {
  std::string label;
  int dim = 0;
  double t_final = 1.0;
  std::vector<Quad> y0;

  ProblemKernels<Half> k16;
  ProblemKernels<float> k32;
  ProblemKernels<double> k64;
  ProblemKernels<Quad> k128;

  // closed-form solution when one exists (Dahlquist), evaluated in Quad
  std::function<std::vector<Quad>(double)> exact;

  template <class N> const ProblemKernels<N>& kernels() const;
};

template <> inline const ProblemKernels<Half>& OdeProblem::kernels() const { return k16; }
template <> inline const ProblemKernels<float>& OdeProblem::kernels() const { return k32; }
template <> inline const ProblemKernels<double>& OdeProblem::kernels() const { return k64; }
template <> inline const ProblemKernels<Quad>& OdeProblem::kernels() const { return k128; }

// y1' = y2, y2' = alpha*y2*(1 - y1^2) - y1, y0 = (2, 0), t in [0, 1].
OdeProblem van_der_pol(double alpha);

// Dirichlet semi-discretization of u_t + (u^2/2)_x = nu*u_xx on (0,1) with
// nu = 1/100: nx interior points, dx = 1/(nx+1), forward-differenced flux,
// centered diffusion, y0_i = sin(2*pi*x_i).
OdeProblem viscous_burgers(int nx);

// u' = lambda*u with u(0) = 1 and the exponential attached as the exact
// solution. A complex lambda is realized as the equivalent 2x2 real system
// acting on (Re u, Im u).
OdeProblem dahlquist(std::complex<double> lambda);
inline OdeProblem dahlquist(double lambda) { return dahlquist(std::complex<double>(lambda, 0.0)); }

// Periodic heat equation u_t = u_xx semi-discretized with the spectral
// operator on nx points, u(x,0) = (1 + sin x)/2. The sin mode is an exact
// eigenvector, so u(t) = 1/2 + exp(-t) sin(x)/2 is attached as the exact
// solution.
OdeProblem heat_spectral(int nx);  // requires nx even, nx >= 4

// F_eps at one precision level: rounds y into the level and evaluates the
// problem kernel there; the result is returned widened to double.
std::vector<double> eval_low(const OdeProblem& p, std::span<const double> y, PrecisionLevel level);

// Periodic second-derivative operators on [0, 2*pi) with nx points:
// D_c the 3-point centered stencil, D_s the Fourier spectral matrix.
// Both are circulant and diagonalized by the discrete Fourier basis.
struct HeatOperators {
  int nx = 0;
  double dx = 0.0;
  std::vector<double> dc;  // dense row-major nx x nx
  std::vector<double> ds;
};

HeatOperators heat_operators(int nx);  // requires nx even, nx >= 4

// circulant eigenvalues, indexed by mode k = 0..nx/2
double dc_eigenvalue(int nx, int k);
double ds_eigenvalue(int nx, int k);

}  // namespace mpark
