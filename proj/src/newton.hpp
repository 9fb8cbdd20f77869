#pragma once

// Multivariate Newton-Raphson for the implicit stage equations, running
// entirely at one precision level: residual, Jacobian, LU factorization and
// update all use native arithmetic in the level's scalar type. The stopping
// tolerance is tied to that level's unit roundoff.

#include <span>
#include <vector>

#include "precision.hpp"
#include "problems.hpp"
#include "scalars.hpp"

namespace mpark {

// The stopping tolerance is tol_factor * u(level) * (1 + ||y||_inf + extra),
// where `extra` tracks the magnitude of the residual's internal terms: for a
// stage equation, ||coeff*dt*F(y)||_inf plus the row scale |coeff*dt*J|*|y|
// of the most recent Jacobian. Those terms are the roundoff floor of
// evaluating G on stiff semi-discrete systems; without them the iteration
// cap is hit spuriously whenever dt*||J|| is large.
struct NewtonConfig {
  PrecisionLevel level = PrecisionLevel::Double;
  int max_iters = 20;
  double tol_factor = 10.0;
};

enum class SolveStatus { Ok, NotConverged, SingularJacobian, RangeFault };

const char* solve_status_name(SolveStatus s);

template <class L>
struct NewtonResult {
  std::vector<L> y;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  SolveStatus status = SolveStatus::Ok;
};

// LU with partial pivoting, in place; b is overwritten with the solution.
// A pivot below the level's smallest positive normal counts as singular.
template <class L>
SolveStatus lu_solve(std::vector<L>& a, std::span<L> b, int n, const FpFormat& fmt) {
  const L zero = L(0);
  const L tiny = from_double<L>(std::ldexp(1.0, fmt.min_exp));
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;

  for (int col = 0; col < n; ++col) {
    int best = col;
    L best_mag = abs_s(a[static_cast<size_t>(piv[col]) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      L mag = abs_s(a[static_cast<size_t>(piv[r]) * n + col]);
      if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (!finite_s(best_mag)) return SolveStatus::RangeFault;
    if (best_mag < tiny) return SolveStatus::SingularJacobian;
    std::swap(piv[col], piv[best]);
    L* prow = a.data() + static_cast<size_t>(piv[col]) * n;
    for (int r = col + 1; r < n; ++r) {
      L* row = a.data() + static_cast<size_t>(piv[r]) * n;
      L m = row[col] / prow[col];
      row[col] = m;
      if (m == zero) continue;
      for (int c = col + 1; c < n; ++c) row[c] = row[c] - m * prow[c];
    }
  }

  std::vector<L> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[piv[i]];
  for (int i = 1; i < n; ++i) {
    const L* row = a.data() + static_cast<size_t>(piv[i]) * n;
    L s = x[i];
    for (int j = 0; j < i; ++j) s = s - row[j] * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    const L* row = a.data() + static_cast<size_t>(piv[i]) * n;
    L s = x[i];
    for (int j = i + 1; j < n; ++j) s = s - row[j] * x[j];
    x[i] = s / row[i];
  }
  for (int i = 0; i < n; ++i) {
    if (!finite_s(x[i])) return SolveStatus::RangeFault;
    b[i] = x[i];
  }
  return SolveStatus::Ok;
}

// Generic kernel: solves G(y) = 0 given G and its Jacobian, both evaluated
// at level L. `extra_scale`, when given, is re-read after every residual
// evaluation and added to the tolerance scale.
template <class L, class GFn, class JFn>
NewtonResult<L> newton_solve(GFn&& residual, JFn&& jacobian, std::vector<L> y, int n,
                             const NewtonConfig& cfg, const double* extra_scale = nullptr) {
  const FpFormat& fmt = format(cfg.level);
  NewtonResult<L> out;
  std::vector<L> g(n), jac(static_cast<size_t>(n) * n);

  for (int iter = 0;; ++iter) {
    residual(std::span<const L>(y), std::span<L>(g));
    double rn = 0.0, yn = 0.0;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      if (!finite_s(g[i]) || !finite_s(y[i])) ok = false;
      rn = std::max(rn, to_double(abs_s(g[i])));
      yn = std::max(yn, to_double(abs_s(y[i])));
    }
    out.iterations = iter;
    out.residual_norm = rn;
    if (!ok) {
      out.status = SolveStatus::RangeFault;
      out.y = std::move(y);
      return out;
    }
    const double tol =
        cfg.tol_factor * fmt.unit_roundoff * (1.0 + yn + (extra_scale ? *extra_scale : 0.0));
    if (rn <= tol) {
      out.converged = true;
      out.status = SolveStatus::Ok;
      out.y = std::move(y);
      return out;
    }
    if (iter >= cfg.max_iters) {
      out.status = SolveStatus::NotConverged;
      out.y = std::move(y);
      return out;
    }
    jacobian(std::span<const L>(y), std::span<L>(jac));
    SolveStatus ls = lu_solve(jac, std::span<L>(g), n, fmt);
    if (ls != SolveStatus::Ok) {
      out.status = ls;
      out.y = std::move(y);
      return out;
    }
    for (int i = 0; i < n; ++i) y[i] = y[i] - g[i];
  }
}

// Stage equation y = base + coeff*dt*F_eps(y), solved at level L. The
// starting iterate defaults to the base vector (rounded into L); callers may
// pass `start` when a better guess is available — for stiff stages whose
// accumulated base lies far from the root, the step state u^n is. An
// optional additive perturbation models F_eps = F + eps*tau exactly.
template <class L, class S>
NewtonResult<L> solve_stage(std::span<const S> base, Quad coeff, double dt, const OdeProblem& p,
                            const NewtonConfig& cfg, std::span<const double> injection = {},
                            std::span<const S> start = {}) {
  const int n = p.dim;
  const auto& kern = p.kernels<L>();
  std::vector<L> base_l(n);
  for (int i = 0; i < n; ++i) base_l[i] = from_quad<L>(to_quad(base[i]));
  const L cdt = from_quad<L>(coeff) * from_double<L>(dt);

  std::vector<L> inj;
  if (!injection.empty()) {
    inj.resize(n);
    for (int i = 0; i < n; ++i) inj[i] = from_double<L>(injection[i]);
  }

  std::vector<L> f(n);
  double f_scale = 0.0, jac_scale = 0.0, stage_scale = 0.0;
  auto G = [&](std::span<const L> y, std::span<L> g) {
    kern.rhs(y, std::span<L>(f));
    if (!inj.empty())
      for (int i = 0; i < n; ++i) f[i] = f[i] + inj[i];
    f_scale = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = y[i] - base_l[i] - cdt * f[i];
      f_scale = std::max(f_scale, to_double(abs_s(cdt * f[i])));
    }
    stage_scale = f_scale + jac_scale;
  };
  auto J = [&](std::span<const L> y, std::span<L> jm) {
    kern.jac(y, jm);
    const L zero = L(0);
    jac_scale = 0.0;
    for (int r = 0; r < n; ++r) {
      double row = 0.0;
      for (int c = 0; c < n; ++c) {
        size_t idx = static_cast<size_t>(r) * n + c;
        row += to_double(abs_s(cdt * jm[idx])) * to_double(abs_s(y[c]));
        jm[idx] = (r == c ? L(1) : zero) - cdt * jm[idx];
      }
      jac_scale = std::max(jac_scale, row);
    }
  };
  std::vector<L> y0 = base_l;  // base_l stays live inside G
  if (!start.empty())
    for (int i = 0; i < n; ++i) y0[i] = from_quad<L>(to_quad(start[i]));
  return newton_solve<L>(G, J, std::move(y0), n, cfg, &stage_scale);
}

}  // namespace mpark
