#include "integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpark {

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "ok";
    case SolveStatus::NotConverged: return "not_converged";
    case SolveStatus::SingularJacobian: return "singular_jacobian";
    case SolveStatus::RangeFault: return "overflow";
  }
  return "?";
}

namespace {

// Per-run view of the tableau narrowed to the storage scalar, plus which
// cached evaluations each stage needs.
template <class S>
struct RunPlan {
  int s = 0;
  std::vector<S> a, a_eps, b, b_eps;
  std::vector<Quad> ae_diag, a_diag;
  std::vector<bool> need_f, need_feps;

  explicit RunPlan(const MpTableau& t) : s(t.stages) {
    size_t n2 = static_cast<size_t>(s) * s;
    a.resize(n2);
    a_eps.resize(n2);
    b.resize(s);
    b_eps.resize(s);
    for (size_t i = 0; i < n2; ++i) {
      a[i] = from_quad<S>(t.a[i]);
      a_eps[i] = from_quad<S>(t.a_eps[i]);
    }
    need_f.assign(s, false);
    need_feps.assign(s, false);
    ae_diag.resize(s);
    a_diag.resize(s);
    for (int j = 0; j < s; ++j) {
      b[j] = from_quad<S>(t.b[j]);
      b_eps[j] = from_quad<S>(t.b_eps[j]);
      ae_diag[j] = t.at_ae(j, j);
      a_diag[j] = t.at_a(j, j);
      if (t.b[j] != 0) need_f[j] = true;
      if (t.b_eps[j] != 0) need_feps[j] = true;
      for (int i = j + 1; i < s; ++i) {
        if (t.at_a(i, j) != 0) need_f[j] = true;
        if (t.at_ae(i, j) != 0) need_feps[j] = true;
      }
    }
  }
};

template <class S, class L>
SolveStatus step_impl(const OdeProblem& p, const RunPlan<S>& plan, const IntegratorConfig& cfg,
                      std::vector<S>& u, int& iters, double& worst_residual) {
  const int n = p.dim;
  const int s = plan.s;
  const auto& hi = p.kernels<S>();
  const auto& lo = p.kernels<L>();
  const S dt = from_double<S>(cfg.dt);

  NewtonConfig ncfg_lo{cfg.pair.low, cfg.newton_max_iters, cfg.newton_tol_factor};
  NewtonConfig ncfg_hi{cfg.pair.high, cfg.newton_max_iters, cfg.newton_tol_factor};

  std::vector<std::vector<S>> f_cache(s), feps_cache(s);
  std::vector<S> base(n), y(n);
  std::vector<L> yl(n), fl(n);
  iters = 0;
  worst_residual = 0.0;

  for (int i = 0; i < s; ++i) {
    base = u;
    for (int j = 0; j < i; ++j) {
      if (plan.a[static_cast<size_t>(i) * s + j] != S(0)) {
        const S w = dt * plan.a[static_cast<size_t>(i) * s + j];
        const auto& fj = f_cache[j];
        for (int k = 0; k < n; ++k) base[k] = base[k] + w * fj[k];
      }
      if (plan.a_eps[static_cast<size_t>(i) * s + j] != S(0)) {
        const S w = dt * plan.a_eps[static_cast<size_t>(i) * s + j];
        const auto& fj = feps_cache[j];
        for (int k = 0; k < n; ++k) base[k] = base[k] + w * fj[k];
      }
    }

    // implicit solves start from the explicit base predictor; when the
    // accumulated stage terms put that far from the root (large dt*||J||),
    // retry once from the step state
    if (plan.ae_diag[i] != 0) {
      auto res = solve_stage<L, S>(base, plan.ae_diag[i], cfg.dt, p, ncfg_lo, cfg.feps_injection);
      iters += res.iterations;
      if (res.status != SolveStatus::Ok) {
        res = solve_stage<L, S>(base, plan.ae_diag[i], cfg.dt, p, ncfg_lo, cfg.feps_injection,
                                std::span<const S>(u));
        iters += res.iterations;
      }
      if (res.status != SolveStatus::Ok) return res.status;
      worst_residual = std::max(worst_residual, res.residual_norm);
      for (int k = 0; k < n; ++k) y[k] = widen<S, L>(res.y[k]);  // re-cast, exact
    } else if (plan.a_diag[i] != 0) {
      auto res = solve_stage<S, S>(base, plan.a_diag[i], cfg.dt, p, ncfg_hi, cfg.feps_injection);
      iters += res.iterations;
      if (res.status != SolveStatus::Ok) {
        res = solve_stage<S, S>(base, plan.a_diag[i], cfg.dt, p, ncfg_hi, cfg.feps_injection,
                                std::span<const S>(u));
        iters += res.iterations;
      }
      if (res.status != SolveStatus::Ok) return res.status;
      worst_residual = std::max(worst_residual, res.residual_norm);
      y = std::move(res.y);
    } else {
      y = base;
    }

    if (plan.need_f[i]) {
      f_cache[i].resize(n);
      hi.rhs(std::span<const S>(y), std::span<S>(f_cache[i]));
    }
    if (plan.need_feps[i]) {
      for (int k = 0; k < n; ++k) yl[k] = from_quad<L>(to_quad(y[k]));
      lo.rhs(std::span<const L>(yl), std::span<L>(fl));
      if (!cfg.feps_injection.empty())
        for (int k = 0; k < n; ++k) fl[k] = fl[k] + from_double<L>(cfg.feps_injection[k]);
      feps_cache[i].resize(n);
      for (int k = 0; k < n; ++k) feps_cache[i][k] = widen<S, L>(fl[k]);
    }
  }

  for (int j = 0; j < s; ++j) {
    if (plan.b[j] != S(0)) {
      const S w = dt * plan.b[j];
      const auto& fj = f_cache[j];
      for (int k = 0; k < n; ++k) u[k] = u[k] + w * fj[k];
    }
    if (plan.b_eps[j] != S(0)) {
      const S w = dt * plan.b_eps[j];
      const auto& fj = feps_cache[j];
      for (int k = 0; k < n; ++k) u[k] = u[k] + w * fj[k];
    }
  }
  for (int k = 0; k < n; ++k)
    if (!finite_s(u[k])) return SolveStatus::RangeFault;
  return SolveStatus::Ok;
}

template <class S, class L>
Trajectory integrate_impl(const OdeProblem& p, const MpTableau& t, const IntegratorConfig& cfg) {
  RunPlan<S> plan(t);
  Trajectory traj;
  std::vector<S> u(p.dim);
  for (int i = 0; i < p.dim; ++i) u[i] = from_quad<S>(p.y0[i]);

  auto snapshot = [&](int step) {
    std::vector<Quad> q(p.dim);
    for (int i = 0; i < p.dim; ++i) q[i] = to_quad(u[i]);
    traj.times.push_back(step * cfg.dt);
    traj.states.push_back(std::move(q));
  };
  snapshot(0);

  traj.newton_iters.reserve(cfg.steps);
  for (int step = 1; step <= cfg.steps; ++step) {
    int iters = 0;
    double residual = 0.0;
    SolveStatus st = step_impl<S, L>(p, plan, cfg, u, iters, residual);
    if (st != SolveStatus::Ok) {
      traj.status = st;
      return traj;
    }
    traj.newton_iters.push_back(iters);
    traj.stage_residuals.push_back(residual);
    traj.steps_completed = step;
    if (step == cfg.steps || (cfg.store_every > 0 && step % cfg.store_every == 0)) snapshot(step);
  }
  return traj;
}

template <class S>
Trajectory integrate_high(const OdeProblem& p, const MpTableau& t, const IntegratorConfig& cfg) {
  switch (cfg.pair.low) {
    case PrecisionLevel::Half: return integrate_impl<S, Half>(p, t, cfg);
    case PrecisionLevel::Single: return integrate_impl<S, float>(p, t, cfg);
    case PrecisionLevel::Double: return integrate_impl<S, double>(p, t, cfg);
    case PrecisionLevel::Extended: return integrate_impl<S, Quad>(p, t, cfg);
  }
  throw std::logic_error("bad precision level");
}

template <class L>
std::vector<Quad> rk4_impl(const OdeProblem& p, double dt_ref, int steps, SolveStatus* status) {
  const int n = p.dim;
  const auto& kern = p.kernels<L>();
  const L dt = from_double<L>(dt_ref);
  const L half = L(0.5);
  const L sixth = L(1) / L(6);
  const L two = L(2);

  std::vector<L> u(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int i = 0; i < n; ++i) u[i] = from_quad<L>(p.y0[i]);

  for (int s = 0; s < steps; ++s) {
    kern.rhs(std::span<const L>(u), std::span<L>(k1));
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + half * dt * k1[i];
    kern.rhs(std::span<const L>(tmp), std::span<L>(k2));
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + half * dt * k2[i];
    kern.rhs(std::span<const L>(tmp), std::span<L>(k3));
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
    kern.rhs(std::span<const L>(tmp), std::span<L>(k4));
    for (int i = 0; i < n; ++i)
      u[i] = u[i] + sixth * dt * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
  }
  std::vector<Quad> out(n);
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    if (!finite_s(u[i])) ok = false;
    out[i] = to_quad(u[i]);
  }
  if (status) *status = ok ? SolveStatus::Ok : SolveStatus::RangeFault;
  return out;
}

}  // namespace

int steps_for(double t_final, double dt) {
  if (!(dt > 0) || !(t_final > 0)) return -1;
  double raw = t_final / dt;
  double steps = std::round(raw);
  if (steps < 1 || std::fabs(steps * dt - t_final) > 1e-9 * t_final) return -1;
  return static_cast<int>(steps);
}

Trajectory integrate(const OdeProblem& p, const MpTableau& t, const IntegratorConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
  if (!(cfg.dt > 0)) throw std::invalid_argument("integrate: dt must be positive");
  if (static_cast<int>(cfg.pair.low) > static_cast<int>(cfg.pair.high))
    throw std::invalid_argument("integrate: pair must satisfy low <= high");
  if (!cfg.feps_injection.empty() && static_cast<int>(cfg.feps_injection.size()) != p.dim)
    throw std::invalid_argument("integrate: injection size must match problem dimension");
  switch (cfg.pair.high) {
    case PrecisionLevel::Half: return integrate_high<Half>(p, t, cfg);
    case PrecisionLevel::Single: return integrate_high<float>(p, t, cfg);
    case PrecisionLevel::Double: return integrate_high<double>(p, t, cfg);
    case PrecisionLevel::Extended: return integrate_high<Quad>(p, t, cfg);
  }
  throw std::logic_error("bad precision level");
}

SolveStatus step_once(const OdeProblem& p, const MpTableau& t, const IntegratorConfig& cfg,
                      std::vector<Quad>& u, int* newton_iters_out) {
  IntegratorConfig one = cfg;
  one.steps = 1;
  // run through the dispatcher with the state threaded via a copy of y0
  OdeProblem view = p;
  view.y0 = u;
  Trajectory traj = integrate(view, t, one);
  if (newton_iters_out)
    *newton_iters_out = traj.newton_iters.empty() ? 0 : traj.newton_iters.front();
  if (traj.status != SolveStatus::Ok) return traj.status;
  u = traj.final_state();
  return SolveStatus::Ok;
}

std::vector<Quad> rk4_reference(const OdeProblem& p, double dt_ref, PrecisionLevel level,
                                SolveStatus* status) {
  int steps = steps_for(p.t_final, dt_ref);
  if (steps < 1) throw std::invalid_argument("rk4_reference: dt_ref must divide t_final");
  switch (level) {
    case PrecisionLevel::Half: return rk4_impl<Half>(p, dt_ref, steps, status);
    case PrecisionLevel::Single: return rk4_impl<float>(p, dt_ref, steps, status);
    case PrecisionLevel::Double: return rk4_impl<double>(p, dt_ref, steps, status);
    case PrecisionLevel::Extended: return rk4_impl<Quad>(p, dt_ref, steps, status);
  }
  throw std::logic_error("bad precision level");
}

}  // namespace mpark
