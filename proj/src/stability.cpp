#include "stability.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "precision.hpp"
#include "problems.hpp"

namespace mpark {

namespace {

// Gaussian elimination with partial pivoting for the small complex stage
// systems (s <= a dozen).
SolveStatus solve_cplx(std::vector<Cplx> m, std::vector<Cplx>& rhs, int n) {
  for (int col = 0; col < n; ++col) {
    int best = col;
    double best_mag = std::abs(m[static_cast<size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double mag = std::abs(m[static_cast<size_t>(r) * n + col]);
      if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (!(best_mag > 0) || !std::isfinite(best_mag)) return SolveStatus::SingularJacobian;
    if (best != col) {
      for (int c = 0; c < n; ++c)
        std::swap(m[static_cast<size_t>(best) * n + c], m[static_cast<size_t>(col) * n + c]);
      std::swap(rhs[best], rhs[col]);
    }
    const Cplx piv = m[static_cast<size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      Cplx f = m[static_cast<size_t>(r) * n + col] / piv;
      if (f == Cplx(0)) continue;
      for (int c = col; c < n; ++c)
        m[static_cast<size_t>(r) * n + c] -= f * m[static_cast<size_t>(col) * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    Cplx s = rhs[i];
    for (int j = i + 1; j < n; ++j) s -= m[static_cast<size_t>(i) * n + j] * rhs[j];
    rhs[i] = s / m[static_cast<size_t>(i) * n + i];
  }
  return SolveStatus::Ok;
}

double heat_eigenvalue(HeatOp op, int nx, int k) {
  return op == HeatOp::Centered ? dc_eigenvalue(nx, k) : ds_eigenvalue(nx, k);
}

}  // namespace

Cplx psi_eps(const MpTableau& t, Cplx z, double eps_tilde, std::span<const double> tau,
             SolveStatus* status) {
  const int s = t.stages;
  if (static_cast<int>(tau.size()) != s && !tau.empty())
    throw std::invalid_argument("psi_eps: tau must have one entry per stage");
  const auto at = t.a_tilde();
  const auto bt = t.b_tilde();

  std::vector<Cplx> m(static_cast<size_t>(s) * s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Cplx v = -z * to_double(at[static_cast<size_t>(i) * s + j]);
      if (i == j) {
        v += 1.0;
        if (!tau.empty()) v -= z * eps_tilde * tau[i];
      }
      m[static_cast<size_t>(i) * s + j] = v;
    }
  std::vector<Cplx> w(s, Cplx(1));
  SolveStatus st = solve_cplx(std::move(m), w, s);
  if (status) *status = st;
  if (st != SolveStatus::Ok) return Cplx(0);
  Cplx acc(0);
  for (int j = 0; j < s; ++j) acc += to_double(bt[j]) * w[j];
  return Cplx(1) + z * acc;
}

Cplx stability_function(const MpTableau& t, Cplx z, SolveStatus* status) {
  return psi_eps(t, z, 0.0, {}, status);
}

double StabilityGrid::stable_fraction() const {
  if (cells.empty()) return 0.0;
  size_t n = 0;
  for (uint8_t c : cells) n += c;
  return static_cast<double>(n) / static_cast<double>(cells.size());
}

StabilityGrid stability_region(const MpTableau& t, const StabilityGridSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2) throw std::invalid_argument("stability_region: resolution too small");
  if (spec.samples < 1) throw std::invalid_argument("stability_region: samples must be >= 1");
  StabilityGrid grid;
  grid.spec = spec;
  grid.cells.assign(static_cast<size_t>(spec.nx) * spec.ny, 0);

  auto scan_row = [&](int j) {
    const double im = spec.im_min + (spec.im_max - spec.im_min) * j / (spec.ny - 1);
    std::vector<double> tau(t.stages);
    for (int i = 0; i < spec.nx; ++i) {
      const double re = spec.re_min + (spec.re_max - spec.re_min) * i / (spec.nx - 1);
      const Cplx z(re, im);
      uint64_t state = mix_seed(spec.seed, static_cast<uint64_t>(i), static_cast<uint64_t>(j));
      bool stable = true;
      for (int k = 0; k < spec.samples && stable; ++k) {
        for (double& v : tau) v = uniform01(state) - 0.5;
        SolveStatus st;
        Cplx psi = psi_eps(t, z, spec.eps_tilde, tau, &st);
        if (st != SolveStatus::Ok || !(std::abs(psi) <= 1.0)) stable = false;
      }
      grid.cells[static_cast<size_t>(j) * spec.nx + i] = stable ? 1 : 0;
    }
  };

  int threads = std::max(1, spec.threads);
  if (threads == 1) {
    for (int j = 0; j < spec.ny; ++j) scan_row(j);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int j = next.fetch_add(1); j < spec.ny; j = next.fetch_add(1)) scan_row(j);
      });
    for (auto& th : pool) th.join();
  }
  return grid;
}

double mixed_model_radius(const MixedModelSpec& spec) {
  const int nx = spec.nx;
  const double dx = 2.0 * M_PI / nx;
  const double dt = spec.cfl * dx * dx;
  double rho = 0.0;
  for (int k = 0; k <= nx / 2; ++k) {
    const double le = heat_eigenvalue(spec.explicit_op, nx, k);
    const double li = heat_eigenvalue(spec.implicit_op, nx, k);
    const double denom = 1.0 - 0.5 * dt * li;
    double amp = 1.0 + dt * le * std::pow(1.0 + 0.5 * dt * le, spec.corrections) / denom;
    rho = std::max(rho, std::fabs(amp));
  }
  return rho;
}

double mixed_model_radius_dense(const MixedModelSpec& spec) {
  HeatOperators ops = heat_operators(spec.nx);
  const int n = spec.nx;
  const double dt = spec.cfl * ops.dx * ops.dx;

  auto pick = [&](HeatOp op) {
    Eigen::MatrixXd m(n, n);
    const auto& src = op == HeatOp::Centered ? ops.dc : ops.ds;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = src[static_cast<size_t>(i) * n + j];
    return m;
  };
  Eigen::MatrixXd de = pick(spec.explicit_op);
  Eigen::MatrixXd di = pick(spec.implicit_op);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd rhs = eye;
  Eigen::MatrixXd damp = eye + 0.5 * dt * de;
  for (int c = 0; c < spec.corrections; ++c) rhs = damp * rhs;
  Eigen::MatrixXd inv = (eye - 0.5 * dt * di).partialPivLu().solve(rhs);
  Eigen::MatrixXd p = eye + dt * de * inv;

  Eigen::EigenSolver<Eigen::MatrixXd> eig(p, false);
  double rho = 0.0;
  for (int i = 0; i < n; ++i) rho = std::max(rho, std::abs(eig.eigenvalues()[i]));
  return rho;
}

double sensitivity_metric(const MpTableau& t, double z, SolveStatus* status) {
  const int s = t.stages;
  const auto at = t.a_tilde();
  const auto bt = t.b_tilde();
  const auto ce = t.c_eps();

  // Psi = z b (I - z Atilde)^-1, a row vector: solve the transposed system.
  std::vector<Cplx> m(static_cast<size_t>(s) * s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      m[static_cast<size_t>(i) * s + j] =
          (i == j ? 1.0 : 0.0) - z * to_double(at[static_cast<size_t>(j) * s + i]);
  std::vector<Cplx> w(s);
  for (int i = 0; i < s; ++i) w[i] = to_double(bt[i]);
  SolveStatus st = solve_cplx(std::move(m), w, s);
  if (status) *status = st;
  if (st != SolveStatus::Ok) return 0.0;

  // |A_eps| e: componentwise absolute row sums
  double acc = 0.0;
  for (int j = 0; j < s; ++j) {
    double row = 0.0;
    for (int k = 0; k < s; ++k) row += std::fabs(to_double(t.a_eps[static_cast<size_t>(j) * s + k]));
    acc += std::abs(z * w[j]) * row;
  }
  return acc;
}

double closed_form_imr_perturbation(double z, int corrections) {
  if (z == 2.0) throw std::invalid_argument("closed_form_imr_perturbation: pole at z = 2");
  return std::pow(z / 2.0, corrections + 1) / (1.0 - z / 2.0);
}

double roundoff_growth_bound(const MpTableau& t, double z, double eps, int n_steps, double dt,
                             GrowthModel model, SolveStatus* status) {
  SolveStatus st = SolveStatus::Ok;
  Cplx phi = stability_function(t, Cplx(z, 0.0), &st);
  if (status) *status = st;
  if (st != SolveStatus::Ok) return 0.0;
  const double amp = std::abs(phi);
  if (amp > 1.0) {
    if (status) *status = SolveStatus::RangeFault;  // precondition |1 + Psi e| <= 1 violated
    return 0.0;
  }
  double metric = sensitivity_metric(t, z, &st);
  if (status && st != SolveStatus::Ok) *status = st;
  double per_step = 0.5 * eps * metric;
  if (model == GrowthModel::PerStepEpsDt) per_step *= dt;
  double factor = static_cast<double>(n_steps);
  if (amp < 1.0) factor = std::min(factor, 1.0 / (1.0 - amp));
  return per_step * factor;
}

}  // namespace mpark
