#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <quadmath.h>

#include "integrator.hpp"
#include "oracles.hpp"
#include "precision.hpp"
#include "problems.hpp"
#include "stability.hpp"
#include "tableaus.hpp"

using namespace mpark;

namespace {

IntegratorConfig uniform64(double dt, int steps) {
  IntegratorConfig cfg;
  cfg.pair = {PrecisionLevel::Double, PrecisionLevel::Double};
  cfg.dt = dt;
  cfg.steps = steps;
  return cfg;
}

std::vector<double> tableau_a_tilde_d(const MpTableau& t) {
  auto at = t.a_tilde();
  std::vector<double> out(at.size());
  for (size_t i = 0; i < at.size(); ++i) out[i] = to_double(at[i]);
  return out;
}

std::vector<double> tableau_b_tilde_d(const MpTableau& t) {
  auto bt = t.b_tilde();
  std::vector<double> out(bt.size());
  for (size_t i = 0; i < bt.size(); ++i) out[i] = to_double(bt[i]);
  return out;
}

}  // namespace

TEST_CASE("midpoint rule closed forms on the linear problem") {
  OdeProblem p = dahlquist(-1.0);
  MpTableau imr0 = imr_tableau(0);

  Trajectory one = integrate(p, imr0, uniform64(1.0, 1));
  CHECK(to_double(one.final_state()[0]) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  Trajectory two = integrate(p, imr0, uniform64(0.5, 2));
  CHECK(to_double(two.final_state()[0]) == doctest::Approx(0.36).epsilon(1e-13));
  CHECK(two.steps_completed == 2);
  CHECK(two.times.front() == 0.0);
  CHECK(to_double(two.states.front()[0]) == 1.0);
}

TEST_CASE("corrections are fixed-point no-ops at uniform precision") {
  OdeProblem p = dahlquist(-1.0);
  double base = to_double(integrate(p, imr_tableau(0), uniform64(0.25, 4)).final_state()[0]);
  for (int m = 1; m <= 3; ++m) {
    double v = to_double(integrate(p, imr_tableau(m), uniform64(0.25, 4)).final_state()[0]);
    CHECK(std::fabs(v - base) <= 10.0 * 4.0 * 10.0 * unit_roundoff(PrecisionLevel::Double));
  }
}

TEST_CASE("uniform-precision runs track the rational stability function") {
  OdeProblem p = dahlquist(-1.0);
  uint64_t s = 17;
  for (const auto& t : {imr_tableau(0), imr_tableau(2), sdirk_tableau(1), sdirk_tableau(2),
                        novel_a_tableau()}) {
    auto a = tableau_a_tilde_d(t);
    auto b = tableau_b_tilde_d(t);
    for (int trial = 0; trial < 20; ++trial) {
      double dt = 0.05 + 1.95 * uniform01(s);  // z = -dt on this problem
      auto phi = oracles::stability_function_cramer(a, b, t.stages, {-dt, 0.0});
      Trajectory traj = integrate(p, t, uniform64(dt, 1));
      REQUIRE(traj.status == SolveStatus::Ok);
      double tol = 10.0 * 10.0 * unit_roundoff(PrecisionLevel::Double) * (1.0 + std::fabs(phi.real()));
      CHECK(std::fabs(to_double(traj.final_state()[0]) - phi.real()) <= tol);
    }
  }
}

TEST_CASE("injected stage perturbation reproduces the correction gain") {
  // one step of IMR with c corrections at z = lambda*dt; the perturbation q
  // enters the low-precision stage as F_eps = F + q/dt
  const double q = 1e-3;
  for (double z : {-0.5, -1.0, -4.0}) {
    for (int c : {0, 1, 2}) {
      OdeProblem p = dahlquist(z);  // dt = 1, so z = lambda
      MpTableau t = imr_tableau(c);

      IntegratorConfig clean = uniform64(1.0, 1);
      IntegratorConfig pert = clean;
      pert.feps_injection = {q};  // eps*tau = q/dt with dt = 1

      double u_clean = to_double(integrate(p, t, clean).final_state()[0]);
      double u_pert = to_double(integrate(p, t, pert).final_state()[0]);
      double gain = (u_pert - u_clean) / q;
      CHECK(std::fabs(gain - closed_form_imr_perturbation(z, c)) <= 1e-12);
    }
  }
}

TEST_CASE("rk4 reference converges at fourth order on the exponential") {
  OdeProblem p = dahlquist(-1.0);
  auto ref = rk4_reference(p, 1e-3, PrecisionLevel::Extended);
  Quad exact = expq(Quad(-1));
  CHECK(to_double(abs_s(ref[0] - exact)) <= 1e-12);

  // lambda = 0: the reference stays at y0
  OdeProblem p0 = dahlquist(0.0);
  auto ref0 = rk4_reference(p0, 0.125, PrecisionLevel::Extended);
  CHECK(to_double(ref0[0]) == 1.0);

  // halving the step divides the error by about 16
  auto coarse = rk4_reference(p, 1.0 / 8.0, PrecisionLevel::Extended);
  auto fine = rk4_reference(p, 1.0 / 16.0, PrecisionLevel::Extended);
  double e1 = to_double(abs_s(coarse[0] - exact));
  double e2 = to_double(abs_s(fine[0] - exact));
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));

  CHECK_THROWS_AS(rk4_reference(p, 0.3, PrecisionLevel::Extended), std::invalid_argument);
}

TEST_CASE("trajectory bookkeeping and strided snapshots") {
  OdeProblem p = van_der_pol(1.0);
  IntegratorConfig cfg = uniform64(1.0 / 32.0, 32);
  cfg.store_every = 1;
  Trajectory traj = integrate(p, imr_tableau(0), cfg);
  CHECK(traj.states.size() == 33);
  CHECK(traj.times.size() == 33);
  CHECK(traj.times[0] == 0.0);
  CHECK(to_double(traj.states[0][0]) == 2.0);
  CHECK(traj.newton_iters.size() == 32);

  cfg.store_every = 8;
  Trajectory strided = integrate(p, imr_tableau(0), cfg);
  CHECK(strided.states.size() == 5);  // t = 0 and four snapshots

  cfg.store_every = 0;
  Trajectory lean = integrate(p, imr_tableau(0), cfg);
  CHECK(lean.states.size() == 2);
  CHECK(lean.stage_residuals.size() == 32);
  for (double r : lean.stage_residuals) {
    CHECK(r >= 0.0);
    CHECK(r < 1e-12);
  }

  IntegratorConfig single = uniform64(1.0, 1);
  Trajectory one = integrate(p, imr_tableau(0), single);
  CHECK(one.steps_completed == 1);
  CHECK_THROWS_AS(integrate(p, imr_tableau(0), uniform64(1.0, 0)), std::invalid_argument);
}

TEST_CASE("newton diagnostics on van der Pol stay within the observed budget") {
  OdeProblem p = van_der_pol(3.0);
  IntegratorConfig cfg = uniform64(1.0 / 320.0, 320);
  Trajectory traj = integrate(p, sdirk_tableau(1), cfg);
  REQUIRE(traj.status == SolveStatus::Ok);
  CHECK(traj.newton_iters_mean() <= 6.0);
  CHECK(traj.newton_iters_mean() > 0.0);
}

TEST_CASE("mixed half runs complete and promote exactly") {
  OdeProblem p = van_der_pol(3.0);
  IntegratorConfig cfg;
  cfg.pair = *parse_pair("f64/f16");
  cfg.dt = 1.0 / 128.0;
  cfg.steps = 128;
  Trajectory traj = integrate(p, sdirk_tableau(2), cfg);
  REQUIRE(traj.status == SolveStatus::Ok);

  // error against the double run is visible but bounded
  Trajectory ref = integrate(p, sdirk_tableau(2), uniform64(1.0 / 128.0, 128));
  double diff = to_double(abs_s(traj.final_state()[0] - ref.final_state()[0]));
  CHECK(diff > 1e-12);  // half-precision stages leave a footprint
  CHECK(diff < 1e-1);
}

TEST_CASE("failures abort cleanly and keep the partial trajectory") {
  OdeProblem p = van_der_pol(1000.0);
  IntegratorConfig cfg;
  cfg.pair = *parse_pair("f64/f16");
  cfg.dt = 0.25;
  cfg.steps = 4;
  cfg.store_every = 1;
  Trajectory traj = integrate(p, sdirk_tableau(3), cfg);
  CHECK(traj.status != SolveStatus::Ok);
  CHECK(traj.steps_completed < 4);
  CHECK(traj.states.size() >= 1);
  CHECK(traj.times.size() == traj.states.size());
}

TEST_CASE("uniform pair at every level reproduces the same trajectory shape") {
  OdeProblem p = dahlquist(-2.0);
  for (const char* pair : {"f32/f32", "f64/f64", "f128/f128", "f64/f32", "f128/f16"}) {
    IntegratorConfig cfg;
    cfg.pair = *parse_pair(pair);
    cfg.dt = 0.125;
    cfg.steps = 8;
    Trajectory traj = integrate(p, sdirk_tableau(1), cfg);
    REQUIRE(traj.status == SolveStatus::Ok);
    CHECK(to_double(traj.final_state()[0]) == doctest::Approx(std::exp(-2.0)).epsilon(0.01));
  }
}

TEST_CASE("sdirk perturbation order: the slope-drop point recedes with m") {
  // global error O(dt^3) + O(eps*dt^m): at f64/f16 the dt where the observed
  // slope falls below design-order minus one half moves to smaller dt as the
  // correction count grows
  auto slope_drop_dt = [](int m) {
    OdeProblem p = van_der_pol(1.0);
    MpTableau t = sdirk_tableau(m);
    std::vector<std::pair<double, double>> pts;
    for (int k = 6; k <= 14; ++k) {  // asymptotic window
      IntegratorConfig cfg;
      cfg.pair = *parse_pair("f64/f16");
      cfg.dt = std::ldexp(1.0, -k);
      cfg.steps = 1 << k;
      Trajectory traj = integrate(p, t, cfg);
      REQUIRE(traj.status == SolveStatus::Ok);
      auto ref = rk4_reference(p, std::ldexp(1.0, -k) / 16.0, PrecisionLevel::Extended);
      double err = 0.0;
      for (int i = 0; i < p.dim; ++i)
        err = std::max(err, to_double(abs_s(traj.final_state()[i] - ref[i])));
      pts.emplace_back(cfg.dt, err);
    }
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      double slope = std::log(pts[i].second / pts[i + 1].second) /
                     std::log(pts[i].first / pts[i + 1].first);
      if (slope < 2.5) return pts[i].first;
    }
    return 0.0;  // never dropped inside the window
  };

  double d1 = slope_drop_dt(1);
  double d2 = slope_drop_dt(2);
  double d3 = slope_drop_dt(3);
  CHECK(d1 >= d2);
  CHECK(d2 >= d3);
  CHECK(d1 > d3);  // the ends separate strictly
}

TEST_CASE("steps_for accepts exact divisors and rejects drift") {
  CHECK(steps_for(1.0, 0.05) == 20);
  CHECK(steps_for(1.0, 1.0 / 320.0) == 320);
  CHECK(steps_for(1.0, 0.3) == -1);
  CHECK(steps_for(1.0, -0.1) == -1);
}
