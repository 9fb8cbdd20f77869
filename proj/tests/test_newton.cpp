#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <quadmath.h>
#include <vector>

#include "newton.hpp"
#include "precision.hpp"
#include "problems.hpp"
#include "tableaus.hpp"

using namespace mpark;

TEST_CASE("linear stage solves in at most two iterations") {
  OdeProblem p = dahlquist(-1.0);  // F(y) = -y
  std::vector<double> base{1.0};
  NewtonConfig cfg;
  auto res = solve_stage<double, double>(base, Quad(1) / Quad(2), 0.1, p, cfg);
  REQUIRE(res.converged);
  CHECK(res.iterations <= 2);
  CHECK(std::fabs(res.y[0] - 1.0 / 1.05) <= 1e-15);
}

TEST_CASE("raw kernel reaches sqrt(2) from 1 in classical Newton steps") {
  // G(y) = y^2 - 2
  auto G = [](std::span<const double> y, std::span<double> g) { g[0] = y[0] * y[0] - 2.0; };
  auto J = [](std::span<const double> y, std::span<double> j) { j[0] = 2.0 * y[0]; };
  NewtonConfig cfg;
  auto res = newton_solve<double>(G, J, {1.0}, 1, cfg);
  REQUIRE(res.converged);
  CHECK(res.iterations <= 6);
  const double root2 = to_double(sqrtq(Quad(2)));  // high-precision oracle
  const double tol = cfg.tol_factor * unit_roundoff(cfg.level) * (1.0 + root2);
  CHECK(std::fabs(res.y[0] - root2) <= tol);
  CHECK(res.residual_norm <= tol);
}

TEST_CASE("lu_solve identity and diagonal cases") {
  const FpFormat& f64 = format(PrecisionLevel::Double);
  std::vector<double> eye{1, 0, 0, 1};
  std::vector<double> b{3.5, -2.25};
  CHECK(lu_solve(eye, std::span<double>(b), 2, f64) == SolveStatus::Ok);
  CHECK(b[0] == 3.5);
  CHECK(b[1] == -2.25);

  std::vector<double> diag{2, 0, 0, 4};
  std::vector<double> b2{2, 8};
  CHECK(lu_solve(diag, std::span<double>(b2), 2, f64) == SolveStatus::Ok);
  CHECK(b2[0] == 1.0);
  CHECK(b2[1] == 2.0);
}

TEST_CASE("lu_solve residual on a random well-conditioned system") {
  const FpFormat& f64 = format(PrecisionLevel::Double);
  const int n = 10;
  uint64_t s = 5;
  std::vector<double> a(n * n), a0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a[static_cast<size_t>(i) * n + j] = (i == j ? double(n) : 0.0) + uniform01(s) - 0.5;
  a0 = a;
  std::vector<double> b(n), b0;
  for (auto& v : b) v = 2.0 * uniform01(s) - 1.0;
  b0 = b;
  REQUIRE(lu_solve(a, std::span<double>(b), n, f64) == SolveStatus::Ok);
  double rn = 0.0, bn = 0.0;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += a0[static_cast<size_t>(i) * n + j] * b[j];
    rn = std::max(rn, std::fabs(acc - b0[i]));
    bn = std::max(bn, std::fabs(b0[i]));
  }
  CHECK(rn / bn <= 1e-12);
}

TEST_CASE("lu_solve flags singular systems") {
  const FpFormat& f64 = format(PrecisionLevel::Double);
  std::vector<double> sing{1, 2, 2, 4};
  std::vector<double> b{1, 1};
  CHECK(lu_solve(sing, std::span<double>(b), 2, f64) == SolveStatus::SingularJacobian);
}

TEST_CASE("half-precision solve returns values representable at the level") {
  OdeProblem p = van_der_pol(3.0);
  std::vector<double> base{1.75, -0.25};
  NewtonConfig cfg;
  cfg.level = PrecisionLevel::Half;
  const double dt = 1.0 / 64.0;
  auto res = solve_stage<Half, double>(base, sdirk_gamma(), dt, p, cfg);
  REQUIRE(res.converged);
  const FpFormat& f16 = format(PrecisionLevel::Half);
  double yn = 0.0;
  std::vector<double> yd;
  for (Half v : res.y) {
    CHECK(round_to(to_double(v), f16) == to_double(v));
    yn = std::max(yn, std::fabs(to_double(v)));
    yd.push_back(to_double(v));
  }
  // residual contract at the solution, including the stage-term scale
  auto f = eval_low(p, yd, PrecisionLevel::Half);
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::fabs(to_double(sdirk_gamma()) * dt * v));
  CHECK(res.residual_norm <= cfg.tol_factor * f16.unit_roundoff * (1.0 + yn + scale));
}

TEST_CASE("identical inputs give bit-identical results") {
  OdeProblem p = van_der_pol(10.0);
  std::vector<double> base{1.5, 0.5};
  NewtonConfig cfg;
  cfg.level = PrecisionLevel::Single;
  auto r1 = solve_stage<float, double>(base, Quad(1) / Quad(2), 0.01, p, cfg);
  auto r2 = solve_stage<float, double>(base, Quad(1) / Quad(2), 0.01, p, cfg);
  REQUIRE(r1.converged);
  REQUIRE(r2.converged);
  CHECK(r1.iterations == r2.iterations);
  for (size_t i = 0; i < r1.y.size(); ++i) CHECK(r1.y[i] == r2.y[i]);
}

TEST_CASE("iteration cap surfaces as NotConverged with the last iterate") {
  // stiff stage far outside the contraction region, one allowed update
  OdeProblem p = van_der_pol(1000.0);
  std::vector<double> base{2.0, -500.0};
  NewtonConfig cfg;
  cfg.max_iters = 1;
  cfg.tol_factor = 1e-6;  // unreachable tolerance
  auto res = solve_stage<double, double>(base, Quad(1), 10.0, p, cfg);
  CHECK(!res.converged);
  CHECK(res.status == SolveStatus::NotConverged);
  CHECK(res.y.size() == 2);
  CHECK(res.iterations == 1);
}
