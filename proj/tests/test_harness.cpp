#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harness.hpp"
#include "report.hpp"

using namespace mpark;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepSpec dahlquist_spec() {
  SweepSpec spec;
  spec.problem.name = "dahlquist";
  spec.problem.lambda = {-1.0, 0.0};
  spec.method = "imr";
  spec.corrections = 0;
  spec.pairs = {*parse_pair("f64/f64")};
  for (int k = 3; k <= 10; ++k) spec.dts.push_back(std::ldexp(1.0, -k));
  return spec;
}

}  // namespace

TEST_CASE("observed order on exact ratios") {
  std::vector<std::pair<double, double>> two{{0.1, 1e-2}, {0.05, 2.5e-3}};
  CHECK(observed_order(two) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> flat{{0.1, 3e-3}, {0.05, 3e-3}, {0.025, 3e-3}};
  CHECK(observed_order(flat) == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> three{{0.1, 1e-3}, {0.05, 1.25e-4}};
  CHECK(observed_order(three) == doctest::Approx(3.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> zero{{0.1, 0.0}, {0.05, 0.0}};
  CHECK(std::isinf(observed_order(zero)));

  std::vector<std::pair<double, double>> one{{0.1, 1e-3}};
  CHECK_THROWS_AS(observed_order(one), std::invalid_argument);
}

TEST_CASE("plateau classifier on synthetic curves") {
  // clean second order: no plateau
  std::vector<std::pair<double, double>> clean;
  for (int k = 3; k <= 10; ++k) {
    double dt = std::ldexp(1.0, -k);
    clean.emplace_back(dt, 0.3 * dt * dt);
  }
  PlateauVerdict v1 = classify_plateau(clean, 2);
  CHECK(!v1.plateau);
  CHECK(v1.onset_dt == 0.0);

  // second order into a floor
  std::vector<std::pair<double, double>> floored;
  for (int k = 3; k <= 12; ++k) {
    double dt = std::ldexp(1.0, -k);
    floored.emplace_back(dt, 0.3 * dt * dt + 2e-6);
  }
  PlateauVerdict v2 = classify_plateau(floored, 2);
  CHECK(v2.plateau);
  CHECK(v2.onset_dt > 0.0);
  CHECK(v2.first3_slope >= 1.5);
  CHECK(v2.last3_slope < 0.5);
}

TEST_CASE("convergence sweep on the exponential recovers second order") {
  SweepSpec spec = dahlquist_spec();
  ConvergenceReport rep = run_convergence(spec);
  REQUIRE(rep.rows.size() == spec.dts.size());
  for (const auto& row : rep.rows) CHECK(row.status == "ok");
  REQUIRE(rep.observed_orders.size() == 1);
  CHECK(rep.observed_orders[0].second == doctest::Approx(2.0).epsilon(0.05));
  CHECK(rep.dt_ref <= *std::min_element(spec.dts.begin(), spec.dts.end()) / 20.0 * 1.0001);
  CHECK(rep.ref_self_check >= 0.0);
}

TEST_CASE("sweep cells that fail are recorded, not fatal") {
  SweepSpec spec;
  spec.problem.name = "vdp";
  spec.problem.alpha = 3.0;
  spec.method = "sdirk";
  spec.corrections = 0;
  spec.pairs = {*parse_pair("f64/f16"), *parse_pair("f64/f64")};
  spec.dts = {1.0 / 32.0, 1.0 / 64.0};
  // a tolerance below the residual floor of either precision: every Newton
  // solve runs out of iterations, yet the sweep completes with data rows
  spec.newton_tol_factor = 1e-6;
  ConvergenceReport rep = run_convergence(spec);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    CHECK(row.status == "not_converged");
    CHECK(std::isinf(row.error));
  }
}

TEST_CASE("sweep runs identically serial and threaded") {
  SweepSpec spec = dahlquist_spec();
  spec.method = "sdirk";
  spec.corrections = 1;
  spec.pairs = {*parse_pair("f64/f32"), *parse_pair("f64/f64")};
  ConvergenceReport serial = run_convergence(spec);
  spec.threads = 2;
  ConvergenceReport threaded = run_convergence(spec);
  REQUIRE(serial.rows.size() == threaded.rows.size());
  for (size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].pair == threaded.rows[i].pair);
    CHECK(serial.rows[i].error == threaded.rows[i].error);  // bit identical
    CHECK(serial.rows[i].status == threaded.rows[i].status);
  }
}

TEST_CASE("efficiency requires honest repetition counts") {
  SweepSpec spec = dahlquist_spec();
  spec.repetitions = 1;
  CHECK_THROWS_AS(run_efficiency(spec), std::invalid_argument);
  spec.repetitions = 3;
  spec.dts = {0.125, 0.0625};
  ConvergenceReport rep = run_efficiency(spec);
  for (const auto& row : rep.rows) {
    CHECK(row.status == "ok");
    CHECK(row.wall_s > 0.0);
  }
}

TEST_CASE("efficiency timing grows with the step count") {
  SweepSpec spec;
  spec.problem.name = "burgers";
  spec.problem.nx = 50;  // the forward flux difference needs nu >= u*dx/2
  spec.method = "imr";
  spec.pairs = {*parse_pair("f64/f64")};
  spec.dts = {1.0 / 16.0, 1.0 / 256.0};  // 16x the steps
  spec.repetitions = 5;
  ConvergenceReport rep = run_efficiency(spec);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].wall_s > rep.rows[0].wall_s);
}

TEST_CASE("stable-dt ladder is self-consistent") {
  SweepSpec spec;
  spec.problem.name = "dahlquist";
  spec.problem.lambda = {-200.0, 0.0};
  spec.method = "novela";
  spec.corrections = 0;
  spec.pairs = {*parse_pair("f64/f16")};
  spec.dt_max = 0.05;
  spec.levels = 6;
  StableDtReport rep = run_stable_dt(spec);
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows[0];
  // every rung above the reported dt was rejected, the reported one passed
  for (const auto& [dt, verdict] : row.ladder) {
    if (row.largest_dt > 0 && dt > row.largest_dt) CHECK(verdict != "stable");
    if (row.largest_dt > 0 && dt == row.largest_dt) CHECK(verdict == "stable");
  }

  // an A-stable method under a uniform pair is stable at the top rung once
  // the blow-up threshold is not vanishingly small
  SweepSpec easy = spec;
  easy.problem.lambda = {-4.0, 0.0};
  easy.method = "imr";
  easy.pairs = {*parse_pair("f64/f64")};
  StableDtReport rep2 = run_stable_dt(easy);
  CHECK(rep2.rows[0].largest_dt == 0.05);
}

TEST_CASE("config json round trip and validation") {
  SweepSpec spec = sweep_from_json(R"({
    "problem": {"name": "vdp", "alpha": 3.0},
    "method": {"name": "sdirk", "corrections": 2},
    "pairs": ["f64/f64", "f64/f16"],
    "dts": [0.03125, 0.015625],
    "reference": {"factor": 20, "level": "f128"},
    "repetitions": 2,
    "seed": 7,
    "order_window": [0.03125, 0.001]
  })");
  CHECK(spec.problem.name == "vdp");
  CHECK(spec.problem.alpha == 3.0);
  CHECK(spec.method == "sdirk");
  CHECK(spec.corrections == 2);
  CHECK(spec.pairs.size() == 2);
  CHECK(spec.pairs[1].str() == "f64/f16");
  CHECK(spec.dts.size() == 2);
  CHECK(spec.seed == 7);
  REQUIRE(spec.order_window.has_value());

  SweepSpec back = sweep_from_json(sweep_to_json(spec));
  CHECK(back.problem.alpha == spec.problem.alpha);
  CHECK(back.pairs.size() == spec.pairs.size());
  CHECK(back.dts == spec.dts);

  CHECK_THROWS_AS(sweep_from_json("{nope"), std::invalid_argument);
  CHECK_THROWS_AS(sweep_from_json(R"({"unknown_key": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(sweep_from_json(R"({"pairs": ["f16/f64"]})"), std::invalid_argument);
}

TEST_CASE("artifact files are written atomically and deterministically") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mpark_harness_test";
  fs::remove_all(dir);

  SweepSpec spec = dahlquist_spec();
  spec.dts.resize(4);
  ConvergenceReport rep = run_convergence(spec);
  std::string base = (dir / "conv").string();
  write_convergence_artifacts(base, spec, rep, false, true);

  REQUIRE(fs::exists(base + ".csv"));
  REQUIRE(fs::exists(base + ".meta.json"));
  REQUIRE(fs::exists(base + ".svg"));

  std::string csv = slurp(base + ".csv");
  CHECK(csv.rfind("method,corrections,pair,dt,error,wall_time_s,status,newton_iters_mean\n", 0) ==
        0);
  size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == spec.dts.size() + 1);

  // the metadata carries the resolved config, round-trippable into a spec
  {
    std::ifstream meta(base + ".meta.json");
    std::stringstream ss;
    ss << meta.rdbuf();
    auto pos = ss.str().find("\"config\"");
    REQUIRE(pos != std::string::npos);
    nlohmann::json j = nlohmann::json::parse(ss.str());
    SweepSpec back = sweep_from_json(j["config"].dump());
    CHECK(back.dts == spec.dts);
    CHECK(back.problem.name == spec.problem.name);
    CHECK(back.pairs.size() == spec.pairs.size());
  }

  // re-run and compare everything except the timing column
  ConvergenceReport rep2 = run_convergence(spec);
  std::string base2 = (dir / "conv2").string();
  write_convergence_artifacts(base2, spec, rep2, false, false);
  std::istringstream a(slurp(base + ".csv")), b(slurp(base2 + ".csv"));
  std::string la, lb;
  while (std::getline(a, la) && std::getline(b, lb)) {
    auto strip_time = [](std::string s) {
      // drop the sixth comma-separated field
      std::vector<std::string> parts;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) parts.push_back(item);
      if (parts.size() >= 6) parts.erase(parts.begin() + 5);
      std::string out;
      for (const auto& p : parts) out += p + "|";
      return out;
    };
    CHECK(strip_time(la) == strip_time(lb));
  }
  fs::remove_all(dir);
}
