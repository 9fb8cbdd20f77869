#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace mpark {

namespace {

using nlohmann::json;

double inf_norm_diff(const std::vector<Quad>& a, const std::vector<Quad>& b) {
  Quad m = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    Quad d = abs_s(a[i] - b[i]);
    if (d > m) m = d;
  }
  return to_double(m);
}

double inf_norm(const std::vector<Quad>& a) {
  Quad m = 0;
  for (Quad v : a) m = m < abs_s(v) ? abs_s(v) : m;
  return to_double(m);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct CellResult {
  ConvRow row;
};

ConvRow run_cell(const SweepSpec& spec, const OdeProblem& p, const MpTableau& t,
                 PrecisionPair pair, double dt, const std::vector<Quad>& u_ref, int reps,
                 bool drop_warmup) {
  ConvRow row;
  row.method = spec.method;
  row.corrections = spec.corrections;
  row.pair = pair.str();
  row.dt = dt;

  int steps = steps_for(p.t_final, dt);
  if (steps < 1) {
    row.status = "bad_dt";
    row.error = std::numeric_limits<double>::infinity();
    return row;
  }
  IntegratorConfig cfg;
  cfg.pair = pair;
  cfg.dt = dt;
  cfg.steps = steps;
  cfg.newton_max_iters = spec.newton_max_iters;
  cfg.newton_tol_factor = spec.newton_tol_factor;

  std::vector<double> times;
  Trajectory traj;
  int total_runs = reps + (drop_warmup ? 1 : 0);
  for (int r = 0; r < total_runs; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    traj = integrate(p, t, cfg);
    auto t1 = std::chrono::steady_clock::now();
    if (!(drop_warmup && r == 0))
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    if (traj.status != SolveStatus::Ok) break;
  }
  row.wall_s = times.empty() ? 0.0 : median(times);
  row.newton_iters_mean = traj.newton_iters_mean();
  row.status = solve_status_name(traj.status);
  if (traj.status == SolveStatus::Ok) {
    row.error = inf_norm_diff(traj.final_state(), u_ref);
  } else {
    row.error = std::numeric_limits<double>::infinity();
  }
  return row;
}

struct Reference {
  std::vector<Quad> state;
  double dt_ref = 0.0;
  double self_check = 0.0;
};

Reference compute_reference(const SweepSpec& spec, const OdeProblem& p) {
  double min_dt = *std::min_element(spec.dts.begin(), spec.dts.end());
  int steps_min = steps_for(p.t_final, min_dt);
  if (steps_min < 1) throw std::invalid_argument("sweep: smallest dt does not divide t_final");
  long steps_ref = static_cast<long>(steps_min) * spec.ref_factor;
  Reference ref;
  ref.dt_ref = p.t_final / static_cast<double>(steps_ref);
  SolveStatus st = SolveStatus::Ok;
  ref.state = rk4_reference(p, ref.dt_ref, spec.ref_level, &st);
  if (st != SolveStatus::Ok) throw std::runtime_error("sweep: reference solution overflowed");
  auto finer = rk4_reference(p, ref.dt_ref / 2.0, spec.ref_level, &st);
  if (st != SolveStatus::Ok) throw std::runtime_error("sweep: reference solution overflowed");
  ref.self_check = inf_norm_diff(ref.state, finer);
  return ref;
}

ConvergenceReport run_sweep(const SweepSpec& spec, bool efficiency) {
  if (spec.pairs.empty() || spec.dts.empty())
    throw std::invalid_argument("sweep: needs at least one pair and one dt");
  if (efficiency && spec.repetitions < 3)
    throw std::invalid_argument("efficiency: repetitions must be >= 3");

  OdeProblem p = build_problem(spec.problem);
  MpTableau t = make_tableau(spec.method, spec.corrections);
  for (double dt : spec.dts)
    if (steps_for(p.t_final, dt) < 1)
      throw std::invalid_argument("sweep: every dt must divide t_final");
  Reference ref = compute_reference(spec, p);

  std::vector<std::pair<PrecisionPair, double>> cells;
  for (const auto& pair : spec.pairs)
    for (double dt : spec.dts) cells.emplace_back(pair, dt);

  std::vector<ConvRow> rows(cells.size());
  int reps = std::max(1, spec.repetitions);
  auto work = [&](size_t i) {
    rows[i] = run_cell(spec, p, t, cells[i].first, cells[i].second, ref.state, reps, efficiency);
  };

  int threads = spec.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : spec.threads;
  bool serial = efficiency || spec.timing_exclusive || threads <= 1;
  if (serial) {
    for (size_t i = 0; i < cells.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }

  ConvergenceReport rep;
  rep.rows = std::move(rows);
  rep.dt_ref = ref.dt_ref;
  rep.ref_self_check = ref.self_check;

  for (const auto& pair : spec.pairs) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : rep.rows) {
      if (row.pair != pair.str() || row.status != "ok") continue;
      if (spec.order_window) {
        if (row.dt > spec.order_window->first || row.dt < spec.order_window->second) continue;
      }
      pts.emplace_back(row.dt, row.error);
    }
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double slope = pts.size() >= 2 ? observed_order(pts) : std::numeric_limits<double>::quiet_NaN();
    rep.observed_orders.emplace_back(pair.str(), slope);
  }
  return rep;
}

}  // namespace

OdeProblem build_problem(const ProblemSpec& spec) {
  if (spec.name == "vdp") return van_der_pol(spec.alpha);
  if (spec.name == "burgers") return viscous_burgers(spec.nx);
  if (spec.name == "dahlquist") return dahlquist(spec.lambda);
  if (spec.name == "heat") return heat_spectral(spec.nx);
  throw std::invalid_argument("unknown problem '" + spec.name +
                              "' (expected vdp|burgers|dahlquist|heat)");
}

SweepSpec sweep_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  SweepSpec spec;
  spec.pairs.clear();

  static const char* known[] = {"problem", "method",  "pairs",   "dts",          "reference",
                                "repetitions", "threads", "seed",    "timing_exclusive", "newton",
                                "order_window", "dt_max",  "levels",  "blowup_factor"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }

  if (j.contains("problem")) {
    const auto& pj = j["problem"];
    spec.problem.name = pj.value("name", "vdp");
    spec.problem.alpha = pj.value("alpha", 1.0);
    spec.problem.nx = pj.value("nx", 50);
    spec.problem.lambda = {pj.value("lambda_re", -1.0), pj.value("lambda_im", 0.0)};
  }
  if (j.contains("method")) {
    spec.method = j["method"].value("name", "imr");
    spec.corrections = j["method"].value("corrections", 0);
  }
  if (j.contains("pairs")) {
    for (const auto& s : j["pairs"]) {
      auto pr = parse_pair(s.get<std::string>());
      if (!pr) throw std::invalid_argument("config: bad precision pair '" + s.get<std::string>() + "'");
      spec.pairs.push_back(*pr);
    }
  }
  if (j.contains("dts"))
    for (const auto& d : j["dts"]) spec.dts.push_back(d.get<double>());
  if (j.contains("reference")) {
    spec.ref_factor = j["reference"].value("factor", 20);
    auto lv = parse_level(j["reference"].value("level", "f128"));
    if (!lv) throw std::invalid_argument("config: bad reference level");
    spec.ref_level = *lv;
  }
  spec.repetitions = j.value("repetitions", 1);
  spec.threads = j.value("threads", 1);
  spec.seed = j.value("seed", 0ull);
  spec.timing_exclusive = j.value("timing_exclusive", false);
  if (j.contains("newton")) {
    spec.newton_max_iters = j["newton"].value("max_iters", 20);
    spec.newton_tol_factor = j["newton"].value("tol_factor", 10.0);
  }
  if (j.contains("order_window")) {
    auto w = j["order_window"];
    if (!w.is_array() || w.size() != 2) throw std::invalid_argument("config: order_window = [dt_hi, dt_lo]");
    spec.order_window = std::make_pair(w[0].get<double>(), w[1].get<double>());
  }
  spec.dt_max = j.value("dt_max", 0.05);
  spec.levels = j.value("levels", 6);
  spec.blowup_factor = j.value("blowup_factor", 1e3);
  return spec;
}

std::string sweep_to_json(const SweepSpec& spec) {
  json j;
  j["problem"]["name"] = spec.problem.name;
  if (spec.problem.name == "vdp") j["problem"]["alpha"] = spec.problem.alpha;
  if (spec.problem.name == "burgers") j["problem"]["nx"] = spec.problem.nx;
  if (spec.problem.name == "dahlquist") {
    j["problem"]["lambda_re"] = spec.problem.lambda.real();
    j["problem"]["lambda_im"] = spec.problem.lambda.imag();
  }
  j["method"]["name"] = spec.method;
  j["method"]["corrections"] = spec.corrections;
  j["pairs"] = json::array();
  for (const auto& p : spec.pairs) j["pairs"].push_back(p.str());
  j["dts"] = spec.dts;
  j["reference"]["factor"] = spec.ref_factor;
  j["reference"]["level"] = format(spec.ref_level).name;
  j["repetitions"] = spec.repetitions;
  j["threads"] = spec.threads;
  j["seed"] = spec.seed;
  j["timing_exclusive"] = spec.timing_exclusive;
  j["newton"]["max_iters"] = spec.newton_max_iters;
  j["newton"]["tol_factor"] = spec.newton_tol_factor;
  if (spec.order_window)
    j["order_window"] = {spec.order_window->first, spec.order_window->second};
  j["dt_max"] = spec.dt_max;
  j["levels"] = spec.levels;
  j["blowup_factor"] = spec.blowup_factor;
  return j.dump(2);
}

ConvergenceReport run_convergence(const SweepSpec& spec) { return run_sweep(spec, false); }

ConvergenceReport run_efficiency(const SweepSpec& spec) { return run_sweep(spec, true); }

double observed_order(std::span<const std::pair<double, double>> dt_error) {
  if (dt_error.size() < 2) throw std::invalid_argument("observed_order: needs at least two points");
  for (const auto& [dt, err] : dt_error)
    if (err == 0.0) return std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dt_error.size());
  for (const auto& [dt, err] : dt_error) {
    double x = std::log(dt), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PlateauVerdict classify_plateau(std::span<const std::pair<double, double>> dt_error,
                                int design_order) {
  PlateauVerdict v;
  if (dt_error.size() < 3) return v;
  auto window_slope = [&](size_t start) {
    return observed_order(dt_error.subspan(start, 3));
  };
  v.first3_slope = window_slope(0);
  v.last3_slope = window_slope(dt_error.size() - 3);
  v.plateau = v.last3_slope < 0.5 && v.first3_slope >= design_order - 0.5;
  for (size_t s = 0; s + 3 <= dt_error.size(); ++s) {
    if (window_slope(s) < 0.5) {
      v.onset_dt = dt_error[s].first;
      break;
    }
  }
  return v;
}

StableDtRow find_largest_stable_dt(const MpTableau& t, PrecisionPair pair, const OdeProblem& p,
                                   double dt_max, int levels, double blowup_factor,
                                   const SweepSpec& spec, const std::vector<Quad>& u_ref) {
  StableDtRow row;
  row.method = t.name;
  row.corrections = t.corrections;
  row.pair = pair.str();
  const double threshold = blowup_factor * inf_norm(u_ref);

  double dt = dt_max;
  for (int level = 0; level < levels; ++level, dt /= 2.0) {
    int steps = steps_for(p.t_final, dt);
    if (steps < 1) {
      row.ladder.emplace_back(dt, "bad_dt");
      continue;
    }
    IntegratorConfig cfg;
    cfg.pair = pair;
    cfg.dt = dt;
    cfg.steps = steps;
    cfg.newton_max_iters = spec.newton_max_iters;
    cfg.newton_tol_factor = spec.newton_tol_factor;
    Trajectory traj = integrate(p, t, cfg);
    if (traj.status != SolveStatus::Ok) {
      row.ladder.emplace_back(dt, solve_status_name(traj.status));
      continue;
    }
    double err = inf_norm_diff(traj.final_state(), u_ref);
    if (err <= threshold) {
      row.ladder.emplace_back(dt, "stable");
      row.largest_dt = dt;
      return row;
    }
    row.ladder.emplace_back(dt, "blowup");
  }
  row.largest_dt = 0.0;
  return row;
}

StableDtReport run_stable_dt(const SweepSpec& spec) {
  if (spec.pairs.empty()) throw std::invalid_argument("stable-dt: needs at least one pair");
  OdeProblem p = build_problem(spec.problem);
  MpTableau t = make_tableau(spec.method, spec.corrections);

  // One reference for the blow-up threshold: dt_ref from the ladder floor.
  double dt_min = spec.dt_max / std::pow(2.0, spec.levels - 1);
  int steps_min = steps_for(p.t_final, dt_min);
  if (steps_min < 1) throw std::invalid_argument("stable-dt: ladder dt must divide t_final");
  double dt_ref = p.t_final / (static_cast<double>(steps_min) * spec.ref_factor);
  SolveStatus st = SolveStatus::Ok;
  auto u_ref = rk4_reference(p, dt_ref, spec.ref_level, &st);
  if (st != SolveStatus::Ok) throw std::runtime_error("stable-dt: reference solution overflowed");

  StableDtReport rep;
  rep.ref_norm = inf_norm(u_ref);
  rep.blowup_threshold = spec.blowup_factor * rep.ref_norm;
  for (const auto& pair : spec.pairs)
    rep.rows.push_back(find_largest_stable_dt(t, pair, p, spec.dt_max, spec.levels,
                                              spec.blowup_factor, spec, u_ref));
  return rep;
}

}  // namespace mpark
