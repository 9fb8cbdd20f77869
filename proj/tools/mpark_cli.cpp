// Command-line front end. Everything numerical happens behind the shared
// library's C API; this translation unit only parses flags, assembles the
// JSON sweep configs, and routes outputs.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpark/mpark.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

[[noreturn]] void die_usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(kExitUsage);
}

int report_failure(mpark_status st) {
  std::cerr << "error: " << mpark_status_string(st) << ": " << mpark_last_error() << "\n";
  return st == MPARK_ERR_ARG || st == MPARK_ERR_IO ? kExitUsage : kExitNumerical;
}

// accepts decimals and fractional literals like "1/320"
double parse_dt(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return std::stod(text);
    double num = std::stod(text.substr(0, slash));
    double den = std::stod(text.substr(slash + 1));
    if (den == 0) die_usage("dt denominator is zero: " + text);
    return num / den;
  } catch (const std::exception&) {
    die_usage("cannot parse dt '" + text + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "2^-5..2^-12" expands to the descending power-of-two ladder; otherwise a
// comma list of dt literals
std::vector<double> parse_dt_list(const std::string& text) {
  std::vector<double> dts;
  auto range = text.find("..");
  if (text.rfind("2^-", 0) == 0 && range != std::string::npos) {
    int hi = std::atoi(text.substr(3, range - 3).c_str());
    auto rest = text.substr(range + 2);
    if (rest.rfind("2^-", 0) != 0) die_usage("bad dt range '" + text + "'");
    int lo = std::atoi(rest.substr(3).c_str());
    if (lo < hi) std::swap(lo, hi);
    for (int k = hi; k <= lo; ++k) dts.push_back(std::ldexp(1.0, -k));
    return dts;
  }
  for (const auto& item : split(text, ',')) dts.push_back(parse_dt(item));
  return dts;
}

unsigned long long global_seed(unsigned long long flag_seed, bool seed_set) {
  if (seed_set) return flag_seed;
  if (const char* env = std::getenv("MPARK_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

struct ProblemFlags {
  std::string name = "vdp";
  double alpha = 1.0;
  int nx = 50;
  double lambda_re = -1.0;
  double lambda_im = 0.0;

  json to_json() const {
    json j;
    j["name"] = name;
    if (name == "vdp") j["alpha"] = alpha;
    if (name == "burgers" || name == "heat") j["nx"] = nx;
    if (name == "dahlquist") {
      j["lambda_re"] = lambda_re;
      j["lambda_im"] = lambda_im;
    }
    return j;
  }

  mpark_problem* create() const {
    std::vector<double> params;
    if (name == "vdp") params = {alpha};
    if (name == "burgers" || name == "heat") params = {double(nx)};
    if (name == "dahlquist") params = {lambda_re, lambda_im};
    mpark_problem* p = nullptr;
    mpark_status st =
        mpark_problem_create(name.c_str(), params.data(), int(params.size()), &p);
    if (st != MPARK_OK) {
      std::cerr << "error: " << mpark_last_error() << "\n";
      std::exit(kExitUsage);
    }
    return p;
  }
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& pf) {
  cmd->add_option("--problem", pf.name, "vdp | burgers | dahlquist | heat")->capture_default_str();
  cmd->add_option("--alpha", pf.alpha, "van der Pol stiffness")->capture_default_str();
  cmd->add_option("--nx", pf.nx, "Burgers interior / heat grid points")->capture_default_str();
  cmd->add_option("--lambda", pf.lambda_re, "Dahlquist rate (real part)")->capture_default_str();
  cmd->add_option("--lambda-im", pf.lambda_im, "Dahlquist rate (imaginary part)")
      ->capture_default_str();
}

int print_order_report(const std::string& method, int corrections,
                       const std::string& tableau_file, const std::string& dump_file) {
  mpark_tableau* t = nullptr;
  mpark_status st = tableau_file.empty()
                        ? mpark_tableau_create(method.c_str(), corrections, &t)
                        : mpark_tableau_from_file(tableau_file.c_str(), &t);
  if (st != MPARK_OK) return report_failure(st);

  if (!dump_file.empty()) {
    st = mpark_tableau_write_file(t, dump_file.c_str());
    if (st != MPARK_OK) {
      mpark_tableau_destroy(t);
      return report_failure(st);
    }
  }

  mpark_order_report* rep = nullptr;
  st = mpark_order_report_create(t, &rep);
  if (st != MPARK_OK) {
    mpark_tableau_destroy(t);
    return report_failure(st);
  }

  std::printf("tableau %s: stages=%d corrections=%d design_order=%d\n",
              tableau_file.empty() ? method.c_str() : tableau_file.c_str(),
              mpark_tableau_stages(t), mpark_tableau_corrections(t),
              mpark_tableau_design_order(t));
  const char* last_group = "";
  for (int i = 0; i < mpark_order_report_count(rep); ++i) {
    const char* group = nullptr;
    const char* name = nullptr;
    double value = 0.0;
    mpark_order_report_row(rep, i, &group, &name, &value);
    if (std::string(group) != last_group) {
      std::printf("%s residuals:\n", group);
      last_group = group;
    }
    std::printf("  %-40s % .6e\n", name, value);
  }
  mpark_order_report_destroy(rep);
  mpark_tableau_destroy(t);
  return kExitOk;
}

int run_single(const ProblemFlags& pf, const std::string& method, int corrections,
               const std::string& pair, const std::string& dt_text, int store_every,
               int newton_max_iters, double newton_tol_factor, const std::string& out) {
  double dt = parse_dt(dt_text);
  mpark_problem* p = pf.create();
  double t_final = mpark_problem_t_final(p);
  double steps_d = t_final / dt;
  int steps = int(steps_d + 0.5);
  if (steps < 1 || std::abs(steps * dt - t_final) > 1e-9 * t_final)
    die_usage("dt must divide the final time " + std::to_string(t_final));

  mpark_tableau* t = nullptr;
  mpark_status st = mpark_tableau_create(method.c_str(), corrections, &t);
  if (st != MPARK_OK) {
    mpark_problem_destroy(p);
    return report_failure(st);
  }

  mpark_run_options opts{};
  opts.store_every = store_every;
  opts.newton_max_iters = newton_max_iters;
  opts.newton_tol_factor = newton_tol_factor;

  mpark_run* run = nullptr;
  st = mpark_integrate(t, p, pair.c_str(), dt, steps, &opts, &run);
  int dim = mpark_problem_dim(p);
  int code = kExitOk;
  if (st != MPARK_OK) {
    code = report_failure(st);
  } else if (mpark_run_status(run) != MPARK_OK) {
    std::fprintf(stderr, "run aborted after %d/%d steps: %s\n", mpark_run_steps_completed(run),
                 steps, mpark_status_string(mpark_run_status(run)));
    code = kExitNumerical;
  } else {
    std::vector<double> y(dim);
    mpark_run_final_state(run, y.data());
    std::printf("method=%s corrections=%d pair=%s dt=%.10g steps=%d newton_iters_mean=%.3f\n",
                method.c_str(), corrections, pair.c_str(), dt, steps,
                mpark_run_newton_iters_mean(run));
    std::printf("final state:");
    for (int i = 0; i < std::min(dim, 8); ++i) std::printf(" %.17g", y[i]);
    if (dim > 8) std::printf(" ... (%d components)", dim);
    std::printf("\n");
    if (!out.empty()) {
      std::ofstream f(out + ".state.csv");
      f << "index,value\n";
      for (int i = 0; i < dim; ++i) f << i << "," << std::setprecision(17) << y[i] << "\n";
    }
  }
  if (run) mpark_run_destroy(run);
  mpark_tableau_destroy(t);
  mpark_problem_destroy(p);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mpark: mixed-precision additive Runge-Kutta toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mpark_version()));

  unsigned long long seed = 0;
  bool seed_set = false;
  int threads = 0;
  app.add_option("--seed", seed, "global RNG seed (or env MPARK_SEED, default 0)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads, "worker threads (0 = logical cores)");

  // ---- run ----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "integrate one configuration");
  ProblemFlags run_pf;
  add_problem_flags(run_cmd, run_pf);
  std::string run_method = "imr", run_pair = "f64/f64", run_dt = "1/64", run_out;
  int run_corr = 0, run_store = 0, run_newton_iters = 0;
  double run_tol_factor = 0.0;
  run_cmd->add_option("--method", run_method, "imr | sdirk | novela")->capture_default_str();
  run_cmd->add_option("--corrections", run_corr, "explicit correction count");
  run_cmd->add_option("--pair", run_pair, "precision pair high/low")->capture_default_str();
  run_cmd->add_option("--dt", run_dt, "time step; fractions like 1/320 accepted")
      ->capture_default_str();
  run_cmd->add_option("--store-every", run_store, "snapshot stride (0 = endpoints)");
  run_cmd->add_option("--newton-max-iters", run_newton_iters, "Newton iteration cap");
  run_cmd->add_option("--newton-tol-factor", run_tol_factor, "Newton tolerance factor");
  run_cmd->add_option("-o,--out", run_out, "write <out>.state.csv");

  // ---- converge / efficiency ----------------------------------------------
  auto add_sweep = [&](const char* name, const char* blurb) {
    auto* cmd = app.add_subcommand(name, blurb);
    return cmd;
  };
  struct SweepFlags {
    ProblemFlags pf;
    std::string config, method = "imr", pairs = "f64/f64", dts = "2^-5..2^-10", out, window;
    int corrections = 0, reps = 0, ref_factor = 20;
    bool plot = false;
    bool timing_exclusive = false;
  };
  SweepFlags conv, eff;
  for (auto [cmd_name, fl, blurb] :
       {std::tuple{"converge", &conv, "error-vs-dt sweep with observed orders"},
        std::tuple{"efficiency", &eff, "error-vs-runtime sweep (median of repetitions)"}}) {
    auto* cmd = add_sweep(cmd_name, blurb);
    add_problem_flags(cmd, fl->pf);
    cmd->add_option("--config", fl->config, "JSON sweep config (flags override nothing)");
    cmd->add_option("--method", fl->method, "imr | sdirk | novela")->capture_default_str();
    cmd->add_option("--corrections", fl->corrections, "explicit correction count");
    cmd->add_option("--pairs", fl->pairs, "comma list, e.g. f64/f64,f64/f16")
        ->capture_default_str();
    cmd->add_option("--dts", fl->dts, "comma list or 2^-a..2^-b ladder")->capture_default_str();
    cmd->add_option("--repetitions", fl->reps, "timing repetitions");
    cmd->add_option("--ref-factor", fl->ref_factor, "dt_ref = min(dt)/factor");
    cmd->add_option("--order-window", fl->window, "dt_hi,dt_lo sub-range for the slope fit");
    cmd->add_flag("--plot", fl->plot, "also write an SVG chart");
    cmd->add_flag("--timing-exclusive", fl->timing_exclusive, "serialize cells for timing");
    cmd->add_option("-o,--out", fl->out, "output base path (.csv/.meta.json)");
  }

  // ---- stable-dt ------------------------------------------------------------
  auto* ladder_cmd = app.add_subcommand("stable-dt", "largest stable dt ladder search");
  ProblemFlags lad_pf;
  lad_pf.name = "burgers";
  add_problem_flags(ladder_cmd, lad_pf);
  std::string lad_method = "sdirk", lad_pairs = "f64/f32", lad_out, lad_dt_max = "0.05";
  int lad_corr = 0, lad_levels = 6;
  double lad_blowup = 1e3;
  ladder_cmd->add_option("--method", lad_method)->capture_default_str();
  ladder_cmd->add_option("--corrections", lad_corr);
  ladder_cmd->add_option("--pairs", lad_pairs, "comma list of precision pairs")
      ->capture_default_str();
  ladder_cmd->add_option("--dt-max", lad_dt_max, "top of the power-of-two ladder")
      ->capture_default_str();
  ladder_cmd->add_option("--levels", lad_levels, "ladder rungs")->capture_default_str();
  ladder_cmd->add_option("--blowup-factor", lad_blowup, "error threshold over ||u_ref||")
      ->capture_default_str();
  ladder_cmd->add_option("-o,--out", lad_out, "output base path");

  // ---- stability ------------------------------------------------------------
  auto* stab_cmd = app.add_subcommand("stability", "stochastic linear stability region scan");
  std::string stab_method = "imr", stab_window = "-40:5:-20:20", stab_res = "400x400", stab_out;
  int stab_corr = 0, stab_samples = 16;
  double stab_eps = 1e-6;
  bool stab_plot = false;
  stab_cmd->add_option("--method", stab_method)->capture_default_str();
  stab_cmd->add_option("--corrections", stab_corr);
  stab_cmd->add_option("--eps-tilde", stab_eps, "perturbation level eps/lambda")
      ->capture_default_str();
  stab_cmd->add_option("--window", stab_window, "re_min:re_max:im_min:im_max")
      ->capture_default_str();
  stab_cmd->add_option("--res", stab_res, "grid resolution NXxNY")->capture_default_str();
  stab_cmd->add_option("--samples", stab_samples, "stochastic draws per cell")
      ->capture_default_str();
  stab_cmd->add_flag("--plot", stab_plot, "also write an SVG raster");
  stab_cmd->add_option("-o,--out", stab_out, "output base path")->required();

  // ---- mixed-model ----------------------------------------------------------
  auto* mm_cmd = app.add_subcommand("mixed-model", "heat-equation mixed-model spectral radius");
  int mm_nx = 64, mm_corr = 0;
  std::string mm_sweep = "0.05:1.0:0.05", mm_imp = "dc", mm_exp = "ds", mm_out;
  bool mm_dense = false, mm_plot = false;
  mm_cmd->add_option("--nx", mm_nx)->capture_default_str();
  mm_cmd->add_option("--corrections", mm_corr);
  mm_cmd->add_option("--cfl-sweep", mm_sweep, "min:max:step")->capture_default_str();
  mm_cmd->add_option("--implicit", mm_imp, "dc | ds")->capture_default_str();
  mm_cmd->add_option("--explicit", mm_exp, "dc | ds")->capture_default_str();
  mm_cmd->add_flag("--check-dense", mm_dense, "cross-check with the dense eigensolver");
  mm_cmd->add_flag("--plot", mm_plot);
  mm_cmd->add_option("-o,--out", mm_out, "output base path")->required();

  // ---- sensitivity ----------------------------------------------------------
  auto* sens_cmd = app.add_subcommand("sensitivity", "roundoff sensitivity metric curves");
  std::string sens_methods = "imr,sdirk,novela", sens_z = "-10000:0", sens_out;
  int sens_corr = 0, sens_points = 512;
  bool sens_plot = false;
  sens_cmd->add_option("--methods", sens_methods, "comma list")->capture_default_str();
  sens_cmd->add_option("--corrections", sens_corr, "corrections for imr/sdirk");
  sens_cmd->add_option("--z", sens_z, "z_min:z_max (real)")->capture_default_str();
  sens_cmd->add_option("--points", sens_points)->capture_default_str();
  sens_cmd->add_flag("--plot", sens_plot);
  sens_cmd->add_option("-o,--out", sens_out, "output base path")->required();

  // ---- order-check ----------------------------------------------------------
  auto* order_cmd = app.add_subcommand("order-check", "print order-condition residuals");
  std::string oc_method = "imr", oc_file, oc_dump;
  int oc_corr = 0;
  order_cmd->add_option("--method", oc_method, "imr | sdirk | novela")->capture_default_str();
  order_cmd->add_option("--corrections", oc_corr);
  order_cmd->add_option("--tableau-file", oc_file, "read a serialized tableau instead");
  order_cmd->add_option("--dump-tableau", oc_dump, "write the tableau in text form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const unsigned long long resolved_seed = global_seed(seed, seed_set);

  if (run_cmd->parsed())
    return run_single(run_pf, run_method, run_corr, run_pair, run_dt, run_store, run_newton_iters,
                      run_tol_factor, run_out);

  for (auto [fl, kind] : {std::pair{&conv, "converge"}, std::pair{&eff, "efficiency"}}) {
    auto* cmd = app.get_subcommand(kind);
    if (!cmd->parsed()) continue;
    json cfg;
    if (!fl->config.empty()) {
      std::ifstream in(fl->config);
      if (!in) die_usage("cannot open config " + fl->config);
      try {
        in >> cfg;
      } catch (const std::exception& e) {
        die_usage(std::string("bad config: ") + e.what());
      }
    } else {
      cfg["problem"] = fl->pf.to_json();
      cfg["method"] = {{"name", fl->method}, {"corrections", fl->corrections}};
      json pairs = json::array();
      for (const auto& p : split(fl->pairs, ',')) pairs.push_back(p);
      cfg["pairs"] = pairs;
      cfg["dts"] = parse_dt_list(fl->dts);
      cfg["reference"] = {{"factor", fl->ref_factor}, {"level", "f128"}};
      if (fl->reps > 0) cfg["repetitions"] = fl->reps;
      if (std::string(kind) == "efficiency" && fl->reps == 0) cfg["repetitions"] = 5;
      if (!fl->window.empty()) {
        auto parts = split(fl->window, ',');
        if (parts.size() != 2) die_usage("--order-window wants dt_hi,dt_lo");
        cfg["order_window"] = {parse_dt(parts[0]), parse_dt(parts[1])};
      }
      cfg["seed"] = resolved_seed;
      cfg["threads"] = threads;
      if (fl->timing_exclusive) cfg["timing_exclusive"] = true;
    }
    mpark_report* rep = nullptr;
    mpark_status st = mpark_sweep_run(cfg.dump().c_str(), kind,
                                      fl->out.empty() ? nullptr : fl->out.c_str(),
                                      fl->plot ? 1 : 0, &rep);
    if (st != MPARK_OK) return report_failure(st);
    int rows = mpark_report_rows(rep);
    int bad = 0;
    std::printf("%-8s %-10s %-12s %-14s %-12s %s\n", "method", "pair", "dt", "error", "wall_s",
                "status");
    for (int i = 0; i < rows; ++i) {
      const char *method = nullptr, *pair = nullptr, *status = nullptr;
      double dt = 0, error = 0, wall = 0;
      mpark_report_string(rep, i, "method", &method);
      mpark_report_string(rep, i, "pair", &pair);
      mpark_report_string(rep, i, "status", &status);
      mpark_report_value(rep, i, "dt", &dt);
      mpark_report_value(rep, i, "error", &error);
      mpark_report_value(rep, i, "wall_time_s", &wall);
      std::printf("%-8s %-10s %-12.6g %-14.6g %-12.4g %s\n", method, pair, dt, error, wall,
                  status);
      if (std::string(status) != "ok") ++bad;
    }
    mpark_report_destroy(rep);
    if (!fl->out.empty()) std::printf("wrote %s.csv\n", fl->out.c_str());
    return bad == rows && rows > 0 ? kExitNumerical : kExitOk;
  }

  if (ladder_cmd->parsed()) {
    json cfg;
    cfg["problem"] = lad_pf.to_json();
    cfg["method"] = {{"name", lad_method}, {"corrections", lad_corr}};
    json pairs = json::array();
    for (const auto& p : split(lad_pairs, ',')) pairs.push_back(p);
    cfg["pairs"] = pairs;
    cfg["dt_max"] = parse_dt(lad_dt_max);
    cfg["levels"] = lad_levels;
    cfg["blowup_factor"] = lad_blowup;
    cfg["seed"] = resolved_seed;
    mpark_report* rep = nullptr;
    mpark_status st = mpark_sweep_run(cfg.dump().c_str(), "stable-dt",
                                      lad_out.empty() ? nullptr : lad_out.c_str(), 0, &rep);
    if (st != MPARK_OK) return report_failure(st);
    for (int i = 0; i < mpark_report_rows(rep); ++i) {
      const char* pair = nullptr;
      double dt = 0;
      mpark_report_string(rep, i, "pair", &pair);
      mpark_report_value(rep, i, "largest_stable_dt", &dt);
      if (dt > 0)
        std::printf("%s %s c=%d: largest stable dt = %.10g\n", lad_method.c_str(), pair, lad_corr,
                    dt);
      else
        std::printf("%s %s c=%d: no stable dt on the ladder\n", lad_method.c_str(), pair,
                    lad_corr);
    }
    mpark_report_destroy(rep);
    return kExitOk;
  }

  if (stab_cmd->parsed()) {
    auto w = split(stab_window, ':');
    if (w.size() != 4) die_usage("--window wants re_min:re_max:im_min:im_max");
    double window[4];
    for (int i = 0; i < 4; ++i) window[i] = std::stod(w[i]);
    auto xres = stab_res.find('x');
    if (xres == std::string::npos) die_usage("--res wants NXxNY");
    int nx = std::atoi(stab_res.substr(0, xres).c_str());
    int ny = std::atoi(stab_res.substr(xres + 1).c_str());
    double frac = 0.0;
    mpark_status st = mpark_stability_to_files(stab_method.c_str(), stab_corr, window, nx, ny,
                                               stab_eps, stab_samples, resolved_seed, threads,
                                               stab_out.c_str(), stab_plot ? 1 : 0, &frac);
    if (st != MPARK_OK) return report_failure(st);
    std::printf("stable fraction: %.6f\nwrote %s.csv\n", frac, stab_out.c_str());
    return kExitOk;
  }

  if (mm_cmd->parsed()) {
    auto parts = split(mm_sweep, ':');
    if (parts.size() != 3) die_usage("--cfl-sweep wants min:max:step");
    mpark_status st = mpark_mixed_model_sweep_to_files(
        mm_nx, mm_corr, std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
        mm_imp.c_str(), mm_exp.c_str(), mm_dense ? 1 : 0, mm_out.c_str(), mm_plot ? 1 : 0);
    if (st != MPARK_OK) return report_failure(st);
    std::printf("wrote %s.csv\n", mm_out.c_str());
    return kExitOk;
  }

  if (sens_cmd->parsed()) {
    auto parts = split(sens_z, ':');
    if (parts.size() != 2) die_usage("--z wants z_min:z_max");
    mpark_status st = mpark_sensitivity_to_files(sens_methods.c_str(), sens_corr,
                                                 std::stod(parts[0]), std::stod(parts[1]),
                                                 sens_points, sens_out.c_str(),
                                                 sens_plot ? 1 : 0);
    if (st != MPARK_OK) return report_failure(st);
    std::printf("wrote %s.csv\n", sens_out.c_str());
    return kExitOk;
  }

  if (order_cmd->parsed()) return print_order_report(oc_method, oc_corr, oc_file, oc_dump);

  die_usage("no subcommand");
}
