#include "mpark/mpark.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "harness.hpp"
#include "integrator.hpp"
#include "precision.hpp"
#include "problems.hpp"
#include "report.hpp"
#include "stability.hpp"
#include "tableaus.hpp"
#include "version.hpp"

using namespace mpark;

namespace {

thread_local std::string g_last_error;

mpark_status fail(mpark_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

mpark_status from_exception() {
  try {
    throw;
  } catch (const std::invalid_argument& e) {
    return fail(MPARK_ERR_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(MPARK_ERR_IO, e.what());
  } catch (...) {
    return fail(MPARK_ERR_IO, "unknown failure");
  }
}

mpark_status from_solve_status(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return MPARK_OK;
    case SolveStatus::NotConverged: return fail(MPARK_ERR_NOT_CONVERGED, "Newton did not converge");
    case SolveStatus::SingularJacobian: return fail(MPARK_ERR_SINGULAR, "singular matrix");
    case SolveStatus::RangeFault: return fail(MPARK_ERR_RANGE, "overflow at working precision");
  }
  return MPARK_ERR_IO;
}

struct OrderReportRows {
  struct Row {
    std::string group, name;
    double value;
  };
  std::vector<Row> rows;
};

struct ReportImpl {
  // one uniform row table; unset fields are absent from the maps
  struct Row {
    std::vector<std::pair<std::string, double>> nums;
    std::vector<std::pair<std::string, std::string>> strs;
  };
  std::vector<Row> rows;
};

PrecisionLevel need_level(const char* name) {
  if (!name) throw std::invalid_argument("precision level is null");
  auto l = parse_level(name);
  if (!l) throw std::invalid_argument(std::string("unknown precision level '") + name + "'");
  return *l;
}

PrecisionPair need_pair(const char* name) {
  if (!name) throw std::invalid_argument("precision pair is null");
  auto p = parse_pair(name);
  if (!p)
    throw std::invalid_argument(std::string("bad precision pair '") + name +
                                "' (expected e.g. f64/f16 with low <= high)");
  return *p;
}

HeatOp need_heat_op(const char* name) {
  if (name && std::strcmp(name, "dc") == 0) return HeatOp::Centered;
  if (name && std::strcmp(name, "ds") == 0) return HeatOp::Spectral;
  throw std::invalid_argument("heat operator must be 'dc' or 'ds'");
}

const MpTableau* unwrap(const mpark_tableau* t) { return reinterpret_cast<const MpTableau*>(t); }
const OdeProblem* unwrap(const mpark_problem* p) { return reinterpret_cast<const OdeProblem*>(p); }

}  // namespace

extern "C" {

const char* mpark_version(void) { return MPARK_VERSION; }

const char* mpark_status_string(mpark_status s) {
  switch (s) {
    case MPARK_OK: return "ok";
    case MPARK_ERR_ARG: return "invalid argument";
    case MPARK_ERR_NOT_CONVERGED: return "not converged";
    case MPARK_ERR_SINGULAR: return "singular matrix";
    case MPARK_ERR_RANGE: return "range fault";
    case MPARK_ERR_IO: return "io error";
  }
  return "?";
}

const char* mpark_last_error(void) { return g_last_error.c_str(); }

mpark_status mpark_unit_roundoff(const char* level, double* out) {
  try {
    if (!out) return fail(MPARK_ERR_ARG, "out is null");
    *out = unit_roundoff(need_level(level));
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_round(double x, const char* level, int mode, unsigned long long seed,
                         double* out) {
  try {
    if (!out) return fail(MPARK_ERR_ARG, "out is null");
    const FpFormat& fmt = format(need_level(level));
    if (mode == 0) {
      *out = round_to(x, fmt);
    } else {
      uint64_t state = seed;
      *out = round_stochastic(x, fmt, state);
    }
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_tableau_create(const char* method, int corrections, mpark_tableau** out) {
  try {
    if (!out || !method) return fail(MPARK_ERR_ARG, "null argument");
    *out = reinterpret_cast<mpark_tableau*>(new MpTableau(make_tableau(method, corrections)));
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_tableau_from_file(const char* path, mpark_tableau** out) {
  try {
    if (!out || !path) return fail(MPARK_ERR_ARG, "null argument");
    std::FILE* f = std::fopen(path, "rb");
    if (!f) return fail(MPARK_ERR_IO, std::string("cannot open ") + path);
    std::string text;
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    *out = reinterpret_cast<mpark_tableau*>(new MpTableau(tableau_from_text(text)));
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_tableau_write_file(const mpark_tableau* t, const char* path) {
  try {
    if (!t || !path) return fail(MPARK_ERR_ARG, "null argument");
    write_file_atomic(path, tableau_to_text(*unwrap(t)));
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

void mpark_tableau_destroy(mpark_tableau* t) { delete reinterpret_cast<MpTableau*>(t); }

int mpark_tableau_stages(const mpark_tableau* t) { return t ? unwrap(t)->stages : 0; }
int mpark_tableau_corrections(const mpark_tableau* t) { return t ? unwrap(t)->corrections : 0; }
int mpark_tableau_design_order(const mpark_tableau* t) { return t ? unwrap(t)->design_order : 0; }

mpark_status mpark_tableau_coefficients(const mpark_tableau* t, double* A, double* A_eps,
                                        double* b, double* b_eps) {
  if (!t) return fail(MPARK_ERR_ARG, "tableau is null");
  const MpTableau& tb = *unwrap(t);
  size_t n2 = tb.a.size();
  for (size_t i = 0; i < n2; ++i) {
    if (A) A[i] = to_double(tb.a[i]);
    if (A_eps) A_eps[i] = to_double(tb.a_eps[i]);
  }
  for (int i = 0; i < tb.stages; ++i) {
    if (b) b[i] = to_double(tb.b[i]);
    if (b_eps) b_eps[i] = to_double(tb.b_eps[i]);
  }
  return MPARK_OK;
}

mpark_status mpark_order_report_create(const mpark_tableau* t, mpark_order_report** out) {
  try {
    if (!t || !out) return fail(MPARK_ERR_ARG, "null argument");
    OrderReport rep = order_report(*unwrap(t));
    auto* rows = new OrderReportRows;
    for (const auto& [k, v] : rep.scheme) rows->rows.push_back({"scheme", k, v});
    for (const auto& [k, v] : rep.nonsmooth) rows->rows.push_back({"nonsmooth", k, v});
    for (const auto& [k, v] : rep.smooth) rows->rows.push_back({"smooth", k, v});
    *out = reinterpret_cast<mpark_order_report*>(rows);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

void mpark_order_report_destroy(mpark_order_report* r) {
  delete reinterpret_cast<OrderReportRows*>(r);
}

int mpark_order_report_count(const mpark_order_report* r) {
  return r ? static_cast<int>(reinterpret_cast<const OrderReportRows*>(r)->rows.size()) : 0;
}

mpark_status mpark_order_report_row(const mpark_order_report* r, int index, const char** group,
                                    const char** name, double* value) {
  if (!r) return fail(MPARK_ERR_ARG, "report is null");
  const auto& rows = reinterpret_cast<const OrderReportRows*>(r)->rows;
  if (index < 0 || index >= static_cast<int>(rows.size()))
    return fail(MPARK_ERR_ARG, "row index out of range");
  if (group) *group = rows[index].group.c_str();
  if (name) *name = rows[index].name.c_str();
  if (value) *value = rows[index].value;
  return MPARK_OK;
}

mpark_status mpark_order_report_value(const mpark_order_report* r, const char* group,
                                      const char* name, double* value) {
  if (!r || !group || !name || !value) return fail(MPARK_ERR_ARG, "null argument");
  for (const auto& row : reinterpret_cast<const OrderReportRows*>(r)->rows)
    if (row.group == group && row.name == name) {
      *value = row.value;
      return MPARK_OK;
    }
  return fail(MPARK_ERR_ARG, std::string("no residual '") + group + "/" + name + "'");
}

mpark_status mpark_problem_create(const char* name, const double* params, int nparams,
                                  mpark_problem** out) {
  try {
    if (!out || !name) return fail(MPARK_ERR_ARG, "null argument");
    std::string id(name);
    OdeProblem p;
    if (id == "vdp") {
      if (nparams < 1) return fail(MPARK_ERR_ARG, "vdp needs {alpha}");
      p = van_der_pol(params[0]);
    } else if (id == "burgers") {
      if (nparams < 1) return fail(MPARK_ERR_ARG, "burgers needs {nx}");
      p = viscous_burgers(static_cast<int>(params[0]));
    } else if (id == "dahlquist") {
      if (nparams < 1) return fail(MPARK_ERR_ARG, "dahlquist needs {re[, im]}");
      p = dahlquist(std::complex<double>(params[0], nparams > 1 ? params[1] : 0.0));
    } else if (id == "heat") {
      if (nparams < 1) return fail(MPARK_ERR_ARG, "heat needs {nx}");
      p = heat_spectral(static_cast<int>(params[0]));
    } else {
      return fail(MPARK_ERR_ARG,
                  "unknown problem '" + id + "' (expected vdp|burgers|dahlquist|heat)");
    }
    *out = reinterpret_cast<mpark_problem*>(new OdeProblem(std::move(p)));
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

void mpark_problem_destroy(mpark_problem* p) { delete reinterpret_cast<OdeProblem*>(p); }

int mpark_problem_dim(const mpark_problem* p) { return p ? unwrap(p)->dim : 0; }
double mpark_problem_t_final(const mpark_problem* p) { return p ? unwrap(p)->t_final : 0.0; }

mpark_status mpark_problem_initial_state(const mpark_problem* p, double* y0) {
  if (!p || !y0) return fail(MPARK_ERR_ARG, "null argument");
  const OdeProblem& prob = *unwrap(p);
  for (int i = 0; i < prob.dim; ++i) y0[i] = to_double(prob.y0[i]);
  return MPARK_OK;
}

mpark_status mpark_problem_rhs(const mpark_problem* p, const double* y, double* f,
                               const char* level) {
  try {
    if (!p || !y || !f) return fail(MPARK_ERR_ARG, "null argument");
    const OdeProblem& prob = *unwrap(p);
    auto out = eval_low(prob, std::span<const double>(y, prob.dim), need_level(level));
    for (int i = 0; i < prob.dim; ++i) f[i] = out[i];
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_integrate(const mpark_tableau* t, const mpark_problem* p, const char* pair,
                             double dt, int steps, const mpark_run_options* options,
                             mpark_run** out) {
  try {
    if (!t || !p || !out) return fail(MPARK_ERR_ARG, "null argument");
    const OdeProblem& prob = *unwrap(p);
    IntegratorConfig cfg;
    cfg.pair = need_pair(pair);
    cfg.dt = dt;
    cfg.steps = steps;
    if (options) {
      if (options->store_every > 0) cfg.store_every = options->store_every;
      if (options->newton_max_iters > 0) cfg.newton_max_iters = options->newton_max_iters;
      if (options->newton_tol_factor > 0) cfg.newton_tol_factor = options->newton_tol_factor;
      if (options->feps_injection)
        cfg.feps_injection.assign(options->feps_injection, options->feps_injection + prob.dim);
    }
    auto* traj = new Trajectory(integrate(prob, *unwrap(t), cfg));
    *out = reinterpret_cast<mpark_run*>(traj);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

void mpark_run_destroy(mpark_run* r) { delete reinterpret_cast<Trajectory*>(r); }

mpark_status mpark_run_status(const mpark_run* r) {
  if (!r) return MPARK_ERR_ARG;
  switch (reinterpret_cast<const Trajectory*>(r)->status) {
    case SolveStatus::Ok: return MPARK_OK;
    case SolveStatus::NotConverged: return MPARK_ERR_NOT_CONVERGED;
    case SolveStatus::SingularJacobian: return MPARK_ERR_SINGULAR;
    case SolveStatus::RangeFault: return MPARK_ERR_RANGE;
  }
  return MPARK_ERR_IO;
}

int mpark_run_steps_completed(const mpark_run* r) {
  return r ? reinterpret_cast<const Trajectory*>(r)->steps_completed : 0;
}

double mpark_run_newton_iters_mean(const mpark_run* r) {
  return r ? reinterpret_cast<const Trajectory*>(r)->newton_iters_mean() : 0.0;
}

mpark_status mpark_run_final_state(const mpark_run* r, double* y) {
  if (!r || !y) return fail(MPARK_ERR_ARG, "null argument");
  const auto& states = reinterpret_cast<const Trajectory*>(r)->states;
  if (states.empty()) return fail(MPARK_ERR_ARG, "run holds no states");
  const auto& last = states.back();
  for (size_t i = 0; i < last.size(); ++i) y[i] = to_double(last[i]);
  return MPARK_OK;
}

mpark_status mpark_rk4_reference(const mpark_problem* p, double dt_ref, const char* level,
                                 double* y) {
  try {
    if (!p || !y) return fail(MPARK_ERR_ARG, "null argument");
    SolveStatus st = SolveStatus::Ok;
    auto ref = rk4_reference(*unwrap(p), dt_ref, need_level(level), &st);
    if (st != SolveStatus::Ok) return from_solve_status(st);
    for (size_t i = 0; i < ref.size(); ++i) y[i] = to_double(ref[i]);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_psi_eps(const mpark_tableau* t, double z_re, double z_im, double eps_tilde,
                           const double* tau, double* out_re, double* out_im) {
  try {
    if (!t || !out_re || !out_im) return fail(MPARK_ERR_ARG, "null argument");
    const MpTableau& tb = *unwrap(t);
    std::vector<double> tv(tb.stages, 0.0);
    if (tau) tv.assign(tau, tau + tb.stages);
    SolveStatus st = SolveStatus::Ok;
    Cplx psi = psi_eps(tb, Cplx(z_re, z_im), eps_tilde, tv, &st);
    if (st != SolveStatus::Ok) return from_solve_status(st);
    *out_re = psi.real();
    *out_im = psi.imag();
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_stability_region(const mpark_tableau* t, const double window[4], int nx, int ny,
                                    double eps_tilde, int samples, unsigned long long seed,
                                    int threads, unsigned char* cells, double* stable_fraction) {
  try {
    if (!t || !window) return fail(MPARK_ERR_ARG, "null argument");
    StabilityGridSpec spec;
    spec.re_min = window[0];
    spec.re_max = window[1];
    spec.im_min = window[2];
    spec.im_max = window[3];
    spec.nx = nx;
    spec.ny = ny;
    spec.eps_tilde = eps_tilde;
    spec.samples = samples;
    spec.seed = seed;
    spec.threads = threads;
    StabilityGrid grid = stability_region(*unwrap(t), spec);
    if (cells) std::memcpy(cells, grid.cells.data(), grid.cells.size());
    if (stable_fraction) *stable_fraction = grid.stable_fraction();
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_mixed_model_radius(int nx, int corrections, double cfl, const char* implicit_op,
                                      const char* explicit_op, int dense, double* rho) {
  try {
    if (!rho) return fail(MPARK_ERR_ARG, "rho is null");
    MixedModelSpec spec;
    spec.nx = nx;
    spec.corrections = corrections;
    spec.cfl = cfl;
    spec.implicit_op = need_heat_op(implicit_op);
    spec.explicit_op = need_heat_op(explicit_op);
    *rho = dense ? mixed_model_radius_dense(spec) : mixed_model_radius(spec);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_sensitivity_metric(const mpark_tableau* t, double z, double* out) {
  try {
    if (!t || !out) return fail(MPARK_ERR_ARG, "null argument");
    SolveStatus st = SolveStatus::Ok;
    *out = sensitivity_metric(*unwrap(t), z, &st);
    if (st != SolveStatus::Ok) return from_solve_status(st);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_imr_perturbation_gain(double z, int corrections, double* out) {
  try {
    if (!out) return fail(MPARK_ERR_ARG, "out is null");
    if (corrections < 0) return fail(MPARK_ERR_ARG, "corrections must be >= 0");
    *out = closed_form_imr_perturbation(z, corrections);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_roundoff_growth_bound(const mpark_tableau* t, double z, double eps, int n_steps,
                                         double dt, int model, double* out) {
  try {
    if (!t || !out) return fail(MPARK_ERR_ARG, "null argument");
    if (n_steps < 0) return fail(MPARK_ERR_ARG, "n_steps must be >= 0");
    SolveStatus st = SolveStatus::Ok;
    *out = roundoff_growth_bound(*unwrap(t), z, eps, n_steps, dt,
                                 model ? GrowthModel::PerStepEps : GrowthModel::PerStepEpsDt, &st);
    if (st != SolveStatus::Ok)
      return st == SolveStatus::RangeFault
                 ? fail(MPARK_ERR_RANGE, "scheme unstable at z: |1 + Psi e| > 1")
                 : from_solve_status(st);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_sweep_run(const char* config_json, const char* kind, const char* out_base,
                             int plot, mpark_report** out) {
  try {
    if (!config_json || !kind) return fail(MPARK_ERR_ARG, "null argument");
    SweepSpec spec = sweep_from_json(config_json);
    std::string k(kind);
    auto* rep = new ReportImpl;
    if (k == "converge" || k == "efficiency") {
      ConvergenceReport r = k == "converge" ? run_convergence(spec) : run_efficiency(spec);
      for (const auto& row : r.rows) {
        ReportImpl::Row out_row;
        out_row.strs = {{"method", row.method}, {"pair", row.pair}, {"status", row.status}};
        out_row.nums = {{"corrections", double(row.corrections)},
                        {"dt", row.dt},
                        {"error", row.error},
                        {"wall_time_s", row.wall_s},
                        {"newton_iters_mean", row.newton_iters_mean},
                        {"dt_ref", r.dt_ref},
                        {"ref_self_check", r.ref_self_check}};
        for (const auto& [pair, slope] : r.observed_orders)
          if (pair == row.pair) out_row.nums.emplace_back("observed_order", slope);
        rep->rows.push_back(std::move(out_row));
      }
      if (out_base) write_convergence_artifacts(out_base, spec, r, k == "efficiency", plot != 0);
    } else if (k == "stable-dt") {
      StableDtReport r = run_stable_dt(spec);
      for (const auto& row : r.rows) {
        ReportImpl::Row out_row;
        std::string ladder;
        for (size_t i = 0; i < row.ladder.size(); ++i) {
          if (i) ladder += ";";
          ladder += std::to_string(row.ladder[i].first) + ":" + row.ladder[i].second;
        }
        out_row.strs = {{"method", row.method}, {"pair", row.pair}, {"ladder", ladder}};
        out_row.nums = {{"corrections", double(row.corrections)},
                        {"largest_stable_dt", row.largest_dt}};
        rep->rows.push_back(std::move(out_row));
      }
      if (out_base) write_stable_dt_artifacts(out_base, spec, r);
    } else {
      delete rep;
      return fail(MPARK_ERR_ARG, "kind must be converge|efficiency|stable-dt");
    }
    if (out) {
      *out = reinterpret_cast<mpark_report*>(rep);
    } else {
      delete rep;
    }
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

void mpark_report_destroy(mpark_report* r) { delete reinterpret_cast<ReportImpl*>(r); }

int mpark_report_rows(const mpark_report* r) {
  return r ? static_cast<int>(reinterpret_cast<const ReportImpl*>(r)->rows.size()) : 0;
}

mpark_status mpark_report_value(const mpark_report* r, int row, const char* field, double* out) {
  if (!r || !field || !out) return fail(MPARK_ERR_ARG, "null argument");
  const auto& rows = reinterpret_cast<const ReportImpl*>(r)->rows;
  if (row < 0 || row >= static_cast<int>(rows.size()))
    return fail(MPARK_ERR_ARG, "row out of range");
  for (const auto& [k, v] : rows[row].nums)
    if (k == field) {
      *out = v;
      return MPARK_OK;
    }
  return fail(MPARK_ERR_ARG, std::string("no numeric field '") + field + "'");
}

mpark_status mpark_report_string(const mpark_report* r, int row, const char* field,
                                 const char** out) {
  if (!r || !field || !out) return fail(MPARK_ERR_ARG, "null argument");
  const auto& rows = reinterpret_cast<const ReportImpl*>(r)->rows;
  if (row < 0 || row >= static_cast<int>(rows.size()))
    return fail(MPARK_ERR_ARG, "row out of range");
  for (const auto& [k, v] : rows[row].strs)
    if (k == field) {
      *out = v.c_str();
      return MPARK_OK;
    }
  return fail(MPARK_ERR_ARG, std::string("no string field '") + field + "'");
}

mpark_status mpark_stability_to_files(const char* method, int corrections, const double window[4],
                                      int nx, int ny, double eps_tilde, int samples,
                                      unsigned long long seed, int threads, const char* out_base,
                                      int plot, double* stable_fraction) {
  try {
    if (!method || !window || !out_base) return fail(MPARK_ERR_ARG, "null argument");
    MpTableau t = make_tableau(method, corrections);
    StabilityGridSpec spec;
    spec.re_min = window[0];
    spec.re_max = window[1];
    spec.im_min = window[2];
    spec.im_max = window[3];
    spec.nx = nx;
    spec.ny = ny;
    spec.eps_tilde = eps_tilde;
    spec.samples = samples;
    spec.seed = seed;
    spec.threads = threads;
    StabilityGrid grid = stability_region(t, spec);
    write_stability_artifacts(out_base, method, corrections, grid, plot != 0);
    if (stable_fraction) *stable_fraction = grid.stable_fraction();
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_mixed_model_sweep_to_files(int nx, int corrections, double cfl_min,
                                              double cfl_max, double cfl_step,
                                              const char* implicit_op, const char* explicit_op,
                                              int dense, const char* out_base, int plot) {
  try {
    if (!out_base) return fail(MPARK_ERR_ARG, "out_base is null");
    if (!(cfl_step > 0) || !(cfl_max >= cfl_min))
      return fail(MPARK_ERR_ARG, "cfl sweep must satisfy min <= max, step > 0");
    MixedModelSpec spec;
    spec.nx = nx;
    spec.corrections = corrections;
    spec.implicit_op = need_heat_op(implicit_op);
    spec.explicit_op = need_heat_op(explicit_op);
    std::vector<MixedModelRow> rows;
    for (double cfl = cfl_min; cfl <= cfl_max + 1e-12; cfl += cfl_step) {
      spec.cfl = cfl;
      MixedModelRow r;
      r.cfl = cfl;
      r.rho = mixed_model_radius(spec);
      if (dense) r.rho_dense = mixed_model_radius_dense(spec);
      rows.push_back(r);
    }
    write_mixed_model_artifacts(out_base, spec, rows, plot != 0);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

mpark_status mpark_sensitivity_to_files(const char* methods, int corrections, double z_min,
                                        double z_max, int points, const char* out_base,
                                        int plot) {
  try {
    if (!methods || !out_base) return fail(MPARK_ERR_ARG, "null argument");
    if (points < 2) return fail(MPARK_ERR_ARG, "points must be >= 2");
    if (!(z_max >= z_min)) return fail(MPARK_ERR_ARG, "z range must satisfy min <= max");
    std::vector<SensitivityCurve> curves;
    std::string list(methods);
    size_t pos = 0;
    while (pos < list.size()) {
      size_t comma = list.find(',', pos);
      std::string name = list.substr(pos, comma == std::string::npos ? comma : comma - pos);
      pos = comma == std::string::npos ? list.size() : comma + 1;
      if (name.empty()) continue;
      int c = name == "novela" ? 0 : corrections;
      MpTableau t = make_tableau(name, c);
      SensitivityCurve curve;
      curve.label = name + "+c" + std::to_string(c);
      for (int i = 0; i < points; ++i) {
        double z = z_min + (z_max - z_min) * i / (points - 1);
        SolveStatus st = SolveStatus::Ok;
        double m = sensitivity_metric(t, z, &st);
        if (st == SolveStatus::Ok) curve.z_metric.emplace_back(z, m);
      }
      curves.push_back(std::move(curve));
    }
    write_sensitivity_artifacts(out_base, curves, plot != 0);
    return MPARK_OK;
  } catch (...) {
    return from_exception();
  }
}

}  // extern "C"
