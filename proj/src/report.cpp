#include "report.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "svg.hpp"
#include "version.hpp"

namespace mpark {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json conventions_json() {
  json c;
  c["error_norm"] = "max norm at t_final, both solutions widened to f128";
  c["newton_tolerance"] =
      "tol_factor * unit_roundoff(level) * (1 + |y| + |cdt*F(y)| + ||cdt*J|*|y||), max norms";
  c["recast"] = "implicit stage solves run at the low level; results promote bit-exactly";
  c["feps_offdiagonal"] = "low-precision re-evaluation of the promoted stage value";
  c["rounding"] = "round-to-nearest-even everywhere; stochastic rounding only in stability scans";
  json u;
  for (auto level : {PrecisionLevel::Half, PrecisionLevel::Single, PrecisionLevel::Double,
                     PrecisionLevel::Extended})
    u[format(level).name] = format(level).unit_roundoff;
  c["unit_roundoffs"] = u;
  return c;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    size_t n = std::fwrite(content.data(), 1, content.size(), f);
    std::fclose(f);
    if (n != content.size()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string meta_json(const std::string& command, const std::string& resolved_config) {
  json j;
  j["tool"] = "mpark";
  j["version"] = MPARK_VERSION;
  j["command"] = command;
  j["config"] = json::parse(resolved_config);
  j["conventions"] = conventions_json();
  return j.dump(2) + "\n";
}

void write_convergence_artifacts(const std::string& base, const SweepSpec& spec,
                                 const ConvergenceReport& rep, bool efficiency, bool plot) {
  std::ostringstream csv;
  csv << "method,corrections,pair,dt,error,wall_time_s,status,newton_iters_mean\n";
  for (const auto& r : rep.rows)
    csv << r.method << "," << r.corrections << "," << r.pair << "," << num(r.dt) << ","
        << num(r.error) << "," << num(r.wall_s) << "," << r.status << ","
        << num(r.newton_iters_mean) << "\n";
  write_file_atomic(base + ".csv", csv.str());

  json meta = json::parse(meta_json(efficiency ? "efficiency" : "converge", sweep_to_json(spec)));
  meta["dt_ref"] = rep.dt_ref;
  meta["ref_self_check"] = rep.ref_self_check;
  json orders;
  for (const auto& [pair, slope] : rep.observed_orders) orders[pair] = slope;
  meta["observed_orders"] = orders;
  write_file_atomic(base + ".meta.json", meta.dump(2) + "\n");

  if (plot) {
    SvgChartSpec cs;
    cs.title = spec.method + " on " + spec.problem.name +
               (efficiency ? " (error vs runtime)" : " (error vs dt)");
    cs.x_label = efficiency ? "wall time [s]" : "dt";
    cs.y_label = "max error";
    std::vector<SvgSeries> series;
    for (const auto& pr : spec.pairs) {
      SvgSeries s;
      s.label = pr.str();
      for (const auto& r : rep.rows)
        if (r.pair == pr.str() && r.status == "ok")
          s.points.emplace_back(efficiency ? r.wall_s : r.dt, r.error);
      series.push_back(std::move(s));
    }
    write_file_atomic(base + ".svg", svg_chart(cs, series));
  }
}

void write_stable_dt_artifacts(const std::string& base, const SweepSpec& spec,
                               const StableDtReport& rep) {
  std::ostringstream csv;
  csv << "method,corrections,pair,largest_stable_dt,ladder\n";
  for (const auto& r : rep.rows) {
    csv << r.method << "," << r.corrections << "," << r.pair << ","
        << (r.largest_dt > 0 ? num(r.largest_dt) : "none") << ",";
    for (size_t i = 0; i < r.ladder.size(); ++i) {
      if (i) csv << ";";
      csv << num(r.ladder[i].first) << ":" << r.ladder[i].second;
    }
    csv << "\n";
  }
  write_file_atomic(base + ".csv", csv.str());

  json meta = json::parse(meta_json("stable-dt", sweep_to_json(spec)));
  meta["ref_norm"] = rep.ref_norm;
  meta["blowup_threshold"] = rep.blowup_threshold;
  write_file_atomic(base + ".meta.json", meta.dump(2) + "\n");
}

void write_stability_artifacts(const std::string& base, const std::string& method,
                               int corrections, const StabilityGrid& grid, bool plot) {
  const auto& s = grid.spec;
  std::ostringstream csv;
  csv << "i,j,re,im,stable\n";
  for (int j = 0; j < s.ny; ++j)
    for (int i = 0; i < s.nx; ++i) {
      double re = s.re_min + (s.re_max - s.re_min) * i / (s.nx - 1);
      double im = s.im_min + (s.im_max - s.im_min) * j / (s.ny - 1);
      csv << i << "," << j << "," << num(re) << "," << num(im) << ","
          << int(grid.cells[static_cast<size_t>(j) * s.nx + i]) << "\n";
    }
  write_file_atomic(base + ".csv", csv.str());

  json cfg;
  cfg["method"] = method;
  cfg["corrections"] = corrections;
  cfg["window"] = {s.re_min, s.re_max, s.im_min, s.im_max};
  cfg["resolution"] = {s.nx, s.ny};
  cfg["eps_tilde"] = s.eps_tilde;
  cfg["samples"] = s.samples;
  cfg["seed"] = s.seed;
  json meta = json::parse(meta_json("stability", cfg.dump()));
  meta["stable_fraction"] = grid.stable_fraction();
  write_file_atomic(base + ".meta.json", meta.dump(2) + "\n");

  if (plot) {
    std::ostringstream title;
    title << method << " c=" << corrections << " eps_tilde=" << s.eps_tilde;
    write_file_atomic(base + ".svg", svg_raster(title.str(), grid.cells, s.nx, s.ny, s.re_min,
                                                s.re_max, s.im_min, s.im_max));
  }
}

void write_mixed_model_artifacts(const std::string& base, const MixedModelSpec& spec,
                                 const std::vector<MixedModelRow>& rows, bool plot) {
  std::ostringstream csv;
  csv << "cfl,rho,rho_dense\n";
  for (const auto& r : rows) {
    csv << num(r.cfl) << "," << num(r.rho) << ",";
    if (r.rho_dense >= 0) csv << num(r.rho_dense);
    csv << "\n";
  }
  write_file_atomic(base + ".csv", csv.str());

  json cfg;
  cfg["nx"] = spec.nx;
  cfg["corrections"] = spec.corrections;
  cfg["implicit_op"] = spec.implicit_op == HeatOp::Centered ? "dc" : "ds";
  cfg["explicit_op"] = spec.explicit_op == HeatOp::Centered ? "dc" : "ds";
  write_file_atomic(base + ".meta.json", meta_json("mixed-model", cfg.dump()));

  if (plot) {
    SvgChartSpec cs;
    cs.title = "mixed-model spectral radius";
    cs.x_label = "CFL = dt/dx^2";
    cs.y_label = "rho(P)";
    cs.log_x = false;
    cs.log_y = true;
    SvgSeries s;
    s.label = "rho";
    for (const auto& r : rows) s.points.emplace_back(r.cfl, r.rho);
    write_file_atomic(base + ".svg", svg_chart(cs, {s}));
  }
}

void write_sensitivity_artifacts(const std::string& base,
                                 const std::vector<SensitivityCurve>& curves, bool plot) {
  std::ostringstream csv;
  csv << "method,z,metric\n";
  for (const auto& c : curves)
    for (auto [z, m] : c.z_metric) csv << c.label << "," << num(z) << "," << num(m) << "\n";
  write_file_atomic(base + ".csv", csv.str());

  json cfg;
  cfg["curves"] = json::array();
  for (const auto& c : curves) cfg["curves"].push_back(c.label);
  write_file_atomic(base + ".meta.json", meta_json("sensitivity", cfg.dump()));

  if (plot) {
    SvgChartSpec cs;
    cs.title = "roundoff sensitivity |Psi| A_eps e";
    cs.x_label = "-z";
    cs.y_label = "metric";
    cs.log_x = true;
    cs.log_y = true;
    std::vector<SvgSeries> series;
    for (const auto& c : curves) {
      SvgSeries s;
      s.label = c.label;
      for (auto [z, m] : c.z_metric) s.points.emplace_back(-z, m);
      series.push_back(std::move(s));
    }
    write_file_atomic(base + ".svg", svg_chart(cs, series));
  }
}

}  // namespace mpark
