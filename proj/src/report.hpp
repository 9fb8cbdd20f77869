#pragma once

// File emission for every artifact the toolkit produces: CSV tables, the
// per-run metadata JSON, and optional SVG plots. All writes go through a
// temp file plus rename, so re-running a config replaces outputs atomically.

#include <string>

#include "harness.hpp"
#include "stability.hpp"

namespace mpark {

// <base>.csv, <base>.meta.json, optionally <base>.svg
void write_convergence_artifacts(const std::string& base, const SweepSpec& spec,
                                 const ConvergenceReport& rep, bool efficiency, bool plot);

void write_stable_dt_artifacts(const std::string& base, const SweepSpec& spec,
                               const StableDtReport& rep);

void write_stability_artifacts(const std::string& base, const std::string& method,
                               int corrections, const StabilityGrid& grid, bool plot);

struct MixedModelRow {
  double cfl = 0.0;
  double rho = 0.0;
  double rho_dense = -1.0;  // < 0 when the dense check was not requested
};

void write_mixed_model_artifacts(const std::string& base, const MixedModelSpec& spec,
                                 const std::vector<MixedModelRow>& rows, bool plot);

struct SensitivityCurve {
  std::string label;  // "method+corrections"
  std::vector<std::pair<double, double>> z_metric;
};

void write_sensitivity_artifacts(const std::string& base,
                                 const std::vector<SensitivityCurve>& curves, bool plot);

// Writes content to path atomically (temp file in the same directory, then
// rename). Throws std::runtime_error on IO failure.
void write_file_atomic(const std::string& path, const std::string& content);

// Shared metadata block: tool version, conventions, effective unit roundoffs.
std::string meta_json(const std::string& command, const std::string& resolved_config);

}  // namespace mpark
