#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nwpat/electrical.hpp"
#include "nwpat/netgen.hpp"
#include "nwpat/pipeline.hpp"

namespace nwpat {

struct ParseIssue {
  int line = 0; // 0 when the issue is not tied to a line
  std::string message;
};

// One recipe step as written in the config; resolved against the loaded mask
// and wavelength grid by build_recipe.
struct StepSpec {
  std::string kind; // decorate | expose | anneal
  std::map<std::string, double> args;

  bool operator==(const StepSpec&) const = default;
};

struct RunConfig {
  NetworkParams network; // network.seed is derived from run.seed per replica
  ElectricalParams electrical;

  std::string calibration_path;     // empty: built-in defaults
  std::string mask_path;            // empty: commands that need one will say so
  std::string permittivity_path = "data/ag_permittivity.csv";
  std::string source_spectrum_path; // empty: analytic 350 nm band

  double lambda_min_nm = 300.0;
  double lambda_max_nm = 800.0;
  double lambda_step_nm = 5.0;
  double reference_wavelength_nm = 550.0;

  std::vector<StepSpec> recipe;

  std::string output_dir = "out";
  int replicas = 1;
  std::uint64_t seed = 1;
  int threads = 0; // 0: hardware concurrency

  // sweep-tf
  std::vector<double> sweep_diameters_nm{17.0, 30.0, 50.0, 90.0};
  double sweep_temp_lo_c = 30.0;
  double sweep_temp_hi_c = 320.0;
  double sweep_temp_step_c = 5.0;
  int sweep_replicas = 3;

  // resolution-test
  std::vector<double> resolution_linewidths_um{50.0, 30.0, 20.0, 10.0};
  int resolution_replicas = 100;

  bool operator==(const RunConfig&) const = default;
};

struct ConfigParseResult {
  std::optional<RunConfig> config; // set only when errors is empty
  std::vector<ParseIssue> errors;  // all problems, not first-error-only
};

// Line-oriented `section.key = value` text; `#` starts a comment. Collects
// every error (unknown key, type mismatch, duplicate key) with line numbers.
ConfigParseResult parse_config(const std::string& text);

// Canonical form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

// Parse + referenced-file existence check; throws ValidationError with the
// full error list joined.
RunConfig load_config_file(const std::string& path);

// Resolves step specs into executable steps (mask, source spectrum, unit
// conversions already applied by the parser).
ProcessRecipe build_recipe(const RunConfig& config,
                           std::shared_ptr<const RegionMask> mask,
                           const Spectrum& default_source);

} // namespace nwpat
