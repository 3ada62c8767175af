#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nwpat/electrical.hpp"
#include "nwpat/kinetics.hpp"
#include "nwpat/mask.hpp"
#include "nwpat/network_state.hpp"
#include "nwpat/optics.hpp"

namespace nwpat {

using ProcessStep = std::variant<DecorateStep, ExposeStep, AnnealStep>;

struct ProcessRecipe {
  std::vector<ProcessStep> steps;

  // Non-empty; at most one decoration and it precedes any exposure.
  void validate() const;
};

// Everything the process/report operations share: fitted knobs, the silver
// table, cached efficiencies, and the solver configuration.
struct PipelineContext {
  Calibration calibration;
  PermittivityTable permittivity;
  EfficiencyTable efficiencies;
  ElectricalParams electrical;
  std::vector<double> wavelengths_nm;
  double reference_wavelength_nm = 550.0;
  int threads = 0;

  static PipelineContext create(Calibration cal, PermittivityTable table,
                                ElectricalParams elec, std::vector<double> grid,
                                int threads = 0);

  // Unit-peak heat-generation spectrum for the film's mean wire diameter.
  Spectrum hg_for(double diameter_nm) const;
};

// UV source model: band centered at 350 nm, normalized to unit area.
Spectrum make_default_source(const std::vector<double>& grid_nm);

struct SolveLogRow {
  std::string context;
  double rs_ohm_sq = 0.0;
  double r0_ohm_sq = 0.0;
  double ratio = 0.0;
  int iterations = 0;
};

// Left-fold of process steps; census recorded after each step. Step i draws
// from stream derive_stream(state.stream_seed, i).
void run_recipe(NetworkState& state, const ProcessRecipe& recipe,
                const PipelineContext& ctx);

// --- visibility ------------------------------------------------------------

struct VisibilityReport {
  std::vector<double> wavelengths_nm;
  std::vector<double> t_cond, t_insul, h_cond, h_insul;
  double delta_t_points = 0.0; // |t_insul - t_cond| at the reference wavelength, x100
  double delta_h_points = 0.0;
  double rs_cond_ohm_sq = 0.0;
  double insulation_ratio = 0.0;
  double coverage_cond = 0.0;
  double coverage_insul = 0.0;
  bool dense_film_warning = false;
};

// Per-wire projected-area inventories split by mask class; fragment stubs of
// broken junctions carry the thickened diameter.
struct RegionInventories {
  std::vector<InventoryItem> exposed;
  std::vector<InventoryItem> shadowed;
  double area_exposed_um2 = 0.0;
  double area_shadowed_um2 = 0.0;
};

RegionInventories build_inventories(const NetworkState& state, const RegionMask& mask,
                                    const Calibration& cal);

VisibilityReport visibility_report(const NetworkState& state, const RegionMask& mask,
                                   const PipelineContext& ctx,
                                   std::vector<SolveLogRow>* solve_log = nullptr);

// --- fusing-temperature sweep -----------------------------------------------

enum class Variant : std::uint8_t { kRaw, kDpin, kDa, kUvDa };
const char* to_string(Variant v);

struct SweepConfig {
  NetworkParams network; // diameter_mean_nm overridden per sweep entry
  std::vector<double> diameters_nm{17.0, 30.0, 50.0, 90.0};
  std::vector<Variant> variants{Variant::kRaw, Variant::kDpin, Variant::kDa,
                                Variant::kUvDa};
  double temp_lo_k = 300.15;
  double temp_hi_k = 595.15;
  double temp_step_k = 5.0;
  double anneal_duration_s = 180.0;
  int replicas = 3;
  double collapse_ratio = 1e5;
};

struct SweepReplicaRow {
  Variant variant = Variant::kRaw;
  double diameter_nm = 0.0;
  int replica = 0;
  double tf_kelvin = 0.0; // +inf sentinel when no collapse in range
  double r0_ohm_sq = 0.0;
};

struct SweepSummaryRow {
  Variant variant = Variant::kRaw;
  double diameter_nm = 0.0;
  double tf_median_kelvin = 0.0;
  int replicas = 0;
};

struct SweepResult {
  std::vector<SweepReplicaRow> replicas;
  std::vector<SweepSummaryRow> summary;
};

// Applies the variant's preparation steps (decorate / full-field UV) to a
// fresh copy of the replica network.
void prepare_variant(NetworkState& state, Variant variant, const PipelineContext& ctx,
                     std::uint64_t seed);

// Lowest grid temperature with median Rs/R0 above the collapse ratio after a
// fixed anneal. Per replica the anneal draws are coupled across temperatures
// (same step stream), so the broken set grows monotonically with T and the
// grid can be bisected exactly.
SweepResult fusing_temperature_sweep(const SweepConfig& cfg, const PipelineContext& ctx,
                                     std::uint64_t seed);

// --- linewidth resolution ----------------------------------------------------

struct ResolutionConfig {
  NetworkParams network;
  std::vector<double> linewidths_um{50.0, 30.0, 20.0, 10.0};
  int replicas = 100;
  double insulation_threshold = 1e3;
  double da_coverage = 0.8;
  double expose_intensity_mw_cm2 = 10.74;
  double expose_duration_s = 480.0;
  double anneal_temperature_k = 348.15;
  double anneal_duration_s = 180.0;
};

struct ResolutionRow {
  double linewidth_um = 0.0;
  int replicas = 0;
  double percolation_probability = 0.0; // all lines conduct end-to-end
  double insulation_pass_fraction = 0.0;
  bool pass = false; // both fractions >= 0.95
};

std::vector<ResolutionRow> linewidth_resolution_test(const ResolutionConfig& cfg,
                                                     const PipelineContext& ctx,
                                                     std::uint64_t seed);

} // namespace nwpat
