#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "nwpat/common.hpp"
#include "nwpat/mask.hpp"
#include "nwpat/network_state.hpp"
#include "nwpat/optics.hpp"

namespace nwpat {

struct GTEParams {
  double d_s0_m2_s = 1e-7;      // surface diffusion prefactor
  double e_a_ev = 1.55;         // effective neck pinch-off barrier
  double gamma_j_m2 = 1.2;      // silver surface tension
  double omega_m3 = 1.71e-29;   // atomic volume
  double nu_per_m2 = 1.2e19;    // diffusing atoms per unit surface area
  double delta_ea_da_ev = 0.47; // DA fluxing: activation-energy reduction
  double weld_protection = 0.6; // rate suppression for welded joints

  void validate() const;
};

// Curvatures at a crossing: convex wire surface vs the concave neck.
struct JunctionGeometry {
  double kappa_j_per_m = 0.0;  // signed; negative for a concave neck
  double kappa_nw_per_m = 0.0; // 2/d for a cylinder
  Vec2 axial_unit{1.0, 0.0};   // along the wire, pointing at the junction

  void validate() const;
};

struct AnnealStep {
  double temperature_k = 348.15;
  double duration_s = 180.0;
};

struct ExposeStep {
  std::shared_ptr<const RegionMask> mask;
  double intensity_mw_cm2 = 10.74;
  double duration_s = 480.0;
  Spectrum source_spectrum; // normalized to unit area before use

  double dose_mj_cm2() const { return intensity_mw_cm2 * duration_s; }
};

struct DecorateStep {
  double coverage_fraction = 0.8;
};

// Net surface-diffusion flux toward the junction, signed along axial_unit:
// J = -(Ds(T) gamma Omega nu / (kB T)) (kappa_j - kappa_nw), with
// Ds(T) = d_s0 exp(-e_a / (kB T)). Positive J moves atoms toward the neck.
double gibbs_thomson_flux(const JunctionGeometry& geom, double temperature_k,
                          const GTEParams& p);

// All fitted knobs, frozen by the `calibrate` subcommand into a key = value
// file with a version line.
struct Calibration {
  int version = 1;
  GTEParams gte;

  // Thermal fragmentation: k_break = rate_scale * |J_net| with the DA
  // activation reduction applied inside Ds.
  double rate_scale = 1.2e-3;
  double c_neck = 1.0; // kappa_j = -c_neck / d

  // Fragment stubs (optics bookkeeping).
  double stub_length_diameters = 2.0;
  double stub_thickening = 1.1;

  // Thermal contact sintering during anneals.
  double weld_rate_per_s = 4e6;
  double weld_activation_ev = 0.55;

  // UV exposure: p_weld = 1 - exp(-eta * dose * S * chi_state).
  double eta_per_mj_cm2 = 3.2e-5;
  double chi_dpin = 6.0;
  double chi_da = 16.0;
  double dose_full_mj_cm2 = 10.74 * 480.0;

  // Visibility operating point (records which density maps to the target Rs).
  double vis_density_per_um2 = 0.30;
  double vis_length_mean_um = 10.0;
  double vis_diameter_mean_nm = 50.0;
  double vis_anneal_temp_k = 383.15; // fragmentation anneal for the vis diameter
  double forward_scatter_fraction = 0.30;
  double da_coverage = 0.8;

  void validate() const;
  std::string serialize() const;
  static Calibration parse(const std::string& text, const std::string& origin);
  static Calibration load(const std::string& path);
  void save(const std::string& path) const;
};

// Effective junction geometry from the parent wire diameters.
JunctionGeometry junction_geometry(double diameter_a_nm, double diameter_b_nm,
                                   double c_neck);

// Per-junction break rate for one anneal step, state taken at step start.
double junction_break_rate(const Junction& j, double d_eff_nm, double temperature_k,
                           const Calibration& cal);

// Each PRISTINE junction becomes DA_DECORATED with probability coverage.
void da_decoration(NetworkState& state, double coverage_fraction, std::uint64_t seed);

// Masked UV: junctions inside EXPOSED pixels weld with
// p = 1 - exp(-eta dose S chi) (chi from the state at step start) and then
// lose DA with the incremental-dose hazard; SHADOWED junctions are untouched.
// hg is the unit-peak heat-generation spectrum for the film's wire diameter.
void expose_step(NetworkState& state, const ExposeStep& step, const Spectrum& hg,
                 const Calibration& cal, std::uint64_t seed);

// GTE fragmentation: junction breaks with p = 1 - exp(-k dt),
// k = rate_scale |J_net|, DA lowering the barrier and welds suppressing the
// rate. Surviving unwelded junctions sinter thermally with the Arrhenius
// weld rate. Temperatures outside [290 K, 600 K] are a model-validity error.
void anneal_step(NetworkState& state, const AnnealStep& step, const Calibration& cal,
                 std::uint64_t seed);

} // namespace nwpat
