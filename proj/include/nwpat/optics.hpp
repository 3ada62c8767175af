#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nwpat/common.hpp"

namespace nwpat {

// Tabulated complex permittivity on a strictly increasing wavelength grid.
// Queries clamp to the table ends; a single-row table acts as a constant.
class PermittivityTable {
public:
  static PermittivityTable load_csv(const std::string& path);
  static PermittivityTable parse_csv(const std::string& text, const std::string& origin);
  static PermittivityTable from_rows(std::vector<double> wavelengths_nm,
                                     std::vector<std::complex<double>> eps);

  std::complex<double> eps_at(double wavelength_nm) const;
  const std::vector<double>& wavelengths() const { return wavelengths_nm_; }
  std::size_t size() const { return wavelengths_nm_.size(); }

private:
  std::vector<double> wavelengths_nm_;
  std::vector<std::complex<double>> eps_;
};

struct Spectrum {
  std::vector<double> wavelengths_nm;
  std::vector<double> values;
  std::string units = "arb";

  void validate() const;
  double value_at(double wavelength_nm) const; // linear interpolation, clamped
  double trapezoid_area() const;
  Spectrum& normalize_area(); // unit integral over the grid
  Spectrum& normalize_peak(); // unit maximum
};

// Trapezoid of a(lambda)*b(lambda) on a's grid; b is interpolated.
double spectral_overlap(const Spectrum& a, const Spectrum& b);

struct MieEfficiencies {
  double q_ext = 0.0;
  double q_sca = 0.0;
  double q_abs = 0.0;
};

// Normal-incidence infinite-cylinder Mie efficiencies, unpolarized TE/TM
// average. Series runs to m_max = ceil(x + 4 x^(1/3) + 2); the residual term
// at m_max + 5 must be below 1e-12 or a ModelError is raised. extra_terms
// extends the truncation (used by the refinement-stability check).
MieEfficiencies mie_cylinder(double diameter_nm, double wavelength_nm,
                             std::complex<double> eps, int extra_terms = 0);

// q = (omega/2) Im(eps) |E|^2, omega = 2 pi c / lambda. Arbitrary units.
double heat_density(double e_magnitude, double wavelength_nm, std::complex<double> eps);

// Photothermal heating proxy: q_abs(lambda) * (omega/2) Im(eps), rescaled to
// unit peak. Circular-cylinder surrogate for the junction-coupled result; it
// shows a single transverse resonance where the real wire shows two.
Spectrum heat_generation_spectrum(double diameter_nm, const PermittivityTable& table,
                                  const std::vector<double>& wavelengths_nm);

// Efficiencies precomputed on a diameter x wavelength grid with bilinear
// interpolation; region optics evaluates thousands of inventory items.
class EfficiencyTable {
public:
  EfficiencyTable() = default;
  EfficiencyTable(const PermittivityTable& table, std::vector<double> diameters_nm,
                  std::vector<double> wavelengths_nm);

  MieEfficiencies at(double diameter_nm, double wavelength_nm) const;
  const std::vector<double>& wavelengths() const { return wavelengths_nm_; }
  const std::vector<double>& diameters() const { return diameters_nm_; }

private:
  std::vector<double> diameters_nm_;
  std::vector<double> wavelengths_nm_;
  std::vector<MieEfficiencies> grid_; // row-major [diameter][wavelength]
};

// One projected-area entry of a region: a wire piece, or a fragment stub
// (stubs carry the parent diameter times the thickening factor).
struct InventoryItem {
  double diameter_nm = 0.0;
  double length_um = 0.0;
};

struct RegionOptics {
  std::vector<double> wavelengths_nm;
  std::vector<double> transmittance;
  std::vector<double> haze;
  double coverage = 0.0; // sum(d*l)/A
  bool dense_film_warning = false;
};

// Beer-Lambert layered model: A = 1-exp(-tau_abs), S = 1-exp(-tau_sca),
// T = (1-A)(1-S) + (1-A) S f_fwd, H = (1-A) S f_fwd / T. Optical depths sum
// d*l*q/A per item so mixed diameters are handled.
RegionOptics region_transmittance_haze(const std::vector<InventoryItem>& inventory,
                                       const EfficiencyTable& efficiencies,
                                       const std::vector<double>& wavelengths_nm,
                                       double region_area_um2, double forward_fraction);

std::vector<double> make_wavelength_grid(double min_nm, double max_nm, double step_nm);

} // namespace nwpat
