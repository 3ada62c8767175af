#pragma once

#include <limits>
#include <vector>

#include "nwpat/common.hpp"
#include "nwpat/topology.hpp"

namespace nwpat {

struct ElectricalParams {
  double resistivity_eff_ohm_m = 22e-9; // effective nanowire resistivity
  double r_contact_pristine_ohm = 2000.0;
  double r_contact_da_ohm = 2000.0;
  double r_contact_welded_ohm = 150.0;
  double solver_tolerance = 1e-10; // relative residual
  int max_iterations = 50000;

  void validate() const;
  double contact_resistance(JunctionState state) const;
};

struct SheetResistanceResult {
  double rs_ohm_sq = std::numeric_limits<double>::infinity();
  double r0_ohm_sq = std::numeric_limits<double>::infinity();
  double ratio = std::numeric_limits<double>::infinity();
  int solver_iterations = 0;
  bool percolating = false;

  SheetResistanceResult with_reference(double r0) const {
    SheetResistanceResult out = *this;
    out.r0_ohm_sq = r0;
    out.ratio = percolating ? rs_ohm_sq / r0 : std::numeric_limits<double>::infinity();
    return out;
  }
};

// R = 4 rho L / (pi d^2) for a cylindrical conductor.
double segment_resistance(double length_um, double diameter_nm, double resistivity_ohm_m);

// Nodal analysis between the two bus bars: 1 V on the left rail, 0 V on the
// right, Jacobi-preconditioned conjugate gradient, Rs = V/I * (width/height)
// (square-count convention). Non-percolating graphs return the +infinity
// sentinel rather than an error.
SheetResistanceResult solve_sheet_resistance(const NetworkGraph& graph,
                                             const ElectricalParams& params);

// Two-terminal resistance between arbitrary node sets (probe pads). Returns
// +infinity when the sets are not connected.
double solve_between(const NetworkGraph& graph, const ElectricalParams& params,
                     const std::vector<int>& nodes_a, const std::vector<int>& nodes_b,
                     int* iterations_out = nullptr);

} // namespace nwpat
