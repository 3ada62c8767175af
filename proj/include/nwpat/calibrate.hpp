#pragma once

#include <cstdint>
#include <string>

#include "nwpat/electrical.hpp"
#include "nwpat/kinetics.hpp"
#include "nwpat/optics.hpp"

namespace nwpat {

struct CalibrateOptions {
  int threads = 0;
  std::uint64_t seed = 0xCA11B8A7E5EEDULL;
  int fit_wires = 2000;      // network size for the fitting stages
  int verify_wires = 10000;  // final fusing-point refinement
  double stick_nl2 = 12.0;   // density * length^2 for kinetics networks
  double length_mean_um = 20.0;
  int replicas = 3;
};

// Residual diagnostics alongside the frozen knob set.
struct CalibrationFitReport {
  Calibration calibration;
  double tf_da17_c = 0.0;       // fusing point of the 17 nm DA film
  double mean_tf_drop_c = 0.0;  // raw-vs-DA fusing drop over {17,30,50,90} nm
  double drop_raw_pct = 0.0;    // UV sheet-resistance drops
  double drop_dpin_pct = 0.0;
  double drop_da_pct = 0.0;
  double drop_da_anneal_pct = 0.0;
  double conv_delta_t_points = 0.0; // deletion-baseline visibility at the
  double conv_delta_h_points = 0.0; // chosen operating point (model solve)
  std::string notes;
};

// Fits the kinetics and visibility knobs against the process targets and
// returns the frozen calibration. Deterministic for a fixed seed.
CalibrationFitReport calibrate(const PermittivityTable& permittivity,
                               const ElectricalParams& electrical,
                               const CalibrateOptions& options);

std::string calibration_fit_summary(const CalibrationFitReport& report);

} // namespace nwpat
