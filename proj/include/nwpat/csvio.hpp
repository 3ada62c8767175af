#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nwpat/network_state.hpp"
#include "nwpat/pipeline.hpp"

namespace nwpat {

// All report writers: fixed documented headers, 9-significant-digit floats,
// deterministic row order, I/O failures surfaced as ModelError.

void emit_visibility_spectra_csv(const VisibilityReport& report, const std::string& path);

struct VisibilitySummaryRow {
  int replica = 0;
  double delta_t_points = 0.0;
  double delta_h_points = 0.0;
  double rs_cond_ohm_sq = 0.0;
  double insulation_ratio = 0.0;
  double coverage_cond = 0.0;
  double coverage_insul = 0.0;
};
void emit_visibility_summary_csv(const std::vector<VisibilitySummaryRow>& rows,
                                 const std::string& path);

struct CensusCsvRow {
  int replica = 0;
  CensusRow census;
};
void emit_census_csv(const std::vector<CensusCsvRow>& rows, const std::string& path);

void emit_sweep_csv(const SweepResult& sweep, const std::string& summary_path,
                    const std::string& replicas_path);

void emit_resolution_csv(const std::vector<ResolutionRow>& rows, const std::string& path);

struct SolveCsvRow {
  int replica = 0;
  SolveLogRow solve;
};
void emit_solves_csv(const std::vector<SolveCsvRow>& rows, const std::string& path);

void emit_spectrum_csv(const Spectrum& spectrum, const std::string& path);

// --- run manifest -------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

struct RunManifest {
  std::string artifact_version = "1.0.0";
  int calibration_version = 0;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string timestamp_utc;
  std::vector<std::pair<std::string, std::uint64_t>> output_checksums;
};

// JSON manifest next to the outputs it describes.
void write_manifest(const RunManifest& manifest, const std::string& path);

} // namespace nwpat
