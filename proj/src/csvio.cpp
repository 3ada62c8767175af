#include "nwpat/csvio.hpp"

#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nwpat {

namespace {

class CsvWriter {
public:
  explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw ModelError("csv: cannot open " + path + ": " + std::strerror(errno));
  }

  void raw(const std::string& s) { out_ << s; }

  void field_text(const std::string& s) {
    sep();
    out_ << s;
  }
  void field_num(double v) {
    sep();
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out_ << buf;
  }
  void field_int(long long v) {
    sep();
    out_ << v;
  }
  void end_row() {
    out_ << "\n";
    first_ = true;
  }

  void close() {
    out_.flush();
    if (!out_) throw ModelError("csv: write failed on " + path_ + ": " + std::strerror(errno));
    out_.close();
  }

private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }
  std::string path_;
  std::ofstream out_;
  bool first_ = true;
};

} // namespace

void emit_visibility_spectra_csv(const VisibilityReport& r, const std::string& path) {
  CsvWriter w(path);
  w.raw("wavelength_nm,t_cond,t_insul,h_cond,h_insul\n");
  for (std::size_t i = 0; i < r.wavelengths_nm.size(); ++i) {
    w.field_num(r.wavelengths_nm[i]);
    w.field_num(r.t_cond[i]);
    w.field_num(r.t_insul[i]);
    w.field_num(r.h_cond[i]);
    w.field_num(r.h_insul[i]);
    w.end_row();
  }
  w.close();
}

void emit_visibility_summary_csv(const std::vector<VisibilitySummaryRow>& rows,
                                 const std::string& path) {
  CsvWriter w(path);
  w.raw("replica,delta_t_points,delta_h_points,rs_cond_ohm_sq,insulation_ratio,"
        "coverage_cond,coverage_insul\n");
  for (const auto& r : rows) {
    w.field_int(r.replica);
    w.field_num(r.delta_t_points);
    w.field_num(r.delta_h_points);
    w.field_num(r.rs_cond_ohm_sq);
    w.field_num(r.insulation_ratio);
    w.field_num(r.coverage_cond);
    w.field_num(r.coverage_insul);
    w.end_row();
  }
  w.close();
}

void emit_census_csv(const std::vector<CensusCsvRow>& rows, const std::string& path) {
  CsvWriter w(path);
  w.raw("replica,step_index,step_kind,pristine,da_decorated,welded,broken\n");
  for (const auto& r : rows) {
    w.field_int(r.replica);
    w.field_int(r.census.step_index);
    w.field_text(r.census.step_kind);
    w.field_int(static_cast<long long>(r.census.pristine));
    w.field_int(static_cast<long long>(r.census.da_decorated));
    w.field_int(static_cast<long long>(r.census.welded));
    w.field_int(static_cast<long long>(r.census.broken));
    w.end_row();
  }
  w.close();
}

void emit_sweep_csv(const SweepResult& sweep, const std::string& summary_path,
                    const std::string& replicas_path) {
  {
    CsvWriter w(summary_path);
    w.raw("variant,diameter_nm,tf_median_kelvin,tf_median_celsius,replicas\n");
    for (const auto& row : sweep.summary) {
      w.field_text(to_string(row.variant));
      w.field_num(row.diameter_nm);
      w.field_num(row.tf_median_kelvin);
      w.field_num(row.tf_median_kelvin - kCelsiusOffset);
      w.field_int(row.replicas);
      w.end_row();
    }
    w.close();
  }
  {
    CsvWriter w(replicas_path);
    w.raw("variant,diameter_nm,replica,tf_kelvin,r0_ohm_sq\n");
    for (const auto& row : sweep.replicas) {
      w.field_text(to_string(row.variant));
      w.field_num(row.diameter_nm);
      w.field_int(row.replica);
      w.field_num(row.tf_kelvin);
      w.field_num(row.r0_ohm_sq);
      w.end_row();
    }
    w.close();
  }
}

void emit_resolution_csv(const std::vector<ResolutionRow>& rows, const std::string& path) {
  CsvWriter w(path);
  w.raw("linewidth_um,replicas,percolation_probability,insulation_pass_fraction,pass\n");
  for (const auto& r : rows) {
    w.field_num(r.linewidth_um);
    w.field_int(r.replicas);
    w.field_num(r.percolation_probability);
    w.field_num(r.insulation_pass_fraction);
    w.field_int(r.pass ? 1 : 0);
    w.end_row();
  }
  w.close();
}

void emit_solves_csv(const std::vector<SolveCsvRow>& rows, const std::string& path) {
  CsvWriter w(path);
  w.raw("replica,context,rs_ohm_sq,r0_ohm_sq,ratio,iterations\n");
  for (const auto& r : rows) {
    w.field_int(r.replica);
    w.field_text(r.solve.context);
    w.field_num(r.solve.rs_ohm_sq);
    w.field_num(r.solve.r0_ohm_sq);
    w.field_num(r.solve.ratio);
    w.field_int(r.solve.iterations);
    w.end_row();
  }
  w.close();
}

void emit_spectrum_csv(const Spectrum& spectrum, const std::string& path) {
  CsvWriter w(path);
  w.raw("wavelength_nm,value\n");
  for (std::size_t i = 0; i < spectrum.wavelengths_nm.size(); ++i) {
    w.field_num(spectrum.wavelengths_nm[i]);
    w.field_num(spectrum.values[i]);
    w.end_row();
  }
  w.close();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("manifest: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["artifact_version"] = m.artifact_version;
  j["calibration_version"] = m.calibration_version;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["timestamp_utc"] = m.timestamp_utc;
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& [name, sum] : m.output_checksums) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(sum));
    outputs[name] = buf;
  }
  j["outputs"] = outputs;
  std::ofstream out(path);
  if (!out) throw ModelError("manifest: cannot write " + path);
  out << j.dump(2) << "\n";
}

} // namespace nwpat
