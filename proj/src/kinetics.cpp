#include "nwpat/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nwpat/rng.hpp"

namespace nwpat {

namespace {

// Draw-purpose tags keep per-junction streams disjoint across uses.
enum DrawPurpose : std::uint64_t {
  kDecorateDraw = 1,
  kWeldDraw = 2,
  kDaRemovalDraw = 3,
  kBreakDraw = 4,
  kSinterDraw = 5,
};

double junction_u01(std::uint64_t step_seed, DrawPurpose purpose, int junction_id) {
  CounterRng rng(derive_stream(derive_stream(step_seed, purpose),
                               static_cast<std::uint64_t>(junction_id)));
  return rng.next_u01();
}

} // namespace

void GTEParams::validate() const {
  if (!(d_s0_m2_s > 0.0) || !(e_a_ev > 0.0) || !(gamma_j_m2 > 0.0) || !(omega_m3 > 0.0) ||
      !(nu_per_m2 > 0.0))
    throw ValidationError("gte: physical constants must be positive");
  if (delta_ea_da_ev < 0.0) throw ValidationError("gte: delta_ea_da must be non-negative");
  if (!(weld_protection >= 0.0) || weld_protection >= 1.0)
    throw ValidationError("gte: weld_protection must lie in [0, 1)");
}

void JunctionGeometry::validate() const {
  if (!std::isfinite(kappa_j_per_m) || !std::isfinite(kappa_nw_per_m))
    throw ValidationError("junction geometry: non-finite curvature");
  if (!(kappa_nw_per_m > 0.0))
    throw ValidationError("junction geometry: wire curvature must be positive");
  double n = axial_unit.norm();
  if (std::abs(n - 1.0) > 1e-9)
    throw ValidationError("junction geometry: axial unit vector must have norm 1");
}

double gibbs_thomson_flux(const JunctionGeometry& geom, double temperature_k,
                          const GTEParams& p) {
  geom.validate();
  p.validate();
  if (!(temperature_k > 0.0)) throw ValidationError("flux: temperature must be positive");
  double kt_j = kBoltzmannJ * temperature_k;
  double ds = p.d_s0_m2_s * std::exp(-p.e_a_ev / (kBoltzmannEv * temperature_k));
  double prefactor = ds * p.gamma_j_m2 * p.omega_m3 * p.nu_per_m2 / kt_j;
  return -prefactor * (geom.kappa_j_per_m - geom.kappa_nw_per_m);
}

void Calibration::validate() const {
  gte.validate();
  if (!(rate_scale > 0.0) || !(c_neck > 0.0)) throw ValidationError("calibration: rate knobs must be positive");
  if (!(stub_length_diameters >= 0.0) || !(stub_thickening >= 1.0))
    throw ValidationError("calibration: stub knobs out of range");
  if (!(weld_rate_per_s >= 0.0) || !(weld_activation_ev > 0.0))
    throw ValidationError("calibration: sinter knobs out of range");
  if (!(eta_per_mj_cm2 > 0.0) || !(chi_dpin > 0.0) || !(chi_da > 0.0) ||
      !(dose_full_mj_cm2 > 0.0))
    throw ValidationError("calibration: UV knobs must be positive");
  if (chi_da <= chi_dpin)
    throw ValidationError("calibration: chi_da must exceed chi_dpin");
  if (!(forward_scatter_fraction > 0.0) || forward_scatter_fraction > 1.0)
    throw ValidationError("calibration: forward_scatter_fraction must lie in (0, 1]");
  if (da_coverage < 0.0 || da_coverage > 1.0)
    throw ValidationError("calibration: da_coverage must lie in [0, 1]");
}

namespace {

struct KeySlot {
  double* value;
};

std::map<std::string, double*> calibration_slots(Calibration& c) {
  return {
      {"d_s0_m2_s", &c.gte.d_s0_m2_s},
      {"e_a_ev", &c.gte.e_a_ev},
      {"gamma_j_m2", &c.gte.gamma_j_m2},
      {"omega_m3", &c.gte.omega_m3},
      {"nu_per_m2", &c.gte.nu_per_m2},
      {"delta_ea_da_ev", &c.gte.delta_ea_da_ev},
      {"weld_protection", &c.gte.weld_protection},
      {"rate_scale", &c.rate_scale},
      {"c_neck", &c.c_neck},
      {"stub_length_diameters", &c.stub_length_diameters},
      {"stub_thickening", &c.stub_thickening},
      {"weld_rate_per_s", &c.weld_rate_per_s},
      {"weld_activation_ev", &c.weld_activation_ev},
      {"eta_per_mj_cm2", &c.eta_per_mj_cm2},
      {"chi_dpin", &c.chi_dpin},
      {"chi_da", &c.chi_da},
      {"dose_full_mj_cm2", &c.dose_full_mj_cm2},
      {"vis_density_per_um2", &c.vis_density_per_um2},
      {"vis_length_mean_um", &c.vis_length_mean_um},
      {"vis_diameter_mean_nm", &c.vis_diameter_mean_nm},
      {"vis_anneal_temp_k", &c.vis_anneal_temp_k},
      {"forward_scatter_fraction", &c.forward_scatter_fraction},
      {"da_coverage", &c.da_coverage},
  };
}

} // namespace

std::string Calibration::serialize() const {
  Calibration copy = *this;
  std::ostringstream os;
  os << "calibration_version = " << version << "\n";
  char buf[96];
  for (const auto& [key, slot] : calibration_slots(copy)) {
    std::snprintf(buf, sizeof buf, "%s = %.12g\n", key.c_str(), *slot);
    os << buf;
  }
  return os.str();
}

Calibration Calibration::parse(const std::string& text, const std::string& origin) {
  Calibration c;
  auto slots = calibration_slots(c);
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool version_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::string where = origin + ":" + std::to_string(lineno);
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ValidationError(where + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "calibration_version") {
      version_seen = true;
      c.version = std::stoi(value);
      if (c.version != 1) throw ValidationError(where + ": unsupported calibration version");
      continue;
    }
    auto it = slots.find(key);
    if (it == slots.end()) throw ValidationError(where + ": unknown calibration key '" + key + "'");
    try {
      *it->second = std::stod(value);
    } catch (...) {
      throw ValidationError(where + ": bad numeric value '" + value + "'");
    }
  }
  if (!version_seen) throw ValidationError(origin + ": missing calibration_version line");
  c.validate();
  return c;
}

Calibration Calibration::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("calibration: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Calibration::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ModelError("calibration: cannot write " + path);
  out << serialize();
}

JunctionGeometry junction_geometry(double diameter_a_nm, double diameter_b_nm,
                                   double c_neck) {
  double d_m = 0.5 * (diameter_a_nm + diameter_b_nm) * 1e-9;
  JunctionGeometry g;
  g.kappa_nw_per_m = 2.0 / d_m;
  g.kappa_j_per_m = -c_neck / d_m;
  g.axial_unit = {1.0, 0.0};
  return g;
}

double junction_break_rate(const Junction& j, double d_eff_nm, double temperature_k,
                           const Calibration& cal) {
  JunctionGeometry geom = junction_geometry(d_eff_nm, d_eff_nm, cal.c_neck);
  GTEParams p = cal.gte;
  if (j.state == JunctionState::kDaDecorated) p.e_a_ev -= cal.gte.delta_ea_da_ev;
  double k = cal.rate_scale * std::abs(gibbs_thomson_flux(geom, temperature_k, p));
  if (j.state == JunctionState::kWelded) k *= cal.gte.weld_protection;
  return k;
}

void da_decoration(NetworkState& state, double coverage_fraction, std::uint64_t seed) {
  if (coverage_fraction < 0.0 || coverage_fraction > 1.0)
    throw ValidationError("da_decoration: coverage must lie in [0, 1]");
  state.modifier = NetworkModifier::kDa;
  for (Junction& j : state.junctions) {
    if (j.state != JunctionState::kPristine) continue;
    if (junction_u01(seed, kDecorateDraw, j.id) < coverage_fraction)
      j.state = JunctionState::kDaDecorated;
  }
}

void expose_step(NetworkState& state, const ExposeStep& step, const Spectrum& hg,
                 const Calibration& cal, std::uint64_t seed) {
  if (!step.mask) throw ValidationError("expose: missing mask");
  step.mask->validate_against(state.wires.domain);
  if (step.intensity_mw_cm2 < 0.0 || step.duration_s < 0.0)
    throw ValidationError("expose: negative dose");

  Spectrum source = step.source_spectrum;
  source.validate();
  source.normalize_area();
  double overlap = spectral_overlap(source, hg);
  double dose = step.dose_mj_cm2();

  for (Junction& j : state.junctions) {
    if (!step.mask->exposed_at(j.position)) continue; // shadowed: untouched
    if (j.state == JunctionState::kBroken) continue;

    // chi from the state during exposure (before decomposition finishes).
    double chi = 1.0;
    if (j.state == JunctionState::kDaDecorated) chi = cal.chi_da;
    else if (state.modifier == NetworkModifier::kDpinOnly) chi = cal.chi_dpin;

    bool weldable = j.state == JunctionState::kPristine ||
                    j.state == JunctionState::kDaDecorated;
    bool welded_now = false;
    if (weldable && dose > 0.0) {
      double p_weld = 1.0 - std::exp(-cal.eta_per_mj_cm2 * dose * overlap * chi);
      if (junction_u01(seed, kWeldDraw, j.id) < p_weld) {
        j.state = JunctionState::kWelded;
        welded_now = true;
      }
    }

    // Incremental-dose hazard so that split exposures leave the same
    // residual-DA probability as a single exposure: survival = 1 - cum/full.
    double prior = j.uv_dose_mj_cm2;
    j.uv_dose_mj_cm2 = prior + dose;
    if (j.state == JunctionState::kDaDecorated && !welded_now && dose > 0.0) {
      double p_remove;
      if (prior >= cal.dose_full_mj_cm2) p_remove = 1.0;
      else p_remove = std::min(1.0, dose / (cal.dose_full_mj_cm2 - prior));
      if (j.uv_dose_mj_cm2 >= cal.dose_full_mj_cm2 - 1e-12) p_remove = 1.0;
      if (junction_u01(seed, kDaRemovalDraw, j.id) < p_remove)
        j.state = JunctionState::kPristine;
    }
  }
}

void anneal_step(NetworkState& state, const AnnealStep& step, const Calibration& cal,
                 std::uint64_t seed) {
  if (step.temperature_k < 290.0 || step.temperature_k > 600.0)
    throw ModelError("anneal: temperature outside the [290 K, 600 K] validity range");
  if (!(step.duration_s > 0.0)) throw ValidationError("anneal: duration must be positive");

  double kt_ev = kBoltzmannEv * step.temperature_k;
  double k_sinter = cal.weld_rate_per_s * std::exp(-cal.weld_activation_ev / kt_ev);
  double p_sinter = 1.0 - std::exp(-k_sinter * step.duration_s);

  for (Junction& j : state.junctions) {
    if (j.state == JunctionState::kBroken) continue;
    const Wire& wa = state.wires.wires[j.wire_a];
    const Wire& wb = state.wires.wires[j.wire_b];
    double d_eff = 0.5 * (wa.diameter_nm + wb.diameter_nm);

    double k_break = junction_break_rate(j, d_eff, step.temperature_k, cal);
    double p_break = 1.0 - std::exp(-k_break * step.duration_s);
    if (junction_u01(seed, kBreakDraw, j.id) < p_break) {
      j.state = JunctionState::kBroken;
      continue;
    }

    // Survivors sinter: contact improves without geometry change.
    if ((j.state == JunctionState::kPristine || j.state == JunctionState::kDaDecorated) &&
        junction_u01(seed, kSinterDraw, j.id) < p_sinter)
      j.state = JunctionState::kWelded;
  }
}

} // namespace nwpat
