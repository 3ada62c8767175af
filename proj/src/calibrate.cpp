#include "nwpat/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nwpat/netgen.hpp"
#include "nwpat/pipeline.hpp"
#include "nwpat/rng.hpp"
#include "nwpat/topology.hpp"

namespace nwpat {

namespace {

// Process targets the knobs are fitted against (temperatures in Celsius,
// drops in percent).
constexpr double kTargetTfDaC = 75.0;
constexpr double kTargetMeanTfDropC = 150.6;
constexpr double kTargetDropRawPct = 13.5;
constexpr double kTargetDropDpinPct = 54.0;
constexpr double kTargetDropDaPct = 77.5;
constexpr double kTargetDropDaAnnealPct = 84.4;
constexpr double kTargetConvDeltaT = 0.118; // deletion-baseline T loss at 550 nm
constexpr double kTargetConvDeltaH = 0.025;
constexpr double kUvIntensity = 10.74; // mW/cm^2
constexpr double kUvDuration = 480.0;  // s
constexpr double kAnnealDuration = 180.0;

const std::vector<double> kFitDiameters{17.0, 30.0, 50.0, 90.0};

NetworkParams kinetics_net(double diameter_nm, double length_um, double nl2, int wires,
                           std::uint64_t seed) {
  NetworkParams np;
  np.length_mean_um = length_um;
  np.length_cv = 0.10;
  np.diameter_mean_nm = diameter_nm;
  np.diameter_cv = 0.05;
  np.areal_density_per_um2 = nl2 / (length_um * length_um);
  double side = std::sqrt(static_cast<double>(wires) / np.areal_density_per_um2);
  np.domain_width_um = side;
  np.domain_height_um = side;
  np.seed = seed;
  return np;
}

// Percolation-collapse fusing point on a 1 K grid with coupled anneal draws;
// the collapse indicator is monotone in T, so the grid bisects exactly.
double proxy_tf_kelvin(const NetworkState& prepped, std::uint64_t anneal_seed,
                       const Calibration& cal) {
  Electrodes rails{prepped.wires.domain.x0, prepped.wires.domain.x1};
  const double lo = 295.0, hi = 595.0, step = 1.0;
  auto collapsed = [&](double t) {
    NetworkState s = prepped;
    anneal_step(s, {t, kAnnealDuration}, cal, anneal_seed);
    return !percolates(build_graph(s.wires, s.junctions, rails));
  };
  if (!collapsed(hi)) return std::numeric_limits<double>::infinity();
  double a = lo, b = hi;
  if (collapsed(a)) return a;
  while (b - a > step * 0.5) {
    double mid = a + std::floor((b - a) / (2.0 * step)) * step;
    if (mid <= a) break;
    if (collapsed(mid)) b = mid;
    else a = mid;
  }
  return b;
}

struct ThermalReplica {
  NetworkState raw;
  NetworkState decorated;
  std::uint64_t anneal_seed;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

} // namespace

CalibrationFitReport calibrate(const PermittivityTable& permittivity,
                               const ElectricalParams& electrical,
                               const CalibrateOptions& opt) {
  CalibrationFitReport report;
  Calibration cal; // defaults; rate knobs overwritten below
  std::ostringstream notes;

  // ---- Stage A: thermal fragmentation (rate_scale, delta_ea_da) ----

  std::vector<std::vector<ThermalReplica>> ensembles(kFitDiameters.size());
  for (std::size_t di = 0; di < kFitDiameters.size(); ++di) {
    for (int r = 0; r < opt.replicas; ++r) {
      std::uint64_t net_seed = derive_stream(derive_stream(opt.seed, 10 + di), r);
      NetworkParams np = kinetics_net(kFitDiameters[di], opt.length_mean_um, opt.stick_nl2,
                                      opt.fit_wires, net_seed);
      ThermalReplica rep{NetworkState::create(generate_network(np), net_seed),
                         NetworkState{}, derive_stream(net_seed, 0xA11)};
      rep.decorated = rep.raw;
      da_decoration(rep.decorated, cal.da_coverage, derive_stream(net_seed, 0xDA));
      ensembles[di].push_back(std::move(rep));
    }
  }

  auto median_tf = [&](std::size_t di, bool da, const Calibration& c) {
    std::vector<double> tfs(ensembles[di].size());
    parallel_for(ensembles[di].size(), opt.threads, [&](std::size_t r) {
      const ThermalReplica& rep = ensembles[di][r];
      tfs[r] = proxy_tf_kelvin(da ? rep.decorated : rep.raw, rep.anneal_seed, c);
    });
    return median(tfs);
  };

  // rate_scale pinning the 17 nm DA fusing point; tf is monotone decreasing
  // in the rate, so bisect its logarithm.
  auto fit_rate_scale = [&](Calibration c) {
    double lo = -8.0, hi = 4.0;
    for (int iter = 0; iter < 18; ++iter) {
      double mid = 0.5 * (lo + hi);
      c.rate_scale = std::pow(10.0, mid);
      double tf = median_tf(0, true, c);
      if (tf <= kTargetTfDaC + kCelsiusOffset) hi = mid;
      else lo = mid;
    }
    return std::pow(10.0, hi);
  };

  auto mean_drop = [&](const Calibration& c) {
    double acc = 0.0;
    for (std::size_t di = 0; di < kFitDiameters.size(); ++di)
      acc += median_tf(di, false, c) - median_tf(di, true, c);
    return acc / static_cast<double>(kFitDiameters.size());
  };

  {
    double lo = 0.30, hi = 0.62;
    for (int iter = 0; iter < 9; ++iter) {
      double mid = 0.5 * (lo + hi);
      cal.gte.delta_ea_da_ev = mid;
      cal.rate_scale = fit_rate_scale(cal);
      if (mean_drop(cal) >= kTargetMeanTfDropC) hi = mid;
      else lo = mid;
    }
    cal.gte.delta_ea_da_ev = 0.5 * (lo + hi);
    cal.rate_scale = fit_rate_scale(cal);
  }

  // Refine the rate at the full acceptance network size.
  {
    std::vector<ThermalReplica> big;
    for (int r = 0; r < opt.replicas; ++r) {
      std::uint64_t net_seed = derive_stream(derive_stream(opt.seed, 40), r);
      NetworkParams np = kinetics_net(17.0, opt.length_mean_um, opt.stick_nl2,
                                      opt.verify_wires, net_seed);
      ThermalReplica rep{NetworkState::create(generate_network(np), net_seed),
                         NetworkState{}, derive_stream(net_seed, 0xA11)};
      rep.decorated = rep.raw;
      da_decoration(rep.decorated, cal.da_coverage, derive_stream(net_seed, 0xDA));
      big.push_back(std::move(rep));
    }
    auto tf_big = [&](double rate) {
      Calibration c = cal;
      c.rate_scale = rate;
      std::vector<double> tfs(big.size());
      parallel_for(big.size(), opt.threads, [&](std::size_t r) {
        tfs[r] = proxy_tf_kelvin(big[r].decorated, big[r].anneal_seed, c);
      });
      return median(tfs);
    };
    double lo = std::log10(cal.rate_scale) - 1.0, hi = std::log10(cal.rate_scale) + 1.0;
    for (int iter = 0; iter < 16; ++iter) {
      double mid = 0.5 * (lo + hi);
      if (tf_big(std::pow(10.0, mid)) <= kTargetTfDaC + kCelsiusOffset) hi = mid;
      else lo = mid;
    }
    cal.rate_scale = std::pow(10.0, hi);
  }

  report.tf_da17_c = median_tf(0, true, cal) - kCelsiusOffset;
  report.mean_tf_drop_c = mean_drop(cal);

  // ---- Stage B: UV welding (eta, chi_dpin, chi_da, weld_rate) ----

  struct UvReplica {
    NetworkState base;      // pristine d=30 network
    NetworkState decorated; // DA-decorated copy
    double r0 = 0.0;
    std::vector<double> u;  // one uniform per junction, coupled across probes
  };
  std::vector<UvReplica> uv(static_cast<std::size_t>(opt.replicas));
  parallel_for(uv.size(), opt.threads, [&](std::size_t r) {
    std::uint64_t net_seed = derive_stream(derive_stream(opt.seed, 50), r);
    NetworkParams np = kinetics_net(30.0, opt.length_mean_um, opt.stick_nl2, opt.fit_wires,
                                    net_seed);
    UvReplica rep;
    rep.base = NetworkState::create(generate_network(np), net_seed);
    rep.decorated = rep.base;
    da_decoration(rep.decorated, cal.da_coverage, derive_stream(net_seed, 0xDA));
    Electrodes rails{rep.base.wires.domain.x0, rep.base.wires.domain.x1};
    SheetResistanceResult r0 =
        solve_sheet_resistance(build_graph(rep.base.wires, rep.base.junctions, rails),
                               electrical);
    if (!r0.percolating) throw ModelError("calibrate: UV fit network does not percolate");
    rep.r0 = r0.rs_ohm_sq;
    rep.u.resize(rep.base.junctions.size());
    CounterRng rng(derive_stream(net_seed, 0xF00D));
    for (double& x : rep.u) x = rng.next_u01();
    uv[r] = std::move(rep);
  });

  // Median sheet-resistance drop when decorated junctions weld with
  // probability p_da and undecorated ones with p_raw; optionally sintering
  // the remaining contacts with probability p_sinter.
  auto drop_pct = [&](double p_raw, double p_da, double p_sinter, bool from_decorated) {
    std::vector<double> drops(uv.size());
    parallel_for(uv.size(), opt.threads, [&](std::size_t r) {
      NetworkState s = from_decorated ? uv[r].decorated : uv[r].base;
      for (std::size_t k = 0; k < s.junctions.size(); ++k) {
        Junction& j = s.junctions[k];
        double p = j.state == JunctionState::kDaDecorated ? p_da : p_raw;
        if (uv[r].u[k] < p) j.state = JunctionState::kWelded;
        else if (p_sinter > 0.0 && uv[r].u[k] < p + (1.0 - p) * p_sinter)
          j.state = JunctionState::kWelded;
        else if (j.state == JunctionState::kDaDecorated)
          j.state = JunctionState::kPristine; // DA decomposed by the full dose
      }
      Electrodes rails{s.wires.domain.x0, s.wires.domain.x1};
      SheetResistanceResult rs =
          solve_sheet_resistance(build_graph(s.wires, s.junctions, rails), electrical);
      drops[r] = 100.0 * (1.0 - rs.rs_ohm_sq / uv[r].r0);
    });
    return median(drops);
  };

  auto invert = [](auto&& f, double target, double lo, double hi, int iters) {
    for (int i = 0; i < iters; ++i) {
      double mid = 0.5 * (lo + hi);
      if (f(mid) >= target) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  };

  double p_raw = invert([&](double p) { return drop_pct(p, p, 0.0, false); },
                        kTargetDropRawPct, 0.0, 1.0, 18);
  double p_dpin = invert([&](double p) { return drop_pct(p, p, 0.0, false); },
                         kTargetDropDpinPct, 0.0, 1.0, 18);
  double p_da = invert([&](double p) { return drop_pct(p_raw, p, 0.0, true); },
                       kTargetDropDaPct, 0.0, 1.0, 18);
  double p_sinter = invert([&](double p) { return drop_pct(p_raw, p_da, p, true); },
                           kTargetDropDaAnnealPct, 0.0, 0.9999, 18);

  Spectrum source = make_default_source(make_wavelength_grid(300, 800, 5));
  Spectrum hg = heat_generation_spectrum(30.0, permittivity,
                                         make_wavelength_grid(300, 800, 5));
  double overlap = spectral_overlap(source, hg);
  double dose = kUvIntensity * kUvDuration;

  cal.eta_per_mj_cm2 = -std::log(1.0 - p_raw) / (dose * overlap);
  cal.chi_dpin = std::log(1.0 - p_dpin) / std::log(1.0 - p_raw);
  cal.chi_da = std::log(1.0 - p_da) / std::log(1.0 - p_raw);
  double k_sinter = -std::log(1.0 - p_sinter) / kAnnealDuration;
  cal.weld_rate_per_s =
      k_sinter / std::exp(-cal.weld_activation_ev / (kBoltzmannEv * 348.15));

  report.drop_raw_pct = drop_pct(p_raw, p_raw, 0.0, false);
  report.drop_dpin_pct = drop_pct(p_dpin, p_dpin, 0.0, false);
  report.drop_da_pct = drop_pct(p_raw, p_da, 0.0, true);
  report.drop_da_anneal_pct = drop_pct(p_raw, p_da, p_sinter, true);

  // ---- Stage C: visibility operating point ----

  const double vis_d = cal.vis_diameter_mean_nm;
  const double vis_l = cal.vis_length_mean_um;
  MieEfficiencies q550 = mie_cylinder(vis_d, 550.0, permittivity.eps_at(550.0));
  double ratio_abs_sca = q550.q_abs / q550.q_sca;

  // Solve tau_sca and forward fraction so the deletion baseline sits at the
  // target (delta_t, delta_h): f follows from the T-loss constraint at fixed
  // tau, and H(tau) is monotone, so bisect tau.
  auto f_for_tau = [&](double tau) {
    double absorbed = 1.0 - std::exp(-ratio_abs_sca * tau);
    double scattered = 1.0 - std::exp(-tau);
    double one_minus_f = (1.0 - (1.0 - kTargetConvDeltaT) / (1.0 - absorbed)) / scattered;
    return std::clamp(1.0 - one_minus_f, 0.01, 1.0);
  };
  auto haze_at = [&](double tau) {
    double absorbed = 1.0 - std::exp(-ratio_abs_sca * tau);
    double scattered = 1.0 - std::exp(-tau);
    double f = f_for_tau(tau);
    double t = (1.0 - absorbed) * (1.0 - scattered * (1.0 - f));
    return (1.0 - absorbed) * scattered * f / t;
  };
  double tau = invert(haze_at, kTargetConvDeltaH, 0.01, 1.0, 40);
  cal.forward_scatter_fraction = f_for_tau(tau);
  cal.vis_density_per_um2 = tau / q550.q_sca / (vis_l * vis_d * 1e-3);

  {
    double absorbed = 1.0 - std::exp(-ratio_abs_sca * tau);
    double scattered = 1.0 - std::exp(-tau);
    double f = cal.forward_scatter_fraction;
    double t = (1.0 - absorbed) * (1.0 - scattered * (1.0 - f));
    report.conv_delta_t_points = 100.0 * (1.0 - t);
    report.conv_delta_h_points = 100.0 * ((1.0 - absorbed) * scattered * f / t);
  }

  // Fragmentation anneal for the visibility diameter: its own fusing point
  // plus margin, kept inside the process window.
  {
    std::vector<double> tfs(ensembles[2].size());
    parallel_for(ensembles[2].size(), opt.threads, [&](std::size_t r) {
      tfs[r] = proxy_tf_kelvin(ensembles[2][r].decorated, ensembles[2][r].anneal_seed, cal);
    });
    cal.vis_anneal_temp_k = std::min(median(tfs) + 10.0, 135.0 + kCelsiusOffset);
  }

  notes << "p_raw=" << p_raw << " p_dpin=" << p_dpin << " p_da=" << p_da
        << " p_sinter=" << p_sinter << " overlap=" << overlap << " tau_sca=" << tau
        << " q_sca550=" << q550.q_sca << " q_abs550=" << q550.q_abs;
  report.notes = notes.str();

  cal.validate();
  report.calibration = cal;
  return report;
}

std::string calibration_fit_summary(const CalibrationFitReport& r) {
  std::ostringstream os;
  os << "fitted calibration (version " << r.calibration.version << ")\n"
     << "  rate_scale          = " << r.calibration.rate_scale << "\n"
     << "  delta_ea_da_ev      = " << r.calibration.gte.delta_ea_da_ev << "\n"
     << "  eta_per_mj_cm2      = " << r.calibration.eta_per_mj_cm2 << "\n"
     << "  chi_dpin            = " << r.calibration.chi_dpin << "\n"
     << "  chi_da              = " << r.calibration.chi_da << "\n"
     << "  weld_rate_per_s     = " << r.calibration.weld_rate_per_s << "\n"
     << "  forward_scatter     = " << r.calibration.forward_scatter_fraction << "\n"
     << "  vis_density_per_um2 = " << r.calibration.vis_density_per_um2 << "\n"
     << "  vis_anneal_temp_k   = " << r.calibration.vis_anneal_temp_k << "\n"
     << "residuals\n"
     << "  tf(DA,17nm) C       = " << r.tf_da17_c << "\n"
     << "  mean tf drop C      = " << r.mean_tf_drop_c << "\n"
     << "  UV drops %          = " << r.drop_raw_pct << " / " << r.drop_dpin_pct << " / "
     << r.drop_da_pct << " / " << r.drop_da_anneal_pct << "\n"
     << "  deletion dT/dH pts  = " << r.conv_delta_t_points << " / "
     << r.conv_delta_h_points << "\n"
     << "notes: " << r.notes << "\n";
  return os.str();
}

} // namespace nwpat
