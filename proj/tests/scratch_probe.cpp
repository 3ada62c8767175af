// Throwaway numerical probe used while developing; not part of the suite.
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <thread>

#include "nwpat/optics.hpp"

using namespace nwpat;
using cd = std::complex<double>;

// Drude-Lorentz silver model used to build the shipped table.
static cd silver_eps(double wl_nm) {
  double e = 1239.841984 / wl_nm; // eV
  const double eps_inf = 3.6;
  const double ep2 = 75.9; // eV^2
  const double gd = 0.03;  // eV
  const double a1 = 13.0, e1 = 4.8, g1 = 0.38;
  cd drude = -ep2 / (cd(e * e, 0.0) + cd(0.0, gd * e));
  cd lorentz = a1 / (cd(e1 * e1 - e * e, 0.0) - cd(0.0, g1 * e));
  return eps_inf + drude + lorentz;
}

int main() {
  std::ofstream csv("../data/ag_permittivity.csv");
  csv << "wavelength_nm,eps_real,eps_imag\n";
  for (double wl = 300.0; wl <= 800.0 + 1e-9; wl += 2.0) {
    cd e = silver_eps(wl);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", wl, e.real(), e.imag());
    csv << buf;
  }
  csv.close();

  auto table = PermittivityTable::load_csv("../data/ag_permittivity.csv");
  for (double wl : {300.0, 320.0, 337.0, 350.0, 365.0, 400.0, 550.0, 800.0}) {
    cd e = table.eps_at(wl);
    std::printf("eps(%4.0f) = %8.3f + %6.3fi\n", wl, e.real(), e.imag());
  }

  // q_ext peak scan for d = 30
  double best_wl = 0, best_q = 0;
  for (double wl = 300; wl <= 500; wl += 2) {
    auto q = mie_cylinder(30, wl, table.eps_at(wl));
    if (q.q_ext > best_q) { best_q = q.q_ext; best_wl = wl; }
  }
  std::printf("d=30 q_ext peak at %.0f nm (q_ext=%.3f)\n", best_wl, best_q);

  auto hg = heat_generation_spectrum(30, table, make_wavelength_grid(300, 500, 2));
  double hg_peak_wl = 0, hg_peak = 0;
  for (std::size_t i = 0; i < hg.values.size(); ++i)
    if (hg.values[i] > hg_peak) { hg_peak = hg.values[i]; hg_peak_wl = hg.wavelengths_nm[i]; }
  std::printf("d=30 HG peak at %.0f nm\n", hg_peak_wl);

  for (double d : {17.0, 30.0, 50.0, 90.0}) {
    auto q = mie_cylinder(d, 550, table.eps_at(550));
    std::printf("d=%4.0f @550: q_ext=%.4f q_sca=%.4f q_abs=%.4f  abs/sca=%.3f\n", d,
                q.q_ext, q.q_sca, q.q_abs, q.q_abs / q.q_sca);
  }

  // Rayleigh cross-check at d=5, lambda=550
  {
    double d = 5, wl = 550;
    cd eps = table.eps_at(wl);
    double x = kPi * d / wl;
    cd em1 = eps - 1.0;
    double qext_abs_part = kPi * x / 4.0 * (eps.imag() + 2.0 * (em1 / (eps + 1.0)).imag());
    double qsca = kPi * kPi * x * x * x / 16.0 *
                  (std::norm(em1) + 2.0 * std::norm(em1 / (eps + 1.0)));
    double qext_ray = qext_abs_part + qsca;
    auto q = mie_cylinder(d, wl, eps);
    std::printf("rayleigh d=5: series q_ext=%.6f  rayleigh=%.6f  rel=%.4f\n", q.q_ext,
                qext_ray, std::abs(q.q_ext - qext_ray) / qext_ray);
  }

  // energy bookkeeping sanity
  double worst = 0;
  for (double d = 17; d <= 90; d += 7.3)
    for (double wl = 300; wl <= 800; wl += 10) {
      auto q = mie_cylinder(d, wl, table.eps_at(wl));
      worst = std::max(worst, std::abs(q.q_ext - q.q_sca - q.q_abs));
      if (q.q_abs < 0) std::printf("NEGATIVE qabs at d=%.0f wl=%.0f: %g\n", d, wl, q.q_abs);
    }
  std::printf("worst |q_ext-q_sca-q_abs| = %g\n", worst);
  std::printf("hardware threads: %u\n", std::thread::hardware_concurrency());
  return 0;
}
