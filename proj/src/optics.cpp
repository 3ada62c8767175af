#include "nwpat/optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nwpat {

using cd = std::complex<double>;

PermittivityTable PermittivityTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("permittivity: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

PermittivityTable PermittivityTable::parse_csv(const std::string& text,
                                               const std::string& origin) {
  PermittivityTable t;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("wavelength_nm,eps_real,eps_imag", 0) != 0)
        throw ValidationError(origin + ":" + std::to_string(lineno) +
                              ": expected header wavelength_nm,eps_real,eps_imag");
      header_seen = true;
      continue;
    }
    double wl, er, ei;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &wl, &er, &ei) != 3)
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": malformed row");
    if (!t.wavelengths_nm_.empty() && wl <= t.wavelengths_nm_.back())
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": wavelength grid must be strictly increasing");
    if (ei < 0.0)
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": negative Im(eps) (passive medium required)");
    t.wavelengths_nm_.push_back(wl);
    t.eps_.emplace_back(er, ei);
  }
  if (t.wavelengths_nm_.empty()) throw ValidationError(origin + ": empty permittivity table");
  return t;
}

PermittivityTable PermittivityTable::from_rows(std::vector<double> wavelengths_nm,
                                               std::vector<cd> eps) {
  PermittivityTable t;
  t.wavelengths_nm_ = std::move(wavelengths_nm);
  t.eps_ = std::move(eps);
  for (std::size_t i = 0; i + 1 < t.wavelengths_nm_.size(); ++i)
    if (t.wavelengths_nm_[i + 1] <= t.wavelengths_nm_[i])
      throw ValidationError("permittivity: grid must be strictly increasing");
  for (const cd& e : t.eps_)
    if (e.imag() < 0.0) throw ValidationError("permittivity: negative Im(eps)");
  if (t.wavelengths_nm_.empty()) throw ValidationError("permittivity: empty table");
  return t;
}

namespace {

template <typename T>
T interp_clamped(const std::vector<double>& xs, const std::vector<T>& ys, double x) {
  if (xs.size() == 1 || x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  std::size_t lo = hi - 1;
  double f = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] * (1.0 - f) + ys[hi] * f;
}

} // namespace

cd PermittivityTable::eps_at(double wavelength_nm) const {
  return interp_clamped(wavelengths_nm_, eps_, wavelength_nm);
}

void Spectrum::validate() const {
  if (wavelengths_nm.size() != values.size())
    throw ValidationError("spectrum: grid/value length mismatch");
  for (double v : values)
    if (!(v >= 0.0)) throw ValidationError("spectrum: values must be non-negative");
}

double Spectrum::value_at(double wl) const {
  return interp_clamped(wavelengths_nm, values, wl);
}

double Spectrum::trapezoid_area() const {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < wavelengths_nm.size(); ++i)
    area += 0.5 * (values[i] + values[i + 1]) * (wavelengths_nm[i + 1] - wavelengths_nm[i]);
  return area;
}

Spectrum& Spectrum::normalize_area() {
  double area = trapezoid_area();
  if (area > 0.0)
    for (double& v : values) v /= area;
  return *this;
}

Spectrum& Spectrum::normalize_peak() {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  if (peak > 0.0)
    for (double& v : values) v /= peak;
  return *this;
}

double spectral_overlap(const Spectrum& a, const Spectrum& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.wavelengths_nm.size(); ++i) {
    double f0 = a.values[i] * b.value_at(a.wavelengths_nm[i]);
    double f1 = a.values[i + 1] * b.value_at(a.wavelengths_nm[i + 1]);
    acc += 0.5 * (f0 + f1) * (a.wavelengths_nm[i + 1] - a.wavelengths_nm[i]);
  }
  return acc;
}

namespace {

// Logarithmic derivative D_n = J'_n(z)/J_n(z) by downward recurrence,
// D_{n-1} = (n-1)/z - 1/(D_n + n/z) for integer order.
std::vector<cd> log_derivative(cd z, int n_top) {
  std::vector<cd> d(static_cast<std::size_t>(n_top) + 1);
  int start = n_top + 15 + static_cast<int>(std::ceil(std::abs(z)));
  cd cur(0.0, 0.0);
  for (int n = start; n >= 1; --n) {
    cur = static_cast<double>(n - 1) / z - 1.0 / (cur + static_cast<double>(n) / z);
    if (n - 1 <= n_top) d[static_cast<std::size_t>(n - 1)] = cur;
  }
  return d;
}

} // namespace

MieEfficiencies mie_cylinder(double diameter_nm, double wavelength_nm, cd eps,
                             int extra_terms) {
  if (!(diameter_nm > 0.0) || !(wavelength_nm > 0.0))
    throw ValidationError("mie_cylinder: diameter and wavelength must be positive");
  if (!std::isfinite(eps.real()) || !std::isfinite(eps.imag()))
    throw ValidationError("mie_cylinder: non-finite permittivity");

  double x = kPi * diameter_nm / wavelength_nm;
  cd m = std::sqrt(eps);
  if (m.imag() < 0.0) m = -m; // passive branch

  int n_max = static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0)) + extra_terms;
  int n_top = n_max + 5;

  std::vector<cd> dlog = log_derivative(m * cd(x, 0.0), n_top + 1);

  // Real-argument Bessel J_n, Y_n and derivatives at x.
  std::vector<double> jn(static_cast<std::size_t>(n_top) + 2), yn(jn.size());
  for (int n = 0; n < static_cast<int>(jn.size()); ++n) {
    jn[static_cast<std::size_t>(n)] = std::cyl_bessel_j(static_cast<double>(n), x);
    yn[static_cast<std::size_t>(n)] = std::cyl_neumann(static_cast<double>(n), x);
  }
  auto h = [&](int n) { return cd(jn[static_cast<std::size_t>(n)], yn[static_cast<std::size_t>(n)]); };
  auto jp = [&](int n) {
    return n == 0 ? -jn[1]
                  : jn[static_cast<std::size_t>(n - 1)] -
                        (static_cast<double>(n) / x) * jn[static_cast<std::size_t>(n)];
  };
  auto hp = [&](int n) {
    cd hn = h(n);
    return n == 0 ? -h(1) : h(n - 1) - (static_cast<double>(n) / x) * hn;
  };

  // Normal incidence scattering coefficients.
  // TM (E parallel to the axis):  b_n = (m D_n j_n - j'_n) / (m D_n h_n - h'_n)
  // TE (E perpendicular):         a_n = (D_n j_n / m - j'_n) / (D_n h_n / m - h'_n)
  auto coeff_tm = [&](int n) {
    cd md = m * dlog[static_cast<std::size_t>(n)];
    return (md * jn[static_cast<std::size_t>(n)] - jp(n)) / (md * h(n) - hp(n));
  };
  auto coeff_te = [&](int n) {
    cd dm = dlog[static_cast<std::size_t>(n)] / m;
    return (dm * jn[static_cast<std::size_t>(n)] - jp(n)) / (dm * h(n) - hp(n));
  };

  double tail = std::max(std::abs(coeff_tm(n_top)), std::abs(coeff_te(n_top)));
  if (!(tail <= 1e-12))
    throw ModelError("mie_cylinder: series residual " + std::to_string(tail) +
                     " above 1e-12 at order " + std::to_string(n_top));

  double ext_tm = coeff_tm(0).real();
  double sca_tm = std::norm(coeff_tm(0));
  double ext_te = coeff_te(0).real();
  double sca_te = std::norm(coeff_te(0));
  for (int n = 1; n <= n_max; ++n) {
    ext_tm += 2.0 * coeff_tm(n).real();
    sca_tm += 2.0 * std::norm(coeff_tm(n));
    ext_te += 2.0 * coeff_te(n).real();
    sca_te += 2.0 * std::norm(coeff_te(n));
  }

  MieEfficiencies out;
  out.q_ext = (ext_tm + ext_te) / x; // (2/x) * average of TM and TE
  out.q_sca = (sca_tm + sca_te) / x;
  if (eps.imag() == 0.0) {
    // Lossless medium absorbs nothing; extinction is scattering identically.
    out.q_abs = 0.0;
    out.q_ext = out.q_sca;
  } else {
    out.q_abs = out.q_ext - out.q_sca;
  }
  return out;
}

double heat_density(double e_magnitude, double wavelength_nm, cd eps) {
  if (!(wavelength_nm > 0.0)) throw ValidationError("heat_density: wavelength must be positive");
  if (e_magnitude < 0.0) throw ValidationError("heat_density: |E| must be non-negative");
  double omega = 2.0 * kPi * kLightSpeedM / (wavelength_nm * 1e-9);
  return 0.5 * omega * eps.imag() * e_magnitude * e_magnitude;
}

Spectrum heat_generation_spectrum(double diameter_nm, const PermittivityTable& table,
                                  const std::vector<double>& wavelengths_nm) {
  Spectrum hg;
  hg.wavelengths_nm = wavelengths_nm;
  hg.values.reserve(wavelengths_nm.size());
  hg.units = "normalized";
  for (double wl : wavelengths_nm) {
    cd eps = table.eps_at(wl);
    double qa = mie_cylinder(diameter_nm, wl, eps).q_abs;
    hg.values.push_back(qa * heat_density(1.0, wl, eps));
  }
  hg.normalize_peak();
  return hg;
}

EfficiencyTable::EfficiencyTable(const PermittivityTable& table,
                                 std::vector<double> diameters_nm,
                                 std::vector<double> wavelengths_nm)
    : diameters_nm_(std::move(diameters_nm)), wavelengths_nm_(std::move(wavelengths_nm)) {
  if (diameters_nm_.empty() || wavelengths_nm_.empty())
    throw ValidationError("efficiency table: empty grid");
  grid_.resize(diameters_nm_.size() * wavelengths_nm_.size());
  for (std::size_t i = 0; i < diameters_nm_.size(); ++i)
    for (std::size_t k = 0; k < wavelengths_nm_.size(); ++k)
      grid_[i * wavelengths_nm_.size() + k] =
          mie_cylinder(diameters_nm_[i], wavelengths_nm_[k], table.eps_at(wavelengths_nm_[k]));
}

MieEfficiencies EfficiencyTable::at(double d, double wl) const {
  auto bracket = [](const std::vector<double>& xs, double x, std::size_t& lo, double& f) {
    if (xs.size() == 1 || x <= xs.front()) {
      lo = 0;
      f = 0.0;
      return;
    }
    if (x >= xs.back()) {
      lo = xs.size() - 2;
      f = 1.0;
      return;
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    lo = static_cast<std::size_t>(it - xs.begin()) - 1;
    f = (x - xs[lo]) / (xs[lo + 1] - xs[lo]);
  };
  std::size_t di, wi;
  double df, wf;
  bracket(diameters_nm_, d, di, df);
  bracket(wavelengths_nm_, wl, wi, wf);
  std::size_t stride = wavelengths_nm_.size();
  std::size_t di1 = std::min(di + 1, diameters_nm_.size() - 1);
  std::size_t wi1 = std::min(wi + 1, stride - 1);
  auto blend = [&](auto member) {
    double v00 = grid_[di * stride + wi].*member;
    double v01 = grid_[di * stride + wi1].*member;
    double v10 = grid_[di1 * stride + wi].*member;
    double v11 = grid_[di1 * stride + wi1].*member;
    return (1.0 - df) * ((1.0 - wf) * v00 + wf * v01) + df * ((1.0 - wf) * v10 + wf * v11);
  };
  MieEfficiencies e;
  e.q_ext = blend(&MieEfficiencies::q_ext);
  e.q_sca = blend(&MieEfficiencies::q_sca);
  e.q_abs = blend(&MieEfficiencies::q_abs);
  return e;
}

RegionOptics region_transmittance_haze(const std::vector<InventoryItem>& inventory,
                                       const EfficiencyTable& efficiencies,
                                       const std::vector<double>& wavelengths_nm,
                                       double region_area_um2, double forward_fraction) {
  if (!(region_area_um2 > 0.0)) throw ValidationError("region optics: region area must be positive");
  RegionOptics out;
  out.wavelengths_nm = wavelengths_nm;
  out.transmittance.assign(wavelengths_nm.size(), 1.0);
  out.haze.assign(wavelengths_nm.size(), 0.0);

  // Projected area binned onto the efficiency table's diameter grid with
  // linear splitting; identical to per-item bilinear interpolation but turns
  // the inner loop from O(items) into O(grid).
  const std::vector<double>& dgrid = efficiencies.diameters();
  std::vector<double> weight(dgrid.size(), 0.0);
  double coverage = 0.0;
  for (const InventoryItem& it : inventory) {
    double proj = (it.diameter_nm * 1e-3) * it.length_um / region_area_um2;
    coverage += proj;
    if (dgrid.size() == 1 || it.diameter_nm <= dgrid.front()) {
      weight.front() += proj;
    } else if (it.diameter_nm >= dgrid.back()) {
      weight.back() += proj;
    } else {
      auto lo = static_cast<std::size_t>(
          std::upper_bound(dgrid.begin(), dgrid.end(), it.diameter_nm) - dgrid.begin() - 1);
      double f = (it.diameter_nm - dgrid[lo]) / (dgrid[lo + 1] - dgrid[lo]);
      weight[lo] += (1.0 - f) * proj;
      weight[lo + 1] += f * proj;
    }
  }
  out.coverage = coverage;
  out.dense_film_warning = coverage > 1.5;

  for (std::size_t k = 0; k < wavelengths_nm.size(); ++k) {
    double tau_abs = 0.0, tau_sca = 0.0;
    for (std::size_t i = 0; i < dgrid.size(); ++i) {
      if (weight[i] == 0.0) continue;
      MieEfficiencies q = efficiencies.at(dgrid[i], wavelengths_nm[k]);
      tau_abs += weight[i] * q.q_abs;
      tau_sca += weight[i] * q.q_sca;
    }
    double absorbed = 1.0 - std::exp(-tau_abs);
    double scattered = 1.0 - std::exp(-tau_sca);
    double direct = (1.0 - absorbed) * (1.0 - scattered);
    double diffuse = (1.0 - absorbed) * scattered * forward_fraction;
    double total = direct + diffuse;
    out.transmittance[k] = total;
    out.haze[k] = total > 0.0 ? diffuse / total : 0.0;
  }
  return out;
}

std::vector<double> make_wavelength_grid(double min_nm, double max_nm, double step_nm) {
  if (!(min_nm > 0.0) || !(max_nm >= min_nm) || !(step_nm > 0.0))
    throw ValidationError("wavelength grid: bad extents");
  std::vector<double> grid;
  for (double wl = min_nm; wl <= max_nm + 1e-9; wl += step_nm) grid.push_back(wl);
  return grid;
}

} // namespace nwpat
