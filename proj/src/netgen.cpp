#include "nwpat/netgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nwpat/rng.hpp"

namespace nwpat {

void NetworkParams::validate() const {
  auto bad = [](double v) { return !std::isfinite(v) || v <= 0.0; };
  if (bad(domain_width_um) || bad(domain_height_um))
    throw ValidationError("network: domain dimensions must be finite and positive");
  if (!std::isfinite(areal_density_per_um2) || areal_density_per_um2 < 0.0)
    throw ValidationError("network: areal density must be finite and non-negative");
  if (bad(length_mean_um) || bad(diameter_mean_nm))
    throw ValidationError("network: mean length/diameter must be positive");
  if (length_cv < 0.0 || length_cv >= 1.0 || diameter_cv < 0.0 || diameter_cv >= 1.0)
    throw ValidationError("network: cv must lie in [0, 1)");
  double count = areal_density_per_um2 * domain_width_um * domain_height_um;
  if (count > 1e7)
    throw ValidationError("network: density implies more than 1e7 wires");
}

std::optional<Wire> clip_to_domain(const Wire& wire, const Rect& domain) {
  double dx = wire.p1.x - wire.p0.x;
  double dy = wire.p1.y - wire.p0.y;
  double t0 = 0.0, t1 = 1.0;

  auto clip_edge = [&](double p, double q) {
    // p*t <= q half-plane
    if (p == 0.0) return q >= 0.0;
    double r = q / p;
    if (p < 0.0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };

  if (!clip_edge(-dx, wire.p0.x - domain.x0)) return std::nullopt;
  if (!clip_edge(dx, domain.x1 - wire.p0.x)) return std::nullopt;
  if (!clip_edge(-dy, wire.p0.y - domain.y0)) return std::nullopt;
  if (!clip_edge(dy, domain.y1 - wire.p0.y)) return std::nullopt;
  if (t0 >= t1) return std::nullopt;

  Wire out = wire;
  out.p0 = {wire.p0.x + t0 * dx, wire.p0.y + t0 * dy};
  out.p1 = {wire.p0.x + t1 * dx, wire.p0.y + t1 * dy};
  if (distance(out.p0, out.p1) <= 0.0) return std::nullopt;
  return out;
}

WireSet generate_network(const NetworkParams& params) {
  params.validate();

  WireSet ws;
  ws.domain = params.domain();
  auto count = static_cast<std::size_t>(
      std::llround(params.areal_density_per_um2 * ws.domain.area()));
  ws.wires.reserve(count);

  double len_sd = params.length_cv * params.length_mean_um;
  double dia_sd = params.diameter_cv * params.diameter_mean_nm;

  int next_id = 0;
  for (std::size_t i = 0; i < count; ++i) {
    // Per-wire stream so generation order never matters.
    CounterRng rng(derive_stream(params.seed, i));
    Vec2 center{ws.domain.x0 + rng.next_u01() * ws.domain.width(),
                ws.domain.y0 + rng.next_u01() * ws.domain.height()};
    double theta = rng.next_u01() * kPi;
    double length = len_sd > 0.0 ? rng.next_positive_normal(params.length_mean_um, len_sd)
                                 : params.length_mean_um;
    double diameter = dia_sd > 0.0 ? rng.next_positive_normal(params.diameter_mean_nm, dia_sd)
                                   : params.diameter_mean_nm;

    Vec2 half{0.5 * length * std::cos(theta), 0.5 * length * std::sin(theta)};
    Wire w{next_id, center - half, center + half, diameter};
    if (auto clipped = clip_to_domain(w, ws.domain)) {
      clipped->id = next_id++;
      ws.wires.push_back(*clipped);
    }
  }
  return ws;
}

std::string serialize_wires(const WireSet& ws) {
  std::ostringstream os;
  char buf[192];
  std::snprintf(buf, sizeof buf, "# domain %.9g %.9g %.9g %.9g\n", ws.domain.x0,
                ws.domain.y0, ws.domain.x1, ws.domain.y1);
  os << buf << "id,x0_um,y0_um,x1_um,y1_um,diameter_nm\n";
  for (const Wire& w : ws.wires) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", w.id, w.p0.x,
                  w.p0.y, w.p1.x, w.p1.y, w.diameter_nm);
    os << buf;
  }
  return os.str();
}

WireSet parse_wires(const std::string& text) {
  WireSet ws;
  std::istringstream is(text);
  std::string line;
  bool have_domain = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# domain", 0) == 0) {
      if (std::sscanf(line.c_str(), "# domain %lf %lf %lf %lf", &ws.domain.x0,
                      &ws.domain.y0, &ws.domain.x1, &ws.domain.y1) == 4)
        have_domain = true;
      continue;
    }
    if (line[0] == '#' || line.rfind("id,", 0) == 0) continue;
    Wire w;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf", &w.id, &w.p0.x, &w.p0.y,
                    &w.p1.x, &w.p1.y, &w.diameter_nm) != 6)
      throw ValidationError("wire file: malformed row: " + line);
    ws.wires.push_back(w);
  }
  if (!have_domain) throw ValidationError("wire file: missing '# domain' header");
  return ws;
}

} // namespace nwpat
