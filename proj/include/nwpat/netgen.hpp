#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nwpat/common.hpp"

namespace nwpat {

struct NetworkParams {
  double domain_width_um = 100.0;
  double domain_height_um = 100.0;
  double areal_density_per_um2 = 0.02; // wires per um^2
  double length_mean_um = 20.0;
  double length_cv = 0.1;   // coefficient of variation, [0, 1)
  double diameter_mean_nm = 30.0;
  double diameter_cv = 0.05;
  std::uint64_t seed = 0;

  Rect domain() const { return {0.0, 0.0, domain_width_um, domain_height_um}; }
  void validate() const; // throws ValidationError
};

// Geometric stick. Endpoints in um, diameter in nm. Endpoints are inside the
// domain (boundary wires are clipped at generation time).
struct Wire {
  int id = 0;
  Vec2 p0;
  Vec2 p1;
  double diameter_nm = 0.0;

  double length_um() const { return distance(p0, p1); }
  Vec2 direction() const {
    double l = length_um();
    return {(p1.x - p0.x) / l, (p1.y - p0.y) / l};
  }
};

struct WireSet {
  Rect domain;
  std::vector<Wire> wires;
};

// Liang-Barsky clip of the segment against the domain rectangle; empty result
// when the segment lies fully outside.
std::optional<Wire> clip_to_domain(const Wire& wire, const Rect& domain);

// Isotropic random-stick network: centers uniform in the domain, orientations
// uniform in [0, pi), lengths/diameters from zero-truncated normals. Count is
// round(density * area); identical params give bit-identical output.
WireSet generate_network(const NetworkParams& params);

// CSV round-trip used by the CLI `generate` subcommand and the topology stage.
std::string serialize_wires(const WireSet& ws);
WireSet parse_wires(const std::string& text);

} // namespace nwpat
