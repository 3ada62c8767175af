#include "nwpat/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace nwpat {

namespace {

enum PieceClass { kClassPristine = 0, kClassDa, kClassWelded, kClassStub };

const char* kClassColor[] = {"#8a8a8a", "#2a7fff", "#ff8c00", "#d62728"};

struct SiteMark {
  double t;
  JunctionState state;
};

} // namespace

void render_svg(const NetworkState& state, const RegionMask* mask, const std::string& path,
                double stub_length_diameters) {
  if (state.wires.wires.size() > 100000)
    throw ValidationError("render: more than 1e5 wires; subsample the network first");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("render: cannot open " + path + ": " + std::strerror(errno));

  const Rect& d = state.wires.domain;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.9g %.9g %.9g %.9g\">\n",
                d.x0, d.y0, d.width(), d.height());
  out << buf;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Mask overlay: one rect per exposed run per row, y flipped into SVG space.
  if (mask) {
    out << "<g fill=\"#7fd4ff\" fill-opacity=\"0.25\">\n";
    for (int iy = 0; iy < mask->height_px; ++iy) {
      int ix = 0;
      while (ix < mask->width_px) {
        if (!mask->bits[static_cast<std::size_t>(iy) * mask->width_px + ix]) {
          ++ix;
          continue;
        }
        int run = ix;
        while (run < mask->width_px &&
               mask->bits[static_cast<std::size_t>(iy) * mask->width_px + run])
          ++run;
        double x = d.x0 + ix * mask->pitch_um;
        double y = d.y1 - (iy + 1) * mask->pitch_um;
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.9g\" y=\"%.9g\" width=\"%.9g\" height=\"%.9g\"/>\n", x, y,
                      (run - ix) * mask->pitch_um, mask->pitch_um);
        out << buf;
        ix = run;
      }
    }
    out << "</g>\n";
  }

  // Junction sites per wire.
  std::vector<std::vector<SiteMark>> sites(state.wires.wires.size());
  for (const Junction& j : state.junctions) {
    for (int wid : {j.wire_a, j.wire_b}) {
      const Wire& w = state.wires.wires[wid];
      sites[wid].push_back({(j.position - w.p0).dot(w.direction()), j.state});
    }
  }

  out << "<g stroke-linecap=\"round\">\n";
  for (const Wire& w : state.wires.wires) {
    auto& sv = sites[w.id];
    std::sort(sv.begin(), sv.end(), [](const SiteMark& a, const SiteMark& b) {
      return a.t < b.t;
    });
    double len = w.length_um();
    Vec2 dir = w.direction();
    double stub = stub_length_diameters * w.diameter_nm * 1e-3;

    std::vector<double> cuts{0.0, len};
    for (const SiteMark& s : sv)
      if (s.t > 0.0 && s.t < len) cuts.push_back(s.t);
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] - cuts[i] <= kGeomTolUm) continue;
      double tm = 0.5 * (cuts[i] + cuts[i + 1]);
      int cls = kClassPristine;
      for (const SiteMark& s : sv) {
        int c = -1;
        if (s.state == JunctionState::kBroken && std::abs(tm - s.t) <= stub +
                0.5 * (cuts[i + 1] - cuts[i]))
          c = kClassStub;
        else if (std::abs(s.t - cuts[i]) <= kGeomTolUm ||
                 std::abs(s.t - cuts[i + 1]) <= kGeomTolUm) {
          if (s.state == JunctionState::kWelded) c = kClassWelded;
          else if (s.state == JunctionState::kDaDecorated) c = kClassDa;
          else if (s.state == JunctionState::kPristine) c = kClassPristine;
        }
        cls = std::max(cls, c);
      }
      Vec2 a = w.p0 + dir * cuts[i];
      Vec2 b = w.p0 + dir * cuts[i + 1];
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.6g\" y1=\"%.6g\" x2=\"%.6g\" y2=\"%.6g\" stroke=\"%s\" "
                    "stroke-width=\"%.4g\"/>\n",
                    a.x, d.y1 - a.y + d.y0, b.x, d.y1 - b.y + d.y0, kClassColor[cls],
                    std::max(0.2, w.diameter_nm * 4e-3));
      out << buf;
    }
  }
  out << "</g>\n</svg>\n";
  out.flush();
  if (!out) throw ModelError("render: write failed on " + path);
}

} // namespace nwpat
