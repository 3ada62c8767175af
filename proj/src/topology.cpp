#include "nwpat/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace nwpat {

namespace {
constexpr double kDefaultContactOhm = 2000.0;
} // namespace

const char* to_string(JunctionState s) {
  switch (s) {
    case JunctionState::kPristine: return "pristine";
    case JunctionState::kDaDecorated: return "da_decorated";
    case JunctionState::kWelded: return "welded";
    case JunctionState::kBroken: return "broken";
  }
  return "?";
}

std::optional<Vec2> segment_intersection(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                         const Vec2& b1) {
  Vec2 r = a1 - a0;
  Vec2 s = b1 - b0;
  Vec2 qp = b0 - a0;
  double denom = r.cross(s);
  double scale = r.norm() * s.norm();
  if (scale <= 0.0) return std::nullopt;

  if (std::abs(denom) > 1e-14 * scale) {
    double t = qp.cross(s) / denom;
    double u = qp.cross(r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return a0 + r * t;
  }

  // Parallel. Collinear overlap reports a single junction at the overlap
  // midpoint; disjoint parallels report nothing.
  if (std::abs(qp.cross(r)) > 1e-12 * scale) return std::nullopt;
  double rr = r.dot(r);
  double t0 = qp.dot(r) / rr;
  double t1 = (b1 - a0).dot(r) / rr;
  if (t0 > t1) std::swap(t0, t1);
  double lo = std::max(0.0, t0);
  double hi = std::min(1.0, t1);
  if (lo > hi) return std::nullopt;
  double tm = 0.5 * (lo + hi);
  return a0 + r * tm;
}

namespace {

// Cells crossed by the segment (Amanatides-Woo walk). Conservative enough for
// candidate generation: any crossing pair shares the cell of the crossing.
void cells_of_segment(const Vec2& p0, const Vec2& p1, const Rect& domain, double cell,
                      int nx, int ny, std::vector<std::int32_t>& out) {
  auto cell_index = [&](double v, double origin, int count) {
    int i = static_cast<int>(std::floor((v - origin) / cell));
    return std::clamp(i, 0, count - 1);
  };
  int ix = cell_index(p0.x, domain.x0, nx);
  int iy = cell_index(p0.y, domain.y0, ny);
  int ix1 = cell_index(p1.x, domain.x0, nx);
  int iy1 = cell_index(p1.y, domain.y0, ny);

  double dx = p1.x - p0.x;
  double dy = p1.y - p0.y;
  int step_x = dx > 0 ? 1 : -1;
  int step_y = dy > 0 ? 1 : -1;

  auto boundary = [&](int i, double origin) { return origin + cell * i; };
  double tmax_x = dx != 0.0
      ? (boundary(ix + (step_x > 0 ? 1 : 0), domain.x0) - p0.x) / dx
      : std::numeric_limits<double>::infinity();
  double tmax_y = dy != 0.0
      ? (boundary(iy + (step_y > 0 ? 1 : 0), domain.y0) - p0.y) / dy
      : std::numeric_limits<double>::infinity();
  double tdelta_x = dx != 0.0 ? std::abs(cell / dx) : 0.0;
  double tdelta_y = dy != 0.0 ? std::abs(cell / dy) : 0.0;

  int guard = 2 * (nx + ny) + 4;
  for (;;) {
    out.push_back(iy * nx + ix);
    if (ix == ix1 && iy == iy1) break;
    if (--guard < 0) break;
    if (tmax_x < tmax_y) {
      ix += step_x;
      tmax_x += tdelta_x;
      if (ix < 0 || ix >= nx) break;
    } else {
      iy += step_y;
      tmax_y += tdelta_y;
      if (iy < 0 || iy >= ny) break;
    }
  }
}

} // namespace

std::vector<Junction> find_junctions(const WireSet& ws) {
  std::vector<Junction> junctions;
  std::size_t n = ws.wires.size();
  if (n < 2) return junctions;

  double mean_len = 0.0;
  for (const Wire& w : ws.wires) mean_len += w.length_um();
  mean_len /= static_cast<double>(n);

  double extent = std::max(ws.domain.width(), ws.domain.height());
  double cell = std::max(mean_len * 0.5, extent / 1024.0);
  cell = std::min(cell, extent);
  int nx = std::max(1, static_cast<int>(std::ceil(ws.domain.width() / cell)));
  int ny = std::max(1, static_cast<int>(std::ceil(ws.domain.height() / cell)));

  // cell id -> wire indices
  std::vector<std::pair<std::int32_t, std::int32_t>> occupancy;
  std::vector<std::int32_t> cells;
  for (std::size_t i = 0; i < n; ++i) {
    cells.clear();
    cells_of_segment(ws.wires[i].p0, ws.wires[i].p1, ws.domain, cell, nx, ny, cells);
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (auto c : cells) occupancy.emplace_back(c, static_cast<std::int32_t>(i));
  }
  std::sort(occupancy.begin(), occupancy.end());

  std::vector<std::uint64_t> candidates;
  for (std::size_t lo = 0; lo < occupancy.size();) {
    std::size_t hi = lo;
    while (hi < occupancy.size() && occupancy[hi].first == occupancy[lo].first) ++hi;
    for (std::size_t a = lo; a < hi; ++a)
      for (std::size_t b = a + 1; b < hi; ++b) {
        auto i = static_cast<std::uint64_t>(occupancy[a].second);
        auto j = static_cast<std::uint64_t>(occupancy[b].second);
        candidates.push_back((i << 32) | j);
      }
    lo = hi;
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (std::uint64_t key : candidates) {
    const Wire& a = ws.wires[key >> 32];
    const Wire& b = ws.wires[key & 0xFFFFFFFFu];
    if (auto p = segment_intersection(a.p0, a.p1, b.p0, b.p1)) {
      Junction j;
      j.wire_a = a.id;
      j.wire_b = b.id;
      j.position = *p;
      j.state = JunctionState::kPristine;
      j.contact_resistance_ohm = kDefaultContactOhm;
      junctions.push_back(j);
    }
  }

  // Candidates were generated in (wire_a, wire_b) sorted order already; ids
  // follow that canonical order.
  for (std::size_t i = 0; i < junctions.size(); ++i)
    junctions[i].id = static_cast<int>(i);
  return junctions;
}

namespace {

struct WireEvent {
  double t = 0.0;
  int junction = -1;
  bool on_wire_a = true;
};

} // namespace

NetworkGraph build_graph(const WireSet& ws, const std::vector<Junction>& junctions,
                         const Electrodes& electrodes) {
  if (electrodes.x_left < ws.domain.x0 - kGeomTolUm ||
      electrodes.x_left > ws.domain.x1 + kGeomTolUm ||
      electrodes.x_right < ws.domain.x0 - kGeomTolUm ||
      electrodes.x_right > ws.domain.x1 + kGeomTolUm)
    throw ValidationError("electrodes must lie inside the domain");

  NetworkGraph g;
  g.domain = ws.domain;
  g.node_positions.push_back({electrodes.x_left, ws.domain.y0});
  g.node_positions.push_back({electrodes.x_right, ws.domain.y0});

  std::vector<std::vector<WireEvent>> events(ws.wires.size());
  for (const Junction& j : junctions) {
    const Wire& wa = ws.wires[j.wire_a];
    const Wire& wb = ws.wires[j.wire_b];
    Vec2 da = wa.direction();
    Vec2 db = wb.direction();
    events[j.wire_a].push_back({(j.position - wa.p0).dot(da), j.id, true});
    events[j.wire_b].push_back({(j.position - wb.p0).dot(db), j.id, false});
  }

  auto new_node = [&](const Vec2& p) {
    // Nodes on a bus bar collapse into the rail node.
    if (std::abs(p.x - electrodes.x_left) <= kGeomTolUm) return 0;
    if (std::abs(p.x - electrodes.x_right) <= kGeomTolUm) return 1;
    g.node_positions.push_back(p);
    return static_cast<int>(g.node_positions.size()) - 1;
  };

  // Per junction, the node it landed on for each parent wire.
  std::vector<std::pair<int, int>> junction_nodes(junctions.size(), {-1, -1});

  for (const Wire& w : ws.wires) {
    auto& ev = events[w.id];
    std::sort(ev.begin(), ev.end(), [](const WireEvent& a, const WireEvent& b) {
      if (a.t != b.t) return a.t < b.t;
      return a.junction < b.junction;
    });

    double wire_len = w.length_um();
    Vec2 dir = w.direction();
    int chain_node = new_node(w.p0);
    double chain_t = 0.0;

    std::size_t k = 0;
    while (k < ev.size()) {
      // Site: events coincident within the geometric tolerance.
      std::size_t k2 = k;
      while (k2 + 1 < ev.size() && ev[k2 + 1].t - ev[k].t <= kGeomTolUm) ++k2;
      double t_site = std::clamp(ev[k].t, 0.0, wire_len);
      Vec2 p_site = w.p0 + dir * t_site;

      bool cut = false;
      for (std::size_t q = k; q <= k2; ++q)
        if (junctions[ev[q].junction].state == JunctionState::kBroken) cut = true;

      int site_node;
      double seg_len = t_site - chain_t;
      if (seg_len <= kGeomTolUm) {
        site_node = chain_node; // coincident with the current chain node
      } else {
        site_node = new_node(p_site);
        if (chain_node != site_node)
          g.edges.push_back({GraphEdge::Kind::kSegment, chain_node, site_node, seg_len,
                             w.diameter_nm, w.id, -1, JunctionState::kPristine});
      }

      for (std::size_t q = k; q <= k2; ++q) {
        auto& slot = junction_nodes[ev[q].junction];
        (ev[q].on_wire_a ? slot.first : slot.second) = site_node;
      }

      if (cut) {
        // Fragmentation severs the wire here: the chain restarts on a fresh
        // node at the same position, with no edge across the site.
        chain_node = new_node(p_site);
      } else {
        chain_node = site_node;
      }
      chain_t = t_site;
      k = k2 + 1;
    }

    if (wire_len - chain_t > kGeomTolUm) {
      int end_node = new_node(w.p1);
      if (end_node != chain_node)
        g.edges.push_back({GraphEdge::Kind::kSegment, chain_node, end_node,
                           wire_len - chain_t, w.diameter_nm, w.id, -1,
                           JunctionState::kPristine});
    }
  }

  for (const Junction& j : junctions) {
    if (j.state == JunctionState::kBroken) continue;
    auto [na, nb] = junction_nodes[j.id];
    if (na < 0 || nb < 0 || na == nb) continue;
    g.edges.push_back({GraphEdge::Kind::kContact, na, nb, 0.0, 0.0, -1, j.id, j.state});
  }

  g.node_count = static_cast<int>(g.node_positions.size());
  return g;
}

bool percolates(const NetworkGraph& g) {
  if (g.node_count < 2) return false;
  DisjointSet dsu(static_cast<std::size_t>(g.node_count));
  for (const GraphEdge& e : g.edges) dsu.unite(e.u, e.v);
  return dsu.same(g.left_electrode, g.right_electrode);
}

} // namespace nwpat
