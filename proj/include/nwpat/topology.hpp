#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nwpat/common.hpp"
#include "nwpat/netgen.hpp"

namespace nwpat {

enum class JunctionState : std::uint8_t { kPristine, kDaDecorated, kWelded, kBroken };

const char* to_string(JunctionState s);

// Crossing of two wires. State mutates as process steps run; BROKEN severs
// both parent wires at the crossing and zeroes the contact conductance.
struct Junction {
  int id = 0;
  int wire_a = 0;
  int wire_b = 0;
  Vec2 position;
  JunctionState state = JunctionState::kPristine;
  double contact_resistance_ohm = 0.0;
  double uv_dose_mj_cm2 = 0.0; // cumulative dose seen through EXPOSED pixels
};

// Exact segment-pair intersection. Collinear overlaps report the overlap
// midpoint. Endpoint contacts count as junctions.
std::optional<Vec2> segment_intersection(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                         const Vec2& b1);

// All transversal wire-wire intersections, found by uniform spatial binning
// (cell size near the mean wire length) and emitted in canonical order:
// sorted by (wire_a, wire_b) before id assignment.
std::vector<Junction> find_junctions(const WireSet& wires);

// Two full-height bus bars; the standard sheet-resistance fixture.
struct Electrodes {
  double x_left = 0.0;
  double x_right = 0.0;
};

struct GraphEdge {
  enum class Kind : std::uint8_t { kSegment, kContact };
  Kind kind = Kind::kSegment;
  int u = 0;
  int v = 0;
  double length_um = 0.0;   // segment only
  double diameter_nm = 0.0; // segment only
  int wire_id = -1;         // segment only
  int junction_id = -1;     // contact only
  JunctionState state = JunctionState::kPristine; // contact only
};

// Electrical graph. Node 0 / node 1 are the left / right electrode rails;
// wire-local nodes follow. BROKEN junctions contribute no contact edge and
// split the wire chain, so their severing is structural, not parametric.
struct NetworkGraph {
  Rect domain;
  int node_count = 0;
  int left_electrode = 0;
  int right_electrode = 1;
  std::vector<Vec2> node_positions;
  std::vector<GraphEdge> edges;

  bool percolating_cache_valid = false;
};

NetworkGraph build_graph(const WireSet& wires, const std::vector<Junction>& junctions,
                         const Electrodes& electrodes);

// Union-find connectivity between the two bus bars over segment edges and
// non-broken contact edges.
bool percolates(const NetworkGraph& graph);

// Weighted quick-union with path halving.
class DisjointSet {
public:
  explicit DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<int>(i);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  bool same(int a, int b) { return find(a) == find(b); }

private:
  std::vector<int> parent_;
  std::vector<std::size_t> size_;
};

} // namespace nwpat
