#include "nwpat/electrical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nwpat {

void ElectricalParams::validate() const {
  if (resistivity_eff_ohm_m <= 0.0 || r_contact_pristine_ohm <= 0.0 ||
      r_contact_da_ohm <= 0.0 || r_contact_welded_ohm <= 0.0)
    throw ValidationError("electrical: resistances must be positive");
  if (r_contact_welded_ohm >= r_contact_pristine_ohm)
    throw ValidationError("electrical: welded contact must beat pristine contact");
  if (!(solver_tolerance > 0.0) || solver_tolerance > 1e-4)
    throw ValidationError("electrical: solver tolerance must lie in (0, 1e-4]");
  if (max_iterations <= 0) throw ValidationError("electrical: max_iterations must be positive");
}

double ElectricalParams::contact_resistance(JunctionState state) const {
  switch (state) {
    case JunctionState::kPristine: return r_contact_pristine_ohm;
    case JunctionState::kDaDecorated: return r_contact_da_ohm;
    case JunctionState::kWelded: return r_contact_welded_ohm;
    case JunctionState::kBroken: return std::numeric_limits<double>::infinity();
  }
  return r_contact_pristine_ohm;
}

double segment_resistance(double length_um, double diameter_nm, double resistivity_ohm_m) {
  if (!(length_um > 0.0) || !(diameter_nm > 0.0) || !(resistivity_ohm_m > 0.0))
    throw ValidationError("segment_resistance: inputs must be positive");
  double l_m = length_um * 1e-6;
  double d_m = diameter_nm * 1e-9;
  return 4.0 * resistivity_ohm_m * l_m / (kPi * d_m * d_m);
}

namespace {

struct CondEdge {
  int u, v;
  double g;
};

// Conjugate gradient with Jacobi preconditioning on the reduced nodal system.
// Returns the node potentials for interior unknowns; terminals are held at
// 1 V / 0 V by elimination.
class NodalSystem {
public:
  NodalSystem(int node_count, const std::vector<CondEdge>& edges, int term_a, int term_b)
      : term_a_(term_a), term_b_(term_b) {
    // Drop dangling chains: they carry no current.
    std::vector<int> degree(node_count, 0);
    std::vector<char> dead_edge(edges.size(), 0);
    std::vector<std::vector<int>> incident(node_count);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      degree[edges[e].u]++;
      degree[edges[e].v]++;
      incident[edges[e].u].push_back(static_cast<int>(e));
      incident[edges[e].v].push_back(static_cast<int>(e));
    }
    std::vector<int> queue;
    for (int i = 0; i < node_count; ++i)
      if (degree[i] == 1 && i != term_a && i != term_b) queue.push_back(i);
    while (!queue.empty()) {
      int i = queue.back();
      queue.pop_back();
      for (int e : incident[i]) {
        if (dead_edge[e]) continue;
        dead_edge[e] = 1;
        int other = edges[e].u == i ? edges[e].v : edges[e].u;
        if (--degree[other] == 1 && other != term_a && other != term_b)
          queue.push_back(other);
        degree[i]--;
      }
    }

    // Component containing the terminals.
    DisjointSet dsu(static_cast<std::size_t>(node_count));
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (!dead_edge[e]) dsu.unite(edges[e].u, edges[e].v);
    connected_ = dsu.same(term_a, term_b);
    if (!connected_) return;
    int root = dsu.find(term_a);

    index_.assign(node_count, -1);
    int next = 0;
    for (int i = 0; i < node_count; ++i) {
      if (i == term_a || i == term_b) continue;
      if (degree[i] > 0 && dsu.find(i) == root) index_[i] = next++;
    }
    unknowns_ = next;

    live_edges_.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (!dead_edge[e]) {
        const CondEdge& ed = edges[e];
        if (dsu.find(ed.u) == root) live_edges_.push_back(ed);
      }
  }

  bool connected() const { return connected_; }

  // Solves for V(term_a)=1, V(term_b)=0 and returns the terminal current.
  double terminal_current(double tol, int max_iter, int* iterations_out) {
    if (!connected_) return 0.0;
    int n = unknowns_;
    std::vector<double> diag(n, 0.0), b(n, 0.0);

    // CSR adjacency over interior unknowns.
    std::vector<int> row_count(n, 0);
    for (const CondEdge& e : live_edges_) {
      int iu = interior_index(e.u), iv = interior_index(e.v);
      if (iu >= 0) {
        diag[iu] += e.g;
        if (iv >= 0) row_count[iu]++;
        else if (is_a(e.v)) b[iu] += e.g;
      }
      if (iv >= 0) {
        diag[iv] += e.g;
        if (iu >= 0) row_count[iv]++;
        else if (is_a(e.u)) b[iv] += e.g;
      }
    }
    std::vector<int> row_ptr(n + 1, 0);
    for (int i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + row_count[i];
    std::vector<int> col(row_ptr[n]);
    std::vector<double> val(row_ptr[n]);
    std::vector<int> cursor(row_ptr.begin(), row_ptr.end() - 1);
    for (const CondEdge& e : live_edges_) {
      int iu = interior_index(e.u), iv = interior_index(e.v);
      if (iu >= 0 && iv >= 0) {
        col[cursor[iu]] = iv;
        val[cursor[iu]++] = -e.g;
        col[cursor[iv]] = iu;
        val[cursor[iv]++] = -e.g;
      }
    }

    potentials_.assign(n, 0.0);
    if (n > 0) {
      double bnorm = 0.0;
      for (double x : b) bnorm += x * x;
      bnorm = std::sqrt(bnorm);
      if (bnorm == 0.0) {
        // No drive reaches the interior: direct terminal-terminal edges only.
      } else {
        std::vector<double> r(b), z(n), p(n), q(n);
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
          for (int i = 0; i < n; ++i) {
            double acc = diag[i] * x[i];
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
            y[i] = acc;
          }
        };
        for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        p = z;
        double rz = 0.0;
        for (int i = 0; i < n; ++i) rz += r[i] * z[i];
        int it = 0;
        double rnorm = bnorm;
        while (rnorm > tol * bnorm && it < max_iter) {
          apply(p, q);
          double pq = 0.0;
          for (int i = 0; i < n; ++i) pq += p[i] * q[i];
          double alpha = rz / pq;
          for (int i = 0; i < n; ++i) {
            potentials_[i] += alpha * p[i];
            r[i] -= alpha * q[i];
          }
          double rz_new = 0.0;
          rnorm = 0.0;
          for (int i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
            rz_new += r[i] * z[i];
            rnorm += r[i] * r[i];
          }
          rnorm = std::sqrt(rnorm);
          double beta = rz_new / rz;
          rz = rz_new;
          for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
          ++it;
        }
        if (iterations_out) *iterations_out = it;
        if (rnorm > tol * bnorm)
          throw ModelError("nodal solver did not converge: residual " +
                           std::to_string(rnorm / bnorm) + " after " + std::to_string(it) +
                           " iterations");
      }
    }

    double current = 0.0;
    for (const CondEdge& e : live_edges_) {
      double va = -1.0, vb = -1.0; // potential at u, v if one of them is terminal a
      if (is_a(e.u)) {
        va = 1.0;
        vb = potential_of(e.v);
        current += e.g * (va - vb);
      } else if (is_a(e.v)) {
        va = 1.0;
        vb = potential_of(e.u);
        current += e.g * (va - vb);
      }
    }
    return current;
  }

private:
  int interior_index(int node) const {
    return (node == term_a_ || node == term_b_) ? -1 : index_[node];
  }
  bool is_a(int node) const { return node == term_a_; }
  double potential_of(int node) const {
    if (node == term_a_) return 1.0;
    if (node == term_b_) return 0.0;
    return potentials_[index_[node]];
  }

  int term_a_, term_b_;
  bool connected_ = false;
  int unknowns_ = 0;
  std::vector<int> index_;
  std::vector<CondEdge> live_edges_;
  std::vector<double> potentials_;
};

// Collapse node sets into two virtual terminals and build conductance edges.
double two_terminal_resistance(const NetworkGraph& graph, const ElectricalParams& params,
                               const std::vector<int>& nodes_a,
                               const std::vector<int>& nodes_b, int* iterations_out) {
  params.validate();
  if (nodes_a.empty() || nodes_b.empty()) return std::numeric_limits<double>::infinity();

  int n = graph.node_count;
  std::vector<int> remap(n);
  for (int i = 0; i < n; ++i) remap[i] = i;
  int term_a = nodes_a.front();
  int term_b = nodes_b.front();
  for (int i : nodes_a) remap[i] = term_a;
  for (int i : nodes_b) remap[i] = term_b;
  if (term_a == term_b) throw ValidationError("probe sets overlap");

  std::vector<CondEdge> edges;
  edges.reserve(graph.edges.size());
  for (const GraphEdge& e : graph.edges) {
    int u = remap[e.u], v = remap[e.v];
    if (u == v) continue;
    double r = e.kind == GraphEdge::Kind::kSegment
                   ? segment_resistance(e.length_um, e.diameter_nm, params.resistivity_eff_ohm_m)
                   : params.contact_resistance(e.state);
    if (!std::isfinite(r)) continue; // broken contact
    edges.push_back({u, v, 1.0 / r});
  }

  NodalSystem sys(n, edges, term_a, term_b);
  if (!sys.connected()) return std::numeric_limits<double>::infinity();
  double current = sys.terminal_current(params.solver_tolerance, params.max_iterations,
                                        iterations_out);
  if (!(current > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / current;
}

} // namespace

double solve_between(const NetworkGraph& graph, const ElectricalParams& params,
                     const std::vector<int>& nodes_a, const std::vector<int>& nodes_b,
                     int* iterations_out) {
  return two_terminal_resistance(graph, params, nodes_a, nodes_b, iterations_out);
}

SheetResistanceResult solve_sheet_resistance(const NetworkGraph& graph,
                                             const ElectricalParams& params) {
  SheetResistanceResult res;
  int iters = 0;
  double r = two_terminal_resistance(graph, params, {graph.left_electrode},
                                     {graph.right_electrode}, &iters);
  res.solver_iterations = iters;
  if (!std::isfinite(r)) return res; // non-percolating sentinel

  double aspect = graph.domain.width() / graph.domain.height();
  res.rs_ohm_sq = r * aspect; // square-count convention
  res.r0_ohm_sq = res.rs_ohm_sq;
  res.ratio = 1.0;
  res.percolating = true;
  return res;
}

} // namespace nwpat
