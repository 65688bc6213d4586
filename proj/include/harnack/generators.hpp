#ifndef HARNACK_GENERATORS_HPP
#define HARNACK_GENERATORS_HPP

// Finite truncations of the graph families used in the experiments: lattice
// boxes in Z^d, the three-rail graph with decaying rung weights, balls in the
// lamplighter graph, and bounded weight perturbations.

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "harnack/graph.hpp"
#include "harnack/lamplighter.hpp"

namespace harnack {

/// Unit-weight nearest-neighbour box [-half_width, half_width]^d. Vertices
/// are ordered lexicographically by coordinate; labels are "x", "x,y" or
/// "x,y,z". Vertices on the box faces form the truncation frontier.
inline WeightedGraph lattice_box(int dim, int half_width) {
  if (dim < 1 || dim > 3) throw precondition_error("lattice dimension must be 1, 2 or 3");
  if (half_width < 1) throw precondition_error("lattice half_width must be >= 1");
  const std::int64_t side = 2 * static_cast<std::int64_t>(half_width) + 1;
  std::int64_t count = 1;
  for (int i = 0; i < dim; ++i) {
    count *= side;
    if (count > 5'000'000) throw cap_exceeded("lattice box exceeds 5e6 vertices");
  }
  const auto n = static_cast<std::size_t>(count);

  std::vector<std::string> labels(n);
  std::vector<bool> frontier(n, false);
  std::vector<Edge> edges;
  edges.reserve(n * static_cast<std::size_t>(dim));
  std::vector<int> coord(static_cast<std::size_t>(dim));
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (int k = dim - 1; k >= 0; --k) {
      coord[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(side)) - half_width;
      rest /= static_cast<std::size_t>(side);
    }
    std::string label;
    for (int k = 0; k < dim; ++k) {
      if (k) label += ',';
      label += std::to_string(coord[static_cast<std::size_t>(k)]);
      if (std::abs(coord[static_cast<std::size_t>(k)]) == half_width) frontier[idx] = true;
    }
    labels[idx] = std::move(label);
    std::size_t stride = 1;
    for (int k = dim - 1; k >= 0; --k) {
      if (coord[static_cast<std::size_t>(k)] < half_width)
        edges.push_back({static_cast<Vertex>(idx), static_cast<Vertex>(idx + stride), 1.0});
      stride *= static_cast<std::size_t>(side);
    }
  }
  return build_graph(n, edges, std::move(labels), std::move(frontier));
}

inline std::string lattice_label(std::span<const int> coord) {
  std::string label;
  for (std::size_t k = 0; k < coord.size(); ++k) {
    if (k) label += ',';
    label += std::to_string(coord[k]);
  }
  return label;
}

/// G = Z x {0,1,2} restricted to |n| <= n_max. Rail edges (n,0)-(n+1,0) and
/// the rung triangle at every n have weight 1, except nu_{(n,1),(n,2)} = 2^-|n|.
/// Labels are "n,i". The rail ends (+-n_max, 0) form the frontier.
inline WeightedGraph three_rail(int n_max) {
  if (n_max < 1) throw precondition_error("three_rail needs n_max >= 1");
  const auto count = static_cast<std::size_t>(2 * n_max + 1) * 3;
  auto id = [n_max](int n, int i) { return static_cast<Vertex>((n + n_max) * 3 + i); };
  std::vector<std::string> labels(count);
  std::vector<bool> frontier(count, false);
  std::vector<Edge> edges;
  for (int n = -n_max; n <= n_max; ++n) {
    for (int i = 0; i < 3; ++i) labels[id(n, i)] = std::to_string(n) + "," + std::to_string(i);
    if (n < n_max) edges.push_back({id(n, 0), id(n + 1, 0), 1.0});
    edges.push_back({id(n, 0), id(n, 1), 1.0});
    edges.push_back({id(n, 0), id(n, 2), 1.0});
    edges.push_back({id(n, 1), id(n, 2), std::ldexp(1.0, -std::abs(n))});
  }
  frontier[id(-n_max, 0)] = true;
  frontier[id(n_max, 0)] = true;
  return build_graph(count, edges, std::move(labels), std::move(frontier));
}

struct LamplighterBall {
  WeightedGraph graph;
  Vertex base = 0;                // x0 = (0, all lamps off)
  int radius = 0;                 // R_max; the graph holds closure(B(x0, R_max))
  std::vector<LampState> states;  // indexed by vertex
  std::vector<int> depth;         // BFS distance from x0
  // The four switch-then-walk moves of each vertex at depth <= R_max, in
  // lamp_neighbors order. The move relation is not symmetric; `graph` holds
  // its symmetric closure, where interior vertices have degree 6.
  std::vector<std::array<Vertex, 4>> moves;

  [[nodiscard]] std::optional<Vertex> find(const LampState& s) const { return graph.find(to_label(s)); }
};

/// Unit-weight graph on closure(B(x0, R_max)) in the lamplighter graph.
/// Depth is the word metric of the four moves, found breadth-first from x0;
/// the graph is the symmetric closure of the moves, so every vertex of depth
/// <= R_max has all six neighbours present. Deeper vertices are the
/// truncation frontier.
inline LamplighterBall lamplighter_ball(int r_max, std::size_t state_cap = 10'000'000) {
  if (r_max < 1) throw precondition_error("lamplighter_ball needs R_max >= 1");
  LamplighterBall out;
  out.radius = r_max;
  std::unordered_map<std::string, Vertex> index;
  std::vector<std::string> labels;
  auto intern = [&](const LampState& s, int d) {
    auto label = to_label(s);
    auto [it, fresh] = index.emplace(label, static_cast<Vertex>(labels.size()));
    if (fresh) {
      if (labels.size() >= state_cap) throw cap_exceeded("lamplighter ball exceeds the state cap");
      labels.push_back(std::move(label));
      out.states.push_back(s);
      out.depth.push_back(d);
    }
    return it->second;
  };

  intern(LampState{}, 0);
  std::set<std::pair<Vertex, Vertex>> edge_set;
  auto link = [&](Vertex a, Vertex b) { edge_set.emplace(std::min(a, b), std::max(a, b)); };
  for (std::size_t head = 0; head < out.states.size(); ++head) {
    const int d = out.depth[head];
    if (d > r_max) continue;
    const LampState s = out.states[head];  // copy: intern may reallocate
    out.moves.resize(head + 1);
    int slot = 0;
    for (const auto& t : lamp_neighbors(s)) {
      const Vertex v = intern(t, d + 1);
      out.moves[head][slot++] = v;
      link(static_cast<Vertex>(head), v);
    }
  }
  // Second pass, after BFS so depth order is kept: the states that reach an
  // interior vertex in one move. Their depth is at least R_max + 2, since BFS
  // has already found everything up to R_max + 1.
  const std::size_t interior = out.moves.size();
  for (std::size_t v = 0; v < interior; ++v) {
    if (out.depth[v] > r_max) continue;
    const LampState s = out.states[v];
    for (int step : {-1, 1}) {
      for (bool on : {false, true}) {
        const LampState t = LampState(s.position + step, s.lamps).with_lamp(s.position + step, on);
        const auto known = index.find(to_label(t));
        const Vertex u = known != index.end() ? known->second
                                              : intern(t, static_cast<int>(lamp_distance(t)));
        if (out.depth[u] <= r_max + 1 && known == index.end())
          throw numerical_error("lamplighter enumeration missed a state within R_max + 1");
        link(static_cast<Vertex>(v), u);
      }
    }
  }
  std::vector<Edge> edges;
  edges.reserve(edge_set.size());
  for (const auto& [a, b] : edge_set) edges.push_back({a, b, 1.0});
  std::vector<bool> frontier(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) frontier[v] = out.depth[v] > r_max;
  out.base = 0;
  const std::size_t n = labels.size();
  out.graph = build_graph(n, edges, std::move(labels), std::move(frontier));
  return out;
}

/// nu'_xy = factor * nu_xy with every factor in [1/c1, c1]. `factors` is
/// aligned with g.edges().
inline WeightedGraph perturb_weights(const WeightedGraph& g, std::span<const double> factors,
                                     double c1) {
  if (!(c1 >= 1.0)) throw precondition_error("perturbation band needs c1 >= 1");
  auto edges = g.edges();
  if (factors.size() != edges.size()) throw precondition_error("one factor per edge required");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double f = factors[i];
    if (!(f >= 1.0 / c1 && f <= c1))
      throw precondition_error("factor " + std::to_string(f) + " outside [1/c1, c1]");
    edges[i].weight *= f;
  }
  return build_graph(g.num_vertices(), edges, g.labels(), g.frontier_flags());
}

/// Uniformly scaled copy (every weight times s > 0).
inline WeightedGraph scale_weights(const WeightedGraph& g, double s) {
  if (!(s > 0.0)) throw precondition_error("scale must be positive");
  auto edges = g.edges();
  for (auto& e : edges) e.weight *= s;
  return build_graph(g.num_vertices(), edges, g.labels(), g.frontier_flags());
}

} // namespace harnack

#endif
