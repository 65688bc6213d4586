#ifndef HARNACK_GRAPH_HPP
#define HARNACK_GRAPH_HPP

// Immutable weighted graphs (conductances nu_xy, vertex measure mu), metric
// balls, exterior boundaries, geodesics and the weighted Laplacian.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "harnack/errors.hpp"

namespace harnack {

using Vertex = std::uint32_t;

inline constexpr int kUnreached = -1;

struct Edge {
  Vertex u;
  Vertex v;
  double weight;
};

struct LabeledEdge {
  std::string u;
  std::string v;
  double weight;
};

struct Neighbor {
  Vertex vertex;
  double weight;
};

/// Connected, locally finite graph with symmetric positive conductances.
///
/// Vertices are dense indices. Adjacency is stored in CSR form with each
/// neighbour list sorted by index, and mu(x) is accumulated in that order so
/// reports are bit-reproducible.
///
/// Finite truncations of infinite graphs mark a *frontier*: vertices whose
/// neighbourhood in the infinite graph is not fully present. Any domain on
/// which a function must be harmonic has to avoid the frontier.
class WeightedGraph {
public:
  WeightedGraph() = default;

  [[nodiscard]] std::size_t num_vertices() const { return measure_.size(); }
  [[nodiscard]] std::size_t num_edges() const { return targets_.size() / 2; }

  [[nodiscard]] std::span<const Neighbor> neighbors(Vertex x) const {
    check_vertex(x);
    return {targets_.data() + offsets_[x], targets_.data() + offsets_[x + 1]};
  }

  [[nodiscard]] std::size_t degree(Vertex x) const { return neighbors(x).size(); }

  /// nu_xy, zero when x and y are not adjacent.
  [[nodiscard]] double weight(Vertex x, Vertex y) const {
    check_vertex(y);
    const auto nbrs = neighbors(x);
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), y,
                                     [](const Neighbor& n, Vertex v) { return n.vertex < v; });
    return (it != nbrs.end() && it->vertex == y) ? it->weight : 0.0;
  }

  [[nodiscard]] double measure(Vertex x) const {
    check_vertex(x);
    return measure_[x];
  }

  [[nodiscard]] const std::string& label(Vertex x) const {
    check_vertex(x);
    return labels_[x];
  }

  [[nodiscard]] std::optional<Vertex> find(std::string_view label) const {
    const auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] Vertex vertex(std::string_view label) const {
    if (auto v = find(label)) return *v;
    throw precondition_error("unknown vertex '" + std::string(label) + "'");
  }

  [[nodiscard]] bool on_frontier(Vertex x) const {
    check_vertex(x);
    return !frontier_.empty() && frontier_[x];
  }

  [[nodiscard]] bool is_truncated() const {
    return std::find(frontier_.begin(), frontier_.end(), true) != frontier_.end();
  }

  void check_vertex(Vertex x) const {
    if (x >= measure_.size())
      throw precondition_error("vertex index " + std::to_string(x) + " out of range");
  }

  /// Each undirected edge once, u < v, ascending.
  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (Vertex x = 0; x < num_vertices(); ++x)
      for (const auto& n : neighbors(x))
        if (x < n.vertex) out.push_back({x, n.vertex, n.weight});
    return out;
  }

  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] const std::vector<bool>& frontier_flags() const { return frontier_; }

  friend WeightedGraph build_graph(std::size_t, std::span<const Edge>, std::vector<std::string>,
                                   std::vector<bool>);

private:
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> targets_;
  std::vector<double> measure_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Vertex> index_;
  std::vector<bool> frontier_;
};

/// Builds a graph on vertices 0..n-1. Labels default to the decimal index.
/// Duplicate edges with identical weight are merged; anything else that
/// breaks symmetry, positivity or connectivity is rejected.
inline WeightedGraph build_graph(std::size_t n, std::span<const Edge> edge_list,
                                 std::vector<std::string> labels = {},
                                 std::vector<bool> frontier = {}) {
  if (n == 0 || edge_list.empty()) throw precondition_error("graph needs at least one edge");
  if (n > std::numeric_limits<Vertex>::max()) throw precondition_error("too many vertices");
  if (!labels.empty() && labels.size() != n) throw precondition_error("label count mismatch");
  if (!frontier.empty() && frontier.size() != n) throw precondition_error("frontier size mismatch");

  std::vector<std::vector<Neighbor>> adj(n);
  for (const auto& e : edge_list) {
    if (e.u >= n || e.v >= n) throw precondition_error("edge endpoint out of range");
    if (e.u == e.v) throw precondition_error("self-loop at vertex " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw precondition_error("edge weights must be positive and finite");
    adj[e.u].push_back({e.v, e.weight});
    adj[e.v].push_back({e.u, e.weight});
  }

  WeightedGraph g;
  g.offsets_.assign(n + 1, 0);
  g.measure_.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    auto& list = adj[x];
    std::stable_sort(list.begin(), list.end(),
                     [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    std::vector<Neighbor> merged;
    merged.reserve(list.size());
    for (const auto& nb : list) {
      if (!merged.empty() && merged.back().vertex == nb.vertex) {
        if (merged.back().weight != nb.weight)
          throw precondition_error("duplicate edge with conflicting weights at vertex " +
                                   std::to_string(x));
        continue;
      }
      merged.push_back(nb);
    }
    double mu = 0.0;
    for (const auto& nb : merged) mu += nb.weight;
    g.measure_[x] = mu;
    g.offsets_[x + 1] = g.offsets_[x] + merged.size();
    g.targets_.insert(g.targets_.end(), merged.begin(), merged.end());
  }

  // connectivity
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex x = stack.back();
    stack.pop_back();
    for (std::size_t k = g.offsets_[x]; k < g.offsets_[x + 1]; ++k) {
      const Vertex y = g.targets_[k].vertex;
      if (!seen[y]) {
        seen[y] = 1;
        ++reached;
        stack.push_back(y);
      }
    }
  }
  if (reached != n) throw precondition_error("graph is disconnected");

  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t x = 0; x < n; ++x) labels.push_back(std::to_string(x));
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!g.index_.emplace(labels[x], static_cast<Vertex>(x)).second)
      throw precondition_error("duplicate vertex label '" + labels[x] + "'");
  }
  g.labels_ = std::move(labels);
  g.frontier_ = std::move(frontier);
  return g;
}

/// Builds a graph from string-labelled edges. Vertices are indexed in order
/// of first appearance.
inline WeightedGraph build_graph(std::span<const LabeledEdge> edge_list) {
  std::unordered_map<std::string, Vertex> index;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  auto intern = [&](const std::string& s) {
    auto [it, fresh] = index.emplace(s, static_cast<Vertex>(labels.size()));
    if (fresh) labels.push_back(s);
    return it->second;
  };
  for (const auto& e : edge_list) {
    const Vertex u = intern(e.u);
    const Vertex v = intern(e.v);
    edges.push_back({u, v, e.weight});
  }
  const std::size_t n = labels.size();
  return build_graph(n, edges, std::move(labels));
}

/// p_xy = nu_xy / mu(x).
inline double transition_prob(const WeightedGraph& g, Vertex x, Vertex y) {
  return g.weight(x, y) / g.measure(x);
}

/// Smallest one-step transition probability over all edges, in both
/// directions. The graph has controlled weights at level p iff this is >= p.
inline double controlled_weights_p0(const WeightedGraph& g) {
  double p0 = 1.0;
  for (Vertex x = 0; x < g.num_vertices(); ++x)
    for (const auto& n : g.neighbors(x)) p0 = std::min(p0, n.weight / g.measure(x));
  return p0;
}

// ---------------------------------------------------------------------------
// Vertex sets and fields

/// Sorted set of vertex indices, optionally tagged as the ball B(center, radius).
class VertexSet {
public:
  VertexSet() = default;

  explicit VertexSet(std::vector<Vertex> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  static VertexSet ball_tagged(std::vector<Vertex> members, Vertex center, int radius) {
    VertexSet s(std::move(members));
    s.center_ = center;
    s.radius_ = radius;
    return s;
  }

  [[nodiscard]] bool contains(Vertex v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }

  /// Position of v in the sorted member list, or nullopt.
  [[nodiscard]] std::optional<std::size_t> index_of(Vertex v) const {
    const auto it = std::lower_bound(members_.begin(), members_.end(), v);
    if (it == members_.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - members_.begin());
  }

  [[nodiscard]] std::size_t size() const { return members_.size(); }
  [[nodiscard]] bool empty() const { return members_.empty(); }
  [[nodiscard]] const std::vector<Vertex>& members() const { return members_; }
  [[nodiscard]] auto begin() const { return members_.begin(); }
  [[nodiscard]] auto end() const { return members_.end(); }
  [[nodiscard]] Vertex operator[](std::size_t i) const { return members_[i]; }

  [[nodiscard]] std::optional<Vertex> center() const { return center_; }
  [[nodiscard]] std::optional<int> radius() const { return radius_; }

  [[nodiscard]] bool is_subset_of(const VertexSet& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end());
  }

  friend bool operator==(const VertexSet& a, const VertexSet& b) {
    return a.members_ == b.members_;
  }

private:
  std::vector<Vertex> members_;
  std::optional<Vertex> center_;
  std::optional<int> radius_;
};

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  std::vector<Vertex> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return VertexSet(std::move(out));
}

inline VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  std::vector<Vertex> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return VertexSet(std::move(out));
}

inline VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  std::vector<Vertex> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return VertexSet(std::move(out));
}

/// Real values on a vertex set. Values are stored aligned with the sorted
/// domain members; reading outside the domain is an error.
class VertexField {
public:
  VertexField() = default;
  VertexField(VertexSet domain, std::vector<double> values)
      : domain_(std::move(domain)), values_(std::move(values)) {
    if (values_.size() != domain_.size())
      throw precondition_error("field value count does not match its domain");
  }

  template <class F>
  static VertexField from_function(VertexSet domain, F&& f) {
    std::vector<double> vals;
    vals.reserve(domain.size());
    for (Vertex v : domain) vals.push_back(f(v));
    return VertexField(std::move(domain), std::move(vals));
  }

  [[nodiscard]] double at(Vertex v) const {
    if (auto i = domain_.index_of(v)) return values_[*i];
    throw precondition_error("field has no value at vertex " + std::to_string(v));
  }

  [[nodiscard]] bool defined_at(Vertex v) const { return domain_.contains(v); }
  [[nodiscard]] const VertexSet& domain() const { return domain_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] std::vector<double>& values() { return values_; }

private:
  VertexSet domain_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Metric operations

/// Breadth-first graph distances from x, stopping after max_radius layers.
/// Unreached vertices hold kUnreached.
inline std::vector<int> bfs_distances(const WeightedGraph& g, Vertex x,
                                      int max_radius = std::numeric_limits<int>::max()) {
  std::vector<int> dist(g.num_vertices(), kUnreached);
  dist.at(x) = 0;
  std::deque<Vertex> queue{x};
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    if (dist[u] >= max_radius) continue;
    for (const auto& n : g.neighbors(u)) {
      if (dist[n.vertex] == kUnreached) {
        dist[n.vertex] = dist[u] + 1;
        queue.push_back(n.vertex);
      }
    }
  }
  return dist;
}

inline int distance(const WeightedGraph& g, Vertex x, Vertex y) {
  g.check_vertex(y);
  if (x == y) return 0;
  // bidirectional search is not worth it at desk scale
  return bfs_distances(g, x)[y];
}

/// B(x, r) = {y : d(x, y) <= r}.
inline VertexSet ball(const WeightedGraph& g, Vertex x, int r) {
  g.check_vertex(x);
  if (r < 0) throw precondition_error("ball radius must be nonnegative");
  std::vector<Vertex> members{x};
  std::vector<int> dist(g.num_vertices(), kUnreached);
  dist[x] = 0;
  for (std::size_t head = 0; head < members.size(); ++head) {
    const Vertex u = members[head];
    if (dist[u] >= r) continue;
    for (const auto& n : g.neighbors(u)) {
      if (dist[n.vertex] == kUnreached) {
        dist[n.vertex] = dist[u] + 1;
        members.push_back(n.vertex);
      }
    }
  }
  return VertexSet::ball_tagged(std::move(members), x, r);
}

/// Sphere {y : d(x, y) = r}.
inline VertexSet sphere(const WeightedGraph& g, Vertex x, int r) {
  const auto dist = bfs_distances(g, x, r);
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (dist[v] == r) out.push_back(v);
  return VertexSet(std::move(out));
}

/// Exterior boundary: vertices outside A adjacent to some vertex of A.
inline VertexSet exterior_boundary(const WeightedGraph& g, const VertexSet& a) {
  std::vector<Vertex> out;
  for (Vertex x : a)
    for (const auto& n : g.neighbors(x))
      if (!a.contains(n.vertex)) out.push_back(n.vertex);
  return VertexSet(std::move(out));
}

inline VertexSet closure(const WeightedGraph& g, const VertexSet& a) {
  return set_union(a, exterior_boundary(g, a));
}

/// Shortest path from x to y, x first. Walking back from y, each step picks
/// the smallest-index neighbour one layer closer to x, so the result is the
/// geodesic whose reversal is lexicographically least.
inline std::vector<Vertex> geodesic(const WeightedGraph& g, Vertex x, Vertex y) {
  g.check_vertex(y);
  const auto dist = bfs_distances(g, x);
  std::vector<Vertex> path{y};
  Vertex cur = y;
  while (cur != x) {
    Vertex next = cur;
    for (const auto& n : g.neighbors(cur)) {
      if (dist[n.vertex] == dist[cur] - 1) {
        next = n.vertex;  // neighbours are sorted, first hit is the smallest
        break;
      }
    }
    path.push_back(next);
    cur = next;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/// Delta f(x) = (1/mu_x) sum_y nu_xy (f(y) - f(x)).
inline double laplacian_apply(const WeightedGraph& g, const VertexField& f, Vertex x) {
  const double fx = f.at(x);
  double acc = 0.0;
  for (const auto& n : g.neighbors(x)) {
    if (!f.defined_at(n.vertex))
      throw precondition_error("laplacian needs a value at neighbour " + g.label(n.vertex));
    acc += n.weight * (f.at(n.vertex) - fx);
  }
  return acc / g.measure(x);
}

/// Throws truncation_error when a vertex of `domain` sits on the graph's
/// truncation frontier, i.e. its neighbourhood is incomplete.
inline void require_untruncated(const WeightedGraph& g, const VertexSet& domain,
                                std::string_view what) {
  for (Vertex v : domain) {
    if (g.on_frontier(v)) {
      std::string msg = std::string(what) + " reaches the truncation frontier at vertex '" +
                        g.label(v) + "'";
      if (domain.center() && domain.radius()) {
        const int d = distance(g, *domain.center(), v);
        msg += " (distance " + std::to_string(d) + " from the center; the radius-" +
               std::to_string(*domain.radius()) + " ball needs margin " +
               std::to_string(*domain.radius() - d + 1) + " more)";
      }
      throw truncation_error(msg);
    }
  }
}

} // namespace harnack

#endif
