#ifndef HARNACK_HARNACK_HPP
#define HARNACK_HARNACK_HPP

// Harnack-type constants of a weighted graph at a given center and scale.
//
// EHI constant. Every nonnegative h harmonic on B(x0, 2R) is a nonnegative
// combination sum_z h(z) h_z of the harmonic measure columns of
// dB(x0, 2R). The ratio sup_B h / inf_B h over B = B(x0, R) is a ratio of a
// convex and a concave positively homogeneous functional on that cone, so
// its supremum is attained on an extreme ray:
//
//     C1(x0, R) = max_z  max_{u in B} h_z(u) / min_{v in B} h_z(v).
//
// OI constant. Normalise boundary data to [0, 1]; by the maximum principle
// Osc(h, closure B(x0, KR)) is the boundary oscillation. For fixed u, v the
// difference h(u) - h(v) = sum_z f(z) (h_z(u) - h_z(v)) is maximised by the
// indicator of {z : h_z(u) > h_z(v)}, so rho is the largest total variation
// distance between exit laws of inner points.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "harnack/graph.hpp"
#include "harnack/potential.hpp"

namespace harnack {

enum class Condition { ehi, hg, annulus, oi };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::ehi: return "EHI";
    case Condition::hg: return "HG";
    case Condition::annulus: return "ANNULUS";
    case Condition::oi: return "OI";
  }
  return "?";
}

struct Witness {
  std::optional<Vertex> boundary;  // z for EHI
  Vertex u = 0;                    // argmax side
  Vertex v = 0;                    // argmin side
};

struct HarnackReport {
  Condition condition = Condition::ehi;
  Vertex center = 0;
  int radius = 0;
  std::optional<double> k;         // OI only
  int outer_radius = 0;            // 2R, ceil(KR), or the D radius
  double constant = 0.0;
  Witness witness;
  double residual = 0.0;           // worst row-sum / harmonicity defect seen
};

/// ceil(K R) for the OI outer ball, ignoring floating noise below 1e-9.
inline int outer_radius_for(double k, int r) {
  return static_cast<int>(std::ceil(k * static_cast<double>(r) - 1e-9));
}

/// C1(x0, R): max ratio sup/inf over B(x0, R) of nonnegative functions
/// harmonic on B(x0, 2R).
inline HarnackReport ehi_constant(const WeightedGraph& g, Vertex x0, int r) {
  if (r < 0) throw precondition_error("EHI radius must be nonnegative");
  const VertexSet outer = ball(g, x0, 2 * r);
  require_untruncated(g, outer, "EHI domain B(x0,2R)");
  const VertexSet inner = ball(g, x0, r);
  const DirichletSolver solver(g, outer);
  const Eigen::MatrixXd h = solver.harmonic_measures();

  std::vector<Eigen::Index> rows;
  rows.reserve(inner.size());
  for (Vertex v : inner) rows.push_back(static_cast<Eigen::Index>(*outer.index_of(v)));

  HarnackReport rep;
  rep.condition = Condition::ehi;
  rep.center = x0;
  rep.radius = r;
  rep.outer_radius = 2 * r;
  rep.constant = -1.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    rep.residual = std::max(rep.residual, std::abs(h.row(i).sum() - 1.0));

  for (std::size_t k = 0; k < solver.boundary().size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (h(rows[i], col) > h(rows[imax], col)) imax = i;
      if (h(rows[i], col) < h(rows[imin], col)) imin = i;
    }
    const double lo = h(rows[imin], col);
    if (!(lo > 0.0))
      throw numerical_error("harmonic measure vanishes at vertex '" + g.label(inner[imin]) + "'");
    const double ratio = h(rows[imax], col) / lo;
    if (ratio > rep.constant) {
      rep.constant = ratio;
      rep.witness = {solver.boundary()[k], inner[imax], inner[imin]};
    }
  }
  return rep;
}

namespace detail {

struct GreenOnDomain {
  GreenColumn column;
  std::vector<int> dist;  // from x0, over the whole graph
};

inline GreenOnDomain green_for_condition(const WeightedGraph& g, Vertex x0, int r,
                                         const VertexSet& d, const char* what) {
  if (r < 1) throw precondition_error(std::string(what) + " needs R >= 1");
  const VertexSet inner2 = ball(g, x0, 2 * r);
  if (!inner2.is_subset_of(d)) throw precondition_error(std::string(what) + " needs B(x0,2R) inside D");
  require_untruncated(g, d, "Green's function domain D");
  GreenOnDomain out{green_column(g, d, x0), bfs_distances(g, x0)};
  return out;
}

} // namespace detail

/// max_{y in D, d(x0,y) >= R} g_D(x0,y) / min_{y in B(x0,R)} g_D(x0,y).
///
/// The comparison set is the complement of the open ball, so the maximum is
/// attained on the sphere of radius R (maximum principle) and the ratio is
/// never below the annulus ratio on the same inputs.
inline HarnackReport hg_constant(const WeightedGraph& g, Vertex x0, int r, const VertexSet& d) {
  const auto gd = detail::green_for_condition(g, x0, r, d, "HG");
  const auto& col = gd.column;
  HarnackReport rep;
  rep.condition = Condition::hg;
  rep.center = x0;
  rep.radius = r;
  rep.outer_radius = d.radius().value_or(-1);
  std::optional<std::size_t> imax, imin;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int dist = gd.dist[d[i]];
    if (dist >= r && (!imax || col.values[i] > col.values[*imax])) imax = i;
    if (dist <= r && (!imin || col.values[i] < col.values[*imin])) imin = i;
  }
  if (!imax) throw precondition_error("HG: D has no vertex outside B(x0,R)");
  rep.constant = col.values[*imax] / col.values[*imin];
  rep.witness = {std::nullopt, d[*imax], d[*imin]};
  return rep;
}

/// max over x, y on the sphere d(x0, .) = R of g_D(x0,x) / g_D(x0,y).
inline HarnackReport annulus_ratio(const WeightedGraph& g, Vertex x0, int r, const VertexSet& d) {
  const auto gd = detail::green_for_condition(g, x0, r, d, "annulus ratio");
  const auto& col = gd.column;
  std::optional<std::size_t> imax, imin;
  std::size_t on_sphere = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (gd.dist[d[i]] != r) continue;
    ++on_sphere;
    if (!imax || col.values[i] > col.values[*imax]) imax = i;
    if (!imin || col.values[i] < col.values[*imin]) imin = i;
  }
  if (on_sphere < 2) throw precondition_error("annulus ratio needs at least two sphere vertices");
  HarnackReport rep;
  rep.condition = Condition::annulus;
  rep.center = x0;
  rep.radius = r;
  rep.outer_radius = d.radius().value_or(-1);
  rep.constant = col.values[*imax] / col.values[*imin];
  rep.witness = {std::nullopt, d[*imax], d[*imin]};
  return rep;
}

/// rho of OI(K) at (x0, R): the largest total variation distance between the
/// exit laws from B(x0, ceil(KR)) of two points of B(x0, R).
inline HarnackReport oi_rho(const WeightedGraph& g, Vertex x0, int r, double k) {
  if (!(k > 1.0)) throw precondition_error("OI needs K > 1");
  if (r < 0) throw precondition_error("OI radius must be nonnegative");
  const int outer_r = outer_radius_for(k, r);
  const VertexSet outer = ball(g, x0, outer_r);
  require_untruncated(g, outer, "OI domain B(x0,ceil(KR))");
  const VertexSet inner = ball(g, x0, r);
  const DirichletSolver solver(g, outer);
  const Eigen::MatrixXd h = solver.harmonic_measures();

  HarnackReport rep;
  rep.condition = Condition::oi;
  rep.center = x0;
  rep.radius = r;
  rep.k = k;
  rep.outer_radius = outer_r;
  rep.constant = 0.0;
  rep.witness = {std::nullopt, x0, x0};
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    rep.residual = std::max(rep.residual, std::abs(h.row(i).sum() - 1.0));

  std::vector<Eigen::Index> rows;
  for (Vertex v : inner) rows.push_back(static_cast<Eigen::Index>(*outer.index_of(v)));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < rows.size(); ++b) {
      if (a == b) continue;
      double tv = 0.0;
      for (Eigen::Index c = 0; c < h.cols(); ++c) tv += std::max(0.0, h(rows[a], c) - h(rows[b], c));
      if (tv > rep.constant) {
        rep.constant = tv;
        rep.witness = {std::nullopt, inner[a], inner[b]};
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Ball-growth bound from EHI

struct ChainLink {
  int scale = 0;        // j
  Vertex on_path = 0;   // y_j, d(y_j, z) = 3^j
  Vertex center = 0;    // z_j, or x0 for the final link when 2 * 3^N > R
  int radius = 0;       // 3^j
};

struct BoundaryCheck {
  Vertex z = 0;
  double hit_probability = 0.0;  // h_z(x0)
  double lower_bound = 0.0;      // (p0 / C1) C1^-N
  bool passed = false;
  std::vector<ChainLink> chain;
};

struct Theorem1Report {
  Vertex center = 0;
  int radius = 0;
  int n = 0;                    // 3^N <= R < 3^{N+1}
  double p0 = 0.0;              // controlled-weights level over B(x0, R)
  double c1 = 0.0;              // max EHI constant over the chained balls
  double theta = 0.0;           // log C1 / log 3
  std::size_t boundary_size = 0;
  double counting_bound = 0.0;  // |dB| (p0/C1) R^-theta, must be <= 1
  double exit_mass = 0.0;       // sum_z h_z(x0), should be 1
  std::size_t chained_balls = 0;
  std::vector<BoundaryCheck> checks;
  bool all_passed = false;
};

/// Checks the ball-growth chain at (x0, R): for every z on the exterior
/// boundary of B = B(x0, R), walk the geodesic from z to x0, place y_j at
/// distance 3^j and z_j at distance 2 * 3^j from z (z_N = x0 when
/// 2 * 3^N > R), take C1 as the largest EHI constant of the balls
/// B(z_j, 3^j), and verify h_z(x0) >= (p0/C1) C1^-N together with
/// |dB| (p0/C1) R^-theta <= 1.
inline Theorem1Report theorem1_check(const WeightedGraph& g, Vertex x0, int r) {
  if (r < 1) throw precondition_error("theorem1_check needs R >= 1");
  const VertexSet b = ball(g, x0, r);
  require_untruncated(g, b, "B(x0,R)");

  Theorem1Report rep;
  rep.center = x0;
  rep.radius = r;
  int pow3 = 1;
  while (pow3 * 3 <= r) {
    pow3 *= 3;
    ++rep.n;
  }

  rep.p0 = 1.0;
  for (Vertex x : b)
    for (const auto& nb : g.neighbors(x)) rep.p0 = std::min(rep.p0, nb.weight / g.measure(x));
  if (!(rep.p0 > 0.0)) throw precondition_error("controlled weights fail inside B(x0,R)");

  const DirichletSolver solver(g, b);
  const Eigen::MatrixXd h = solver.harmonic_measures();
  const auto x0_row = static_cast<Eigen::Index>(*b.index_of(x0));
  rep.boundary_size = solver.boundary().size();

  std::map<std::pair<Vertex, int>, double> ehi_cache;
  rep.c1 = 1.0;
  for (std::size_t k = 0; k < solver.boundary().size(); ++k) {
    BoundaryCheck check;
    check.z = solver.boundary()[k];
    check.hit_probability = h(x0_row, static_cast<Eigen::Index>(k));
    rep.exit_mass += check.hit_probability;
    const auto path = geodesic(g, check.z, x0);  // z first, length R + 1
    int scale = 1;
    for (int j = 0; j <= rep.n; ++j, scale *= 3) {
      ChainLink link;
      link.scale = j;
      link.on_path = path[static_cast<std::size_t>(scale)];
      link.radius = scale;
      const bool last_adjusted = j == rep.n && 2 * scale > r;
      link.center = last_adjusted ? x0 : path[static_cast<std::size_t>(2 * scale)];
      const auto key = std::make_pair(link.center, link.radius);
      auto it = ehi_cache.find(key);
      if (it == ehi_cache.end())
        it = ehi_cache.emplace(key, ehi_constant(g, link.center, link.radius).constant).first;
      rep.c1 = std::max(rep.c1, it->second);
      check.chain.push_back(link);
    }
    rep.checks.push_back(std::move(check));
  }
  rep.chained_balls = ehi_cache.size();
  rep.theta = std::log(rep.c1) / std::log(3.0);
  const double c_low = rep.p0 / rep.c1;
  const double bound = c_low * std::pow(rep.c1, -rep.n);
  rep.all_passed = true;
  for (auto& c : rep.checks) {
    c.lower_bound = bound;
    c.passed = c.hit_probability >= bound;
    rep.all_passed = rep.all_passed && c.passed;
  }
  rep.counting_bound = static_cast<double>(rep.boundary_size) * c_low *
                       std::pow(static_cast<double>(r), -rep.theta);
  rep.all_passed = rep.all_passed && rep.counting_bound <= 1.0;
  return rep;
}

} // namespace harnack

#endif
