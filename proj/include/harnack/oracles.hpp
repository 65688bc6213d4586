#ifndef HARNACK_ORACLES_HPP
#define HARNACK_ORACLES_HPP

// Reference computations that share no code path with the solvers they
// check: closed forms, dense LU on the transition matrix, brute-force
// enumeration. Used by the verify suite and the tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "harnack/graph.hpp"
#include "harnack/rng.hpp"

namespace harnack::oracle {

/// EHI constant of Z at scale R from the affine exit columns of
/// [-2R-1, 2R+1]: h_right(x) = (x + 2R + 1) / (4R + 2), h_left = 1 - h_right,
/// maximised over u, v in [-R, R] by enumeration.
inline double path_ehi_bruteforce(int r) {
  const double span = 4.0 * r + 2.0;
  double best = 1.0;
  for (int side = 0; side < 2; ++side)
    for (int u = -r; u <= r; ++u)
      for (int v = -r; v <= r; ++v) {
        const double hu = (u + 2.0 * r + 1.0) / span;
        const double hv = (v + 2.0 * r + 1.0) / span;
        const double ratio = side == 0 ? hu / hv : (1.0 - hu) / (1.0 - hv);
        best = std::max(best, ratio);
      }
  return best;
}

/// Exit probabilities H(x, z) = P^x(X_tau = z) for x in A, z in dA, from the
/// dense system (I - P_AA) H = P_AdA built out of transition probabilities.
struct DenseExit {
  std::vector<Vertex> interior;
  std::vector<Vertex> boundary;
  Eigen::MatrixXd h;
};

inline DenseExit dense_exit(const WeightedGraph& g, const std::vector<Vertex>& a) {
  DenseExit out;
  out.interior = a;
  std::sort(out.interior.begin(), out.interior.end());
  std::set<Vertex> inside(out.interior.begin(), out.interior.end());
  std::set<Vertex> bset;
  for (Vertex x : out.interior)
    for (const auto& nb : g.neighbors(x))
      if (!inside.count(nb.vertex)) bset.insert(nb.vertex);
  out.boundary.assign(bset.begin(), bset.end());
  const auto n = static_cast<Eigen::Index>(out.interior.size());
  const auto m = static_cast<Eigen::Index>(out.boundary.size());
  auto pos = [](const std::vector<Vertex>& v, Vertex x) {
    return static_cast<Eigen::Index>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vertex x = out.interior[static_cast<std::size_t>(i)];
    for (const auto& nb : g.neighbors(x)) {
      const double p = nb.weight / g.measure(x);
      if (inside.count(nb.vertex)) lhs(i, pos(out.interior, nb.vertex)) -= p;
      else rhs(i, pos(out.boundary, nb.vertex)) += p;
    }
  }
  out.h = lhs.fullPivLu().solve(rhs);
  return out;
}

/// Max of Osc(h, inner) / Osc(h, closure of A) over all nonconstant {0,1}
/// boundary data, h the harmonic extension. |dA| <= 20.
inline double oi_bruteforce(const WeightedGraph& g, const std::vector<Vertex>& a,
                            const std::vector<Vertex>& inner) {
  const DenseExit ex = dense_exit(g, a);
  const std::size_t m = ex.boundary.size();
  if (m > 20) throw precondition_error("oi_bruteforce is limited to 20 boundary vertices");
  std::vector<Eigen::Index> rows;
  for (Vertex v : inner) {
    const auto it = std::lower_bound(ex.interior.begin(), ex.interior.end(), v);
    rows.push_back(static_cast<Eigen::Index>(it - ex.interior.begin()));
  }
  double best = 0.0;
  Eigen::VectorXd f(static_cast<Eigen::Index>(m));
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
    for (std::size_t k = 0; k < m; ++k) f(static_cast<Eigen::Index>(k)) = (mask >> k) & 1U;
    const Eigen::VectorXd h = ex.h * f;
    double lo = f.minCoeff(), hi = f.maxCoeff();
    lo = std::min(lo, h.minCoeff());
    hi = std::max(hi, h.maxCoeff());
    double ilo = std::numeric_limits<double>::infinity(), ihi = -ilo;
    for (auto r : rows) {
      ilo = std::min(ilo, h(r));
      ihi = std::max(ihi, h(r));
    }
    best = std::max(best, (ihi - ilo) / (hi - lo));
  }
  return best;
}

/// Connected graph on n vertices: a random tree plus `extra` random chords,
/// weights uniform in [0.5, 2].
inline WeightedGraph random_graph(std::size_t n, std::size_t extra, RandomStream& rng) {
  std::vector<Edge> edges;
  std::set<std::pair<Vertex, Vertex>> seen;
  auto add = [&](Vertex u, Vertex v) {
    if (u == v) return;
    if (u > v) std::swap(u, v);
    if (seen.insert({u, v}).second) edges.push_back({u, v, 0.5 + 1.5 * rng.uniform()});
  };
  for (std::size_t i = 1; i < n; ++i) add(static_cast<Vertex>(i), static_cast<Vertex>(rng.below(i)));
  for (std::size_t k = 0; k < extra; ++k)
    add(static_cast<Vertex>(rng.below(n)), static_cast<Vertex>(rng.below(n)));
  return build_graph(n, edges);
}

} // namespace harnack::oracle

#endif
