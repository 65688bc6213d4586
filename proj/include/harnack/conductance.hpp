#ifndef HARNACK_CONDUCTANCE_HPP
#define HARNACK_CONDUCTANCE_HPP

// Dirichlet forms on a vertex set, effective conductance between two subsets
// and the dumbbell ratio.
//
// The form is the plain double sum E_D(f,f) = sum_{x in D} sum_{y in D}
// nu_xy (f(x) - f(y))^2, so every edge inside D counts twice: a path of n unit
// edges between its endpoints has conductance 2/n. Functions are free on
// D \ (A u B) and vertices outside D do not enter the form, which makes the
// minimiser harmonic for the walk restricted to D (reflecting at D's edge).

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "harnack/graph.hpp"
#include "harnack/parallel.hpp"
#include "harnack/rng.hpp"

namespace harnack {

inline double dirichlet_energy(const WeightedGraph& g, const VertexSet& d, const VertexField& f) {
  double total = 0.0;
  for (Vertex x : d) {
    const double fx = f.at(x);
    for (const auto& nb : g.neighbors(x)) {
      if (!d.contains(nb.vertex)) continue;
      const double diff = fx - f.at(nb.vertex);
      total += nb.weight * diff * diff;
    }
  }
  return total;
}

struct ConductanceResult {
  double value = 0.0;
  VertexField potential;          // on D; 1 on A, 0 on B
  double energy_residual = 0.0;   // max |sum_y nu_xy (f(y) - f(x))| over free vertices
  double min_random_energy = 0.0; // smallest energy among random feasible competitors
  bool variational_check = true;  // every competitor had energy >= value - 1e-9
};

/// C_D(A, B) = inf { E_D(f, f) : f = 1 on A, f = 0 on B }.
inline ConductanceResult effective_conductance(const WeightedGraph& g, const VertexSet& d,
                                               const VertexSet& a, const VertexSet& b,
                                               int random_checks = 20, std::uint64_t check_seed = 0) {
  if (a.empty() || b.empty()) throw precondition_error("conductance needs nonempty A and B");
  if (!set_intersection(a, b).empty()) throw precondition_error("conductance needs disjoint A and B");
  if (!a.is_subset_of(d) || !b.is_subset_of(d))
    throw precondition_error("conductance needs A and B inside D");

  const std::size_t n = d.size();
  std::vector<double> f(n, 0.0);
  // -1 fixed, otherwise index into the unknown vector
  std::vector<long> unknown(n, -1);
  std::vector<std::size_t> free_vertices;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.contains(d[i])) f[i] = 1.0;
    else if (!b.contains(d[i])) free_vertices.push_back(i);
  }

  // Free components with no edge to A u B are isolated inside D; any
  // constant minimises there, take 0.
  std::vector<char> anchored(n, 0);
  {
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i)
      if (a.contains(d[i]) || b.contains(d[i])) {
        anchored[i] = 1;
        stack.push_back(i);
      }
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(d[i]))
        if (auto j = d.index_of(nb.vertex); j && !anchored[*j]) {
          anchored[*j] = 1;
          stack.push_back(*j);
        }
    }
  }
  long count = 0;
  for (std::size_t i : free_vertices)
    if (anchored[i]) unknown[i] = count++;

  if (count > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count);
    for (std::size_t i : free_vertices) {
      if (unknown[i] < 0) continue;
      double diag = 0.0;
      for (const auto& nb : g.neighbors(d[i])) {
        const auto j = d.index_of(nb.vertex);
        if (!j) continue;
        diag += nb.weight;
        if (unknown[*j] >= 0) triplets.emplace_back(unknown[i], unknown[*j], -nb.weight);
        else rhs(unknown[i]) += nb.weight * f[*j];
      }
      triplets.emplace_back(unknown[i], unknown[i], diag);
    }
    Eigen::SparseMatrix<double> m(count, count);
    m.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(m);
    if (solver.info() != Eigen::Success) throw numerical_error("conductance system is singular");
    const Eigen::VectorXd sol = solver.solve(rhs);
    for (std::size_t i : free_vertices)
      if (unknown[i] >= 0) f[i] = std::clamp(sol(unknown[i]), 0.0, 1.0);
  }

  ConductanceResult out;
  out.potential = VertexField(d, f);
  out.value = dirichlet_energy(g, d, out.potential);
  for (std::size_t i : free_vertices) {
    double flux = 0.0;
    for (const auto& nb : g.neighbors(d[i]))
      if (auto j = d.index_of(nb.vertex)) flux += nb.weight * (f[*j] - f[i]);
    out.energy_residual = std::max(out.energy_residual, std::abs(flux));
  }

  out.min_random_energy = std::numeric_limits<double>::infinity();
  RandomStream rng(check_seed, 0x5eed);
  for (int trial = 0; trial < random_checks; ++trial) {
    std::vector<double> competitor = f;
    for (std::size_t i : free_vertices) {
      // mix of perturbations of the minimiser and fully random values
      competitor[i] = trial % 2 == 0 ? std::clamp(f[i] + 0.2 * (rng.uniform() - 0.5), 0.0, 1.0)
                                     : rng.uniform();
    }
    const double e = dirichlet_energy(g, d, VertexField(d, std::move(competitor)));
    out.min_random_energy = std::min(out.min_random_energy, e);
    if (e < out.value - 1e-9) out.variational_check = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dumbbell condition

struct DumbbellPair {
  Vertex x = 0;
  Vertex y = 0;
  int separation = 0;
  double conductance = 0.0;
};

struct DumbbellReport {
  Vertex center = 0;
  int radius = 0;
  int head_radius = 0;              // floor(R/10)
  std::size_t candidate_pairs = 0;  // well-separated pairs with disjoint heads
  std::size_t overlapping_heads = 0;
  bool sampled = false;
  std::vector<DumbbellPair> pairs;  // the pairs actually evaluated
  double max_conductance = 0.0;
  double min_conductance = 0.0;
  double ratio = 0.0;
  DumbbellPair max_witness;
  DumbbellPair min_witness;
  bool variational_check = true;
};

inline constexpr std::size_t kDumbbellPairCap = 20'000;

/// Ratio max/min of C_D(B(x, R/10), B(y, R/10)) over unordered pairs with
/// d(x, x0) <= R/2, d(y, x0) <= R/2 and d(x, y) >= R/3, D = B(x0, R).
/// Distance constraints are compared exactly (2 d <= R, 3 d >= R); heads use
/// floor(R/10). Above `cap` pairs a deterministic subsample stratified by
/// separation is used.
inline DumbbellReport dumbbell_ratio(const WeightedGraph& g, Vertex x0, int r,
                                     std::size_t cap = kDumbbellPairCap, unsigned threads = 1) {
  if (r < 10) throw precondition_error("dumbbell ratio needs R >= 10");
  if (cap == 0) throw precondition_error("pair cap must be positive");
  const VertexSet d = ball(g, x0, r);
  require_untruncated(g, d, "dumbbell domain B(x0,R)");

  DumbbellReport rep;
  rep.center = x0;
  rep.radius = r;
  rep.head_radius = r / 10;

  const auto from_center = bfs_distances(g, x0, r);
  std::vector<Vertex> ends;
  for (Vertex v : d)
    if (2 * from_center[v] <= r) ends.push_back(v);

  std::vector<VertexSet> heads;
  std::vector<std::vector<int>> dist_from;
  heads.reserve(ends.size());
  for (Vertex v : ends) {
    heads.push_back(ball(g, v, rep.head_radius));
    dist_from.push_back(bfs_distances(g, v, r));
  }

  // candidate pairs grouped by separation shell
  std::map<int, std::vector<DumbbellPair>> shells;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      const int sep = dist_from[i][ends[j]];
      if (sep == kUnreached || 3 * sep < r) continue;
      if (!set_intersection(heads[i], heads[j]).empty()) {
        ++rep.overlapping_heads;
        continue;
      }
      shells[sep].push_back({ends[i], ends[j], sep, 0.0});
      ++rep.candidate_pairs;
    }
  }
  if (rep.candidate_pairs == 0) throw precondition_error("no admissible dumbbell pairs");

  rep.sampled = rep.candidate_pairs > cap;
  for (auto& [sep, list] : shells) {
    if (!rep.sampled) {
      rep.pairs.insert(rep.pairs.end(), list.begin(), list.end());
      continue;
    }
    const std::size_t take = std::max<std::size_t>(1, list.size() * cap / rep.candidate_pairs);
    for (std::size_t t = 0; t < take; ++t) rep.pairs.push_back(list[t * list.size() / take]);
  }

  auto head_of = [&](Vertex v) -> const VertexSet& {
    const auto it = std::lower_bound(ends.begin(), ends.end(), v);
    return heads[static_cast<std::size_t>(it - ends.begin())];
  };
  std::vector<char> ok(rep.pairs.size(), 1);
  parallel_for(rep.pairs.size(), threads, [&](std::size_t i) {
    auto& p = rep.pairs[i];
    const auto res = effective_conductance(g, d, head_of(p.x), head_of(p.y), 2, i);
    p.conductance = res.value;
    ok[i] = res.variational_check;
  });

  rep.max_witness = rep.min_witness = rep.pairs.front();
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const auto& p = rep.pairs[i];
    if (p.conductance > rep.max_witness.conductance) rep.max_witness = p;
    if (p.conductance < rep.min_witness.conductance) rep.min_witness = p;
    rep.variational_check = rep.variational_check && ok[i];
  }
  rep.max_conductance = rep.max_witness.conductance;
  rep.min_conductance = rep.min_witness.conductance;
  if (!(rep.min_conductance > 0.0)) throw numerical_error("dumbbell pair with zero conductance");
  rep.ratio = rep.max_conductance / rep.min_conductance;
  return rep;
}

} // namespace harnack

#endif
