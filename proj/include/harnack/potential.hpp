#ifndef HARNACK_POTENTIAL_HPP
#define HARNACK_POTENTIAL_HPP

// Harmonic extension, harmonic measure and Green's functions on finite
// domains.
//
// For a finite A with exterior boundary dA, multiplying Delta h = 0 by mu
// gives the symmetric positive definite system
//
//     mu(x) h(x) - sum_{y in A} nu_xy h(y) = sum_{z in dA} nu_xz h(z),  x in A.
//
// The same matrix L_A inverts the killed walk: the Green's function of A is
// g_A(x0, .) = L_A^{-1} e_{x0}, and the harmonic measure column of z is
// h_z = L_A^{-1} nu(., z). One factorisation serves every right-hand side.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "harnack/graph.hpp"

namespace harnack {

inline constexpr double kHarmonicTol = 1e-10;     // times max |boundary value|
inline constexpr double kProbabilityTol = 1e-10;  // normalisation of exit laws
inline constexpr std::size_t kDirectSolverLimit = 200'000;

/// Exit law of the walk from a point on the exterior boundary of a domain.
struct ExitDistribution {
  VertexSet boundary;
  std::vector<double> probs;  // aligned with boundary members

  [[nodiscard]] double prob(Vertex z) const {
    if (auto i = boundary.index_of(z)) return probs[*i];
    return 0.0;
  }
};

/// g_D(source, .) on D; zero outside D.
struct GreenColumn {
  VertexSet domain;
  Vertex source = 0;
  std::vector<double> values;  // aligned with domain members

  [[nodiscard]] double value(Vertex y) const {
    if (auto i = domain.index_of(y)) return values[*i];
    return 0.0;
  }

  /// The column as a field on closure(D), zero on the exterior boundary.
  [[nodiscard]] VertexField as_field(const WeightedGraph& g) const {
    VertexSet cl = closure(g, domain);
    return VertexField::from_function(cl, [this](Vertex v) { return value(v); });
  }
};

/// Factorisation of L_A for one finite domain A.
class DirichletSolver {
public:
  using SparseMatrix = Eigen::SparseMatrix<double>;

  DirichletSolver(const WeightedGraph& g, VertexSet domain)
      : graph_(&g), domain_(std::move(domain)) {
    if (domain_.empty()) throw precondition_error("domain must be nonempty");
    for (Vertex v : domain_) g.check_vertex(v);
    boundary_ = exterior_boundary(g, domain_);
    if (boundary_.empty())
      throw precondition_error("domain has empty exterior boundary; exit time undefined");

    const auto n = static_cast<Eigen::Index>(domain_.size());
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t i = 0; i < domain_.size(); ++i) {
      const Vertex x = domain_[i];
      const auto row = static_cast<Eigen::Index>(i);
      triplets.emplace_back(row, row, g.measure(x));
      for (const auto& nb : g.neighbors(x))
        if (auto j = domain_.index_of(nb.vertex))
          triplets.emplace_back(row, static_cast<Eigen::Index>(*j), -nb.weight);
    }
    matrix_.resize(n, n);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());

    if (domain_.size() <= kDirectSolverLimit) {
      direct_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(matrix_);
      if (direct_->info() != Eigen::Success)
        throw numerical_error("LDLT factorisation failed (domain not connected to its boundary?)");
    } else {
      iterative_ = std::make_unique<
          Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                   Eigen::DiagonalPreconditioner<double>>>();
      iterative_->setTolerance(1e-11);
      iterative_->setMaxIterations(20 * n);
      iterative_->compute(matrix_);
    }
  }

  [[nodiscard]] const WeightedGraph& graph() const { return *graph_; }
  [[nodiscard]] const VertexSet& domain() const { return domain_; }
  [[nodiscard]] const VertexSet& boundary() const { return boundary_; }
  [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }

  [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd x = direct_ ? Eigen::MatrixXd(direct_->solve(rhs))
                                : Eigen::MatrixXd(iterative_->solve(rhs));
    if (iterative_ && iterative_->info() != Eigen::Success)
      throw numerical_error("conjugate gradient did not converge");
    return x;
  }

  /// Right-hand side contributions of boundary data, aligned with boundary().
  [[nodiscard]] Eigen::VectorXd boundary_rhs(const std::vector<double>& boundary_values) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain_.size()));
    for (std::size_t i = 0; i < domain_.size(); ++i)
      for (const auto& nb : graph_->neighbors(domain_[i]))
        if (auto k = boundary_.index_of(nb.vertex))
          rhs(static_cast<Eigen::Index>(i)) += nb.weight * boundary_values[*k];
    return rhs;
  }

  /// All harmonic measure columns at once: H(i, k) = h_{z_k}(x_i) for
  /// x_i in domain() and z_k in boundary().
  [[nodiscard]] Eigen::MatrixXd harmonic_measures() const {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(domain_.size()),
                                                static_cast<Eigen::Index>(boundary_.size()));
    for (std::size_t i = 0; i < domain_.size(); ++i)
      for (const auto& nb : graph_->neighbors(domain_[i]))
        if (auto k = boundary_.index_of(nb.vertex))
          rhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*k)) = nb.weight;
    Eigen::MatrixXd h = solve(rhs);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const double total = h.row(i).sum();
      if (std::abs(total - 1.0) > kProbabilityTol)
        throw numerical_error("harmonic measure row sums to " + std::to_string(total));
    }
    return h;
  }

  /// Green's function column g_A(x0, .) on A.
  [[nodiscard]] std::vector<double> green(Vertex x0) const {
    const auto i = domain_.index_of(x0);
    if (!i) throw precondition_error("Green's function source must lie in the domain");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain_.size()));
    e(static_cast<Eigen::Index>(*i)) = 1.0;
    Eigen::VectorXd gcol = solve(e);
    return {gcol.data(), gcol.data() + gcol.size()};
  }

private:
  const WeightedGraph* graph_;
  VertexSet domain_;
  VertexSet boundary_;
  SparseMatrix matrix_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> direct_;
  std::unique_ptr<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                           Eigen::DiagonalPreconditioner<double>>>
      iterative_;
};

/// max_{x in A} |Delta f(x)| and whether it stays within tol.
struct HarmonicCheck {
  bool harmonic = false;
  double max_residual = 0.0;
};

inline HarmonicCheck is_harmonic(const WeightedGraph& g, const VertexField& f, const VertexSet& a,
                                 double tol) {
  HarmonicCheck out;
  for (Vertex x : a) out.max_residual = std::max(out.max_residual, std::abs(laplacian_apply(g, f, x)));
  out.harmonic = out.max_residual <= tol;
  return out;
}

/// Unique h on closure(A) with Delta h = 0 on A and h = boundary_values on dA.
inline VertexField harmonic_extension(const WeightedGraph& g, const VertexSet& a,
                                      const VertexField& boundary_values) {
  require_untruncated(g, a, "harmonic extension domain");
  const DirichletSolver solver(g, a);
  std::vector<double> bvals;
  bvals.reserve(solver.boundary().size());
  double scale = 0.0;
  for (Vertex z : solver.boundary()) {
    if (!boundary_values.defined_at(z))
      throw precondition_error("missing boundary value at vertex '" + g.label(z) + "'");
    bvals.push_back(boundary_values.at(z));
    scale = std::max(scale, std::abs(bvals.back()));
  }
  const Eigen::VectorXd interior = solver.solve(solver.boundary_rhs(bvals));

  VertexSet cl = set_union(a, solver.boundary());
  std::vector<double> vals(cl.size());
  for (std::size_t i = 0; i < cl.size(); ++i) {
    const Vertex v = cl[i];
    if (auto j = a.index_of(v)) vals[i] = interior(static_cast<Eigen::Index>(*j));
    else vals[i] = bvals[*solver.boundary().index_of(v)];
  }
  VertexField h(std::move(cl), std::move(vals));
  const auto check = is_harmonic(g, h, a, kHarmonicTol * std::max(scale, 1e-300));
  if (scale > 0.0 && !check.harmonic)
    throw numerical_error("harmonic extension residual " + std::to_string(check.max_residual) +
                          " exceeds tolerance");
  return h;
}

/// Exit distribution P^x(X_tau = z) of the walk started at x in B, tau the
/// hitting time of dB.
inline ExitDistribution harmonic_measure(const WeightedGraph& g, const VertexSet& b, Vertex x) {
  if (!b.contains(x)) throw precondition_error("harmonic_measure start must lie in the domain");
  require_untruncated(g, b, "harmonic measure domain");
  const DirichletSolver solver(g, b);
  const Eigen::MatrixXd h = solver.harmonic_measures();
  const auto row = static_cast<Eigen::Index>(*b.index_of(x));
  ExitDistribution out{solver.boundary(), {}};
  out.probs.resize(out.boundary.size());
  for (std::size_t k = 0; k < out.boundary.size(); ++k)
    out.probs[k] = h(row, static_cast<Eigen::Index>(k));
  return out;
}

/// g_D(x0, .) = expected visits of the walk from x0 killed on leaving D,
/// divided by mu: with v(y) = E^{x0}[#visits to y before tau_D] one has
/// mu(y) g(y) = v(y), and L_D g = e_{x0}.
inline GreenColumn green_column(const WeightedGraph& g, const VertexSet& d, Vertex x0) {
  if (!d.contains(x0)) throw precondition_error("green_column source must lie in D");
  require_untruncated(g, d, "Green's function domain");
  const DirichletSolver solver(g, d);
  return {d, x0, solver.green(x0)};
}

/// Partial sums sum_{n <= n_max} p_n^D(x0, .) by iterating the killed
/// transition kernel. Test oracle for green_column.
inline VertexField green_series_oracle(const WeightedGraph& g, const VertexSet& d, Vertex x0,
                                       long n_max) {
  if (!d.contains(x0)) throw precondition_error("series source must lie in D");
  if (n_max < 0) throw precondition_error("n_max must be nonnegative");
  const std::size_t n = d.size();
  // killed kernel as (target index, probability) lists
  std::vector<std::vector<std::pair<std::size_t, double>>> kernel(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& nb : g.neighbors(d[i]))
      if (auto j = d.index_of(nb.vertex)) kernel[i].emplace_back(*j, nb.weight / g.measure(d[i]));

  std::vector<double> dist(n, 0.0), next(n), sum(n, 0.0);
  dist[*d.index_of(x0)] = 1.0;
  for (long step = 0; step <= n_max; ++step) {
    for (std::size_t i = 0; i < n; ++i) sum[i] += dist[i];
    if (step == n_max) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (dist[i] != 0.0)
        for (const auto& [j, p] : kernel[i]) next[j] += dist[i] * p;
    dist.swap(next);
  }
  for (std::size_t i = 0; i < n; ++i) sum[i] /= g.measure(d[i]);
  return VertexField(d, std::move(sum));
}

} // namespace harnack

#endif
