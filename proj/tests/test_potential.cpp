#include <gtest/gtest.h>

#include <cmath>

#include "harnack/coupling.hpp"
#include "harnack/generators.hpp"
#include "harnack/graph_source.hpp"
#include "harnack/oracles.hpp"
#include "harnack/potential.hpp"

using namespace harnack;

namespace {

VertexSet range(const WeightedGraph& g, int lo, int hi) {
  std::vector<Vertex> v;
  for (int i = lo; i <= hi; ++i) v.push_back(g.vertex(std::to_string(i)));
  return VertexSet(std::move(v));
}

VertexField boundary_data(const VertexSet& bd, const std::function<double(Vertex)>& f) {
  return VertexField::from_function(bd, f);
}

}  // namespace

TEST(HarmonicExtension, ConstantData) {
  const auto g = lattice_box(2, 6);
  const auto b = ball(g, g.vertex("0,0"), 3);
  const auto bd = exterior_boundary(g, b);
  const auto h = harmonic_extension(g, b, boundary_data(bd, [](Vertex) { return 2.5; }));
  for (double v : h.values()) EXPECT_NEAR(v, 2.5, 1e-12);
}

TEST(HarmonicExtension, LinearOnPath) {
  const auto g = path_graph(10);
  const auto a = range(g, 1, 9);
  const auto bd = exterior_boundary(g, a);
  const auto h = harmonic_extension(g, a, boundary_data(bd, [&](Vertex v) { return v == g.vertex("10") ? 1.0 : 0.0; }));
  for (int x = 0; x <= 10; ++x) EXPECT_NEAR(h.at(g.vertex(std::to_string(x))), x / 10.0, 1e-13);
  EXPECT_EQ(h.at(g.vertex("10")), 1.0);
}

TEST(HarmonicExtension, MaximumPrincipleAndLinearity) {
  RandomStream rng(5, 0);
  const auto g = oracle::random_graph(40, 30, rng);
  const auto a = ball(g, 0, 2);
  const auto bd = exterior_boundary(g, a);
  ASSERT_FALSE(bd.empty());
  std::vector<double> f1, f2;
  for (std::size_t i = 0; i < bd.size(); ++i) {
    f1.push_back(rng.uniform() * 4 - 2);
    f2.push_back(rng.uniform());
  }
  const auto h1 = harmonic_extension(g, a, VertexField(bd, f1));
  const auto h2 = harmonic_extension(g, a, VertexField(bd, f2));
  std::vector<double> mix(bd.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 3.0 * f1[i] - 0.5 * f2[i];
  const auto h3 = harmonic_extension(g, a, VertexField(bd, mix));
  const double bmax = *std::max_element(f1.begin(), f1.end());
  const double bmin = *std::min_element(f1.begin(), f1.end());
  for (Vertex x : a) {
    EXPECT_LE(h1.at(x), bmax + 1e-10);
    EXPECT_GE(h1.at(x), bmin - 1e-10);
    EXPECT_NEAR(h3.at(x), 3.0 * h1.at(x) - 0.5 * h2.at(x), 1e-10);
  }
  EXPECT_TRUE(is_harmonic(g, h1, a, 1e-9).harmonic);
}

TEST(HarmonicExtension, MissingBoundaryValue) {
  const auto g = path_graph(6);
  const auto a = range(g, 1, 5);
  const VertexField partial(VertexSet(std::vector<Vertex>{g.vertex("0")}), {0.0});
  EXPECT_THROW(harmonic_extension(g, a, partial), precondition_error);
}

TEST(HarmonicMeasure, PathAndSingleton) {
  const auto g = path_graph(10);
  const auto e = harmonic_measure(g, range(g, 1, 9), g.vertex("3"));
  EXPECT_NEAR(e.prob(g.vertex("10")), 0.3, 1e-13);
  EXPECT_NEAR(e.prob(g.vertex("0")), 0.7, 1e-13);

  const auto t = three_rail(6);
  const Vertex x = t.vertex("2,0");
  const auto one = harmonic_measure(t, VertexSet(std::vector<Vertex>{x}), x);
  for (std::size_t i = 0; i < one.boundary.size(); ++i)
    EXPECT_NEAR(one.probs[i], transition_prob(t, x, one.boundary[i]), 1e-15);
  EXPECT_THROW(harmonic_measure(g, range(g, 1, 9), g.vertex("0")), precondition_error);
}

TEST(HarmonicMeasure, MatchesIndicatorExtensionAndDenseOracle) {
  const auto g = lattice_box(2, 6);
  const auto b = ball(g, g.vertex("0,0"), 3);
  const auto bd = exterior_boundary(g, b);
  const auto dense = oracle::dense_exit(g, b.members());
  const Vertex z = bd[5];
  const auto h = harmonic_extension(g, b, boundary_data(bd, [&](Vertex v) { return v == z ? 1.0 : 0.0; }));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto e = harmonic_measure(g, b, b[i]);
    double total = 0.0;
    for (double p : e.probs) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_NEAR(e.prob(z), h.at(b[i]), 1e-12);
    for (std::size_t k = 0; k < bd.size(); ++k)
      EXPECT_NEAR(e.prob(bd[k]), dense.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)), 1e-12);
  }
}

TEST(HarmonicMeasure, MonteCarloAgreement) {
  const auto g = lattice_box(2, 6);
  const Vertex o = g.vertex("0,0");
  const auto b = ball(g, o, 3);
  const auto e = harmonic_measure(g, b, o);
  EXPECT_GT(*std::min_element(e.probs.begin(), e.probs.end()), 0.0);
  const int n = 200'000;
  std::vector<int> hits(e.boundary.size(), 0);
  for (int t = 0; t < n; ++t) {
    RandomStream rng(17, 0, static_cast<std::uint64_t>(t));
    const auto path = simulate_ctsrw(g, o, [&](Vertex x, double) { return !b.contains(x); }, rng, 1e9);
    ++hits[*e.boundary.index_of(path.states.back())];
  }
  for (std::size_t k = 0; k < hits.size(); ++k) {
    const double p = e.probs[k];
    EXPECT_NEAR(hits[k] / double(n), p, 4.0 * std::sqrt(p * (1 - p) / n)) << g.label(e.boundary[k]);
  }
}

TEST(HarmonicMeasure, LocalHarnack) {
  const auto g = lattice_box(2, 6);
  const auto b = ball(g, g.vertex("0,0"), 3);
  const double p0 = controlled_weights_p0(g);
  // every h_z is nonnegative harmonic in B: h(x) >= p0 h(y) for y ~ x
  const auto bd = exterior_boundary(g, b);
  for (Vertex z : bd) {
    const auto hz = harmonic_extension(g, b, boundary_data(bd, [&](Vertex v) { return v == z ? 1.0 : 0.0; }));
    for (Vertex x : b)
      for (const auto& nb : g.neighbors(x)) EXPECT_GE(hz.at(x), p0 * hz.at(nb.vertex) - 1e-15);
  }
}

TEST(Green, SingletonAndSymmetry) {
  const auto g = lattice_box(2, 6);
  const Vertex o = g.vertex("0,0");
  const auto single = green_column(g, VertexSet(std::vector<Vertex>{o}), o);
  EXPECT_NEAR(single.value(o), 1.0 / g.measure(o), 1e-15);

  const auto d = ball(g, o, 4);
  for (Vertex x : {g.vertex("1,2"), g.vertex("-3,0")}) {
    const auto gx = green_column(g, d, x);
    const auto go = green_column(g, d, o);
    EXPECT_NEAR(gx.value(o), go.value(x), 1e-10);
    for (double v : gx.values) EXPECT_GE(v, 0.0);
    EXPECT_EQ(gx.value(g.vertex("6,6")), 0.0);
  }
  EXPECT_THROW(green_column(g, d, g.vertex("6,6")), precondition_error);
}

TEST(Green, HarmonicOffSource) {
  const auto g = three_rail(12);
  const Vertex o = g.vertex("0,1");
  const auto d = ball(g, o, 6);
  const auto col = green_column(g, d, o);
  const auto off = set_difference(d, VertexSet(std::vector<Vertex>{o}));
  EXPECT_TRUE(is_harmonic(g, col.as_field(g), off, 1e-9).harmonic);
  EXPECT_FALSE(is_harmonic(g, col.as_field(g), d, 1e-9).harmonic);
}

TEST(Green, SeriesOracle) {
  const auto g = path_graph(10);
  const auto d = range(g, 1, 9);
  const Vertex o = g.vertex("5");
  const auto col = green_column(g, d, o);
  const auto s = green_series_oracle(g, d, o, 10'000);
  for (Vertex y : d) EXPECT_NEAR(s.at(y), col.value(y), 1e-8);
  const auto s0 = green_series_oracle(g, d, o, 0);
  for (Vertex y : d) EXPECT_EQ(s0.at(y), y == o ? 1.0 / g.measure(o) : 0.0);
  const auto a = green_series_oracle(g, d, o, 10), b = green_series_oracle(g, d, o, 100),
             c = green_series_oracle(g, d, o, 1000);
  for (Vertex y : d) {
    EXPECT_LE(a.at(y), b.at(y));
    EXPECT_LE(b.at(y), c.at(y));
  }
}

TEST(IsHarmonic, SquaredDistanceIsNot) {
  const auto g = lattice_box(2, 5);
  const auto all = ball(g, g.vertex("0,0"), 10);
  const auto dist = bfs_distances(g, g.vertex("0,0"));
  const auto sq = VertexField::from_function(all, [&](Vertex v) { return double(dist[v]) * dist[v]; });
  const auto r = is_harmonic(g, sq, VertexSet(std::vector<Vertex>{g.vertex("0,0")}), 1e-9);
  EXPECT_FALSE(r.harmonic);
  EXPECT_DOUBLE_EQ(r.max_residual, 1.0);
}

TEST(Truncation, ClippedDomainIsRejected) {
  const auto g = lattice_box(2, 5);
  const auto clipped = ball(g, g.vertex("0,0"), 5);
  EXPECT_THROW(green_column(g, clipped, g.vertex("0,0")), truncation_error);
  EXPECT_THROW(harmonic_measure(g, clipped, g.vertex("0,0")), truncation_error);
}

TEST(HarmonicMeasure, WholeGraphRejected) {
  const auto g = path_graph(4);
  EXPECT_THROW(harmonic_measure(g, range(g, 0, 4), g.vertex("1")), precondition_error);
}
