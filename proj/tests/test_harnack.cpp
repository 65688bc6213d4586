#include <gtest/gtest.h>

#include <cmath>

#include "harnack/generators.hpp"
#include "harnack/graph_source.hpp"
#include "harnack/harnack.hpp"
#include "harnack/oracles.hpp"

using namespace harnack;

namespace {

/// h_z(u) for the witness of an EHI report, from the dense oracle.
double dense_ratio(const WeightedGraph& g, const HarnackReport& r) {
  const auto outer = ball(g, r.center, 2 * r.radius);
  const auto ex = oracle::dense_exit(g, outer.members());
  auto row = [&](Vertex v) {
    return static_cast<Eigen::Index>(std::lower_bound(ex.interior.begin(), ex.interior.end(), v) -
                                     ex.interior.begin());
  };
  const auto col = static_cast<Eigen::Index>(
      std::lower_bound(ex.boundary.begin(), ex.boundary.end(), *r.witness.boundary) - ex.boundary.begin());
  return ex.h(row(r.witness.u), col) / ex.h(row(r.witness.v), col);
}

}  // namespace

TEST(Ehi, PathClosedForm) {
  const auto g = lattice_box(1, 200);
  for (int r : {1, 2, 3, 4, 8, 16}) {
    const auto rep = ehi_constant(g, g.vertex("0"), r);
    EXPECT_NEAR(rep.constant, (3.0 * r + 1) / (r + 1), 1e-9);
    EXPECT_NEAR(oracle::path_ehi_bruteforce(r), (3.0 * r + 1) / (r + 1), 1e-12);
  }
  EXPECT_NEAR(ehi_constant(g, g.vertex("37"), 4).constant, 2.6, 1e-9);
}

TEST(Ehi, SingleVertexBallAndBounds) {
  const auto g = lattice_box(2, 10);
  EXPECT_EQ(ehi_constant(g, g.vertex("0,0"), 0).constant, 1.0);
  for (int r : {1, 2, 3}) EXPECT_GE(ehi_constant(g, g.vertex("1,-2"), r).constant, 1.0);
}

TEST(Ehi, WitnessReproducesConstant) {
  const auto g = lattice_box(2, 12);
  for (int r : {2, 4}) {
    const auto rep = ehi_constant(g, g.vertex("0,0"), r);
    ASSERT_TRUE(rep.witness.boundary.has_value());
    EXPECT_NEAR(dense_ratio(g, rep), rep.constant, 1e-9 * rep.constant);
  }
}

TEST(Ehi, ConeExtremality) {
  // random nonnegative boundary mixtures never beat the extreme rays
  const auto g = lattice_box(2, 10);
  const Vertex o = g.vertex("0,0");
  const int r = 3;
  const double c1 = ehi_constant(g, o, r).constant;
  const auto outer = ball(g, o, 2 * r), inner = ball(g, o, r);
  const auto bd = exterior_boundary(g, outer);
  RandomStream rng(9, 0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> data(bd.size());
    for (auto& v : data) v = std::pow(rng.uniform(), 4.0);
    const auto h = harmonic_extension(g, outer, VertexField(bd, data));
    double hi = 0.0, lo = 1e300;
    for (Vertex v : inner) {
      hi = std::max(hi, h.at(v));
      lo = std::min(lo, h.at(v));
    }
    EXPECT_LE(hi / lo, c1 * (1 + 1e-12));
  }
}

TEST(Ehi, Z2LowerBound) {
  const auto g = lattice_box(2, 40);
  for (int r : {4, 8, 16}) EXPECT_GE(ehi_constant(g, g.vertex("0,0"), r).constant, 2.55);
}

TEST(Ehi, ClippedBallRejected) {
  const auto g = lattice_box(2, 6);
  EXPECT_THROW(ehi_constant(g, g.vertex("0,0"), 3), truncation_error);
  EXPECT_NO_THROW(ehi_constant(g, g.vertex("0,0"), 2));
}

TEST(Constants, InvariantUnderScaling) {
  const auto g = three_rail(20);
  const auto h = scale_weights(g, 7.25);
  const Vertex o = g.vertex("0,0");
  const auto d = ball(g, o, 8);
  EXPECT_NEAR(ehi_constant(g, o, 3).constant, ehi_constant(h, o, 3).constant, 1e-9);
  EXPECT_NEAR(hg_constant(g, o, 3, d).constant, hg_constant(h, o, 3, d).constant, 1e-9);
  EXPECT_NEAR(annulus_ratio(g, o, 3, d).constant, annulus_ratio(h, o, 3, d).constant, 1e-9);
  EXPECT_NEAR(oi_rho(g, o, 2, 2.0).constant, oi_rho(h, o, 2, 2.0).constant, 1e-9);
}

TEST(Hg, PathMaximumAtRadius) {
  const auto g = lattice_box(1, 50);
  const Vertex o = g.vertex("0");
  const auto rep = hg_constant(g, o, 2, ball(g, o, 4));
  EXPECT_GE(rep.constant, 1.0);
  EXPECT_TRUE(std::isfinite(rep.constant));
  EXPECT_EQ(distance(g, o, rep.witness.u), 2);
}

TEST(Hg, RequiresPointsOutsideTheBall) {
  const auto g = lattice_box(1, 50);
  const Vertex o = g.vertex("0");
  EXPECT_THROW(hg_constant(g, o, 4, ball(g, o, 3)), precondition_error);
}

TEST(Annulus, PathBruteForceAndOrdering) {
  const auto g = lattice_box(1, 50);
  const Vertex o = g.vertex("0");
  const auto d = ball(g, o, 6);
  const auto col = green_column(g, d, o);
  const double a = col.value(g.vertex("3")), b = col.value(g.vertex("-3"));
  EXPECT_NEAR(annulus_ratio(g, o, 3, d).constant, std::max(a / b, b / a), 1e-12);
  EXPECT_NEAR(annulus_ratio(g, o, 3, d).constant, 1.0, 1e-12);  // reflection symmetry

  const auto z = lattice_box(2, 16);
  for (int r : {2, 4}) {
    const auto dd = ball(z, z.vertex("1,0"), 2 * r);
    EXPECT_LE(annulus_ratio(z, z.vertex("1,0"), r, dd).constant,
              hg_constant(z, z.vertex("1,0"), r, dd).constant + 1e-12);
  }
}

TEST(Oi, BruteForceOnRandomGraphs) {
  RandomStream rng(21, 0);
  int done = 0;
  while (done < 10) {
    const auto g = oracle::random_graph(10 + rng.below(20), rng.below(15), rng);
    const Vertex x0 = static_cast<Vertex>(rng.below(g.num_vertices()));
    const auto outer = ball(g, x0, 2);
    const auto bd = exterior_boundary(g, outer);
    if (bd.size() < 2 || bd.size() > 12) continue;
    const double rho = oi_rho(g, x0, 1, 2.0).constant;
    EXPECT_NEAR(rho, oracle::oi_bruteforce(g, outer.members(), ball(g, x0, 1).members()), 1e-12);
    EXPECT_GE(rho, 0.0);
    EXPECT_LT(rho, 1.0);
    ++done;
  }
}

TEST(Oi, SingletonAndMonotoneInK) {
  const auto g = lattice_box(2, 20);
  const Vertex o = g.vertex("0,0");
  EXPECT_EQ(oi_rho(g, o, 0, 2.0).constant, 0.0);
  double prev = 1.0;
  for (double k : {2.0, 3.0, 4.0}) {
    const double rho = oi_rho(g, o, 3, k).constant;
    EXPECT_LE(rho, prev + 1e-12);
    prev = rho;
  }
  EXPECT_THROW(oi_rho(g, o, 3, 1.0), precondition_error);
  EXPECT_EQ(outer_radius_for(2.5, 3), 8);
}

TEST(HittingChain, LatticeRadii) {
  const auto g = lattice_box(2, 40);
  for (int r : {1, 3, 9}) {
    const auto t = theorem1_check(g, g.vertex("0,0"), r);
    EXPECT_TRUE(t.all_passed) << "R = " << r;
    EXPECT_EQ(t.boundary_size, static_cast<std::size_t>(4 * r + 4));
    EXPECT_LE(t.counting_bound, 1.0);
    EXPECT_NEAR(t.exit_mass, 1.0, 1e-10);
    EXPECT_EQ(t.n, r == 1 ? 0 : (r == 3 ? 1 : 2));
    EXPECT_NEAR(t.theta, std::log(t.c1) / std::log(3.0), 1e-12);
    for (const auto& c : t.checks) {
      EXPECT_GE(c.hit_probability, c.lower_bound);
      ASSERT_FALSE(c.chain.empty());
      EXPECT_EQ(static_cast<int>(c.chain.size()), t.n + 1);
    }
  }
}

TEST(HittingChain, FinalLinkCentredAtX0WhenTwoPowersExceedR) {
  // R = 5: N = 1 and 2 * 3 > 5, so the last ball is centred at x0
  const auto g = lattice_box(2, 30);
  const Vertex o = g.vertex("0,0");
  const auto t = theorem1_check(g, o, 5);
  for (const auto& c : t.checks) EXPECT_EQ(c.chain.back().center, o);
}
