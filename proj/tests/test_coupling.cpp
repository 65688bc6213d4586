#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "harnack/coupling.hpp"
#include "harnack/generators.hpp"

using namespace harnack;

namespace {

// chi-square statistic of observed counts against expected probabilities
double chi2(const std::vector<double>& counts, const std::vector<double>& probs) {
  double n = 0.0;
  for (double c : counts) n += c;
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = n * probs[i];
    s += (counts[i] - e) * (counts[i] - e) / e;
  }
  return s;
}

}  // namespace

TEST(Ctsrw, HoldingTimesAndJumpLaw) {
  const auto g = three_rail(6);
  const Vertex x = g.vertex("1,0");
  const int n = 100'000;
  double hold = 0.0;
  std::map<Vertex, double> counts;
  for (int t = 0; t < n; ++t) {
    RandomStream rng(31, 0, static_cast<std::uint64_t>(t));
    const auto q = simulate_ctsrw(g, x, [&](Vertex v, double) { return v != x; }, rng, 1e9);
    ASSERT_EQ(q.states.size(), 2u);
    hold += q.times[1];
    counts[q.states[1]] += 1.0;
  }
  EXPECT_NEAR(hold / n, 1.0, 4.0 / std::sqrt(n));
  std::vector<double> obs, probs;
  for (const auto& nb : g.neighbors(x)) {
    obs.push_back(counts[nb.vertex]);
    probs.push_back(transition_prob(g, x, nb.vertex));
  }
  // 3 neighbours: 2 degrees of freedom, 99.9% quantile 13.8
  EXPECT_LT(chi2(obs, probs), 13.8);
}

TEST(Ctsrw, StopAtStartAndCaps) {
  const auto g = lattice_box(2, 4);
  RandomStream rng(1, 0);
  const auto p = simulate_ctsrw(g, 0, [](Vertex, double) { return true; }, rng, 10.0);
  EXPECT_EQ(p.states.size(), 1u);
  EXPECT_FALSE(p.capped);
  const auto q = simulate_ctsrw(g, 0, [](Vertex, double) { return false; }, rng, 1e9, 50);
  EXPECT_TRUE(q.capped);
  EXPECT_EQ(q.states.size(), 51u);
  const auto r = simulate_ctsrw(g, 0, [](Vertex, double) { return false; }, rng, 3.0);
  EXPECT_TRUE(r.capped);
  EXPECT_LE(r.times.back(), 3.0);
}

TEST(Lamplighter, DiscretePositionAndLamps) {
  const int steps = 16, n = 40'000;
  double sum = 0.0, sq = 0.0;
  double lit0 = 0.0;
  for (int t = 0; t < n; ++t) {
    RandomStream rng(41, 0, static_cast<std::uint64_t>(t));
    const auto p = simulate_lamplighter_discrete(
        steps + 1, LampState{}, [&](const LampState&, long k) { return k == steps; }, rng);
    const auto& end = p.states.back();
    sum += end.position;
    sq += double(end.position) * end.position;
    lit0 += end.lit(0);
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 * std::sqrt(double(steps) / n));
  EXPECT_NEAR(sq / n, double(steps), 4.0 * std::sqrt(2.0 * steps * steps / n));
  // site 0 is always departed at step 0, so its lamp is a fair coin
  EXPECT_LT(chi2({lit0, n - lit0}, {0.5, 0.5}), 10.83);
}

TEST(Lamplighter, WindowOverflowIsTruncation) {
  RandomStream rng(2, 0);
  EXPECT_THROW(simulate_lamplighter_discrete(2, LampState{}, [](const LampState&, long) { return false; }, rng),
               truncation_error);
  EXPECT_THROW(simulate_lamplighter_discrete(2, LampState(3, {}), [](const LampState&, long) { return true; }, rng),
               truncation_error);
}

TEST(Coupling, IdenticalStartsCoupleAtTimeZero) {
  CouplingParams p;
  p.r = 4;
  const auto [y1, y2] = osc_pair(4);
  RandomStream rng(3, 0);
  const auto o = reflection_couple(y1, y1, p, rng);
  EXPECT_EQ(o.tau_c, 0.0);
  EXPECT_TRUE(o.coupled_first);
  const auto est = estimate_pair(y2, y2, p, 200, 5, 1, 1);
  EXPECT_EQ(est.success.estimate, 1.0);
}

TEST(Coupling, Preconditions) {
  CouplingParams p;
  p.k = 4.0;
  RandomStream rng(3, 0);
  EXPECT_THROW(reflection_couple(LampState{}, LampState{}, p, rng), precondition_error);
  p.k = 5.0;
  p.eps = 0.2;
  EXPECT_THROW(reflection_couple(LampState{}, LampState{}, p, rng), precondition_error);
  p.eps = 0.1;
  p.r = 2;
  EXPECT_THROW(reflection_couple(LampState(11, {}), LampState{}, p, rng), precondition_error);
  EXPECT_THROW(uc_estimate(p, 50, 1), precondition_error);
}

TEST(Coupling, MarginalIsTheUncoupledWalk) {
  // walker 1 after a fixed time: compare position law with a free walk
  const double horizon = 3.0;
  const int n = 40'000;
  std::map<int, double> coupled, free;
  const auto [y1, y2] = osc_pair(3);
  for (int t = 0; t < n; ++t) {
    RandomStream rng(51, 0, static_cast<std::uint64_t>(t));
    CoupledLampWalkers w(y1, y2, 40);
    int pos = y1.position;
    while (true) {
      w.advance(rng);
      if (w.time() > horizon) break;
      pos = w.position(0);
    }
    coupled[pos] += 1.0;

    RandomStream other(52, 0, static_cast<std::uint64_t>(t));
    double clock = 0.0;
    int x = y1.position;
    while (true) {
      clock += other.exponential(1.0);
      if (clock > horizon) break;
      x += other.coin() ? 1 : -1;
    }
    free[x] += 1.0;
  }
  // two-sample chi-square over positions seen at least 50 times in total
  double stat = 0.0;
  int cells = 0;
  std::map<int, bool> keys;
  for (const auto& [k, v] : coupled) keys[k] = true;
  for (const auto& [k, v] : free) keys[k] = true;
  for (const auto& [k, unused] : keys) {
    const double a = coupled[k], b = free[k];
    if (a + b < 50) continue;
    stat += (a - b) * (a - b) / (a + b);
    ++cells;
  }
  ASSERT_GT(cells, 4);
  // generous: the 99.9% quantile for cells - 1 degrees of freedom is below 2 * cells + 10
  EXPECT_LT(stat, 2.0 * cells + 10.0);
}

TEST(Coupling, LampsAgreeAfterMeetingOnDepartedSites) {
  const auto [y1, y2] = osc_pair(3);
  for (int t = 0; t < 200; ++t) {
    RandomStream rng(61, 0, static_cast<std::uint64_t>(t));
    CoupledLampWalkers w(y1, y2, 60);
    while (!w.positions_met() && w.max_abs_position() < 30) w.advance(rng);
    if (!w.positions_met()) continue;
    std::set<int> visited;
    for (int s = 0; s < 200; ++s) {
      visited.insert(w.position(0));
      w.advance(rng);
      ASSERT_TRUE(w.positions_met());
      if (std::abs(w.position(0)) > 58) break;
    }
    for (int site : visited) {
      if (site == w.position(0)) continue;
      EXPECT_EQ(w.lamps(0).get(site), w.lamps(1).get(site));
    }
  }
}

TEST(Coupling, DeterministicAcrossThreadCounts) {
  CouplingParams p;
  p.r = 4;
  const auto a = uc_estimate(p, 400, 77, 1, 3);
  const auto b = uc_estimate(p, 400, 77, 2, 3);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    EXPECT_EQ(a.pairs[i].success.successes, b.pairs[i].success.successes);
    EXPECT_EQ(a.pairs[i].y1, b.pairs[i].y1);
  }
  EXPECT_EQ(a.worst_pair, b.worst_pair);
}

TEST(Coupling, WindowBoundOnCheckedRuns) {
  CouplingParams p;
  p.r = 8;
  const auto [y1, y2] = osc_pair(8);
  const auto est = estimate_pair(y1, y2, p, 2'000, 9, 1, 1);
  EXPECT_GT(est.success.successes, 0u);
  EXPECT_EQ(est.window_violations, 0u);
  EXPECT_EQ(est.cap_hits, 0u);
  EXPECT_GT(est.success.wilson_low, 0.0);
}

TEST(Coupling, StoppingTimesAreConsistent) {
  CouplingParams p;
  p.r = 4;
  const auto [y1, y2] = osc_pair(4);
  for (int t = 0; t < 300; ++t) {
    RandomStream rng(71, 0, static_cast<std::uint64_t>(t));
    const auto o = reflection_couple(y1, y2, p, rng);
    EXPECT_FALSE(o.capped);
    EXPECT_NE(std::isfinite(o.tau_c), std::isfinite(o.tau_e));
    EXPECT_EQ(o.coupled_first, std::isfinite(o.tau_c));
    if (o.coupled_first) {
      EXPECT_LE(o.meet_time, o.tau_c);
      EXPECT_LE(static_cast<double>(o.max_distance), p.k * p.r);
    } else {
      EXPECT_GT(static_cast<double>(o.max_distance), p.k * p.r);
    }
  }
  p.event_cap = 3;
  RandomStream rng(72, 0);
  EXPECT_TRUE(reflection_couple(y1, y2, p, rng).capped);
}

TEST(OscFailure, Geometry) {
  const auto g = osc_geometry({6, 2.0, kStepCap});
  EXPECT_DOUBLE_EQ(g.delta, 1.0 / 3.0);
  EXPECT_EQ(g.window_lo, 4);
  EXPECT_EQ(g.window_hi, 6);
  EXPECT_DOUBLE_EQ(g.exit_radius, 12.0);
  EXPECT_THROW(osc_geometry({4, 2.0, kStepCap}), precondition_error);
  EXPECT_THROW(osc_geometry({6, 3.0, kStepCap}), precondition_error);
  EXPECT_THROW(osc_failure_experiment({3, 2.0, kStepCap}, 100, 1), precondition_error);
}

TEST(OscFailure, ExactAgreesWithMonteCarlo) {
  const OscParams p{3, 2.0, kStepCap};
  const auto exact = osc_failure_exact(p);
  EXPECT_GT(exact.states, 0u);
  EXPECT_LT(exact.h_y1, exact.h_y2);
  const auto mc = osc_failure_experiment(p, 20'000, 5);
  EXPECT_NEAR(mc.h_y1.estimate, exact.h_y1, 4.0 * mc.h_y1.std_error + 1e-12);
  EXPECT_NEAR(mc.h_y2.estimate, exact.h_y2, 4.0 * mc.h_y2.std_error + 1e-12);
  EXPECT_EQ(mc.cap_hits_y1 + mc.cap_hits_y2, 0u);
  EXPECT_THROW(osc_failure_exact({6, 2.0, kStepCap}), precondition_error);
}
