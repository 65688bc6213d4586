#ifndef HARNACK_COUPLING_HPP
#define HARNACK_COUPLING_HPP

// Monte Carlo walks: the continuous-time simple random walk on a weighted
// graph, the discrete switch-then-walk chain on the lamplighter graph, a
// co-adapted coupling of two lamplighter walks, and the oscillation-failure
// experiment for OI(K) with K < 3.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "harnack/generators.hpp"
#include "harnack/graph.hpp"
#include "harnack/lamplighter.hpp"
#include "harnack/parallel.hpp"
#include "harnack/potential.hpp"
#include "harnack/rng.hpp"

namespace harnack {

inline constexpr std::uint64_t kStepCap = 10'000'000;

template <class State>
struct WalkPath {
  std::vector<double> times;
  std::vector<State> states;
  bool capped = false;
};

/// Continuous-time walk: Exp(1) holding times, then a jump x -> y with
/// probability nu_xy / mu(x). `stop(state, time)` is checked at time 0 and
/// after every jump. Hitting `time_cap` or `step_cap` ends the path with
/// capped = true.
inline WalkPath<Vertex> simulate_ctsrw(const WeightedGraph& g, Vertex start,
                                       const std::function<bool(Vertex, double)>& stop,
                                       RandomStream& rng, double time_cap,
                                       std::uint64_t step_cap = kStepCap) {
  g.check_vertex(start);
  WalkPath<Vertex> path;
  Vertex x = start;
  double t = 0.0;
  path.times.push_back(t);
  path.states.push_back(x);
  for (std::uint64_t step = 0; !stop(x, t); ++step) {
    const double hold = rng.exponential(1.0);
    if (step >= step_cap || t + hold > time_cap) {
      path.capped = true;
      break;
    }
    t += hold;
    const double target = rng.uniform() * g.measure(x);
    const auto nbrs = g.neighbors(x);
    double acc = 0.0;
    Vertex next = nbrs.back().vertex;
    for (const auto& nb : nbrs) {
      acc += nb.weight;
      if (target < acc) {
        next = nb.vertex;
        break;
      }
    }
    x = next;
    path.times.push_back(t);
    path.states.push_back(x);
  }
  return path;
}

/// Discrete switch-then-walk chain X_n = (V_n, Theta(n)): each step sets the
/// current lamp to a fair coin and moves +-1, i.e. a uniform step to one of
/// the four neighbours. Positions and lamps must stay in [-window, window].
inline WalkPath<LampState> simulate_lamplighter_discrete(
    int window, const LampState& start, const std::function<bool(const LampState&, long)>& stop,
    RandomStream& rng, std::uint64_t step_cap = kStepCap) {
  auto inside = [window](const LampState& s) {
    if (std::abs(s.position) > window) return false;
    return s.lamps.empty() || (s.lamps.front() >= -window && s.lamps.back() <= window);
  };
  if (!inside(start)) throw truncation_error("start state outside the lamplighter window");
  WalkPath<LampState> path;
  LampState x = start;
  path.times.push_back(0.0);
  path.states.push_back(x);
  for (long n = 0; !stop(x, n); ++n) {
    if (static_cast<std::uint64_t>(n) >= step_cap) {
      path.capped = true;
      break;
    }
    const std::uint64_t bits = rng.next();
    const bool lamp_on = (bits >> 63) & 1U;
    const int dir = ((bits >> 62) & 1U) ? 1 : -1;
    x = x.with_lamp(x.position, lamp_on);
    x.position += dir;
    if (!inside(x))
      throw truncation_error("lamplighter walk left the window [-" + std::to_string(window) + ", " +
                             std::to_string(window) + "]");
    path.times.push_back(static_cast<double>(n + 1));
    path.states.push_back(x);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Co-adapted coupling on the lamplighter graph

/// Two continuous-time lamplighter walks driven jointly.
///
/// While the position gap is even and nonzero the walkers share one rate-1
/// clock and jump together, walker 2 taking the mirror image of walker 1's
/// step, so they meet at the midpoint. An odd gap cannot close that way;
/// then each walker keeps its own rate-1 clock (one rate-2 clock whose rings
/// go to a walker by a fair coin) until a single step makes the gap even.
/// Before meeting every jump sets the departed lamp from the mover's own
/// coin. Once the positions agree both walkers share one clock, one
/// direction and one lamp coin, so lamps agree on every site departed
/// afterwards. In every regime each walker jumps at rate 1 to a uniform
/// neighbour given the joint past, so the coupling is co-adapted.
class CoupledLampWalkers {
public:
  CoupledLampWalkers(const LampState& y1, const LampState& y2, int window)
      : lamps_{to_window(y1, window), to_window(y2, window)}, position_{y1.position, y2.position} {
    for (int s = -window; s <= window; ++s)
      if (lamps_[0].get(s) != lamps_[1].get(s)) ++differing_;
    distance_[0] = lamps_[0].distance_with_position(position_[0]);
    distance_[1] = lamps_[1].distance_with_position(position_[1]);
    max_abs_position_ = std::max(std::abs(position_[0]), std::abs(position_[1]));
    if (std::abs(position_[0]) > window || std::abs(position_[1]) > window)
      throw truncation_error("coupled walkers start outside the lamp window");
  }

  /// One clock ring. Returns the index of the walker that moved (2 = both).
  int advance(RandomStream& rng) {
    ++events_;
    const int gap = position_[0] - position_[1];
    if (gap != 0 && gap % 2 != 0) {
      time_ += rng.exponential(2.0);
      const std::uint64_t bits = rng.next();
      const int mover = static_cast<int>((bits >> 63) & 1U);
      const int dir = ((bits >> 62) & 1U) ? 1 : -1;
      const bool lamp_on = (bits >> 61) & 1U;
      move(mover, lamp_on, dir);
      distance_[mover] = lamps_[mover].distance_with_position(position_[mover]);
      if (positions_met()) meet_time_ = time_;
      return mover;
    }
    time_ += rng.exponential(1.0);
    const std::uint64_t bits = rng.next();
    const int dir = ((bits >> 63) & 1U) ? 1 : -1;
    const bool lamp1 = (bits >> 62) & 1U;
    const bool lamp2 = gap == 0 ? lamp1 : static_cast<bool>((bits >> 61) & 1U);
    move(0, lamp1, dir);
    move(1, lamp2, gap == 0 ? dir : -dir);
    distance_[0] = lamps_[0].distance_with_position(position_[0]);
    distance_[1] = lamps_[1].distance_with_position(position_[1]);
    if (gap != 0 && positions_met()) meet_time_ = time_;
    return 2;
  }

  [[nodiscard]] bool positions_met() const { return position_[0] == position_[1]; }
  [[nodiscard]] bool states_equal() const { return positions_met() && differing_ == 0; }
  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] double meet_time() const { return meet_time_; }
  [[nodiscard]] int position(int i) const { return position_[i]; }
  [[nodiscard]] long distance(int i) const { return distance_[i]; }
  [[nodiscard]] const LampWindow& lamps(int i) const { return lamps_[i]; }
  [[nodiscard]] int max_abs_position() const { return max_abs_position_; }
  [[nodiscard]] std::uint64_t events() const { return events_; }

  [[nodiscard]] LampState state(int i) const { return {position_[i], lamps_[i].lit_sites()}; }

private:
  void move(int i, bool lamp_on, int dir) {
    const int site = position_[i];
    const bool differed = lamps_[0].get(site) != lamps_[1].get(site);
    lamps_[i].set(site, lamp_on);
    const bool differs = lamps_[0].get(site) != lamps_[1].get(site);
    differing_ += static_cast<long>(differs) - static_cast<long>(differed);
    position_[i] += dir;
    if (!lamps_[i].in_window(position_[i])) throw truncation_error("coupled walker left the lamp window");
    max_abs_position_ = std::max(max_abs_position_, std::abs(position_[i]));
  }

  LampWindow lamps_[2];
  int position_[2];
  long distance_[2] = {0, 0};
  long differing_ = 0;
  double time_ = 0.0;
  double meet_time_ = std::numeric_limits<double>::infinity();
  int max_abs_position_ = 0;
  std::uint64_t events_ = 0;
};

struct CouplingOutcome {
  double tau_c = std::numeric_limits<double>::infinity();  // first time Y1 = Y2
  double tau_e = std::numeric_limits<double>::infinity();  // first exit of B(x0, KR); inf if not reached
  bool coupled_first = false;                              // tau_c < tau_e
  double meet_time = std::numeric_limits<double>::infinity();  // positions agree
  bool met_inside_inner = false;   // positions met before either left I(eps)
  bool stayed_in_outer = false;    // positions never left I(2 eps)
  long max_distance = 0;           // max d(x0, Y^i_t) over the run
  bool capped = false;
  std::uint64_t events = 0;
};

struct CouplingParams {
  int r = 1;
  double k = 5.0;
  double eps = 0.1;
  std::uint64_t event_cap = kStepCap;
};

inline void validate(const CouplingParams& p) {
  if (p.r < 1) throw precondition_error("coupling needs R >= 1");
  if (!(p.k > 4.0)) throw precondition_error("reflection coupling needs K > 4");
  if (!(p.eps > 0.0 && p.eps < (p.k - 4.0) / 8.0))
    throw precondition_error("reflection coupling needs 0 < eps < (K - 4) / 8");
}

inline int coupling_window(const CouplingParams& p) {
  return static_cast<int>(std::ceil(p.k * p.r)) + 2;
}

/// Runs the coupled pair from (y1, y2) until the states agree or a walker
/// leaves B(x0, KR), x0 the identity. Both decisions are made from the
/// trajectory up to the current event only.
inline CouplingOutcome reflection_couple(const LampState& y1, const LampState& y2,
                                         const CouplingParams& p, RandomStream& rng) {
  validate(p);
  const double exit_radius = p.k * p.r;
  if (static_cast<double>(lamp_distance(y1)) > exit_radius ||
      static_cast<double>(lamp_distance(y2)) > exit_radius)
    throw precondition_error("coupling start states must lie in B(x0, KR)");
  const double inner = p.r * (1.0 + p.eps);
  const double outer = p.r * (1.0 + 2.0 * p.eps);

  CoupledLampWalkers w(y1, y2, coupling_window(p));
  CouplingOutcome out;
  out.max_distance = std::max(w.distance(0), w.distance(1));
  bool inner_ok = std::max(std::abs(y1.position), std::abs(y2.position)) <= inner;
  if (w.states_equal()) {
    out.tau_c = 0.0;
    out.coupled_first = true;
    out.meet_time = 0.0;
    out.met_inside_inner = inner_ok;
    out.stayed_in_outer = w.max_abs_position() <= outer;
    return out;
  }
  if (w.positions_met()) {
    out.meet_time = 0.0;
    out.met_inside_inner = inner_ok;
  }
  while (true) {
    if (w.events() >= p.event_cap) {
      out.capped = true;
      break;
    }
    const bool was_met = w.positions_met();
    w.advance(rng);
    out.max_distance = std::max({out.max_distance, w.distance(0), w.distance(1)});
    if (!was_met) {
      inner_ok = inner_ok && std::max(std::abs(w.position(0)), std::abs(w.position(1))) <= inner;
      if (w.positions_met()) {
        out.meet_time = w.time();
        out.met_inside_inner = inner_ok;
      }
    }
    if (static_cast<double>(std::max(w.distance(0), w.distance(1))) > exit_radius) {
      out.tau_e = w.time();
      break;
    }
    if (w.states_equal()) {
      out.tau_c = w.time();
      out.coupled_first = true;
      break;
    }
  }
  out.stayed_in_outer = w.max_abs_position() <= outer;
  out.events = w.events();
  return out;
}

/// The hard pair y1 = (-R, 1_[-R,0]), y2 = (R, 1_[0,R]).
inline std::pair<LampState, LampState> osc_pair(int r) {
  std::vector<int> left, right;
  for (int i = -r; i <= 0; ++i) left.push_back(i);
  for (int i = 0; i <= r; ++i) right.push_back(i);
  return {LampState(-r, std::move(left)), LampState(r, std::move(right))};
}

/// A random state of B(x0, R): lit extent [lo, hi] around the origin, position
/// in it, interior lamps fair coins, extremes lit; rejected until d <= R.
inline LampState random_ball_state(int r, RandomStream& rng) {
  while (true) {
    const int lo = -static_cast<int>(rng.below(static_cast<std::uint64_t>(r) + 1));
    const int hi = static_cast<int>(rng.below(static_cast<std::uint64_t>(r) + 1));
    const int pos = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo) + 1));
    std::vector<int> lamps;
    for (int s = lo; s <= hi; ++s) {
      const bool extreme = (s == lo && lo < 0) || (s == hi && hi > 0);
      if (extreme || rng.coin()) lamps.push_back(s);
    }
    LampState s(pos, std::move(lamps));
    if (lamp_distance(s) <= r) return s;
  }
}

struct PairEstimate {
  LampState y1;
  LampState y2;
  ProportionEstimate success;
  std::uint64_t cap_hits = 0;
  std::uint64_t window_checked = 0;     // successes with F1 and positions inside I(2 eps)
  std::uint64_t window_violations = 0;  // of those, max distance > 4 (1 + 2 eps) R
};

struct UcEstimate {
  CouplingParams params;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<PairEstimate> pairs;
  std::size_t worst_pair = 0;
  ProportionEstimate p1;  // the worst pair's estimate
  std::uint64_t window_violations = 0;
};

inline PairEstimate estimate_pair(const LampState& y1, const LampState& y2, const CouplingParams& p,
                                  std::uint64_t trials, std::uint64_t seed, std::uint64_t stream,
                                  unsigned threads) {
  struct Slot {
    bool success = false;
    bool capped = false;
    bool checked = false;
    bool violation = false;
  };
  std::vector<Slot> slots(trials);
  const double bound = 4.0 * (1.0 + 2.0 * p.eps) * p.r;
  parallel_for(trials, threads, [&](std::size_t t) {
    RandomStream rng(seed, stream, t);
    const auto o = reflection_couple(y1, y2, p, rng);
    auto& s = slots[t];
    s.success = o.coupled_first && !o.capped;
    s.capped = o.capped;
    s.checked = s.success && o.met_inside_inner && o.stayed_in_outer;
    s.violation = s.checked && static_cast<double>(o.max_distance) > bound;
  });
  PairEstimate e{y1, y2, {}, 0, 0, 0};
  std::uint64_t wins = 0;
  for (const auto& s : slots) {
    wins += s.success;
    e.cap_hits += s.capped;
    e.window_checked += s.checked;
    e.window_violations += s.violation;
  }
  e.success = estimate_proportion(wins, trials);
  return e;
}

/// Estimates p1 of UC(K) at scale R: the osc pair plus `random_pairs` random
/// pairs in B(x0, R), `trials` coupled runs each; p1 is the worst pair.
inline UcEstimate uc_estimate(const CouplingParams& p, std::uint64_t trials, std::uint64_t seed,
                              unsigned threads = 1, int random_pairs = 10) {
  validate(p);
  if (trials < 100) throw precondition_error("uc_estimate needs at least 100 trials");
  UcEstimate out;
  out.params = p;
  out.trials = trials;
  out.seed = seed;
  std::vector<std::pair<LampState, LampState>> starts{osc_pair(p.r)};
  RandomStream picker(seed, 0xba11);
  for (int i = 0; i < random_pairs; ++i) {
    LampState a = random_ball_state(p.r, picker);
    LampState b = random_ball_state(p.r, picker);
    starts.emplace_back(std::move(a), std::move(b));
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    out.pairs.push_back(estimate_pair(starts[i].first, starts[i].second, p, trials, seed, i + 1, threads));
    out.window_violations += out.pairs.back().window_violations;
    if (out.pairs[i].success.estimate < out.pairs[out.worst_pair].success.estimate) out.worst_pair = i;
  }
  out.p1 = out.pairs[out.worst_pair].success;
  return out;
}

// ---------------------------------------------------------------------------
// Failure of OI(K) for K < 3

struct OscParams {
  int r = 3;
  double k = 2.0;
  std::uint64_t step_cap = kStepCap;
};

struct OscGeometry {
  double delta = 0.0;   // (3 - K) / 3
  double lambda = 0.0;  // 1 - delta
  int window_lo = 0;    // lamp window [lambda R, R]
  int window_hi = 0;
  double exit_radius = 0.0;  // KR
};

inline OscGeometry osc_geometry(const OscParams& p) {
  if (p.r < 1) throw precondition_error("osc experiment needs R >= 1");
  if (!(p.k > 1.0 && p.k < 3.0)) throw precondition_error("osc experiment needs 1 < K < 3");
  OscGeometry g;
  g.delta = (3.0 - p.k) / 3.0;
  g.lambda = 1.0 - g.delta;
  const double dr = g.delta * p.r;
  if (std::abs(dr - std::round(dr)) > 1e-9)
    throw precondition_error("osc experiment needs delta R and lambda R integral (R a multiple of 3 for K = 2)");
  g.window_lo = p.r - static_cast<int>(std::lround(dr));
  g.window_hi = p.r;
  g.exit_radius = p.k * p.r;
  return g;
}

struct OscTrial {
  bool event = false;  // A(X_tau) meets [lambda R, R]
  bool capped = false;
  std::uint64_t steps = 0;
};

/// One discrete-time run from `start` until d(x0, X_n) > KR.
inline OscTrial osc_trial(const LampState& start, const OscParams& p, const OscGeometry& geo,
                          RandomStream& rng) {
  const int window = static_cast<int>(std::ceil(geo.exit_radius)) + 2;
  LampWindow lamps = to_window(start, window);
  int pos = start.position;
  OscTrial out;
  while (static_cast<double>(lamps.distance_with_position(pos)) <= geo.exit_radius) {
    if (out.steps >= p.step_cap) {
      out.capped = true;
      return out;  // counted as G failing
    }
    const std::uint64_t bits = rng.next();
    lamps.set(pos, (bits >> 63) & 1U);
    pos += ((bits >> 62) & 1U) ? 1 : -1;
    ++out.steps;
  }
  for (int s = geo.window_lo; s <= geo.window_hi && !out.event; ++s) out.event = lamps.get(s);
  return out;
}

struct OscFailureReport {
  OscParams params;
  OscGeometry geometry;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  ProportionEstimate h_y1;
  ProportionEstimate h_y2;
  std::uint64_t cap_hits_y1 = 0;
  std::uint64_t cap_hits_y2 = 0;
  double y1_bound = 0.0;        // 2^-(delta R)
  double oscillation_lower = 0.0;  // h(y2) - h(y1)
  bool y1_within_bound = false;    // h(y1) <= 2^-(delta R) + 3 SE
};

inline ProportionEstimate run_osc_start(const LampState& start, const OscParams& p, const OscGeometry& geo,
                                        std::uint64_t trials, std::uint64_t seed, std::uint64_t stream,
                                        unsigned threads, std::uint64_t& cap_hits) {
  std::vector<OscTrial> slots(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    RandomStream rng(seed, stream, t);
    slots[t] = osc_trial(start, p, geo, rng);
  });
  std::uint64_t hits = 0;
  cap_hits = 0;
  for (const auto& s : slots) {
    hits += s.event && !s.capped;
    cap_hits += s.capped;
  }
  return estimate_proportion(hits, trials);
}

/// Monte Carlo estimates of h(y) = P^y(A(X_tau) meets [lambda R, R]) at the
/// two states of osc_pair(R).
inline OscFailureReport osc_failure_experiment(const OscParams& p, std::uint64_t trials,
                                               std::uint64_t seed, unsigned threads = 1) {
  OscFailureReport rep;
  rep.params = p;
  rep.geometry = osc_geometry(p);
  if (trials < 10'000) throw precondition_error("osc experiment needs at least 1e4 trials");
  rep.trials = trials;
  rep.seed = seed;
  const auto [y1, y2] = osc_pair(p.r);
  rep.h_y1 = run_osc_start(y1, p, rep.geometry, trials, seed, 1, threads, rep.cap_hits_y1);
  rep.h_y2 = run_osc_start(y2, p, rep.geometry, trials, seed, 2, threads, rep.cap_hits_y2);
  rep.y1_bound = std::exp2(-rep.geometry.delta * p.r);
  rep.oscillation_lower = rep.h_y2.estimate - rep.h_y1.estimate;
  rep.y1_within_bound = rep.h_y1.estimate <= rep.y1_bound + 3.0 * rep.h_y1.std_error;
  return rep;
}

struct OscExact {
  double h_y1 = 0.0;
  double h_y2 = 0.0;
  std::size_t states = 0;
};

/// Exact h at the osc pair: solves h(x) = (1/4) sum over the four moves of
/// x, for x in B(x0, KR), with h = 1_G beyond. The chain is the
/// switch-then-walk one, not the simple walk on the symmetric closure.
/// Small R only.
inline OscExact osc_failure_exact(const OscParams& p) {
  const auto geo = osc_geometry(p);
  if (p.r > 4) throw precondition_error("exact mode is limited to R <= 4");
  const int inner = static_cast<int>(std::floor(geo.exit_radius + 1e-9));
  const auto lb = lamplighter_ball(inner);
  auto event = [&](Vertex z) {
    for (int site : lb.states[z].lamps)
      if (site >= geo.window_lo && site <= geo.window_hi) return 1.0;
    return 0.0;
  };
  // states at depth <= inner come first in BFS order
  std::size_t n = 0;
  while (n < lb.depth.size() && lb.depth[n] <= inner) ++n;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    const auto ix = static_cast<Eigen::Index>(x);
    triplets.emplace_back(ix, ix, 1.0);
    for (Vertex y : lb.moves[x]) {
      if (y < n) triplets.emplace_back(ix, static_cast<Eigen::Index>(y), -0.25);
      else rhs(ix) += 0.25 * event(y);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(m);
  if (solver.info() != Eigen::Success) throw numerical_error("exact lamplighter system is singular");
  const Eigen::VectorXd h = solver.solve(rhs);
  if ((m * h - rhs).lpNorm<Eigen::Infinity>() > kHarmonicTol)
    throw numerical_error("exact lamplighter solve missed the residual target");
  const auto [y1, y2] = osc_pair(p.r);
  OscExact out;
  out.h_y1 = h(*lb.find(y1));
  out.h_y2 = h(*lb.find(y2));
  out.states = n;
  return out;
}

} // namespace harnack

#endif
