#ifndef HARNACK_VERIFY_HPP
#define HARNACK_VERIFY_HPP

// The acceptance checks as library calls. Each criterion returns measured
// values and the tolerances it used; the summary JSON leaves out timings so
// that reruns with the same seed are byte-identical.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "harnack/conductance.hpp"
#include "harnack/coupling.hpp"
#include "harnack/generators.hpp"
#include "harnack/graph_source.hpp"
#include "harnack/harnack.hpp"
#include "harnack/oracles.hpp"
#include "harnack/potential.hpp"
#include "harnack/report.hpp"

namespace harnack {

inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"c1.tol", 1e-9},          {"c2.symmetry", 1e-9},     {"c2.harmonic", 1e-9},
      {"c2.series", 1e-6},       {"c3.tol", 1e-12},         {"c5.min_c1", 2.55},
      {"c6.p0_max", std::ldexp(1.0, -50)},                  {"c6.c1_factor", 10.0},
      {"c7.se_mult", 3.0},       {"c7.gap", 0.5},           {"c8.ratio", 0.5},
      {"c9.exact", 1e-12},       {"c9.rayleigh_slack", 1e-12},
      {"c9.db_factor", 4.0}};
  return t;
}

struct VerifyOptions {
  std::uint64_t seed = 20'240'601;
  unsigned threads = 1;
  std::set<int> only;                         // empty = all
  std::map<std::string, double> tolerances;  // overrides
  unsigned determinism_threads = 2;          // second run for criterion 10
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  Json measured = Json::object();
  Json tolerances = Json::object();
  double seconds = 0.0;       // not part of the JSON summary
  double runtime_limit = 0.0; // seconds, 0 = none stated

  [[nodiscard]] bool within_limit() const { return runtime_limit <= 0.0 || seconds <= runtime_limit; }
};

/// One human-readable line, e.g. "[PASS] 5 EHI constant ... (0.03 s)".
inline std::string summary_line(const CriterionResult& r) {
  char time[64];
  if (r.runtime_limit > 0.0)
    std::snprintf(time, sizeof time, "%.2f s, limit %.0f s", r.seconds, r.runtime_limit);
  else
    std::snprintf(time, sizeof time, "%.2f s", r.seconds);
  std::string line = std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name +
                     " (" + time + ")";
  if (!r.within_limit()) line += " runtime limit exceeded";
  if (r.measured.contains("error")) line += ": " + r.measured["error"].get<std::string>();
  return line;
}

struct VerifySummary {
  std::vector<CriterionResult> criteria;
  bool all_passed = true;

  [[nodiscard]] Json to_json(std::uint64_t seed) const {
    Json list = Json::array();
    for (const auto& c : criteria)
      list.push_back({{"id", c.id},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"tolerances", c.tolerances}});
    return {{"version", version()}, {"seed", seed}, {"all_passed", all_passed}, {"criteria", list}};
  }
};

namespace verify_detail {

class Context {
public:
  explicit Context(const VerifyOptions& o) : opts_(o) {
    for (const auto& [k, v] : o.tolerances)
      if (!default_tolerances().count(k)) throw precondition_error("unknown tolerance '" + k + "'");
  }

  double tol(const std::string& key, CriterionResult& r) const {
    const auto it = opts_.tolerances.find(key);
    const double v = it != opts_.tolerances.end() ? it->second : default_tolerances().at(key);
    r.tolerances[key] = v;
    return v;
  }

  /// Independent seed per (criterion, item).
  [[nodiscard]] std::uint64_t seed(int criterion, std::uint64_t item) const {
    RandomStream s(opts_.seed, static_cast<std::uint64_t>(criterion), item);
    return s.next();
  }

  [[nodiscard]] unsigned threads() const { return opts_.threads; }

private:
  const VerifyOptions& opts_;
};

inline void c1_path_ehi(const Context& ctx, CriterionResult& r) {
  const double tol = ctx.tol("c1.tol", r);
  const auto g = lattice_box(1, 200);
  const Vertex o = g.vertex("0");
  bool ok = true;
  Json rows = Json::array();
  for (int radius : {1, 2, 4, 8, 16, 32}) {
    const double c1 = ehi_constant(g, o, radius).constant;
    const double closed = (3.0 * radius + 1.0) / (radius + 1.0);
    const double brute = oracle::path_ehi_bruteforce(radius);
    const bool pass = std::abs(c1 - closed) <= tol && std::abs(brute - closed) <= tol;
    ok = ok && pass;
    rows.push_back({{"R", radius}, {"C1", c1}, {"closed_form", closed}, {"bruteforce", brute}, {"passed", pass}});
  }
  r.measured["rows"] = rows;
  r.passed = ok;
}

inline void c2_green(const Context& ctx, CriterionResult& r) {
  const double t_sym = ctx.tol("c2.symmetry", r);
  const double t_harm = ctx.tol("c2.harmonic", r);
  const double t_series = ctx.tol("c2.series", r);
  const auto g = lattice_box(2, 10);
  const Vertex o = g.vertex("0,0");
  const VertexSet d = ball(g, o, 8);

  // every column once, so the 200 random pairs are cheap lookups
  std::vector<GreenColumn> cols;
  for (Vertex x : d) cols.push_back(green_column(g, d, x));
  RandomStream rng(ctx.seed(2, 0), 0);
  double sym = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto a = rng.below(d.size()), b = rng.below(d.size());
    sym = std::max(sym, std::abs(cols[a].value(d[b]) - cols[b].value(d[a])));
  }
  const GreenColumn& g0 = cols[*d.index_of(o)];
  const VertexSet punctured = set_difference(d, VertexSet(std::vector<Vertex>{o}));
  const auto harm = is_harmonic(g, g0.as_field(g), punctured, t_harm);

  const VertexField series = green_series_oracle(g, d, o, 10'000);
  double series_err = 0.0;
  for (int x = -4; x <= 4; ++x)
    for (int y = -4; y <= 4; ++y) {
      const Vertex v = g.vertex(std::to_string(x) + "," + std::to_string(y));
      series_err = std::max(series_err, std::abs(series.at(v) - g0.value(v)));
    }
  r.measured = {{"symmetry_max", sym},
                {"harmonic_residual", harm.max_residual},
                {"series_max_error", series_err},
                {"pairs", 200},
                {"domain_size", d.size()}};
  r.passed = sym <= t_sym && harm.max_residual <= t_harm && series_err <= t_series;
}

inline void c3_oi(const Context& ctx, CriterionResult& r) {
  const double tol = ctx.tol("c3.tol", r);
  RandomStream rng(ctx.seed(3, 0), 0);
  const double ks[] = {1.5, 2.0, 2.5, 3.0};
  double worst = 0.0;
  int accepted = 0, attempts = 0;
  Json rows = Json::array();
  while (accepted < 25) {
    if (++attempts > 10'000) throw numerical_error("could not draw 25 admissible OI test graphs");
    const std::size_t n = 12 + rng.below(29);  // 12..40
    const auto g = oracle::random_graph(n, rng.below(n), rng);
    const Vertex x0 = static_cast<Vertex>(rng.below(n));
    const int radius = 1;
    const double k = ks[rng.below(4)];
    const VertexSet outer = ball(g, x0, outer_radius_for(k, radius));
    const VertexSet bdry = exterior_boundary(g, outer);
    if (bdry.size() < 2 || bdry.size() > 12) continue;
    const double rho = oi_rho(g, x0, radius, k).constant;
    const double brute = oracle::oi_bruteforce(g, outer.members(), ball(g, x0, radius).members());
    worst = std::max(worst, std::abs(rho - brute));
    rows.push_back({{"n", n}, {"K", k}, {"boundary", bdry.size()}, {"rho", rho}, {"bruteforce", brute}});
    ++accepted;
  }
  r.measured = {{"graphs", accepted}, {"max_abs_difference", worst}, {"rows", rows}};
  r.passed = worst <= tol;
}

inline void c4_hitting_chain(const Context&, CriterionResult& r) {
  const auto g = lattice_box(2, 40);
  const Vertex o = g.vertex("0,0");
  bool ok = true;
  Json rows = Json::array();
  for (int radius : {3, 9}) {
    const auto t = theorem1_check(g, o, radius);
    double min_hit = 1.0;
    std::size_t failures = 0;
    for (const auto& c : t.checks) {
      min_hit = std::min(min_hit, c.hit_probability);
      failures += !c.passed;
    }
    ok = ok && t.all_passed && failures == 0 && t.counting_bound <= 1.0;
    rows.push_back({{"R", radius},
                    {"N", t.n},
                    {"p0", t.p0},
                    {"C1", t.c1},
                    {"theta", t.theta},
                    {"boundary_size", t.boundary_size},
                    {"min_h_z_x0", min_hit},
                    {"lower_bound", t.p0 / t.c1 * std::pow(t.c1, -t.n)},
                    {"failed_vertices", failures},
                    {"counting_bound", t.counting_bound}});
  }
  r.measured["rows"] = rows;
  r.passed = ok;
}

inline void c5_z2_floor(const Context& ctx, CriterionResult& r) {
  const double floor_c1 = ctx.tol("c5.min_c1", r);
  const auto g = lattice_box(2, 40);
  const Vertex o = g.vertex("0,0");
  bool ok = true;
  Json rows = Json::array();
  for (int radius : {4, 8, 16}) {
    const double c1 = ehi_constant(g, o, radius).constant;
    ok = ok && c1 >= floor_c1;
    rows.push_back({{"R", radius}, {"C1", c1}});
  }
  r.measured["rows"] = rows;
  r.passed = ok;
}

inline void c6_annulus_hg(const Context& ctx, CriterionResult& r) {
  const double p0_max = ctx.tol("c6.p0_max", r);
  const double factor = ctx.tol("c6.c1_factor", r);
  const auto lat = lattice_box(2, 24);
  const auto rail = three_rail(60);
  bool ok = true;
  Json rows = Json::array();
  std::map<int, double> lattice_c1;
  for (const auto* family : {"lattice", "three_rail"}) {
    const WeightedGraph& g = std::string(family) == "lattice" ? lat : rail;
    const Vertex o = g.vertex("0,0");
    for (int radius : {4, 8}) {
      for (int mult : {2, 4}) {
        const VertexSet d = ball(g, o, mult * radius);
        bool clipped = false;
        for (Vertex v : d) clipped = clipped || g.on_frontier(v);
        if (clipped) continue;  // B(0, 32) does not fit in the 24-box
        const double ann = annulus_ratio(g, o, radius, d).constant;
        const double hg = hg_constant(g, o, radius, d).constant;
        const bool pass = std::isfinite(ann) && std::isfinite(hg) && ann <= hg;
        ok = ok && pass;
        rows.push_back({{"graph", family}, {"R", radius}, {"D", std::to_string(mult) + "R"},
                        {"annulus", ann}, {"hg", hg}, {"passed", pass}});
      }
    }
  }
  Json ehi = Json::array();
  for (int radius : {4, 8}) {
    lattice_c1[radius] = ehi_constant(lat, lat.vertex("0,0"), radius).constant;
    for (const char* center : {"0,0", "0,1", "3,0"}) {
      const double c = ehi_constant(rail, rail.vertex(center), radius).constant;
      const bool pass = std::isfinite(c) && c <= factor * lattice_c1[radius];
      ok = ok && pass;
      ehi.push_back({{"center", center}, {"R", radius}, {"three_rail_C1", c},
                     {"lattice_C1", lattice_c1[radius]}, {"passed", pass}});
    }
  }
  const double p0 = controlled_weights_p0(rail);
  ok = ok && p0 <= p0_max;
  r.measured = {{"comparisons", rows}, {"ehi", ehi}, {"three_rail_p0", p0}};
  r.passed = ok;
}

inline void c7_osc_failure(const Context& ctx, CriterionResult& r) {
  const double se_mult = ctx.tol("c7.se_mult", r);
  const double gap = ctx.tol("c7.gap", r);
  const std::uint64_t trials = 100'000;
  bool ok = true;
  Json rows = Json::array();
  for (int radius : {3, 6, 9}) {
    const auto rep = osc_failure_experiment({radius, 2.0}, trials, ctx.seed(7, radius), ctx.threads());
    const bool bound_ok = rep.h_y1.estimate <= rep.y1_bound + se_mult * rep.h_y1.std_error;
    ok = ok && bound_ok;
    Json row = {{"R", radius},
                {"h_y1", rep.h_y1.estimate},
                {"se_y1", rep.h_y1.std_error},
                {"h_y2", rep.h_y2.estimate},
                {"se_y2", rep.h_y2.std_error},
                {"bound_2^-deltaR", rep.y1_bound},
                {"y1_bound_passed", bound_ok},
                {"cap_hits", rep.cap_hits_y1 + rep.cap_hits_y2}};
    if (radius == 9) {
      const bool gap_ok = rep.oscillation_lower >= gap;
      ok = ok && gap_ok;
      row["oscillation_lower_bound"] = rep.oscillation_lower;
      row["gap_passed"] = gap_ok;
    }
    if (radius == 3) {
      const auto exact = osc_failure_exact({radius, 2.0});
      const bool e1 = std::abs(exact.h_y1 - rep.h_y1.estimate) <= se_mult * rep.h_y1.std_error;
      const bool e2 = std::abs(exact.h_y2 - rep.h_y2.estimate) <= se_mult * rep.h_y2.std_error;
      ok = ok && e1 && e2;
      row["exact_h_y1"] = exact.h_y1;
      row["exact_h_y2"] = exact.h_y2;
      row["exact_states"] = exact.states;
      row["exact_passed"] = e1 && e2;
    }
    rows.push_back(std::move(row));
  }
  r.measured = {{"K", 2.0}, {"trials", trials}, {"rows", rows}};
  r.passed = ok;
}

inline void c8_coupling(const Context& ctx, CriterionResult& r) {
  const double ratio = ctx.tol("c8.ratio", r);
  const std::uint64_t trials = 10'000;
  bool excludes_zero = true;
  double low_r4 = 0.0, min_low = 1.0;
  std::uint64_t violations = 0;
  Json rows = Json::array();
  for (int radius : {4, 8, 16}) {
    CouplingParams p;
    p.r = radius;
    p.k = 5.0;
    p.eps = 0.1;
    const auto u = uc_estimate(p, trials, ctx.seed(8, radius), ctx.threads());
    excludes_zero = excludes_zero && u.p1.wilson_low > 0.0;
    if (radius == 4) low_r4 = u.p1.wilson_low;
    min_low = std::min(min_low, u.p1.wilson_low);
    violations += u.window_violations;
    rows.push_back({{"R", radius},
                    {"p1", u.p1.estimate},
                    {"wilson95", {u.p1.wilson_low, u.p1.wilson_high}},
                    {"worst_pair", u.worst_pair},
                    {"window_violations", u.window_violations}});
  }
  const bool scale_ok = min_low >= ratio * low_r4;
  r.measured = {{"K", 5.0},
                {"eps", 0.1},
                {"trials", trials},
                {"rows", rows},
                {"excludes_zero", excludes_zero},
                {"min_lower_bound", min_low},
                {"lower_bound_R4", low_r4},
                {"scale_passed", scale_ok},
                {"window_violations", violations}};
  r.passed = excludes_zero && scale_ok && violations == 0;
}

/// Hubs a = 0 and b = 1 joined by k internally disjoint unit paths of n edges.
inline WeightedGraph parallel_paths(int k, int n) {
  std::vector<Edge> edges;
  Vertex next = 2;
  for (int p = 0; p < k; ++p) {
    Vertex prev = 0;
    for (int i = 1; i < n; ++i) {
      edges.push_back({prev, next, 1.0});
      prev = next++;
    }
    edges.push_back({prev, 1, 1.0});
  }
  return build_graph(next, edges);
}

inline void c9_conductance(const Context& ctx, CriterionResult& r) {
  const double exact = ctx.tol("c9.exact", r);
  const double slack = ctx.tol("c9.rayleigh_slack", r);
  const double db_factor = ctx.tol("c9.db_factor", r);
  auto single = [](Vertex v) { return VertexSet(std::vector<Vertex>{v}); };
  auto everything = [](const WeightedGraph& g) {
    std::vector<Vertex> all(g.num_vertices());
    for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
    return VertexSet(std::move(all));
  };

  double series_err = 0.0;
  for (int n = 1; n <= 30; ++n) {
    const auto g = path_graph(n);
    const double c = effective_conductance(g, everything(g), single(0), single(static_cast<Vertex>(n))).value;
    series_err = std::max(series_err, std::abs(c - 2.0 / n));
  }
  double parallel_err = 0.0;
  for (auto [k, n] : {std::pair{2, 3}, std::pair{3, 5}, std::pair{4, 7}, std::pair{5, 2}}) {
    const auto g = parallel_paths(k, n);
    const double c = effective_conductance(g, everything(g), single(0), single(1)).value;
    parallel_err = std::max(parallel_err, std::abs(c - 2.0 * k / n));
  }

  RandomStream rng(ctx.seed(9, 0), 0);
  auto g = oracle::random_graph(30, 30, rng);
  const VertexSet all = everything(g);
  const VertexSet a{std::vector<Vertex>{0, 1}}, b{std::vector<Vertex>{28, 29}};
  double prev = effective_conductance(g, all, a, b).value;
  std::size_t rayleigh_fail = 0;
  double min_step = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    auto edges = g.edges();
    auto& e = edges[rng.below(edges.size())];
    e.weight *= 1.0 + 3.0 * rng.uniform();
    g = build_graph(g.num_vertices(), edges, g.labels());
    const double now = effective_conductance(g, all, a, b).value;
    min_step = std::min(min_step, now - prev);
    rayleigh_fail += now < prev - slack;
    prev = now;
  }

  const auto lat = lattice_box(2, 20);
  const Vertex o = lat.vertex("0,0");
  const auto base = dumbbell_ratio(lat, o, 10, kDumbbellPairCap, ctx.threads());
  RandomStream frng(ctx.seed(9, 1), 0);
  std::vector<double> factors(lat.num_edges());
  for (auto& f : factors) f = std::exp2(2.0 * frng.uniform() - 1.0);  // in [1/2, 2]
  const auto pert = dumbbell_ratio(perturb_weights(lat, factors, 2.0), o, 10, kDumbbellPairCap, ctx.threads());

  const bool db_ok = pert.ratio <= db_factor * base.ratio;
  r.measured = {{"series_max_error", series_err},
                {"parallel_max_error", parallel_err},
                {"rayleigh_steps", 50},
                {"rayleigh_failures", rayleigh_fail},
                {"rayleigh_min_increment", min_step},
                {"db_base_ratio", base.ratio},
                {"db_perturbed_ratio", pert.ratio},
                {"db_pairs", base.pairs.size()},
                {"db_variational_check", base.variational_check && pert.variational_check}};
  r.passed = series_err <= exact && parallel_err <= exact && rayleigh_fail == 0 && db_ok &&
             base.variational_check && pert.variational_check;
}

struct Entry {
  int id;
  const char* name;
  double limit;
  void (*run)(const Context&, CriterionResult&);
};

inline const std::vector<Entry>& entries() {
  static const std::vector<Entry> e{
      {1, "path EHI closed form", 5, c1_path_ehi},
      {2, "Green function contracts", 30, c2_green},
      {3, "OI total-variation reduction", 60, c3_oi},
      {4, "ball growth chain inequalities", 120, c4_hitting_chain},
      {5, "EHI constant lower bound on Z^2", 0, c5_z2_floor},
      {6, "annulus ratio vs HG, three-rail", 0, c6_annulus_hg},
      {7, "lamplighter OI failure for K < 3", 600, c7_osc_failure},
      {8, "lamplighter uniform coupling K = 5", 900, c8_coupling},
      {9, "conductance laws and DB stability", 60, c9_conductance},
  };
  return e;
}

inline std::vector<CriterionResult> run_subset(const VerifyOptions& opts, const std::set<int>& ids,
                                               const std::function<void(const CriterionResult&)>& on_done) {
  const Context ctx(opts);
  std::vector<CriterionResult> out;
  for (const auto& e : entries()) {
    if (!ids.count(e.id)) continue;
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    r.runtime_limit = e.limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(ctx, r);
    } catch (const std::exception& ex) {
      r.passed = false;
      r.measured["error"] = ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_done) on_done(r);
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace verify_detail

/// Runs the selected criteria (all by default). Criterion 10 reruns the
/// other selected criteria with a different thread count and compares the
/// JSON byte for byte.
inline VerifySummary verify_suite(const VerifyOptions& opts,
                                  const std::function<void(const CriterionResult&)>& on_done = {}) {
  std::set<int> ids = opts.only;
  if (ids.empty())
    for (int i = 1; i <= 10; ++i) ids.insert(i);
  for (int id : ids)
    if (id < 1 || id > 10) throw precondition_error("no criterion " + std::to_string(id));
  std::set<int> base(ids.begin(), ids.end());
  base.erase(10);

  VerifySummary s;
  s.criteria = verify_detail::run_subset(opts, base, on_done);
  if (ids.count(10)) {
    std::set<int> again = base;
    if (again.empty())
      for (int i = 1; i <= 9; ++i) again.insert(i);
    VerifyOptions other = opts;
    other.threads = opts.determinism_threads == opts.threads ? opts.threads + 1 : opts.determinism_threads;
    const auto t0 = std::chrono::steady_clock::now();
    const auto first = base == again ? s.criteria : verify_detail::run_subset(opts, again, {});
    const auto second = verify_detail::run_subset(other, again, {});
    auto dump = [&](const std::vector<CriterionResult>& list) {
      VerifySummary tmp;
      tmp.criteria = list;
      return tmp.to_json(opts.seed).dump();
    };
    CriterionResult r;
    r.id = 10;
    r.name = "determinism across thread counts";
    const std::string a = dump(first), b = dump(second);
    r.passed = a == b;
    r.measured = {{"threads", {opts.threads, other.threads}},
                  {"criteria_compared", std::vector<int>(again.begin(), again.end())},
                  {"bytes", a.size()},
                  {"identical", a == b}};
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_done) on_done(r);
    s.criteria.push_back(std::move(r));
  }
  for (const auto& c : s.criteria) s.all_passed = s.all_passed && c.passed;
  return s;
}

} // namespace harnack

#endif
