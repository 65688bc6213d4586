#ifndef HARNACK_REPORT_HPP
#define HARNACK_REPORT_HPP

// JSON views of the library's results. nlohmann::json stores objects in a
// std::map, so keys come out sorted; doubles are written in the shortest form
// that reads back to the same bits.

#include <json.hpp>

#include <string>

#include "harnack/conductance.hpp"
#include "harnack/coupling.hpp"
#include "harnack/graph.hpp"
#include "harnack/harnack.hpp"
#include "harnack/potential.hpp"

#ifndef HARNACK_VERSION
#define HARNACK_VERSION "unknown"
#endif

namespace harnack {

using Json = nlohmann::json;

inline const char* version() { return HARNACK_VERSION; }

inline Json field_json(const WeightedGraph& g, const VertexField& f) {
  Json out = Json::object();
  for (std::size_t i = 0; i < f.domain().size(); ++i) out[g.label(f.domain()[i])] = f.values()[i];
  return out;
}

inline Json exit_json(const WeightedGraph& g, const ExitDistribution& e) {
  Json out = Json::object();
  for (std::size_t i = 0; i < e.boundary.size(); ++i) out[g.label(e.boundary[i])] = e.probs[i];
  return out;
}

inline Json green_json(const WeightedGraph& g, const GreenColumn& c) {
  Json values = Json::object();
  for (std::size_t i = 0; i < c.domain.size(); ++i) values[g.label(c.domain[i])] = c.values[i];
  return {{"source", g.label(c.source)}, {"values", std::move(values)}};
}

inline Json harnack_json(const WeightedGraph& g, const HarnackReport& r) {
  Json w = {{"u", g.label(r.witness.u)}, {"v", g.label(r.witness.v)}};
  if (r.witness.boundary) w["z"] = g.label(*r.witness.boundary);
  Json out = {{"condition", to_string(r.condition)},
              {"center", g.label(r.center)},
              {"R", r.radius},
              {"outer_radius", r.outer_radius},
              {"constant", r.constant},
              {"witness", std::move(w)},
              {"residuals", {{"max", r.residual}}}};
  if (r.k) out["K"] = *r.k;
  return out;
}

inline Json theorem1_json(const WeightedGraph& g, const Theorem1Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json chain = Json::array();
    for (const auto& l : c.chain)
      chain.push_back({{"j", l.scale},
                       {"y", g.label(l.on_path)},
                       {"center", g.label(l.center)},
                       {"radius", l.radius}});
    checks.push_back({{"z", g.label(c.z)},
                      {"h_z_x0", c.hit_probability},
                      {"lower_bound", c.lower_bound},
                      {"passed", c.passed},
                      {"chain", std::move(chain)}});
  }
  return {{"condition", "THM1"},
          {"center", g.label(r.center)},
          {"R", r.radius},
          {"N", r.n},
          {"p0", r.p0},
          {"C1", r.c1},
          {"theta", r.theta},
          {"boundary_size", r.boundary_size},
          {"counting_bound", r.counting_bound},
          {"exit_mass", r.exit_mass},
          {"chained_balls", r.chained_balls},
          {"all_passed", r.all_passed},
          {"checks", std::move(checks)}};
}

inline Json pair_json(const WeightedGraph& g, const DumbbellPair& p) {
  return {{"x", g.label(p.x)}, {"y", g.label(p.y)}, {"separation", p.separation},
          {"conductance", p.conductance}};
}

inline Json dumbbell_json(const WeightedGraph& g, const DumbbellReport& r) {
  return {{"center", g.label(r.center)},
          {"R", r.radius},
          {"head_radius", r.head_radius},
          {"candidate_pairs", r.candidate_pairs},
          {"overlapping_heads", r.overlapping_heads},
          {"evaluated_pairs", r.pairs.size()},
          {"sampled", r.sampled},
          {"max", r.max_conductance},
          {"min", r.min_conductance},
          {"ratio", r.ratio},
          {"witnesses", {{"max", pair_json(g, r.max_witness)}, {"min", pair_json(g, r.min_witness)}}},
          {"variational_check", r.variational_check},
          {"conventions", "heads floor(R/10); 2 d(x,x0) <= R; 3 d(x,y) >= R"}};
}

inline Json proportion_json(const ProportionEstimate& e) {
  return {{"successes", e.successes},
          {"trials", e.trials},
          {"estimate", e.estimate},
          {"std_error", e.std_error},
          {"wilson95", {e.wilson_low, e.wilson_high}}};
}

inline Json uc_json(const UcEstimate& u) {
  Json pairs = Json::array();
  for (const auto& p : u.pairs)
    pairs.push_back({{"y1", to_label(p.y1)},
                     {"y2", to_label(p.y2)},
                     {"success", proportion_json(p.success)},
                     {"cap_hits", p.cap_hits},
                     {"window_checked", p.window_checked},
                     {"window_violations", p.window_violations}});
  return {{"params",
           {{"R", u.params.r}, {"K", u.params.k}, {"eps", u.params.eps}, {"event_cap", u.params.event_cap}}},
          {"trials", u.trials},
          {"seed", u.seed},
          {"p1", proportion_json(u.p1)},
          {"worst_pair", u.worst_pair},
          {"window_violations", u.window_violations},
          {"pairs", std::move(pairs)}};
}

inline Json osc_json(const OscFailureReport& r) {
  return {{"params", {{"R", r.params.r}, {"K", r.params.k}, {"step_cap", r.params.step_cap}}},
          {"delta", r.geometry.delta},
          {"lambda", r.geometry.lambda},
          {"lamp_window", {r.geometry.window_lo, r.geometry.window_hi}},
          {"trials", r.trials},
          {"seed", r.seed},
          {"estimates", {{"h_y1", proportion_json(r.h_y1)}, {"h_y2", proportion_json(r.h_y2)}}},
          {"cap_hits", {{"y1", r.cap_hits_y1}, {"y2", r.cap_hits_y2}}},
          {"y1_bound", r.y1_bound},
          {"y1_within_bound", r.y1_within_bound},
          {"oscillation_lower_bound", r.oscillation_lower}};
}

} // namespace harnack

#endif
