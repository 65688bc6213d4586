#ifndef HARNACK_RUNNER_HPP
#define HARNACK_RUNNER_HPP

// Executes an ExperimentConfig: one JSON report per radius (gen has none),
// plus the graph TSV for gen and a pair CSV for db. Errors are written into
// the report and mapped to exit statuses 2 (precondition), 3 (numerics),
// 4 (cap).

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "harnack/config.hpp"
#include "harnack/conductance.hpp"
#include "harnack/coupling.hpp"
#include "harnack/graph_io.hpp"
#include "harnack/graph_source.hpp"
#include "harnack/harnack.hpp"
#include "harnack/report.hpp"

namespace harnack {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCap = 4;

/// Exit status for an exception escaping an operation. Anything unexpected
/// (bad_alloc, filesystem) is reported as 1.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const precondition_error*>(&e)) return kExitPrecondition;
  if (dynamic_cast<const numerical_error*>(&e)) return kExitNumerical;
  if (dynamic_cast<const cap_exceeded*>(&e)) return kExitCap;
  return 1;
}

inline const char* error_kind(int code) {
  switch (code) {
    case kExitPrecondition: return "precondition";
    case kExitNumerical: return "numerical";
    case kExitCap: return "cap";
    default: return "internal";
  }
}

inline Json params_json(const ExperimentConfig& c, std::optional<int> r) {
  Json p = {{"graph", c.graph}, {"operation", c.operation}, {"seed", c.seed}, {"threads", c.threads}};
  if (c.center) p["center"] = *c.center;
  if (r) p["R"] = *r;
  if (c.k) p["K"] = *c.k;
  if (c.operation == "hg" || c.operation == "annulus") p["D"] = c.d_spec;
  if (c.operation == "couple" || c.operation == "osc-fail") p["trials"] = c.trials;
  if (c.operation == "couple") p["eps"] = c.eps;
  if (c.cap) p["cap"] = *c.cap;
  return p;
}

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;
  std::vector<std::string> messages;
};

namespace runner_detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw precondition_error("cannot write '" + path.string() + "'");
  out << text;
}

inline Vertex center_of(const LoadedGraph& lg, const ExperimentConfig& c) {
  const std::string label = c.center.value_or(lg.origin);
  const auto v = lg.graph.find(label);
  if (!v) throw precondition_error("center '" + label + "' is not a vertex of " + lg.source);
  return *v;
}

inline void require_finite_graph(const LoadedGraph& lg, const std::string& op) {
  if (lg.graph.num_vertices() == 0)
    throw precondition_error(op + " needs a finite graph; use lamplighter:<R_max> for a truncated ball");
}

/// Only the identity: the group acts transitively, and the coupling and
/// oscillation experiments are written relative to x0 = (0, all off).
inline void require_lamplighter_identity(const LoadedGraph& lg, const ExperimentConfig& c) {
  if (lg.family != "lamplighter") throw precondition_error(c.operation + " runs on the lamplighter group only");
  if (c.center && *c.center != lg.origin)
    throw precondition_error(c.operation + " is centred at the identity " + lg.origin);
}

/// The result object for one radius. `extra` collects side files.
inline Json run_one(const LoadedGraph& lg, const ExperimentConfig& c, int r,
                    const std::filesystem::path& dir, std::vector<std::string>& files, int& status) {
  const std::string& op = c.operation;
  if (op == "couple") {
    require_lamplighter_identity(lg, c);
    CouplingParams p;
    p.r = r;
    p.k = c.k.value_or(5.0);
    p.eps = c.eps;
    if (c.cap) p.event_cap = *c.cap;
    const auto u = uc_estimate(p, c.trials, c.seed, c.threads);
    std::uint64_t caps = 0;
    for (const auto& pe : u.pairs) caps += pe.cap_hits;
    if (caps > 0) status = kExitCap;
    return uc_json(u);
  }
  if (op == "osc-fail") {
    require_lamplighter_identity(lg, c);
    OscParams p{r, c.k.value_or(2.0), c.cap.value_or(kStepCap)};
    const auto rep = osc_failure_experiment(p, c.trials, c.seed, c.threads);
    if (rep.cap_hits_y1 + rep.cap_hits_y2 > 0) status = kExitCap;
    Json j = osc_json(rep);
    if (r <= 4) {
      const auto ex = osc_failure_exact(p);
      j["exact"] = {{"h_y1", ex.h_y1}, {"h_y2", ex.h_y2}, {"states", ex.states}};
    }
    return j;
  }
  require_finite_graph(lg, op);
  const WeightedGraph& g = lg.graph;
  const Vertex x0 = center_of(lg, c);
  if (op == "ehi") return harnack_json(g, ehi_constant(g, x0, r));
  if (op == "oi") return harnack_json(g, oi_rho(g, x0, r, *c.k));
  if (op == "hg" || op == "annulus") {
    const int mult = c.d_spec == "4R" ? 4 : 2;
    const VertexSet d = ball(g, x0, mult * r);
    return harnack_json(g, op == "hg" ? hg_constant(g, x0, r, d) : annulus_ratio(g, x0, r, d));
  }
  if (op == "thm1") return theorem1_json(g, theorem1_check(g, x0, r));
  if (op == "db") {
    const auto rep = dumbbell_ratio(g, x0, r, c.cap.value_or(kDumbbellPairCap), c.threads);
    // lattice labels contain commas, so they are quoted
    std::string csv = "x,y,separation,conductance\n";
    for (const auto& p : rep.pairs)
      csv += "\"" + g.label(p.x) + "\",\"" + g.label(p.y) + "\"," + std::to_string(p.separation) + "," +
             format_real(p.conductance) + "\n";
    const auto path = dir / report_name(op, r, "csv");
    write_text(path, csv);
    files.push_back(path.string());
    return dumbbell_json(g, rep);
  }
  throw precondition_error("unknown operation '" + op + "'");
}

inline Json envelope(const ExperimentConfig& c, std::optional<int> r) {
  return {{"version", version()}, {"operation", c.operation}, {"params", params_json(c, r)}};
}

} // namespace runner_detail

/// Runs the config. Reports go to effective_out_dir(c); the worst exit
/// status over the batch is returned.
inline RunResult run_experiment(const ExperimentConfig& c) {
  namespace fs = std::filesystem;
  RunResult out;
  const fs::path dir = effective_out_dir(c);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    out.exit_code = kExitPrecondition;
    out.messages.push_back("cannot create output directory '" + dir.string() + "': " + ec.message());
    return out;
  }
  auto write_report = [&](const std::string& name, const Json& j) {
    const auto path = dir / name;
    runner_detail::write_text(path, j.dump(2) + "\n");
    out.files.push_back(path.string());
  };
  auto fail = [&](Json& j, const std::exception& e) {
    const int code = exit_code_for(e);
    j["status"] = "error";
    j["exit_code"] = code;
    j["error"] = {{"kind", error_kind(code)}, {"message", e.what()}};
    out.messages.push_back(e.what());
    out.exit_code = std::max(out.exit_code, code);
  };

  std::optional<LoadedGraph> lg;
  Json load_error;
  try {
    validate(c);
    lg = load_graph_source(c.graph);
  } catch (const std::exception& e) {
    load_error = runner_detail::envelope(c, std::nullopt);
    fail(load_error, e);
    write_report(report_name(c.operation, std::nullopt), load_error);
    return out;
  }

  if (c.operation == "gen") {
    Json j = runner_detail::envelope(c, std::nullopt);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      runner_detail::require_finite_graph(*lg, "gen");
      const auto tsv = dir / "gen.tsv";
      save_graph_tsv(lg->graph, tsv.string());
      out.files.push_back(tsv.string());
      std::size_t frontier = 0;
      for (bool f : lg->graph.frontier_flags()) frontier += f;
      j["result"] = {{"family", lg->family},
                     {"vertices", lg->graph.num_vertices()},
                     {"edges", lg->graph.num_edges()},
                     {"frontier_vertices", frontier},
                     {"origin", lg->origin},
                     {"tsv", tsv.filename().string()}};
      j["status"] = "ok";
      j["exit_code"] = kExitOk;
    } catch (const std::exception& e) {
      fail(j, e);
    }
    j["timings"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_report(report_name("gen", std::nullopt), j);
    return out;
  }

  for (int r : c.radii) {
    Json j = runner_detail::envelope(c, r);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      int status = kExitOk;
      j["result"] = runner_detail::run_one(*lg, c, r, dir, out.files, status);
      j["status"] = status == kExitOk ? "ok" : "cap_reached";
      j["exit_code"] = status;
      out.exit_code = std::max(out.exit_code, status);
    } catch (const std::exception& e) {
      fail(j, e);
    }
    j["timings"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    write_report(report_name(c.operation, r), j);
  }
  return out;
}

} // namespace harnack

#endif
