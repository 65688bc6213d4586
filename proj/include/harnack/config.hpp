#ifndef HARNACK_CONFIG_HPP
#define HARNACK_CONFIG_HPP

// Experiment configs: one INI-style file with [graph], [run] and [output]
// sections. Unknown sections or keys are errors. A comma list for R turns
// the config into a batch, one report per radius.
//
//   [graph]
//   source = lattice:2:24
//   [run]
//   operation = ehi
//   R = 2,4,8
//   [output]
//   dir = out

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "harnack/errors.hpp"
#include "harnack/graph_io.hpp"
#include "harnack/graph_source.hpp"

namespace harnack {

inline const std::set<std::string>& known_operations() {
  static const std::set<std::string> ops{"gen", "ehi",    "hg",       "annulus", "oi",
                                         "thm1", "db",    "couple",   "osc-fail"};
  return ops;
}

struct ExperimentConfig {
  std::string graph;
  std::string operation;
  std::optional<std::string> center;
  std::vector<int> radii;
  std::optional<double> k;
  std::string d_spec = "2R";
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> cap;
  unsigned threads = 1;
  double eps = 0.1;
  std::string out_dir = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw precondition_error("bad unsigned integer for " + what + ": '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw precondition_error("value for " + what + " out of range: '" + s + "'");
  }
}

inline double parse_real(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v))
    throw precondition_error("bad number for " + what + ": '" + s + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

} // namespace detail

/// Checks parameters against the operation's preconditions before any work.
inline void validate(const ExperimentConfig& c) {
  if (c.graph.empty()) throw precondition_error("config needs [graph] source");
  if (!known_operations().count(c.operation))
    throw precondition_error("unknown operation '" + c.operation + "'");
  if (c.threads == 0) throw precondition_error("threads must be >= 1");
  if (c.operation == "gen") return;
  if (c.radii.empty()) throw precondition_error(c.operation + " needs R");
  for (int r : c.radii) {
    if (r < 0) throw precondition_error("R must be nonnegative");
    if (c.operation != "ehi" && r < 1) throw precondition_error(c.operation + " needs R >= 1");
    if (c.operation == "db" && r < 10) throw precondition_error("db needs R >= 10");
  }
  if (c.operation == "hg" || c.operation == "annulus")
    if (c.d_spec != "2R" && c.d_spec != "4R") throw precondition_error("D must be 2R or 4R");
  if (c.operation == "oi") {
    if (!c.k || !(*c.k > 1.0)) throw precondition_error("oi needs K > 1");
  }
  if (c.operation == "couple") {
    const double k = c.k.value_or(5.0);
    if (!(k > 4.0)) throw precondition_error("couple needs K > 4");
    if (!(c.eps > 0.0 && c.eps < (k - 4.0) / 8.0))
      throw precondition_error("couple needs 0 < eps < (K - 4) / 8");
    if (c.trials < 100) throw precondition_error("couple needs trials >= 100");
  }
  if (c.operation == "osc-fail") {
    const double k = c.k.value_or(2.0);
    if (!(k > 1.0 && k < 3.0)) throw precondition_error("osc-fail needs 1 < K < 3");
    if (c.trials < 10'000) throw precondition_error("osc-fail needs trials >= 10000");
  }
  if (c.cap && *c.cap == 0) throw precondition_error("cap must be positive");
}

inline ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw precondition_error(std::string("config: ") + e.what());
  }
  static const std::map<std::string, std::set<std::string>> allowed{
      {"graph", {"source"}},
      {"run", {"operation", "center", "R", "K", "D", "trials", "seed", "cap", "threads", "eps"}},
      {"output", {"dir"}}};
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) throw precondition_error("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw precondition_error("config: key outside a section");
    for (const auto& [key, node] : body) {
      if (!it->second.count(key))
        throw precondition_error("config: unknown key '" + key + "' in [" + section + "]");
      const std::string v = detail::trim(node.data());
      const std::string what = section + "." + key;
      if (key == "source") c.graph = v;
      else if (key == "operation") c.operation = v;
      else if (key == "center") c.center = v;
      else if (key == "R") {
        for (const auto& item : split(v, ',')) c.radii.push_back(parse_int(detail::trim(item), what));
      } else if (key == "K") c.k = detail::parse_real(v, what);
      else if (key == "D") c.d_spec = v;
      else if (key == "trials") c.trials = detail::parse_u64(v, what);
      else if (key == "seed") c.seed = detail::parse_u64(v, what);
      else if (key == "cap") c.cap = detail::parse_u64(v, what);
      else if (key == "threads") c.threads = static_cast<unsigned>(detail::parse_u64(v, what));
      else if (key == "eps") c.eps = detail::parse_real(v, what);
      else if (key == "dir") c.out_dir = v;
    }
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precondition_error("cannot open config '" + path + "'");
  return parse_config(in);
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[graph]\nsource = " << c.graph << "\n\n[run]\noperation = " << c.operation << "\n";
  if (c.center) out << "center = " << *c.center << "\n";
  if (!c.radii.empty()) {
    out << "R = ";
    for (std::size_t i = 0; i < c.radii.size(); ++i) out << (i ? "," : "") << c.radii[i];
    out << "\n";
  }
  if (c.k) out << "K = " << format_real(*c.k) << "\n";
  out << "D = " << c.d_spec << "\ntrials = " << c.trials << "\nseed = " << c.seed << "\n";
  if (c.cap) out << "cap = " << *c.cap << "\n";
  out << "threads = " << c.threads << "\neps = " << format_real(c.eps) << "\n\n[output]\ndir = "
      << c.out_dir << "\n";
  return out.str();
}

/// Output directory, honouring HARNACK_LAB_OUT_DIR.
inline std::string effective_out_dir(const ExperimentConfig& c) {
  if (const char* env = std::getenv("HARNACK_LAB_OUT_DIR"); env && *env) return env;
  return c.out_dir;
}

/// Deterministic report name for one radius of a (possibly batched) run.
inline std::string report_name(const std::string& operation, std::optional<int> r,
                               const std::string& ext = "json") {
  std::string base = operation;
  for (auto& ch : base)
    if (ch == '-') ch = '_';
  if (r) base += "_R" + std::to_string(*r);
  return base + "." + ext;
}

} // namespace harnack

#endif
