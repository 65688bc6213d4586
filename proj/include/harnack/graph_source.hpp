#ifndef HARNACK_GRAPH_SOURCE_HPP
#define HARNACK_GRAPH_SOURCE_HPP

// Graph sources named on the command line or in a config file:
//   lattice:<dim>:<half_width>   three_rail:<n_max>   lamplighter:<R_max>
//   path:<n>                      anything else is read as a TSV edge list.
// Plain "lamplighter" names the untruncated group; only the Monte Carlo
// operations, which track lamps in a sliding window, accept it.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "harnack/errors.hpp"
#include "harnack/generators.hpp"
#include "harnack/graph.hpp"
#include "harnack/graph_io.hpp"

namespace harnack {

struct LoadedGraph {
  std::string source;
  std::string family;  // lattice, three_rail, lamplighter, path, file
  WeightedGraph graph;  // empty for the untruncated lamplighter group
  std::string origin;  // default center label
  std::optional<LamplighterBall> lamplighter;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

inline int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw precondition_error("bad integer for " + what + ": '" + s + "'");
  return v;
}

/// Unit-weight path 0 - 1 - ... - n, no truncation frontier.
inline WeightedGraph path_graph(int n) {
  if (n < 1) throw precondition_error("path needs n >= 1");
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (int i = 0; i <= n; ++i) labels.push_back(std::to_string(i));
  for (int i = 0; i < n; ++i) edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(i + 1), 1.0});
  const std::size_t n_vertices = labels.size();
  return build_graph(n_vertices, edges, std::move(labels));
}

inline LoadedGraph load_graph_source(const std::string& spec) {
  const auto parts = split(spec, ':');
  LoadedGraph out;
  out.source = spec;
  if (!parts.empty() && parts[0] == "lattice") {
    if (parts.size() != 3) throw precondition_error("lattice spec is lattice:<dim>:<half_width>");
    const int dim = parse_int(parts[1], "lattice dimension");
    out.family = "lattice";
    out.graph = lattice_box(dim, parse_int(parts[2], "lattice half width"));
    out.origin = lattice_label(std::vector<int>(static_cast<std::size_t>(dim), 0));
  } else if (!parts.empty() && parts[0] == "three_rail") {
    if (parts.size() != 2) throw precondition_error("three_rail spec is three_rail:<n_max>");
    out.family = "three_rail";
    out.graph = three_rail(parse_int(parts[1], "three_rail n_max"));
    out.origin = "0,0";
  } else if (spec == "lamplighter") {
    out.family = "lamplighter";
    out.origin = to_label(LampState{});
  } else if (!parts.empty() && parts[0] == "lamplighter") {
    if (parts.size() != 2) throw precondition_error("lamplighter spec is lamplighter:<R_max>");
    out.family = "lamplighter";
    out.lamplighter = lamplighter_ball(parse_int(parts[1], "lamplighter R_max"));
    out.graph = out.lamplighter->graph;
    out.origin = to_label(LampState{});
  } else if (!parts.empty() && parts[0] == "path") {
    if (parts.size() != 2) throw precondition_error("path spec is path:<n>");
    out.family = "path";
    out.graph = path_graph(parse_int(parts[1], "path length"));
    out.origin = "0";
  } else {
    out.family = "file";
    out.graph = load_graph_tsv(spec);
    out.origin = out.graph.label(0);
  }
  return out;
}

} // namespace harnack

#endif
