#ifndef HARNACK_GRAPH_IO_HPP
#define HARNACK_GRAPH_IO_HPP

// TSV edge lists: one edge per line, "u<TAB>v<TAB>weight", '#' starts a
// comment. Weights are written with 17 significant digits so a save/load
// round trip reproduces them bit for bit.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "harnack/graph.hpp"

namespace harnack {

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline WeightedGraph read_graph_tsv(std::istream& in) {
  std::vector<LabeledEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3)
      throw precondition_error("line " + std::to_string(lineno) + ": expected u<TAB>v<TAB>weight");
    char* end = nullptr;
    const double w = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str() || *end != '\0')
      throw precondition_error("line " + std::to_string(lineno) + ": bad weight '" + fields[2] +
                               "'");
    edges.push_back({fields[0], fields[1], w});
  }
  return build_graph(edges);
}

inline WeightedGraph load_graph_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precondition_error("cannot open graph file '" + path + "'");
  return read_graph_tsv(in);
}

inline void write_graph_tsv(const WeightedGraph& g, std::ostream& out) {
  for (const auto& e : g.edges())
    out << g.label(e.u) << '\t' << g.label(e.v) << '\t' << format_real(e.weight) << '\n';
}

inline void save_graph_tsv(const WeightedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw precondition_error("cannot write graph file '" + path + "'");
  write_graph_tsv(g, out);
}

} // namespace harnack

#endif
