#pragma once

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pclf/error.hpp"
#include "pclf/graph.hpp"

namespace pclf {

/// Text form:
///
///     alphabet: 1 2
///     node a
///     edge a a 1
///
/// `#` starts a comment. Nodes must be declared before edges refer to them.
inline std::string render_graph(const LabeledDigraph& g) {
  std::string out = "alphabet:";
  for (const auto& l : g.alphabet().letters()) out += " " + l;
  out += '\n';
  for (const auto& n : g.nodes()) out += "node " + n.str() + '\n';
  for (const auto& e : g.edges()) {
    out += "edge " + g.node(e.src).str() + ' ' + g.node(e.dst).str() + ' ' + g.alphabet()[e.label] + '\n';
  }
  return out;
}

inline LabeledDigraph parse_graph(std::istream& in, const std::string& source = "<input>") {
  std::optional<Alphabet> alphabet;
  std::vector<NodeId> nodes;
  std::map<NodeId, std::size_t> declared;
  std::vector<LabeledEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(std::move(t));
    if (tok.empty()) continue;

    if (!alphabet) {
      if (tok[0] != "alphabet:") throw ParseError(source, lineno, "expected 'alphabet:'");
      if (tok.size() < 2) throw ParseError(source, lineno, "expected at least one letter after 'alphabet:'");
      try {
        alphabet.emplace(std::vector<std::string>(tok.begin() + 1, tok.end()));
      } catch (const InvalidInput& e) {
        throw ParseError(source, lineno, e.what());
      }
      continue;
    }
    auto node_at = [&](const std::string& text) {
      try {
        return NodeId::parse(text);
      } catch (const InvalidInput& e) {
        throw ParseError(source, lineno, e.what());
      }
    };
    if (tok[0] == "node") {
      if (tok.size() != 2) throw ParseError(source, lineno, "expected 'node <name>'");
      NodeId id = node_at(tok[1]);
      if (!declared.emplace(id, nodes.size()).second) {
        throw ParseError(source, lineno, "duplicate node '" + tok[1] + "'");
      }
      nodes.push_back(std::move(id));
    } else if (tok[0] == "edge") {
      if (tok.size() != 4) throw ParseError(source, lineno, "expected 'edge <src> <dst> <label>'");
      NodeId s = node_at(tok[1]);
      NodeId d = node_at(tok[2]);
      if (!declared.count(s)) throw ParseError(source, lineno, "expected a declared node, got '" + tok[1] + "'");
      if (!declared.count(d)) throw ParseError(source, lineno, "expected a declared node, got '" + tok[2] + "'");
      if (!alphabet->find(tok[3])) {
        throw ParseError(source, lineno, "expected a letter of the alphabet, got '" + tok[3] + "'");
      }
      edges.push_back({std::move(s), std::move(d), tok[3]});
    } else {
      throw ParseError(source, lineno, "expected 'node' or 'edge', got '" + tok[0] + "'");
    }
  }
  if (!alphabet) throw ParseError(source, lineno, "expected 'alphabet:'");
  return LabeledDigraph(std::move(*alphabet), std::move(nodes), edges);
}

inline LabeledDigraph parse_graph(const std::string& text, const std::string& source = "<input>") {
  std::istringstream in(text);
  return parse_graph(in, source);
}

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}
}  // namespace detail

/// Graphviz export. Extra unlabeled edges are drawn dashed.
inline std::string to_dot(const LabeledDigraph& g,
                          const std::vector<std::pair<std::size_t, std::size_t>>& unlabeled = {}) {
  std::string out = "digraph G {\n";
  for (const auto& n : g.nodes()) out += "  " + detail::dot_quote(n.str()) + ";\n";
  for (const auto& e : g.edges()) {
    out += "  " + detail::dot_quote(g.node(e.src).str()) + " -> " + detail::dot_quote(g.node(e.dst).str()) +
           " [label=" + detail::dot_quote(g.alphabet()[e.label]) + "];\n";
  }
  for (const auto& [s, d] : unlabeled) {
    out += "  " + detail::dot_quote(g.node(s).str()) + " -> " + detail::dot_quote(g.node(d).str()) +
           " [style=dashed];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace pclf
