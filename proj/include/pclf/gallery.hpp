#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pclf/graph.hpp"

namespace pclf::gallery {

struct GalleryEntry {
  std::string name;
  LabeledDigraph graph;
  std::string provenance;
};

/// Common Lyapunov function: one node with a self-loop per letter.
inline LabeledDigraph g0() {
  return make_graph(Alphabet::numbered(2), {"a"}, {{"a", "a", "1"}, {"a", "a", "2"}});
}

inline LabeledDigraph g1() {
  return make_graph(Alphabet::numbered(2), {"b", "c"},
                    {{"b", "b", "1"}, {"b", "c", "2"}, {"c", "c", "2"}, {"c", "b", "1"}});
}

inline LabeledDigraph g2() {
  return make_graph(Alphabet::numbered(2), {"b'", "c'"},
                    {{"b'", "b'", "1"}, {"b'", "c'", "1"}, {"c'", "c'", "2"}, {"c'", "b'", "2"}});
}

/// Two nodes swapping on every letter; its 2-sum lift splits into itself plus g0.
inline LabeledDigraph g_alpha() {
  return make_graph(Alphabet::numbered(2), {"a", "b"},
                    {{"a", "b", "1"}, {"a", "b", "2"}, {"b", "a", "1"}, {"b", "a", "2"}});
}

inline LabeledDigraph g_phi() {
  return make_graph(Alphabet::numbered(2), {"a", "b", "c"},
                    {{"a", "a", "1"}, {"a", "b", "1"}, {"b", "a", "2"}, {"a", "c", "2"}, {"c", "a", "2"}});
}

inline LabeledDigraph g_psi() {
  return make_graph(Alphabet::numbered(2), {"a'", "b'"},
                    {{"a'", "a'", "1"}, {"a'", "b'", "1"}, {"a'", "b'", "2"}, {"b'", "a'", "2"}});
}

inline std::vector<GalleryEntry> entries() {
  return {
      {"g0", g0(), "single node, self-loop on every letter"},
      {"g1", g1(), "V_b >= V_b(f1), V_b >= V_c(f2), V_c >= V_c(f2), V_c >= V_b(f1)"},
      {"g2", g2(), "V_b' >= V_b'(f1), V_b' >= V_c'(f1), V_c' >= V_c'(f2), V_c' >= V_b'(f2)"},
      {"g_alpha", g_alpha(), "two nodes exchanging on both letters (reconstructed)"},
      {"g_phi", g_phi(), "counterexample base graph: a->a,b on 1; a->c, b->a, c->a on 2"},
      {"g_psi", g_psi(), "counterexample target graph: a'->a',b' on 1; a'->b', b'->a' on 2"},
  };
}

inline std::optional<LabeledDigraph> find(const std::string& name) {
  for (auto& e : entries()) {
    if (e.name == name) return std::move(e.graph);
  }
  return std::nullopt;
}

}  // namespace pclf::gallery
