#pragma once

// Independent oracles and generators for the test suites. Nothing here calls
// into the algorithms it is used to check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pclf/graph.hpp"

namespace pclf::testing {

/// Random graph on nodes "n0".."n{n-1}" over {1..k}; each edge present with probability p.
inline LabeledDigraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t k, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(NodeId::base("n" + std::to_string(i)));
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (Label l = 0; l < k; ++l)
        if (coin(rng)) edges.push_back({a, b, l});
  return LabeledDigraph::from_indexed(Alphabet::numbered(k), std::move(nodes), std::move(edges));
}

/// Same graph with every base name prefixed.
inline LabeledDigraph renamed(const LabeledDigraph& g, const std::string& prefix) {
  std::vector<NodeId> nodes;
  for (const auto& n : g.nodes()) nodes.push_back(NodeId::base(prefix + n.str()));
  return LabeledDigraph::from_indexed(g.alphabet(), std::move(nodes), g.edges());
}

/// Is `word` readable along some path? Forward set simulation, one word at a time.
inline bool readable(const LabeledDigraph& g, const std::vector<Label>& word) {
  std::set<std::size_t> cur;
  for (std::size_t v = 0; v < g.num_nodes(); ++v) cur.insert(v);
  for (Label l : word) {
    std::set<std::size_t> next;
    for (const auto& e : g.edges())
      if (e.label == l && cur.count(e.src)) next.insert(e.dst);
    cur = std::move(next);
  }
  return !cur.empty();
}

/// First unreadable word in (length, lexicographic) order up to max_len, if any.
inline std::optional<std::vector<Label>> brute_unreadable(const LabeledDigraph& g, std::size_t max_len) {
  const std::size_t k = g.alphabet().size();
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<Label> w(len, 0);
    for (;;) {
      if (!readable(g, w)) return w;
      std::size_t p = len;
      while (p > 0 && w[p - 1] + 1 == k) w[--p] = 0;
      if (p == 0) break;
      ++w[p - 1];
    }
  }
  return std::nullopt;
}

inline bool edge_in(const LabeledDigraph& g, std::size_t a, std::size_t b, Label l) {
  for (const auto& e : g.edges())
    if (e.src == a && e.dst == b && e.label == l) return true;
  return false;
}

/// Exhaustive enumeration of all maps nodes(g2) -> nodes(g1).
inline bool brute_simulates(const LabeledDigraph& g1, const LabeledDigraph& g2) {
  const std::size_t n1 = g1.num_nodes(), n2 = g2.num_nodes();
  if (n2 == 0) return true;
  if (n1 == 0) return false;
  std::vector<std::size_t> m(n2, 0);
  for (;;) {
    bool ok = true;
    for (const auto& e : g2.edges()) {
      if (!edge_in(g1, m[e.src], m[e.dst], e.label)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
    std::size_t p = n2;
    while (p > 0 && m[p - 1] + 1 == n1) m[--p] = 0;
    if (p == 0) return false;
    ++m[p - 1];
  }
}

/// Isomorphism by trying every permutation.
inline bool brute_isomorphic(const LabeledDigraph& g1, const LabeledDigraph& g2) {
  if (!(g1.alphabet() == g2.alphabet()) || g1.num_nodes() != g2.num_nodes() || g1.num_edges() != g2.num_edges())
    return false;
  std::vector<std::size_t> p(g1.num_nodes());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
  do {
    bool ok = true;
    for (const auto& e : g1.edges()) {
      if (!edge_in(g2, p[e.src], p[e.dst], e.label)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

/// Sum-lift edge test by enumerating every ordering of the target multiset.
inline bool brute_sum_edge(const LabeledDigraph& g, std::vector<std::size_t> from, std::vector<std::size_t> to,
                           Label l) {
  std::sort(to.begin(), to.end());
  do {
    bool ok = true;
    for (std::size_t i = 0; i < from.size() && ok; ++i) ok = edge_in(g, from[i], to[i], l);
    if (ok) return true;
  } while (std::next_permutation(to.begin(), to.end()));
  return false;
}

}  // namespace pclf::testing
