#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "pclf/graph.hpp"

namespace pclf {

using NodeSet = boost::dynamic_bitset<std::uint64_t>;

namespace detail {

/// succ[label * n + v] = set of label-successors of v.
inline std::vector<NodeSet> successor_sets(const LabeledDigraph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeSet> succ(g.alphabet().size() * n, NodeSet(n));
  for (const auto& e : g.edges()) succ[e.label * n + e.src].set(e.dst);
  return succ;
}

inline std::vector<NodeSet> predecessor_sets(const LabeledDigraph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeSet> pred(g.alphabet().size() * n, NodeSet(n));
  for (const auto& e : g.edges()) pred[e.label * n + e.dst].set(e.src);
  return pred;
}

inline NodeSet image(const NodeSet& from, const std::vector<NodeSet>& adj, Label label, std::size_t n) {
  NodeSet out(n);
  for (auto v = from.find_first(); v != NodeSet::npos; v = from.find_next(v)) {
    out |= adj[label * n + v];
  }
  return out;
}

inline std::size_t reach_count(const LabeledDigraph& g, std::size_t start, bool forward, bool backward) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges()) {
    if (forward) adj[e.src].push_back(e.dst);
    if (backward) adj[e.dst].push_back(e.src);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count;
}

inline NodeId with_suffix(const NodeId& id, const std::string& suffix) {
  switch (id.kind()) {
    case NodeId::Kind::base:
      return NodeId::base(id.name() + suffix);
    case NodeId::Kind::mset: {
      std::vector<NodeId> parts;
      for (const auto& p : id.parts()) parts.push_back(with_suffix(p, suffix));
      return NodeId::mset(std::move(parts));
    }
    case NodeId::Kind::word:
      return NodeId::word(with_suffix(id.word_base(), suffix), id.letters());
  }
  return id;
}

}  // namespace detail

struct PathCompleteness {
  bool complete = false;
  /// Shortest unreadable word (label indices), lexicographically first among shortest.
  std::optional<std::vector<Label>> witness;

  explicit operator bool() const noexcept { return complete; }
};

/// Decides path-completeness by subset construction from the full node set.
///
/// Explores subsets breadth first with letters in alphabet order, so the
/// returned witness is a shortest unreadable word.
inline PathCompleteness is_path_complete(const LabeledDigraph& g) {
  const std::size_t n = g.num_nodes();
  const std::size_t k = g.alphabet().size();
  if (n == 0) return {false, std::vector<Label>{}};

  const auto succ = detail::successor_sets(g);
  struct Visit {
    NodeSet set;
    std::size_t parent;
    Label label;
  };
  std::vector<Visit> visits;
  std::map<NodeSet, std::size_t> seen;
  NodeSet all(n);
  all.set();
  visits.push_back({all, 0, 0});
  seen.emplace(all, 0);

  for (std::size_t head = 0; head < visits.size(); ++head) {
    for (Label l = 0; l < k; ++l) {
      NodeSet next = detail::image(visits[head].set, succ, l, n);
      if (next.none()) {
        std::vector<Label> word{l};
        for (std::size_t v = head; v != 0; v = visits[v].parent) word.push_back(visits[v].label);
        std::reverse(word.begin(), word.end());
        return {false, std::move(word)};
      }
      if (seen.find(next) == seen.end()) {
        seen.emplace(next, visits.size());
        visits.push_back({std::move(next), head, l});
      }
    }
  }
  return {true, std::nullopt};
}

/// Label-blind reachability in both directions between every pair of nodes.
inline bool is_strongly_connected(const LabeledDigraph& g) {
  const std::size_t n = g.num_nodes();
  if (n <= 1) return true;
  return detail::reach_count(g, 0, true, false) == n && detail::reach_count(g, 0, false, true) == n;
}

/// Connectivity of the underlying undirected graph.
inline bool is_weakly_connected(const LabeledDigraph& g) {
  const std::size_t n = g.num_nodes();
  if (n <= 1) return true;
  return detail::reach_count(g, 0, true, true) == n;
}

inline bool is_sink_free(const LabeledDigraph& g) {
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    if (g.out_edges(v).empty()) return false;
  }
  return true;
}

inline bool is_source_free(const LabeledDigraph& g) {
  std::vector<char> has_in(g.num_nodes(), 0);
  for (const auto& e : g.edges()) has_in[e.dst] = 1;
  return std::all_of(has_in.begin(), has_in.end(), [](char c) { return c != 0; });
}

struct NonRedundancy {
  bool holds = false;
  bool strongly_connected = false;
  /// An edge whose removal keeps the graph path-complete, if any.
  std::optional<LabeledEdge> redundant_edge;

  explicit operator bool() const noexcept { return holds; }
};

/// Strong connectivity plus: removing any single edge destroys path-completeness.
inline NonRedundancy satisfies_assumption1(const LabeledDigraph& g) {
  if (!is_path_complete(g)) throw InvalidInput("graph is not path-complete");
  NonRedundancy out;
  out.strongly_connected = is_strongly_connected(g);
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    if (is_path_complete(g.without_edge(i))) {
      out.redundant_edge = g.labeled(g.edges()[i]);
      break;
    }
  }
  out.holds = out.strongly_connected && !out.redundant_edge;
  return out;
}

inline LabeledDigraph transpose(const LabeledDigraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const auto& e : g.edges()) edges.push_back({e.dst, e.src, e.label});
  return LabeledDigraph::from_indexed(g.alphabet(), g.nodes(), std::move(edges));
}

/// Disjoint union. Nodes of `b` that collide with names already present get
/// the smallest suffix `_k` (applied to every base name inside the id) that
/// makes them unique.
inline LabeledDigraph disjoint_union(const LabeledDigraph& a, const LabeledDigraph& b) {
  if (!(a.alphabet() == b.alphabet())) throw InvalidInput("disjoint_union: alphabet mismatch");
  std::set<NodeId> taken(a.nodes().begin(), a.nodes().end());
  taken.insert(b.nodes().begin(), b.nodes().end());
  std::vector<NodeId> nodes = a.nodes();
  std::vector<Edge> edges = a.edges();
  const std::size_t offset = a.num_nodes();
  std::set<NodeId> in_a(a.nodes().begin(), a.nodes().end());
  for (const auto& id : b.nodes()) {
    if (!in_a.count(id)) {
      nodes.push_back(id);
      continue;
    }
    for (std::size_t k = 1;; ++k) {
      NodeId renamed = detail::with_suffix(id, "_" + std::to_string(k));
      if (taken.insert(renamed).second) {
        nodes.push_back(std::move(renamed));
        break;
      }
    }
  }
  for (const auto& e : b.edges()) edges.push_back({e.src + offset, e.dst + offset, e.label});
  return LabeledDigraph::from_indexed(a.alphabet(), std::move(nodes), std::move(edges));
}

namespace detail {

/// Joint colour refinement on two graphs: nodes with different final colours
/// cannot correspond under any label-preserving isomorphism.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> refine_colors(
    const LabeledDigraph& g1, const LabeledDigraph& g2) {
  const std::array<const LabeledDigraph*, 2> gs{&g1, &g2};
  std::array<std::vector<std::size_t>, 2> color{std::vector<std::size_t>(g1.num_nodes(), 0),
                                                std::vector<std::size_t>(g2.num_nodes(), 0)};
  std::size_t classes = 1;
  for (;;) {
    std::map<std::vector<std::size_t>, std::size_t> dict;
    std::array<std::vector<std::size_t>, 2> next;
    for (int s = 0; s < 2; ++s) {
      const auto& g = *gs[s];
      std::vector<std::vector<std::size_t>> sig(g.num_nodes());
      for (std::size_t v = 0; v < g.num_nodes(); ++v) sig[v].push_back(color[s][v]);
      std::vector<std::vector<std::size_t>> nb(g.num_nodes());
      for (const auto& e : g.edges()) {
        // tag: 0 = loop, 1 = out, 2 = in
        if (e.src == e.dst) {
          nb[e.src].push_back(e.label * 3);
          nb[e.src].push_back(color[s][e.dst]);
          continue;
        }
        nb[e.src].push_back(e.label * 3 + 1);
        nb[e.src].push_back(color[s][e.dst]);
        nb[e.dst].push_back(e.label * 3 + 2);
        nb[e.dst].push_back(color[s][e.src]);
      }
      for (std::size_t v = 0; v < g.num_nodes(); ++v) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < nb[v].size(); i += 2) pairs.emplace_back(nb[v][i], nb[v][i + 1]);
        std::sort(pairs.begin(), pairs.end());
        for (auto [t, c] : pairs) {
          sig[v].push_back(t);
          sig[v].push_back(c);
        }
      }
      next[s].resize(g.num_nodes());
      for (std::size_t v = 0; v < g.num_nodes(); ++v) {
        auto [it, ins] = dict.try_emplace(sig[v], dict.size());
        next[s][v] = it->second;
      }
    }
    color = std::move(next);
    if (dict.size() == classes) break;
    classes = dict.size();
  }
  return {color[0], color[1]};
}

}  // namespace detail

/// Label-preserving isomorphism search. Returns the bijection as
/// `mapping[node of g1] = node of g2`, or nothing.
inline std::optional<std::vector<std::size_t>> isomorphism(const LabeledDigraph& g1,
                                                           const LabeledDigraph& g2) {
  if (!(g1.alphabet() == g2.alphabet())) return std::nullopt;
  const std::size_t n = g1.num_nodes();
  if (n != g2.num_nodes() || g1.num_edges() != g2.num_edges()) return std::nullopt;
  if (n == 0) return std::vector<std::size_t>{};

  auto [c1, c2] = detail::refine_colors(g1, g2);
  {
    auto s1 = c1, s2 = c2;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    if (s1 != s2) return std::nullopt;
  }

  // Edge labels between ordered pairs, as bitmasks over letters.
  const std::size_t k = g1.alphabet().size();
  auto adjacency = [&](const LabeledDigraph& g) {
    std::vector<std::vector<bool>> adj(n * n, std::vector<bool>(k, false));
    for (const auto& e : g.edges()) adj[e.src * n + e.dst][e.label] = true;
    return adj;
  };
  const auto adj1 = adjacency(g1);
  const auto adj2 = adjacency(g2);

  // Undirected BFS order so that every node after the first in a component has an assigned neighbour.
  std::vector<std::vector<std::size_t>> und(n);
  for (const auto& e : g1.edges()) {
    und[e.src].push_back(e.dst);
    und[e.dst].push_back(e.src);
  }
  std::vector<std::size_t> order;
  std::vector<char> placed(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (placed[root]) continue;
    placed[root] = 1;
    std::deque<std::size_t> q{root};
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      order.push_back(v);
      for (std::size_t w : und[v]) {
        if (!placed[w]) {
          placed[w] = 1;
          q.push_back(w);
        }
      }
    }
  }

  std::vector<std::size_t> map(n, n);
  std::vector<char> used(n, 0);
  auto consistent = [&](std::size_t depth, std::size_t u, std::size_t u2) {
    if (adj1[u * n + u] != adj2[u2 * n + u2]) return false;
    for (std::size_t d = 0; d < depth; ++d) {
      const std::size_t w = order[d];
      const std::size_t w2 = map[w];
      if (adj1[u * n + w] != adj2[u2 * n + w2]) return false;
      if (adj1[w * n + u] != adj2[w2 * n + u2]) return false;
    }
    return true;
  };
  auto search = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == n) return true;
    const std::size_t u = order[depth];
    for (std::size_t u2 = 0; u2 < n; ++u2) {
      if (used[u2] || c1[u] != c2[u2] || !consistent(depth, u, u2)) continue;
      map[u] = u2;
      used[u2] = 1;
      if (self(self, depth + 1)) return true;
      used[u2] = 0;
    }
    map[u] = n;
    return false;
  };
  if (!search(search, 0)) return std::nullopt;
  return map;
}

inline bool isomorphic(const LabeledDigraph& g1, const LabeledDigraph& g2) {
  return isomorphism(g1, g2).has_value();
}

}  // namespace pclf
