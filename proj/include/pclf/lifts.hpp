#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pclf/error.hpp"
#include "pclf/graph.hpp"
#include "pclf/graph_ops.hpp"

namespace pclf {

/// Lift depth T. Depth 0 is the graph itself.
using LiftLevel = std::size_t;

namespace detail {

inline constexpr std::size_t kMaxLiftNodes = 10'000'000;

inline std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > kMaxLiftNodes / base) throw BudgetError("lift too large");
    r *= base;
  }
  return r;
}

/// Letters of the word with base-k code `code` and length t; first letter most significant.
inline std::vector<std::string> decode_word(const Alphabet& sigma, std::size_t code, std::size_t t) {
  std::vector<std::string> w(t);
  const std::size_t k = sigma.size();
  for (std::size_t p = t; p-- > 0;) {
    w[p] = sigma[static_cast<Label>(code % k)];
    code /= k;
  }
  return w;
}

/// Node ids of level t, indexed by s * k^t + code(w).
inline std::vector<NodeId> level_nodes(const LabeledDigraph& g, std::size_t t) {
  if (t == 0) return g.nodes();
  const std::size_t words = checked_pow(g.alphabet().size(), t);
  if (g.num_nodes() != 0 && words > kMaxLiftNodes / g.num_nodes()) throw BudgetError("lift too large");
  std::vector<NodeId> out;
  out.reserve(g.num_nodes() * words);
  for (std::size_t s = 0; s < g.num_nodes(); ++s) {
    for (std::size_t c = 0; c < words; ++c) {
      out.push_back(NodeId::word(g.node(s), decode_word(g.alphabet(), c, t)));
    }
  }
  return out;
}

/// Edges of the forward lift at level t, in level-local indices (offset added).
inline void forward_level_edges(const LabeledDigraph& g, std::size_t t, std::size_t offset,
                                std::vector<Edge>& out) {
  if (t == 0) {
    for (const auto& e : g.edges()) out.push_back({e.src + offset, e.dst + offset, e.label});
    return;
  }
  const std::size_t k = g.alphabet().size();
  const std::size_t words = checked_pow(k, t);
  const std::size_t head = words / k;  // k^(t-1)
  for (const auto& e : g.edges()) {
    for (std::size_t c = 0; c < words; ++c) {
      // (a, j1..jt) -> (b, i j1..j(t-1)) labeled jt
      const std::size_t dst_code = e.label * head + c / k;
      out.push_back({offset + e.src * words + c, offset + e.dst * words + dst_code,
                     static_cast<Label>(c % k)});
    }
  }
}

}  // namespace detail

/// T-sum lift: nodes are size-t multisets of nodes; (M, M', i) is an edge when
/// the elements of M and M' can be paired so that every pair is an i-edge.
inline LabeledDigraph sum_lift(const LabeledDigraph& g, LiftLevel t) {
  if (t == 0) throw InvalidInput("sum_lift: depth must be at least 1");
  const std::size_t n = g.num_nodes();
  const std::size_t k = g.alphabet().size();

  std::vector<std::vector<std::size_t>> msets;
  std::vector<std::size_t> cur(t, 0);
  if (n > 0) {
    for (;;) {
      msets.push_back(cur);
      if (msets.size() > detail::kMaxLiftNodes) throw BudgetError("sum lift too large");
      std::size_t p = t;
      while (p > 0 && cur[p - 1] == n - 1) --p;
      if (p == 0) break;
      const std::size_t v = cur[p - 1] + 1;
      for (std::size_t q = p - 1; q < t; ++q) cur[q] = v;
    }
  }

  const auto succ = detail::successor_sets(g);
  std::vector<NodeId> ids;
  ids.reserve(msets.size());
  for (const auto& m : msets) {
    std::vector<NodeId> parts;
    for (std::size_t v : m) parts.push_back(g.node(v));
    ids.push_back(NodeId::mset(std::move(parts)));
  }

  // Kuhn's augmenting paths on the t x t pairing graph.
  std::vector<std::size_t> match(t);
  std::vector<char> visited(t);
  auto perfect = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to, Label l) {
    std::fill(match.begin(), match.end(), t);
    auto augment = [&](auto&& self, std::size_t left) -> bool {
      for (std::size_t right = 0; right < t; ++right) {
        if (visited[right] || !succ[l * n + from[left]].test(to[right])) continue;
        visited[right] = 1;
        if (match[right] == t || self(self, match[right])) {
          match[right] = left;
          return true;
        }
      }
      return false;
    };
    for (std::size_t left = 0; left < t; ++left) {
      std::fill(visited.begin(), visited.end(), 0);
      if (!augment(augment, left)) return false;
    }
    return true;
  };

  std::vector<Edge> edges;
  for (std::size_t a = 0; a < msets.size(); ++a) {
    for (std::size_t b = 0; b < msets.size(); ++b) {
      for (Label l = 0; l < k; ++l) {
        if (perfect(msets[a], msets[b], l)) edges.push_back({a, b, l});
      }
    }
  }
  return LabeledDigraph::from_indexed(g.alphabet(), std::move(ids), std::move(edges));
}

/// T-forward composition lift: each (a, b, i) yields ((a, j1..jT), (b, i j1..j(T-1)), jT).
inline LabeledDigraph fwd_comp_lift(const LabeledDigraph& g, LiftLevel t) {
  if (t == 0) return g;
  std::vector<Edge> edges;
  detail::forward_level_edges(g, t, 0, edges);
  return LabeledDigraph::from_indexed(g.alphabet(), detail::level_nodes(g, t), std::move(edges));
}

/// T-backward composition lift: each (a, b, i) yields ((a, i j1..j(T-1)), (b, j1..jT), jT).
inline LabeledDigraph bwd_comp_lift(const LabeledDigraph& g, LiftLevel t) {
  if (t == 0) return g;
  const std::size_t k = g.alphabet().size();
  const std::size_t words = detail::checked_pow(k, t);
  const std::size_t head = words / k;
  std::vector<Edge> edges;
  edges.reserve(g.num_edges() * words);
  for (const auto& e : g.edges()) {
    for (std::size_t c = 0; c < words; ++c) {
      const std::size_t src_code = e.label * head + c / k;
      edges.push_back({e.src * words + src_code, e.dst * words + c, static_cast<Label>(c % k)});
    }
  }
  return LabeledDigraph::from_indexed(g.alphabet(), detail::level_nodes(g, t), std::move(edges));
}

/// Disjoint union of forward lift levels 0..tmax. The level of a node is the
/// length of its word.
inline LabeledDigraph comp_lift_union(const LabeledDigraph& g, LiftLevel tmax) {
  if (tmax == 0) return g;
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  for (std::size_t t = 0; t <= tmax; ++t) {
    const std::size_t offset = nodes.size();
    auto level = detail::level_nodes(g, t);
    nodes.insert(nodes.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
    detail::forward_level_edges(g, t, offset, edges);
  }
  return LabeledDigraph::from_indexed(g.alphabet(), std::move(nodes), std::move(edges));
}

/// Composition lift closed under chaining inequalities, keeping one-letter edges.
struct TransitiveLiftGraph {
  LabeledDigraph graph;
  /// Pointwise dominations V_p >= V_q, from level t to level t + 1.
  std::vector<std::pair<NodeId, NodeId>> epsilon_edges;
  LiftLevel tmax = 0;

  std::vector<std::pair<std::size_t, std::size_t>> epsilon_indices() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [p, q] : epsilon_edges) out.emplace_back(*graph.index_of(p), *graph.index_of(q));
    return out;
  }
};

/// Builds the transitive composition lift up to depth tmax.
///
/// Labeled edges before closure are the lifted edges of every level plus the
/// descent edges ((s, w), (s, w minus its last letter), last letter), which
/// encode V_(s,w) = V_(s,w') o f_last. Epsilon edges (a, u) -> (b, i u) for
/// each (a, b, i) and |u| < tmax encode V_(a,u) >= V_(b,iu). The result holds
/// every (p, q', k) with p ->eps* q, (q, r, k) labeled and r ->eps* q'.
inline TransitiveLiftGraph transitive_comp_lift(const LabeledDigraph& g, LiftLevel tmax) {
  const std::size_t k = g.alphabet().size();
  std::vector<NodeId> nodes;
  std::vector<std::size_t> offset;
  std::vector<Edge> labeled;
  for (std::size_t t = 0; t <= tmax; ++t) {
    offset.push_back(nodes.size());
    auto level = detail::level_nodes(g, t);
    nodes.insert(nodes.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
    detail::forward_level_edges(g, t, offset[t], labeled);
  }
  const std::size_t total = nodes.size();

  for (std::size_t t = 1; t <= tmax; ++t) {
    const std::size_t words = detail::checked_pow(k, t);
    for (std::size_t s = 0; s < g.num_nodes(); ++s) {
      for (std::size_t c = 0; c < words; ++c) {
        labeled.push_back({offset[t] + s * words + c, offset[t - 1] + s * (words / k) + c / k,
                           static_cast<Label>(c % k)});
      }
    }
  }

  std::vector<std::vector<std::size_t>> eps(total);
  std::vector<std::pair<std::size_t, std::size_t>> eps_list;
  for (std::size_t len = 0; len + 1 <= tmax; ++len) {
    const std::size_t words = detail::checked_pow(k, len);
    for (const auto& e : g.edges()) {
      for (std::size_t c = 0; c < words; ++c) {
        const std::size_t from = offset[len] + e.src * words + c;
        const std::size_t to = offset[len + 1] + e.dst * (words * k) + e.label * words + c;
        eps[from].push_back(to);
        eps_list.emplace_back(from, to);
      }
    }
  }

  // Epsilon edges only climb levels, so a descending sweep over levels closes them.
  std::vector<NodeSet> reach(total, NodeSet(total));
  for (std::size_t v = total; v-- > 0;) {
    reach[v].set(v);
    for (std::size_t w : eps[v]) reach[v] |= reach[w];
  }

  std::vector<std::vector<Edge>> out_by_src(total);
  for (const auto& e : labeled) out_by_src[e.src].push_back(e);
  std::vector<Edge> closed;
  for (std::size_t p = 0; p < total; ++p) {
    for (auto q = reach[p].find_first(); q != NodeSet::npos; q = reach[p].find_next(q)) {
      for (const auto& e : out_by_src[q]) {
        for (auto q2 = reach[e.dst].find_first(); q2 != NodeSet::npos; q2 = reach[e.dst].find_next(q2)) {
          closed.push_back({p, q2, e.label});
        }
      }
    }
  }

  std::vector<std::pair<NodeId, NodeId>> eps_ids;
  eps_ids.reserve(eps_list.size());
  for (auto [a, b] : eps_list) eps_ids.emplace_back(nodes[a], nodes[b]);
  std::sort(eps_ids.begin(), eps_ids.end());
  eps_ids.erase(std::unique(eps_ids.begin(), eps_ids.end()), eps_ids.end());

  return {LabeledDigraph::from_indexed(g.alphabet(), std::move(nodes), std::move(closed)), std::move(eps_ids),
          tmax};
}

}  // namespace pclf
