#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pclf/error.hpp"
#include "pclf/graph.hpp"
#include "pclf/graph_ops.hpp"
#include "pclf/lifts.hpp"

namespace pclf {

/// A map R from the nodes of a simulated graph into a simulating graph with
/// (a, b, i) an edge => (R(a), R(b), i) an edge. Validated on construction.
class SimulationWitness {
 public:
  SimulationWitness(const LabeledDigraph& simulating, const LabeledDigraph& simulated,
                    std::map<NodeId, NodeId> mapping)
      : mapping_(std::move(mapping)) {
    if (auto bad = first_violation(simulating, simulated, mapping_)) throw InvalidInput(*bad);
  }

  const std::map<NodeId, NodeId>& mapping() const noexcept { return mapping_; }
  const NodeId& operator()(const NodeId& n) const { return mapping_.at(n); }

  /// Description of the first unmapped node or unmatched edge, or nothing if R is a simulation.
  static std::optional<std::string> first_violation(const LabeledDigraph& simulating,
                                                    const LabeledDigraph& simulated,
                                                    const std::map<NodeId, NodeId>& r) {
    for (const auto& n : simulated.nodes()) {
      auto it = r.find(n);
      if (it == r.end()) return "node " + n.str() + " is not mapped";
      if (!simulating.index_of(it->second)) return "image of " + n.str() + " is not a node";
    }
    for (const auto& e : simulated.labeled_edges()) {
      LabeledEdge img{r.at(e.src), r.at(e.dst), e.label};
      if (!simulating.has_edge(img)) {
        return "edge (" + e.src.str() + "," + e.dst.str() + "," + e.label + ") maps to missing (" +
               img.src.str() + "," + img.dst.str() + "," + img.label + ")";
      }
    }
    return std::nullopt;
  }

  std::string str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : mapping_) {
      if (!first) out += ", ";
      first = false;
      out += k.str() + " -> " + v.str();
    }
    return out + "}";
  }

 private:
  std::map<NodeId, NodeId> mapping_;
};

namespace detail {

/// Homomorphism search from `pattern` into `target` by backtracking with
/// arc consistency. Domains start from label-wise degree domination.
/// Returns mapping[pattern node] = target node.
inline std::optional<std::vector<std::size_t>> find_homomorphism(const LabeledDigraph& target,
                                                                 const LabeledDigraph& pattern) {
  const std::size_t n1 = target.num_nodes();
  const std::size_t n2 = pattern.num_nodes();
  const std::size_t k = target.alphabet().size();
  if (n2 == 0) return std::vector<std::size_t>{};
  if (n1 == 0) return std::nullopt;

  const auto succ = successor_sets(target);
  const auto pred = predecessor_sets(target);

  auto profile = [k](const LabeledDigraph& g) {
    // per node: [out labels | in labels | loop labels]
    std::vector<std::vector<char>> p(g.num_nodes(), std::vector<char>(3 * k, 0));
    for (const auto& e : g.edges()) {
      p[e.src][e.label] = 1;
      p[e.dst][k + e.label] = 1;
      if (e.src == e.dst) p[e.src][2 * k + e.label] = 1;
    }
    return p;
  };
  const auto p1 = profile(target);
  const auto p2 = profile(pattern);

  std::vector<NodeSet> dom(n2, NodeSet(n1));
  for (std::size_t v = 0; v < n2; ++v) {
    for (std::size_t u = 0; u < n1; ++u) {
      bool ok = true;
      for (std::size_t j = 0; j < 3 * k && ok; ++j) ok = !p2[v][j] || p1[u][j];
      if (ok) dom[v].set(u);
    }
    if (dom[v].none()) return std::nullopt;
  }

  const auto& pedges = pattern.edges();
  auto propagate = [&](std::vector<NodeSet>& d) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& e : pedges) {
        for (auto u = d[e.src].find_first(); u != NodeSet::npos; u = d[e.src].find_next(u)) {
          if (!succ[e.label * n1 + u].intersects(d[e.dst])) {
            d[e.src].reset(u);
            changed = true;
          }
        }
        if (d[e.src].none()) return false;
        for (auto u = d[e.dst].find_first(); u != NodeSet::npos; u = d[e.dst].find_next(u)) {
          if (!pred[e.label * n1 + u].intersects(d[e.src])) {
            d[e.dst].reset(u);
            changed = true;
          }
        }
        if (d[e.dst].none()) return false;
      }
    }
    return true;
  };
  if (!propagate(dom)) return std::nullopt;

  std::vector<std::size_t> order(n2);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pattern.out_edges(a).size() > pattern.out_edges(b).size();
  });

  auto search = [&](auto&& self, std::size_t depth, std::vector<NodeSet>& d) -> bool {
    if (depth == n2) return true;
    const std::size_t v = order[depth];
    for (auto u = d[v].find_first(); u != NodeSet::npos; u = d[v].find_next(u)) {
      std::vector<NodeSet> trial = d;
      trial[v].reset();
      trial[v].set(u);
      if (propagate(trial) && self(self, depth + 1, trial)) {
        d = std::move(trial);
        return true;
      }
    }
    return false;
  };
  if (!search(search, 0, dom)) return std::nullopt;

  std::vector<std::size_t> map(n2);
  for (std::size_t v = 0; v < n2; ++v) map[v] = dom[v].find_first();
  return map;
}

}  // namespace detail

/// Finds a simulation of g2 by g1, i.e. a label-preserving map from g2's nodes into g1's.
/// The search order is fixed, so the witness is deterministic.
inline std::optional<SimulationWitness> find_simulation(const LabeledDigraph& g1, const LabeledDigraph& g2) {
  if (!(g1.alphabet() == g2.alphabet())) throw InvalidInput("find_simulation: alphabet mismatch");
  auto map = detail::find_homomorphism(g1, g2);
  if (!map) return std::nullopt;
  std::map<NodeId, NodeId> r;
  for (std::size_t v = 0; v < g2.num_nodes(); ++v) r.emplace(g2.node(v), g1.node((*map)[v]));
  return SimulationWitness(g1, g2, std::move(r));
}

struct SimYes {
  LiftLevel level;
  SimulationWitness witness;
};
struct SimNo {
  std::string refutation;
};
struct SimUnknown {
  LiftLevel tmax;
};

/// Outcome of a bounded search for a simulation by a lift family.
using LiftSimVerdict = std::variant<SimYes, SimNo, SimUnknown>;

inline bool is_yes(const LiftSimVerdict& v) { return std::holds_alternative<SimYes>(v); }
inline bool is_no(const LiftSimVerdict& v) { return std::holds_alternative<SimNo>(v); }
inline bool is_unknown(const LiftSimVerdict& v) { return std::holds_alternative<SimUnknown>(v); }

namespace detail {

template <class Lift>
LiftSimVerdict search_levels(const LabeledDigraph& g, const LabeledDigraph& g_tilde, LiftLevel first,
                             LiftLevel tmax, Lift&& lift) {
  if (!(g.alphabet() == g_tilde.alphabet())) throw InvalidInput("lift simulation: alphabet mismatch");
  for (LiftLevel t = first; t <= tmax; ++t) {
    if (auto w = find_simulation(lift(g, t), g_tilde)) return SimYes{t, std::move(*w)};
  }
  return SimUnknown{tmax};
}

}  // namespace detail

/// Bounded decision of "the forward composition lift of g simulates g_tilde".
///
/// Every node at lift level >= 1 has out-edges of a single letter. A node of
/// g_tilde with out-edges of two letters must therefore map to level 0, and
/// since edges never leave a level, a weakly connected g_tilde then maps
/// entirely into g. If g does not simulate g_tilde in that case the answer is
/// a definite No at every depth.
inline LiftSimVerdict simulates_comp_lift(const LabeledDigraph& g, const LabeledDigraph& g_tilde, LiftLevel tmax) {
  if (!(g.alphabet() == g_tilde.alphabet())) throw InvalidInput("simulates_comp_lift: alphabet mismatch");
  if (!is_weakly_connected(g_tilde)) throw InvalidInput("simulates_comp_lift: target graph must be connected");

  for (std::size_t v = 0; v < g_tilde.num_nodes(); ++v) {
    auto out = g_tilde.out_edges(v);
    auto other = std::find_if(out.begin(), out.end(), [&](const Edge& e) { return e.label != out.front().label; });
    if (other == out.end()) continue;
    if (auto w = find_simulation(g, g_tilde)) return SimYes{0, std::move(*w)};
    const auto& sigma = g.alphabet();
    return SimNo{"node " + g_tilde.node(v).str() + " has outgoing edges labeled " + sigma[out.front().label] +
                 " and " + sigma[other->label] +
                 "; nodes of lift level >= 1 only have single-letter outgoing edges, so the image "
                 "lies in level 0, and the base graph does not simulate the target"};
  }
  return detail::search_levels(g, g_tilde, 0, tmax, fwd_comp_lift);
}

/// Bounded search through backward composition lifts, depths 0..tmax.
inline LiftSimVerdict simulates_bwd_comp_lift(const LabeledDigraph& g, const LabeledDigraph& g_tilde,
                                              LiftLevel tmax) {
  return detail::search_levels(g, g_tilde, 0, tmax, bwd_comp_lift);
}

/// Bounded search through sum lifts, depths 1..tmax. Never answers No.
inline LiftSimVerdict simulates_sum_lift(const LabeledDigraph& g, const LabeledDigraph& g_tilde, LiftLevel tmax) {
  return detail::search_levels(g, g_tilde, 1, tmax, sum_lift);
}

/// Bounded search through transitive composition lifts, depths 0..tmax.
inline LiftSimVerdict simulates_trans_lift(const LabeledDigraph& g, const LabeledDigraph& g_tilde,
                                           LiftLevel tmax) {
  return detail::search_levels(g, g_tilde, 0, tmax,
                               [](const LabeledDigraph& h, LiftLevel t) { return transitive_comp_lift(h, t).graph; });
}

}  // namespace pclf
