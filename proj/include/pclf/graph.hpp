#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pclf/error.hpp"
#include "pclf/node_id.hpp"

namespace pclf {

/// Index of a letter in an Alphabet.
using Label = std::uint32_t;

/// Ordered finite set of letters.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> letters) : letters_(std::move(letters)) {
    if (letters_.empty()) throw InvalidInput("alphabet must be nonempty");
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (!detail::is_valid_token(letters_[i])) {
        throw InvalidInput("invalid letter '" + letters_[i] + "'");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (letters_[i] == letters_[j]) throw InvalidInput("duplicate letter '" + letters_[i] + "'");
      }
    }
  }

  /// Letters "1", "2", ..., "k".
  static Alphabet numbered(std::size_t k) {
    std::vector<std::string> l;
    for (std::size_t i = 1; i <= k; ++i) l.push_back(std::to_string(i));
    return Alphabet(std::move(l));
  }

  std::size_t size() const noexcept { return letters_.size(); }
  const std::string& operator[](Label i) const { return letters_.at(i); }
  const std::vector<std::string>& letters() const noexcept { return letters_; }

  std::optional<Label> find(const std::string& letter) const {
    auto it = std::find(letters_.begin(), letters_.end(), letter);
    if (it == letters_.end()) return std::nullopt;
    return static_cast<Label>(it - letters_.begin());
  }

  Label at(const std::string& letter) const {
    if (auto l = find(letter)) return *l;
    throw InvalidInput("letter '" + letter + "' not in alphabet");
  }

  /// Renders a word over this alphabet; letters are concatenated when all are one character.
  std::string render(std::span<const Label> word) const {
    const bool compact = std::all_of(letters_.begin(), letters_.end(),
                                     [](const auto& s) { return s.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (!compact && i) out += ' ';
      out += letters_.at(word[i]);
    }
    return out;
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> letters_;
};

/// Edge by node index.
struct Edge {
  std::size_t src;
  std::size_t dst;
  Label label;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Edge by node identity, as written in files and examples.
struct LabeledEdge {
  NodeId src;
  NodeId dst;
  std::string label;

  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Finite labeled digraph in expanded form (one letter per edge).
///
/// Immutable once built. Nodes are kept in canonical NodeId order and edges
/// sorted by (src, dst, label) without duplicates, so two graphs with the same
/// content compare equal.
class LabeledDigraph {
 public:
  LabeledDigraph(Alphabet alphabet, std::vector<NodeId> nodes, const std::vector<LabeledEdge>& edges)
      : alphabet_(std::move(alphabet)) {
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
      throw InvalidInput("duplicate node");
    }
    nodes_ = std::move(nodes);
    edges_.reserve(edges.size());
    for (const auto& e : edges) {
      auto s = index_of(e.src);
      auto d = index_of(e.dst);
      if (!s) throw InvalidInput("edge source '" + e.src.str() + "' is not a node");
      if (!d) throw InvalidInput("edge target '" + e.dst.str() + "' is not a node");
      edges_.push_back({*s, *d, alphabet_.at(e.label)});
    }
    finish();
  }

  /// Builds from indexed edges over `nodes`, which need not be sorted.
  static LabeledDigraph from_indexed(Alphabet alphabet, std::vector<NodeId> nodes,
                                     std::vector<Edge> edges) {
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    std::vector<std::size_t> rank(nodes.size());
    std::vector<NodeId> sorted;
    sorted.reserve(nodes.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank[order[r]] = r;
      sorted.push_back(std::move(nodes[order[r]]));
    }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidInput("duplicate node");
    }
    for (auto& e : edges) {
      if (e.src >= rank.size() || e.dst >= rank.size() || e.label >= alphabet.size()) {
        throw InvalidInput("edge index out of range");
      }
      e.src = rank[e.src];
      e.dst = rank[e.dst];
    }
    LabeledDigraph g(std::move(alphabet));
    g.nodes_ = std::move(sorted);
    g.edges_ = std::move(edges);
    g.finish();
    return g;
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  const NodeId& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const Edge> out_edges(std::size_t v) const {
    return {edges_.data() + out_begin_[v], edges_.data() + out_begin_[v + 1]};
  }

  std::optional<std::size_t> index_of(const NodeId& id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || !(*it == id)) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  bool has_edge(std::size_t src, std::size_t dst, Label label) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{src, dst, label});
  }

  bool has_edge(const LabeledEdge& e) const {
    auto s = index_of(e.src);
    auto d = index_of(e.dst);
    auto l = alphabet_.find(e.label);
    return s && d && l && has_edge(*s, *d, *l);
  }

  LabeledEdge labeled(const Edge& e) const {
    return {nodes_[e.src], nodes_[e.dst], alphabet_[e.label]};
  }

  std::vector<LabeledEdge> labeled_edges() const {
    std::vector<LabeledEdge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(labeled(e));
    return out;
  }

  /// Copy without edge `skip`, for edge-removal checks.
  LabeledDigraph without_edge(std::size_t skip) const {
    LabeledDigraph g(alphabet_);
    g.nodes_ = nodes_;
    g.edges_ = edges_;
    g.edges_.erase(g.edges_.begin() + static_cast<std::ptrdiff_t>(skip));
    g.finish();
    return g;
  }

  friend bool operator==(const LabeledDigraph& a, const LabeledDigraph& b) {
    return a.alphabet_ == b.alphabet_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  explicit LabeledDigraph(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  void finish() {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    out_begin_.assign(nodes_.size() + 1, 0);
    for (const auto& e : edges_) ++out_begin_[e.src + 1];
    for (std::size_t i = 0; i < nodes_.size(); ++i) out_begin_[i + 1] += out_begin_[i];
  }

  Alphabet alphabet_;
  std::vector<NodeId> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_begin_;
};

/// Incremental construction keyed by NodeId.
class GraphBuilder {
 public:
  explicit GraphBuilder(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  std::size_t node(const NodeId& id) {
    auto [it, inserted] = index_.try_emplace(id, nodes_.size());
    if (inserted) nodes_.push_back(id);
    return it->second;
  }

  void edge(std::size_t src, std::size_t dst, Label label) { edges_.push_back({src, dst, label}); }

  void edge(const NodeId& src, const NodeId& dst, Label label) {
    const std::size_t s = node(src);
    edge(s, node(dst), label);
  }

  LabeledDigraph build() && {
    return LabeledDigraph::from_indexed(std::move(alphabet_), std::move(nodes_), std::move(edges_));
  }

 private:
  Alphabet alphabet_;
  std::map<NodeId, std::size_t> index_;
  std::vector<NodeId> nodes_;
  std::vector<Edge> edges_;
};

/// Shorthand for hand-written graphs: base-named nodes, edges as (src, dst, letter).
inline LabeledDigraph make_graph(const Alphabet& alphabet, const std::vector<std::string>& nodes,
                                 const std::vector<std::tuple<std::string, std::string, std::string>>& edges) {
  std::vector<NodeId> ids;
  for (const auto& n : nodes) ids.push_back(NodeId::base(n));
  std::vector<LabeledEdge> es;
  for (const auto& [s, d, l] : edges) es.push_back({NodeId::base(s), NodeId::base(d), l});
  return LabeledDigraph(alphabet, std::move(ids), es);
}

}  // namespace pclf
