#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pclf/error.hpp"

namespace pclf {

namespace detail {

inline bool is_reserved_char(char c) {
  switch (c) {
    case '{': case '}': case '(': case ')': case ',': case '|': case '#':
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
      return true;
    default:
      return false;
  }
}

/// Names and labels are nonempty runs of non-reserved characters.
inline bool is_valid_token(std::string_view s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), is_reserved_char);
}

}  // namespace detail

/// Structured node identifier.
///
/// A node is either a plain name, a multiset of nodes (sum lifts) or a node
/// annotated with a nonempty word (composition lifts). The word (j1..jT)
/// attached to a node s stands for V_s composed with f_j1, ..., f_jT, so the
/// last letter is the map applied first.
///
/// Text form: `a`, `{a,a,b}`, `(a|21)`. When some letter of a word is longer
/// than one character the word is written with separators: `(a|,10,2)`.
class NodeId {
 public:
  enum class Kind : std::uint8_t { base = 0, mset = 1, word = 2 };

  NodeId() : NodeId(base("_")) {}

  static NodeId base(std::string name) {
    if (!detail::is_valid_token(name)) {
      throw InvalidInput("invalid node name '" + name + "'");
    }
    NodeId id(Kind::base);
    id.name_ = std::move(name);
    return id;
  }

  static NodeId mset(std::vector<NodeId> parts) {
    if (parts.empty()) throw InvalidInput("empty multiset node");
    std::sort(parts.begin(), parts.end());
    NodeId id(Kind::mset);
    id.children_ = std::move(parts);
    return id;
  }

  static NodeId word(NodeId base_node, std::vector<std::string> letters) {
    if (letters.empty()) throw InvalidInput("word node with empty word; use the base node");
    for (const auto& l : letters) {
      if (!detail::is_valid_token(l)) throw InvalidInput("invalid letter '" + l + "'");
    }
    NodeId id(Kind::word);
    id.children_.push_back(std::move(base_node));
    id.word_ = std::move(letters);
    return id;
  }

  /// Parses the canonical text form. Throws InvalidInput on malformed text.
  static NodeId parse(std::string_view text) {
    std::size_t pos = 0;
    NodeId id = parse_at(text, pos);
    if (pos != text.size()) {
      throw InvalidInput("trailing characters in node id '" + std::string(text) + "'");
    }
    return id;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_base() const noexcept { return kind_ == Kind::base; }
  bool is_mset() const noexcept { return kind_ == Kind::mset; }
  bool is_word() const noexcept { return kind_ == Kind::word; }

  const std::string& name() const noexcept { return name_; }
  std::span<const NodeId> parts() const noexcept { return children_; }
  const NodeId& word_base() const noexcept { return children_.front(); }
  const std::vector<std::string>& letters() const noexcept { return word_; }

  std::string str() const {
    std::string out;
    render(out);
    return out;
  }

  friend bool operator==(const NodeId& a, const NodeId& b) {
    return a.kind_ == b.kind_ && a.name_ == b.name_ && a.word_ == b.word_ &&
           a.children_ == b.children_;
  }

  friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (auto c = a.name_.compare(b.name_) <=> 0; c != 0) return c;
    const std::size_t n = std::min(a.children_.size(), b.children_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = a.children_[i] <=> b.children_[i]; c != 0) return c;
    }
    if (auto c = a.children_.size() <=> b.children_.size(); c != 0) return c;
    return a.word_ <=> b.word_;
  }

 private:
  explicit NodeId(Kind k) : kind_(k) {}

  void render(std::string& out) const {
    switch (kind_) {
      case Kind::base:
        out += name_;
        break;
      case Kind::mset:
        out += '{';
        for (std::size_t i = 0; i < children_.size(); ++i) {
          if (i) out += ',';
          children_[i].render(out);
        }
        out += '}';
        break;
      case Kind::word: {
        out += '(';
        children_.front().render(out);
        out += '|';
        const bool compact =
            std::all_of(word_.begin(), word_.end(), [](const auto& l) { return l.size() == 1; });
        for (const auto& l : word_) {
          if (!compact) out += ',';
          out += l;
        }
        out += ')';
        break;
      }
    }
  }

  static NodeId parse_at(std::string_view t, std::size_t& pos) {
    auto fail = [&](const char* what) -> NodeId {
      throw InvalidInput("malformed node id '" + std::string(t) + "' at offset " +
                         std::to_string(pos) + ": expected " + what);
    };
    if (pos >= t.size()) return fail("node");
    if (t[pos] == '{') {
      ++pos;
      std::vector<NodeId> parts;
      parts.push_back(parse_at(t, pos));
      while (pos < t.size() && t[pos] == ',') {
        ++pos;
        parts.push_back(parse_at(t, pos));
      }
      if (pos >= t.size() || t[pos] != '}') return fail("'}'");
      ++pos;
      return mset(std::move(parts));
    }
    if (t[pos] == '(') {
      ++pos;
      NodeId b = parse_at(t, pos);
      if (pos >= t.size() || t[pos] != '|') return fail("'|'");
      ++pos;
      const std::size_t close = t.find(')', pos);
      if (close == std::string_view::npos) return fail("')'");
      std::string_view w = t.substr(pos, close - pos);
      std::vector<std::string> letters;
      if (!w.empty() && w.front() == ',') {
        std::size_t i = 1;
        while (i <= w.size()) {
          std::size_t j = w.find(',', i);
          if (j == std::string_view::npos) j = w.size();
          letters.emplace_back(w.substr(i, j - i));
          i = j + 1;
        }
      } else {
        for (char c : w) letters.emplace_back(1, c);
      }
      pos = close + 1;
      if (letters.empty()) return fail("nonempty word");
      return word(std::move(b), std::move(letters));
    }
    const std::size_t start = pos;
    while (pos < t.size() && !detail::is_reserved_char(t[pos])) ++pos;
    if (pos == start) return fail("node name");
    return base(std::string(t.substr(start, pos - start)));
  }

  Kind kind_;
  std::string name_;
  std::vector<NodeId> children_;
  std::vector<std::string> word_;
};

}  // namespace pclf
