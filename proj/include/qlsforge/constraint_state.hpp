#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlsforge/error.hpp"
#include "qlsforge/graph.hpp"

namespace qlsforge {

/// Three vertices assumed to map to distinct points on one projective line.
/// Members are kept sorted.
struct LineTriple {
  std::array<int, 3> members{};

  LineTriple() = default;
  LineTriple(int a, int b, int c) : members{a, b, c} { std::sort(members.begin(), members.end()); }

  VertexMask mask() const { return bit(members[0]) | bit(members[1]) | bit(members[2]); }
  bool contains(int v) const { return members[0] == v || members[1] == v || members[2] == v; }

  friend bool operator==(const LineTriple&, const LineTriple&) = default;
  friend auto operator<=>(const LineTriple&, const LineTriple&) = default;
};

/// Orthogonality graph (an edge means the two vectors are orthogonal) with
/// line triples. Vertex ids stay those of the original graph; a merge keeps
/// the smaller id and retires the other.
class ConstraintState {
 public:
  ConstraintState() = default;

  explicit ConstraintState(const SimpleGraph& g, int dimension = 6)
      : adj_(g.rows()), alive_(g.all()), dimension_(dimension) {
    if (dimension < 1) throw Error(ErrorKind::PreconditionViolated, "dimension must be positive");
    lineage_.resize(adj_.size());
    for (std::size_t v = 0; v < lineage_.size(); ++v) lineage_[v] = static_cast<int>(v);
  }

  int dimension() const { return dimension_; }
  int capacity() const { return static_cast<int>(adj_.size()); }
  VertexMask alive() const { return alive_; }
  bool is_alive(int v) const { return v >= 0 && v < capacity() && (alive_ >> v & 1U); }
  int vertex_count() const { return popcount(alive_); }
  const std::vector<VertexMask>& adjacency() const { return adj_; }
  VertexMask neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  bool adjacent(int u, int v) const { return adj_[static_cast<std::size_t>(u)] >> v & 1U; }
  const std::vector<LineTriple>& triples() const { return triples_; }

  /// Current vertex that an original vertex was merged into.
  int representative(int original) const { return lineage_.at(static_cast<std::size_t>(original)); }
  const std::vector<int>& lineage() const { return lineage_; }

  int edge_count() const {
    int twice = 0;
    for_each_bit(alive_, [&](int v) { twice += popcount(adj_[static_cast<std::size_t>(v)]); });
    return twice / 2;
  }

  int edges_within(VertexMask set) const {
    int twice = 0;
    for_each_bit(set, [&](int v) { twice += popcount(adj_[static_cast<std::size_t>(v)] & set); });
    return twice / 2;
  }

  bool in_common_triple(int x, int y) const {
    const VertexMask pair = bit(x) | bit(y);
    return std::any_of(triples_.begin(), triples_.end(), [&](const LineTriple& t) { return (t.mask() & pair) == pair; });
  }

  bool has_triple(const LineTriple& t) const { return std::binary_search(triples_.begin(), triples_.end(), t); }

  void add_edge(int u, int v) {
    require_alive(u);
    require_alive(v);
    if (u == v) throw Error(ErrorKind::PreconditionViolated, "self-loop");
    adj_[static_cast<std::size_t>(u)] |= bit(v);
    adj_[static_cast<std::size_t>(v)] |= bit(u);
  }

  /// Inserts keeping the list sorted; false if already present.
  bool add_triple(const LineTriple& t) {
    for (int v : t.members) require_alive(v);
    if (t.members[0] == t.members[1] || t.members[1] == t.members[2])
      throw Error(ErrorKind::PreconditionViolated, "triple members must be distinct");
    auto it = std::lower_bound(triples_.begin(), triples_.end(), t);
    if (it != triples_.end() && *it == t) return false;
    triples_.insert(it, t);
    return true;
  }

  /// Retires `gone` into `keep`; the caller checks the merge guards.
  void merge_into(int keep, int gone) {
    const auto k = static_cast<std::size_t>(keep), g = static_cast<std::size_t>(gone);
    adj_[k] |= adj_[g];
    for_each_bit(adj_[g], [&](int v) {
      adj_[static_cast<std::size_t>(v)] &= ~bit(gone);
      adj_[static_cast<std::size_t>(v)] |= bit(keep);
    });
    adj_[g] = 0;
    alive_ &= ~bit(gone);
    for (auto& r : lineage_)
      if (r == gone) r = keep;
    for (auto& t : triples_) {
      for (auto& m : t.members)
        if (m == gone) m = keep;
      std::sort(t.members.begin(), t.members.end());
    }
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
  }

  /// Alive vertices renumbered 0..k-1 in id order.
  SimpleGraph graph() const {
    std::vector<int> index(adj_.size(), -1);
    int k = 0;
    for_each_bit(alive_, [&](int v) { index[static_cast<std::size_t>(v)] = k++; });
    SimpleGraph g(k);
    for_each_bit(alive_, [&](int v) {
      for_each_bit(adj_[static_cast<std::size_t>(v)], [&](int u) {
        if (u > v) g.add_edge(index[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(u)]);
      });
    });
    return g;
  }

  /// Structural key: alive mask, alive adjacency rows, sorted triples.
  /// The lineage map is deliberately left out.
  std::vector<std::uint64_t> key() const {
    std::vector<std::uint64_t> k;
    k.reserve(1 + static_cast<std::size_t>(popcount(alive_)) + triples_.size());
    k.push_back(alive_);
    for_each_bit(alive_, [&](int v) { k.push_back(adj_[static_cast<std::size_t>(v)]); });
    for (const auto& t : triples_)
      k.push_back(static_cast<std::uint64_t>(t.members[0]) | static_cast<std::uint64_t>(t.members[1]) << 8 |
                  static_cast<std::uint64_t>(t.members[2]) << 16 | std::uint64_t{1} << 40);
    return k;
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = 14695981039346656037ULL;
    for (auto w : key())
      for (int i = 0; i < 8; ++i) {
        h ^= (w >> (8 * i)) & 0xffU;
        h *= 1099511628211ULL;
      }
    return h;
  }

  friend bool operator==(const ConstraintState& a, const ConstraintState& b) {
    return a.dimension_ == b.dimension_ && a.key() == b.key();
  }

 private:
  void require_alive(int v) const {
    if (!is_alive(v)) throw Error(ErrorKind::IndexOutOfRange, "vertex " + std::to_string(v) + " is not present");
  }

  std::vector<VertexMask> adj_;
  VertexMask alive_ = 0;
  int dimension_ = 6;
  std::vector<int> lineage_;
  std::vector<LineTriple> triples_;
};

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : k) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
  }
};

/// Fixpoint of: a vertex orthogonal to two points of a line is orthogonal
/// to the whole line. Only edges between a triple and a non-member are added.
inline void closure_in_place(ConstraintState& st) {
  bool adding = true;
  while (adding) {
    adding = false;
    for (const auto& t : st.triples()) {
      const VertexMask m = t.mask();
      for_each_bit(st.alive() & ~m, [&](int x) {
        if (popcount(st.neighbors(x) & m) == 2) {
          for (int v : t.members)
            if (!st.adjacent(x, v)) st.add_edge(x, v);
          adding = true;
        }
      });
    }
  }
}

inline ConstraintState closure(const ConstraintState& state) {
  ConstraintState st = state;
  closure_in_place(st);
  return st;
}

/// A triple with two or more internal edges: one member would be orthogonal
/// to the line that contains it.
inline std::optional<LineTriple> degenerate_triple(const ConstraintState& st) {
  for (const auto& t : st.triples())
    if (st.edges_within(t.mask()) >= 2) return t;
  return std::nullopt;
}

/// Merge guards of the dependence case split: distinct, alive, not
/// orthogonal, not on a common line triple.
inline bool can_merge(const ConstraintState& st, int x, int y) {
  return x != y && st.is_alive(x) && st.is_alive(y) && !st.adjacent(x, y) && !st.in_common_triple(x, y);
}

/// x and y mapped to the same point: the smaller id survives with the union
/// of both neighbourhoods.
inline ConstraintState merge_vertices(const ConstraintState& state, int x, int y) {
  if (!state.is_alive(x) || !state.is_alive(y) || x == y)
    throw Error(ErrorKind::PreconditionViolated, "merge needs two distinct present vertices");
  if (state.adjacent(x, y)) throw Error(ErrorKind::PreconditionViolated, "cannot merge adjacent vertices");
  if (state.in_common_triple(x, y)) throw Error(ErrorKind::PreconditionViolated, "cannot merge two points of a line triple");
  ConstraintState st = state;
  st.merge_into(std::min(x, y), std::max(x, y));
  return st;
}

}  // namespace qlsforge
