#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "qlsforge/graph.hpp"

namespace qlsforge {

namespace detail {

/// Greedy colouring of `p` in adjacency `adj`; fills `order` with vertices
/// and `bound` with the colour count reached at each position.
inline int greedy_color(std::span<const VertexMask> adj, VertexMask p, std::array<int, 64>& order,
                        std::array<int, 64>& bound) {
  int count = 0;
  int color = 0;
  VertexMask uncolored = p;
  while (uncolored) {
    ++color;
    VertexMask q = uncolored;
    while (q) {
      const int v = std::countr_zero(q);
      q &= ~bit(v);
      q &= ~adj[v];
      uncolored &= ~bit(v);
      order[count] = v;
      bound[count] = color;
      ++count;
    }
  }
  return count;
}

inline bool expand_clique(std::span<const VertexMask> adj, VertexMask current, int size, VertexMask p, int k,
                          VertexMask& witness) {
  if (size >= k) {
    witness = current;
    return true;
  }
  if (size + popcount(p) < k) return false;
  std::array<int, 64> order{}, bound{};
  const int count = greedy_color(adj, p, order, bound);
  for (int i = count - 1; i >= 0; --i) {
    if (size + bound[i] < k) return false;
    const int v = order[i];
    if (expand_clique(adj, current | bit(v), size + 1, p & adj[v], k, witness)) return true;
    p &= ~bit(v);
  }
  return false;
}

}  // namespace detail

/// Some k-clique inside `candidates`, using branch and bound with a greedy
/// colouring bound. `adj` rows must be symmetric with empty diagonal.
inline std::optional<VertexMask> find_clique(std::span<const VertexMask> adj, VertexMask candidates, int k) {
  if (k <= 0) return VertexMask{0};
  VertexMask witness = 0;
  if (detail::expand_clique(adj, 0, 0, candidates, k, witness)) return witness;
  return std::nullopt;
}

inline bool has_clique(const SimpleGraph& g, int k) {
  return find_clique(g.rows(), g.all(), k).has_value();
}

inline int clique_number(std::span<const VertexMask> adj, VertexMask candidates) {
  int k = 0;
  while (find_clique(adj, candidates, k + 1)) ++k;
  return k;
}

inline int clique_number(const SimpleGraph& g) { return clique_number(g.rows(), g.all()); }

}  // namespace qlsforge
