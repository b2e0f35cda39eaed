#pragma once

#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "qlsforge/error.hpp"

namespace qlsforge {

/// Set of at most 64 vertices, one bit per vertex id.
using VertexMask = std::uint64_t;

inline constexpr int kMaxGraphVertices = 64;

inline constexpr VertexMask bit(int v) { return VertexMask{1} << v; }

inline int popcount(VertexMask m) { return std::popcount(m); }

/// Calls `f(v)` for every set bit of `m`, lowest first.
template <typename F>
inline void for_each_bit(VertexMask m, F&& f) {
  while (m) {
    const int v = std::countr_zero(m);
    m &= m - 1;
    f(v);
  }
}

/// Undirected simple graph on vertices 0..n-1 stored as adjacency bitsets.
class SimpleGraph {
 public:
  SimpleGraph() = default;

  explicit SimpleGraph(int vertex_count) : adj_(static_cast<std::size_t>(vertex_count), 0) {
    if (vertex_count < 0 || vertex_count > kMaxGraphVertices)
      throw Error(ErrorKind::DimensionMismatch,
                  "graph supports at most 64 vertices, got " + std::to_string(vertex_count));
  }

  int vertex_count() const { return static_cast<int>(adj_.size()); }

  VertexMask all() const {
    return vertex_count() == 64 ? ~VertexMask{0} : (bit(vertex_count()) - 1);
  }

  void add_edge(int u, int v) {
    check(u);
    check(v);
    if (u == v) throw Error(ErrorKind::PreconditionViolated, "self-loop");
    adj_[u] |= bit(v);
    adj_[v] |= bit(u);
  }

  bool adjacent(int u, int v) const { return (adj_[u] >> v) & 1U; }

  VertexMask neighbors(int v) const { return adj_[v]; }

  int degree(int v) const { return popcount(adj_[v]); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (auto m : adj_) twice += static_cast<std::size_t>(popcount(m));
    return twice / 2;
  }

  bool is_clique(VertexMask set) const {
    bool ok = true;
    for_each_bit(set, [&](int v) {
      if ((adj_[v] & set) != (set & ~bit(v))) ok = false;
    });
    return ok;
  }

  SimpleGraph complement() const {
    SimpleGraph g(vertex_count());
    for (int v = 0; v < vertex_count(); ++v) g.adj_[v] = all() & ~adj_[v] & ~bit(v);
    return g;
  }

  /// Graph with vertex v of this graph relabelled to perm[v].
  SimpleGraph relabel(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != vertex_count())
      throw Error(ErrorKind::LengthMismatch, "relabel permutation size");
    SimpleGraph g(vertex_count());
    for (int v = 0; v < vertex_count(); ++v)
      for_each_bit(adj_[v], [&](int u) { g.adj_[perm[v]] |= bit(perm[u]); });
    return g;
  }

  const std::vector<VertexMask>& rows() const { return adj_; }

  friend bool operator==(const SimpleGraph&, const SimpleGraph&) = default;

  /// Text form: vertex count line, then one adjacency bitstring per vertex.
  std::string serialize() const {
    std::ostringstream out;
    out << vertex_count() << '\n';
    for (int v = 0; v < vertex_count(); ++v) {
      for (int u = 0; u < vertex_count(); ++u) out << (adjacent(v, u) ? '1' : '0');
      out << '\n';
    }
    return out.str();
  }

  static SimpleGraph parse(const std::string& text) {
    std::istringstream in(text);
    int n = -1;
    if (!(in >> n) || n < 0) throw Error(ErrorKind::ParseError, "missing vertex count");
    SimpleGraph g(n);
    for (int v = 0; v < n; ++v) {
      std::string row;
      if (!(in >> row) || static_cast<int>(row.size()) != n)
        throw Error(ErrorKind::ParseError, "adjacency row " + std::to_string(v));
      for (int u = 0; u < n; ++u) {
        if (row[u] != '0' && row[u] != '1') throw Error(ErrorKind::ParseError, "bad adjacency char");
        if (row[u] == '1') g.adj_[v] |= bit(u);
      }
    }
    for (int v = 0; v < n; ++v) {
      if (g.adjacent(v, v)) throw Error(ErrorKind::ParseError, "self-loop");
      for (int u = 0; u < n; ++u)
        if (g.adjacent(v, u) != g.adjacent(u, v)) throw Error(ErrorKind::ParseError, "asymmetric");
    }
    return g;
  }

 private:
  void check(int v) const {
    if (v < 0 || v >= vertex_count())
      throw Error(ErrorKind::IndexOutOfRange, "vertex " + std::to_string(v));
  }

  std::vector<VertexMask> adj_;
};

}  // namespace qlsforge
