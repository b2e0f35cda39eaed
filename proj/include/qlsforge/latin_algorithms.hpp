#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlsforge/exact_cover.hpp"
#include "qlsforge/graph.hpp"
#include "qlsforge/latin_square.hpp"

namespace qlsforge {

/// k rows, k columns and k symbols whose induced block is a Latin square.
/// Rows and columns are 0-based; symbols are 1-based.
struct Subsquare {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<int> symbols;

  friend bool operator==(const Subsquare&, const Subsquare&) = default;
  friend auto operator<=>(const Subsquare&, const Subsquare&) = default;
};

namespace detail {

/// Visits every k-subset of {0..n-1} in lexicographic order.
template <typename F>
inline void for_each_combination(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(static_cast<const std::vector<int>&>(idx));
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// All order-k subsquares, ordered by (rows, cols) lexicographically.
inline std::vector<Subsquare> find_subsquares(const LatinSquare& ls, int k) {
  const int n = ls.order();
  if (k < 1 || k > n) throw Error(ErrorKind::IndexOutOfRange, "subsquare order " + std::to_string(k));
  std::vector<Subsquare> out;
  detail::for_each_combination(n, k, [&](const std::vector<int>& rows) {
    // The symbol set is fixed by any one column; every other column must
    // carry the same set on these rows.
    std::vector<std::uint32_t> col_syms(static_cast<std::size_t>(n), 0);
    for (int c = 0; c < n; ++c)
      for (int r : rows) col_syms[c] |= std::uint32_t{1} << ls.at(r, c);
    detail::for_each_combination(n, k, [&](const std::vector<int>& cols) {
      const std::uint32_t syms = col_syms[cols[0]];
      for (int c : cols)
        if (col_syms[c] != syms) return;
      Subsquare sq{rows, cols, {}};
      for (int s = 1; s <= n; ++s)
        if (syms >> s & 1U) sq.symbols.push_back(s);
      out.push_back(std::move(sq));
    });
  });
  return out;
}

/// One cell per row; `columns[r]` is the column chosen in row r.
struct Transversal {
  std::vector<int> columns;

  std::vector<std::pair<int, int>> cells() const {
    std::vector<std::pair<int, int>> c;
    for (int r = 0; r < static_cast<int>(columns.size()); ++r) c.emplace_back(r, columns[r]);
    return c;
  }

  friend bool operator==(const Transversal&, const Transversal&) = default;
  friend auto operator<=>(const Transversal&, const Transversal&) = default;
};

/// All transversals in lexicographic order of their column vectors.
inline std::vector<Transversal> enumerate_transversals(const LatinSquare& ls) {
  const int n = ls.order();
  std::vector<Transversal> out;
  std::vector<int> cols(static_cast<std::size_t>(n));
  auto rec = [&](auto&& self, int row, std::uint64_t used_cols, std::uint64_t used_syms) -> void {
    if (row == n) {
      out.push_back(Transversal{cols});
      return;
    }
    for (int c = 0; c < n; ++c) {
      const int s = ls.at(row, c);
      if ((used_cols >> c & 1U) || (used_syms >> s & 1U)) continue;
      cols[row] = c;
      self(self, row + 1, used_cols | (std::uint64_t{1} << c), used_syms | (std::uint64_t{1} << s));
    }
  };
  rec(rec, 0, 0, 0);
  return out;
}

inline std::size_t count_transversals(const LatinSquare& ls) {
  const int n = ls.order();
  std::size_t count = 0;
  auto rec = [&](auto&& self, int row, std::uint64_t used_cols, std::uint64_t used_syms) -> void {
    if (row == n) {
      ++count;
      return;
    }
    for (int c = 0; c < n; ++c) {
      const int s = ls.at(row, c);
      if ((used_cols >> c & 1U) || (used_syms >> s & 1U)) continue;
      self(self, row + 1, used_cols | (std::uint64_t{1} << c), used_syms | (std::uint64_t{1} << s));
    }
  };
  rec(rec, 0, 0, 0);
  return count;
}

/// A square orthogonal to `ls`, found as an exact cover of the cells by n
/// disjoint transversals (transversal number t becomes symbol t+1).
inline std::optional<LatinSquare> find_orthogonal_mate(const LatinSquare& ls) {
  const int n = ls.order();
  const auto transversals = enumerate_transversals(ls);
  if (static_cast<int>(transversals.size()) < n) return std::nullopt;
  ExactCover dlx(n * n);
  for (const auto& t : transversals) {
    std::vector<int> cells;
    for (int r = 0; r < n; ++r) cells.push_back(r * n + t.columns[r]);
    dlx.add_row(cells);
  }
  std::optional<std::vector<int>> found;
  dlx.solve([&](const std::vector<int>& rows) {
    found = rows;
    return false;
  });
  if (!found) return std::nullopt;
  auto chosen = *found;
  std::sort(chosen.begin(), chosen.end());
  std::vector<int> grid(static_cast<std::size_t>(n * n), 0);
  for (int k = 0; k < n; ++k) {
    const auto& t = transversals[chosen[k]];
    for (int r = 0; r < n; ++r) grid[static_cast<std::size_t>(r * n + t.columns[r])] = k + 1;
  }
  return LatinSquare(n, std::move(grid));
}

/// Cells in row-major order; adjacent iff same row, same column or same symbol.
inline SimpleGraph latin_square_graph(const LatinSquare& ls) {
  const int n = ls.order();
  if (n * n > kMaxGraphVertices)
    throw Error(ErrorKind::DimensionMismatch, "Latin square graph needs n*n <= 64");
  SimpleGraph g(n * n);
  for (int u = 0; u < n * n; ++u)
    for (int v = u + 1; v < n * n; ++v) {
      const int ru = u / n, cu = u % n, rv = v / n, cv = v % n;
      if (ru == rv || cu == cv || ls.at(ru, cu) == ls.at(rv, cv)) g.add_edge(u, v);
    }
  return g;
}

/// The twelve main classes of Latin squares of order six, in the reading
/// order of the standard published table.
inline const std::vector<LatinSquare>& catalog_main_classes() {
  static const std::vector<LatinSquare> catalog = [] {
    const std::array<std::array<const char*, 6>, 12> rows{{
        {"123456", "214365", "345612", "436521", "561234", "652143"},
        {"123456", "214365", "345612", "436521", "561243", "652134"},
        {"123456", "214365", "345612", "456123", "561234", "632541"},
        {"123456", "214365", "345612", "456231", "562143", "631524"},
        {"123456", "214365", "351624", "462513", "536142", "645231"},
        {"123456", "214365", "351624", "462513", "536241", "645132"},
        {"123456", "214365", "351624", "462531", "546213", "635142"},
        {"123456", "214365", "351624", "465132", "546213", "632541"},
        {"123456", "214365", "351642", "465123", "536214", "642531"},
        {"123456", "214365", "351642", "465123", "546231", "632514"},
        {"123456", "214563", "342615", "465231", "536124", "651342"},
        {"123456", "231564", "312645", "465213", "546321", "654132"},
    }};
    std::vector<LatinSquare> out;
    for (const auto& r : rows) out.push_back(LatinSquare::from_rows({r.begin(), r.end()}));
    return out;
  }();
  return catalog;
}

/// Paratopy invariants used to tell main classes apart.
struct MainClassFingerprint {
  std::size_t transversals = 0;
  std::size_t subsquares2 = 0;
  std::size_t subsquares3 = 0;
  std::uint64_t graph_hash = 0;

  friend bool operator==(const MainClassFingerprint&, const MainClassFingerprint&) = default;
  friend auto operator<=>(const MainClassFingerprint&, const MainClassFingerprint&) = default;
};

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffU;
    h *= 1099511628211ULL;
  }
  return h;
}

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

inline std::uint64_t hash_sorted(std::vector<std::uint64_t> values, std::uint64_t seed = kFnvOffset) {
  std::sort(values.begin(), values.end());
  std::uint64_t h = seed;
  for (auto v : values) h = fnv1a(h, v);
  return h;
}

}  // namespace detail

/// Isomorphism-invariant hash: colour refinement seeded with, for every
/// edge, the number of edges among its common neighbours.
inline std::uint64_t graph_invariant_hash(const SimpleGraph& g, int rounds = 3) {
  const int nv = g.vertex_count();
  std::vector<std::vector<std::uint64_t>> edge_weight(static_cast<std::size_t>(nv),
                                                      std::vector<std::uint64_t>(static_cast<std::size_t>(nv), 0));
  for (int u = 0; u < nv; ++u)
    for_each_bit(g.neighbors(u), [&](int v) {
      if (v < u) return;
      const VertexMask common = g.neighbors(u) & g.neighbors(v);
      std::uint64_t edges = 0;
      for_each_bit(common, [&](int w) { edges += static_cast<std::uint64_t>(popcount(g.neighbors(w) & common)); });
      edge_weight[u][v] = edge_weight[v][u] = edges / 2;
    });
  std::vector<std::uint64_t> color(static_cast<std::size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    std::vector<std::uint64_t> w;
    for_each_bit(g.neighbors(v), [&](int u) { w.push_back(edge_weight[v][u]); });
    color[v] = detail::hash_sorted(std::move(w));
  }
  for (int round = 0; round < rounds; ++round) {
    std::vector<std::uint64_t> next(color.size());
    for (int v = 0; v < nv; ++v) {
      std::vector<std::uint64_t> w;
      for_each_bit(g.neighbors(v), [&](int u) { w.push_back(detail::fnv1a(color[u], edge_weight[v][u])); });
      next[v] = detail::hash_sorted(std::move(w), detail::fnv1a(detail::kFnvOffset, color[v]));
    }
    color = std::move(next);
  }
  return detail::hash_sorted(color);
}

inline MainClassFingerprint main_class_fingerprint(const LatinSquare& ls) {
  MainClassFingerprint fp;
  fp.transversals = count_transversals(ls);
  if (ls.order() >= 2) fp.subsquares2 = find_subsquares(ls, 2).size();
  if (ls.order() >= 3) fp.subsquares3 = find_subsquares(ls, 3).size();
  fp.graph_hash = graph_invariant_hash(latin_square_graph(ls));
  return fp;
}

/// 1-based catalog index whose fingerprint matches, if any.
inline std::optional<int> identify_main_class(const LatinSquare& ls) {
  if (ls.order() != 6) return std::nullopt;
  const auto fp = main_class_fingerprint(ls);
  const auto& cat = catalog_main_classes();
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (main_class_fingerprint(cat[i]) == fp) return static_cast<int>(i) + 1;
  return std::nullopt;
}

}  // namespace qlsforge
