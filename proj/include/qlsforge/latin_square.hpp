#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qlsforge/error.hpp"

namespace qlsforge {

/// Permutation of {0..n-1}, stored as the image list.
using Permutation = std::vector<int>;

inline bool is_permutation_of(const Permutation& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int x : p) {
    if (x < 0 || x >= n || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

inline Permutation identity_permutation(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

/// Latin square of order n with symbols 1..n. Cells are addressed 0-based,
/// symbols are 1-based so the grids read like the usual printed tables.
class LatinSquare {
 public:
  LatinSquare() = default;

  /// Validates `grid` (row-major, n*n symbols in 1..n).
  LatinSquare(int order, std::vector<int> grid) : n_(order), grid_(std::move(grid)) {
    if (n_ < 1) throw Error(ErrorKind::NotSquare, "order must be positive");
    if (static_cast<int>(grid_.size()) != n_ * n_)
      throw Error(ErrorKind::NotSquare, "expected " + std::to_string(n_ * n_) + " cells");
    for (int s : grid_)
      if (s < 1 || s > n_) throw Error(ErrorKind::BadSymbol, "symbol " + std::to_string(s));
    for (int i = 0; i < n_; ++i) {
      std::vector<bool> row(static_cast<std::size_t>(n_ + 1), false), col(row);
      for (int j = 0; j < n_; ++j) {
        int r = at(i, j), c = at(j, i);
        if (row[r])
          throw Error(ErrorKind::NotLatin, "row " + std::to_string(i + 1) + " repeats " + std::to_string(r));
        if (col[c])
          throw Error(ErrorKind::NotLatin, "column " + std::to_string(i + 1) + " repeats " + std::to_string(c));
        row[r] = col[c] = true;
      }
    }
  }

  /// Builds from row strings such as {"123", "231", "312"}.
  static LatinSquare from_rows(const std::vector<std::string>& rows) {
    const int n = static_cast<int>(rows.size());
    std::vector<int> grid;
    grid.reserve(static_cast<std::size_t>(n * n));
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != n) throw Error(ErrorKind::NotSquare, "row length");
      for (char ch : r) grid.push_back(ch - '0');
    }
    return LatinSquare(n, std::move(grid));
  }

  int order() const { return n_; }
  int at(int row, int col) const { return grid_[static_cast<std::size_t>(row * n_ + col)]; }
  const std::vector<int>& grid() const { return grid_; }

  friend bool operator==(const LatinSquare&, const LatinSquare&) = default;
  friend auto operator<=>(const LatinSquare&, const LatinSquare&) = default;

  std::string row_string(int row) const {
    std::string s;
    for (int j = 0; j < n_; ++j) s += symbol_char(at(row, j));
    return s;
  }

  /// One line per row, symbols separated by a space.
  std::string to_text() const {
    std::ostringstream out;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) out << (j ? " " : "") << at(i, j);
      out << '\n';
    }
    return out.str();
  }

  /// Compact form: rows concatenated, one character per symbol.
  std::string to_compact() const {
    std::string s;
    for (int i = 0; i < n_; ++i) s += row_string(i);
    return s;
  }

 private:
  static char symbol_char(int s) { return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + s - 10); }

  int n_ = 0;
  std::vector<int> grid_;
};

namespace detail {

inline int char_symbol(char ch) {
  if (std::isdigit(static_cast<unsigned char>(ch))) return ch - '0';
  if (std::isalpha(static_cast<unsigned char>(ch))) return std::tolower(static_cast<unsigned char>(ch)) - 'a' + 10;
  throw Error(ErrorKind::BadSymbol, std::string("character '") + ch + "'");
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline int token_symbol(const std::string& tok) {
  int v = 0;
  for (char ch : tok) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw Error(ErrorKind::BadSymbol, "token '" + tok + "'");
    v = v * 10 + (ch - '0');
    if (v > 1000000) throw Error(ErrorKind::BadSymbol, "token '" + tok + "'");
  }
  return v;
}

inline int exact_sqrt(std::size_t m) {
  int r = 0;
  while (static_cast<std::size_t>((r + 1) * (r + 1)) <= m) ++r;
  return static_cast<std::size_t>(r * r) == m ? r : -1;
}

}  // namespace detail

/// Parses the ".ls" text format. Accepts n lines of n whitespace-separated
/// symbols, n lines of n characters, or a single line of n*n characters.
/// Symbols may be 0-based or 1-based; the result is always 1-based.
inline LatinSquare parse_latin_square(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      auto toks = detail::split_ws(line);
      if (toks.empty()) continue;
      lines.push_back(line);
    }
  }
  if (lines.empty()) throw Error(ErrorKind::NotSquare, "empty input");

  std::vector<int> symbols;
  int n = 0;
  auto first = detail::split_ws(lines.front());
  if (lines.size() == 1 && first.size() == 1) {
    const std::string& s = first.front();
    n = detail::exact_sqrt(s.size());
    if (n < 1) throw Error(ErrorKind::NotSquare, "single-line form needs n*n characters");
    for (char ch : s) symbols.push_back(detail::char_symbol(ch));
  } else {
    n = static_cast<int>(lines.size());
    for (const auto& line : lines) {
      auto toks = detail::split_ws(line);
      if (toks.size() == 1 && n > 1) {
        if (static_cast<int>(toks[0].size()) != n)
          throw Error(ErrorKind::NotSquare, "row '" + toks[0] + "' does not have " + std::to_string(n) + " symbols");
        for (char ch : toks[0]) symbols.push_back(detail::char_symbol(ch));
      } else {
        if (static_cast<int>(toks.size()) != n)
          throw Error(ErrorKind::NotSquare, "row has " + std::to_string(toks.size()) + " tokens, expected " + std::to_string(n));
        for (const auto& t : toks) symbols.push_back(detail::token_symbol(t));
      }
    }
  }

  const auto [lo, hi] = std::minmax_element(symbols.begin(), symbols.end());
  if (*lo == 0 && *hi <= n - 1) {
    for (int& s : symbols) ++s;
  } else if (*lo < 1 || *hi > n) {
    throw Error(ErrorKind::BadSymbol, "symbols must lie in 1.." + std::to_string(n) + " or 0.." + std::to_string(n - 1));
  }
  return LatinSquare(n, std::move(symbols));
}

/// grid'[rowPerm(i)][colPerm(j)] = symPerm(grid[i][j]); permutations are
/// 0-based images (symPerm maps symbol s to symPerm[s-1]+1).
inline LatinSquare apply_isotopy(const LatinSquare& ls, const Permutation& row_perm,
                                 const Permutation& col_perm, const Permutation& sym_perm) {
  const int n = ls.order();
  if (!is_permutation_of(row_perm, n) || !is_permutation_of(col_perm, n) || !is_permutation_of(sym_perm, n))
    throw Error(ErrorKind::LengthMismatch, "isotopy permutations must be permutations of length " + std::to_string(n));
  std::vector<int> g(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(row_perm[i] * n + col_perm[j])] = sym_perm[ls.at(i, j) - 1] + 1;
  return LatinSquare(n, std::move(g));
}

/// Role permutation over (row, column, symbol). The output triple is
/// (t[roles[0]], t[roles[1]], t[roles[2]]) for each input triple t.
using RolePermutation = std::array<int, 3>;

inline LatinSquare conjugate(const LatinSquare& ls, const RolePermutation& roles) {
  std::array<bool, 3> seen{};
  for (int r : roles) {
    if (r < 0 || r > 2 || seen[r]) throw Error(ErrorKind::LengthMismatch, "role permutation");
    seen[r] = true;
  }
  const int n = ls.order();
  std::vector<int> g(static_cast<std::size_t>(n * n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::array<int, 3> t{i, j, ls.at(i, j) - 1};
      g[static_cast<std::size_t>(t[roles[0]] * n + t[roles[1]])] = t[roles[2]] + 1;
    }
  return LatinSquare(n, std::move(g));
}

inline LatinSquare transpose(const LatinSquare& ls) { return conjugate(ls, {1, 0, 2}); }

/// All six role permutations, identity first.
inline std::array<RolePermutation, 6> all_role_permutations() {
  return {{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}}};
}

/// True iff every pair (a[i][j], b[i][j]) occurs exactly once.
inline bool are_orthogonal(const LatinSquare& a, const LatinSquare& b) {
  if (a.order() != b.order()) return false;
  const int n = a.order();
  std::vector<bool> seen(static_cast<std::size_t>(n * n), false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>((a.at(i, j) - 1) * n + (b.at(i, j) - 1));
      if (seen[k]) return false;
      seen[k] = true;
    }
  return true;
}

/// Cyclic group table i+j mod n (symbols 1..n).
inline LatinSquare cyclic_square(int n) {
  std::vector<int> g(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(i * n + j)] = (i + j) % n + 1;
  return LatinSquare(n, std::move(g));
}

}  // namespace qlsforge
