#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qlsforge/error.hpp"

namespace qlsforge {

/// Support of a vector in C^n: bit k set iff coordinate k+1 is nonzero.
/// Printed as a bitstring with coordinate 1 first ("0110" = {2,3}).
class SupportPattern {
 public:
  SupportPattern() = default;
  SupportPattern(int n, std::uint64_t bits) : n_(n), bits_(bits) {
    if (n < 1 || n > 64) throw Error(ErrorKind::DimensionMismatch, "pattern length " + std::to_string(n));
    if (n < 64 && (bits >> n) != 0) throw Error(ErrorKind::DimensionMismatch, "pattern bits exceed length");
  }

  static SupportPattern parse(const std::string& s) {
    if (s.empty() || s.size() > 64) throw Error(ErrorKind::ParseError, "pattern '" + s + "'");
    std::uint64_t b = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] == '1') b |= std::uint64_t{1} << k;
      else if (s[k] != '0') throw Error(ErrorKind::ParseError, "pattern '" + s + "'");
    }
    return {static_cast<int>(s.size()), b};
  }

  /// The basis pattern with only coordinate k (0-based) set.
  static SupportPattern unit(int n, int k) { return {n, std::uint64_t{1} << k}; }

  int length() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool has(int k) const { return (bits_ >> k) & 1U; }

  std::string str() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int k = 0; k < n_; ++k)
      if (has(k)) s[k] = '1';
    return s;
  }

  friend bool operator==(const SupportPattern&, const SupportPattern&) = default;
  friend auto operator<=>(const SupportPattern&, const SupportPattern&) = default;

 private:
  int n_ = 0;
  std::uint64_t bits_ = 0;
};

inline int weight(const SupportPattern& p) { return std::popcount(p.bits()); }

/// Row or column of a pattern matrix.
enum class Axis { Row, Column };

/// n x n matrix of support patterns, each of length n.
class PatternMatrix {
 public:
  PatternMatrix() = default;
  explicit PatternMatrix(int n) : n_(n), cells_(static_cast<std::size_t>(n * n), SupportPattern(n, 0)) {}
  PatternMatrix(int n, std::vector<SupportPattern> cells) : n_(n), cells_(std::move(cells)) {
    if (static_cast<int>(cells_.size()) != n * n) throw Error(ErrorKind::DimensionMismatch, "pattern matrix cells");
    for (const auto& c : cells_)
      if (c.length() != n) throw Error(ErrorKind::DimensionMismatch, "pattern length in matrix");
  }

  int order() const { return n_; }
  const SupportPattern& at(int r, int c) const { return cells_[static_cast<std::size_t>(r * n_ + c)]; }
  SupportPattern& at(int r, int c) { return cells_[static_cast<std::size_t>(r * n_ + c)]; }
  const std::vector<SupportPattern>& cells() const { return cells_; }

  bool all_weight_one() const {
    for (const auto& c : cells_)
      if (weight(c) != 1) return false;
    return true;
  }

  friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;
  friend auto operator<=>(const PatternMatrix&, const PatternMatrix&) = default;

  /// One line per row, cells as bitstrings separated by single spaces.
  std::string serialize() const {
    std::ostringstream out;
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) out << (c ? " " : "") << at(r, c).str();
      out << '\n';
    }
    return out.str();
  }

  static PatternMatrix parse(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::vector<SupportPattern>> rows;
    for (std::string line; std::getline(in, line);) {
      std::istringstream ls(line);
      std::vector<SupportPattern> row;
      for (std::string tok; ls >> tok;) row.push_back(SupportPattern::parse(tok));
      if (!row.empty()) rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    std::vector<SupportPattern> cells;
    for (auto& row : rows) {
      if (static_cast<int>(row.size()) != n) throw Error(ErrorKind::DimensionMismatch, "pattern matrix is not square");
      for (auto& p : row) cells.push_back(p);
    }
    return PatternMatrix(n, std::move(cells));
  }

 private:
  int n_ = 0;
  std::vector<SupportPattern> cells_;
};

/// The n patterns of row/column `index` (1-based).
inline std::vector<SupportPattern> extract_row_patterns(const PatternMatrix& pm, int index, Axis axis) {
  const int n = pm.order();
  if (index < 1 || index > n) throw Error(ErrorKind::IndexOutOfRange, "line index " + std::to_string(index));
  std::vector<SupportPattern> out;
  for (int k = 0; k < n; ++k) out.push_back(axis == Axis::Row ? pm.at(index - 1, k) : pm.at(k, index - 1));
  return out;
}

/// Which necessary condition for a unitary pattern failed first.
enum class UnitaryCondition {
  None,
  OverlapOne,            // (a) two rows overlap in exactly one coordinate
  SubsetRank,            // (b) more rows inside S than |S|
  TransposedOverlapOne,  // (a) on the columns
  TransposedSubsetRank,  // (b) on the columns
};

inline const char* to_string(UnitaryCondition c) {
  switch (c) {
    case UnitaryCondition::None: return "none";
    case UnitaryCondition::OverlapOne: return "overlap-one";
    case UnitaryCondition::SubsetRank: return "subset-rank";
    case UnitaryCondition::TransposedOverlapOne: return "transposed-overlap-one";
    case UnitaryCondition::TransposedSubsetRank: return "transposed-subset-rank";
  }
  return "?";
}

struct UnitaryCheck {
  bool ok = true;
  UnitaryCondition condition = UnitaryCondition::None;
  /// Overlap violations: the two offending indices (rows, or coordinates
  /// for the transposed form). Subset violations: the members of S.
  std::vector<int> witness;

  explicit operator bool() const { return ok; }
};

namespace detail {

inline std::optional<std::vector<int>> overlap_one_pair(const std::vector<std::uint64_t>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      if (std::popcount(rows[i] & rows[j]) == 1) return std::vector<int>{static_cast<int>(i), static_cast<int>(j)};
  return std::nullopt;
}

/// Smallest (then lexicographically first) S with more rows inside S than |S|.
inline std::optional<std::vector<int>> subset_rank_violation(const std::vector<std::uint64_t>& rows, int width) {
  const std::uint64_t limit = std::uint64_t{1} << width;
  for (int size = 0; size <= width; ++size) {
    for (std::uint64_t s = 0; s < limit; ++s) {
      if (std::popcount(s) != size) continue;
      int inside = 0;
      for (auto r : rows)
        if ((r & ~s) == 0) ++inside;
      if (inside > size) {
        std::vector<int> members;
        for (int k = 0; k < width; ++k)
          if (s >> k & 1U) members.push_back(k);
        return members;
      }
    }
  }
  return std::nullopt;
}

inline std::vector<std::uint64_t> transpose_bits(const std::vector<std::uint64_t>& rows, int width) {
  std::vector<std::uint64_t> cols(static_cast<std::size_t>(width), 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < width; ++k)
      if (rows[i] >> k & 1U) cols[k] |= std::uint64_t{1} << i;
  return cols;
}

}  // namespace detail

/// Necessary conditions for n patterns of length n to be the rows of a
/// unitary matrix: no overlap of size one, at most |S| rows supported in
/// any coordinate set S, and the same two conditions on the columns.
inline UnitaryCheck combinatorial_unitary_check(const std::vector<std::uint64_t>& rows, int n) {
  if (static_cast<int>(rows.size()) != n || n < 1 || n > 20)
    throw Error(ErrorKind::DimensionMismatch, "unitary check needs n patterns of length n (n <= 20)");
  if (auto w = detail::overlap_one_pair(rows)) return {false, UnitaryCondition::OverlapOne, *w};
  if (auto w = detail::subset_rank_violation(rows, n)) return {false, UnitaryCondition::SubsetRank, *w};
  const auto cols = detail::transpose_bits(rows, n);
  if (auto w = detail::overlap_one_pair(cols)) return {false, UnitaryCondition::TransposedOverlapOne, *w};
  if (auto w = detail::subset_rank_violation(cols, n)) return {false, UnitaryCondition::TransposedSubsetRank, *w};
  return {};
}

inline UnitaryCheck combinatorial_unitary_check(const std::vector<SupportPattern>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::uint64_t> bits;
  for (const auto& p : rows) {
    if (p.length() != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "pattern of length " + std::to_string(p.length()) + " in a family of " + std::to_string(n));
    bits.push_back(p.bits());
  }
  return combinatorial_unitary_check(bits, n);
}

/// Every row and every column of the matrix passes the unitary check.
inline bool lines_pass_unitary_check(const PatternMatrix& pm) {
  for (int i = 1; i <= pm.order(); ++i)
    if (!combinatorial_unitary_check(extract_row_patterns(pm, i, Axis::Row)) ||
        !combinatorial_unitary_check(extract_row_patterns(pm, i, Axis::Column)))
      return false;
  return true;
}

/// At most n-1 mutually orthogonal quantum Latin squares of order n exist:
/// the supports of the (2,1) entries must partition {2..n}.
inline bool moqls_count_bound_check(int t, int n) {
  if (t < 1 || n < 1) throw Error(ErrorKind::PreconditionViolated, "t and n must be positive");
  return t <= n - 1;
}

}  // namespace qlsforge
