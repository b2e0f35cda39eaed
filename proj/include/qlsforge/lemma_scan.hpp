#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "qlsforge/error.hpp"
#include "qlsforge/pattern.hpp"

namespace qlsforge {

/// A 6x6 family of row supports, first row fixed.
using RowFamily = std::vector<std::uint64_t>;

/// How to read the four-set clause of the weight-three scan.
enum class Pattern3Reading {
  /// Four weight-3 rows inside a common 4-set containing the first row.
  CommonFourSet,
  /// As above, and the four supports pairwise overlap in exactly two places.
  PairwiseOverlapTwo,
};

struct LemmaScanOptions {
  std::uint64_t budget = 100'000'000;
  Pattern3Reading reading = Pattern3Reading::CommonFourSet;
};

struct LemmaScanResult {
  /// Orbit representatives of families that match neither closing shape.
  std::vector<RowFamily> counterexamples;
  /// Families (as row multisets) that pass the unitary check.
  std::uint64_t families = 0;
  /// Orbits of those families under column permutations fixing the first row.
  std::uint64_t orbits = 0;
  /// pattern4 only: passing families with fewer than four rows of weight >= 2.
  std::vector<RowFamily> closing_claim_violations;
  std::uint64_t nodes = 0;

  bool empty() const { return counterexamples.empty(); }
};

namespace detail {

inline bool inside(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

inline int rows_with_weight_at_least(const RowFamily& rows, int w) {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [w](std::uint64_t r) { return std::popcount(r) >= w; }));
}

/// Column permutations of {0..5} that map `fixed` onto itself.
inline std::vector<std::vector<int>> stabilizer(std::uint64_t fixed, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) ok = ((fixed >> k & 1U) == (fixed >> p[k] & 1U));
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Lexicographically least image with rows 2..n sorted.
inline RowFamily canonical_family(const RowFamily& rows, const std::vector<std::vector<int>>& group) {
  RowFamily best;
  for (const auto& p : group) {
    RowFamily img;
    for (auto r : rows) {
      std::uint64_t q = 0;
      for (int k = 0; k < static_cast<int>(p.size()); ++k)
        if (r >> k & 1U) q |= std::uint64_t{1} << p[k];
      img.push_back(q);
    }
    std::sort(img.begin() + 1, img.end());
    if (best.empty() || img < best) best = img;
  }
  return best;
}

/// Visits every multiset of n-1 further rows (weights 1..max_weight) for
/// which the whole family passes the unitary check. Pairs overlapping in
/// exactly one coordinate are cut as soon as they appear.
template <typename F>
void scan_families(std::uint64_t first, int n, int max_weight, std::uint64_t budget, std::uint64_t& nodes, F&& visit) {
  std::vector<std::uint64_t> pool;
  for (std::uint64_t p = 1; p < (std::uint64_t{1} << n); ++p)
    if (std::popcount(p) <= max_weight) pool.push_back(p);
  RowFamily rows{first};
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (++nodes > budget) throw Error(ErrorKind::ResourceLimit, "lemma scan budget exceeded");
    if (static_cast<int>(rows.size()) == n) {
      if (combinatorial_unitary_check(rows, n)) visit(static_cast<const RowFamily&>(rows));
      return;
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
      const std::uint64_t p = pool[i];
      bool ok = true;
      for (auto r : rows)
        if (std::popcount(r & p) == 1) {
          ok = false;
          break;
        }
      if (!ok) continue;
      rows.push_back(p);
      self(self, i);
      rows.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace detail

/// For a weight-three first row: a second row with the same
/// support and a third row of weight 2 or 3 inside it.
inline bool pattern3_twin_with_inner_row(const RowFamily& rows) {
  const std::uint64_t f = rows.at(0);
  for (std::size_t j = 1; j < rows.size(); ++j) {
    if (rows[j] != f) continue;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (k == j) continue;
      const int w = std::popcount(rows[k]);
      if ((w == 2 || w == 3) && detail::inside(rows[k], f)) return true;
    }
  }
  return false;
}

/// Four weight-3 rows inside one 4-set containing the first row.
inline bool pattern3_four_set_cluster(const RowFamily& rows, int n, Pattern3Reading reading) {
  const std::uint64_t f = rows.at(0);
  for (int k = 0; k < n; ++k) {
    if (f >> k & 1U) continue;
    const std::uint64_t t = f | (std::uint64_t{1} << k);
    std::vector<std::uint64_t> members;
    for (auto r : rows)
      if (std::popcount(r) == 3 && detail::inside(r, t)) members.push_back(r);
    if (members.size() < 4) continue;
    if (reading == Pattern3Reading::CommonFourSet) return true;
    // Four distinct 3-subsets of a 4-set meet pairwise in exactly two.
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.size() >= 4) return true;
  }
  return false;
}

/// For a weight-four first row: a second row with the same
/// support and a weight-two row inside it.
inline bool pattern4_twin_with_inner_pair(const RowFamily& rows) {
  const std::uint64_t f = rows.at(0);
  bool twin = false, pair = false;
  for (std::size_t j = 1; j < rows.size(); ++j) {
    if (rows[j] == f) twin = true;
    if (std::popcount(rows[j]) == 2 && detail::inside(rows[j], f)) pair = true;
  }
  return twin && pair;
}

/// At least four rows (the first included) of weight >= 3.
inline bool pattern4_four_heavy_rows(const RowFamily& rows) { return detail::rows_with_weight_at_least(rows, 3) >= 4; }

/// All 6x6 row families passing the unitary check with first row 111000
/// and every row of weight <= 3 that match neither closing shape.
inline LemmaScanResult lemma_pattern3_scan(const LemmaScanOptions& opts = {}) {
  constexpr int n = 6;
  const std::uint64_t first = 0b000111;
  const auto group = detail::stabilizer(first, n);
  LemmaScanResult out;
  std::set<RowFamily> orbits, bad;
  detail::scan_families(first, n, 3, opts.budget, out.nodes, [&](const RowFamily& rows) {
    ++out.families;
    const auto canon = detail::canonical_family(rows, group);
    orbits.insert(canon);
    if (!pattern3_twin_with_inner_row(rows) && !pattern3_four_set_cluster(rows, n, opts.reading)) bad.insert(canon);
  });
  out.orbits = orbits.size();
  out.counterexamples.assign(bad.begin(), bad.end());
  return out;
}

/// Same scan with first row 111100 and every row of weight <= 4; also
/// records families with fewer than four rows of weight two or more.
inline LemmaScanResult lemma_pattern4_scan(const LemmaScanOptions& opts = {}) {
  constexpr int n = 6;
  const std::uint64_t first = 0b001111;
  const auto group = detail::stabilizer(first, n);
  LemmaScanResult out;
  std::set<RowFamily> orbits, bad, thin;
  detail::scan_families(first, n, 4, opts.budget, out.nodes, [&](const RowFamily& rows) {
    ++out.families;
    const auto canon = detail::canonical_family(rows, group);
    orbits.insert(canon);
    if (!pattern4_twin_with_inner_pair(rows) && !pattern4_four_heavy_rows(rows)) bad.insert(canon);
    if (detail::rows_with_weight_at_least(rows, 2) < 4) thin.insert(canon);
  });
  out.orbits = orbits.size();
  out.counterexamples.assign(bad.begin(), bad.end());
  out.closing_claim_violations.assign(thin.begin(), thin.end());
  return out;
}

/// Rows as bitstrings, coordinate 1 first.
inline std::vector<std::string> family_strings(const RowFamily& rows, int n = 6) {
  std::vector<std::string> out;
  for (auto r : rows) out.push_back(SupportPattern(n, r).str());
  return out;
}

}  // namespace qlsforge
