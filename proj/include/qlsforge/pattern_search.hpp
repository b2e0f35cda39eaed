#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qlsforge/clique.hpp"
#include "qlsforge/error.hpp"
#include "qlsforge/pattern.hpp"

namespace qlsforge {

/// Domains are bitmasks over patterns: bit p is set iff the pattern with
/// bits p (p in 1..2^n-1) is still admissible. Needs n <= 6.
using PatternDomain = std::uint64_t;
/// Set of cells of one square (n*n <= 36), bit r*n+c.
using CellMask = std::uint64_t;

inline constexpr int kMaxSearchOrder = 6;

/// Lookup tables over the 2^n patterns of length n.
struct PatternTables {
  int n = 0;
  PatternDomain nonempty = 0;
  std::array<PatternDomain, 64> compatible{};  // q with |p & q| != 1
  std::array<PatternDomain, 64> subsets{};     // nonempty q with q inside S
  std::array<PatternDomain, 64> meets{};       // q with q & S nonempty

  static const PatternTables& get(int n) {
    static const std::array<PatternTables, kMaxSearchOrder + 1> tables = [] {
      std::array<PatternTables, kMaxSearchOrder + 1> t{};
      for (int m = 1; m <= kMaxSearchOrder; ++m) t[m] = build(m);
      return t;
    }();
    if (n < 1 || n > kMaxSearchOrder) throw Error(ErrorKind::DimensionMismatch, "pattern search supports 1 <= n <= 6");
    return tables[n];
  }

 private:
  static PatternTables build(int n) {
    PatternTables t;
    t.n = n;
    const int count = 1 << n;
    for (int p = 1; p < count; ++p) t.nonempty |= PatternDomain{1} << p;
    for (int p = 0; p < count; ++p)
      for (int q = 1; q < count; ++q) {
        const PatternDomain qb = PatternDomain{1} << q;
        if (std::popcount(static_cast<unsigned>(p & q)) != 1) t.compatible[p] |= qb;
        if ((q & ~p) == 0) t.subsets[p] |= qb;
        if (q & p) t.meets[p] |= qb;
      }
    return t;
  }
};

/// Pattern-level state of t candidate mutually orthogonal quantum Latin
/// squares of order n. Besides the cell domains it tracks, per square,
/// which cell pairs are known orthogonal, known non-orthogonal, and known
/// parallel (equal up to a scalar).
struct PatternSearchState {
  int squares = 0;
  int order = 0;
  /// Restrict square 0's first column (rows 2..n) to nondecreasing
  /// patterns; valid because permuting rows 2..n is a symmetry.
  bool break_row_symmetry = false;
  std::vector<PatternDomain> domains;
  std::vector<CellMask> orthogonal;
  std::vector<CellMask> non_orthogonal;
  std::vector<CellMask> parallel;

  int cells() const { return order * order; }
  std::size_t index(int square, int cell) const { return static_cast<std::size_t>(square * cells() + cell); }
  PatternDomain domain(int square, int row, int col) const { return domains[index(square, row * order + col)]; }

  bool complete() const {
    return std::all_of(domains.begin(), domains.end(), [](PatternDomain d) { return std::popcount(d) == 1; });
  }

  /// Single pattern of a decided cell.
  int value(int square, int cell) const { return std::countr_zero(domains[index(square, cell)]); }

  std::vector<PatternMatrix> assignment() const {
    std::vector<PatternMatrix> out;
    for (int s = 0; s < squares; ++s) {
      std::vector<SupportPattern> cells_out;
      for (int c = 0; c < cells(); ++c) {
        if (std::popcount(domains[index(s, c)]) != 1)
          throw Error(ErrorKind::PreconditionViolated, "assignment of an undecided state");
        cells_out.emplace_back(order, static_cast<std::uint64_t>(value(s, c)));
      }
      out.emplace_back(order, std::move(cells_out));
    }
    return out;
  }

  friend bool operator==(const PatternSearchState&, const PatternSearchState&) = default;
};

/// First rows fixed to the computational basis, all other domains full,
/// same-row and same-column pairs marked orthogonal.
inline PatternSearchState init_standard_form(int t, int n) {
  if (t < 1) throw Error(ErrorKind::PreconditionViolated, "need at least one square");
  const auto& tab = PatternTables::get(n);
  PatternSearchState st;
  st.squares = t;
  st.order = n;
  const int nn = n * n;
  st.domains.assign(static_cast<std::size_t>(t * nn), tab.nonempty);
  st.orthogonal.assign(static_cast<std::size_t>(t * nn), 0);
  st.non_orthogonal.assign(static_cast<std::size_t>(t * nn), 0);
  st.parallel.assign(static_cast<std::size_t>(t * nn), 0);
  for (int s = 0; s < t; ++s) {
    for (int c = 0; c < n; ++c) st.domains[st.index(s, c)] = PatternDomain{1} << (1 << c);
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b)
        if (a != b && (a / n == b / n || a % n == b % n)) st.orthogonal[st.index(s, a)] |= CellMask{1} << b;
  }
  return st;
}

/// Deduction counters; `steps` is what the search budget is charged in.
struct PropagationStats {
  std::uint64_t steps = 0;
};

namespace detail {

class Propagator {
 public:
  Propagator(PatternSearchState& st, PropagationStats& stats)
      : st_(st), stats_(stats), tab_(PatternTables::get(st.order)), n_(st.order), nn_(st.order * st.order) {
    for (int i = 0; i < n_; ++i) {
      std::vector<int> row, col;
      for (int j = 0; j < n_; ++j) {
        row.push_back(i * n_ + j);
        col.push_back(j * n_ + i);
      }
      lines_.push_back(row);
      lines_.push_back(col);
    }
  }

  /// Runs every rule to a fixpoint; returns the contradiction, if any.
  std::optional<std::string> run() {
    if (auto c = check_domains()) return c;
    do {
      changed_ = false;
      ++stats_.steps;
      for (int s = 0; s < st_.squares && !contradiction_; ++s) {
        arc_consistency(s);
        decided_pair_facts(s);
        forced_parallel(s);
        line_rules(s);
        subset_rank(s);
      }
      if (!contradiction_) cross_square();
      if (!contradiction_ && st_.break_row_symmetry) row_symmetry();
      if (!contradiction_) conflict_check();
    } while (changed_ && !contradiction_);
    return contradiction_;
  }

 private:
  PatternDomain& dom(int s, int c) { return st_.domains[st_.index(s, c)]; }
  CellMask& orth(int s, int c) { return st_.orthogonal[st_.index(s, c)]; }
  CellMask& nonorth(int s, int c) { return st_.non_orthogonal[st_.index(s, c)]; }
  static bool decided(PatternDomain d) { return std::popcount(d) == 1; }
  static int value(PatternDomain d) { return std::countr_zero(d); }

  void fail(std::string why) {
    if (!contradiction_) contradiction_ = std::move(why);
  }

  std::optional<std::string> check_domains() {
    for (int s = 0; s < st_.squares; ++s)
      for (int c = 0; c < nn_; ++c)
        if (dom(s, c) == 0) return "empty domain";
    return std::nullopt;
  }

  void restrict(int s, int c, PatternDomain mask) {
    PatternDomain& d = dom(s, c);
    const PatternDomain next = d & mask;
    if (next == d) return;
    d = next;
    changed_ = true;
    if (next == 0) fail("empty domain in square " + std::to_string(s + 1) + " cell " + cell_name(c));
  }

  void add_fact(std::vector<CellMask>& rel, int s, int a, int b) {
    CellMask& ra = rel[st_.index(s, a)];
    if (ra >> b & 1U) return;
    ra |= CellMask{1} << b;
    rel[st_.index(s, b)] |= CellMask{1} << a;
    changed_ = true;
  }

  std::string cell_name(int c) const {
    return "(" + std::to_string(c / n_ + 1) + "," + std::to_string(c % n_ + 1) + ")";
  }

  // Orthogonal cells cannot have supports meeting in exactly one coordinate.
  void arc_consistency(int s) {
    for (int a = 0; a < nn_ && !contradiction_; ++a) {
      PatternDomain allowed = 0;
      for_each_bit(dom(s, a), [&](int p) { allowed |= tab_.compatible[p]; });
      for_each_bit(orth(s, a), [&](int b) { restrict(s, b, allowed); });
    }
  }

  // Decided pairs: disjoint supports are orthogonal, a single shared
  // coordinate makes them non-orthogonal.
  void decided_pair_facts(int s) {
    for (int a = 0; a < nn_; ++a) {
      const PatternDomain da = dom(s, a);
      if (!decided(da)) continue;
      for (int b = a + 1; b < nn_; ++b) {
        const PatternDomain db = dom(s, b);
        if (!decided(db)) continue;
        const int overlap = std::popcount(static_cast<unsigned>(value(da) & value(db)));
        if (overlap == 0) add_fact(st_.orthogonal, s, a, b);
        else if (overlap == 1) add_fact(st_.non_orthogonal, s, a, b);
      }
    }
  }

  // Two cells with the same weight-two support {p,q}, both orthogonal to a
  // cell whose support meets {p,q}, are proportional.
  void forced_parallel(int s) {
    for (int a = 0; a < nn_; ++a) {
      const PatternDomain da = dom(s, a);
      if (!decided(da) || std::popcount(static_cast<unsigned>(value(da))) != 2) continue;
      const int support = value(da);
      for (int b = a + 1; b < nn_; ++b) {
        if (dom(s, b) != da) continue;
        if (st_.parallel[st_.index(s, a)] >> b & 1U) continue;
        const CellMask witnesses = orth(s, a) & orth(s, b);
        bool forced = false;
        for_each_bit(witnesses, [&](int c) {
          if ((dom(s, c) & ~tab_.meets[support]) == 0) forced = true;
        });
        if (forced) {
          add_fact(st_.parallel, s, a, b);
          add_fact(st_.non_orthogonal, s, a, b);
        }
      }
    }
  }

  void line_rules(int s) {
    for (const auto& line : lines_) {
      if (contradiction_) return;
      // Every coordinate is covered by some vector of an orthonormal basis.
      for (int k = 0; k < n_; ++k) {
        const PatternDomain with_k = tab_.meets[1 << k];
        int holders = 0, last = -1;
        for (int c : line)
          if (dom(s, c) & with_k) {
            ++holders;
            last = c;
          }
        if (holders == 0) return fail("coordinate " + std::to_string(k + 1) + " uncovered in a line");
        if (holders == 1) restrict(s, last, with_k);
      }
      // At most |S| basis vectors live in the span of S; exactly |S| of
      // them fill it, pushing every other vector of the line off S.
      for (int S = 1; S < (1 << n_); ++S) {
        const int size = std::popcount(static_cast<unsigned>(S));
        int inside = 0;
        for (int c : line)
          if ((dom(s, c) & ~tab_.subsets[S]) == 0) ++inside;
        if (inside > size) return fail("line over-fills a coordinate subspace");
        if (inside == size && size < n_)
          for (int c : line)
            if ((dom(s, c) & ~tab_.subsets[S]) != 0) restrict(s, c, ~tab_.meets[S]);
      }
      bool full = true;
      std::vector<std::uint64_t> bits;
      for (int c : line) {
        if (!decided(dom(s, c))) {
          full = false;
          break;
        }
        bits.push_back(static_cast<std::uint64_t>(value(dom(s, c))));
      }
      if (full && !combinatorial_unitary_check(bits, n_)) return fail("line is not a unitary pattern");
    }
  }

  // Any family of pairwise orthogonal cells supported inside S has at most |S| members.
  void subset_rank(int s) {
    if (contradiction_) return;
    const std::span<const VertexMask> adj(&st_.orthogonal[st_.index(s, 0)], static_cast<std::size_t>(nn_));
    for (int S = 1; S < (1 << n_); ++S) {
      const int size = std::popcount(static_cast<unsigned>(S));
      CellMask inside = 0;
      for (int c = 0; c < nn_; ++c)
        if ((dom(s, c) & ~tab_.subsets[S]) == 0) inside |= CellMask{1} << c;
      if (popcount(inside) <= size) continue;
      if (find_clique(adj, inside, size + 1)) return fail("orthogonal family exceeds its coordinate span");
    }
  }

  // Tensor products of distinct cells are orthogonal, so a pair that is not
  // orthogonal in one square is orthogonal in every other square.
  void cross_square() {
    for (int s = 0; s < st_.squares; ++s)
      for (int a = 0; a < nn_; ++a)
        for_each_bit(nonorth(s, a), [&](int b) {
          if (b < a) return;
          for (int o = 0; o < st_.squares; ++o)
            if (o != s) add_fact(st_.orthogonal, o, a, b);
        });
  }

  void row_symmetry() {
    for (int r = 1; r + 1 < n_; ++r) {
      const int c0 = r * n_, c1 = (r + 1) * n_;
      const PatternDomain lo = dom(0, c0), hi = dom(0, c1);
      if (!lo || !hi) return;
      const int min_lo = std::countr_zero(lo);
      const int max_hi = 63 - std::countl_zero(hi);
      restrict(0, c1, ~((PatternDomain{1} << min_lo) - 1));
      restrict(0, c0, max_hi == 63 ? ~PatternDomain{0} : ((PatternDomain{1} << (max_hi + 1)) - 1));
    }
  }

  void conflict_check() {
    for (int s = 0; s < st_.squares; ++s)
      for (int a = 0; a < nn_; ++a)
        if (orth(s, a) & nonorth(s, a)) {
          const int b = std::countr_zero(orth(s, a) & nonorth(s, a));
          return fail("cells " + cell_name(a) + " and " + cell_name(b) + " of square " + std::to_string(s + 1) +
                      " both orthogonal and non-orthogonal");
        }
    // Non-orthogonal in two squares at once breaks orthogonality of the tensor products.
    for (int s = 0; s < st_.squares; ++s)
      for (int o = s + 1; o < st_.squares; ++o)
        for (int a = 0; a < nn_; ++a)
          if (nonorth(s, a) & nonorth(o, a)) return fail("tensor products of two cells not orthogonal");
  }

  PatternSearchState& st_;
  PropagationStats& stats_;
  const PatternTables& tab_;
  int n_, nn_;
  std::vector<std::vector<int>> lines_;
  bool changed_ = false;
  std::optional<std::string> contradiction_;
};

}  // namespace detail

/// Outcome of propagation: the fixpoint state, or the contradiction found.
struct PropagationResult {
  std::optional<PatternSearchState> state;
  std::string contradiction;

  bool ok() const { return state.has_value(); }
};

/// In-place fixpoint; returns the contradiction message if one is reached.
inline std::optional<std::string> propagate_in_place(PatternSearchState& st, PropagationStats& stats) {
  return detail::Propagator(st, stats).run();
}

/// Least fixpoint of the deduction rules. Domains only shrink and facts
/// only grow; applying it twice changes nothing.
inline PropagationResult propagate(const PatternSearchState& state) {
  PatternSearchState st = state;
  PropagationStats stats;
  if (auto c = propagate_in_place(st, stats)) return {std::nullopt, *c};
  return {std::move(st), {}};
}

/// Canonical representative of an assignment (t squares, n*n cells each,
/// pattern values) under: permutations of rows 2..n; a column permutation
/// together with the same relabelling of coordinates; permuting squares.
inline std::vector<std::uint8_t> canonical_assignment(const std::vector<std::uint8_t>& cells, int t, int n) {
  const int nn = n * n;
  std::vector<int> rows(static_cast<std::size_t>(n - 1 > 0 ? n - 1 : 0));
  std::vector<int> cols(static_cast<std::size_t>(n));
  std::vector<int> squares(static_cast<std::size_t>(t));
  std::iota(squares.begin(), squares.end(), 0);
  std::vector<std::uint8_t> best = cells, img(cells.size());
  std::vector<int> relabel(static_cast<std::size_t>(1 << n));
  std::iota(cols.begin(), cols.end(), 0);
  do {
    for (int p = 0; p < (1 << n); ++p) {
      int q = 0;
      for (int k = 0; k < n; ++k)
        if (p >> k & 1) q |= 1 << cols[k];
      relabel[p] = q;
    }
    std::iota(rows.begin(), rows.end(), 1);
    do {
      std::sort(squares.begin(), squares.end());
      do {
        for (int s = 0; s < t; ++s)
          for (int r = 0; r < n; ++r) {
            const int r2 = r == 0 ? 0 : rows[r - 1];
            for (int c = 0; c < n; ++c)
              img[static_cast<std::size_t>(s * nn + r2 * n + cols[c])] =
                  static_cast<std::uint8_t>(relabel[cells[static_cast<std::size_t>(squares[s] * nn + r * n + c)]]);
          }
        if (img < best) best = img;
      } while (std::next_permutation(squares.begin(), squares.end()));
    } while (std::next_permutation(rows.begin(), rows.end()));
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

inline std::vector<std::uint8_t> encode_assignment(const std::vector<PatternMatrix>& squares) {
  std::vector<std::uint8_t> out;
  for (const auto& pm : squares)
    for (const auto& c : pm.cells()) out.push_back(static_cast<std::uint8_t>(c.bits()));
  return out;
}

inline std::vector<PatternMatrix> decode_assignment(const std::vector<std::uint8_t>& cells, int t, int n) {
  std::vector<PatternMatrix> out;
  for (int s = 0; s < t; ++s) {
    std::vector<SupportPattern> v;
    for (int c = 0; c < n * n; ++c) v.emplace_back(n, cells[static_cast<std::size_t>(s * n * n + c)]);
    out.emplace_back(n, std::move(v));
  }
  return out;
}

struct PatternSearchOptions {
  std::uint64_t budget = 100'000'000;
  bool break_row_symmetry = true;
};

struct PatternSearchResult {
  /// One canonical representative per symmetry class, sorted.
  std::vector<std::vector<PatternMatrix>> survivors;
  /// Every surviving leaf of the search (after row-symmetry breaking).
  std::vector<std::vector<PatternMatrix>> raw;
  std::uint64_t nodes = 0;
  std::uint64_t steps = 0;

  bool all_classical() const {
    for (const auto& sq : raw)
      for (const auto& pm : sq)
        if (!pm.all_weight_one()) return false;
    return true;
  }
};

/// Depth-first search over standard-form pattern assignments of t squares
/// of order n, propagating at every node. Throws ResourceLimit when the
/// step budget runs out.
inline PatternSearchResult search_moqls_patterns(int t, int n, const PatternSearchOptions& opts = {}) {
  PatternSearchResult result;
  PropagationStats stats;
  PatternSearchState root = init_standard_form(t, n);
  root.break_row_symmetry = opts.break_row_symmetry;
  std::vector<std::vector<std::uint8_t>> leaves;

  auto charge = [&] {
    if (stats.steps + result.nodes > opts.budget)
      throw Error(ErrorKind::ResourceLimit, "pattern search budget of " + std::to_string(opts.budget) + " exceeded");
  };

  auto dfs = [&](auto&& self, PatternSearchState& st) -> void {
    ++result.nodes;
    charge();
    if (propagate_in_place(st, stats)) return;
    int pick = -1, best = 65;
    for (std::size_t i = 0; i < st.domains.size(); ++i) {
      const int size = std::popcount(st.domains[i]);
      if (size > 1 && size < best) {
        best = size;
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) {
      leaves.push_back(encode_assignment(st.assignment()));
      return;
    }
    for_each_bit(st.domains[static_cast<std::size_t>(pick)], [&](int p) {
      PatternSearchState child = st;
      child.domains[static_cast<std::size_t>(pick)] = PatternDomain{1} << p;
      self(self, child);
    });
  };
  dfs(dfs, root);
  result.steps = stats.steps;

  std::sort(leaves.begin(), leaves.end());
  std::set<std::vector<std::uint8_t>> classes;
  for (const auto& leaf : leaves) {
    result.raw.push_back(decode_assignment(leaf, t, n));
    classes.insert(canonical_assignment(leaf, t, n));
  }
  for (const auto& c : classes) result.survivors.push_back(decode_assignment(c, t, n));
  return result;
}

}  // namespace qlsforge
