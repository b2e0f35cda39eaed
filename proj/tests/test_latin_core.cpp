#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "qlsforge/clique.hpp"
#include "qlsforge/exact_cover.hpp"
#include "qlsforge/latin_algorithms.hpp"
#include "qlsforge/latin_square.hpp"

using namespace qlsforge;

namespace {

std::size_t naive_transversals(const LatinSquare& ls) {
  const int n = ls.order();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t count = 0;
  do {
    std::set<int> symbols;
    for (int r = 0; r < n; ++r) symbols.insert(ls.at(r, perm[static_cast<std::size_t>(r)]));
    if (static_cast<int>(symbols.size()) == n) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

std::size_t naive_subsquares(const LatinSquare& ls, int k) {
  const int n = ls.order();
  std::size_t count = 0;
  for (int mask_r = 0; mask_r < (1 << n); ++mask_r) {
    if (__builtin_popcount(static_cast<unsigned>(mask_r)) != k) continue;
    for (int mask_c = 0; mask_c < (1 << n); ++mask_c) {
      if (__builtin_popcount(static_cast<unsigned>(mask_c)) != k) continue;
      std::set<int> symbols;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if ((mask_r >> r & 1) && (mask_c >> c & 1)) symbols.insert(ls.at(r, c));
      if (static_cast<int>(symbols.size()) == k) ++count;
    }
  }
  return count;
}

Permutation random_permutation(int n, std::mt19937_64& rng) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

int naive_clique_number(const SimpleGraph& g) {
  int best = 0;
  const int n = g.vertex_count();
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s)
    if (g.is_clique(s)) best = std::max(best, std::popcount(s));
  return best;
}

LatinSquare klein_square() { return LatinSquare::from_rows({"1234", "2143", "3412", "4321"}); }

}  // namespace

TEST(LatinSquare, RejectsRepeatedSymbolInRow) {
  try {
    LatinSquare::from_rows({"12", "22"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotLatin);
  }
}

TEST(LatinSquare, ParsesEveryTextForm) {
  const auto a = parse_latin_square("1 2 3\n2 3 1\n3 1 2\n");
  const auto b = parse_latin_square("123\n231\n312\n");
  const auto c = parse_latin_square("123231312");
  const auto d = parse_latin_square("0 1 2\n1 2 0\n2 0 1\n");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(a, d);
  EXPECT_EQ(parse_latin_square(a.to_text()), a);
}

TEST(LatinSquare, ParseErrorsCarryKinds) {
  auto kind_of = [](const std::string& text) {
    try {
      parse_latin_square(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Contradiction;
  };
  EXPECT_EQ(kind_of(""), ErrorKind::NotSquare);
  EXPECT_EQ(kind_of("12\n2"), ErrorKind::NotSquare);
  EXPECT_EQ(kind_of("19\n91"), ErrorKind::BadSymbol);
  EXPECT_EQ(kind_of("11\n22"), ErrorKind::NotLatin);
}

TEST(LatinSquare, IsotopyRejectsWrongLengths) {
  const auto ls = cyclic_square(3);
  EXPECT_THROW(apply_isotopy(ls, {0, 1}, {0, 1, 2}, {0, 1, 2}), Error);
  EXPECT_THROW(apply_isotopy(ls, {0, 0, 1}, {0, 1, 2}, {0, 1, 2}), Error);
}

TEST(LatinSquare, ConjugatesAreLatinAndTransposeIsInvolution) {
  for (const auto& ls : catalog_main_classes()) {
    for (const auto& roles : all_role_permutations()) EXPECT_NO_THROW(conjugate(ls, roles));
    EXPECT_EQ(transpose(transpose(ls)), ls);
  }
}

TEST(Catalog, HasTwelvePairwiseDistinctMainClasses) {
  const auto& cat = catalog_main_classes();
  ASSERT_EQ(cat.size(), 12U);
  std::set<MainClassFingerprint> seen;
  for (const auto& ls : cat) {
    EXPECT_EQ(ls.order(), 6);
    seen.insert(main_class_fingerprint(ls));
  }
  EXPECT_EQ(seen.size(), 12U);
}

TEST(Catalog, TransversalCountsMatchPermutationOracle) {
  for (const auto& ls : catalog_main_classes()) {
    EXPECT_EQ(count_transversals(ls), naive_transversals(ls));
    EXPECT_EQ(enumerate_transversals(ls).size(), naive_transversals(ls));
  }
}

TEST(Catalog, SubsquareCountsMatchBlockOracle) {
  for (const auto& ls : catalog_main_classes())
    for (int k = 1; k <= 3; ++k) EXPECT_EQ(find_subsquares(ls, k).size(), naive_subsquares(ls, k)) << ls.to_compact();
}

TEST(Catalog, FourSquaresHaveOrderThreeSubsquares) {
  std::vector<int> with;
  const auto& cat = catalog_main_classes();
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (!find_subsquares(cat[i], 3).empty()) with.push_back(static_cast<int>(i) + 1);
  EXPECT_EQ(with, (std::vector<int>{1, 3, 5, 12}));
}

TEST(Catalog, FingerprintSurvivesRandomParatopies) {
  std::mt19937_64 rng(11);
  const auto& cat = catalog_main_classes();
  for (std::size_t i = 0; i < cat.size(); ++i) {
    for (int trial = 0; trial < 3; ++trial) {
      auto ls = apply_isotopy(cat[i], random_permutation(6, rng), random_permutation(6, rng), random_permutation(6, rng));
      ls = conjugate(ls, all_role_permutations()[rng() % 6]);
      EXPECT_EQ(identify_main_class(ls), static_cast<int>(i) + 1);
    }
  }
}

TEST(Mate, NoCatalogSquareHasOne) {
  for (const auto& ls : catalog_main_classes()) EXPECT_FALSE(find_orthogonal_mate(ls).has_value());
}

TEST(Mate, SmallSquaresWithMates) {
  for (const auto& ls : {cyclic_square(3), klein_square(), cyclic_square(5)}) {
    const auto m = find_orthogonal_mate(ls);
    ASSERT_TRUE(m.has_value());
    EXPECT_TRUE(are_orthogonal(ls, *m));
  }
  EXPECT_FALSE(find_orthogonal_mate(cyclic_square(4)).has_value());
  EXPECT_FALSE(find_orthogonal_mate(cyclic_square(2)).has_value());
}

TEST(ExactCover, FindsAllCoversOfSmallInstance) {
  ExactCover ec(3);
  ec.add_row({0});
  ec.add_row({1, 2});
  ec.add_row({0, 1});
  ec.add_row({2});
  auto sols = ec.all_solutions();
  for (auto& s : sols) std::sort(s.begin(), s.end());
  std::sort(sols.begin(), sols.end());
  EXPECT_EQ(sols, (std::vector<std::vector<int>>{{0, 1}, {2, 3}}));
}

TEST(LatinSquareGraph, StronglyRegularWithCliqueNumberSix) {
  for (const auto& ls : catalog_main_classes()) {
    const auto g = latin_square_graph(ls);
    ASSERT_EQ(g.vertex_count(), 36);
    for (int v = 0; v < 36; ++v) {
      EXPECT_EQ(g.degree(v), 15);
      for (int u = v + 1; u < 36; ++u) {
        int common = 0;
        for (int w = 0; w < 36; ++w) common += g.adjacent(v, w) && g.adjacent(u, w);
        EXPECT_EQ(common, 6);
      }
    }
    EXPECT_TRUE(has_clique(g, 6));
    EXPECT_FALSE(has_clique(g, 7));
    EXPECT_EQ(clique_number(g), 6);
  }
}

TEST(Clique, MatchesSubsetOracleOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 9);
    SimpleGraph g(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng() % 100 < 55) g.add_edge(u, v);
    const int w = naive_clique_number(g);
    EXPECT_EQ(clique_number(g), w);
    const auto k = find_clique(g.rows(), g.all(), w);
    ASSERT_TRUE(k.has_value());
    EXPECT_TRUE(g.is_clique(*k));
    EXPECT_FALSE(find_clique(g.rows(), g.all(), w + 1).has_value());
  }
}

TEST(SimpleGraph, SerializationRoundTrips) {
  const auto g = latin_square_graph(catalog_main_classes()[3]);
  EXPECT_EQ(SimpleGraph::parse(g.serialize()), g);
  EXPECT_THROW(SimpleGraph::parse("2\n01\n00\n"), Error);
  EXPECT_THROW(SimpleGraph(65), Error);
}

TEST(SimpleGraph, ComplementAndRelabel) {
  const auto g = latin_square_graph(cyclic_square(3));
  const auto c = g.complement();
  EXPECT_EQ(g.edge_count() + c.edge_count(), 36U);
  std::vector<int> perm(9);
  std::iota(perm.rbegin(), perm.rend(), 0);
  EXPECT_EQ(g.relabel(perm).edge_count(), g.edge_count());
  EXPECT_EQ(graph_invariant_hash(g.relabel(perm)), graph_invariant_hash(g));
}
