#include <gtest/gtest.h>

#include <cmath>

#include "qlsforge/latin_square.hpp"
#include "qlsforge/qls_io.hpp"
#include "qlsforge/qls_numeric.hpp"

using namespace qlsforge;

namespace {

// Worst |<u_i, u_j> - delta_ij| over a family, computed pair by pair.
double pairwise_deviation(const std::vector<ComplexVector>& vs) {
  double worst = 0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const Complex ip = vs[i].dot(vs[j]);
      worst = std::max(worst, std::abs(ip - Complex(i == j ? 1.0 : 0.0)));
    }
  return worst;
}

LatinSquare mols3_a() { return LatinSquare::from_rows({"123", "231", "312"}); }
LatinSquare mols3_b() { return LatinSquare::from_rows({"123", "312", "231"}); }

MoqlsPair scramble(const MoqlsPair& p, std::uint64_t seed) {
  const int n = p.first.order();
  return {apply_unitary(p.first, random_unitary(n, seed)), apply_unitary(p.second, random_unitary(n, seed + 1))};
}

}  // namespace

TEST(Order9, PairIsOrthogonalWithOnlyOneNonClassicalSquare) {
  const auto p = order9_example();
  const auto r = validate_orthogonal_pair(p);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.deviation, 1e-9);
  EXPECT_TRUE(validate_qls(p.first).pass);
  EXPECT_TRUE(validate_qls(p.second).pass);
  EXPECT_TRUE(classical_part(p.first).has_value());
  EXPECT_FALSE(classical_part(p.second).has_value());
  int w1 = 0, w2 = 0;
  const auto pattern = extract_pattern(p.second);
  for (const auto& c : pattern.cells()) (weight(c) == 1 ? w1 : w2) += 1;
  EXPECT_EQ(w1, 75);
  EXPECT_EQ(w2, 6);
}

TEST(Order9, GramDeviationAgreesWithPairwiseInnerProducts) {
  const auto p = order9_example();
  std::vector<ComplexVector> products;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      ComplexVector t(81);
      for (int i = 0; i < 9; ++i) t.segment(i * 9, 9) = p.first.at(r, c)(i) * p.second.at(r, c);
      products.push_back(t);
    }
  EXPECT_NEAR(validate_orthogonal_pair(p).deviation, pairwise_deviation(products), 1e-14);
}

TEST(Order9, EveryCellPairIsOrthogonalInSomeSquare) {
  const auto p = order9_example();
  for (int a = 0; a < 81; ++a)
    for (int b = a + 1; b < 81; ++b) {
      const double x = std::abs(p.first.entries()[a].dot(p.first.entries()[b]));
      const double y = std::abs(p.second.entries()[a].dot(p.second.entries()[b]));
      EXPECT_LT(std::min(x, y), 1e-12);
    }
}

TEST(StandardForm, RestoresBasisFirstRowsAndKeepsTheVerdict) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto scrambled = scramble(order9_example(), seed);
    EXPECT_TRUE(validate_orthogonal_pair(scrambled).pass);
    const auto std_form = to_standard_form(scrambled);
    for (const auto* q : {&std_form.first, &std_form.second})
      for (int k = 0; k < 9; ++k) EXPECT_LT((q->at(0, k) - basis_vector(9, k)).norm(), 1e-12);
    EXPECT_TRUE(validate_orthogonal_pair(std_form).pass);
  }
}

TEST(StandardForm, RejectsInvalidPairs) {
  auto p = order9_example();
  p.second.at(0, 0) = p.second.at(0, 1);
  EXPECT_THROW(to_standard_form(p), Error);
  MoqlsPair mixed{from_latin_square(mols3_a()), order4_example()};
  EXPECT_THROW(to_standard_form(mixed), Error);
  EXPECT_THROW(validate_orthogonal_pair(mixed), Error);
}

TEST(Order4, PatternAndClassicalization) {
  const auto q = order4_example();
  EXPECT_TRUE(validate_qls(q).pass);
  EXPECT_EQ(extract_pattern(q).serialize(), "1000 0100 0010 0001\n0100 1000 0001 0010\n0010 0001 1100 1100\n0001 0010 1100 1100\n");
  const auto r = classicalize_weight_le2_traced(q);
  EXPECT_LE(r.iterations, 2);
  const auto check = validate_qls(r.square);
  EXPECT_LT(check.deviation, 1e-12);
  const auto ls = classical_part(r.square);
  ASSERT_TRUE(ls.has_value());
  EXPECT_EQ(*ls, LatinSquare::from_rows({"1234", "2143", "3412", "4321"}));
}

TEST(Classicalize, ClassicalInputIsUnchanged) {
  const auto q = from_latin_square(mols3_a());
  const auto r = classicalize_weight_le2_traced(q);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(*classical_part(r.square), mols3_a());
}

TEST(Classicalize, WeightThreeIsRejected) {
  const auto f = random_unitary(3, 4);
  const auto q = apply_unitary(from_latin_square(mols3_a()), f);
  try {
    classicalize_weight_le2(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WeightTooHigh);
  }
}

TEST(Entangled, ClassicalMolsPass) {
  const auto e = from_classical_mols(mols3_a(), mols3_b());
  const auto r = check_entangled_pair(e);
  EXPECT_TRUE(r.pass());
  EXPECT_LT(r.rows.deviation, 1e-12);
  EXPECT_LT(r.columns.deviation, 1e-12);
}

TEST(Entangled, NonOrthogonalPairFailsTheBasisCondition) {
  const auto e = from_classical_mols(mols3_a(), mols3_a());
  const auto r = check_entangled_pair(e);
  EXPECT_FALSE(r.basis.pass);
  EXPECT_GT(r.basis.deviation, 0.5);
}

TEST(PartialTrace, MatchesProductStates) {
  const auto u = random_unitary(3, 8), v = random_unitary(3, 9);
  const ComplexVector a = u.col(0), b = v.col(1);
  ComplexVector ab(9);
  for (int i = 0; i < 3; ++i) ab.segment(i * 3, 3) = a(i) * b;
  const ComplexMatrix rho = ab * ab.adjoint();
  EXPECT_LT((partial_trace(rho, Subsystem::First) - b * b.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((partial_trace(rho, Subsystem::Second) - a * a.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(partial_trace(ComplexMatrix::Identity(5, 5), Subsystem::First), Error);
  EXPECT_THROW(partial_trace(ComplexMatrix::Identity(4, 3), Subsystem::First), Error);
}

TEST(RandomUnitary, IsUnitaryAndSeeded) {
  const auto u = random_unitary(6, 42);
  EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(u.isApprox(random_unitary(6, 42)));
  EXPECT_FALSE(u.isApprox(random_unitary(6, 43)));
}

TEST(Tripartite, RanksAddUp) {
  const auto u = random_unitary(4, 5);
  std::vector<ComplexVector> x{u.col(0)}, y{u.col(1), u.col(2)}, z{u.col(3), 2.0 * u.col(3)};
  const auto r = tripartite_dim_check(x, y, z);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.rank_all, 4);
  EXPECT_EQ(r.rank_z, 1);
  std::vector<ComplexVector> bad{u.col(1)};
  EXPECT_THROW(tripartite_dim_check(x, y, bad), Error);
}

TEST(Validate, DetectsBrokenRow) {
  auto q = from_latin_square(mols3_a());
  q.at(1, 1) = q.at(1, 0);
  const auto r = validate_qls(q);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.deviation, 1.0, 1e-12);
}

TEST(QlsIo, RoundTripsAllKinds) {
  const auto p = order9_example();
  const auto back = moqls_from_json(parse_json_text(to_json(p).dump()));
  EXPECT_LT(validate_orthogonal_pair(back).deviation, 1e-9);
  for (int k = 0; k < 81; ++k) EXPECT_LT((back.second.entries()[k] - p.second.entries()[k]).norm(), 1e-15);
  const auto q = qls_from_json(to_json(order4_example()));
  EXPECT_TRUE(validate_qls(q).pass);
  const auto e = entangled_from_json(to_json(from_classical_mols(mols3_a(), mols3_b())));
  EXPECT_TRUE(check_entangled_pair(e).pass());
}

TEST(QlsIo, RejectsMalformedDocuments) {
  auto kind_of = [](const std::string& text) {
    try {
      qls_from_json(parse_json_text(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Contradiction;
  };
  EXPECT_EQ(kind_of("{"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of(R"({"format":"qls/1","kind":"moqls","n":1})"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of(R"({"format":"qls/1","kind":"qls","n":2,"entries":[[[[1,0]],[[0,0]]]]})"), ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of(R"({"format":"qls/1","kind":"qls","n":1,"entries":[[[[1,"x"]]]]})"), ErrorKind::ParseError);
}
