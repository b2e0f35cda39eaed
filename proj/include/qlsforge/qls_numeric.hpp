#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qlsforge/error.hpp"
#include "qlsforge/latin_square.hpp"
#include "qlsforge/pattern.hpp"

namespace qlsforge {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct Tolerance {
  double orthogonality = 1e-9;
  double zero_threshold = 1e-9;
  double trace_check = 1e-8;
};

/// n x n array of vectors in C^n (row-major cells).
class QuantumLatinSquare {
 public:
  QuantumLatinSquare() = default;
  QuantumLatinSquare(int n, std::vector<ComplexVector> entries) : n_(n), entries_(std::move(entries)) {
    if (n < 1 || static_cast<int>(entries_.size()) != n * n)
      throw Error(ErrorKind::DimensionMismatch, "quantum Latin square needs n*n entries");
    for (const auto& e : entries_)
      if (e.size() != n) throw Error(ErrorKind::DimensionMismatch, "entry dimension differs from the order");
  }

  int order() const { return n_; }
  const ComplexVector& at(int r, int c) const { return entries_[static_cast<std::size_t>(r * n_ + c)]; }
  ComplexVector& at(int r, int c) { return entries_[static_cast<std::size_t>(r * n_ + c)]; }
  const std::vector<ComplexVector>& entries() const { return entries_; }
  std::vector<ComplexVector>& entries() { return entries_; }

 private:
  int n_ = 0;
  std::vector<ComplexVector> entries_;
};

struct MoqlsPair {
  QuantumLatinSquare first;
  QuantumLatinSquare second;
};

/// n x n array of vectors in C^n (x) C^n; coordinate i*n+j is |i> (x) |j>.
class EntangledSquare {
 public:
  EntangledSquare() = default;
  EntangledSquare(int n, std::vector<ComplexVector> entries) : n_(n), entries_(std::move(entries)) {
    if (n < 1 || static_cast<int>(entries_.size()) != n * n)
      throw Error(ErrorKind::DimensionMismatch, "entangled square needs n*n entries");
    for (const auto& e : entries_)
      if (e.size() != n * n) throw Error(ErrorKind::DimensionMismatch, "entangled entries live in dimension n^2");
  }

  int order() const { return n_; }
  const ComplexVector& at(int r, int c) const { return entries_[static_cast<std::size_t>(r * n_ + c)]; }
  const std::vector<ComplexVector>& entries() const { return entries_; }

 private:
  int n_ = 0;
  std::vector<ComplexVector> entries_;
};

/// Outcome of a numeric check: worst deviation against the tolerance used.
struct NumericReport {
  bool pass = true;
  double deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// |k> in C^n for 0-based k.
inline ComplexVector basis_vector(int n, int k) {
  ComplexVector v = ComplexVector::Zero(n);
  v(k) = 1.0;
  return v;
}

/// Largest entry of |G - I| where G is the Gram matrix of the columns of m.
inline double gram_deviation(const ComplexMatrix& m) {
  const ComplexMatrix g = m.adjoint() * m;
  return (g - ComplexMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

inline ComplexMatrix stack_columns(const std::vector<ComplexVector>& vs) {
  if (vs.empty()) return {};
  ComplexMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != m.rows()) throw Error(ErrorKind::DimensionMismatch, "vectors of different dimension");
    m.col(static_cast<Eigen::Index>(i)) = vs[i];
  }
  return m;
}

/// Every row and column must be an orthonormal basis.
inline NumericReport validate_qls(const QuantumLatinSquare& q, const Tolerance& tol = {}) {
  const int n = q.order();
  NumericReport rep;
  rep.tolerance = tol.orthogonality;
  for (int i = 0; i < n; ++i) {
    std::vector<ComplexVector> row, col;
    for (int k = 0; k < n; ++k) {
      row.push_back(q.at(i, k));
      col.push_back(q.at(k, i));
    }
    const double dr = gram_deviation(stack_columns(row));
    const double dc = gram_deviation(stack_columns(col));
    if (dr > rep.deviation) {
      rep.deviation = dr;
      rep.detail = "row " + std::to_string(i + 1);
    }
    if (dc > rep.deviation) {
      rep.deviation = dc;
      rep.detail = "column " + std::to_string(i + 1);
    }
  }
  rep.pass = rep.deviation <= tol.orthogonality;
  return rep;
}

/// The n^2 cellwise tensor products must form an orthonormal basis.
inline NumericReport validate_orthogonal_pair(const MoqlsPair& p, const Tolerance& tol = {}) {
  const int n = p.first.order();
  if (p.second.order() != n) throw Error(ErrorKind::OrderMismatch, "squares of different order");
  std::vector<ComplexVector> products;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const ComplexVector& a = p.first.at(r, c);
      const ComplexVector& b = p.second.at(r, c);
      ComplexVector t(n * n);
      for (int i = 0; i < n; ++i) t.segment(i * n, n) = a(i) * b;
      products.push_back(std::move(t));
    }
  NumericReport rep;
  rep.tolerance = tol.orthogonality;
  rep.deviation = gram_deviation(stack_columns(products));
  rep.pass = rep.deviation <= tol.orthogonality;
  return rep;
}

inline QuantumLatinSquare apply_unitary(const QuantumLatinSquare& q, const ComplexMatrix& u) {
  QuantumLatinSquare out = q;
  for (auto& e : out.entries()) e = u * e;
  return out;
}

/// Sends each square's first row to the computational basis with
/// U = sum_k |k><psi_1k|, applied to every entry.
inline MoqlsPair to_standard_form(const MoqlsPair& p, const Tolerance& tol = {}) {
  if (p.first.order() != p.second.order()) throw Error(ErrorKind::InvalidPair, "squares of different order");
  if (!validate_qls(p.first, tol).pass || !validate_qls(p.second, tol).pass)
    throw Error(ErrorKind::InvalidPair, "both squares must be valid quantum Latin squares");
  auto fix = [](const QuantumLatinSquare& q) {
    const int n = q.order();
    ComplexMatrix u(n, n);
    for (int k = 0; k < n; ++k) u.row(k) = q.at(0, k).adjoint();
    QuantumLatinSquare out = apply_unitary(q, u);
    for (int k = 0; k < n; ++k) out.at(0, k) = basis_vector(n, k);
    return out;
  };
  return {fix(p.first), fix(p.second)};
}

inline SupportPattern vector_pattern(const ComplexVector& v, double threshold) {
  std::uint64_t b = 0;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (std::abs(v(k)) > threshold) b |= std::uint64_t{1} << k;
  return {static_cast<int>(v.size()), b};
}

/// Bit k set iff |amplitude k| exceeds the zero threshold.
inline PatternMatrix extract_pattern(const QuantumLatinSquare& q, const Tolerance& tol = {}) {
  const int n = q.order();
  if (n > 64) throw Error(ErrorKind::DimensionMismatch, "patterns support n <= 64");
  std::vector<SupportPattern> cells;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      auto p = vector_pattern(q.at(r, c), tol.zero_threshold);
      if (p.bits() == 0)
        throw Error(ErrorKind::EmptySupport,
                    "entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ") is numerically zero");
      cells.push_back(p);
    }
  return PatternMatrix(n, std::move(cells));
}

inline QuantumLatinSquare from_latin_square(const LatinSquare& ls) {
  const int n = ls.order();
  std::vector<ComplexVector> e;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) e.push_back(basis_vector(n, ls.at(r, c) - 1));
  return {n, std::move(e)};
}

/// The Latin square read off a square whose entries all have weight one.
inline std::optional<LatinSquare> classical_part(const QuantumLatinSquare& q, const Tolerance& tol = {}) {
  const auto pm = extract_pattern(q, tol);
  if (!pm.all_weight_one()) return std::nullopt;
  const int n = q.order();
  std::vector<int> grid;
  for (const auto& c : pm.cells()) grid.push_back(std::countr_zero(c.bits()) + 1);
  try {
    return LatinSquare(n, std::move(grid));
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct ClassicalizeResult {
  QuantumLatinSquare square;
  int iterations = 0;
};

/// Removes weight-2 entries one support at a time: for the first weight-2
/// cell with support {a,b}, the 2x2 unitary on coordinates a,b sending that
/// entry to |a> is applied to every entry with exactly that support.
/// Entries end as exact basis vectors (phases dropped).
inline ClassicalizeResult classicalize_weight_le2_traced(const QuantumLatinSquare& q, const Tolerance& tol = {}) {
  const int n = q.order();
  QuantumLatinSquare cur = q;
  auto clean = [&](ComplexVector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (std::abs(v(k)) <= tol.zero_threshold) v(k) = 0.0;
  };
  for (auto& e : cur.entries()) clean(e);
  const auto initial = extract_pattern(cur, tol);
  for (const auto& c : initial.cells())
    if (weight(c) > 2) throw Error(ErrorKind::WeightTooHigh, "entry of weight " + std::to_string(weight(c)));
  int iterations = 0;
  while (true) {
    const auto pm = extract_pattern(cur, tol);
    int pick = -1;
    for (int i = 0; i < n * n && pick < 0; ++i)
      if (weight(pm.cells()[static_cast<std::size_t>(i)]) == 2) pick = i;
    if (pick < 0) break;
    if (++iterations > n * n) throw Error(ErrorKind::Contradiction, "classicalization did not terminate");
    const SupportPattern support = pm.cells()[static_cast<std::size_t>(pick)];
    const std::uint64_t bits = support.bits();
    const int a = std::countr_zero(bits);
    const int b = 63 - std::countl_zero(bits);
    const ComplexVector& psi = cur.entries()[static_cast<std::size_t>(pick)];
    const Complex alpha = psi(a), beta = psi(b);
    const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
    const Complex ua = alpha / norm, ub = beta / norm;
    for (int i = 0; i < n * n; ++i) {
      if (pm.cells()[static_cast<std::size_t>(i)] != support) continue;
      ComplexVector& v = cur.entries()[static_cast<std::size_t>(i)];
      const Complex x = v(a), y = v(b);
      v(a) = std::conj(ua) * x + std::conj(ub) * y;
      v(b) = -ub * x + ua * y;
      clean(v);
    }
  }
  for (auto& e : cur.entries()) {
    Eigen::Index k = 0;
    e.cwiseAbs().maxCoeff(&k);
    e = basis_vector(n, static_cast<int>(k));
  }
  return {cur, iterations};
}

inline QuantumLatinSquare classicalize_weight_le2(const QuantumLatinSquare& q, const Tolerance& tol = {}) {
  return classicalize_weight_le2_traced(q, tol).square;
}

/// psi_ij = |a_ij> (x) |b_ij>.
inline EntangledSquare from_classical_mols(const LatinSquare& a, const LatinSquare& b) {
  const int n = a.order();
  if (b.order() != n) throw Error(ErrorKind::OrderMismatch, "squares of different order");
  std::vector<ComplexVector> e;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) e.push_back(basis_vector(n * n, (a.at(r, c) - 1) * n + (b.at(r, c) - 1)));
  return {n, std::move(e)};
}

enum class Subsystem { First, Second };

/// Partial trace of an n^2 x n^2 matrix over one tensor factor.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, Subsystem traced) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::NotSquareDimension, "matrix is not square");
  const auto dim = m.rows();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(dim))));
  if (n * n != dim || n == 0) throw Error(ErrorKind::NotSquareDimension, "dimension " + std::to_string(dim) + " is not a square");
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        out(i, j) += traced == Subsystem::First ? m(k * n + i, k * n + j) : m(i * n + k, j * n + k);
  return out;
}

struct EntangledReport {
  NumericReport basis;    // entries form an orthonormal basis
  NumericReport rows;     // row partial traces
  NumericReport columns;  // column partial traces

  bool pass() const { return basis.pass && rows.pass && columns.pass; }
};

/// The entries form an orthonormal basis, and for
/// every pair of rows (columns) i, j and either subsystem S,
/// tr_S(sum_k |psi_ik><psi_jk|) = delta_ij * identity.
inline EntangledReport check_entangled_pair(const EntangledSquare& e, const Tolerance& tol = {}) {
  const int n = e.order();
  EntangledReport rep;
  rep.basis.tolerance = tol.orthogonality;
  rep.basis.deviation = gram_deviation(stack_columns(e.entries()));
  rep.basis.pass = rep.basis.deviation <= tol.orthogonality;
  auto lines = [&](bool by_row, NumericReport& out) {
    out.tolerance = tol.trace_check;
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ComplexMatrix m = ComplexMatrix::Zero(n * n, n * n);
        for (int k = 0; k < n; ++k) {
          const ComplexVector& u = by_row ? e.at(i, k) : e.at(k, i);
          const ComplexVector& v = by_row ? e.at(j, k) : e.at(k, j);
          m += u * v.adjoint();
        }
        for (auto s : {Subsystem::First, Subsystem::Second}) {
          const ComplexMatrix target = i == j ? id : ComplexMatrix::Zero(n, n);
          const double d = (partial_trace(m, s) - target).cwiseAbs().maxCoeff();
          if (d > out.deviation) {
            out.deviation = d;
            out.detail = std::string(by_row ? "rows " : "columns ") + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + (s == Subsystem::First ? " over first" : " over second");
          }
        }
      }
    out.pass = out.deviation <= tol.trace_check;
  };
  lines(true, rep.rows);
  lines(false, rep.columns);
  return rep;
}

/// Numerical rank: singular values above cutoff * largest singular value.
inline int numeric_rank(const std::vector<ComplexVector>& vs, double cutoff = 1e-8) {
  if (vs.empty()) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(stack_columns(vs));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff * s(0)) ++r;
  return r;
}

struct TripartiteReport {
  int rank_x = 0, rank_y = 0, rank_z = 0, rank_all = 0, ambient = 0;
  bool pass = false;
};

/// Ranks of three mutually orthogonal families add up to the rank of
/// their union, which cannot exceed the ambient dimension.
inline TripartiteReport tripartite_dim_check(const std::vector<ComplexVector>& x, const std::vector<ComplexVector>& y,
                                             const std::vector<ComplexVector>& z, const Tolerance& tol = {}) {
  std::vector<const std::vector<ComplexVector>*> sets{&x, &y, &z};
  Eigen::Index dim = -1;
  for (auto* s : sets)
    for (const auto& v : *s) {
      if (dim < 0) dim = v.size();
      if (v.size() != dim) throw Error(ErrorKind::DimensionMismatch, "vectors of different dimension");
    }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      for (const auto& u : *sets[i])
        for (const auto& v : *sets[j])
          if (std::abs(u.dot(v)) > tol.orthogonality)
            throw Error(ErrorKind::NotCrossOrthogonal, "inner product " + std::to_string(std::abs(u.dot(v))));
  TripartiteReport rep;
  rep.ambient = dim < 0 ? 0 : static_cast<int>(dim);
  rep.rank_x = numeric_rank(x);
  rep.rank_y = numeric_rank(y);
  rep.rank_z = numeric_rank(z);
  std::vector<ComplexVector> all;
  for (auto* s : sets) all.insert(all.end(), s->begin(), s->end());
  rep.rank_all = numeric_rank(all);
  rep.pass = rep.rank_x + rep.rank_y + rep.rank_z == rep.rank_all && rep.rank_all <= rep.ambient;
  return rep;
}

/// Haar-like random unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal moved into Q.
inline ComplexMatrix random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// The two order-9 squares from the closing example: the first classical,
/// the second with a = (|2>+|3>)/sqrt2 and b = (|2>-|3>)/sqrt2 in six cells.
inline MoqlsPair order9_example() {
  const std::vector<std::string> first = {"123456789", "231564897", "312645978", "456789123", "564897231",
                                          "645978312", "789123456", "897231564", "978312645"};
  const std::vector<std::string> second = {"123456789", "312645978", "231564897", "789123456", "978312645",
                                           "897231564", "4567891ab", "645978b1a", "564897ab1"};
  constexpr int n = 9;
  const double h = 1.0 / std::sqrt(2.0);
  auto cell = [&](char ch) {
    if (ch == 'a' || ch == 'b') {
      ComplexVector v = ComplexVector::Zero(n);
      v(1) = h;
      v(2) = ch == 'a' ? h : -h;
      return v;
    }
    return basis_vector(n, ch - '1');
  };
  auto build = [&](const std::vector<std::string>& rows) {
    std::vector<ComplexVector> e;
    for (const auto& r : rows)
      for (char ch : r) e.push_back(cell(ch));
    return QuantumLatinSquare(n, std::move(e));
  };
  return {build(first), build(second)};
}

/// The order-4 square with two weight-2 blocks shown with its pattern.
inline QuantumLatinSquare order4_example() {
  constexpr int n = 4;
  const double h = 1.0 / std::sqrt(2.0);
  ComplexVector plus = ComplexVector::Zero(n), minus = ComplexVector::Zero(n);
  plus << h, h, 0, 0;
  minus << h, -h, 0, 0;
  auto e = [&](int k) { return basis_vector(n, k - 1); };
  return {n, {e(1), e(2), e(3), e(4), e(2), e(1), e(4), e(3), e(3), e(4), plus, minus, e(4), e(3), minus, plus}};
}

}  // namespace qlsforge
