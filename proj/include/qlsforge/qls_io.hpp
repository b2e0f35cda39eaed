#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qlsforge/error.hpp"
#include "qlsforge/qls_numeric.hpp"

namespace qlsforge {

inline constexpr const char* kQlsFormat = "qls/1";

namespace detail {

inline nlohmann::json vector_json(const ComplexVector& v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v(k).real(), v(k).imag()});
  return a;
}

inline ComplexVector vector_from_json(const nlohmann::json& j, Eigen::Index dim) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
    throw Error(ErrorKind::DimensionMismatch, "entry must have " + std::to_string(dim) + " amplitudes");
  ComplexVector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto& z = j[static_cast<std::size_t>(k)];
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
      throw Error(ErrorKind::ParseError, "amplitude must be [re, im]");
    v(k) = Complex(z[0].get<double>(), z[1].get<double>());
  }
  return v;
}

inline nlohmann::json entries_json(int n, const std::vector<ComplexVector>& entries) {
  auto rows = nlohmann::json::array();
  for (int r = 0; r < n; ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < n; ++c) row.push_back(vector_json(entries[static_cast<std::size_t>(r * n + c)]));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<ComplexVector> entries_from_json(const nlohmann::json& j, int n, Eigen::Index dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw Error(ErrorKind::DimensionMismatch, "entries must have n rows");
  std::vector<ComplexVector> out;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw Error(ErrorKind::DimensionMismatch, "entries must have n columns");
    for (const auto& cell : row) out.push_back(vector_from_json(cell, dim));
  }
  return out;
}

inline int order_of(const nlohmann::json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() < 1)
    throw Error(ErrorKind::ParseError, "missing positive integer \"n\"");
  return j["n"].get<int>();
}

inline void expect_kind(const nlohmann::json& j, const char* kind) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "expected a JSON object");
  if (!j.contains("format") || j["format"] != kQlsFormat) throw Error(ErrorKind::ParseError, "expected format qls/1");
  if (!j.contains("kind") || j["kind"] != kind) throw Error(ErrorKind::ParseError, std::string("expected kind ") + kind);
}

}  // namespace detail

inline nlohmann::json square_body(const QuantumLatinSquare& q) {
  return {{"n", q.order()}, {"entries", detail::entries_json(q.order(), q.entries())}};
}

inline QuantumLatinSquare square_from_body(const nlohmann::json& j) {
  const int n = detail::order_of(j);
  if (!j.contains("entries")) throw Error(ErrorKind::ParseError, "missing \"entries\"");
  return {n, detail::entries_from_json(j["entries"], n, n)};
}

inline nlohmann::json to_json(const QuantumLatinSquare& q) {
  auto j = square_body(q);
  j["format"] = kQlsFormat;
  j["kind"] = "qls";
  return j;
}

inline nlohmann::json to_json(const MoqlsPair& p) {
  return {{"format", kQlsFormat}, {"kind", "moqls"}, {"first", square_body(p.first)}, {"second", square_body(p.second)}};
}

inline nlohmann::json to_json(const EntangledSquare& e) {
  return {{"format", kQlsFormat},
          {"kind", "entangled"},
          {"n", e.order()},
          {"entries", detail::entries_json(e.order(), e.entries())}};
}

inline QuantumLatinSquare qls_from_json(const nlohmann::json& j) {
  detail::expect_kind(j, "qls");
  return square_from_body(j);
}

inline MoqlsPair moqls_from_json(const nlohmann::json& j) {
  detail::expect_kind(j, "moqls");
  if (!j.contains("first") || !j.contains("second")) throw Error(ErrorKind::ParseError, "pair needs first and second");
  return {square_from_body(j["first"]), square_from_body(j["second"])};
}

inline EntangledSquare entangled_from_json(const nlohmann::json& j) {
  detail::expect_kind(j, "entangled");
  const int n = detail::order_of(j);
  if (!j.contains("entries")) throw Error(ErrorKind::ParseError, "missing \"entries\"");
  return {n, detail::entries_from_json(j["entries"], n, static_cast<Eigen::Index>(n) * n)};
}

inline nlohmann::json parse_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace qlsforge
