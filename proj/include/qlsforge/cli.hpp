#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qlsforge/clique.hpp"
#include "qlsforge/error.hpp"
#include "qlsforge/graph_engine.hpp"
#include "qlsforge/latin_algorithms.hpp"
#include "qlsforge/latin_square.hpp"
#include "qlsforge/lemma_scan.hpp"
#include "qlsforge/pattern_search.hpp"
#include "qlsforge/qls_io.hpp"
#include "qlsforge/qls_numeric.hpp"

namespace qlsforge {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "report/1";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvalidInput = 2, kExitResourceLimit = 3 };

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::PreconditionViolated, "sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return out.str();
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

inline nlohmann::json partition_json(const Partition& p) { return p.classes; }

inline nlohmann::json trace_json(const RefutationTrace& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes) {
    nlohmann::json j{{"reason", to_string(n.reason)}, {"stateHash", hex64(n.state_hash)}};
    switch (n.reason) {
      case TerminalReason::Clique: j["clique"] = n.clique; break;
      case TerminalReason::DegenerateTriple: j["triple"] = n.triple.members; break;
      case TerminalReason::ExhaustedCases: {
        j["partition"] = partition_json(n.partition);
        auto cases = nlohmann::json::array();
        for (const auto& c : n.cases)
          cases.push_back({{"class", c.class_index}, {"kind", to_string(c.kind)}, {"vertices", c.vertices}, {"child", c.child}});
        j["cases"] = std::move(cases);
        break;
      }
    }
    nodes.push_back(std::move(j));
  }
  return {{"verdict", to_string(t.verdict)},
          {"root", t.root},
          {"dimension", t.dimension},
          {"extendedFourPoint", t.extended_four_point},
          {"nodes", std::move(nodes)}};
}

inline std::vector<std::string> square_rows(const LatinSquare& ls) {
  std::vector<std::string> rows;
  for (int r = 0; r < ls.order(); ++r) rows.push_back(ls.row_string(r));
  return rows;
}

inline nlohmann::json numeric_json(const NumericReport& r) {
  return {{"pass", r.pass}, {"deviation", r.deviation}, {"tolerance", r.tolerance}, {"detail", r.detail}};
}

namespace detail {

/// Accumulates one report; `finish` stamps timing and version.
class Report {
 public:
  explicit Report(std::string command) : start_(std::chrono::steady_clock::now()) {
    doc_ = {{"schema", kReportSchema},
            {"command", std::move(command)},
            {"inputs", nlohmann::json::array()},
            {"witness", nlohmann::json::object()}};
  }

  void input_file(const std::string& path, const std::string& content) {
    doc_["inputs"].push_back({{"path", path}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }
  void input_value(const std::string& name, nlohmann::json value) {
    doc_["inputs"].push_back({{"name", name}, {"value", std::move(value)}});
  }
  void verdict(const std::string& v) { doc_["verdict"] = v; }
  nlohmann::json& witness() { return doc_["witness"]; }
  nlohmann::json& counters() { return counters_; }

  nlohmann::json finish() {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    doc_["timing"] = {{"wallMs", ms}};
    if (!counters_.empty()) doc_["timing"]["counters"] = counters_;
    doc_["toolVersion"] = kToolVersion;
    return doc_;
  }

 private:
  nlohmann::json doc_;
  nlohmann::json counters_ = nlohmann::json::object();
  std::chrono::steady_clock::time_point start_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::PreconditionViolated, "cannot write " + path);
  out << content;
}

inline std::uint64_t env_budget(std::uint64_t fallback) {
  const char* v = std::getenv("QLSFORGE_BUDGET");
  if (v == nullptr || *v == '\0') return fallback;
  try {
    std::size_t used = 0;
    const auto b = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return b;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, std::string("QLSFORGE_BUDGET is not a number: ") + v);
  }
}

inline int default_threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

inline int exit_code_for(ErrorKind k) { return k == ErrorKind::ResourceLimit ? kExitResourceLimit : kExitInvalidInput; }

struct QomOutcome {
  OnrResult result;
  bool verified = true;
};

inline QomOutcome run_qom(const LatinSquare& ls, const GraphEngineOptions& opts) {
  QomOutcome o;
  o.result = check_latin_square_quantum_mate(ls, opts);
  o.verified = verify_trace(ConstraintState(latin_square_graph(ls), 6), o.result.trace);
  return o;
}

inline nlohmann::json stats_json(const GraphEngineStats& s) {
  return {{"states", s.states}, {"memoHits", s.memo_hits}, {"candidates", s.candidates}, {"maxDepth", s.max_depth}};
}

inline std::string verdict_word(const OnrResult& r) { return r.could_have_representation ? "inconclusive" : "refuted"; }

}  // namespace detail

/// Runs one subcommand. `args` excludes the program name. The report goes to
/// `out` as one JSON document; the human summary goes to `err`.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latin square, quantum Latin square and orthogonality checks", "qlsforge"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("--quiet,-q", quiet, "suppress the summary on standard error");

  std::string file, out_path, out_dir, which;
  int order = 0, squares = 0, threads = 0;
  double tol = -1.0;
  std::optional<std::uint64_t> budget;
  bool single_candidate = false, k34 = false, strict = false, no_row_break = false;

  auto* catalog = app.add_subcommand("catalog", "list the twelve order-6 main-class representatives");
  catalog->add_option("--out-dir", out_dir, "also write one .ls file per square");
  auto* validate_ls = app.add_subcommand("validate-ls", "parse and check a Latin square");
  validate_ls->add_option("file", file)->required();
  auto* subsquares = app.add_subcommand("subsquares", "list subsquares of a given order");
  subsquares->add_option("file", file)->required();
  subsquares->add_option("--order", order)->required()->check(CLI::PositiveNumber);
  auto* transversals = app.add_subcommand("transversals", "enumerate transversals");
  transversals->add_option("file", file)->required();
  auto* mate = app.add_subcommand("mate", "search for an orthogonal mate");
  mate->add_option("file", file)->required();
  auto* ls_graph = app.add_subcommand("ls-graph", "write the Latin square graph");
  ls_graph->add_option("file", file)->required();
  ls_graph->add_option("--out", out_path)->required();

  auto* check_qom = app.add_subcommand("check-qom", "try to refute a quantum orthogonal mate of an order-6 square");
  check_qom->add_option("file", file)->required();
  for (auto* sub : {check_qom, app.add_subcommand("paper-verdicts", "run check-qom on all twelve catalog squares")}) {
    sub->add_flag("--single-candidate", single_candidate, "examine only the first tripartite candidate");
    sub->add_flag("--k34", k34, "also use four-point classes");
    sub->add_option("--budget", budget, "state budget (0 = unlimited)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
  }
  auto* verdicts = app.get_subcommand("paper-verdicts");

  auto* pattern_search = app.add_subcommand("pattern-search", "search support patterns of orthogonal quantum Latin squares");
  pattern_search->add_option("--squares", squares)->required()->check(CLI::PositiveNumber);
  pattern_search->add_option("--order", order)->required()->check(CLI::Range(1, kMaxSearchOrder));
  pattern_search->add_option("--budget", budget, "propagation budget");
  pattern_search->add_flag("--no-row-break", no_row_break, "keep row-permutation symmetric copies");

  auto* lemma_scan = app.add_subcommand("lemma-scan", "exhaustive scan of order-6 row families");
  lemma_scan->add_option("lemma", which)->required()->check(CLI::IsMember({"pattern3", "pattern4"}));
  lemma_scan->add_option("--budget", budget, "node budget");
  lemma_scan->add_flag("--strict", strict, "pattern3: read the second conclusion as pairwise overlaps of two");

  auto* validate_qls = app.add_subcommand("validate-qls", "check a quantum Latin square");
  validate_qls->add_option("file", file)->required();
  validate_qls->add_option("--tol", tol)->check(CLI::PositiveNumber);
  auto* validate_moqls = app.add_subcommand("validate-moqls", "check an orthogonal pair");
  validate_moqls->add_option("file", file)->required();
  validate_moqls->add_option("--tol", tol)->check(CLI::PositiveNumber);
  auto* standard_form = app.add_subcommand("standard-form", "rotate a pair so both first rows are the standard basis");
  standard_form->add_option("file", file)->required();
  standard_form->add_option("--out", out_path)->required();
  auto* classicalize = app.add_subcommand("classicalize", "turn a weight <= 2 square into a classical one");
  classicalize->add_option("file", file)->required();
  classicalize->add_option("--out", out_path)->required();
  auto* check_entangled = app.add_subcommand("check-entangled", "check an entangled pair");
  check_entangled->add_option("file", file)->required();
  check_entangled->add_option("--tol", tol)->check(CLI::PositiveNumber);
  auto* fixtures = app.add_subcommand("fixtures", "write a built-in example");
  fixtures->add_option("name", which)->required()->check(CLI::IsMember({"order9", "order4"}));
  fixtures->add_option("--out", out_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto* sub = app.get_subcommands().front();
  detail::Report report(sub->get_name());
  std::ostringstream summary;
  Tolerance tolerance;
  if (tol > 0) tolerance.orthogonality = tolerance.trace_check = tol;

  auto load = [&](const std::string& path) {
    std::string text = detail::read_file(path);
    report.input_file(path, text);
    return text;
  };
  auto load_ls = [&](const std::string& path) { return parse_latin_square(load(path)); };
  auto load_json = [&](const std::string& path) { return parse_json_text(load(path)); };
  auto engine_options = [&]() {
    GraphEngineOptions o;
    o.all_candidates = !single_candidate;
    o.extended_four_point = k34;
    o.budget = budget ? *budget : detail::env_budget(0);
    o.threads = threads > 0 ? threads : detail::default_threads();
    report.input_value("options", {{"singleCandidate", single_candidate}, {"k34", k34}, {"budget", o.budget}});
    return o;
  };

  try {
    if (sub == catalog) {
      auto list = nlohmann::json::array();
      const auto& cat = catalog_main_classes();
      if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
      for (std::size_t i = 0; i < cat.size(); ++i) {
        const auto fp = main_class_fingerprint(cat[i]);
        list.push_back({{"index", i + 1},
                        {"rows", square_rows(cat[i])},
                        {"transversals", fp.transversals},
                        {"subsquares2", fp.subsquares2},
                        {"subsquares3", fp.subsquares3},
                        {"graphHash", hex64(fp.graph_hash)}});
        if (!out_dir.empty())
          detail::write_file((std::filesystem::path(out_dir) / ("catalog" + std::to_string(i + 1) + ".ls")).string(),
                             cat[i].to_text());
        summary << "#" << i + 1 << "  " << cat[i].to_compact() << "  transversals=" << fp.transversals
                << " subsquares3=" << fp.subsquares3 << "\n";
      }
      report.witness()["squares"] = std::move(list);
      report.verdict("pass");
    } else if (sub == validate_ls) {
      const std::string text = load(file);
      try {
        const auto ls = parse_latin_square(text);
        report.witness() = {{"order", ls.order()}, {"rows", square_rows(ls)}};
        if (auto k = identify_main_class(ls)) report.witness()["catalogIndex"] = *k;
        report.verdict("pass");
        summary << "valid Latin square of order " << ls.order() << "\n";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotLatin) throw;
        report.witness() = {{"error", e.what()}};
        report.verdict("fail");
        summary << e.what() << "\n";
      }
    } else if (sub == subsquares) {
      const auto ls = load_ls(file);
      report.input_value("order", order);
      auto list = nlohmann::json::array();
      for (const auto& s : find_subsquares(ls, order))
        list.push_back({{"rows", s.rows}, {"columns", s.cols}, {"symbols", s.symbols}});
      summary << list.size() << " subsquares of order " << order << "\n";
      report.verdict(list.empty() ? "fail" : "pass");
      report.witness()["subsquares"] = std::move(list);
    } else if (sub == transversals) {
      const auto ls = load_ls(file);
      constexpr std::size_t kListed = 1000;
      const auto all = enumerate_transversals(ls);
      auto list = nlohmann::json::array();
      for (std::size_t i = 0; i < all.size() && i < kListed; ++i) list.push_back(all[i].columns);
      report.witness() = {{"count", all.size()}, {"columns", std::move(list)}, {"truncated", all.size() > kListed}};
      report.verdict(all.empty() ? "fail" : "pass");
      summary << all.size() << " transversals\n";
    } else if (sub == mate) {
      const auto ls = load_ls(file);
      if (auto m = find_orthogonal_mate(ls)) {
        if (!are_orthogonal(ls, *m)) throw Error(ErrorKind::Contradiction, "mate failed the distinct-pairs check");
        report.witness() = {{"mate", square_rows(*m)}};
        report.verdict("pass");
        summary << "orthogonal mate found\n";
      } else {
        report.witness() = {{"transversals", count_transversals(ls)}};
        report.verdict("fail");
        summary << "no orthogonal mate\n";
      }
    } else if (sub == ls_graph) {
      const auto ls = load_ls(file);
      const auto g = latin_square_graph(ls);
      detail::write_file(out_path, g.serialize());
      report.witness() = {{"vertices", g.vertex_count()},
                          {"edges", g.edge_count()},
                          {"cliqueNumber", clique_number(g.rows(), g.all())},
                          {"out", out_path}};
      report.verdict("pass");
      summary << "wrote graph with " << g.vertex_count() << " vertices to " << out_path << "\n";
    } else if (sub == check_qom) {
      const auto ls = load_ls(file);
      const auto o = detail::run_qom(ls, engine_options());
      report.verdict(detail::verdict_word(o.result));
      report.witness() = {{"traceVerified", o.verified}, {"trace", trace_json(o.result.trace)}};
      if (auto k = identify_main_class(ls)) report.witness()["catalogIndex"] = *k;
      report.counters() = detail::stats_json(o.result.stats);
      summary << "check-qom: " << detail::verdict_word(o.result) << " (" << o.result.stats.states << " states, trace "
              << (o.verified ? "verified" : "REJECTED") << ")\n";
    } else if (sub == verdicts) {
      const auto opts = engine_options();
      auto table = nlohmann::json::array();
      int refuted = 0, inconclusive = 0;
      bool all_verified = true, inconclusive_have_subsquares = true;
      std::uint64_t states = 0;
      const auto& cat = catalog_main_classes();
      for (std::size_t i = 0; i < cat.size(); ++i) {
        const auto o = detail::run_qom(cat[i], opts);
        const auto sub3 = find_subsquares(cat[i], 3).size();
        const bool inc = o.result.could_have_representation;
        (inc ? inconclusive : refuted) += 1;
        all_verified = all_verified && o.verified;
        if (inc && sub3 == 0) inconclusive_have_subsquares = false;
        states += o.result.stats.states;
        table.push_back({{"index", i + 1},
                         {"verdict", detail::verdict_word(o.result)},
                         {"subsquares3", sub3},
                         {"traceVerified", o.verified},
                         {"trace", trace_json(o.result.trace)}});
        summary << "#" << std::setw(2) << i + 1 << "  " << std::setw(12) << detail::verdict_word(o.result)
                << "  order-3 subsquares: " << sub3 << "\n";
      }
      report.witness() = {{"squares", std::move(table)},
                          {"refuted", refuted},
                          {"inconclusive", inconclusive},
                          {"inconclusiveHaveSubsquares", inconclusive_have_subsquares},
                          {"allTracesVerified", all_verified}};
      report.counters() = {{"states", states}};
      const bool ok = refuted == 10 && inconclusive == 2 && inconclusive_have_subsquares && all_verified;
      report.verdict(ok ? "pass" : "fail");
      summary << refuted << " refuted, " << inconclusive << " inconclusive\n";
    } else if (sub == pattern_search) {
      PatternSearchOptions o;
      o.budget = budget ? *budget : detail::env_budget(o.budget);
      o.break_row_symmetry = !no_row_break;
      report.input_value("squares", squares);
      report.input_value("order", order);
      report.input_value("options", {{"budget", o.budget}, {"rowBreak", o.break_row_symmetry}});
      const auto r = search_moqls_patterns(squares, order, o);
      auto classes = nlohmann::json::array();
      for (const auto& s : r.survivors) {
        auto one = nlohmann::json::array();
        for (const auto& pm : s) one.push_back(pm.serialize());
        classes.push_back(std::move(one));
      }
      report.witness() = {{"survivors", std::move(classes)}, {"raw", r.raw.size()}, {"allClassical", r.all_classical()}};
      report.counters() = {{"nodes", r.nodes}, {"steps", r.steps}};
      report.verdict(r.all_classical() ? "pass" : "fail");
      summary << r.raw.size() << " surviving assignments in " << r.survivors.size() << " classes; "
              << (r.all_classical() ? "all classical" : "non-classical survivors") << "\n";
    } else if (sub == lemma_scan) {
      LemmaScanOptions o;
      o.budget = budget ? *budget : detail::env_budget(o.budget);
      o.reading = strict ? Pattern3Reading::PairwiseOverlapTwo : Pattern3Reading::CommonFourSet;
      report.input_value("lemma", which);
      report.input_value("options", {{"budget", o.budget}, {"strict", strict}});
      const auto r = which == "pattern3" ? lemma_pattern3_scan(o) : lemma_pattern4_scan(o);
      auto list = [](const std::vector<RowFamily>& fs) {
        auto a = nlohmann::json::array();
        for (const auto& f : fs) a.push_back(family_strings(f));
        return a;
      };
      report.witness() = {{"families", r.families},
                          {"orbits", r.orbits},
                          {"counterexamples", list(r.counterexamples)},
                          {"closingClaimViolations", list(r.closing_claim_violations)}};
      report.counters() = {{"nodes", r.nodes}};
      report.verdict(r.empty() ? "pass" : "fail");
      summary << which << ": " << r.families << " families, " << r.counterexamples.size() << " counterexamples\n";
    } else if (sub == validate_qls) {
      const auto q = qls_from_json(load_json(file));
      const auto r = qlsforge::validate_qls(q, tolerance);
      report.witness() = numeric_json(r);
      report.verdict(r.pass ? "pass" : "fail");
      summary << (r.pass ? "valid" : "invalid") << " quantum Latin square, deviation " << r.deviation << "\n";
    } else if (sub == validate_moqls) {
      const auto p = moqls_from_json(load_json(file));
      const auto r = validate_orthogonal_pair(p, tolerance);
      report.witness() = numeric_json(r);
      report.verdict(r.pass ? "pass" : "fail");
      summary << (r.pass ? "orthogonal pair" : "not an orthogonal pair") << ", deviation " << r.deviation << "\n";
    } else if (sub == standard_form) {
      const auto p = to_standard_form(moqls_from_json(load_json(file)), tolerance);
      const auto r = validate_orthogonal_pair(p, tolerance);
      detail::write_file(out_path, to_json(p).dump(2) + "\n");
      report.witness() = {{"out", out_path}, {"pair", numeric_json(r)}};
      report.verdict(r.pass ? "pass" : "fail");
      summary << "wrote standard form to " << out_path << "\n";
    } else if (sub == classicalize) {
      const auto r = classicalize_weight_le2_traced(qls_from_json(load_json(file)), tolerance);
      const auto check = qlsforge::validate_qls(r.square, tolerance);
      const auto cls = classical_part(r.square, tolerance);
      detail::write_file(out_path, to_json(r.square).dump(2) + "\n");
      report.witness() = {{"out", out_path}, {"iterations", r.iterations}, {"square", numeric_json(check)}};
      if (cls) report.witness()["classical"] = square_rows(*cls);
      report.verdict(check.pass && cls ? "pass" : "fail");
      summary << "classicalized in " << r.iterations << " iterations\n";
    } else if (sub == check_entangled) {
      const auto r = check_entangled_pair(entangled_from_json(load_json(file)), tolerance);
      report.witness() = {{"basis", numeric_json(r.basis)}, {"rows", numeric_json(r.rows)}, {"columns", numeric_json(r.columns)}};
      report.verdict(r.pass() ? "pass" : "fail");
      summary << (r.pass() ? "entangled pair" : "not an entangled pair") << "\n";
    } else if (sub == fixtures) {
      report.input_value("name", which);
      const nlohmann::json doc = which == "order9" ? to_json(order9_example()) : to_json(order4_example());
      detail::write_file(out_path, doc.dump(2) + "\n");
      report.witness() = {{"out", out_path}, {"kind", doc["kind"]}};
      report.verdict("pass");
      summary << "wrote " << which << " to " << out_path << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }

  out << report.finish().dump(2) << "\n";
  if (!quiet) err << summary.str();
  return kExitOk;
}

}  // namespace qlsforge
