#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "qlsforge/clique.hpp"
#include "qlsforge/constraint_state.hpp"
#include "qlsforge/error.hpp"
#include "qlsforge/latin_algorithms.hpp"
#include "qlsforge/latin_square.hpp"

namespace qlsforge {

/// Vertex classes with every cross-class pair adjacent. Each class is a
/// sorted vertex list; classes are sorted lexicographically.
struct Partition {
  std::vector<std::vector<int>> classes;

  int size() const {
    int s = 0;
    for (const auto& c : classes) s += static_cast<int>(c.size());
    return s;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;
};

namespace detail {

inline VertexMask mask_of(const std::vector<int>& vs) {
  VertexMask m = 0;
  for (int v : vs) m |= bit(v);
  return m;
}

inline std::vector<int> members_of(VertexMask m) {
  std::vector<int> out;
  for_each_bit(m, [&](int v) { out.push_back(v); });
  return out;
}

/// Visits every k-subset of `pool` (as a mask) in lexicographic order.
template <typename F>
inline void for_each_subset(VertexMask pool, int k, F&& f) {
  const auto vs = members_of(pool);
  for_each_combination(static_cast<int>(vs.size()), k, [&](const std::vector<int>& idx) {
    VertexMask m = 0;
    for (int i : idx) m |= bit(vs[static_cast<std::size_t>(i)]);
    f(m);
  });
}

/// Class-size shapes whose total is d+1: sizes 1..3 in three classes, plus
/// the two-class shape with a class of four when the extension is enabled.
inline std::vector<std::vector<int>> partition_shapes(int d, bool extended) {
  std::vector<std::vector<int>> shapes;
  for (int a = 1; a <= 3; ++a)
    for (int b = a; b <= 3; ++b) {
      const int c = d + 1 - a - b;
      if (c >= b && c <= 3) shapes.push_back({a, b, c});
    }
  if (extended) {
    const int p = d + 1 - 4;
    if (p >= 1 && p <= 4) shapes.push_back({p, 4});
  }
  return shapes;
}

inline bool cross_complete(const std::vector<VertexMask>& adj, const std::vector<VertexMask>& classes) {
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      bool ok = true;
      for_each_bit(classes[i], [&](int v) {
        if ((adj[static_cast<std::size_t>(v)] & classes[j]) != classes[j]) ok = false;
      });
      if (!ok) return false;
    }
  return true;
}

inline Partition make_partition(std::vector<VertexMask> classes) {
  Partition p;
  for (auto m : classes) p.classes.push_back(members_of(m));
  std::sort(p.classes.begin(), p.classes.end());
  return p;
}

}  // namespace detail

/// Compact candidate used inside the search: classes as masks, ordered
/// like their sorted member lists, unused slots zero.
struct Candidate {
  std::array<VertexMask, 3> classes{};
  int count = 0;
  std::array<std::uint32_t, 3> codes{};

  Partition partition() const {
    std::vector<VertexMask> masks(classes.begin(), classes.begin() + count);
    return detail::make_partition(std::move(masks));
  }

  friend bool operator<(const Candidate& a, const Candidate& b) { return a.codes < b.codes; }
};

namespace detail {

/// Member list packed so that integer order is lexicographic list order
/// (at most four members).
inline std::uint32_t class_code(VertexMask m) {
  std::uint32_t code = 0;
  int i = 0;
  for_each_bit(m, [&](int v) {
    code |= static_cast<std::uint32_t>(v + 1) << (8 * (3 - i));
    ++i;
  });
  return code;
}

/// k-subsets of `pool` in lexicographic order, as masks.
template <typename F>
inline void for_each_ksubset(VertexMask pool, int k, F&& f, VertexMask acc = 0) {
  if (k == 0) {
    f(acc);
    return;
  }
  while (popcount(pool) >= k) {
    const int v = std::countr_zero(pool);
    pool &= pool - 1;
    for_each_ksubset(pool, k - 1, f, acc | bit(v));
  }
}

inline VertexMask lowest(VertexMask m) { return m & (~m + 1); }

inline Candidate make_candidate(std::initializer_list<VertexMask> classes) {
  Candidate c;
  for (auto m : classes) c.classes[static_cast<std::size_t>(c.count++)] = m;
  std::sort(c.classes.begin(), c.classes.begin() + c.count,
            [](VertexMask x, VertexMask y) { return class_code(x) < class_code(y); });
  for (int i = 0; i < c.count; ++i) c.codes[static_cast<std::size_t>(i)] = class_code(c.classes[static_cast<std::size_t>(i)]);
  return c;
}

}  // namespace detail

/// Every complete multipartite subgraph (not necessarily induced) with class
/// sizes at most 3 and total d+1, each once up to class order, sorted
/// lexicographically. With `extended`, two-class candidates with a class of
/// four are included.
inline std::vector<Candidate> enumerate_candidates(const std::vector<VertexMask>& adj, VertexMask alive, int d,
                                                   bool extended = false) {
  std::vector<Candidate> out;
  for (const auto& shape : detail::partition_shapes(d, extended)) {
    const int big = shape.back();
    const bool two = shape.size() == 2;
    const int a = shape[0];
    const int b = two ? 0 : shape[1];
    const int need = a + b;
    // Grow the largest class C vertex by vertex, tracking common neighbours.
    auto grow = [&](auto&& self, VertexMask pool, int left, VertexMask c, VertexMask common) -> void {
      if (left == 0) {
        if (two) {
          detail::for_each_ksubset(common, a, [&](VertexMask am) {
            if (a == big && detail::lowest(am) < detail::lowest(c)) return;
            out.push_back(detail::make_candidate({am, c}));
          });
          return;
        }
        detail::for_each_ksubset(common, b, [&](VertexMask bm) {
          if (b == big && detail::lowest(bm) < detail::lowest(c)) return;
          VertexMask rest = common & ~bm;
          for_each_bit(bm, [&](int v) { rest &= adj[static_cast<std::size_t>(v)]; });
          if (popcount(rest) < a) return;
          detail::for_each_ksubset(rest, a, [&](VertexMask am) {
            if (a == b && detail::lowest(am) < detail::lowest(bm)) return;
            out.push_back(detail::make_candidate({am, bm, c}));
          });
        });
        return;
      }
      while (popcount(pool) >= left) {
        const int v = std::countr_zero(pool);
        pool &= pool - 1;
        const VertexMask next = (common & adj[static_cast<std::size_t>(v)]) & ~bit(v);
        if (popcount(next & ~c) < need) continue;
        self(self, pool, left - 1, c | bit(v), next & ~(c | bit(v)));
      }
    };
    grow(grow, alive, big, 0, alive);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Partition> enumerate_partitions(const std::vector<VertexMask>& adj, VertexMask alive, int d,
                                                   bool extended = false) {
  std::vector<Partition> out;
  for (const auto& c : enumerate_candidates(adj, alive, d, extended)) out.push_back(c.partition());
  return out;
}

/// The complete tripartite candidates (X, Y, Z) of total size d+1.
inline std::vector<Partition> enumerate_tripartite7(const SimpleGraph& g, int d = 6) {
  return enumerate_partitions(g.rows(), g.all(), d);
}

enum class Verdict { Refuted, Inconclusive };

inline const char* to_string(Verdict v) { return v == Verdict::Refuted ? "Refuted" : "Inconclusive"; }

enum class TerminalReason { Clique, DegenerateTriple, ExhaustedCases };

inline const char* to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::Clique: return "clique";
    case TerminalReason::DegenerateTriple: return "degenerate-triple";
    case TerminalReason::ExhaustedCases: return "exhausted-cases";
  }
  return "?";
}

/// How a class could become dependent: two vertices merged, three vertices
/// on a line, or (four-vertex classes) four points spanning a plane.
enum class CaseKind { Merge, Line, Coplanar };

inline const char* to_string(CaseKind k) {
  switch (k) {
    case CaseKind::Merge: return "merge";
    case CaseKind::Line: return "line";
    case CaseKind::Coplanar: return "coplanar";
  }
  return "?";
}

struct TraceCase {
  int class_index = 0;
  CaseKind kind = CaseKind::Merge;
  std::vector<int> vertices;
  /// Node refuting the resulting state; -1 for Coplanar, which is refuted in place.
  int child = -1;

  friend bool operator==(const TraceCase&, const TraceCase&) = default;
};

/// One refuted state. The state itself is not stored: a verifier rebuilds
/// it from the parent and checks the fingerprint.
struct TraceNode {
  TerminalReason reason = TerminalReason::Clique;
  std::uint64_t state_hash = 0;
  std::vector<int> clique;
  LineTriple triple;
  Partition partition;
  std::vector<TraceCase> cases;
};

/// Refutation certificate; nodes form a DAG (children precede parents).
struct RefutationTrace {
  Verdict verdict = Verdict::Inconclusive;
  int root = -1;
  int dimension = 6;
  bool extended_four_point = false;
  std::vector<TraceNode> nodes;
};

/// Keeps only nodes reachable from the root, renumbered in post-order, so
/// the trace no longer depends on memo history or worker scheduling.
inline RefutationTrace compact_trace(const RefutationTrace& trace) {
  RefutationTrace out = trace;
  out.nodes.clear();
  if (trace.verdict != Verdict::Refuted) return out;
  const int total = static_cast<int>(trace.nodes.size());
  std::vector<int> index(trace.nodes.size(), -1);
  auto visit = [&](auto&& self, int id) -> int {
    if (id < 0 || id >= total) throw Error(ErrorKind::MalformedTrace, "node id out of range");
    if (index[static_cast<std::size_t>(id)] >= 0) return index[static_cast<std::size_t>(id)];
    TraceNode node = trace.nodes[static_cast<std::size_t>(id)];
    for (auto& c : node.cases)
      if (c.child >= 0) c.child = self(self, c.child);
    out.nodes.push_back(std::move(node));
    return index[static_cast<std::size_t>(id)] = static_cast<int>(out.nodes.size()) - 1;
  };
  out.root = visit(visit, trace.root);
  return out;
}

struct GraphEngineOptions {
  /// Refute when any candidate has no dependable class; otherwise only the
  /// first candidate in lexicographic order is examined.
  bool all_candidates = true;
  /// Also consider two-class candidates with a class of four vertices.
  bool extended_four_point = false;
  /// Maximum number of states examined; 0 means unlimited.
  std::uint64_t budget = 0;
  /// Workers for the top-level candidate scan.
  int threads = 1;
};

struct GraphEngineStats {
  std::uint64_t states = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t candidates = 0;
  int max_depth = 0;

  GraphEngineStats& operator+=(const GraphEngineStats& o) {
    states += o.states;
    memo_hits += o.memo_hits;
    candidates += o.candidates;
    max_depth = std::max(max_depth, o.max_depth);
    return *this;
  }
};

struct OnrResult {
  /// False iff the state was refuted.
  bool could_have_representation = true;
  RefutationTrace trace;
  GraphEngineStats stats;
};

namespace detail {

/// All dependence cases of a class, in the order they are tried. A Line
/// case whose triple is already assumed is reported through `already_line`.
inline std::vector<TraceCase> dependence_cases(const ConstraintState& st, const std::vector<int>& cls, int ci,
                                               bool& already_line) {
  std::vector<TraceCase> cases;
  already_line = false;
  const int s = static_cast<int>(cls.size());
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      if (can_merge(st, cls[i], cls[j])) cases.push_back({ci, CaseKind::Merge, {cls[i], cls[j]}, -1});
  if (s >= 3)
    for_each_combination(s, 3, [&](const std::vector<int>& idx) {
      const LineTriple t(cls[idx[0]], cls[idx[1]], cls[idx[2]]);
      if (st.edges_within(t.mask()) > 1) return;
      if (st.has_triple(t)) already_line = true;
      cases.push_back({ci, CaseKind::Line, {t.members.begin(), t.members.end()}, -1});
    });
  if (s == 4) cases.push_back({ci, CaseKind::Coplanar, cls, -1});
  return cases;
}

/// Number of dependence cases of a class, without building them.
inline int case_count(const ConstraintState& st, VertexMask cls, bool& already_line) {
  int count = 0;
  already_line = false;
  const int s = popcount(cls);
  for_each_bit(cls, [&](int x) {
    for_each_bit(cls & ~(bit(x + 1) - 1), [&](int y) {
      if (can_merge(st, x, y)) ++count;
    });
  });
  if (s >= 3)
    for_each_ksubset(cls, 3, [&](VertexMask t) {
      if (st.edges_within(t) > 1) return;
      const auto m = members_of(t);
      if (st.has_triple(LineTriple(m[0], m[1], m[2]))) already_line = true;
      ++count;
    });
  if (s == 4) ++count;
  return count;
}

/// Four points spanning a plane, no three collinear: impossible when one of
/// them is orthogonal to the other three.
inline bool coplanar_impossible(const ConstraintState& st, const std::vector<int>& cls) {
  const VertexMask m = mask_of(cls);
  for (int v : cls)
    if (popcount(st.neighbors(v) & m) == 3) return true;
  return false;
}

inline ConstraintState apply_case(const ConstraintState& st, const TraceCase& c) {
  if (c.kind == CaseKind::Merge) return merge_vertices(st, c.vertices[0], c.vertices[1]);
  ConstraintState next = st;
  next.add_triple(LineTriple(c.vertices[0], c.vertices[1], c.vertices[2]));
  return next;
}

class OnrEngine {
 public:
  explicit OnrEngine(const GraphEngineOptions& opts, std::atomic<std::uint64_t>* shared_states = nullptr)
      : opts_(opts), shared_states_(shared_states) {}

  /// Node id of the refutation, or -1 if the state could be representable.
  int evaluate(ConstraintState st, int depth) {
    charge(depth);
    closure_in_place(st);
    auto key = st.key();
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++stats.memo_hits;
      return it->second;
    }
    const int result = evaluate_closed(st, depth);
    memo_.emplace(std::move(key), result);
    return result;
  }

  /// Cases tried for one class; returns true when the class is refuted,
  /// with every case's refutation appended to `cases`.
  bool class_refuted(const ConstraintState& st, const std::vector<int>& cls, int ci, std::vector<TraceCase>& cases,
                     int depth) {
    bool already_line = false;
    auto options = dependence_cases(st, cls, ci, already_line);
    // Assuming a line that is already assumed gives back the same state.
    if (already_line) return false;
    for (auto& c : options) {
      if (c.kind == CaseKind::Coplanar) {
        if (!coplanar_impossible(st, cls)) return false;
        cases.push_back(c);
        continue;
      }
      ConstraintState next = apply_case(st, c);
      check_measure(st, next);
      c.child = evaluate(std::move(next), depth + 1);
      if (c.child < 0) return false;
      cases.push_back(c);
    }
    return true;
  }

  /// Per-state outcome of each class already examined: nullopt when the
  /// class could be dependent, else its refuted cases (class index 0).
  using ClassCache = std::unordered_map<VertexMask, std::optional<std::vector<TraceCase>>>;

  /// Refutation node for a candidate, or -1. Candidates of one state share
  /// classes, so class outcomes are cached per state.
  int refute_candidate(const ConstraintState& st, const Candidate& cand, int depth, ClassCache& cache) {
    ++stats.candidates;
    std::vector<TraceCase> cases;
    for (int ci = 0; ci < cand.count; ++ci) {
      const VertexMask m = cand.classes[static_cast<std::size_t>(ci)];
      auto it = cache.find(m);
      if (it == cache.end()) {
        std::vector<TraceCase> found;
        const bool refuted = class_refuted(st, members_of(m), 0, found, depth);
        it = cache.emplace(m, refuted ? std::optional<std::vector<TraceCase>>(std::move(found)) : std::nullopt).first;
      }
      if (!it->second) return -1;
      for (auto c : *it->second) {
        c.class_index = ci;
        cases.push_back(std::move(c));
      }
    }
    TraceNode node;
    node.reason = TerminalReason::ExhaustedCases;
    node.state_hash = st.fingerprint();
    node.partition = cand.partition();
    node.cases = std::move(cases);
    return push(std::move(node));
  }

  /// Terminal refutation of a closed state, if any; -2 when none applies.
  int terminal(const ConstraintState& st) {
    if (auto t = degenerate_triple(st)) {
      TraceNode node;
      node.reason = TerminalReason::DegenerateTriple;
      node.state_hash = st.fingerprint();
      node.triple = *t;
      return push(std::move(node));
    }
    if (auto k = find_clique(st.adjacency(), st.alive(), st.dimension() + 1)) {
      TraceNode node;
      node.reason = TerminalReason::Clique;
      node.state_hash = st.fingerprint();
      node.clique = members_of(*k);
      return push(std::move(node));
    }
    return -2;
  }

  /// Candidates in the order they are examined: lexicographic for the
  /// single-candidate reading, fewest cases first otherwise.
  std::vector<Candidate> ordered_candidates(const ConstraintState& st) const {
    auto cands = enumerate_candidates(st.adjacency(), st.alive(), st.dimension(), opts_.extended_four_point);
    if (!opts_.all_candidates || cands.size() < 2) return cands;
    std::vector<std::pair<int, std::size_t>> order;
    order.reserve(cands.size());
    std::unordered_map<VertexMask, int> weight;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      int count = 0;
      for (int ci = 0; ci < cands[i].count; ++ci) {
        const VertexMask m = cands[i].classes[static_cast<std::size_t>(ci)];
        auto [it, fresh] = weight.try_emplace(m, 0);
        if (fresh) {
          bool already = false;
          it->second = case_count(st, m, already) + (already ? 1000 : 0);
        }
        count += it->second;
      }
      order.emplace_back(count, i);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Candidate> out;
    out.reserve(cands.size());
    for (const auto& [count, i] : order) out.push_back(cands[i]);
    return out;
  }

  int push(TraceNode node) {
    nodes.push_back(std::move(node));
    return static_cast<int>(nodes.size()) - 1;
  }

  std::vector<TraceNode> nodes;
  GraphEngineStats stats;

 private:
  int evaluate_closed(const ConstraintState& st, int depth) {
    if (int t = terminal(st); t != -2) return t;
    ClassCache cache;
    for (const auto& cand : ordered_candidates(st)) {
      if (int id = refute_candidate(st, cand, depth, cache); id >= 0) return id;
      if (!opts_.all_candidates) break;
    }
    return -1;
  }

  void charge(int depth) {
    ++stats.states;
    stats.max_depth = std::max(stats.max_depth, depth);
    const std::uint64_t total = shared_states_ ? ++*shared_states_ : stats.states;
    if (opts_.budget && total > opts_.budget)
      throw Error(ErrorKind::ResourceLimit, "graph engine budget of " + std::to_string(opts_.budget) + " states exceeded");
  }

  // Merges lower the vertex count; a new line raises the triple count at
  // the same vertex count. Either way the recursion measure decreases.
  static void check_measure(const ConstraintState& parent, const ConstraintState& child) {
    const bool fewer = child.vertex_count() < parent.vertex_count();
    const bool more_lines =
        child.vertex_count() == parent.vertex_count() && child.triples().size() > parent.triples().size();
    if (!fewer && !more_lines) throw Error(ErrorKind::PreconditionViolated, "recursion measure did not decrease");
  }

  GraphEngineOptions opts_;
  std::atomic<std::uint64_t>* shared_states_;
  std::unordered_map<std::vector<std::uint64_t>, int, KeyHash> memo_;
};

}  // namespace detail

/// Could the complement of the state's graph have an orthonormal
/// representation in dimension d with every triple on a line? False is
/// definitive and comes with a trace; true is inconclusive.
inline OnrResult complement_could_have_onr(const ConstraintState& state, const GraphEngineOptions& opts = {}) {
  OnrResult out;
  out.trace.dimension = state.dimension();
  out.trace.extended_four_point = opts.extended_four_point;
  ConstraintState st = closure(state);

  const int workers = std::max(1, opts.threads);
  if (workers == 1 || !opts.all_candidates) {
    detail::OnrEngine engine(opts);
    const int root = engine.evaluate(st, 0);
    out.stats = engine.stats;
    if (root >= 0) {
      out.could_have_representation = false;
      out.trace.verdict = Verdict::Refuted;
      out.trace.root = root;
      out.trace.nodes = std::move(engine.nodes);
      out.trace = compact_trace(out.trace);
    }
    return out;
  }

  // Top level fanned out over candidates; each worker owns its engine and
  // memo. The reported trace is the one of the earliest refuting candidate.
  std::atomic<std::uint64_t> states{0};
  detail::OnrEngine head(opts, &states);
  head.stats.states = 1;
  ++states;
  if (int t = head.terminal(st); t != -2) {
    out.could_have_representation = false;
    out.trace.verdict = Verdict::Refuted;
    out.trace.root = t;
    out.trace.nodes = std::move(head.nodes);
    out.stats = head.stats;
    return out;
  }
  const auto cands = head.ordered_candidates(st);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{cands.size()};
  std::mutex lock;
  std::vector<std::unique_ptr<detail::OnrEngine>> engines;
  std::vector<int> refuting_node(static_cast<std::size_t>(workers), -1);
  std::vector<std::size_t> refuting_index(static_cast<std::size_t>(workers), cands.size());
  for (int w = 0; w < workers; ++w) engines.push_back(std::make_unique<detail::OnrEngine>(opts, &states));
  std::exception_ptr failure;
  auto work = [&](int w) {
    try {
      auto& engine = *engines[static_cast<std::size_t>(w)];
      detail::OnrEngine::ClassCache cache;
      for (std::size_t i = next++; i < cands.size() && i < best.load(); i = next++) {
        const int node = engine.refute_candidate(st, cands[i], 0, cache);
        if (node < 0) continue;
        std::lock_guard<std::mutex> g(lock);
        if (i < refuting_index[static_cast<std::size_t>(w)]) {
          refuting_index[static_cast<std::size_t>(w)] = i;
          refuting_node[static_cast<std::size_t>(w)] = node;
        }
        std::size_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(lock);
      if (!failure) failure = std::current_exception();
      best = 0;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  out.stats = head.stats;
  for (auto& e : engines) out.stats += e->stats;
  int winner = -1;
  for (int w = 0; w < workers; ++w)
    if (refuting_index[static_cast<std::size_t>(w)] < cands.size() &&
        (winner < 0 || refuting_index[static_cast<std::size_t>(w)] < refuting_index[static_cast<std::size_t>(winner)]))
      winner = w;
  if (winner < 0) return out;
  out.could_have_representation = false;
  out.trace.verdict = Verdict::Refuted;
  out.trace.nodes = std::move(engines[static_cast<std::size_t>(winner)]->nodes);
  out.trace.root = refuting_node[static_cast<std::size_t>(winner)];
  out.trace = compact_trace(out.trace);
  return out;
}

struct DependenceResult {
  bool could_be_dependent = true;
  /// When false: the refuted cases, children indexing `nodes`.
  std::vector<TraceCase> cases;
  std::vector<TraceNode> nodes;
  GraphEngineStats stats;
};

/// Could the vertices of X (|X| <= 3, or 4 with the extension) be mapped
/// to linearly dependent vectors? A single vertex never can.
inline DependenceResult could_be_dependent(const ConstraintState& state, const std::vector<int>& X,
                                           const GraphEngineOptions& opts = {}) {
  const int limit = opts.extended_four_point ? 4 : 3;
  if (X.empty() || static_cast<int>(X.size()) > limit)
    throw Error(ErrorKind::PreconditionViolated, "dependence set must have 1.." + std::to_string(limit) + " vertices");
  std::vector<int> cls = X;
  std::sort(cls.begin(), cls.end());
  if (std::adjacent_find(cls.begin(), cls.end()) != cls.end())
    throw Error(ErrorKind::PreconditionViolated, "dependence set has repeated vertices");
  for (int v : cls)
    if (!state.is_alive(v)) throw Error(ErrorKind::IndexOutOfRange, "vertex " + std::to_string(v) + " is not present");
  detail::OnrEngine engine(opts);
  DependenceResult out;
  std::vector<TraceCase> cases;
  out.could_be_dependent = !engine.class_refuted(state, cls, 0, cases, 0);
  if (!out.could_be_dependent) out.cases = std::move(cases);
  out.nodes = std::move(engine.nodes);
  out.stats = engine.stats;
  return out;
}

/// Runs the refutation on the Latin square graph: Refuted means no quantum
/// Latin square is orthogonal to `ls`.
inline OnrResult check_latin_square_quantum_mate(const LatinSquare& ls, const GraphEngineOptions& opts = {}) {
  if (ls.order() != 6) throw Error(ErrorKind::WrongOrder, "the graph engine runs on order-6 squares, got order " + std::to_string(ls.order()));
  return complement_could_have_onr(ConstraintState(latin_square_graph(ls), 6), opts);
}

namespace detail {

class TraceVerifier {
 public:
  explicit TraceVerifier(const RefutationTrace& trace)
      : trace_(trace), status_(trace.nodes.size(), 0), shapes_(partition_shapes(trace.dimension, trace.extended_four_point)) {}

  bool node_ok(int id, ConstraintState st) {
    if (id < 0 || id >= static_cast<int>(trace_.nodes.size()))
      throw Error(ErrorKind::MalformedTrace, "node index " + std::to_string(id) + " out of range");
    closure_in_place(st);
    const TraceNode& node = trace_.nodes[static_cast<std::size_t>(id)];
    if (st.fingerprint() != node.state_hash) return false;
    auto& status = status_[static_cast<std::size_t>(id)];
    if (status == 2) return true;
    if (status == 1) return false;
    status = 1;
    const bool ok = check(node, st);
    status = ok ? 2 : 0;
    return ok;
  }

 private:
  bool check(const TraceNode& node, const ConstraintState& st) {
    switch (node.reason) {
      case TerminalReason::Clique: {
        const VertexMask m = mask_of(node.clique);
        if (static_cast<int>(node.clique.size()) != st.dimension() + 1 || popcount(m) != st.dimension() + 1) return false;
        if ((m & st.alive()) != m) return false;
        bool ok = true;
        for_each_bit(m, [&](int v) {
          if ((st.neighbors(v) & m) != (m & ~bit(v))) ok = false;
        });
        return ok;
      }
      case TerminalReason::DegenerateTriple:
        return st.has_triple(node.triple) && st.edges_within(node.triple.mask()) >= 2;
      case TerminalReason::ExhaustedCases:
        return check_cases(node, st);
    }
    return false;
  }

  bool check_cases(const TraceNode& node, const ConstraintState& st) {
    const auto& classes = node.partition.classes;
    std::vector<int> sizes;
    std::vector<VertexMask> masks;
    VertexMask seen = 0;
    for (const auto& c : classes) {
      const VertexMask m = mask_of(c);
      if (popcount(m) != static_cast<int>(c.size()) || (m & seen) || (m & st.alive()) != m) return false;
      seen |= m;
      sizes.push_back(static_cast<int>(c.size()));
      masks.push_back(m);
    }
    std::sort(sizes.begin(), sizes.end());
    if (std::find(shapes_.begin(), shapes_.end(), sizes) == shapes_.end()) return false;
    if (!cross_complete(st.adjacency(), masks)) return false;

    std::vector<TraceCase> expected;
    for (int ci = 0; ci < static_cast<int>(classes.size()); ++ci) {
      std::vector<int> cls = classes[static_cast<std::size_t>(ci)];
      std::sort(cls.begin(), cls.end());
      bool already = false;
      auto cases = dependence_cases(st, cls, ci, already);
      if (already) return false;
      expected.insert(expected.end(), cases.begin(), cases.end());
    }
    if (expected.size() != node.cases.size()) return false;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const TraceCase& got = node.cases[i];
      if (got.class_index != expected[i].class_index || got.kind != expected[i].kind ||
          got.vertices != expected[i].vertices)
        return false;
      if (got.kind == CaseKind::Coplanar) {
        if (!coplanar_impossible(st, got.vertices)) return false;
        continue;
      }
      if (!node_ok(got.child, apply_case(st, got))) return false;
    }
    return true;
  }

  const RefutationTrace& trace_;
  std::vector<int> status_;
  std::vector<std::vector<int>> shapes_;
};

}  // namespace detail

/// Replays a refutation against `state` without searching: closures,
/// clique witnesses, candidate completeness, case exhaustiveness and merge
/// legality are all rechecked. An inconclusive trace certifies nothing and
/// is accepted.
inline bool verify_trace(const ConstraintState& state, const RefutationTrace& trace) {
  if (trace.verdict == Verdict::Inconclusive) return true;
  if (trace.dimension != state.dimension()) return false;
  detail::TraceVerifier verifier(trace);
  return verifier.node_ok(trace.root, state);
}

}  // namespace qlsforge
