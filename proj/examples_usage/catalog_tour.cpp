// Walks the order-6 catalog: invariants, mates and the graph-engine verdict
// for the first square.
#include <iomanip>
#include <iostream>

#include "qlsforge/graph_engine.hpp"
#include "qlsforge/latin_algorithms.hpp"

int main() {
  using namespace qlsforge;
  const auto& cat = catalog_main_classes();
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto& ls = cat[i];
    std::cout << "#" << std::setw(2) << i + 1 << "  " << ls.to_compact() << "  transversals " << std::setw(2)
              << count_transversals(ls) << "  order-3 subsquares " << find_subsquares(ls, 3).size() << "  mate "
              << (find_orthogonal_mate(ls) ? "yes" : "no") << "\n";
  }

  const auto result = check_latin_square_quantum_mate(cat.front());
  const bool ok = verify_trace(ConstraintState(latin_square_graph(cat.front()), 6), result.trace);
  std::cout << "\n#1 quantum mate: " << to_string(result.trace.verdict) << ", " << result.trace.nodes.size()
            << " trace nodes, replay " << (ok ? "accepted" : "rejected") << "\n";
  return ok ? 0 : 1;
}
