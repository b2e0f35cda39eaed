#pragma once

#include <functional>
#include <vector>

namespace qlsforge {

/// Knuth's Algorithm X over a dancing-links matrix. Columns are the items
/// to cover; each row lists the items it covers.
class ExactCover {
 public:
  explicit ExactCover(int column_count) : columns_(column_count) {
    nodes_.resize(static_cast<std::size_t>(column_count) + 1);
    for (int c = 0; c <= column_count; ++c) {
      auto& h = nodes_[c];
      h.left = c == 0 ? column_count : c - 1;
      h.right = c == column_count ? 0 : c + 1;
      h.up = h.down = c;
      h.column = c;
      h.row = -1;
    }
    size_.assign(static_cast<std::size_t>(column_count) + 1, 0);
  }

  /// Columns are 0-based; duplicates are not allowed within a row.
  void add_row(const std::vector<int>& columns) {
    const int row_id = rows_++;
    int first = -1;
    for (int c0 : columns) {
      const int c = c0 + 1;
      const int id = static_cast<int>(nodes_.size());
      Node node;
      node.column = c;
      node.row = row_id;
      node.down = c;
      node.up = nodes_[c].up;
      nodes_[nodes_[c].up].down = id;
      nodes_[c].up = id;
      if (first < 0) {
        node.left = node.right = id;
        first = id;
      } else {
        node.right = first;
        node.left = nodes_[first].left;
        nodes_.push_back(node);
        nodes_[nodes_[first].left].right = id;
        nodes_[first].left = id;
        ++size_[c];
        continue;
      }
      nodes_.push_back(node);
      ++size_[c];
    }
  }

  /// Calls `visit(rows)` for each exact cover; stops when visit returns false.
  void solve(const std::function<bool(const std::vector<int>&)>& visit) {
    std::vector<int> partial;
    search(partial, visit);
  }

  std::vector<std::vector<int>> all_solutions() {
    std::vector<std::vector<int>> out;
    solve([&](const std::vector<int>& rows) {
      out.push_back(rows);
      return true;
    });
    return out;
  }

 private:
  struct Node {
    int left = 0, right = 0, up = 0, down = 0, column = 0, row = -1;
  };

  void cover(int c) {
    nodes_[nodes_[c].right].left = nodes_[c].left;
    nodes_[nodes_[c].left].right = nodes_[c].right;
    for (int i = nodes_[c].down; i != c; i = nodes_[i].down)
      for (int j = nodes_[i].right; j != i; j = nodes_[j].right) {
        nodes_[nodes_[j].down].up = nodes_[j].up;
        nodes_[nodes_[j].up].down = nodes_[j].down;
        --size_[nodes_[j].column];
      }
  }

  void uncover(int c) {
    for (int i = nodes_[c].up; i != c; i = nodes_[i].up)
      for (int j = nodes_[i].left; j != i; j = nodes_[j].left) {
        ++size_[nodes_[j].column];
        nodes_[nodes_[j].down].up = j;
        nodes_[nodes_[j].up].down = j;
      }
    nodes_[nodes_[c].right].left = c;
    nodes_[nodes_[c].left].right = c;
  }

  bool search(std::vector<int>& partial, const std::function<bool(const std::vector<int>&)>& visit) {
    if (nodes_[0].right == 0) return visit(partial);
    int best = -1;
    for (int c = nodes_[0].right; c != 0; c = nodes_[c].right)
      if (best < 0 || size_[c] < size_[best]) best = c;
    if (size_[best] == 0) return true;
    cover(best);
    bool keep_going = true;
    for (int r = nodes_[best].down; r != best && keep_going; r = nodes_[r].down) {
      partial.push_back(nodes_[r].row);
      for (int j = nodes_[r].right; j != r; j = nodes_[j].right) cover(nodes_[j].column);
      keep_going = search(partial, visit);
      for (int j = nodes_[r].left; j != r; j = nodes_[j].left) uncover(nodes_[j].column);
      partial.pop_back();
    }
    uncover(best);
    return keep_going;
  }

  int columns_;
  int rows_ = 0;
  std::vector<Node> nodes_;
  std::vector<int> size_;
};

}  // namespace qlsforge
