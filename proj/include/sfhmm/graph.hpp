#pragma once

#include <filesystem>
#include <utility>
#include <vector>

namespace sfhmm {

// Decomposable undirected graph with a junction-tree ordering of its
// cliques. separators[j] is the separator of cliques[j + 1] against the
// union of the cliques before it (possibly empty for disconnected graphs).
class DependencyGraph {
 public:
  DependencyGraph() = default;
  // Throws FormatError for self/duplicate/out-of-range edges and
  // NotDecomposableError when maximum cardinality search needs fill-in.
  DependencyGraph(int n, const std::vector<std::pair<int, int>>& edges);

  static DependencyGraph complete(int n);
  static DependencyGraph edgeless(int n);
  static DependencyGraph path(int n);
  // rows x cols lattice with horizontal, vertical and diagonal adjacency;
  // with two rows its cliques are the 2x2 blocks.
  static DependencyGraph grid(int rows, int cols);

  int node_count() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::vector<int>>& cliques() const { return cliques_; }
  const std::vector<std::vector<int>>& separators() const { return separators_; }
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  bool has_edge(int i, int j) const { return adjacency_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  int max_clique_size() const;
  // Vertices in the order visited by maximum cardinality search.
  const std::vector<int>& mcs_order() const { return order_; }

  bool operator==(const DependencyGraph& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;  // sorted, u < v
  std::vector<char> adjacency_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> cliques_;
  std::vector<std::vector<int>> separators_;
  std::vector<int> order_;
};

// Edge list file: one "i j" pair per line, 0-based, '#' starts a comment.
DependencyGraph build_graph(const std::filesystem::path& edge_list, int n);
void save_graph(const std::filesystem::path& path, const DependencyGraph& g);

// Direct check that each separator lies inside an earlier clique and equals
// the intersection with the union of earlier cliques.
bool has_running_intersection(const DependencyGraph& g);

}  // namespace sfhmm
