#include "sfhmm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "sfhmm/errors.hpp"

namespace sfhmm {

namespace {

bool subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

DependencyGraph::DependencyGraph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n) {
  if (n < 1) throw FormatError("graph needs at least one node");
  adjacency_.assign(static_cast<std::size_t>(n) * n, 0);
  neighbors_.assign(n, {});
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw FormatError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                        ") references a node outside [0, " + std::to_string(n) + ")");
    if (u == v) throw FormatError("self edge on node " + std::to_string(u));
    if (has_edge(u, v))
      throw FormatError("duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    adjacency_[static_cast<std::size_t>(u) * n + v] = 1;
    adjacency_[static_cast<std::size_t>(v) * n + u] = 1;
    edges_.emplace_back(std::min(u, v), std::max(u, v));
    neighbors_[u].push_back(v);
    neighbors_[v].push_back(u);
  }
  std::sort(edges_.begin(), edges_.end());
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());

  // Maximum cardinality search.
  std::vector<int> weight(n, 0);
  std::vector<char> visited(n, 0);
  std::vector<std::vector<int>> earlier(n);  // previously visited neighbors
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!visited[v] && (best < 0 || weight[v] > weight[best])) best = v;
    visited[best] = 1;
    order_.push_back(best);
    for (int w : neighbors_[best]) {
      if (visited[w] && w != best) earlier[best].push_back(w);
      if (!visited[w]) ++weight[w];
    }
    std::sort(earlier[best].begin(), earlier[best].end());
  }

  // Zero fill-in: every set of earlier neighbors must be complete.
  for (int v : order_) {
    const auto& p = earlier[v];
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = a + 1; b < p.size(); ++b)
        if (!has_edge(p[a], p[b]))
          throw NotDecomposableError(
              "graph is not decomposable: neighbors " + std::to_string(p[a]) + " and " +
                  std::to_string(p[b]) + " of node " + std::to_string(v) +
                  " are not adjacent; consider adding edge " + std::to_string(p[a]) + " " +
                  std::to_string(p[b]),
              p[a], p[b]);
  }

  // Candidate cliques {v} + earlier(v) in visit order; keep the maximal ones.
  std::vector<std::vector<int>> candidates;
  for (int v : order_) {
    std::vector<int> c = earlier[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    bool maximal = true;
    for (std::size_t b = 0; b < candidates.size() && maximal; ++b)
      if (a != b && candidates[a].size() <= candidates[b].size() &&
          subset(candidates[a], candidates[b]) &&
          (candidates[a].size() < candidates[b].size() || b > a))
        maximal = false;
    if (maximal) cliques_.push_back(candidates[a]);
  }
  std::set<int> seen(cliques_[0].begin(), cliques_[0].end());
  for (std::size_t j = 1; j < cliques_.size(); ++j) {
    std::vector<int> s;
    for (int v : cliques_[j])
      if (seen.count(v)) s.push_back(v);
    separators_.push_back(s);
    seen.insert(cliques_[j].begin(), cliques_[j].end());
  }
  if (!has_running_intersection(*this))
    throw NumericError("internal error: clique ordering violates running intersection");
}

DependencyGraph DependencyGraph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return DependencyGraph(n, e);
}

DependencyGraph DependencyGraph::edgeless(int n) { return DependencyGraph(n, {}); }

DependencyGraph DependencyGraph::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return DependencyGraph(n, e);
}

DependencyGraph DependencyGraph::grid(int rows, int cols) {
  std::vector<std::pair<int, int>> e;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
      if (r + 1 < rows && c + 1 < cols) e.emplace_back(id(r, c), id(r + 1, c + 1));
      if (r + 1 < rows && c > 0) e.emplace_back(id(r, c), id(r + 1, c - 1));
    }
  return DependencyGraph(rows * cols, e);
}

int DependencyGraph::max_clique_size() const {
  std::size_t m = 0;
  for (const auto& c : cliques_) m = std::max(m, c.size());
  return static_cast<int>(m);
}

bool has_running_intersection(const DependencyGraph& g) {
  const auto& C = g.cliques();
  const auto& S = g.separators();
  if (C.empty() || S.size() + 1 != C.size()) return false;
  std::vector<char> covered(g.node_count(), 0);
  for (int v : C[0]) covered[v] = 1;
  for (std::size_t j = 1; j < C.size(); ++j) {
    std::vector<int> inter;
    for (int v : C[j])
      if (covered[v]) inter.push_back(v);
    if (inter != S[j - 1]) return false;
    bool contained = S[j - 1].empty();
    for (std::size_t i = 0; i < j && !contained; ++i) contained = subset(S[j - 1], C[i]);
    if (!contained) return false;
    for (int v : C[j]) covered[v] = 1;
  }
  for (char c : covered)
    if (!c) return false;
  return true;
}

DependencyGraph build_graph(const std::filesystem::path& edge_list, int n) {
  std::ifstream in(edge_list);
  if (!in) throw IoError("cannot open graph file " + edge_list.string());
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int u, v;
    if (!(ss >> u)) {
      std::string rest;
      ss.clear();
      if (ss >> rest) throw FormatError(edge_list.string() + ": bad edge at line " + std::to_string(lineno));
      continue;
    }
    std::string extra;
    if (!(ss >> v) || (ss >> extra))
      throw FormatError(edge_list.string() + ": expected \"i j\" at line " + std::to_string(lineno));
    edges.emplace_back(u, v);
  }
  return DependencyGraph(n, edges);
}

void save_graph(const std::filesystem::path& path, const DependencyGraph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# nodes " << g.node_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace sfhmm
