#ifndef POTTS_MINCUT_HPP
#define POTTS_MINCUT_HPP

#include <algorithm>
#include <limits>
#include <map>

#include "potts/graph.hpp"

namespace potts {

// Multigraph under edge contraction. Keeps the map from original vertices to
// super-vertices so contracted colorings/cuts can be pulled back to G.
class MultiGraph {
 public:
  explicit MultiGraph(const Graph& g) : n_orig_(g.n()), parent_(g.n()) {
    for (int v = 0; v < g.n(); ++v) parent_[v] = v;
    for (auto e : g.edges()) edges_.push_back(e);
    vertex_count_ = g.n();
  }

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  int find(int v) const {
    while (parent_[v] != v) v = parent_[v];
    return v;
  }

  // Contract the endpoints of edges_[idx]; drops the self-loops this creates.
  void contract_edge(int idx) {
    auto [u, v] = edges_[idx];
    int ru = find(u), rv = find(v);
    if (ru == rv) throw numeric_error("contract_edge: edge already collapsed");
    parent_[rv] = ru;
    --vertex_count_;
    std::vector<Edge> keep;
    keep.reserve(edges_.size() - 1);
    for (auto [a, b] : edges_)
      if (find(a) != find(b)) keep.emplace_back(a, b);
    edges_ = std::move(keep);
  }

  // Multiplicity-weighted uniform edge choice.
  int random_edge(Rng& rng) const {
    if (edges_.empty()) throw numeric_error("random_edge: no edges left");
    return static_cast<int>(uniform_index(rng, edges_.size()));
  }

  // Degree of the super-vertex containing original vertex v (with multiplicity).
  int super_degree(int v) const {
    int r = find(v);
    int d = 0;
    for (auto [a, b] : edges_) {
      if (find(a) == r) ++d;
      if (find(b) == r) ++d;
    }
    return d;
  }

  // Distinct super-vertex representatives.
  std::vector<int> super_vertices() const {
    std::vector<int> reps;
    for (int v = 0; v < n_orig_; ++v)
      if (find(v) == v) reps.push_back(v);
    return reps;
  }

  // Original vertices grouped under representative r.
  VertexSet block_of(int r) const {
    VertexSet out;
    for (int v = 0; v < n_orig_; ++v)
      if (find(v) == r) out.push_back(v);
    return out;
  }

  // Collapses to a weighted simple graph on the super-vertices
  // (weight = parallel edge multiplicity), for min-cut computations.
  std::vector<std::vector<long long>> weight_matrix() const {
    auto reps = super_vertices();
    std::map<int, int> idx;
    for (size_t i = 0; i < reps.size(); ++i) idx[reps[i]] = static_cast<int>(i);
    std::vector<std::vector<long long>> w(reps.size(),
                                          std::vector<long long>(reps.size(), 0));
    for (auto [a, b] : edges_) {
      int i = idx.at(find(a)), j = idx.at(find(b));
      ++w[i][j];
      ++w[j][i];
    }
    return w;
  }

 private:
  int n_orig_;
  int vertex_count_;
  std::vector<int> parent_;
  std::vector<Edge> edges_;
};

// Stoer-Wagner on a weight matrix. Deterministic. Returns the min cut weight;
// 0 means the graph is disconnected.
inline long long stoer_wagner(std::vector<std::vector<long long>> w) {
  int n = static_cast<int>(w.size());
  if (n <= 1) return 0;
  std::vector<int> alive(n);
  for (int i = 0; i < n; ++i) alive[i] = i;
  long long best = std::numeric_limits<long long>::max();
  while (alive.size() > 1) {
    // maximum adjacency order over the surviving vertices
    std::vector<long long> conn(alive.size(), 0);
    std::vector<char> added(alive.size(), 0);
    int prev = -1, last = -1;
    for (size_t step = 0; step < alive.size(); ++step) {
      int pick = -1;
      for (size_t i = 0; i < alive.size(); ++i)
        if (!added[i] && (pick < 0 || conn[i] > conn[pick]))
          pick = static_cast<int>(i);
      added[pick] = 1;
      prev = last;
      last = pick;
      if (step + 1 == alive.size()) {
        best = std::min(best, conn[pick]);
        break;
      }
      for (size_t i = 0; i < alive.size(); ++i)
        if (!added[i]) conn[i] += w[alive[pick]][alive[i]];
    }
    // merge last into prev
    int a = alive[prev], b = alive[last];
    for (size_t i = 0; i < alive.size(); ++i) {
      int c = alive[i];
      w[a][c] += w[b][c];
      w[c][a] += w[c][b];
    }
    std::swap(alive[last], alive.back());
    alive.pop_back();
  }
  return best == std::numeric_limits<long long>::max() ? 0 : best;
}

inline long long min_cut(const Graph& g) {
  if (g.n() <= 1) return 0;
  if (!g.is_connected()) return 0;
  MultiGraph mg(g);
  return stoer_wagner(mg.weight_matrix());
}

inline long long min_cut(const MultiGraph& mg) {
  if (mg.vertex_count() <= 1) return 0;
  return stoer_wagner(mg.weight_matrix());
}

// Exhaustive sweep over all 2^(n-1)-1 cuts; the oracle min_cut is tested
// against. Gated by the all-cuts guard.
inline long long min_cut_exhaustive(const Graph& g,
                                    const SizeGuards& guards = SizeGuards::current()) {
  int n = g.n();
  if (n > guards.allcut_vertices || n > 63)
    throw size_error("min_cut_exhaustive: n exceeds all-cuts guard");
  if (n <= 1) return 0;
  long long best = std::numeric_limits<long long>::max();
  // Sides not containing vertex n-1: one representative per bipartition.
  for (Mask side = 1; side < (Mask{1} << (n - 1)); ++side)
    best = std::min(best, static_cast<long long>(boundary_size(g, side)));
  return best;
}

}  // namespace potts

#endif
