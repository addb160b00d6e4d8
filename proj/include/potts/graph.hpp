#ifndef POTTS_GRAPH_HPP
#define POTTS_GRAPH_HPP

#include <algorithm>
#include <limits>
#include <queue>
#include <utility>

#include "potts/util.hpp"

namespace potts {

using Edge = std::pair<int, int>;          // stored with u < v
using VertexSet = std::vector<int>;        // sorted, no duplicates
using Mask = std::uint64_t;                // vertex bitmask, valid for n <= 64

inline Mask mask_of(const VertexSet& vs) {
  Mask m = 0;
  for (int v : vs) m |= Mask{1} << v;
  return m;
}

inline VertexSet vertices_of(Mask m) {
  VertexSet vs;
  while (m) {
    vs.push_back(__builtin_ctzll(m));
    m &= m - 1;
  }
  return vs;
}

// Simple undirected graph. Immutable after construction; all algorithms in
// this library take it by const reference.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<Edge> edges) : n_(n) {
    if (n < 0) throw parameter_error("Graph: negative vertex count");
    adj_.resize(n);
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw parameter_error("Graph: edge endpoint out of range");
      if (u == v) throw parameter_error("Graph: self-loop");
      if (u > v) std::swap(u, v);
      edges_.emplace_back(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw parameter_error("Graph: parallel edge");
    for (auto [u, v] : edges_) {
      adj_[u].push_back(v);
      adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
    if (n <= 64) {
      adj_mask_.resize(n, 0);
      for (auto [u, v] : edges_) {
        adj_mask_[u] |= Mask{1} << v;
        adj_mask_[v] |= Mask{1} << u;
      }
    }
  }

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  bool has_edge(int u, int v) const {
    if (u == v) return false;
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
  }

  // Index of {u,v} in edges(), or -1.
  int edge_index(int u, int v) const {
    if (u > v) std::swap(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{u, v});
    if (it != edges_.end() && *it == Edge{u, v})
      return static_cast<int>(it - edges_.begin());
    return -1;
  }

  // Neighborhood bitmask; only valid when n <= 64.
  Mask adj_mask(int v) const { return adj_mask_[v]; }
  bool has_masks() const { return !adj_mask_.empty() || n_ == 0; }

  int max_degree() const {
    int d = 0;
    for (int v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  bool is_regular() const {
    for (int v = 1; v < n_; ++v)
      if (degree(v) != degree(0)) return false;
    return true;
  }

  // Degree if regular, otherwise throws.
  int regular_degree() const {
    if (!is_regular()) throw precondition_error("graph is not regular");
    return n_ ? degree(0) : 0;
  }

  bool is_connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj_[v])
        if (!seen[u]) {
          seen[u] = 1;
          ++cnt;
          stack.push_back(u);
        }
    }
    return cnt == n_;
  }

  bool is_triangle_free() const {
    if (!has_masks()) {
      for (auto [u, v] : edges_)
        for (int w : adj_[u])
          if (w != v && has_edge(w, v)) return false;
      return true;
    }
    for (auto [u, v] : edges_)
      if (adj_mask_[u] & adj_mask_[v]) return false;
    return true;
  }

  // BFS distances from s; -1 where unreachable.
  std::vector<int> distances_from(int s) const {
    std::vector<int> dist(n_, -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int u : adj_[v])
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          q.push(u);
        }
    }
    return dist;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<Mask> adj_mask_;
};

// ---- generators ----

inline Graph complete(int n) {
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return Graph(n, std::move(e));
}

inline Graph complete_bipartite(int a, int b) {
  std::vector<Edge> e;
  for (int u = 0; u < a; ++u)
    for (int v = 0; v < b; ++v) e.emplace_back(u, a + v);
  return Graph(a + b, std::move(e));
}

inline Graph cycle(int n) {
  if (n < 3) throw parameter_error("cycle: need n >= 3");
  std::vector<Edge> e;
  for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return Graph(n, std::move(e));
}

inline Graph path(int n) {
  std::vector<Edge> e;
  for (int v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return Graph(n, std::move(e));
}

// d-dimensional hypercube on 2^d vertices; vertex ids are the bit patterns.
inline Graph hypercube(int d) {
  if (d < 0 || d > 20) throw parameter_error("hypercube: dimension out of range");
  int n = 1 << d;
  std::vector<Edge> e;
  for (int v = 0; v < n; ++v)
    for (int b = 0; b < d; ++b)
      if (!(v >> b & 1)) e.emplace_back(v, v | 1 << b);
  return Graph(n, std::move(e));
}

inline Graph petersen() {
  std::vector<Edge> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);       // outer cycle
    e.emplace_back(i, i + 5);             // spokes
    e.emplace_back(5 + i, 5 + (i + 2) % 5); // inner pentagram
  }
  return Graph(10, std::move(e));
}

// Uniform-ish d-regular graph via the pairing model, resampling until simple.
inline Graph random_regular(int n, int d, Rng& rng, int max_tries = 10000) {
  if (d < 0 || d >= n || (static_cast<long long>(n) * d) % 2 != 0)
    throw parameter_error("random_regular: need 0 <= d < n and n*d even");
  std::vector<int> stubs(static_cast<size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < d; ++k) stubs[static_cast<size_t>(v) * d + k] = v;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    for (size_t i = stubs.size(); i > 1; --i) {
      size_t j = uniform_index(rng, i);
      std::swap(stubs[i - 1], stubs[j]);
    }
    std::vector<Edge> e;
    bool ok = true;
    std::vector<std::vector<char>> seen(n, std::vector<char>(n, 0));
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v || seen[u][v]) {
        ok = false;
        break;
      }
      seen[u][v] = seen[v][u] = 1;
      e.emplace_back(u, v);
    }
    if (ok) return Graph(n, std::move(e));
  }
  throw numeric_error("random_regular: no simple pairing found");
}

inline Graph from_edge_list(int n, const std::vector<Edge>& edges) {
  return Graph(n, edges);
}

// ---- boundaries and expansion ----

inline std::vector<Edge> edge_boundary(const Graph& g, const VertexSet& a) {
  std::vector<char> in(g.n(), 0);
  for (int v : a) {
    if (v < 0 || v >= g.n()) throw parameter_error("edge_boundary: vertex out of range");
    in[v] = 1;
  }
  std::vector<Edge> out;
  for (auto [u, v] : g.edges())
    if (in[u] != in[v]) out.emplace_back(u, v);
  return out;
}

inline int boundary_size(const Graph& g, Mask a) {
  // |boundary| = sum_{v in A} deg(v) - 2 e(A)
  int degsum = 0, twice_internal = 0;
  Mask rest = a;
  while (rest) {
    int v = __builtin_ctzll(rest);
    rest &= rest - 1;
    degsum += g.degree(v);
    twice_internal += __builtin_popcountll(g.adj_mask(v) & a);
  }
  return degsum - twice_internal;
}

struct EtaExpansion {
  Fraction eta;        // min |boundary(A)| / |A| over 1 <= |A| <= n/2
  VertexSet argmin;
};

/// Exact expansion constant by exhaustive subset sweep. Gated: 2^n subsets.
inline EtaExpansion eta_expansion(const Graph& g,
                                  const SizeGuards& guards = SizeGuards::current()) {
  int n = g.n();
  if (n < 1) throw parameter_error("eta_expansion: empty graph");
  if (n > guards.subset_vertices || n > 64)
    throw size_error("eta_expansion: n exceeds exhaustive subset guard (" +
                     std::to_string(guards.subset_vertices) + ")");
  Fraction best(std::numeric_limits<long long>::max() / 4, 1);
  Mask best_mask = 1;
  Mask full = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  for (Mask a = 1; a <= full; ++a) {
    int sz = __builtin_popcountll(a);
    if (2 * sz > n) continue;
    Fraction ratio(boundary_size(g, a), sz);
    if (ratio < best) {
      best = ratio;
      best_mask = a;
    }
  }
  return {best, vertices_of(best_mask)};
}

inline bool check_eta(const Graph& g, const Fraction& eta,
                      const SizeGuards& guards = SizeGuards::current()) {
  return eta <= eta_expansion(g, guards).eta;
}

struct BoundaryFloor {
  bool ok;             // min >= 2d - 2
  int min_boundary;
  int threshold;       // 2d - 2
  VertexSet witness;   // a set attaining the minimum
};

// Checks that every vertex set A with 2 <= |A| <= n/2 has |boundary(A)| >= 2d-2.
// Only meaningful (and only defined) for regular graphs.
inline BoundaryFloor min_boundary_check(const Graph& g,
                                        const SizeGuards& guards = SizeGuards::current()) {
  int d = g.regular_degree();
  int n = g.n();
  if (n > guards.subset_vertices || n > 64)
    throw size_error("min_boundary_check: n exceeds exhaustive subset guard");
  int best = std::numeric_limits<int>::max();
  Mask best_mask = 0;
  Mask full = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  for (Mask a = 1; a <= full; ++a) {
    int sz = __builtin_popcountll(a);
    if (sz < 2 || 2 * sz > n) continue;
    int b = boundary_size(g, a);
    if (b < best) {
      best = b;
      best_mask = a;
    }
  }
  if (best_mask == 0) {
    // No set in range (n < 4): condition holds vacuously.
    return {true, std::numeric_limits<int>::max(), 2 * d - 2, {}};
  }
  return {best >= 2 * d - 2, best, 2 * d - 2, vertices_of(best_mask)};
}

// k-th graph power: edge where 1 <= dist <= k.
inline Graph graph_power(const Graph& g, int k) {
  if (k < 1) throw parameter_error("graph_power: k >= 1 required");
  std::vector<Edge> e;
  for (int v = 0; v < g.n(); ++v) {
    auto dist = g.distances_from(v);
    for (int u = v + 1; u < g.n(); ++u)
      if (dist[u] >= 1 && dist[u] <= k) e.emplace_back(v, u);
  }
  return Graph(g.n(), std::move(e));
}

}  // namespace potts

#endif
