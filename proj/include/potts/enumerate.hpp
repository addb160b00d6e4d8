#ifndef POTTS_ENUMERATE_HPP
#define POTTS_ENUMERATE_HPP

#include <functional>

#include "potts/graph.hpp"

namespace potts {

enum class SubgraphMode { vertex_induced, with_edge_subsets };

namespace detail {

// Connected-set enumeration with the ban-after-branch scheme: every connected
// superset of {root} inside `allowed` is produced exactly once.
template <class F>
void extend_connected(const Graph& g, Mask s, Mask cand, int max_size, F& yield) {
  yield(s);
  if (__builtin_popcountll(s) >= max_size) return;
  Mask closed = 0;  // vertices already in s or adjacent to it
  Mask rest = s;
  while (rest) {
    int v = __builtin_ctzll(rest);
    rest &= rest - 1;
    closed |= g.adj_mask(v);
  }
  closed |= s;
  Mask banned = 0;
  while (cand) {
    int v = __builtin_ctzll(cand);
    Mask vbit = Mask{1} << v;
    cand &= ~vbit;
    Mask grown = (g.adj_mask(v) & ~closed & ~banned) | cand;
    extend_connected(g, s | vbit, grown, max_size, yield);
    banned |= vbit;
  }
}

// Same scheme on edge indices: every edge subset whose subgraph is connected
// and touches the root component is produced exactly once.
template <class F>
void extend_connected_edges(const Graph& g, std::uint64_t fmask, Mask vmask,
                            std::uint64_t cand, std::uint64_t banned, int max_vertices,
                            Mask allowed, F& yield) {
  yield(fmask, vmask);
  while (cand) {
    int ei = __builtin_ctzll(cand);
    std::uint64_t ebit = std::uint64_t{1} << ei;
    cand &= ~ebit;
    auto [u, v] = g.edges()[ei];
    Mask uv = (Mask{1} << u) | (Mask{1} << v);
    Mask nv = vmask | uv;
    if ((uv & ~allowed) != 0) {
      banned |= ebit;
      continue;
    }
    if (__builtin_popcountll(nv) > max_vertices) {
      banned |= ebit;
      continue;
    }
    // new candidates: edges incident to a newly attached vertex
    std::uint64_t grown = cand;
    Mask fresh = nv & ~vmask;
    Mask rest = fresh;
    while (rest) {
      int w = __builtin_ctzll(rest);
      rest &= rest - 1;
      for (int x : g.neighbors(w)) {
        int idx = g.edge_index(w, x);
        std::uint64_t bit = std::uint64_t{1} << idx;
        if (!(fmask & bit) && bit != ebit && !(banned & bit)) grown |= bit;
      }
    }
    extend_connected_edges(g, fmask | ebit, nv, grown, banned, max_vertices, allowed,
                           yield);
    banned |= ebit;
  }
}

}  // namespace detail

// Streams every connected induced vertex set containing `root` (vertices
// restricted to `allowed`) with size <= max_size. Exactly-once per set.
template <class F>
void for_each_connected_set(const Graph& g, int root, int max_size, Mask allowed,
                            F&& yield) {
  if (g.n() > 64) throw size_error("connected-set enumeration requires n <= 64");
  if (root < 0 || root >= g.n()) throw parameter_error("root out of range");
  if (!(allowed >> root & 1) || max_size < 1) return;
  Mask rbit = Mask{1} << root;
  F& y = yield;
  detail::extend_connected(g, rbit, g.adj_mask(root) & allowed & ~rbit, max_size, y);
}

// Streams every connected subgraph (vertex set, edge subset) whose vertex set
// contains `root`, has size <= max_vertices, and lies inside `allowed`.
// The trivial ({root}, {}) pair is included. Exactly-once per edge subset.
template <class F>
void for_each_connected_subgraph(const Graph& g, int root, int max_vertices,
                                 Mask allowed, F&& yield) {
  if (g.n() > 64 || g.m() > 64)
    throw size_error("connected-subgraph enumeration requires n, m <= 64");
  if (root < 0 || root >= g.n()) throw parameter_error("root out of range");
  if (!(allowed >> root & 1) || max_vertices < 1) return;
  yield(std::uint64_t{0}, Mask{1} << root);
  if (max_vertices < 2) return;
  std::uint64_t cand = 0;
  for (int x : g.neighbors(root)) cand |= std::uint64_t{1} << g.edge_index(root, x);
  auto inner = [&](std::uint64_t fmask, Mask vmask) {
    if (fmask) yield(fmask, vmask);
  };
  detail::extend_connected_edges(g, 0, Mask{1} << root, cand, 0, max_vertices, allowed,
                                 inner);
}

// Materialized listing used by the CLI and tests. For vertex_induced mode the
// edge list holds the induced edges; for with_edge_subsets it is the subset.
struct SubgraphRecord {
  VertexSet vertices;
  std::vector<Edge> edges;
};

inline std::vector<Edge> induced_edges(const Graph& g, Mask vmask) {
  std::vector<Edge> out;
  for (auto [u, v] : g.edges())
    if ((vmask >> u & 1) && (vmask >> v & 1)) out.emplace_back(u, v);
  return out;
}

inline std::vector<SubgraphRecord> enumerate_connected_sets(
    const Graph& g, int root, int max_size, SubgraphMode mode,
    const SizeGuards& guards = SizeGuards::current()) {
  if (g.n() > guards.subset_vertices || g.n() > 64)
    throw size_error("enumerate_connected_sets: n exceeds subset guard");
  std::vector<SubgraphRecord> out;
  Mask all = g.n() == 64 ? ~Mask{0} : (Mask{1} << g.n()) - 1;
  if (mode == SubgraphMode::vertex_induced) {
    for_each_connected_set(g, root, max_size, all, [&](Mask s) {
      out.push_back({vertices_of(s), induced_edges(g, s)});
    });
  } else {
    for_each_connected_subgraph(g, root, max_size, all,
                                [&](std::uint64_t fmask, Mask vmask) {
                                  std::vector<Edge> es;
                                  for (int i = 0; i < g.m(); ++i)
                                    if (fmask >> i & 1) es.push_back(g.edges()[i]);
                                  out.push_back({vertices_of(vmask), std::move(es)});
                                });
  }
  return out;
}

// Number of connected induced sets containing u, |A| <= n/2, |boundary| = b.
inline long long count_connected_sets_with_boundary(
    const Graph& g, int u, int b, const SizeGuards& guards = SizeGuards::current()) {
  if (g.n() > guards.subset_vertices || g.n() > 64)
    throw size_error("count_connected_sets_with_boundary: n exceeds subset guard");
  long long count = 0;
  Mask all = g.n() == 64 ? ~Mask{0} : (Mask{1} << g.n()) - 1;
  for_each_connected_set(g, u, g.n() / 2, all, [&](Mask s) {
    if (boundary_size(g, s) == b) ++count;
  });
  return count;
}

// ---- core-set certificate ----
//
// For a connected set A: the "wide" neighborhood graph J joins vertex u to
// every edge that touches a neighbor of u (which includes all edges at u).
// A core subset A0 <= A is grown greedily so its J-neighborhoods are pairwise
// disjoint. The certificate checks the two facts downstream arguments rely
// on: A0 stays connected in G^7 after adding any single vertex of A, and
// |A0| <= (b/d)(2 + 1/eta) with b = |boundary(A)| and eta the exact expansion
// constant of G.

struct CoreSetCertificate {
  VertexSet core;             // A0
  bool connected_in_power7;   // A0 + {x} connected in G^7 for every x in A
  bool size_bound_ok;         // |A0| <= (b/d)(2 + 1/eta)
  double size_bound;
  int boundary;               // b
  std::vector<int> j_degrees; // |N_J(u)| for u in A0 (each in [C(d+1,2), d^2])
};

inline CoreSetCertificate core_set_certificate(
    const Graph& g, const VertexSet& a,
    const SizeGuards& guards = SizeGuards::current()) {
  int d = g.regular_degree();
  if (g.n() > 64) throw size_error("core_set_certificate: n <= 64 required");
  if (a.empty()) throw parameter_error("core_set_certificate: empty set");

  // J-neighborhood of u as an edge-index set.
  auto j_nbhd = [&](int u) {
    std::uint64_t em = 0;
    for (int w : g.neighbors(u))
      for (int x : g.neighbors(w)) em |= std::uint64_t{1} << g.edge_index(w, x);
    return em;
  };
  if (g.m() > 64) throw size_error("core_set_certificate: m <= 64 required");

  VertexSet core;
  std::uint64_t taken = 0;
  for (int u : a) {
    std::uint64_t ju = j_nbhd(u);
    if ((ju & taken) == 0) {
      core.push_back(u);
      taken |= ju;
    }
  }

  Graph g7 = graph_power(g, 7);
  Mask cmask = mask_of(core);
  auto connected_in = [&](const Graph& h, Mask s) {
    Mask seen = s & (~s + 1);  // lowest bit
    bool grew = true;
    while (grew) {
      grew = false;
      Mask rest = seen;
      while (rest) {
        int v = __builtin_ctzll(rest);
        rest &= rest - 1;
        Mask nb = h.adj_mask(v) & s & ~seen;
        if (nb) {
          seen |= nb;
          grew = true;
        }
      }
    }
    return seen == s;
  };
  bool conn7 = true;
  for (int x : a)
    if (!connected_in(g7, cmask | (Mask{1} << x))) {
      conn7 = false;
      break;
    }

  int b = static_cast<int>(edge_boundary(g, a).size());
  auto eta = eta_expansion(g, guards).eta;
  if (eta.num == 0) throw precondition_error("core_set_certificate: disconnected graph");
  double bound =
      (static_cast<double>(b) / d) * (2.0 + static_cast<double>(eta.den) / eta.num);
  std::vector<int> jdegs;
  for (int u : core) jdegs.push_back(__builtin_popcountll(j_nbhd(u)));
  return {core, conn7, static_cast<double>(core.size()) <= bound + 1e-12, bound, b,
          jdegs};
}

}  // namespace potts

#endif
