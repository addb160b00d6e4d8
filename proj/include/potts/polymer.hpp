#ifndef POTTS_POLYMER_HPP
#define POTTS_POLYMER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "potts/enumerate.hpp"
#include "potts/exact.hpp"
#include "potts/graph.hpp"

namespace potts {

// A polymer with its weight and the decay/size decorations used by the
// Kotecky-Preiss condition. block_mask marks the vertices another polymer may
// not touch: the closed neighborhood in the ordered regime (incompatible
// means distance <= 1), the polymer itself in the disordered regime
// (incompatible means sharing a vertex).
struct Polymer {
  int id = -1;
  Mask vmask = 0;
  Mask block_mask = 0;
  VertexSet vertices;
  std::vector<Edge> edges;
  int v = 0;
  int e = 0;
  long long boundary = 0;  // |edge boundary|, ordered regime only
  double log_weight = 0;
  double log_tilt = 0;  // extra e^{v/d} tilt available in the ordered regime
  double f = 0;
  double g = 0;
};

enum class PolymerRegime { low_temperature, high_temperature };

struct PolymerModel {
  PolymerRegime regime = PolymerRegime::high_temperature;
  std::shared_ptr<const Graph> graph;  // owned copy, models outlive their input
  double q = 2;
  double beta = 0;
  double p = 0;
  double eps = 0.25;
  int d = 0;  // regularity degree (ordered regime)
  std::vector<Polymer> polymers;

  bool incompatible(int a, int b) const {
    return (polymers[a].block_mask & polymers[b].vmask) != 0;
  }
  double log_weight(int i, bool tilted = false) const {
    return polymers[i].log_weight + (tilted ? polymers[i].log_tilt : 0.0);
  }
};

// Relabeled copy of the subgraph a polymer spans.
inline Graph polymer_subgraph(const Polymer& gamma) {
  std::vector<int> pos(gamma.vertices.empty() ? 0 : gamma.vertices.back() + 1, -1);
  for (size_t i = 0; i < gamma.vertices.size(); ++i) pos[gamma.vertices[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  edges.reserve(gamma.edges.size());
  for (auto [u, v] : gamma.edges) edges.push_back({pos[u], pos[v]});
  return Graph(gamma.v, edges);
}

// Ordered-regime polymers: connected induced subgraphs on fewer than n/2
// vertices. Weight e^{-beta(|boundary| + e)} * Z_gamma(q - 1, beta); decay
// f = eps*v*ln(q)/(4d) and size g = eps*|boundary|*ln(q)/(4d) + v/d.
inline PolymerModel make_low_temperature_model(
    const Graph& g, double q, double beta, double eps = 0.25,
    const SizeGuards& guards = SizeGuards::current(),
    std::size_t max_polymers = 2'000'000) {
  if (!g.has_masks()) throw size_error("low_temperature_model: n <= 64 required");
  if (q < 2) throw parameter_error("low_temperature_model: q >= 2 required");
  if (beta < 0 || eps <= 0) throw parameter_error("low_temperature_model: beta >= 0, eps > 0");
  PolymerModel model;
  model.regime = PolymerRegime::low_temperature;
  model.graph = std::make_shared<const Graph>(g);
  model.q = q;
  model.beta = beta;
  model.p = std::expm1(beta);
  model.eps = eps;
  model.d = g.regular_degree();
  int max_size = (g.n() - 1) / 2;  // v < n/2
  double lq = std::log(q);
  for (int r = 0; r < g.n(); ++r) {
    Mask allowed = ~Mask{0};
    if (r > 0) allowed &= ~((Mask{1} << r) - 1);
    if (g.n() < 64) allowed &= (Mask{1} << g.n()) - 1;
    for_each_connected_set(g, r, max_size, allowed, [&](Mask vm) {
      Polymer gamma;
      gamma.id = static_cast<int>(model.polymers.size());
      gamma.vmask = vm;
      gamma.vertices = vertices_of(vm);
      gamma.edges = induced_edges(g, vm);
      gamma.v = static_cast<int>(gamma.vertices.size());
      gamma.e = static_cast<int>(gamma.edges.size());
      gamma.boundary = boundary_size(g, vm);
      Mask nb = vm;
      for (int u : gamma.vertices) nb |= g.adj_mask(u);
      gamma.block_mask = nb;
      Graph sub = polymer_subgraph(gamma);
      gamma.log_weight = -beta * (gamma.boundary + gamma.e) +
                         potts_log_partition(sub, q - 1, beta, PottsBackend::automatic, guards);
      gamma.log_tilt = static_cast<double>(gamma.v) / model.d;
      gamma.f = eps * gamma.v * lq / (4.0 * model.d);
      gamma.g = eps * gamma.boundary * lq / (4.0 * model.d) +
                static_cast<double>(gamma.v) / model.d;
      model.polymers.push_back(std::move(gamma));
      if (model.polymers.size() > max_polymers)
        throw size_error("low_temperature_model: polymer count exceeds cap");
    });
  }
  return model;
}

// Disordered-regime polymers: connected subgraphs (vertex set plus an edge
// subset spanning it) with at least one edge. Weight q^{1-v} p^e; both
// decorations equal the vertex count.
inline PolymerModel make_high_temperature_model(
    const Graph& g, double q, double beta,
    const SizeGuards& guards = SizeGuards::current(),
    std::size_t max_polymers = 2'000'000) {
  (void)guards;
  if (!g.has_masks()) throw size_error("high_temperature_model: n <= 64 required");
  if (g.m() > 64) throw size_error("high_temperature_model: m <= 64 required");
  if (q < 1) throw parameter_error("high_temperature_model: q >= 1 required");
  if (beta < 0) throw parameter_error("high_temperature_model: beta >= 0");
  PolymerModel model;
  model.regime = PolymerRegime::high_temperature;
  model.graph = std::make_shared<const Graph>(g);
  model.q = q;
  model.beta = beta;
  model.p = std::expm1(beta);
  model.eps = 0;
  model.d = g.max_degree();
  if (model.p == 0) return model;  // every weight vanishes with p
  double lq = std::log(q), lp = std::log(model.p);
  for (int r = 0; r < g.n(); ++r) {
    Mask allowed = ~Mask{0};
    if (r > 0) allowed &= ~((Mask{1} << r) - 1);
    if (g.n() < 64) allowed &= (Mask{1} << g.n()) - 1;
    for_each_connected_subgraph(g, r, g.n(), allowed,
                                [&](std::uint64_t edge_mask, Mask vm) {
      if (edge_mask == 0) return;  // the bare root, below polymer size
      Polymer gamma;
      gamma.id = static_cast<int>(model.polymers.size());
      gamma.vmask = vm;
      gamma.block_mask = vm;
      gamma.vertices = vertices_of(vm);
      gamma.v = static_cast<int>(gamma.vertices.size());
      std::uint64_t rest = edge_mask;
      while (rest) {
        int e = __builtin_ctzll(rest);
        rest &= rest - 1;
        gamma.edges.push_back(g.edges()[e]);
      }
      gamma.e = static_cast<int>(gamma.edges.size());
      gamma.log_weight = (1.0 - gamma.v) * lq + gamma.e * lp;
      gamma.f = gamma.v;
      gamma.g = gamma.v;
      model.polymers.push_back(std::move(gamma));
      if (model.polymers.size() > max_polymers)
        throw size_error("high_temperature_model: polymer count exceeds cap");
    });
  }
  return model;
}

// ---- Kotecky-Preiss verification ----

struct KpReport {
  bool ok = false;
  double worst_ratio = 0;  // max over gamma of LHS / f(gamma)
  int worst_polymer = -1;
  std::size_t polymer_count = 0;
};

// For every polymer gamma:  sum over gamma' incompatible with gamma of
// w(gamma') e^{f(gamma') + g(gamma')}  <=  f(gamma).
// The sum includes gamma itself (incompatibility is reflexive). Complete on
// these finite instances, so a pass certifies convergence outright.
inline KpReport kp_check(const PolymerModel& model,
                         const std::function<double(const Polymer&)>& f_fn = {},
                         const std::function<double(const Polymer&)>& g_fn = {}) {
  auto fval = [&](const Polymer& gm) { return f_fn ? f_fn(gm) : gm.f; };
  auto gval = [&](const Polymer& gm) { return g_fn ? g_fn(gm) : gm.g; };
  const auto& ps = model.polymers;
  KpReport rep;
  rep.polymer_count = ps.size();
  if (ps.empty()) {
    rep.ok = true;
    return rep;
  }
  std::vector<double> term(ps.size());
  for (size_t j = 0; j < ps.size(); ++j) {
    term[j] = std::exp(ps[j].log_weight + fval(ps[j]) + gval(ps[j]));
    if (!std::isfinite(term[j]))
      throw numeric_error("kp_check: non-finite polymer term");
  }
  for (size_t i = 0; i < ps.size(); ++i) {
    double fi = fval(ps[i]);
    if (!(fi > 0)) throw numeric_error("kp_check: decay function must be positive");
    KahanSum lhs;
    for (size_t j = 0; j < ps.size(); ++j)
      if (ps[i].block_mask & ps[j].vmask) lhs.add(term[j]);
    double ratio = lhs.get() / fi;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_polymer = ps[i].id;
    }
  }
  rep.ok = rep.worst_ratio <= 1.0 + 1e-12;
  return rep;
}

// ---- exact polymer partition function by family enumeration ----

struct FamilySumOptions {
  bool tilted = false;              // weight each polymer by w e^{v/d}
  bool restrict_half_total = false; // keep families with 2 * sum_v < n
  std::uint64_t max_visits = 200'000'000;
};

// Sum of prod w(gamma) over all families of pairwise compatible polymers,
// the empty family contributing 1. Exponential-time reference value.
inline double sum_compatible_families(const PolymerModel& model,
                                      FamilySumOptions opt = {}) {
  const auto& ps = model.polymers;
  int n = model.graph ? model.graph->n() : 0;
  std::vector<double> w(ps.size());
  for (size_t i = 0; i < ps.size(); ++i)
    w[i] = std::exp(model.log_weight(static_cast<int>(i), opt.tilted));
  std::uint64_t visits = 0;
  // recursion over polymers in id order; blocked accumulates block masks
  std::function<double(size_t, Mask, long long)> rec =
      [&](size_t i, Mask blocked, long long total_v) -> double {
    if (++visits > opt.max_visits)
      throw size_error("sum_compatible_families: visit cap exceeded");
    double acc = 1.0;
    for (size_t j = i; j < ps.size(); ++j) {
      if (ps[j].vmask & blocked) continue;
      if (opt.restrict_half_total && 2 * (total_v + ps[j].v) >= n) continue;
      acc += w[j] * rec(j + 1, blocked | ps[j].block_mask, total_v + ps[j].v);
    }
    return acc;
  };
  return rec(0, Mask{0}, 0);
}

// Sum over vertices of the smallest decay value among polymers containing
// that vertex. This is the pinning constant in the truncation bound; vertices
// contained in no polymer contribute nothing.
inline double min_f_sum(const PolymerModel& model) {
  if (!model.graph) throw parameter_error("min_f_sum: model has no graph");
  std::vector<double> best(model.graph->n(),
                           std::numeric_limits<double>::infinity());
  for (const auto& gm : model.polymers)
    for (int v : gm.vertices) best[v] = std::min(best[v], gm.f);
  KahanSum s;
  for (double b : best)
    if (std::isfinite(b)) s.add(b);
  return s.get();
}

// Pairwise incompatibility as bitsets over polymer ids.
inline std::vector<Bits> incompatibility_adjacency(const PolymerModel& model) {
  int n = static_cast<int>(model.polymers.size());
  std::vector<Bits> adj(n, Bits(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (model.polymers[i].block_mask & model.polymers[j].vmask) {
        adj[i].set(j);
        adj[j].set(i);
      }
  return adj;
}

}  // namespace potts

#endif
