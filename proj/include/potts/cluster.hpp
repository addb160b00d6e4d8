#ifndef POTTS_CLUSTER_HPP
#define POTTS_CLUSTER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "potts/polymer.hpp"

namespace potts {

// Alternating count of spanning connected subgraphs:
//   U(H) = sum over connected F subset E(H) spanning V(H) of (-1)^{|F|}.
// adj[i] is the neighbor mask of vertex i (k vertices, k = adj.size()).
// Computed by the connected/independent subset convolution in O(3^k):
//   A(S) = [S independent], C(S) = A(S) - sum_{T proper subset of S, 0 in T}
//   C(T) A(S \ T); U = C(V). Checks: U(K_1)=1, U(K_2)=-1, U(K_3)=2, and
//   generally |U(H)| <= (k-1)! so 64-bit integers are ample through k = 20.
inline long long alternating_connected_count(const std::vector<std::uint64_t>& adj) {
  int k = static_cast<int>(adj.size());
  if (k <= 0) throw parameter_error("alternating_connected_count: empty graph");
  if (k > 20) throw size_error("alternating_connected_count: k > 20");
  if (k == 1) return 1;
  std::uint64_t full = (std::uint64_t{1} << k) - 1;
  std::vector<signed char> indep(full + 1);
  for (std::uint64_t s = 0; s <= full; ++s) {
    bool ok = true;
    std::uint64_t rest = s;
    while (rest && ok) {
      int i = __builtin_ctzll(rest);
      rest &= rest - 1;
      if (adj[i] & s) ok = false;
    }
    indep[s] = ok ? 1 : 0;
  }
  // C indexed by subsets containing vertex 0, filled in increasing order
  std::vector<long long> c(full + 1, 0);
  for (std::uint64_t s = 1; s <= full; s += 2) {
    long long acc = indep[s];
    std::uint64_t rest = s & ~std::uint64_t{1};
    for (std::uint64_t u = rest;; u = (u - 1) & rest) {
      std::uint64_t t = u | 1;  // submask of s containing vertex 0
      if (t != s) acc -= c[t] * indep[s ^ t];
      if (u == 0) break;
    }
    c[s] = acc;
  }
  return c[full];
}

inline Fraction ursell_fraction(const std::vector<std::uint64_t>& adj) {
  long long u = alternating_connected_count(adj);
  long long fact = 1;
  for (int i = 2; i <= static_cast<int>(adj.size()); ++i) fact *= i;
  return Fraction{u, fact};
}

inline double ursell(const std::vector<std::uint64_t>& adj) {
  return ursell_fraction(adj).value();
}

// One cluster: a multiset of polymers with connected incompatibility graph.
struct ClusterTerm {
  std::vector<int> support;       // distinct polymer ids
  std::vector<int> multiplicity;  // aligned with support, each >= 1
  int order = 0;                  // total copies
  double g_total = 0;             // sum multiplicity * g
  long long ursell_numerator = 0; // U of the copy-expanded incompatibility graph
  double value = 0;               // U / prod(m!) * prod w^m, signed
};

struct ClusterOptions {
  double g_budget = std::numeric_limits<double>::infinity();
  int max_order = 0;  // 0 means the cluster_order guard
  std::uint64_t max_terms = 20'000'000;
};

namespace detail {

// Position-expanded incompatibility graph of (support, multiplicity): copies
// of one polymer are pairwise incompatible, distinct polymers as the model
// says. U of this graph feeds the term value.
inline long long cluster_ursell_numerator(const PolymerModel& model,
                                          const std::vector<int>& support,
                                          const std::vector<int>& mult) {
  int k = 0;
  for (int m : mult) k += m;
  std::vector<int> owner;
  owner.reserve(k);
  for (size_t a = 0; a < support.size(); ++a)
    for (int c = 0; c < mult[a]; ++c) owner.push_back(static_cast<int>(a));
  std::vector<std::uint64_t> adj(k, 0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      bool inc = owner[i] == owner[j] ||
                 model.incompatible(support[owner[i]], support[owner[j]]);
      if (inc) {
        adj[i] |= std::uint64_t{1} << j;
        adj[j] |= std::uint64_t{1} << i;
      }
    }
  return alternating_connected_count(adj);
}

}  // namespace detail

// Streams every cluster with g(cluster) <= g_budget and order <= max_order
// over the polymers enabled in `allowed` (null means all). Supports are
// enumerated as connected sets of the incompatibility graph rooted at their
// minimum id, then multiplicity vectors fill the remaining budget.
template <class F>
void for_each_cluster(const PolymerModel& model, const std::vector<Bits>& incompat,
                      const Bits* allowed, const ClusterOptions& opt, F&& yield) {
  int n = static_cast<int>(model.polymers.size());
  if (static_cast<int>(incompat.size()) != n)
    throw parameter_error("for_each_cluster: adjacency size mismatch");
  int max_order = opt.max_order > 0 ? opt.max_order : SizeGuards::current().cluster_order;
  if (max_order > 20) throw size_error("for_each_cluster: max_order > 20");
  for (int i = 0; i < n; ++i)
    if ((allowed == nullptr || allowed->test(i)) && !(model.polymers[i].g > 0))
      throw numeric_error("for_each_cluster: g must be positive");
  const double budget = opt.g_budget * (1 + 1e-12) + 1e-12;
  std::uint64_t terms = 0;

  std::vector<int> support;
  std::vector<int> mult;

  // multiplicities on a fixed support, depth-first over support positions
  std::function<void(size_t, double, int)> fill =
      [&](size_t idx, double gsum, int order) {
        if (idx == support.size()) {
          ClusterTerm term;
          term.support = support;
          term.multiplicity = mult;
          term.order = order;
          term.g_total = gsum;
          term.ursell_numerator =
              detail::cluster_ursell_numerator(model, support, mult);
          double logw = 0;
          double mfact = 1;
          for (size_t a = 0; a < support.size(); ++a) {
            logw += mult[a] * model.polymers[support[a]].log_weight;
            for (int c = 2; c <= mult[a]; ++c) mfact *= c;
          }
          term.value = term.ursell_numerator * std::exp(logw) / mfact;
          if (++terms > opt.max_terms)
            throw size_error("for_each_cluster: term cap exceeded");
          yield(term);
          return;
        }
        double gi = model.polymers[support[idx]].g;
        for (int m = 1;; ++m) {
          double g2 = gsum + (m - 1) * gi;
          int o2 = order + (m - 1);
          if (g2 > budget || o2 > max_order) break;
          mult[idx] = m;
          fill(idx + 1, g2, o2);
        }
      };

  auto enabled = [&](int i) { return allowed == nullptr || allowed->test(i); };

  // connected supports, exactly once, min id first
  std::function<void(Bits, Bits, double)> grow = [&](Bits cand, Bits banned,
                                                     double gsum) {
    for (int c = cand.next(0); c >= 0; c = cand.next(c + 1)) {
      cand.clear(c);
      banned.set(c);
      double g2 = gsum + model.polymers[c].g;
      if (g2 > budget) continue;
      if (static_cast<int>(support.size()) + 1 > max_order) continue;
      support.push_back(c);
      mult.assign(support.size(), 1);
      fill(0, g2, static_cast<int>(support.size()));
      if (static_cast<int>(support.size()) < max_order) {
        Bits cand2 = cand;
        cand2.or_with(incompat[c]);
        cand2.andnot_with(banned);
        if (allowed) {
          Bits c3 = cand2;
          for (int x = c3.next(0); x >= 0; x = c3.next(x + 1))
            if (!allowed->test(x)) cand2.clear(x);
        }
        grow(cand2, banned, g2);
      }
      support.pop_back();
    }
  };

  for (int r = 0; r < n; ++r) {
    if (!enabled(r)) continue;
    const auto& pr = model.polymers[r];
    if (pr.g > budget) continue;
    support.assign(1, r);
    mult.assign(1, 1);
    fill(0, pr.g, 1);
    if (max_order > 1) {
      Bits banned(n);
      for (int i = 0; i <= r; ++i) banned.set(i);
      Bits cand = incompat[r];
      cand.andnot_with(banned);
      if (allowed) {
        Bits c3 = cand;
        for (int x = c3.next(0); x >= 0; x = c3.next(x + 1))
          if (!allowed->test(x)) cand.clear(x);
      }
      grow(cand, banned, pr.g);
    }
    support.clear();
  }
}

struct ClusterExpansionResult {
  double log_xi = 0;
  double tail_bound = 0;  // e^{-L} * pinned decay mass, certifies the cut terms
  double level = 0;       // L
  std::size_t cluster_count = 0;
  int max_order_seen = 0;
};

// L with e^{-L} * sum_v f_min(v) <= tail_target.
inline double truncation_level(const PolymerModel& model, double tail_target) {
  if (!(tail_target > 0)) throw parameter_error("truncation_level: target > 0");
  double mass = min_f_sum(model);
  if (mass <= 0) return 0;
  return std::max(0.0, std::log(mass / tail_target));
}

// Truncated cluster expansion of ln Xi keeping g(cluster) <= L, plus the
// standard exponential tail bound. Only sound once kp_check passes; the
// order guard aborts rather than silently dropping in-budget clusters.
inline ClusterExpansionResult truncated_log_xi(
    const PolymerModel& model, const std::vector<Bits>& incompat, double L,
    const Bits* allowed = nullptr,
    const SizeGuards& guards = SizeGuards::current(), int max_order = 0) {
  ClusterExpansionResult res;
  res.level = L;
  if (max_order <= 0) max_order = guards.cluster_order;
  if (!model.graph) throw parameter_error("truncated_log_xi: model has no graph");
  double g_min = std::numeric_limits<double>::infinity();
  double mass = 0;
  {
    std::vector<double> best(model.graph->n(),
                             std::numeric_limits<double>::infinity());
    for (const auto& gm : model.polymers) {
      if (allowed && !allowed->test(gm.id)) continue;
      g_min = std::min(g_min, gm.g);
      for (int v : gm.vertices) best[v] = std::min(best[v], gm.f);
    }
    KahanSum s;
    for (double b : best)
      if (std::isfinite(b)) s.add(b);
    mass = s.get();
  }
  res.tail_bound = std::exp(-L) * mass;
  if (!std::isfinite(g_min)) return res;  // no polymers in play
  if (L / g_min > max_order + 1e-9)
    throw size_error("truncated_log_xi: level requires cluster order beyond guard");
  ClusterOptions opt;
  opt.g_budget = L;
  opt.max_order = max_order;
  KahanSum acc;
  for_each_cluster(model, incompat, allowed, opt, [&](const ClusterTerm& t) {
    acc.add(t.value);
    ++res.cluster_count;
    res.max_order_seen = std::max(res.max_order_seen, t.order);
  });
  res.log_xi = acc.get();
  return res;
}

}  // namespace potts

#endif
