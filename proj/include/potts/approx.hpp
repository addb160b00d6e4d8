#ifndef POTTS_APPROX_HPP
#define POTTS_APPROX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "potts/cluster.hpp"
#include "potts/exact.hpp"
#include "potts/graph.hpp"
#include "potts/mincut.hpp"
#include "potts/polymer.hpp"

namespace potts {

// ---- temperature regime dispatch ----

enum class Regime { zero, high, low, window };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::zero: return "zero";
    case Regime::high: return "high";
    case Regime::low: return "low";
    case Regime::window: return "window";
  }
  return "?";
}

struct RegimeDecision {
  Regime regime = Regime::zero;
  double beta_threshold = 0;
  double eps = 0;
};

// The threshold is evaluated with q and d clamped up to 3 so that instances
// outside its formal domain (q <= 2 or degree < 3) still dispatch; such
// instances sit deep inside one phase and the clamped value is a safe fence.
inline RegimeDecision classify_regime(const Graph& g, double q, double beta,
                                      double eps = 0.25) {
  if (eps <= 0 || eps >= 1) throw parameter_error("classify_regime: eps in (0,1)");
  int d = g.is_regular() ? g.regular_degree() : g.max_degree();
  double bo = beta_o(std::max(q, 3.0), std::max(d, 3));
  RegimeDecision rd;
  rd.beta_threshold = bo;
  rd.eps = eps;
  if (beta == 0) rd.regime = Regime::zero;
  else if (beta <= (1 - eps) * bo) rd.regime = Regime::high;
  else if (beta >= (1 + eps) * bo) rd.regime = Regime::low;
  else rd.regime = Regime::window;
  return rd;
}

// ---- deterministic approximation of ln Z ----

struct FptasOptions {
  double eps = 0.25;    // width of the excluded threshold window
  double delta = 0.1;   // additive target for ln Z
  int max_order = 0;    // cluster order cap, 0 = guard default
};

struct FptasResult {
  double log_value = 0;
  Regime regime = Regime::zero;
  double beta_threshold = 0;
  double level = 0;             // truncation level L
  double truncation_bound = 0;  // certified tail, <= delta/2
  double kp_ratio = 0;          // worst convergence ratio, <= 1 when sound
  std::size_t polymer_count = 0;
  std::size_t cluster_count = 0;
  int max_order_seen = 0;
};

// High regime: ln Z = n ln q + ln Xi exactly, so the truncation tail is the
// whole error. Low regime: ln Z is approximated by the ordered-phase
// expansion around one dominant color, ln q + beta d n / 2 + ln Xi; the
// tail is certified and the phase terms it drops are exponentially small in
// the surface order of the instance.
inline FptasResult fptas_log_partition(const Graph& g, double q, double beta,
                                       FptasOptions opt = {},
                                       const SizeGuards& guards = SizeGuards::current()) {
  if (q < 2) throw parameter_error("fptas_log_partition: q >= 2 required");
  if (beta < 0) throw parameter_error("fptas_log_partition: beta >= 0 required");
  if (!(opt.delta > 0)) throw parameter_error("fptas_log_partition: delta > 0");
  auto rd = classify_regime(g, q, beta, opt.eps);
  FptasResult res;
  res.regime = rd.regime;
  res.beta_threshold = rd.beta_threshold;
  if (rd.regime == Regime::zero) {
    res.log_value = g.n() * std::log(q);
    return res;
  }
  if (rd.regime == Regime::window)
    throw regime_error("beta lies inside the excluded threshold window [" +
                       std::to_string((1 - opt.eps) * rd.beta_threshold) + ", " +
                       std::to_string((1 + opt.eps) * rd.beta_threshold) + "]");
  PolymerModel model = rd.regime == Regime::high
                           ? make_high_temperature_model(g, q, beta, guards)
                           : make_low_temperature_model(g, q, beta, opt.eps, guards);
  res.polymer_count = model.polymers.size();
  auto kp = kp_check(model);
  res.kp_ratio = kp.worst_ratio;
  if (!kp.ok)
    throw regime_error("convergence condition fails at these parameters (ratio " +
                       std::to_string(kp.worst_ratio) + ")");
  double L = truncation_level(model, opt.delta / 2);
  res.level = L;
  auto adj = incompatibility_adjacency(model);
  auto ce = truncated_log_xi(model, adj, L, nullptr, guards, opt.max_order);
  res.truncation_bound = ce.tail_bound;
  res.cluster_count = ce.cluster_count;
  res.max_order_seen = ce.max_order_seen;
  if (rd.regime == Regime::high) {
    res.log_value = g.n() * std::log(q) + ce.log_xi;
  } else {
    res.log_value = std::log(q) +
                    beta * model.d * g.n() / 2.0 + ce.log_xi;
  }
  return res;
}

// ---- self-reducible sampling of polymer families ----

// Draws a family of pairwise compatible polymers with probability
// proportional to prod w(gamma), by fixing the polymer order and accepting
// polymer i with probability w_i Xi(U minus the conflict set) / Xi(U).
// Both Xi values are truncated at a level chosen so one draw stays within
// tv_budget of the target law; the Xi cache is keyed by the universe mask
// and shared across draws.
class FamilySampler {
 public:
  FamilySampler(const PolymerModel& model, double tv_budget,
                const SizeGuards& guards = SizeGuards::current(), int max_order = 0)
      : model_(model), guards_(guards) {
    if (!(tv_budget > 0)) throw parameter_error("FamilySampler: tv_budget > 0");
    n_ = static_cast<int>(model.polymers.size());
    adj_ = incompatibility_adjacency(model);
    max_order_ = max_order > 0 ? max_order : guards.cluster_order;
    double mass = min_f_sum(model);
    level_ = mass > 0
                 ? std::max(0.0, std::log(4.0 * std::max(n_, 1) * mass / tv_budget))
                 : 0.0;
    full_ = Bits(std::max(n_, 1));
    for (int i = 0; i < n_; ++i) full_.set(i);
    if (n_ > 0) log_xi(full_);  // validates the order guard up front
  }

  std::vector<int> sample(Rng& rng) {
    std::vector<int> family;
    Bits allowed = full_;
    for (int i = 0; i < n_; ++i) {
      if (!allowed.test(i)) continue;
      double lx_all = log_xi(allowed);
      Bits rest = allowed;
      rest.andnot_with(adj_[i]);  // adjacency is reflexive, removes i too
      double prob =
          std::exp(model_.polymers[i].log_weight + log_xi(rest) - lx_all);
      if (prob > 1 + 1e-9)
        throw numeric_error("FamilySampler: acceptance probability " +
                            std::to_string(prob));
      if (prob > 1) {
        prob = 1;
        ++clamp_count_;
      }
      if (uniform_real(rng) < prob) {
        family.push_back(i);
        allowed = rest;
      } else {
        allowed.clear(i);
      }
    }
    return family;
  }

  double level() const { return level_; }
  std::uint64_t clamp_count() const { return clamp_count_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  double log_xi(const Bits& allowed) {
    auto it = cache_.find(allowed);
    if (it != cache_.end()) return it->second;
    auto ce = truncated_log_xi(model_, adj_, level_, &allowed, guards_, max_order_);
    cache_.emplace(allowed, ce.log_xi);
    return ce.log_xi;
  }

  const PolymerModel& model_;
  SizeGuards guards_;
  std::vector<Bits> adj_;
  Bits full_;
  int n_ = 0;
  int max_order_ = 0;
  double level_ = 0;
  std::uint64_t clamp_count_ = 0;
  std::unordered_map<Bits, double, BitsHash> cache_;
};

// ---- approximate Potts sampling in either regime ----

struct ApproxSamplerOptions {
  double eps = 0.25;
  double tv_budget = 0.02;
  int max_order = 0;
  int max_rejects = 1000;  // ordered regime: family size restriction retries
};

class ApproxPottsSampler {
 public:
  ApproxPottsSampler(const Graph& g, int q, double beta,
                     ApproxSamplerOptions opt = {},
                     const SizeGuards& guards = SizeGuards::current())
      : g_(g), q_(q), beta_(beta), opt_(opt) {
    if (q < 2) throw parameter_error("ApproxPottsSampler: q >= 2");
    auto rd = classify_regime(g, q, beta, opt.eps);
    regime_ = rd.regime;
    if (regime_ == Regime::window)
      throw regime_error("beta lies inside the excluded threshold window");
    if (regime_ == Regime::zero) return;
    model_ = regime_ == Regime::high
                 ? make_high_temperature_model(g, q, beta, guards)
                 : make_low_temperature_model(g, q, beta, opt.eps, guards);
    auto kp = kp_check(model_);
    kp_ratio_ = kp.worst_ratio;
    if (!kp.ok)
      throw regime_error("convergence condition fails at these parameters");
    family_ = std::make_unique<FamilySampler>(model_, opt.tv_budget, guards,
                                              opt.max_order);
    if (regime_ == Regime::low) {
      // per-polymer exact tables over the q-1 non-dominant colors
      for (const auto& gm : model_.polymers) {
        sub_graphs_.push_back(std::make_unique<Graph>(polymer_subgraph(gm)));
        sub_tables_.push_back(std::make_unique<PottsSampler>(
            *sub_graphs_.back(), q - 1, beta, guards));
      }
    }
  }

  // family_ captures a reference to model_, so the object must stay put
  ApproxPottsSampler(const ApproxPottsSampler&) = delete;
  ApproxPottsSampler& operator=(const ApproxPottsSampler&) = delete;
  ApproxPottsSampler(ApproxPottsSampler&&) = delete;
  ApproxPottsSampler& operator=(ApproxPottsSampler&&) = delete;

  SpinConfig sample(Rng& rng) {
    SpinConfig sigma(g_.n());
    if (regime_ == Regime::zero) {
      for (auto& c : sigma) c = static_cast<int>(uniform_index(rng, q_));
      return sigma;
    }
    if (regime_ == Regime::high) {
      auto family = family_->sample(rng);
      EdgeSubset subset(g_.m(), 0);
      for (int id : family)
        for (auto [u, v] : model_.polymers[id].edges)
          subset[g_.edge_index(u, v)] = 1;
      return rc_to_potts(g_, subset, q_, rng);
    }
    // ordered regime: truncated family law conditioned on total size < n/2,
    // then a uniform dominant color and exact colorings inside each polymer
    std::vector<int> family;
    bool ok = false;
    for (int attempt = 0; attempt < opt_.max_rejects; ++attempt) {
      family = family_->sample(rng);
      long long total = 0;
      for (int id : family) total += model_.polymers[id].v;
      if (2 * total < g_.n()) {
        ok = true;
        break;
      }
      ++rejections_;
    }
    if (!ok) throw numeric_error("ApproxPottsSampler: rejection cap exceeded");
    int j = static_cast<int>(uniform_index(rng, q_));
    sigma.assign(g_.n(), j);
    for (int id : family) {
      SpinConfig inner = sub_tables_[id]->sample(rng);
      const auto& verts = model_.polymers[id].vertices;
      for (size_t k = 0; k < verts.size(); ++k) {
        int c = inner[k];
        sigma[verts[k]] = c < j ? c : c + 1;
      }
    }
    return sigma;
  }

  Regime regime() const { return regime_; }
  double kp_ratio() const { return kp_ratio_; }
  double level() const { return family_ ? family_->level() : 0; }
  std::uint64_t clamp_count() const { return family_ ? family_->clamp_count() : 0; }
  std::uint64_t rejections() const { return rejections_; }
  std::size_t polymer_count() const { return model_.polymers.size(); }

 private:
  const Graph g_;  // owned copy, the sampler outlives its input
  int q_;
  double beta_;
  ApproxSamplerOptions opt_;
  Regime regime_ = Regime::zero;
  PolymerModel model_;
  std::unique_ptr<FamilySampler> family_;
  std::vector<std::unique_ptr<Graph>> sub_graphs_;
  std::vector<std::unique_ptr<PottsSampler>> sub_tables_;
  double kp_ratio_ = 0;
  std::uint64_t rejections_ = 0;
};

// ---- near-minimum cut collection ----

struct KargerResult {
  long long min_cut_value = 0;
  double alpha = 1;
  long long threshold = 0;  // cuts of size <= floor(alpha * min cut)
  std::size_t distinct_cuts = 0;
  double count_bound = 0;  // C(n, 2 alpha) 2^{2 alpha}
  bool within_bound = true;
  std::uint64_t trials = 0;
  bool verified_complete = false;  // exhaustive cross-check ran and agreed
  std::vector<Mask> cut_sides;     // canonical side (never contains vertex 0)
};

// Repeated random contraction down to ceil(2 alpha) blocks, then full
// enumeration of block bipartitions, collecting every cut within alpha of
// minimum. Exhaustive verification over all 2^{n-1} sides when n permits.
inline KargerResult karger_count_cuts(const Graph& g, double alpha, Rng& rng,
                                      std::uint64_t trials = 0,
                                      const SizeGuards& guards = SizeGuards::current()) {
  if (!g.is_connected()) throw precondition_error("karger_count_cuts: connected graph required");
  if (!g.has_masks()) throw size_error("karger_count_cuts: n <= 64 required");
  if (alpha < 1) throw parameter_error("karger_count_cuts: alpha >= 1");
  KargerResult res;
  res.alpha = alpha;
  res.min_cut_value = min_cut(g);
  res.threshold = static_cast<long long>(std::floor(alpha * res.min_cut_value + 1e-9));
  res.count_bound = binomial_real(g.n(), 2 * alpha) * std::pow(2.0, 2 * alpha);
  int target = std::max(2, std::min(g.n(), static_cast<int>(std::ceil(2 * alpha))));
  if (trials == 0) {
    double b = binomial_real(g.n(), 2 * alpha);
    trials = static_cast<std::uint64_t>(
        std::min(2e6, std::max(500.0, b * (std::log(b + 1) + 8))));
  }
  res.trials = trials;
  std::set<Mask> found;
  Mask all = g.n() == 64 ? ~Mask{0} : (Mask{1} << g.n()) - 1;
  for (std::uint64_t t = 0; t < trials; ++t) {
    MultiGraph mg(g);
    while (mg.vertex_count() > target) mg.contract_edge(mg.random_edge(rng));
    auto reps = mg.super_vertices();
    int r = static_cast<int>(reps.size());
    auto w = mg.weight_matrix();
    std::vector<Mask> block_mask(r, 0);
    for (int i = 0; i < r; ++i)
      for (int v : mg.block_of(reps[i])) block_mask[i] |= Mask{1} << v;
    for (std::uint32_t side = 1; side < (std::uint32_t{1} << (r - 1)); ++side) {
      long long cut = 0;
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
          if (((side >> i & 1) != (side >> j & 1))) cut += w[i][j];
      if (cut > res.threshold) continue;
      Mask vm = 0;
      for (int i = 0; i < r; ++i)
        if (side >> i & 1) vm |= block_mask[i];
      if (vm & 1) vm = all & ~vm;
      found.insert(vm);
    }
  }
  res.distinct_cuts = found.size();
  res.within_bound = static_cast<double>(found.size()) <= res.count_bound + 1e-9;
  res.cut_sides.assign(found.begin(), found.end());
  if (g.n() <= guards.allcut_vertices) {
    std::set<Mask> truth;
    for (Mask side = 1; side < (Mask{1} << (g.n() - 1)); ++side) {
      Mask vm = side << 1;  // sides drawn from vertices 1..n-1
      if (static_cast<long long>(boundary_size(g, vm)) <= res.threshold)
        truth.insert(vm);
    }
    res.verified_complete = truth == found;
  }
  return res;
}

// ---- contraction plus coloring procedures ----

enum class ContractionVariant { basic, min_component_two };

struct ContractionRun {
  SpinConfig coloring;
  int final_blocks = 0;
};

// Contracts uniformly random edges down to a block count driven by the
// bichromatic edge budget ell, then colors blocks uniformly. The second
// variant inserts a degree-flattening sweep so the final block count can be
// pushed below 2 ell / d when no small monochromatic components exist.
inline ContractionRun contraction_color(const Graph& g, int q, long long ell,
                                        ContractionVariant variant, Rng& rng) {
  if (q < 1) throw parameter_error("contraction_color: q >= 1");
  if (ell < 0) throw parameter_error("contraction_color: ell >= 0");
  int d = g.regular_degree();
  if (!g.is_connected())
    throw precondition_error("contraction_color: connected graph required");
  MultiGraph mg(g);
  auto contract_down_to = [&](long long target) {
    target = std::max<long long>(1, target);
    while (mg.vertex_count() > target && mg.edge_count() > 0)
      mg.contract_edge(mg.random_edge(rng));
  };
  if (variant == ContractionVariant::basic) {
    contract_down_to(2 * ell / d);
  } else {
    if (d < 3)
      throw precondition_error("contraction_color: min_component_two needs d >= 3");
    contract_down_to(2 * ell / d);
    while (mg.vertex_count() > 1) {
      int pick = -1;
      for (int rep : mg.super_vertices())
        if (mg.super_degree(rep) == d) {
          pick = rep;
          break;
        }
      if (pick < 0) break;
      std::vector<int> incident;
      const auto& es = mg.edges();
      for (int e = 0; e < static_cast<int>(es.size()); ++e)
        if (mg.find(es[e].first) == pick || mg.find(es[e].second) == pick)
          incident.push_back(e);
      mg.contract_edge(incident[uniform_index(rng, incident.size())]);
    }
    contract_down_to(2 * ell / (2 * d - 2));
  }
  ContractionRun run;
  run.final_blocks = mg.vertex_count();
  run.coloring.assign(g.n(), 0);
  std::vector<int> color(g.n(), -1);
  for (int v = 0; v < g.n(); ++v) {
    int rep = mg.find(v);
    if (color[rep] < 0) color[rep] = static_cast<int>(uniform_index(rng, q));
    run.coloring[v] = color[rep];
  }
  return run;
}

// Lower bound on the probability that one run reproduces a target coloring
// with ell bichromatic edges. Exact telescoping when 2 ell / d is integral.
inline double contraction_recovery_bound(int n, int d, int q, long long ell,
                                         ContractionVariant variant) {
  if (d < 1 || q < 1 || n < 1) throw parameter_error("contraction_recovery_bound");
  double k = 2.0 * ell / d;
  if (k > n + 1e-9) throw parameter_error("contraction_recovery_bound: ell too large");
  if (ell == 0) return 1.0 / q;
  if (k < 1) return 0.0;  // constant output cannot match a split coloring
  if (variant == ContractionVariant::basic)
    return 1.0 / (binomial_real(n, k) * std::pow(static_cast<double>(q), k));
  double final_exp = 2.0 * ell / (2.0 * d - 2.0);
  return 1.0 / (binomial_real(n, k) * std::pow(static_cast<double>(q), final_exp) *
                std::pow(2.0 * d, k));
}

// ---- structural sample statistics ----

inline double max_component_fraction(const Graph& g, const EdgeSubset& subset) {
  auto comp = components_of_subset(g, subset);
  std::vector<int> cnt(g.n(), 0);
  int best = 0;
  for (int v = 0; v < g.n(); ++v) best = std::max(best, ++cnt[comp[v]]);
  return static_cast<double>(best) / g.n();
}

inline double median_of(std::vector<double> xs) {
  if (xs.empty()) throw parameter_error("median_of: empty sample");
  std::sort(xs.begin(), xs.end());
  size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

// Two-sided Hoeffding deviation radius at the given confidence.
inline double hoeffding_radius(std::uint64_t samples, double confidence) {
  if (samples == 0 || !(confidence > 0) || !(confidence < 1))
    throw parameter_error("hoeffding_radius");
  return std::sqrt(std::log(2.0 / confidence) / (2.0 * samples));
}

}  // namespace potts

#endif
