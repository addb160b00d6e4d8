#ifndef POTTS_EXACT_HPP
#define POTTS_EXACT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "potts/graph.hpp"

namespace potts {

using SpinConfig = std::vector<int>;   // colors 0..q-1
using EdgeSubset = std::vector<char>;  // include flag per edge index

// Potts inverse temperature and the matching random-cluster edge weight,
// coupled by p = e^beta - 1.
struct ModelParams {
  double q = 2;
  double beta = 0;
  double p = 0;

  static ModelParams from_beta(double q, double beta) {
    if (q < 1) throw parameter_error("ModelParams: q >= 1 required");
    if (beta < 0) throw parameter_error("ModelParams: beta >= 0 required");
    return {q, beta, std::expm1(beta)};
  }
  static ModelParams from_p(double q, double p) {
    if (q < 1) throw parameter_error("ModelParams: q >= 1 required");
    if (p < 0) throw parameter_error("ModelParams: p >= 0 required");
    return {q, std::log1p(p), p};
  }
};

// Order-disorder threshold for q colors on d-regular graphs.
inline double beta_o(double q, int d) {
  if (!(q > 2)) throw parameter_error("beta_o: q > 2 required");
  if (d < 3) throw parameter_error("beta_o: d >= 3 required");
  double denom = std::pow(q - 1.0, 1.0 - 2.0 / d) - 1.0;
  return std::log((q - 2.0) / denom);
}

inline int monochromatic_edges(const Graph& g, const SpinConfig& sigma) {
  if (static_cast<int>(sigma.size()) != g.n())
    throw parameter_error("coloring size mismatch");
  int m = 0;
  for (auto [u, v] : g.edges())
    if (sigma[u] == sigma[v]) ++m;
  return m;
}

inline int bichromatic_edges(const Graph& g, const SpinConfig& sigma) {
  return g.m() - monochromatic_edges(g, sigma);
}

// Streaming log-sum-exp with compensated summation; rescales online so only
// ratios to the running max are exponentiated.
struct LogSumExp {
  double mx = -std::numeric_limits<double>::infinity();
  KahanSum s;

  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term <= mx) {
      s.add(std::exp(log_term - mx));
    } else {
      if (mx != -std::numeric_limits<double>::infinity()) {
        double scale = std::exp(mx - log_term);
        s.sum *= scale;
        s.carry *= scale;
      }
      mx = log_term;
      s.add(1.0);
    }
  }
  double get() const {
    if (mx == -std::numeric_limits<double>::infinity()) return mx;
    return mx + std::log(s.get());
  }
};

// ---- coloring enumeration backend ----

// count[k] = number of colorings with exactly k monochromatic edges.
// Z(q, beta) = sum_k count[k] e^{beta k}. Gated by q^n.
inline std::vector<std::uint64_t> potts_coefficients(
    const Graph& g, long long q, const SizeGuards& guards = SizeGuards::current()) {
  if (q < 1) throw parameter_error("potts_coefficients: q >= 1");
  double states = std::pow(static_cast<double>(q), g.n());
  if (states > guards.coloring_states)
    throw size_error("potts_coefficients: q^n exceeds coloring guard");
  std::vector<std::uint64_t> count(g.m() + 1, 0);
  // DFS with incremental monochromatic count against earlier vertices.
  std::vector<std::vector<int>> earlier(g.n());
  for (auto [u, v] : g.edges()) earlier[v].push_back(u);
  std::vector<int> mono(g.n() + 1, 0);
  SpinConfig sigma(g.n(), -1);
  int v = 0;
  while (v >= 0) {
    if (v == g.n()) {
      ++count[mono[v]];
      --v;
      continue;
    }
    int c = ++sigma[v];
    if (c == q) {
      sigma[v] = -1;
      --v;
      continue;
    }
    int add = 0;
    for (int u : earlier[v])
      if (sigma[u] == c) ++add;
    mono[v + 1] = mono[v] + add;
    ++v;
  }
  return count;
}

inline double log_partition_from_coefficients(const std::vector<std::uint64_t>& count,
                                              double beta) {
  LogSumExp lse;
  for (size_t k = 0; k < count.size(); ++k)
    if (count[k]) lse.add(std::log(static_cast<double>(count[k])) + beta * k);
  return lse.get();
}

// ---- random-cluster edge-subset backend ----

// cnt[k][c] = number of edge subsets with k edges whose spanning subgraph has
// c components. Z_RC(q, p) = sum cnt[k][c] p^k q^c. Gated by 2^m.
struct RankTable {
  int n = 0, m = 0;
  std::vector<std::vector<std::uint64_t>> cnt;
};

inline RankTable rc_rank_table(const Graph& g,
                               const SizeGuards& guards = SizeGuards::current()) {
  if (g.m() > guards.rc_edges)
    throw size_error("rc_rank_table: |E| exceeds edge-subset guard (" +
                     std::to_string(guards.rc_edges) + ")");
  RankTable t;
  t.n = g.n();
  t.m = g.m();
  t.cnt.assign(g.m() + 1, std::vector<std::uint64_t>(g.n() + 1, 0));
  std::vector<int> parent(g.n());
  std::uint64_t total = std::uint64_t{1} << g.m();
  for (std::uint64_t a = 0; a < total; ++a) {
    for (int v = 0; v < g.n(); ++v) parent[v] = v;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    int comps = g.n();
    int k = 0;
    std::uint64_t rest = a;
    while (rest) {
      int e = __builtin_ctzll(rest);
      rest &= rest - 1;
      ++k;
      int ru = find(g.edges()[e].first), rv = find(g.edges()[e].second);
      if (ru != rv) {
        parent[ru] = rv;
        --comps;
      }
    }
    ++t.cnt[k][comps];
  }
  return t;
}

inline double rc_log_partition_from_table(const RankTable& t, double q, double p) {
  if (q < 1 || p < 0) throw parameter_error("rc partition: q >= 1, p >= 0");
  LogSumExp lse;
  double lq = std::log(q);
  double lp = p > 0 ? std::log(p) : 0.0;
  for (int k = 0; k <= t.m; ++k) {
    if (p == 0 && k > 0) continue;
    for (int c = 0; c <= t.n; ++c)
      if (t.cnt[k][c])
        lse.add(std::log(static_cast<double>(t.cnt[k][c])) + k * lp + c * lq);
  }
  return lse.get();
}

inline double rc_log_partition(const Graph& g, double q, double p,
                               const SizeGuards& guards = SizeGuards::current()) {
  return rc_log_partition_from_table(rc_rank_table(g, guards), q, p);
}

// ---- symmetric closed forms for complete and complete bipartite graphs ----

namespace detail {

template <class F>
void for_each_partition(int n, std::vector<int>& parts, int max_part, F& yield) {
  if (n == 0) {
    yield(parts);
    return;
  }
  for (int next = std::min(n, max_part); next >= 1; --next) {
    parts.push_back(next);
    for_each_partition(n - next, parts, next, yield);
    parts.pop_back();
  }
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

// log of q(q-1)...(q-k+1); requires the product positive.
inline double log_falling(double q, int k) {
  double s = 0;
  for (int i = 0; i < k; ++i) {
    double f = q - i;
    if (f <= 0) return -std::numeric_limits<double>::infinity();
    s += std::log(f);
  }
  return s;
}

// log(#colorings of an n-set whose color histogram has exactly these parts)
inline double log_histogram_colorings(int n, const std::vector<int>& parts, double q) {
  double lf = log_factorial(n);
  for (int p : parts) lf -= log_factorial(p);
  int k = static_cast<int>(parts.size());
  double choose_colors = log_falling(q, k);
  if (choose_colors == -std::numeric_limits<double>::infinity())
    return choose_colors;
  // divide by multiplicities of equal part sizes (parts are sorted descending)
  int run = 1;
  for (size_t i = 1; i <= parts.size(); ++i) {
    if (i < parts.size() && parts[i] == parts[i - 1]) {
      ++run;
    } else {
      choose_colors -= log_factorial(run);
      run = 1;
    }
  }
  return lf + choose_colors;
}

}  // namespace detail

// Z for the complete graph on nv vertices via color histograms; exact for any
// real q >= 1 and cheap enough for q in the millions.
inline double potts_log_partition_complete(int nv, double q, double beta) {
  if (nv < 1) throw parameter_error("complete: nv >= 1");
  if (q < 1) throw parameter_error("complete: q >= 1");
  LogSumExp lse;
  std::vector<int> parts;
  auto yield = [&](const std::vector<int>& lam) {
    double lw = detail::log_histogram_colorings(nv, lam, q);
    if (lw == -std::numeric_limits<double>::infinity()) return;
    long long mono = 0;
    for (int p : lam) mono += static_cast<long long>(p) * (p - 1) / 2;
    lse.add(lw + beta * mono);
  };
  detail::for_each_partition(nv, parts, nv, yield);
  return lse.get();
}

// Z for K_{a,b}: sum over histograms of side A, then side B integrates to
// ((q-k) + sum_i e^{beta * a_i})^b.
inline double potts_log_partition_complete_bipartite(int a, int b, double q,
                                                     double beta) {
  if (a < 1 || b < 1) throw parameter_error("complete_bipartite: sides >= 1");
  if (q < 1) throw parameter_error("complete_bipartite: q >= 1");
  LogSumExp lse;
  std::vector<int> parts;
  auto yield = [&](const std::vector<int>& lam) {
    double lw = detail::log_histogram_colorings(a, lam, q);
    if (lw == -std::numeric_limits<double>::infinity()) return;
    LogSumExp inner;
    double k = static_cast<double>(lam.size());
    if (q - k > 0) inner.add(std::log(q - k));
    for (int p : lam) inner.add(beta * p);
    lse.add(lw + b * inner.get());
  };
  detail::for_each_partition(a, parts, a, yield);
  return lse.get();
}

inline bool is_complete(const Graph& g) {
  return static_cast<long long>(g.m()) * 2 == static_cast<long long>(g.n()) * (g.n() - 1);
}

// Returns side sizes if g is a complete bipartite graph (isolated-free).
inline std::optional<std::pair<int, int>> complete_bipartite_shape(const Graph& g) {
  if (g.n() < 2 || !g.is_connected()) return std::nullopt;
  std::vector<int> side(g.n(), -1);
  side[0] = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : g.neighbors(v)) {
      if (side[u] < 0) {
        side[u] = side[v] ^ 1;
        stack.push_back(u);
      } else if (side[u] == side[v]) {
        return std::nullopt;
      }
    }
  }
  long long a = std::count(side.begin(), side.end(), 0);
  long long b = g.n() - a;
  if (static_cast<long long>(g.m()) != a * b) return std::nullopt;
  return std::make_pair(static_cast<int>(a), static_cast<int>(b));
}

enum class PottsBackend { automatic, enumeration, random_cluster, closed_form };

// Exact log Z with backend dispatch. The enumeration and random-cluster
// routes are independent computations; tests hold them to each other.
inline double potts_log_partition(const Graph& g, double q, double beta,
                                  PottsBackend backend = PottsBackend::automatic,
                                  const SizeGuards& guards = SizeGuards::current()) {
  if (q < 1) throw parameter_error("potts_log_partition: q >= 1 required");
  if (beta < 0) throw parameter_error("potts_log_partition: beta >= 0 required");
  bool integral_q = std::abs(q - std::round(q)) < 1e-12;
  switch (backend) {
    case PottsBackend::enumeration: {
      if (!integral_q)
        throw parameter_error("enumeration backend requires integer q");
      auto coeffs = potts_coefficients(g, static_cast<long long>(q), guards);
      return log_partition_from_coefficients(coeffs, beta);
    }
    case PottsBackend::random_cluster:
      return rc_log_partition(g, q, std::expm1(beta), guards);
    case PottsBackend::closed_form: {
      if (is_complete(g)) return potts_log_partition_complete(g.n(), q, beta);
      if (auto ab = complete_bipartite_shape(g))
        return potts_log_partition_complete_bipartite(ab->first, ab->second, q, beta);
      throw parameter_error("closed_form backend: graph is not K_n or K_{a,b}");
    }
    case PottsBackend::automatic: {
      if (is_complete(g)) return potts_log_partition_complete(g.n(), q, beta);
      if (auto ab = complete_bipartite_shape(g))
        return potts_log_partition_complete_bipartite(ab->first, ab->second, q, beta);
      if (integral_q &&
          std::pow(q, g.n()) <= guards.coloring_states &&
          std::pow(q, g.n()) <= std::ldexp(1.0, std::min(g.m(), 62))) {
        auto coeffs = potts_coefficients(g, static_cast<long long>(q), guards);
        return log_partition_from_coefficients(coeffs, beta);
      }
      if (g.m() <= guards.rc_edges)
        return rc_log_partition(g, q, std::expm1(beta), guards);
      if (integral_q) {
        auto coeffs = potts_coefficients(g, static_cast<long long>(q), guards);
        return log_partition_from_coefficients(coeffs, beta);
      }
      throw size_error("potts_log_partition: no exact backend fits this instance");
    }
  }
  throw parameter_error("potts_log_partition: unknown backend");
}

// ---- exact samplers ----

// Inverse-CDF sampler over all q^n colorings. Weights are kept relative to
// the monochromatic maximum so no exponential overflows.
class PottsSampler {
 public:
  PottsSampler(const Graph& g, int q, double beta,
               const SizeGuards& guards = SizeGuards::current())
      : g_(g), q_(q), beta_(beta) {
    if (q < 1) throw parameter_error("PottsSampler: q >= 1");
    double states = std::pow(static_cast<double>(q), g.n());
    if (states > guards.table_states)
      throw size_error("PottsSampler: q^n exceeds table guard");
    std::uint64_t total = 1;
    for (int i = 0; i < g.n(); ++i) total *= q;
    cum_.resize(total);
    KahanSum acc;
    SpinConfig sigma(g.n());
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      decode(idx, sigma);
      acc.add(std::exp(beta * (monochromatic_edges(g, sigma) - g.m())));
      cum_[idx] = acc.get();
    }
  }

  SpinConfig sample(Rng& rng) const {
    double target = uniform_real(rng) * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    std::uint64_t idx = it == cum_.end() ? cum_.size() - 1 : it - cum_.begin();
    SpinConfig sigma(g_.n());
    decode(idx, sigma);
    return sigma;
  }

  double probability(const SpinConfig& sigma) const {
    return std::exp(beta_ * (monochromatic_edges(g_, sigma) - g_.m())) / cum_.back();
  }

  std::uint64_t states() const { return cum_.size(); }

  void decode(std::uint64_t idx, SpinConfig& sigma) const {
    for (int v = 0; v < g_.n(); ++v) {
      sigma[v] = static_cast<int>(idx % q_);
      idx /= q_;
    }
  }

 private:
  const Graph& g_;
  int q_;
  double beta_;
  std::vector<double> cum_;
};

// Inverse-CDF sampler over all 2^m edge subsets of the random-cluster model.
class RcSubsetSampler {
 public:
  RcSubsetSampler(const Graph& g, double q, double p,
                  const SizeGuards& guards = SizeGuards::current())
      : g_(g) {
    if (q < 1 || p < 0) throw parameter_error("RcSubsetSampler: q >= 1, p >= 0");
    if (std::ldexp(1.0, g.m()) > guards.table_states)
      throw size_error("RcSubsetSampler: 2^m exceeds table guard");
    std::uint64_t total = std::uint64_t{1} << g.m();
    double lq = std::log(q), lp = p > 0 ? std::log(p) : 0;
    std::vector<double> logw(total);
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<int> parent(g.n());
    for (std::uint64_t a = 0; a < total; ++a) {
      if (p == 0 && a != 0) {
        logw[a] = -std::numeric_limits<double>::infinity();
        continue;
      }
      for (int v = 0; v < g.n(); ++v) parent[v] = v;
      auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      int comps = g.n(), k = 0;
      std::uint64_t rest = a;
      while (rest) {
        int e = __builtin_ctzll(rest);
        rest &= rest - 1;
        ++k;
        int ru = find(g.edges()[e].first), rv = find(g.edges()[e].second);
        if (ru != rv) {
          parent[ru] = rv;
          --comps;
        }
      }
      logw[a] = comps * lq + k * lp;
      mx = std::max(mx, logw[a]);
    }
    cum_.resize(total);
    KahanSum acc;
    for (std::uint64_t a = 0; a < total; ++a) {
      acc.add(std::exp(logw[a] - mx));
      cum_[a] = acc.get();
    }
  }

  EdgeSubset sample(Rng& rng) const {
    double target = uniform_real(rng) * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    std::uint64_t idx = it == cum_.end() ? cum_.size() - 1 : it - cum_.begin();
    EdgeSubset subset(g_.m(), 0);
    for (int e = 0; e < g_.m(); ++e) subset[e] = (idx >> e) & 1;
    return subset;
  }

 private:
  const Graph& g_;
  std::vector<double> cum_;
};

// ---- Edwards-Sokal coupling ----

inline std::vector<int> components_of_subset(const Graph& g, const EdgeSubset& subset) {
  std::vector<int> parent(g.n());
  for (int v = 0; v < g.n(); ++v) parent[v] = v;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int e = 0; e < g.m(); ++e)
    if (subset[e]) {
      int ru = find(g.edges()[e].first), rv = find(g.edges()[e].second);
      if (ru != rv) parent[ru] = rv;
    }
  std::vector<int> comp(g.n());
  for (int v = 0; v < g.n(); ++v) comp[v] = find(v);
  return comp;
}

// Random-cluster state -> Potts coloring: one uniform color per component.
inline SpinConfig rc_to_potts(const Graph& g, const EdgeSubset& subset, int q,
                              Rng& rng) {
  auto comp = components_of_subset(g, subset);
  std::vector<int> color(g.n(), -1);
  SpinConfig sigma(g.n());
  for (int v = 0; v < g.n(); ++v) {
    int r = comp[v];
    if (color[r] < 0) color[r] = static_cast<int>(uniform_index(rng, q));
    sigma[v] = color[r];
  }
  return sigma;
}

// Potts coloring -> random-cluster state: keep each monochromatic edge
// independently with probability 1 - e^{-beta}.
inline EdgeSubset potts_to_rc(const Graph& g, const SpinConfig& sigma, double beta,
                              Rng& rng) {
  double keep = -std::expm1(-beta);
  EdgeSubset subset(g.m(), 0);
  for (int e = 0; e < g.m(); ++e) {
    auto [u, v] = g.edges()[e];
    if (sigma[u] == sigma[v] && uniform_real(rng) < keep) subset[e] = 1;
  }
  return subset;
}

// ---- majority classification ----

// Color holding a strict majority (> n/2 vertices), if any.
inline std::optional<int> majority_color(const SpinConfig& sigma, int q) {
  std::vector<int> cnt(q, 0);
  for (int c : sigma) {
    if (c < 0 || c >= q) throw parameter_error("majority_color: color out of range");
    ++cnt[c];
  }
  for (int j = 0; j < q; ++j)
    if (2 * cnt[j] > static_cast<int>(sigma.size())) return j;
  return std::nullopt;
}

// Every no-majority coloring has at least eta*n/2 bichromatic edges, with eta
// the exact expansion constant. Checked by full enumeration.
inline bool nm_lower_bound_check(const Graph& g, int q,
                                 const SizeGuards& guards = SizeGuards::current()) {
  double states = std::pow(static_cast<double>(q), g.n());
  if (states > guards.coloring_states)
    throw size_error("nm_lower_bound_check: q^n exceeds coloring guard");
  auto eta = eta_expansion(g, guards).eta;
  SpinConfig sigma(g.n(), 0);
  std::uint64_t total = 1;
  for (int i = 0; i < g.n(); ++i) total *= q;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t t = idx;
    for (int v = 0; v < g.n(); ++v) {
      sigma[v] = static_cast<int>(t % q);
      t /= q;
    }
    if (majority_color(sigma, q)) continue;
    long long nm = bichromatic_edges(g, sigma);
    // nm >= eta * n / 2, compared exactly: 2 * nm * den >= num * n
    if (2 * nm * eta.den < eta.num * g.n()) return false;
  }
  return true;
}

// ---- extremal upper bounds ----

enum class ExtremalVariant { clique, biclique };

struct ExtremalMargin {
  double margin;            // log RHS - log Z_G for the per-vertex/per-edge bound
  double margin_uniform;    // same for the max-degree corollary form
};

inline ExtremalMargin extremal_margin(const Graph& g, double q, double beta,
                                      ExtremalVariant variant,
                                      const SizeGuards& guards = SizeGuards::current()) {
  if (q < 2) throw parameter_error("extremal_margin: q >= 2 required");
  if (beta < 0) throw parameter_error("extremal_margin: beta >= 0 required");
  double logz = potts_log_partition(g, q, beta, PottsBackend::automatic, guards);
  int delta = g.max_degree();
  long long n = g.n(), m = g.m();
  if (variant == ExtremalVariant::clique) {
    double rhs = 0;
    for (int v = 0; v < g.n(); ++v) {
      int dv = g.degree(v);
      rhs += potts_log_partition_complete(dv + 1, q, beta) / (dv + 1);
    }
    double uniform;
    if (delta == 0) {
      uniform = n * std::log(q);
    } else {
      uniform = (n - 2.0 * m / delta) * std::log(q) +
                (2.0 * m / (static_cast<double>(delta) * (delta + 1))) *
                    potts_log_partition_complete(delta + 1, q, beta);
    }
    return {rhs - logz, uniform - logz};
  }
  if (!g.is_triangle_free())
    throw precondition_error("extremal_margin: biclique bound needs a triangle-free graph");
  double rhs = 0;
  int isolated = 0;
  for (int v = 0; v < g.n(); ++v)
    if (g.degree(v) == 0) ++isolated;
  rhs += isolated * std::log(q);
  for (auto [u, v] : g.edges()) {
    int du = g.degree(u), dv = g.degree(v);
    rhs += potts_log_partition_complete_bipartite(du, dv, q, beta) /
           (static_cast<double>(du) * dv);
  }
  double uniform;
  if (delta == 0) {
    uniform = n * std::log(q);
  } else {
    uniform = (n - 2.0 * m / delta) * std::log(q) +
              (static_cast<double>(m) / (static_cast<double>(delta) * delta)) *
                  potts_log_partition_complete_bipartite(delta, delta, q, beta);
  }
  return {rhs - logz, uniform - logz};
}

// ---- ground-state domination of clique/biclique partition functions ----

struct SlackReport {
  double excess;      // Z / (q * e^{beta * m_ground}) - 1
  double threshold;   // q^{-omega * eps}
  bool pass;
  double beta_threshold;  // beta_o(q, d)
};

inline SlackReport clique_partition_bound_check(int d, double q, double beta,
                                                double eps, double omega = 1.0) {
  double bo = beta_o(q, d);
  if (beta < (1 + eps) * bo)
    throw precondition_error("clique_partition_bound_check: beta below (1+eps)*beta_o");
  long long mg = static_cast<long long>(d + 1) * d / 2;
  double logz = potts_log_partition_complete(d + 1, q, beta);
  double excess = std::expm1(logz - std::log(q) - beta * mg);
  double thr = std::pow(q, -omega * eps);
  return {excess, thr, excess <= thr, bo};
}

inline SlackReport biclique_partition_bound_check(int d, double q, double beta,
                                                  double eps, double omega = 1.0) {
  double bo = beta_o(q, d);
  if (beta < (1 + eps) * bo)
    throw precondition_error("biclique_partition_bound_check: beta below (1+eps)*beta_o");
  long long mg = static_cast<long long>(d) * d;
  double logz = potts_log_partition_complete_bipartite(d, d, q, beta);
  double excess = std::expm1(logz - std::log(q) - beta * mg);
  double thr = std::pow(q, -omega * eps);
  return {excess, thr, excess <= thr, bo};
}

}  // namespace potts

#endif
