#ifndef POTTS_RC_TRANSFER_HPP
#define POTTS_RC_TRANSFER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "potts/exact.hpp"
#include "potts/graph.hpp"

namespace potts {

// Exact random-cluster partition function and sampler via a transfer scan
// over connectivity partitions. Vertices are processed in identity order;
// the state is the partition of currently active vertices into classes
// connected by included edges. Complexity is governed by the Bell number of
// the largest active set (the vertex separation width of the identity
// order), not by 2^m, so e.g. the 4-cube (32 edges, width 9) is exact here.
class RcTransfer {
 public:
  RcTransfer(const Graph& g, double q, double p,
             const SizeGuards& guards = SizeGuards::current())
      : g_(g), q_(q), p_(p) {
    if (q < 1 || p < 0) throw parameter_error("RcTransfer: q >= 1, p >= 0");
    build(guards);
  }

  double log_partition() const { return log_z_; }

  // Draws an edge subset with probability p^{|A|} q^{c(A)} / Z by walking the
  // stored forward weights backward from the final (empty) state.
  EdgeSubset sample(Rng& rng) const {
    EdgeSubset subset(g_.m(), 0);
    int state = 0;  // unique terminal state
    for (int t = static_cast<int>(levels_.size()) - 1; t >= 1; --t) {
      const auto& arcs = levels_[t].in[state];
      double total = 0;
      for (const auto& a : arcs) total += levels_[t - 1].value[a.prev] * a.mult;
      double target = uniform_real(rng) * total;
      double acc = 0;
      const Arc* chosen = &arcs.back();
      for (const auto& a : arcs) {
        acc += levels_[t - 1].value[a.prev] * a.mult;
        if (acc >= target) {
          chosen = &a;
          break;
        }
      }
      if (chosen->edge >= 0) subset[chosen->edge] = chosen->include;
      state = chosen->prev;
    }
    return subset;
  }

  std::size_t max_level_states() const { return max_states_; }

 private:
  struct Arc {
    int prev;
    double mult;
    int edge;       // -1 for activate/retire events
    char include;   // meaningful only when edge >= 0
  };
  struct Level {
    std::vector<std::vector<std::uint8_t>> states;  // restricted growth strings
    std::vector<double> value;                      // rescaled forward weights
    std::vector<std::vector<Arc>> in;
  };

  static std::vector<std::uint8_t> canonical(std::vector<std::uint8_t> rgs) {
    std::vector<int> relabel(rgs.size() + 1, -1);
    int next = 0;
    for (auto& x : rgs) {
      if (relabel[x] < 0) relabel[x] = next++;
      x = static_cast<std::uint8_t>(relabel[x]);
    }
    return rgs;
  }

  struct RgsHash {
    std::size_t operator()(const std::vector<std::uint8_t>& v) const {
      std::size_t h = 1469598103934665603ull;
      for (auto b : v) {
        h ^= b;
        h *= 1099511628211ull;
      }
      return h;
    }
  };

  // One scan event: either branch over an edge, or apply a deterministic
  // state map (activation, retirement). Builds the next level from the
  // current one and appends it.
  template <class Expand>
  void step(const SizeGuards& guards, Expand&& expand) {
    const Level& prev = levels_.back();
    Level next;
    std::unordered_map<std::vector<std::uint8_t>, int, RgsHash> index;
    for (int s = 0; s < static_cast<int>(prev.states.size()); ++s) {
      expand(prev.states[s], [&](std::vector<std::uint8_t> rgs, double mult,
                                 int edge, char include) {
        auto key = canonical(std::move(rgs));
        auto [it, inserted] = index.emplace(key, static_cast<int>(next.states.size()));
        if (inserted) {
          next.states.push_back(it->first);
          next.value.push_back(0);
          next.in.emplace_back();
        }
        next.value[it->second] += prev.value[s] * mult;
        next.in[it->second].push_back({s, mult, edge, include});
      });
    }
    if (next.states.size() > guards.table_states)
      throw size_error("RcTransfer: level state count exceeds table guard");
    // rescale so forward weights stay inside double range on long scans
    double mx = 0;
    for (double v : next.value) mx = std::max(mx, v);
    if (mx > 0 && (mx > 1e100 || mx < 1e-100)) {
      for (double& v : next.value) v /= mx;
      log_scale_ += std::log(mx);
    }
    max_states_ = std::max(max_states_, next.states.size());
    levels_.push_back(std::move(next));
  }

  void build(const SizeGuards& guards) {
    int n = g_.n();
    std::vector<int> retire_at(n);
    for (int v = 0; v < n; ++v) {
      retire_at[v] = v;
      for (int u : g_.neighbors(v)) retire_at[v] = std::max(retire_at[v], u);
    }
    levels_.clear();
    Level init;
    init.states.push_back({});
    init.value.push_back(1.0);
    init.in.emplace_back();
    levels_.push_back(std::move(init));
    log_scale_ = 0;
    max_states_ = 1;

    std::vector<int> active;  // sorted; identical across states of a level
    for (int v = 0; v < n; ++v) {
      // activate v as a fresh singleton class
      step(guards, [&](const std::vector<std::uint8_t>& rgs, auto&& emit) {
        auto ext = rgs;
        std::uint8_t label = 0;
        for (auto x : rgs) label = std::max<std::uint8_t>(label, x + 1);
        ext.push_back(label);
        emit(std::move(ext), 1.0, -1, 0);
      });
      active.push_back(v);

      // edges from earlier active vertices into v, in ascending order
      for (int u : g_.neighbors(v)) {
        if (u > v) continue;
        int pu = static_cast<int>(std::lower_bound(active.begin(), active.end(), u) -
                                  active.begin());
        int pv = static_cast<int>(active.size()) - 1;
        int e = g_.edge_index(u, v);
        step(guards, [&](const std::vector<std::uint8_t>& rgs, auto&& emit) {
          emit(std::vector<std::uint8_t>(rgs), 1.0, e, 0);
          if (p_ > 0) {
            auto merged = rgs;
            std::uint8_t keep = std::min(merged[pu], merged[pv]);
            std::uint8_t drop = std::max(merged[pu], merged[pv]);
            if (keep != drop)
              for (auto& x : merged)
                if (x == drop) x = keep;
            emit(std::move(merged), p_, e, 1);
          }
        });
      }

      // retire every vertex whose edges are now all processed
      for (int w = 0; w <= v; ++w) {
        if (retire_at[w] != v) continue;
        int pw = static_cast<int>(std::lower_bound(active.begin(), active.end(), w) -
                                  active.begin());
        step(guards, [&](const std::vector<std::uint8_t>& rgs, auto&& emit) {
          bool last_member = true;
          for (int i = 0; i < static_cast<int>(rgs.size()); ++i)
            if (i != pw && rgs[i] == rgs[pw]) last_member = false;
          auto rest = rgs;
          rest.erase(rest.begin() + pw);
          emit(std::move(rest), last_member ? q_ : 1.0, -1, 0);
        });
        active.erase(active.begin() + pw);
      }
    }
    if (levels_.back().states.size() != 1 || !levels_.back().states[0].empty())
      throw numeric_error("RcTransfer: scan did not terminate in the empty state");
    log_z_ = log_scale_ + std::log(levels_.back().value[0]);
  }

  const Graph& g_;
  double q_, p_;
  std::vector<Level> levels_;
  double log_scale_ = 0;
  double log_z_ = 0;
  std::size_t max_states_ = 0;
};

inline double rc_transfer_log_partition(const Graph& g, double q, double p,
                                        const SizeGuards& guards = SizeGuards::current()) {
  return RcTransfer(g, q, p, guards).log_partition();
}

}  // namespace potts

#endif
