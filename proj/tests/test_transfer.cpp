#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "potts/exact.hpp"
#include "potts/rc_transfer.hpp"

using namespace potts;
using Catch::Approx;

TEST_CASE("transfer agrees with subset sums", "[transfer]") {
  struct Case {
    Graph g;
    double q, p;
  };
  std::vector<Case> cases;
  cases.push_back({path(5), 3.0, 0.8});
  cases.push_back({cycle(6), 2.0, 1.4});
  cases.push_back({cycle(6), 2.5, 0.3});
  cases.push_back({hypercube(3), 3.0, 1.7});
  cases.push_back({complete(4), 4.0, 0.6});
  cases.push_back({complete_bipartite(3, 3), 1e6, 2.0});
  cases.push_back({petersen(), 2.0, 0.9});
  for (auto& [g, q, p] : cases) {
    RcTransfer tr(g, q, p);
    CHECK(tr.log_partition() == Approx(rc_log_partition(g, q, p)).epsilon(1e-11));
  }
}

TEST_CASE("transfer handles the empty and disconnected cases", "[transfer]") {
  Graph lonely = from_edge_list(3, {{0, 1}});
  RcTransfer tr(lonely, 3.0, 0.5);
  CHECK(tr.log_partition() ==
        Approx(std::log(3.0 * (9.0 + 3.0 * 0.5))).epsilon(1e-12));
  RcTransfer zero(cycle(5), 4.0, 0.0);
  CHECK(zero.log_partition() == Approx(5 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("transfer reaches instances the subset sum cannot", "[transfer]") {
  Graph q4 = hypercube(4);  // 32 edges, beyond the subset guard
  RcTransfer tr(q4, 16.0, std::sqrt(15.0));
  CHECK(std::isfinite(tr.log_partition()));
  CHECK(tr.max_level_states() <= 21147);  // Bell(9), the max active-set width
  // crude sandwich: the empty subset alone, and the total weight bound
  double lo = 16.0 > 1 ? 16 * std::log(16.0) : 0;
  double hi = 16 * std::log(16.0) + 32 * std::log1p(std::sqrt(15.0));
  CHECK(tr.log_partition() >= lo);
  CHECK(tr.log_partition() <= hi);
}

TEST_CASE("transfer matches the coloring model through the identity", "[transfer]") {
  Graph g = cycle(5);
  for (double beta : {0.4, 1.2}) {
    RcTransfer tr(g, 3.0, std::expm1(beta));
    CHECK(tr.log_partition() ==
          Approx(potts_log_partition(g, 3, beta, PottsBackend::enumeration))
              .epsilon(1e-11));
  }
}

TEST_CASE("transfer sampling matches exact subset probabilities", "[transfer]") {
  Graph g = cycle(4);
  double q = 2.0, p = 1.5;
  // exact law over the 16 subsets
  std::map<std::vector<char>, double> law;
  double logz = rc_log_partition(g, q, p);
  for (int msk = 0; msk < 16; ++msk) {
    EdgeSubset s(4, 0);
    for (int e = 0; e < 4; ++e) s[e] = (msk >> e) & 1;
    int comps = 0;
    {
      auto comp = components_of_subset(g, s);
      std::vector<char> seen(4, 0);
      for (int v = 0; v < 4; ++v)
        if (!seen[comp[v]]) {
          seen[comp[v]] = 1;
          ++comps;
        }
    }
    int edges = msk == 0 ? 0 : __builtin_popcount(static_cast<unsigned>(msk));
    law[std::vector<char>(s.begin(), s.end())] =
        std::exp(comps * std::log(q) + edges * std::log(p) - logz);
  }
  double total = 0;
  for (auto& [s, pr] : law) total += pr;
  REQUIRE(total == Approx(1.0).epsilon(1e-12));

  RcTransfer tr(g, q, p);
  Rng rng(77);
  int draws = 40000;
  std::map<std::vector<char>, int> freq;
  for (int i = 0; i < draws; ++i) {
    auto s = tr.sample(rng);
    freq[std::vector<char>(s.begin(), s.end())]++;
  }
  for (auto& [s, pr] : law) {
    double emp = freq[s] / static_cast<double>(draws);
    double sigma = std::sqrt(pr * (1 - pr) / draws);
    CHECK(std::abs(emp - pr) < 5 * sigma + 1e-4);
  }
}

TEST_CASE("transfer sampling is deterministic under a fixed seed", "[transfer]") {
  Graph g = hypercube(3);
  RcTransfer tr(g, 3.0, 1.2);
  Rng a(9), b(9);
  for (int i = 0; i < 20; ++i) CHECK(tr.sample(a) == tr.sample(b));
}
