#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "potts/exact.hpp"
#include "potts/polymer.hpp"

using namespace potts;
using Catch::Approx;

namespace {

const Polymer* find_polymer(const PolymerModel& m, Mask vmask) {
  for (const auto& gm : m.polymers)
    if (gm.vmask == vmask) return &gm;
  return nullptr;
}

}  // namespace

TEST_CASE("low temperature polymers on the 6-cycle", "[polymer]") {
  double beta = 5.0, q = 3.0;
  auto model = make_low_temperature_model(cycle(6), q, beta, 0.25);
  // deviating sets are connected arcs of fewer than 3 vertices
  REQUIRE(model.polymers.size() == 12);
  for (const auto& gm : model.polymers) CHECK(2 * gm.v < 6);

  const Polymer* single = find_polymer(model, Mask{1});
  REQUIRE(single);
  CHECK(single->v == 1);
  CHECK(single->e == 0);
  CHECK(single->boundary == 2);
  // weight e^{-beta(boundary + internal)} * Z_polymer(q - 1, beta)
  CHECK(single->log_weight == Approx(std::log(2.0) - 10.0).epsilon(1e-12));
  CHECK(single->log_tilt == Approx(0.5).epsilon(1e-12));
  double unit = 0.25 * std::log(3.0) / 8.0;
  CHECK(single->f == Approx(unit).epsilon(1e-12));
  CHECK(single->g == Approx(2 * unit + 0.5).epsilon(1e-12));

  const Polymer* arc = find_polymer(model, Mask{0b11});
  REQUIRE(arc);
  CHECK(arc->v == 2);
  CHECK(arc->e == 1);
  CHECK(arc->boundary == 2);
  double zk2 = 2 * std::exp(beta) + 2;  // two colors on a single edge
  CHECK(arc->log_weight == Approx(-15.0 + std::log(zk2)).epsilon(1e-12));
  CHECK(arc->f == Approx(2 * unit).epsilon(1e-12));
  CHECK(arc->g == Approx(2 * unit + 1.0).epsilon(1e-12));
}

TEST_CASE("low temperature incompatibility is distance at most one", "[polymer]") {
  auto model = make_low_temperature_model(cycle(6), 3.0, 5.0);
  const Polymer* v0 = find_polymer(model, Mask{1});        // {0}
  const Polymer* v2 = find_polymer(model, Mask{0b100});    // {2}
  const Polymer* v3 = find_polymer(model, Mask{0b1000});   // {3}
  const Polymer* e01 = find_polymer(model, Mask{0b11});    // {0,1}
  REQUIRE((v0 && v2 && v3 && e01));
  CHECK(model.incompatible(v0->id, v0->id));    // reflexive
  CHECK(model.incompatible(v0->id, e01->id));   // overlap
  CHECK(model.incompatible(e01->id, v2->id));   // adjacent at distance one
  CHECK_FALSE(model.incompatible(v0->id, v3->id));
  CHECK_FALSE(model.incompatible(v0->id, v2->id));
}

TEST_CASE("low temperature model preconditions", "[polymer]") {
  CHECK_THROWS_AS(make_low_temperature_model(path(3), 3.0, 2.0), precondition_error);
  CHECK_THROWS_AS(make_low_temperature_model(cycle(6), 1.0, 2.0), parameter_error);
}

TEST_CASE("high temperature polymers on the 4-cycle", "[polymer]") {
  double q = 4.0, beta = 0.02;
  auto model = make_high_temperature_model(cycle(4), q, beta);
  // connected edge subsets: 4 singles, 4 adjacent pairs, 4 triples, 1 full
  REQUIRE(model.polymers.size() == 13);
  double p = std::expm1(beta);
  const Polymer* e01 = find_polymer(model, Mask{0b11});
  REQUIRE(e01);
  CHECK(e01->v == 2);
  CHECK(e01->e == 1);
  CHECK(e01->log_weight == Approx(std::log(p / q)).epsilon(1e-12));
  CHECK(e01->f == Approx(2.0).epsilon(1e-12));
  CHECK(e01->g == Approx(2.0).epsilon(1e-12));
  // vertex sharing decides compatibility
  const Polymer* e23 = find_polymer(model, Mask{0b1100});
  REQUIRE(e23);
  CHECK_FALSE(model.incompatible(e01->id, e23->id));

  int with_four_vertices = 0;
  for (const auto& gm : model.polymers)
    if (gm.v == 4) ++with_four_vertices;
  CHECK(with_four_vertices == 5);  // 4 spanning paths plus the full cycle

  auto empty = make_high_temperature_model(cycle(4), q, 0.0);
  CHECK(empty.polymers.empty());
}

TEST_CASE("convergence condition on reference instances", "[polymer]") {
  // hand computed ratio for the 6-cycle at beta = 5, q = 3: 0.0477
  auto low = make_low_temperature_model(cycle(6), 3.0, 5.0);
  auto rep = kp_check(low);
  CHECK(rep.ok);
  CHECK(rep.worst_ratio == Approx(0.047713).epsilon(1e-4));

  auto high_ok = kp_check(make_high_temperature_model(cycle(4), 4.0, 0.02));
  CHECK(high_ok.ok);
  auto high_bad = kp_check(make_high_temperature_model(cycle(4), 4.0, 0.05));
  CHECK_FALSE(high_bad.ok);
  CHECK(high_bad.worst_ratio > 1.0);
}

TEST_CASE("convergence check accepts custom decay functions", "[polymer]") {
  auto model = make_high_temperature_model(cycle(4), 4.0, 0.02);
  // shrinking f by a huge factor breaks the inequality
  auto rep = kp_check(
      model, [](const Polymer&) { return 1e-9; },
      [](const Polymer& gm) { return gm.g; });
  CHECK_FALSE(rep.ok);
}

TEST_CASE("pinned decay mass on the 6-cycle", "[polymer]") {
  auto model = make_low_temperature_model(cycle(6), 3.0, 5.0);
  // each vertex attains its minimum f at the singleton polymer
  CHECK(min_f_sum(model) == Approx(6 * 0.25 * std::log(3.0) / 8.0).epsilon(1e-12));
}

TEST_CASE("high temperature family sum reproduces the edge model", "[polymer]") {
  struct Case {
    Graph g;
    double q, beta;
  };
  std::vector<Case> cases;
  cases.push_back({cycle(4), 4.0, 0.02});
  cases.push_back({cycle(4), 4.0, 0.5});  // identity needs no convergence
  cases.push_back({cycle(5), 2.5, 0.3});
  cases.push_back({complete(4), 3.0, 0.2});
  for (auto& [g, q, beta] : cases) {
    auto model = make_high_temperature_model(g, q, beta);
    double lhs = g.n() * std::log(q) + std::log(sum_compatible_families(model));
    double rhs = rc_log_partition(g, q, std::expm1(beta));
    CHECK(lhs == Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("low temperature family sum reproduces the majority phase", "[polymer]") {
  struct Case {
    Graph g;
    int q;
    double beta;
  };
  std::vector<Case> cases;
  cases.push_back({cycle(6), 3, 5.0});
  cases.push_back({cycle(6), 2, 3.0});
  cases.push_back({complete(4), 3, 2.0});
  for (auto& [g, q, beta] : cases) {
    auto model = make_low_temperature_model(g, q, beta);
    FamilySumOptions opt;
    opt.restrict_half_total = true;
    double rhs = std::log(static_cast<double>(q)) +
                 beta * model.d * g.n() / 2.0 +
                 std::log(sum_compatible_families(model, opt));
    // direct sum of e^{beta m(sigma)} over colorings with a majority color
    LogSumExp lhs;
    std::uint64_t total = 1;
    for (int i = 0; i < g.n(); ++i) total *= q;
    SpinConfig sigma(g.n());
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t t = idx;
      for (int v = 0; v < g.n(); ++v) {
        sigma[v] = static_cast<int>(t % q);
        t /= q;
      }
      if (majority_color(sigma, q))
        lhs.add(beta * monochromatic_edges(g, sigma));
    }
    CHECK(lhs.get() == Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("tilted weights shift by the stated amount", "[polymer]") {
  auto model = make_low_temperature_model(cycle(6), 3.0, 5.0);
  for (const auto& gm : model.polymers) {
    CHECK(model.log_weight(gm.id, false) == Approx(gm.log_weight));
    CHECK(model.log_weight(gm.id, true) ==
          Approx(gm.log_weight + gm.v / static_cast<double>(model.d)));
  }
}

TEST_CASE("incompatibility adjacency matches the pairwise test", "[polymer]") {
  auto model = make_high_temperature_model(cycle(4), 4.0, 0.02);
  auto adj = incompatibility_adjacency(model);
  int n = static_cast<int>(model.polymers.size());
  for (int i = 0; i < n; ++i) {
    CHECK(adj[i].test(i));
    for (int j = 0; j < n; ++j)
      CHECK(adj[i].test(j) == model.incompatible(i, j));
  }
}

TEST_CASE("polymer subgraph relabels to a standalone graph", "[polymer]") {
  auto model = make_low_temperature_model(cycle(6), 3.0, 5.0);
  const Polymer* arc = find_polymer(model, Mask{0b11});
  REQUIRE(arc);
  Graph sub = polymer_subgraph(*arc);
  CHECK(sub.n() == 2);
  CHECK(sub.m() == 1);
}
