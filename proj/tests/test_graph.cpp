#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "potts/enumerate.hpp"
#include "potts/graph.hpp"
#include "potts/mincut.hpp"

using namespace potts;

TEST_CASE("generator shapes and degrees", "[graph]") {
  Graph k5 = complete(5);
  CHECK(k5.n() == 5);
  CHECK(k5.m() == 10);
  CHECK(k5.regular_degree() == 4);

  Graph k23 = complete_bipartite(2, 3);
  CHECK(k23.n() == 5);
  CHECK(k23.m() == 6);
  CHECK(k23.is_triangle_free());
  CHECK_FALSE(k23.is_regular());

  Graph c6 = cycle(6);
  CHECK(c6.m() == 6);
  CHECK(c6.regular_degree() == 2);
  CHECK(c6.is_connected());

  Graph p4 = path(4);
  CHECK(p4.m() == 3);
  CHECK(p4.degree(0) == 1);
  CHECK(p4.degree(1) == 2);

  Graph q4 = hypercube(4);
  CHECK(q4.n() == 16);
  CHECK(q4.m() == 32);
  CHECK(q4.regular_degree() == 4);
  CHECK(q4.is_triangle_free());
  CHECK(q4.is_connected());

  Graph pet = petersen();
  CHECK(pet.n() == 10);
  CHECK(pet.m() == 15);
  CHECK(pet.regular_degree() == 3);
  CHECK(pet.is_triangle_free());
}

TEST_CASE("random regular generator is simple and regular", "[graph]") {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    Graph g = random_regular(10, 3, rng);
    REQUIRE(g.n() == 10);
    REQUIRE(g.is_regular());
    REQUIRE(g.regular_degree() == 3);
    std::set<Edge> seen(g.edges().begin(), g.edges().end());
    REQUIRE(seen.size() == g.edges().size());
    for (auto [u, v] : g.edges()) REQUIRE(u != v);
  }
}

TEST_CASE("distances and graph power", "[graph]") {
  Graph c6 = cycle(6);
  auto dist = c6.distances_from(0);
  CHECK(dist == std::vector<int>{0, 1, 2, 3, 2, 1});

  Graph sq = graph_power(c6, 2);
  for (int v = 0; v < 6; ++v) CHECK(sq.degree(v) == 4);
  Graph cube = graph_power(c6, 3);
  CHECK(cube.m() == 15);  // diameter 3, so the cube is complete
}

TEST_CASE("edge boundary identities", "[graph]") {
  Graph q3 = hypercube(3);
  VertexSet face{0, 1, 2, 3};
  CHECK(edge_boundary(q3, face).size() == 4);
  CHECK(boundary_size(q3, mask_of(face)) == 4);
  for (Mask a : {Mask{0b1}, Mask{0b101}, Mask{0b1111}, Mask{0b10110}}) {
    auto vs = vertices_of(a);
    CHECK(boundary_size(q3, a) == static_cast<int>(edge_boundary(q3, vs).size()));
  }
}

TEST_CASE("expansion constant on reference graphs", "[graph]") {
  auto k4 = eta_expansion(complete(4));
  CHECK(k4.eta == Fraction(2, 1));

  auto c8 = eta_expansion(cycle(8));
  CHECK(c8.eta == Fraction(1, 2));
  CHECK(c8.argmin.size() == 4);

  auto q3 = eta_expansion(hypercube(3));
  CHECK(q3.eta == Fraction(1, 1));

  auto q4 = eta_expansion(hypercube(4));
  CHECK(q4.eta == Fraction(1, 1));

  // the witness always attains the stated ratio
  auto pet = eta_expansion(petersen());
  int b = static_cast<int>(edge_boundary(petersen(), pet.argmin).size());
  CHECK(Fraction(b, static_cast<long long>(pet.argmin.size())) == pet.eta);
  CHECK(check_eta(petersen(), pet.eta));
  CHECK(check_eta(petersen(), Fraction(1, 2)));
  CHECK_FALSE(check_eta(cycle(8), Fraction(1, 1)));
}

TEST_CASE("boundary floor for regular graphs", "[graph]") {
  auto q3 = min_boundary_check(hypercube(3));
  CHECK(q3.ok);  // every 2 <= |A| <= 4 has boundary >= 4 on the 3-cube
  CHECK(q3.threshold == 4);
  CHECK(q3.min_boundary >= 4);

  // triangular prism: one triangle has boundary 3 < 2*3-2
  Graph prism = from_edge_list(
      6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {0, 3}, {1, 4}, {2, 5}});
  auto pr = min_boundary_check(prism);
  CHECK_FALSE(pr.ok);
  CHECK(pr.min_boundary == 3);
  CHECK(pr.threshold == 4);
  CHECK(pr.witness.size() == 3);
}

TEST_CASE("minimum cut agrees with exhaustive sweep", "[graph]") {
  struct Case {
    Graph g;
    long long expect;
  };
  std::vector<Case> cases;
  cases.push_back({petersen(), 3});
  cases.push_back({hypercube(3), 3});
  cases.push_back({cycle(6), 2});
  cases.push_back({path(5), 1});
  cases.push_back({complete(5), 4});
  for (auto& [g, expect] : cases) {
    CHECK(min_cut(g) == expect);
    CHECK(min_cut_exhaustive(g) == expect);
  }
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    Graph g = random_regular(9, 4, rng);
    CHECK(min_cut(g) == min_cut_exhaustive(g));
  }
}

TEST_CASE("multigraph contraction bookkeeping", "[graph]") {
  Graph c4 = cycle(4);
  MultiGraph mg(c4);
  CHECK(mg.vertex_count() == 4);
  CHECK(mg.edge_count() == 4);
  mg.contract_edge(0);  // collapse {0,1}
  CHECK(mg.vertex_count() == 3);
  CHECK(mg.edge_count() == 3);  // the contracted edge vanishes, no loop kept
  CHECK(mg.find(0) == mg.find(1));
  // contracting down to 2 blocks leaves the two parallel rim edges
  mg.contract_edge(0);
  CHECK(mg.vertex_count() == 2);
  CHECK(mg.edge_count() == 2);
  auto w = mg.weight_matrix();
  CHECK(w.size() == 2);
  CHECK(w[0][1] == 2);
  CHECK(w[1][0] == 2);
}

TEST_CASE("connected set enumeration counts", "[graph]") {
  // center of a 3-path: {1}, {0,1}, {1,2}, {0,1,2}
  auto center = enumerate_connected_sets(path(3), 1, 3, SubgraphMode::vertex_induced);
  CHECK(center.size() == 4);

  // rooted connected subgraphs of the triangle: 1 trivial + 2 single edges
  // + 3 edge pairs + 1 full triangle
  auto k3 = enumerate_connected_sets(complete(3), 0, 3, SubgraphMode::with_edge_subsets);
  CHECK(k3.size() == 7);

  auto small = enumerate_connected_sets(cycle(4), 0, 2, SubgraphMode::vertex_induced);
  CHECK(small.size() == 3);  // {0}, {0,1}, {0,3}

  // every arc through vertex 0 of length <= 3 on the 6-cycle has boundary 2
  CHECK(count_connected_sets_with_boundary(cycle(6), 0, 2) == 6);
  CHECK(count_connected_sets_with_boundary(cycle(6), 0, 3) == 0);
}

TEST_CASE("vertex induced enumeration matches subgraph supports", "[graph]") {
  Graph g = petersen();
  // induced connected sets of size <= 3 through vertex 0: the vertex, its 3
  // edges, and the paths of length two (petersen has no triangles)
  auto sets = enumerate_connected_sets(g, 0, 3, SubgraphMode::vertex_induced);
  int by_size[4] = {0, 0, 0, 0};
  for (const auto& rec : sets) by_size[rec.vertices.size()]++;
  CHECK(by_size[1] == 1);
  CHECK(by_size[2] == 3);
  CHECK(by_size[3] == 9);  // 3 paths centered at 0 plus 3*2 paths ending at 0
}

TEST_CASE("core set certificate on the 3-cube", "[graph]") {
  Graph q3 = hypercube(3);
  VertexSet a{0, 1, 2, 3};
  auto cert = core_set_certificate(q3, a);
  REQUIRE_FALSE(cert.core.empty());
  CHECK(cert.connected_in_power7);
  CHECK(cert.size_bound_ok);
  CHECK(cert.boundary == 4);
  for (int jd : cert.j_degrees) {
    CHECK(jd >= 6);   // C(d+1, 2) with d = 3
    CHECK(jd <= 9);   // d^2
  }
}
