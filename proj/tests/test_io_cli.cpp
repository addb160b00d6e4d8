#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "potts/approx.hpp"
#include "potts/cluster.hpp"
#include "potts/enumerate.hpp"
#include "potts/exact.hpp"
#include "potts/io.hpp"
#include "potts/polymer.hpp"

using namespace potts;
using Catch::Approx;

namespace {

struct TempFile {
  std::filesystem::path p;
  explicit TempFile(const std::string& name)
      : p(std::filesystem::temp_directory_path() /
          ("potts_io_" + std::to_string(::getpid()) + "_" + name)) {}
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(p, ec);
  }
  std::string str() const { return p.string(); }
};

}  // namespace

TEST_CASE("graph json round trip", "[io]") {
  Rng rng(12);
  for (Graph g : {petersen(), random_regular(10, 3, rng), path(2)}) {
    Json j = graph_to_json(g);
    REQUIRE(j["n"] == g.n());
    REQUIRE(j["edges"].size() == static_cast<size_t>(g.m()));
    Graph back = graph_from_json(j);
    REQUIRE(back.n() == g.n());
    REQUIRE(back.edges() == g.edges());
  }
}

TEST_CASE("graph json validation", "[io]") {
  REQUIRE_THROWS_AS(graph_from_json(Json::array()), parameter_error);
  REQUIRE_THROWS_AS(graph_from_json(Json{{"n", 3}}), parameter_error);
  REQUIRE_THROWS_AS(graph_from_json(Json{{"edges", Json::array()}}),
                    parameter_error);
  REQUIRE_THROWS_AS(graph_from_json(Json{{"n", 2.5}, {"edges", Json::array()}}),
                    parameter_error);
  Json bad_edge = {{"n", 3}, {"edges", {{0, 1, 2}}}};
  REQUIRE_THROWS_AS(graph_from_json(bad_edge), parameter_error);
  Json non_int = {{"n", 3}, {"edges", {{0, "x"}}}};
  REQUIRE_THROWS_AS(graph_from_json(non_int), parameter_error);
  // structurally valid json, invalid graph: endpoint out of range
  Json oob = {{"n", 2}, {"edges", {{0, 5}}}};
  REQUIRE_THROWS_AS(graph_from_json(oob), parameter_error);
}

TEST_CASE("graph text round trip", "[io]") {
  Graph g = complete_bipartite(2, 3);
  std::string text = graph_to_text(g);
  std::istringstream in(text);
  Graph back = graph_from_text(in);
  REQUIRE(back.n() == g.n());
  REQUIRE(back.edges() == g.edges());

  std::istringstream empty("");
  REQUIRE_THROWS_AS(graph_from_text(empty), parameter_error);
  std::istringstream truncated("3 2\n0 1\n");
  REQUIRE_THROWS_AS(graph_from_text(truncated), parameter_error);
  std::istringstream garbage("zebra\n");
  REQUIRE_THROWS_AS(graph_from_text(garbage), parameter_error);
}

TEST_CASE("load_graph sniffs json and text files", "[io]") {
  Graph g = cycle(5);

  TempFile as_json("g.json");
  save_graph(g, as_json.str(), true);
  Graph j = load_graph(as_json.str());
  REQUIRE(j.edges() == g.edges());

  TempFile as_text("g.txt");
  save_graph(g, as_text.str(), false);
  Graph t = load_graph(as_text.str());
  REQUIRE(t.edges() == g.edges());

  // leading whitespace must not confuse the format sniff
  TempFile padded("pad.json");
  {
    std::ofstream out(padded.str());
    out << "\n  \t" << graph_to_json(g).dump() << "\n";
  }
  REQUIRE(load_graph(padded.str()).edges() == g.edges());

  REQUIRE_THROWS_AS(load_graph("/nonexistent/potts/graph.json"),
                    parameter_error);
}

TEST_CASE("named_graph dispatch", "[io]") {
  REQUIRE(named_graph("complete", 5, 0, 0, 0).m() == 10);
  REQUIRE(named_graph("cycle", 6, 0, 0, 0).m() == 6);
  REQUIRE(named_graph("path", 4, 0, 0, 0).m() == 3);
  REQUIRE(named_graph("complete_bipartite", 0, 2, 3, 0).m() == 6);
  REQUIRE(named_graph("petersen", 0, 0, 0, 0).n() == 10);

  // the hypercube parameter is the dimension, not the vertex count
  Graph cube = named_graph("hypercube", 3, 0, 0, 0);
  REQUIRE(cube.n() == 8);
  REQUIRE(cube.regular_degree() == 3);

  Rng rng(7);
  Graph rr = named_graph("random_regular", 10, 0, 0, 3, &rng);
  REQUIRE(rr.n() == 10);
  REQUIRE(rr.is_regular());
  REQUIRE(rr.regular_degree() == 3);

  REQUIRE_THROWS_AS(named_graph("random_regular", 10, 0, 0, 3, nullptr),
                    parameter_error);
  REQUIRE_THROWS_AS(named_graph("random_regular", 10, 0, 0, 0, &rng),
                    parameter_error);
  REQUIRE_THROWS_AS(named_graph("complete_bipartite", 0, 0, 3, 0),
                    parameter_error);
  REQUIRE_THROWS_AS(named_graph("moebius", 8, 0, 0, 0), parameter_error);
}

TEST_CASE("result records serialize their fields", "[io]") {
  SECTION("fraction") {
    std::vector<std::uint64_t> tri = {0b110, 0b101, 0b011};
    Json j = json_of(ursell_fraction(tri));
    REQUIRE(j["num"] == 1);
    REQUIRE(j["den"] == 3);
    REQUIRE(j["value"].get<double>() == Approx(1.0 / 3));
  }

  SECTION("fptas result") {
    Json j = json_of(fptas_log_partition(cycle(6), 20, 0.05));
    for (const char* k : {"log_value", "regime", "beta_threshold", "level",
                          "truncation_bound", "kp_ratio", "polymer_count",
                          "cluster_count", "max_order_seen"})
      REQUIRE(j.contains(k));
    REQUIRE(j["regime"] == "high");
  }

  SECTION("convergence report and polymer") {
    auto model = make_high_temperature_model(cycle(4), 4, 0.02);
    Json r = json_of(kp_check(model));
    REQUIRE(r["ok"] == true);
    REQUIRE(r["worst_ratio"].get<double>() > 0);
    REQUIRE(r["polymer_count"] == model.polymers.size());

    Json p = json_of(model.polymers[0]);
    for (const char* k :
         {"id", "vertices", "edges", "boundary", "log_weight", "f", "g"})
      REQUIRE(p.contains(k));
  }

  SECTION("cluster expansion result") {
    auto model = make_high_temperature_model(cycle(4), 4, 0.02);
    auto adj = incompatibility_adjacency(model);
    Json j = json_of(truncated_log_xi(model, adj, 2.0, nullptr));
    for (const char* k :
         {"log_xi", "tail_bound", "level", "cluster_count", "max_order_seen"})
      REQUIRE(j.contains(k));
  }

  SECTION("cut count result") {
    Rng rng(3);
    Json j = json_of(karger_count_cuts(complete(4), 1.0, rng));
    REQUIRE(j["min_cut"] == 3);
    REQUIRE(j["distinct_cuts"] == 4);
    REQUIRE(j["count_bound"].get<double>() == Approx(24.0));
    REQUIRE(j["within_bound"] == true);
    REQUIRE(j["cut_sides"].size() == 4);
    REQUIRE(j["cut_sides"][0].is_array());
  }

  SECTION("expansion and boundary certificates") {
    Json e = json_of(eta_expansion(complete(4)));
    REQUIRE(e["eta"]["value"].get<double>() == Approx(2.0));
    REQUIRE(e["argmin"].is_array());

    Json b = json_of(min_boundary_check(hypercube(3)));
    REQUIRE(b["ok"] == true);
    REQUIRE(b["threshold"] == 4);

    Json c = json_of(core_set_certificate(hypercube(3), {0, 1, 2, 3}));
    REQUIRE(c["boundary"] == 4);
    REQUIRE(c["connected_in_power7"] == true);
    REQUIRE(c["size_bound_ok"] == true);
    REQUIRE_FALSE(c["core"].empty());
    REQUIRE(c["j_degrees"].size() == c["core"].size());
  }

  SECTION("extremal margin and slack reports") {
    Json m = json_of(extremal_margin(complete(4), 3, 0.5, ExtremalVariant::clique));
    REQUIRE(m["margin"].get<double>() == Approx(0.0).margin(1e-9));
    REQUIRE(m.contains("margin_uniform"));

    Json s = json_of(clique_partition_bound_check(3, 81, 1.1 * beta_o(81, 3), 0.1));
    REQUIRE(s["pass"] == true);
    REQUIRE(s.contains("excess"));
    REQUIRE(s.contains("threshold"));
    REQUIRE(s.contains("beta_threshold"));
  }
}
