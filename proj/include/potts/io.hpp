#ifndef POTTS_IO_HPP
#define POTTS_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "potts/approx.hpp"
#include "potts/cluster.hpp"
#include "potts/enumerate.hpp"
#include "potts/exact.hpp"
#include "potts/graph.hpp"
#include "potts/polymer.hpp"

namespace potts {

using Json = nlohmann::json;

// ---- graph formats ----
// JSON: {"n": <int>, "edges": [[u, v], ...]}
// Text: first line "n m", then one "u v" line per edge.

inline Json graph_to_json(const Graph& g) {
  Json j;
  j["n"] = g.n();
  Json es = Json::array();
  for (auto [u, v] : g.edges()) es.push_back({u, v});
  j["edges"] = es;
  return j;
}

inline Graph graph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw parameter_error("graph json needs fields n and edges");
  if (!j["n"].is_number_integer())
    throw parameter_error("graph json: n must be an integer");
  int n = j["n"].get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw parameter_error("graph json: each edge must be a pair of integers");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return Graph(n, edges);
}

inline std::string graph_to_text(const Graph& g) {
  std::ostringstream os;
  os << g.n() << ' ' << g.m() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
  return os.str();
}

inline Graph graph_from_text(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw parameter_error("graph text: expected 'n m' header");
  std::vector<Edge> edges;
  for (int i = 0; i < m; ++i) {
    int u = 0, v = 0;
    if (!(in >> u >> v)) throw parameter_error("graph text: truncated edge list");
    edges.push_back({u, v});
  }
  return Graph(n, edges);
}

inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("cannot open graph file: " + path);
  // sniff the first non-space byte; '{' means JSON
  char c = 0;
  while (in.get(c) && (c == ' ' || c == '\n' || c == '\t' || c == '\r')) {
  }
  in.unget();
  if (c == '{') {
    Json j = Json::parse(in);
    return graph_from_json(j);
  }
  return graph_from_text(in);
}

inline void save_graph(const Graph& g, const std::string& path, bool as_json) {
  std::ofstream out(path);
  if (!out) throw parameter_error("cannot open output file: " + path);
  if (as_json)
    out << graph_to_json(g).dump(2) << '\n';
  else
    out << graph_to_text(g);
}

// ---- named instances ----
// kinds: complete(n), cycle(n), path(n), complete_bipartite(a,b),
// hypercube(dim), petersen, random_regular(n,d; needs rng)

inline Graph named_graph(const std::string& kind, int n, int a, int b, int d,
                         Rng* rng = nullptr) {
  if (kind == "complete") return complete(n);
  if (kind == "cycle") return cycle(n);
  if (kind == "path") return path(n);
  if (kind == "complete_bipartite") {
    if (a < 1 || b < 1)
      throw parameter_error("complete_bipartite needs --a and --b");
    return complete_bipartite(a, b);
  }
  if (kind == "hypercube") return hypercube(n);
  if (kind == "petersen") return petersen();
  if (kind == "random_regular") {
    if (!rng) throw parameter_error("random_regular needs a seed");
    if (d < 1) throw parameter_error("random_regular needs --d");
    return random_regular(n, d, *rng);
  }
  throw parameter_error("unknown graph kind: " + kind);
}

// ---- result records ----

inline Json json_of(const Fraction& f) {
  Json j;
  j["num"] = f.num;
  j["den"] = f.den;
  j["value"] = f.value();
  return j;
}

inline Json json_of(const FptasResult& r) {
  Json j;
  j["log_value"] = r.log_value;
  j["regime"] = regime_name(r.regime);
  j["beta_threshold"] = r.beta_threshold;
  j["level"] = r.level;
  j["truncation_bound"] = r.truncation_bound;
  j["kp_ratio"] = r.kp_ratio;
  j["polymer_count"] = r.polymer_count;
  j["cluster_count"] = r.cluster_count;
  j["max_order_seen"] = r.max_order_seen;
  return j;
}

inline Json json_of(const KpReport& r) {
  Json j;
  j["ok"] = r.ok;
  j["worst_ratio"] = r.worst_ratio;
  j["worst_polymer"] = r.worst_polymer;
  j["polymer_count"] = r.polymer_count;
  return j;
}

inline Json json_of(const Polymer& gm) {
  Json j;
  j["id"] = gm.id;
  j["vertices"] = gm.vertices;
  Json es = Json::array();
  for (auto [u, v] : gm.edges) es.push_back({u, v});
  j["edges"] = es;
  j["boundary"] = gm.boundary;
  j["log_weight"] = gm.log_weight;
  j["f"] = gm.f;
  j["g"] = gm.g;
  return j;
}

inline Json json_of(const ClusterExpansionResult& r) {
  Json j;
  j["log_xi"] = r.log_xi;
  j["tail_bound"] = r.tail_bound;
  j["level"] = r.level;
  j["cluster_count"] = r.cluster_count;
  j["max_order_seen"] = r.max_order_seen;
  return j;
}

inline Json json_of(const KargerResult& r) {
  Json j;
  j["min_cut"] = r.min_cut_value;
  j["alpha"] = r.alpha;
  j["threshold"] = r.threshold;
  j["distinct_cuts"] = r.distinct_cuts;
  j["count_bound"] = r.count_bound;
  j["within_bound"] = r.within_bound;
  j["trials"] = r.trials;
  j["verified_complete"] = r.verified_complete;
  Json sides = Json::array();
  for (Mask m : r.cut_sides) sides.push_back(vertices_of(m));
  j["cut_sides"] = sides;
  return j;
}

inline Json json_of(const EtaExpansion& e) {
  Json j;
  j["eta"] = json_of(e.eta);
  j["argmin"] = e.argmin;
  return j;
}

inline Json json_of(const BoundaryFloor& b) {
  Json j;
  j["ok"] = b.ok;
  j["min_boundary"] = b.min_boundary;
  j["threshold"] = b.threshold;
  j["witness"] = b.witness;
  return j;
}

inline Json json_of(const CoreSetCertificate& c) {
  Json j;
  j["core"] = c.core;
  j["connected_in_power7"] = c.connected_in_power7;
  j["size_bound_ok"] = c.size_bound_ok;
  j["size_bound"] = c.size_bound;
  j["boundary"] = c.boundary;
  j["j_degrees"] = c.j_degrees;
  return j;
}

inline Json json_of(const ExtremalMargin& m) {
  Json j;
  j["margin"] = m.margin;
  j["margin_uniform"] = m.margin_uniform;
  return j;
}

inline Json json_of(const SlackReport& s) {
  Json j;
  j["excess"] = s.excess;
  j["threshold"] = s.threshold;
  j["pass"] = s.pass;
  j["beta_threshold"] = s.beta_threshold;
  return j;
}

}  // namespace potts

#endif
