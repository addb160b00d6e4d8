// Command-line harness: batch access to the exact oracles, the polymer and
// cluster machinery, the approximation algorithms, and the experiments.
// Commands: gen, exact, rc, fptas, sample, kp-check, ursell, karger,
// enum-sets, experiment {contract, structure}, sweep, verify.
// Exit codes: 0 ok, 2 unsupported regime, 3 size-guard refusal, 1 other.
// Errors are emitted as one-line JSON payloads on stderr.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "potts/approx.hpp"
#include "potts/cluster.hpp"
#include "potts/enumerate.hpp"
#include "potts/exact.hpp"
#include "potts/graph.hpp"
#include "potts/io.hpp"
#include "potts/mincut.hpp"
#include "potts/polymer.hpp"
#include "potts/rc_transfer.hpp"

namespace {

using potts::Graph;
using potts::Json;
using potts::Rng;

struct RunConfig {
  std::string command;
  // graph source: file or generator spec
  std::string graph_file;
  std::string kind;
  int n = 0, a = 0, b = 0, d = 0;
  // model parameters
  double q = 2;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double eps = 0.25;
  double delta = 0.1;
  double alpha = 1.0;
  // cutoff overrides
  int cluster_order = 0;       // 0 = guard default
  double level_override = -1;  // < 0 = derive from delta
  // run plumbing
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  std::string format = "json";
  // command extras
  std::string backend = "auto";
  std::string regime;            // kp-check: high | low
  std::string sampler = "approx";
  std::string variant = "basic";
  std::string model = "potts";   // experiment structure
  std::string mode = "vertex_induced";
  std::string sigma_text;
  std::string edges_text;
  std::string cell_command = "fptas";
  long long ell = -1;
  int root = 0;
  int max_size = 0;
  int draws = 1;
  int samples = 100;
  std::uint64_t trials = 0;
  int k = 0;
  bool dump_polymers = false;
  bool count_only = false;
  bool coefficients = false;
  bool polynomial = false;
  bool tilted = false;
  Json config_json;  // raw config for sweep grids
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<potts::Edge> parse_edge_list(const std::string& text) {
  std::vector<potts::Edge> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto dash = item.find('-');
    if (dash == std::string::npos)
      throw potts::parameter_error("edge list: expected 'u-v' items");
    out.push_back({std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1))});
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw potts::parameter_error("cannot write: " + path);
    f << content;
  }
  std::filesystem::rename(tmp, path);
}

void emit(const Json& j, const RunConfig& cfg) {
  std::string text = j.dump(2) + "\n";
  if (cfg.out.empty())
    std::cout << text;
  else
    write_file_atomic(cfg.out, text);
}

Graph resolve_graph(const RunConfig& cfg, Rng& rng) {
  if (!cfg.graph_file.empty() && !cfg.kind.empty())
    throw potts::parameter_error("pass exactly one graph source (--graph or --kind)");
  if (!cfg.graph_file.empty()) return potts::load_graph(cfg.graph_file);
  if (!cfg.kind.empty()) {
    int n = cfg.n;
    if (cfg.kind == "hypercube" && n == 0 && cfg.d > 0) n = cfg.d;
    return potts::named_graph(cfg.kind, n, cfg.a, cfg.b, cfg.d, &rng);
  }
  throw potts::parameter_error("no graph source: pass --graph FILE or --kind NAME");
}

double resolve_beta(const RunConfig& cfg) {
  bool has_beta = !std::isnan(cfg.beta);
  bool has_p = !std::isnan(cfg.p);
  if (has_beta && has_p)
    throw potts::parameter_error("pass either --beta or --p, not both");
  if (has_beta) return cfg.beta;
  if (has_p) return std::log1p(cfg.p);
  throw potts::parameter_error("missing --beta (or --p)");
}

potts::PottsBackend backend_of(const std::string& name) {
  if (name == "auto") return potts::PottsBackend::automatic;
  if (name == "enumeration") return potts::PottsBackend::enumeration;
  if (name == "random_cluster") return potts::PottsBackend::random_cluster;
  if (name == "closed_form") return potts::PottsBackend::closed_form;
  throw potts::parameter_error("unknown backend: " + name);
}

// ---- command handlers ----

int cmd_gen(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  if (cfg.format == "text") {
    if (cfg.out.empty())
      std::cout << potts::graph_to_text(g);
    else
      write_file_atomic(cfg.out, potts::graph_to_text(g));
  } else {
    emit(potts::graph_to_json(g), cfg);
  }
  return 0;
}

int cmd_exact(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  double beta = resolve_beta(cfg);
  Json j;
  j["graph"] = potts::graph_to_json(g);
  j["q"] = cfg.q;
  j["beta"] = beta;
  j["backend"] = cfg.backend;
  j["logZ"] = potts::potts_log_partition(g, cfg.q, beta, backend_of(cfg.backend));
  if (cfg.coefficients) {
    auto coeffs = potts::potts_coefficients(g, static_cast<long long>(cfg.q));
    j["coefficients"] = coeffs;  // index k: colorings with k monochromatic edges
  }
  emit(j, cfg);
  return 0;
}

int cmd_rc(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  if (std::isnan(cfg.p) && std::isnan(cfg.beta))
    throw potts::parameter_error("missing --p (or --beta)");
  double p = !std::isnan(cfg.p) ? cfg.p : std::expm1(cfg.beta);
  Json j;
  j["graph"] = potts::graph_to_json(g);
  j["q"] = cfg.q;
  j["p"] = p;
  if (cfg.backend == "transfer") {
    potts::RcTransfer tr(g, cfg.q, p);
    j["logZ"] = tr.log_partition();
    j["backend"] = "transfer";
    j["max_level_states"] = tr.max_level_states();
  } else if (cfg.backend == "auto" || cfg.backend == "subsets") {
    j["logZ"] = potts::rc_log_partition(g, cfg.q, p);
    j["backend"] = "subsets";
  } else {
    throw potts::parameter_error("rc backend must be subsets or transfer");
  }
  if (cfg.polynomial) {
    // integer coefficients of p^k: sum_c cnt[k][c] q^c, for integer q
    if (std::abs(cfg.q - std::round(cfg.q)) > 1e-12)
      throw potts::parameter_error("--polynomial requires integer q");
    auto table = potts::rc_rank_table(g);
    std::vector<std::uint64_t> coeff(g.m() + 1, 0);
    for (int kk = 0; kk <= g.m(); ++kk) {
      for (int c = 0; c <= g.n(); ++c) {
        if (!table.cnt[kk][c]) continue;
        std::uint64_t qc = 1;
        for (int i = 0; i < c; ++i) {
          if (qc > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(cfg.q))
            throw potts::numeric_error("--polynomial: coefficient overflow");
          qc *= static_cast<std::uint64_t>(cfg.q);
        }
        std::uint64_t add = table.cnt[kk][c] * qc;
        if (add / qc != table.cnt[kk][c] ||
            coeff[kk] > std::numeric_limits<std::uint64_t>::max() - add)
          throw potts::numeric_error("--polynomial: coefficient overflow");
        coeff[kk] += add;
      }
    }
    j["p_coefficients"] = coeff;
  }
  emit(j, cfg);
  return 0;
}

int cmd_fptas(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  double beta = resolve_beta(cfg);
  potts::FptasOptions opt;
  opt.eps = cfg.eps;
  opt.delta = cfg.delta;
  opt.max_order = cfg.cluster_order;
  auto res = potts::fptas_log_partition(g, cfg.q, beta, opt);
  Json j = potts::json_of(res);
  j["graph"] = potts::graph_to_json(g);
  j["q"] = cfg.q;
  j["beta"] = beta;
  j["delta"] = cfg.delta;
  emit(j, cfg);
  return 0;
}

int cmd_sample(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  Json j;
  j["q"] = cfg.q;
  j["seed"] = cfg.seed;
  j["draws"] = cfg.draws;
  j["sampler"] = cfg.sampler;
  Json samples = Json::array();
  if (cfg.sampler == "approx") {
    double beta = resolve_beta(cfg);
    potts::ApproxSamplerOptions opt;
    opt.eps = cfg.eps;
    opt.tv_budget = cfg.delta;
    opt.max_order = cfg.cluster_order;
    potts::ApproxPottsSampler sampler(g, static_cast<int>(cfg.q), beta, opt);
    for (int i = 0; i < cfg.draws; ++i) samples.push_back(sampler.sample(rng));
    j["beta"] = beta;
    j["diagnostics"] = {{"regime", potts::regime_name(sampler.regime())},
                        {"polymer_count", sampler.polymer_count()},
                        {"level", sampler.level()},
                        {"kp_ratio", sampler.kp_ratio()},
                        {"clamp_count", sampler.clamp_count()},
                        {"rejections", sampler.rejections()}};
  } else if (cfg.sampler == "exact") {
    double beta = resolve_beta(cfg);
    potts::PottsSampler sampler(g, static_cast<int>(cfg.q), beta);
    for (int i = 0; i < cfg.draws; ++i) samples.push_back(sampler.sample(rng));
    j["beta"] = beta;
    j["diagnostics"] = {{"states", sampler.states()}};
  } else if (cfg.sampler == "rc-transfer") {
    if (std::isnan(cfg.p) && std::isnan(cfg.beta))
      throw potts::parameter_error("missing --p (or --beta)");
    double p = !std::isnan(cfg.p) ? cfg.p : std::expm1(cfg.beta);
    potts::RcTransfer tr(g, cfg.q, p);
    for (int i = 0; i < cfg.draws; ++i) {
      auto subset = tr.sample(rng);
      samples.push_back(std::vector<int>(subset.begin(), subset.end()));
    }
    j["p"] = p;
    j["diagnostics"] = {{"log_partition", tr.log_partition()},
                        {"max_level_states", tr.max_level_states()}};
  } else {
    throw potts::parameter_error("sampler must be approx, exact, or rc-transfer");
  }
  j["samples"] = samples;
  emit(j, cfg);
  return 0;
}

int cmd_kp_check(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  double beta = resolve_beta(cfg);
  if (cfg.regime != "high" && cfg.regime != "low")
    throw potts::parameter_error("kp-check needs --regime high|low");
  potts::PolymerModel model =
      cfg.regime == "high"
          ? potts::make_high_temperature_model(g, cfg.q, beta)
          : potts::make_low_temperature_model(g, cfg.q, beta, cfg.eps);
  auto rep = potts::kp_check(model);
  Json j = potts::json_of(rep);
  j["regime"] = cfg.regime;
  j["q"] = cfg.q;
  j["beta"] = beta;
  j["pinned_decay_mass"] = potts::min_f_sum(model);
  if (cfg.dump_polymers) {
    Json ps = Json::array();
    for (const auto& gm : model.polymers) ps.push_back(potts::json_of(gm));
    j["polymers"] = ps;
  }
  emit(j, cfg);
  return 0;
}

int cmd_ursell(RunConfig& cfg) {
  if (cfg.edges_text.empty() && cfg.k <= 0)
    throw potts::parameter_error("ursell needs --edges (and optionally --k)");
  auto edges = parse_edge_list(cfg.edges_text);
  int k = cfg.k;
  for (auto [u, v] : edges) k = std::max({k, u + 1, v + 1});
  if (k <= 0) throw potts::parameter_error("ursell: empty vertex set");
  std::vector<std::uint64_t> adj(k, 0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= k || v >= k || u == v)
      throw potts::parameter_error("ursell: bad edge");
    adj[u] |= std::uint64_t{1} << v;
    adj[v] |= std::uint64_t{1} << u;
  }
  Json j;
  j["k"] = k;
  j["alternating_connected_count"] = potts::alternating_connected_count(adj);
  j["ursell"] = potts::json_of(potts::ursell_fraction(adj));
  emit(j, cfg);
  return 0;
}

int cmd_karger(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  auto res = potts::karger_count_cuts(g, cfg.alpha, rng, cfg.trials);
  Json j = potts::json_of(res);
  j["seed"] = cfg.seed;
  emit(j, cfg);
  return 0;
}

int cmd_enum_sets(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  potts::SubgraphMode mode;
  if (cfg.mode == "vertex_induced")
    mode = potts::SubgraphMode::vertex_induced;
  else if (cfg.mode == "with_edge_subsets")
    mode = potts::SubgraphMode::with_edge_subsets;
  else
    throw potts::parameter_error("--mode must be vertex_induced or with_edge_subsets");
  int max_size = cfg.max_size > 0 ? cfg.max_size : g.n();
  auto sets = potts::enumerate_connected_sets(g, cfg.root, max_size, mode);
  Json j;
  j["root"] = cfg.root;
  j["max_size"] = max_size;
  j["mode"] = cfg.mode;
  j["count"] = sets.size();
  if (!cfg.count_only) {
    Json arr = Json::array();
    for (const auto& rec : sets) {
      Json es = Json::array();
      for (auto [u, v] : rec.edges) es.push_back({u, v});
      arr.push_back({{"vertices", rec.vertices}, {"edges", es}});
    }
    j["sets"] = arr;
  }
  emit(j, cfg);
  return 0;
}

int cmd_experiment_contract(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  if (cfg.sigma_text.empty())
    throw potts::parameter_error("experiment contract needs --sigma");
  potts::SpinConfig sigma = parse_int_list(cfg.sigma_text);
  if (static_cast<int>(sigma.size()) != g.n())
    throw potts::parameter_error("--sigma length must equal n");
  long long ell = cfg.ell >= 0 ? cfg.ell : potts::bichromatic_edges(g, sigma);
  potts::ContractionVariant variant;
  if (cfg.variant == "basic")
    variant = potts::ContractionVariant::basic;
  else if (cfg.variant == "min_component_2")
    variant = potts::ContractionVariant::min_component_two;
  else
    throw potts::parameter_error("--variant must be basic or min_component_2");
  std::uint64_t trials = cfg.trials > 0 ? cfg.trials : 10000;
  std::uint64_t matches = 0;
  std::ostringstream csv;
  csv << "trial,recovered,final_blocks\n";
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto run = potts::contraction_color(g, static_cast<int>(cfg.q), ell, variant, rng);
    bool hit = run.coloring == sigma;
    matches += hit;
    csv << t << ',' << (hit ? 1 : 0) << ',' << run.final_blocks << '\n';
  }
  double bound = potts::contraction_recovery_bound(
      g.n(), g.regular_degree(), static_cast<int>(cfg.q), ell, variant);
  Json j;
  j["trials"] = trials;
  j["matches"] = matches;
  j["rate"] = static_cast<double>(matches) / trials;
  j["bound"] = bound;
  j["ell"] = ell;
  j["variant"] = cfg.variant;
  j["hoeffding_99"] = potts::hoeffding_radius(trials, 0.01);
  if (!cfg.out.empty()) write_file_atomic(cfg.out, csv.str());
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_experiment_structure(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  std::ostringstream csv;
  Json j;
  j["model"] = cfg.model;
  j["samples"] = cfg.samples;
  std::vector<double> fractions;
  if (cfg.model == "rc") {
    if (std::isnan(cfg.p) && std::isnan(cfg.beta))
      throw potts::parameter_error("missing --p (or --beta)");
    double p = !std::isnan(cfg.p) ? cfg.p : std::expm1(cfg.beta);
    potts::RcTransfer tr(g, cfg.q, p);
    csv << "sample,max_component_fraction\n";
    for (int i = 0; i < cfg.samples; ++i) {
      auto subset = tr.sample(rng);
      double fr = potts::max_component_fraction(g, subset);
      fractions.push_back(fr);
      csv << i << ',' << fr << '\n';
    }
    j["p"] = p;
  } else if (cfg.model == "potts") {
    double beta = resolve_beta(cfg);
    potts::PottsSampler sampler(g, static_cast<int>(cfg.q), beta);
    csv << "sample,largest_class_fraction,monochromatic\n";
    std::uint64_t mono = 0;
    for (int i = 0; i < cfg.samples; ++i) {
      auto sigma = sampler.sample(rng);
      std::vector<int> cnt(static_cast<int>(cfg.q), 0);
      int best = 0;
      for (int c : sigma) best = std::max(best, ++cnt[c]);
      double fr = static_cast<double>(best) / g.n();
      bool is_mono = best == g.n();
      mono += is_mono;
      fractions.push_back(fr);
      csv << i << ',' << fr << ',' << (is_mono ? 1 : 0) << '\n';
    }
    j["beta"] = beta;
    j["monochromatic_rate"] = static_cast<double>(mono) / cfg.samples;
  } else {
    throw potts::parameter_error("--model must be rc or potts");
  }
  j["median"] = potts::median_of(fractions);
  double mean = 0;
  for (double f : fractions) mean += f;
  j["mean"] = mean / fractions.size();
  if (!cfg.out.empty()) write_file_atomic(cfg.out, csv.str());
  std::cout << j.dump(2) << "\n";
  return 0;
}

// One row per (q, beta) cell; completed cells persisted in a side manifest
// so an interrupted sweep resumes without recomputation.
int cmd_sweep(RunConfig& cfg) {
  if (cfg.out.empty()) throw potts::parameter_error("sweep needs --out CSV path");
  const Json& cj = cfg.config_json;
  if (cj.is_null()) throw potts::parameter_error("sweep needs --config with a grid");
  std::vector<double> qs, betas;
  if (cj.contains("grid")) {
    const Json& grid = cj["grid"];
    if (grid.contains("q"))
      for (const auto& v : grid["q"]) qs.push_back(v.get<double>());
    if (grid.contains("beta"))
      for (const auto& v : grid["beta"]) betas.push_back(v.get<double>());
  }
  if (qs.empty()) qs.push_back(cfg.q);
  if (betas.empty()) {
    if (std::isnan(cfg.beta)) throw potts::parameter_error("sweep: no beta values");
    betas.push_back(cfg.beta);
  }
  Rng gen_rng(cfg.seed);
  Graph g = resolve_graph(cfg, gen_rng);
  // fingerprint ties the manifest to this grid
  std::ostringstream fp;
  fp << cfg.cell_command << '|' << potts::graph_to_text(g) << '|' << cfg.seed << '|'
     << cfg.eps << '|' << cfg.delta;
  for (double x : qs) fp << '|' << x;
  for (double x : betas) fp << '|' << x;
  std::uint64_t fingerprint = std::hash<std::string>{}(fp.str());

  std::string manifest_path = cfg.out + ".manifest";
  Json manifest;
  manifest["fingerprint"] = fingerprint;
  manifest["rows"] = Json::object();
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream mf(manifest_path);
    Json old = Json::parse(mf, nullptr, false);
    if (!old.is_discarded() && old.value("fingerprint", std::uint64_t{0}) == fingerprint)
      manifest = old;
  }

  std::size_t total = qs.size() * betas.size();
  std::size_t failures = 0, computed = 0, resumed = 0;
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::string key = std::to_string(cell);
    if (manifest["rows"].contains(key)) {
      ++resumed;
      continue;
    }
    double q = qs[cell / betas.size()];
    double beta = betas[cell % betas.size()];
    std::uint64_t cell_seed = potts::mix_seed(cfg.seed, cell);
    std::ostringstream row;
    row << cell << ',' << q << ',' << beta << ',' << cell_seed << ',';
    try {
      if (cfg.cell_command == "fptas") {
        potts::FptasOptions opt;
        opt.eps = cfg.eps;
        opt.delta = cfg.delta;
        opt.max_order = cfg.cluster_order;
        auto res = potts::fptas_log_partition(g, q, beta, opt);
        row << "ok," << std::setprecision(17) << res.log_value << ','
            << potts::regime_name(res.regime) << ',' << res.cluster_count << ',';
      } else if (cfg.cell_command == "exact") {
        double lz = potts::potts_log_partition(g, q, beta);
        row << "ok," << std::setprecision(17) << lz << ",,,";
      } else if (cfg.cell_command == "rc") {
        double lz = potts::rc_log_partition(g, q, std::expm1(beta));
        row << "ok," << std::setprecision(17) << lz << ",,,";
      } else {
        throw potts::parameter_error("sweep cell_command must be fptas, exact, or rc");
      }
    } catch (const potts::error& e) {
      ++failures;
      std::string msg = e.what();
      for (auto& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      row << "error,,,," << msg;
    }
    manifest["rows"][key] = row.str();
    write_file_atomic(manifest_path, manifest.dump());
    ++computed;
  }
  std::ostringstream csv;
  csv << "cell,q,beta,cell_seed,status,log_value,regime,cluster_count,error\n";
  for (std::size_t cell = 0; cell < total; ++cell)
    csv << manifest["rows"][std::to_string(cell)].get<std::string>() << '\n';
  write_file_atomic(cfg.out, csv.str());
  Json j;
  j["cells"] = total;
  j["computed"] = computed;
  j["resumed"] = resumed;
  j["failures"] = failures;
  j["out"] = cfg.out;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// Identity checks that tie the approximation stack to the exact oracles on
// one instance: exact logZ, both polymer identities, convergence reports,
// and the deterministic approximation with its observed error.
int cmd_verify(RunConfig& cfg) {
  Rng rng(cfg.seed);
  Graph g = resolve_graph(cfg, rng);
  double beta = resolve_beta(cfg);
  Json j;
  j["q"] = cfg.q;
  j["beta"] = beta;
  double exact_logz = potts::potts_log_partition(g, cfg.q, beta);
  j["exact_logZ"] = exact_logz;

  try {
    auto model = potts::make_high_temperature_model(g, cfg.q, beta);
    double xi = potts::sum_compatible_families(model);
    double lhs = g.n() * std::log(cfg.q) + std::log(xi);
    double rc = potts::rc_log_partition(g, cfg.q, std::expm1(beta));
    j["high_identity"] = {{"polymer_logZ", lhs},
                          {"rc_logZ", rc},
                          {"abs_diff", std::abs(lhs - rc)},
                          {"kp", potts::json_of(potts::kp_check(model))}};
  } catch (const potts::error& e) {
    j["high_identity"] = {{"skipped", e.what()}};
  }

  try {
    auto model = potts::make_low_temperature_model(g, cfg.q, beta, cfg.eps);
    potts::FamilySumOptions opt;
    opt.restrict_half_total = true;
    double xi_tilde = potts::sum_compatible_families(model, opt);
    double rhs = std::log(cfg.q) + beta * model.d * g.n() / 2.0 + std::log(xi_tilde);
    // direct evaluation of the majority-phase mass by coloring enumeration
    auto coeffs_guarded = [&]() -> Json {
      long long q_int = static_cast<long long>(std::llround(cfg.q));
      if (std::abs(cfg.q - q_int) > 1e-12) return Json{{"skipped", "non-integer q"}};
      double states = std::pow(cfg.q, g.n());
      if (states > potts::SizeGuards::current().coloring_states)
        return Json{{"skipped", "q^n exceeds coloring guard"}};
      potts::LogSumExp majority_mass;
      potts::SpinConfig sigma(g.n());
      std::uint64_t totalc = 1;
      for (int i = 0; i < g.n(); ++i) totalc *= q_int;
      for (std::uint64_t idx = 0; idx < totalc; ++idx) {
        std::uint64_t t = idx;
        for (int v = 0; v < g.n(); ++v) {
          sigma[v] = static_cast<int>(t % q_int);
          t /= q_int;
        }
        if (potts::majority_color(sigma, static_cast<int>(q_int)))
          majority_mass.add(beta * potts::monochromatic_edges(g, sigma));
      }
      double lhs = majority_mass.get();
      return Json{{"majority_logZ", lhs},
                  {"polymer_logZ", rhs},
                  {"abs_diff", std::abs(lhs - rhs)}};
    };
    Json ident = coeffs_guarded();
    ident["kp"] = potts::json_of(potts::kp_check(model));
    j["low_identity"] = ident;
  } catch (const potts::error& e) {
    j["low_identity"] = {{"skipped", e.what()}};
  }

  try {
    potts::FptasOptions opt;
    opt.eps = cfg.eps;
    opt.delta = cfg.delta;
    opt.max_order = cfg.cluster_order;
    auto res = potts::fptas_log_partition(g, cfg.q, beta, opt);
    Json f = potts::json_of(res);
    f["abs_error"] = std::abs(res.log_value - exact_logz);
    f["delta"] = cfg.delta;
    f["within_delta"] = std::abs(res.log_value - exact_logz) <= cfg.delta;
    j["fptas"] = f;
  } catch (const potts::error& e) {
    j["fptas"] = {{"skipped", e.what()}};
  }
  emit(j, cfg);
  return 0;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw potts::parameter_error("cannot open config: " + path);
  Json j = Json::parse(in);
  cfg.config_json = j;
  auto s = [&](const char* key, std::string& field) {
    if (j.contains(key)) field = j[key].get<std::string>();
  };
  auto d = [&](const char* key, double& field) {
    if (j.contains(key)) field = j[key].get<double>();
  };
  auto i = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key];
  };
  s("command", cfg.command);
  s("graph", cfg.graph_file);
  s("kind", cfg.kind);
  i("n", cfg.n);
  i("a", cfg.a);
  i("b", cfg.b);
  i("d", cfg.d);
  d("q", cfg.q);
  d("beta", cfg.beta);
  d("p", cfg.p);
  d("epsilon", cfg.eps);
  d("delta", cfg.delta);
  d("alpha", cfg.alpha);
  i("seed", cfg.seed);
  i("threads", cfg.threads);
  i("cluster_order", cfg.cluster_order);
  i("draws", cfg.draws);
  i("samples", cfg.samples);
  i("trials", cfg.trials);
  s("out", cfg.out);
  s("format", cfg.format);
  s("backend", cfg.backend);
  s("regime", cfg.regime);
  s("sampler", cfg.sampler);
  s("variant", cfg.variant);
  s("model", cfg.model);
  s("mode", cfg.mode);
  s("sigma", cfg.sigma_text);
  s("edges", cfg.edges_text);
  s("cell_command", cfg.cell_command);
  if (j.contains("ell")) cfg.ell = j["ell"].get<long long>();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  // --config is applied before flag parsing so explicit flags win
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      try {
        apply_config_file(cfg, argv[i + 1]);
      } catch (const std::exception& e) {
        Json err{{"error", "parameter"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
      }
    }

  CLI::App app{"Potts model partition functions, polymer expansions, and samplers"};
  app.require_subcommand(0, 1);
  app.fallthrough();  // global flags remain valid after a subcommand name
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file mirroring the run options");
  app.add_option("--seed", cfg.seed, "root RNG seed");
  app.add_option("--threads", cfg.threads,
                 "reserved; execution is single-threaded for reproducibility");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--format", cfg.format, "json or text/csv where applicable");

  auto add_graph_opts = [&](CLI::App* sub) {
    sub->add_option("--graph", cfg.graph_file, "graph file (json or text)");
    sub->add_option("--kind", cfg.kind,
                    "generator: complete cycle path complete_bipartite hypercube "
                    "petersen random_regular");
    sub->add_option("--n", cfg.n, "vertex count (cycle length, hypercube dimension)");
    sub->add_option("--a", cfg.a, "first side of complete_bipartite");
    sub->add_option("--b", cfg.b, "second side of complete_bipartite");
    sub->add_option("--d", cfg.d, "degree (random_regular) or hypercube dimension");
  };
  auto add_model_opts = [&](CLI::App* sub) {
    sub->add_option("--q", cfg.q, "number of colors");
    sub->add_option("--beta", cfg.beta, "inverse temperature");
    sub->add_option("--eps", cfg.eps, "threshold window half-width");
    sub->add_option("--delta", cfg.delta, "accuracy / total-variation budget");
    sub->add_option("--cluster-order", cfg.cluster_order, "cluster order cap override");
  };

  auto* gen = app.add_subcommand("gen", "emit a graph");
  add_graph_opts(gen);

  auto* exact = app.add_subcommand("exact", "exact Potts log partition function");
  add_graph_opts(exact);
  add_model_opts(exact);
  exact->add_option("--backend", cfg.backend, "auto enumeration random_cluster closed_form");
  exact->add_flag("--coefficients", cfg.coefficients,
                  "also emit monochromatic-count coefficients");

  auto* rc = app.add_subcommand("rc", "exact random-cluster log partition function");
  add_graph_opts(rc);
  rc->add_option("--q", cfg.q, "cluster weight");
  rc->add_option("--p", cfg.p, "edge weight, p = e^beta - 1");
  rc->add_option("--beta", cfg.beta, "alternative to --p");
  rc->add_option("--backend", cfg.backend, "subsets or transfer");
  rc->add_flag("--polynomial", cfg.polynomial, "emit integer coefficients of p^k");

  auto* fpt = app.add_subcommand("fptas", "deterministic approximation of ln Z");
  add_graph_opts(fpt);
  add_model_opts(fpt);

  auto* sample = app.add_subcommand("sample", "draw colorings or edge subsets");
  add_graph_opts(sample);
  add_model_opts(sample);
  sample->add_option("--p", cfg.p, "rc edge weight (rc-transfer sampler)");
  sample->add_option("--draws", cfg.draws, "number of samples");
  sample->add_option("--sampler", cfg.sampler, "approx, exact, or rc-transfer");

  auto* kp = app.add_subcommand("kp-check", "verify the convergence condition");
  add_graph_opts(kp);
  add_model_opts(kp);
  kp->add_option("--regime", cfg.regime, "high or low");
  kp->add_flag("--dump-polymers", cfg.dump_polymers, "include the polymer list");

  auto* urs = app.add_subcommand("ursell", "alternating connected-subgraph count");
  urs->add_option("--edges", cfg.edges_text, "edge list like 0-1,1-2,0-2");
  urs->add_option("--k", cfg.k, "vertex count (default inferred)");

  auto* kar = app.add_subcommand("karger", "collect near-minimum cuts");
  add_graph_opts(kar);
  kar->add_option("--alpha", cfg.alpha, "cut size threshold multiplier");
  kar->add_option("--trials", cfg.trials, "contraction repetitions (0 = auto)");

  auto* ens = app.add_subcommand("enum-sets", "connected sets / subgraphs at a root");
  add_graph_opts(ens);
  ens->add_option("--root", cfg.root, "root vertex");
  ens->add_option("--max-size", cfg.max_size, "max vertex count (default n)");
  ens->add_option("--mode", cfg.mode, "vertex_induced or with_edge_subsets");
  ens->add_flag("--count-only", cfg.count_only, "emit only the count");

  auto* exp = app.add_subcommand("experiment", "randomized experiments");
  auto* expc = exp->add_subcommand("contract", "contraction coloring recovery");
  add_graph_opts(expc);
  expc->add_option("--q", cfg.q, "number of colors");
  expc->add_option("--sigma", cfg.sigma_text, "target coloring, comma separated");
  expc->add_option("--ell", cfg.ell, "bichromatic edge count (default from sigma)");
  expc->add_option("--variant", cfg.variant, "basic or min_component_2");
  expc->add_option("--trials", cfg.trials, "repetitions");
  auto* exps = exp->add_subcommand("structure", "sample-level structure statistics");
  add_graph_opts(exps);
  exps->add_option("--q", cfg.q, "colors / cluster weight");
  exps->add_option("--beta", cfg.beta, "inverse temperature");
  exps->add_option("--p", cfg.p, "rc edge weight");
  exps->add_option("--model", cfg.model, "potts or rc");
  exps->add_option("--samples", cfg.samples, "sample count");
  exp->require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "grid of cells from a JSON config");
  add_graph_opts(sweep);
  add_model_opts(sweep);
  sweep->add_option("--cell-command", cfg.cell_command, "fptas, exact, or rc");

  auto* verify = app.add_subcommand("verify", "tie approximations to exact oracles");
  add_graph_opts(verify);
  add_model_opts(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Json err{{"error", "usage"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }

  try {
    std::string command = cfg.command;
    if (gen->parsed()) command = "gen";
    if (exact->parsed()) command = "exact";
    if (rc->parsed()) command = "rc";
    if (fpt->parsed()) command = "fptas";
    if (sample->parsed()) command = "sample";
    if (kp->parsed()) command = "kp-check";
    if (urs->parsed()) command = "ursell";
    if (kar->parsed()) command = "karger";
    if (ens->parsed()) command = "enum-sets";
    if (exp->parsed()) command = expc->parsed() ? "experiment.contract" : "experiment.structure";
    if (sweep->parsed()) command = "sweep";
    if (verify->parsed()) command = "verify";
    if (cfg.threads < 1) throw potts::parameter_error("--threads must be >= 1");

    if (command == "gen") return cmd_gen(cfg);
    if (command == "exact") return cmd_exact(cfg);
    if (command == "rc") return cmd_rc(cfg);
    if (command == "fptas") return cmd_fptas(cfg);
    if (command == "sample") return cmd_sample(cfg);
    if (command == "kp-check") return cmd_kp_check(cfg);
    if (command == "ursell") return cmd_ursell(cfg);
    if (command == "karger") return cmd_karger(cfg);
    if (command == "enum-sets") return cmd_enum_sets(cfg);
    if (command == "experiment.contract") return cmd_experiment_contract(cfg);
    if (command == "experiment.structure") return cmd_experiment_structure(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    if (command == "verify") return cmd_verify(cfg);
    std::cerr << app.help() << std::flush;
    return 1;
  } catch (const potts::regime_error& e) {
    Json err{{"error", "regime"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const potts::size_error& e) {
    Json err{{"error", "size"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const potts::parameter_error& e) {
    Json err{{"error", "parameter"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const potts::precondition_error& e) {
    Json err{{"error", "precondition"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const potts::numeric_error& e) {
    Json err{{"error", "numeric"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    Json err{{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
