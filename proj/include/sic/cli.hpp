#pragma once

// Command-line front end. `run` is kept in a header so tests can drive it
// with in-memory streams; tools/sic.cpp is a thin main().

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sic/background.hpp"
#include "sic/graph.hpp"
#include "sic/interestingness.hpp"
#include "sic/mining.hpp"
#include "sic/mmc.hpp"
#include "sic/oracle.hpp"
#include "sic/steiner.hpp"

namespace sic::cli {

enum ExitCode : int { kOk = 0, kDataError = 1, kUsageError = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct GraphOpts {
  std::string path;
  bool relabel{false};
  std::string labels_path;
};

struct SurprisalOpts {
  bool uniform{false};
  std::string model_path;
  std::string prior{"degrees"};
};

struct QueryOpts {
  std::string terminals;
  std::string terminals_file;
  std::size_t l_max{0};
  std::size_t restarts{5};
};

inline void add_graph_opts(CLI::App* app, GraphOpts& g) {
  app->add_option("graph", g.path, "Edge list: src dst weight per line")->required();
  app->add_flag("--relabel", g.relabel, "Treat node tokens as labels and assign ids by first appearance");
  app->add_option("--labels", g.labels_path, "File of id<TAB>label lines");
}

inline void add_surprisal_opts(CLI::App* app, SurprisalOpts& s) {
  auto* u = app->add_flag("--uniform", s.uniform, "Unit surprisal on every edge (no prior)");
  auto* m = app->add_option("--model", s.model_path, "Fitted model JSON from `fit`");
  auto* p = app->add_option("--prior", s.prior, "degrees, none, or a prior JSON file (fitted on the fly)");
  u->excludes(m)->excludes(p);
  m->excludes(p);
}

inline void add_query_opts(CLI::App* app, QueryOpts& q) {
  app->add_option("--terminals", q.terminals, "Comma-separated terminal ids or labels");
  app->add_option("--terminals-file", q.terminals_file, "File with one terminal per line");
  app->add_option("--lmax", q.l_max, "Maximum cycle length (default: number of nodes)");
  app->add_option("--restarts", q.restarts, "Local-search restarts")->check(CLI::PositiveNumber);
}

inline LoadedGraph load_graph(const GraphOpts& g) {
  LoadOptions lo;
  lo.relabel = g.relabel;
  LoadedGraph lg = load_edge_list(g.path, lo);
  if (!g.labels_path.empty()) lg.labels = load_labels(g.labels_path, lg.graph.node_count());
  return lg;
}

inline SurprisalGraph make_surprisal(const DiGraph& graph, const SurprisalOpts& s) {
  if (s.uniform || s.prior == "none") return uniform_surprisal_graph(graph);
  if (!s.model_path.empty()) return surprisal_graph(graph, load_model(s.model_path));
  PriorSpec prior = s.prior == "degrees" ? PriorSpec{} : load_prior(s.prior);
  if (!prior.degree_prior && prior.blocks.empty()) return uniform_surprisal_graph(graph);
  return surprisal_graph(graph, fit_maxent(graph, prior));
}

inline NodeId resolve_node(const std::string& token, const LoadedGraph& lg) {
  for (std::size_t v = 0; v < lg.labels.size(); ++v) {
    if (lg.labels[v] == token) return static_cast<NodeId>(v);
  }
  std::uint64_t id = 0;
  if (!sic::detail::parse_uint(token, id)) throw UsageError("unknown terminal '" + token + "'");
  if (id >= lg.graph.node_count()) throw GraphError("terminal " + token + " outside the graph");
  return static_cast<NodeId>(id);
}

inline std::optional<SteinerQuery> make_query(const QueryOpts& q, const LoadedGraph& lg, std::uint64_t seed) {
  std::vector<std::string> tokens;
  if (!q.terminals.empty()) {
    std::stringstream ss(q.terminals);
    for (std::string t; std::getline(ss, t, ',');) {
      auto tt = sic::detail::trim(t);
      if (!tt.empty()) tokens.emplace_back(tt);
    }
  }
  if (!q.terminals_file.empty()) {
    std::ifstream in(q.terminals_file);
    if (!in) throw GraphError("cannot open terminals file '" + q.terminals_file + "'");
    for (std::string line; std::getline(in, line);) {
      auto tt = sic::detail::trim(line);
      if (!tt.empty() && tt.front() != '#') tokens.emplace_back(tt);
    }
  }
  if (tokens.empty()) return std::nullopt;
  SteinerQuery query;
  for (const auto& t : tokens) query.terminals.push_back(resolve_node(t, lg));
  query.l_max = q.l_max ? q.l_max : lg.graph.node_count();
  query.restarts = q.restarts;
  query.seed = seed;
  check_query(query, lg.graph.node_count());
  return query;
}

inline void emit_report(std::ostream& out, const MiningReport& r, const std::vector<std::string>& labels,
                        const std::string& format) {
  if (format == "tsv") {
    write_report_tsv(out, r, labels);
    if (r.cycles.empty()) out << "# none found\n";
    return;
  }
  auto j = report_to_json(r, labels);
  if (r.cycles.empty()) j["status"] = "none found";
  out << j.dump(2) << '\n';
}

}  // namespace detail

/// Entry point. Usage errors return 2, data errors 1, success 0.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Find subjectively interesting cycles in weighted digraphs"};
  app.require_subcommand(1);

  double q = 0.01;
  std::uint64_t seed = 0;
  std::string output = "json";
  std::uint64_t max_cycles = EnumerationBudget{}.max_cycles;
  auto add_q = [&](CLI::App* s) {
    s->add_option("--q", q, "Description-length parameter in (0, 1/2)")->capture_default_str();
  };
  auto add_output = [&](CLI::App* s) {
    s->add_option("--output", output, "json or tsv")->check(CLI::IsMember({"json", "tsv"}))->capture_default_str();
  };
  auto add_budget = [&](CLI::App* s) {
    s->add_option("--max-cycles", max_cycles, "Enumeration budget for exact solvers")->capture_default_str();
  };

  // fit
  detail::GraphOpts fit_graph;
  std::string fit_prior = "degrees", fit_out;
  FitOptions fit_opts;
  bool fit_expected = false;
  auto* fit = app.add_subcommand("fit", "Fit a background model and write it as JSON");
  detail::add_graph_opts(fit, fit_graph);
  fit->add_option("--prior", fit_prior, "degrees or a prior JSON file")->capture_default_str();
  fit->add_option("--tol", fit_opts.tol, "Relative constraint residual")->capture_default_str();
  fit->add_option("--max-iters", fit_opts.max_iters)->capture_default_str();
  fit->add_option("-o,--out", fit_out, "Write the model here instead of stdout");
  fit->add_flag("--expected", fit_expected, "Include the expected weight matrix");

  // msic
  detail::GraphOpts msic_graph;
  detail::SurprisalOpts msic_sur;
  std::string msic_alg = "karp";
  auto* msic = app.add_subcommand("msic", "Most interesting cycle");
  detail::add_graph_opts(msic, msic_graph);
  detail::add_surprisal_opts(msic, msic_sur);
  msic->add_option("--algorithm", msic_alg)
      ->check(CLI::IsMember({"karp", "karp-variant", "exact"}))
      ->capture_default_str();
  add_q(msic);
  add_output(msic);
  add_budget(msic);

  // kmsic
  detail::GraphOpts k_graph;
  detail::SurprisalOpts k_sur;
  detail::QueryOpts k_query;
  std::string k_alg = "local-scs";
  auto* kmsic = app.add_subcommand("kmsic", "Most interesting cycle through given terminals");
  detail::add_graph_opts(kmsic, k_graph);
  detail::add_surprisal_opts(kmsic, k_sur);
  detail::add_query_opts(kmsic, k_query);
  kmsic->add_option("--algorithm", k_alg)->check(CLI::IsMember({"local-scs", "exact"}))->capture_default_str();
  kmsic->add_option("--seed", seed)->capture_default_str();
  add_q(kmsic);
  add_output(kmsic);
  add_budget(kmsic);

  // mine
  detail::GraphOpts mine_graph;
  detail::SurprisalOpts mine_sur;
  detail::QueryOpts mine_query;
  std::string mine_alg = "karp";
  std::size_t top_k = 5;
  auto* mine = app.add_subcommand("mine", "Report the top-k cycles, zeroing reported edges between rounds");
  detail::add_graph_opts(mine, mine_graph);
  detail::add_surprisal_opts(mine, mine_sur);
  detail::add_query_opts(mine, mine_query);
  mine->add_option("--algorithm", mine_alg)
      ->check(CLI::IsMember({"karp", "karp-variant", "local-scs", "exact"}))
      ->capture_default_str();
  mine->add_option("--top-k", top_k)->check(CLI::PositiveNumber)->capture_default_str();
  mine->add_option("--seed", seed)->capture_default_str();
  add_q(mine);
  add_output(mine);
  add_budget(mine);

  // enumerate
  detail::GraphOpts en_graph;
  bool en_count = false;
  auto* en = app.add_subcommand("enumerate", "List every simple cycle with its total weight");
  detail::add_graph_opts(en, en_graph);
  en->add_flag("--count", en_count, "Print only the number of cycles");
  add_output(en);
  add_budget(en);

  // bench
  std::size_t b_instances = 10, b_n = 20, b_k = 0, b_lmax = 0, b_restarts = 5;
  double b_p = 0.2;
  std::int64_t b_lo = 1, b_hi = 10000;
  auto* bench = app.add_subcommand("bench", "Run solvers on seeded random graphs and print CSV");
  bench->add_option("--instances", b_instances)->capture_default_str();
  bench->add_option("--n", b_n)->capture_default_str();
  bench->add_option("--p", b_p, "Edge probability")->capture_default_str();
  bench->add_option("--w-lo", b_lo)->capture_default_str();
  bench->add_option("--w-hi", b_hi)->capture_default_str();
  bench->add_option("--k", b_k, "Terminals per instance; 0 benchmarks the unconstrained problem")
      ->capture_default_str();
  bench->add_option("--lmax", b_lmax, "Maximum cycle length (default: n)");
  bench->add_option("--restarts", b_restarts)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", seed, "Seed of the first instance")->capture_default_str();
  add_q(bench);
  add_budget(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    const EnumerationBudget budget{max_cycles};

    if (*fit) {
      auto lg = detail::load_graph(fit_graph);
      PriorSpec prior = fit_prior == "degrees" ? PriorSpec{} : load_prior(fit_prior);
      auto model = fit_maxent(lg.graph, prior, fit_opts);
      auto j = model_to_json(model);
      if (fit_expected) {
        const std::size_t n = model.node_count();
        auto e = model.expected_matrix();
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < n; ++i) rows.push_back(std::vector<double>(e.begin() + i * n, e.begin() + (i + 1) * n));
        j["expected"] = std::move(rows);
      }
      if (fit_out.empty()) {
        out << j.dump(2) << '\n';
      } else {
        std::ofstream f(fit_out);
        if (!f) throw GraphError("cannot write '" + fit_out + "'");
        f << j.dump(2) << '\n';
      }
      return kOk;
    }

    if (*msic || *kmsic || *mine) {
      const auto& gopts = *msic ? msic_graph : *kmsic ? k_graph : mine_graph;
      const auto& sopts = *msic ? msic_sur : *kmsic ? k_sur : mine_sur;
      auto lg = detail::load_graph(gopts);
      auto sg = detail::make_surprisal(lg.graph, sopts);
      auto p = params_from_q(q, lg.graph.node_count());
      std::optional<SteinerQuery> query;
      Algorithm alg{};
      std::size_t rounds = 1;
      if (*msic) {
        alg = *parse_algorithm(msic_alg);
      } else if (*kmsic) {
        alg = *parse_algorithm(k_alg);
        query = detail::make_query(k_query, lg, seed);
        if (!query) throw UsageError("kmsic needs --terminals or --terminals-file");
      } else {
        alg = *parse_algorithm(mine_alg);
        query = detail::make_query(mine_query, lg, seed);
        if (alg == Algorithm::local_scs && !query) throw UsageError("local-scs needs --terminals or --terminals-file");
        if ((alg == Algorithm::karp || alg == Algorithm::karp_variant) && query) {
          throw UsageError("karp solvers do not take terminals");
        }
        rounds = top_k;
      }
      auto report = mine_iterative(lg.graph, sg, p, alg, rounds, query, LogBase::bits, budget);
      report.seed = seed;
      detail::emit_report(out, report, lg.labels, output);
      return kOk;
    }

    if (*en) {
      auto lg = detail::load_graph(en_graph);
      if (en_count) {
        out << for_each_cycle(lg.graph, [](std::span<const NodeId>, double) {}, budget) << '\n';
        return kOk;
      }
      nlohmann::json arr = nlohmann::json::array();
      if (output == "tsv") out << "length\tweight\tnodes\n";
      for_each_cycle(
          lg.graph,
          [&](std::span<const NodeId> nodes, double w) {
            if (output == "tsv") {
              out << nodes.size() << '\t' << w << '\t';
              for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (i) out << ',';
                if (lg.labels.empty()) out << nodes[i];
                else out << lg.labels[nodes[i]];
              }
              out << '\n';
            } else {
              arr.push_back({{"nodes", std::vector<NodeId>(nodes.begin(), nodes.end())}, {"weight", w}});
            }
          },
          budget);
      if (output == "json") out << nlohmann::json{{"cycles", arr}}.dump(2) << '\n';
      return kOk;
    }

    if (*bench) {
      if (b_k > b_n) throw UsageError("--k exceeds --n");
      out << "seed,algorithm,F,cycle_length,runtime_ms\n";
      auto p = params_from_q(q, b_n);
      for (std::size_t i = 0; i < b_instances; ++i) {
        const std::uint64_t s = seed + i;
        SurprisalGraph sg(gen_erdos(b_n, b_p, b_lo, b_hi, s));
        std::optional<SteinerQuery> query;
        std::vector<Algorithm> algs;
        if (b_k == 0) {
          algs = {Algorithm::exact, Algorithm::karp, Algorithm::karp_variant};
        } else {
          std::vector<NodeId> nodes(b_n);
          for (NodeId v = 0; v < b_n; ++v) nodes[v] = v;
          std::mt19937_64 rng(s);
          std::shuffle(nodes.begin(), nodes.end(), rng);
          query = SteinerQuery{{nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(b_k)},
                               b_lmax ? b_lmax : b_n, b_restarts, s};
          algs = {Algorithm::exact, Algorithm::local_scs};
        }
        for (Algorithm a : algs) {
          auto t0 = std::chrono::steady_clock::now();
          auto c = solve_once(sg, p, a, query, budget);
          auto t1 = std::chrono::steady_clock::now();
          double f = c ? interestingness(*c, sg, p) : 0.0;
          out << s << ',' << to_string(a) << ',' << f << ',' << (c ? c->length() : 0) << ','
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << '\n';
        }
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParamError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const QueryError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace sic::cli
