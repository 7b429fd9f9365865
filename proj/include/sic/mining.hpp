#pragma once

// Iterative top-k mining and the JSON/TSV report format.
//
// After a cycle is reported its edges are known to the analyst, so their
// surprisal is set to zero before the next solver run. The background model
// is not refitted.

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sic/graph.hpp"
#include "sic/interestingness.hpp"
#include "sic/mmc.hpp"
#include "sic/oracle.hpp"
#include "sic/steiner.hpp"

namespace sic {

enum class Algorithm { karp, karp_variant, local_scs, exact };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::karp: return "karp";
    case Algorithm::karp_variant: return "karp-variant";
    case Algorithm::local_scs: return "local-scs";
    case Algorithm::exact: return "exact";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  if (s == "karp") return Algorithm::karp;
  if (s == "karp-variant") return Algorithm::karp_variant;
  if (s == "local-scs") return Algorithm::local_scs;
  if (s == "exact") return Algorithm::exact;
  return std::nullopt;
}

struct ReportEdge {
  NodeId src{0};
  NodeId dst{0};
  double mu{0.0};        // observed weight
  double w{0.0};         // surprisal at emission time
  double survival{0.0};  // Pr(mu(e) >= mu) under the background model
  double frac_in{0.0};   // mu / in-strength(dst)
  double frac_out{0.0};  // mu / out-strength(src)
};

struct ReportEntry {
  Cycle cycle;
  std::vector<ReportEdge> edges;
  double ic{0.0};
  double dl{0.0};
  double f{0.0};
};

struct MiningReport {
  ICDLParams params;
  Algorithm algorithm{Algorithm::karp};
  std::uint64_t seed{0};
  std::vector<ReportEntry> cycles;
};

class MiningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs one solver on the current surprisal graph. Returns nullopt when it
/// finds nothing.
inline std::optional<Cycle> solve_once(const SurprisalGraph& sg, const ICDLParams& p, Algorithm alg,
                                       const std::optional<SteinerQuery>& query, EnumerationBudget budget = {}) {
  switch (alg) {
    case Algorithm::karp:
      if (auto r = karp_mmc(sg)) return r->cycle;
      return std::nullopt;
    case Algorithm::karp_variant:
      if (auto r = karp_variant(sg, p)) return r->cycle;
      return std::nullopt;
    case Algorithm::local_scs: {
      if (!query) throw MiningError("local-scs needs a terminal query");
      auto r = local_search(sg, *query, p);
      if (r.best) return r.best->cycle;
      return std::nullopt;
    }
    case Algorithm::exact: {
      auto r = query ? exact_kmsic(sg, p, query->terminals, query->l_max, budget) : exact_msic(sg, p, budget);
      if (r) return r->cycle;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Builds the report entry for `cycle`: `graph` holds the observed weights,
/// `original` the unzeroed surprisals, `current` the surprisals in force.
inline ReportEntry describe_cycle(const Cycle& cycle, const DiGraph& graph, const SurprisalGraph& original,
                                  const SurprisalGraph& current, const ICDLParams& p, LogBase base = LogBase::bits) {
  ReportEntry e;
  e.cycle = cycle;
  for (std::size_t i = 0; i < cycle.length(); ++i) {
    auto [u, v] = cycle.edge_at(i);
    ReportEdge re;
    re.src = u;
    re.dst = v;
    re.mu = *graph.weight(u, v);
    re.w = current.w(u, v);
    const double w0 = original.w(u, v);
    re.survival = base == LogBase::bits ? std::exp2(-w0) : std::exp(-w0);
    const double sin = graph.in_strength(v), sout = graph.out_strength(u);
    re.frac_in = sin > 0.0 ? re.mu / sin : 0.0;
    re.frac_out = sout > 0.0 ? re.mu / sout : 0.0;
    e.ic += re.w;
    e.edges.push_back(re);
  }
  e.dl = dl(cycle.length(), p);
  e.f = ratio(e.ic, cycle.length(), p);
  return e;
}

/// Repeats top_k times: solve, report, zero the surprisal of the reported
/// edges. Stops early when the solver returns nothing or F <= 0.
inline MiningReport mine_iterative(const DiGraph& graph, const SurprisalGraph& sg, const ICDLParams& p,
                                   Algorithm alg, std::size_t top_k,
                                   const std::optional<SteinerQuery>& query = std::nullopt,
                                   LogBase base = LogBase::bits, EnumerationBudget budget = {}) {
  if (top_k < 1) throw MiningError("top_k must be at least 1");
  if (graph.node_count() != sg.node_count() || graph.edge_count() != sg.graph().edge_count()) {
    throw MiningError("surprisal graph does not match the input graph");
  }
  MiningReport report;
  report.params = p;
  report.algorithm = alg;
  report.seed = query ? query->seed : 0;
  SurprisalGraph current = sg;
  for (std::size_t round = 0; round < top_k; ++round) {
    auto cycle = solve_once(current, p, alg, query, budget);
    if (!cycle) break;
    ReportEntry entry = describe_cycle(*cycle, graph, sg, current, p, base);
    if (!(entry.f > 0.0)) break;
    current = current.with_zeroed(*cycle);
    report.cycles.push_back(std::move(entry));
  }
  return report;
}

inline nlohmann::json report_to_json(const MiningReport& r, std::span<const std::string> labels = {}) {
  nlohmann::json j;
  j["params"] = {{"q", r.params.q},         {"alpha", r.params.alpha},
                 {"beta", r.params.beta},   {"n", r.params.n},
                 {"algorithm", to_string(r.algorithm)}, {"seed", r.seed}};
  nlohmann::json cycles = nlohmann::json::array();
  for (const auto& e : r.cycles) {
    nlohmann::json c;
    c["nodes"] = e.cycle.nodes;
    if (!labels.empty()) {
      std::vector<std::string> ls;
      for (NodeId v : e.cycle.nodes) ls.push_back(labels[v]);
      c["labels"] = ls;
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& x : e.edges) {
      edges.push_back({{"src", x.src},
                       {"dst", x.dst},
                       {"mu", x.mu},
                       {"w", x.w},
                       {"survival", x.survival},
                       {"frac_in", x.frac_in},
                       {"frac_out", x.frac_out}});
    }
    c["edges"] = std::move(edges);
    c["ic"] = e.ic;
    c["dl"] = e.dl;
    c["f"] = e.f;
    cycles.push_back(std::move(c));
  }
  j["cycles"] = std::move(cycles);
  return j;
}

/// rank, F, IC, DL, length, comma-separated nodes.
inline void write_report_tsv(std::ostream& out, const MiningReport& r, std::span<const std::string> labels = {}) {
  out << "# q=" << r.params.q << " alpha=" << r.params.alpha << " beta=" << r.params.beta << " n=" << r.params.n
      << " algorithm=" << to_string(r.algorithm) << " seed=" << r.seed << '\n';
  out << "rank\tf\tic\tdl\tlength\tnodes\n";
  std::size_t rank = 1;
  for (const auto& e : r.cycles) {
    out << rank++ << '\t' << e.f << '\t' << e.ic << '\t' << e.dl << '\t' << e.cycle.length() << '\t';
    for (std::size_t i = 0; i < e.cycle.length(); ++i) {
      if (i) out << ',';
      NodeId v = e.cycle.nodes[i];
      if (labels.empty()) out << v;
      else out << labels[v];
    }
    out << '\n';
  }
}

}  // namespace sic
