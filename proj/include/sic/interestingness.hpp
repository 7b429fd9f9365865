#pragma once

// Information content, description length and the interestingness ratio
// F(C) = IC(C) / (alpha |C| + n beta).

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sic/graph.hpp"

namespace sic {

/// Unit in which surprisals and description lengths are measured.
enum class LogBase { bits, nats };

inline double log_in(LogBase base, double x) {
  return base == LogBase::bits ? std::log2(x) : std::log(x);
}

/// Graph whose edge weights are surprisals w(e) = -log Pr(mu(e) >= l_e).
class SurprisalGraph {
 public:
  SurprisalGraph() = default;
  explicit SurprisalGraph(DiGraph graph) : graph_(std::move(graph)) {}

  const DiGraph& graph() const noexcept { return graph_; }
  std::size_t node_count() const noexcept { return graph_.node_count(); }
  double w(NodeId u, NodeId v) const {
    auto x = graph_.weight(u, v);
    if (!x) throw InvalidCycle("no edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    return *x;
  }

  /// Copy with w(e) = 0 on every edge of `cycle`.
  SurprisalGraph with_zeroed(const Cycle& cycle) const {
    std::vector<double> ws;
    ws.reserve(graph_.edge_count());
    for (const Edge& e : graph_.edges()) ws.push_back(e.weight);
    for (std::size_t i = 0; i < cycle.length(); ++i) {
      auto [u, v] = cycle.edge_at(i);
      if (auto idx = graph_.edge_index(u, v)) ws[*idx] = 0.0;
    }
    return SurprisalGraph(graph_.with_weights(ws));
  }

 private:
  DiGraph graph_;
};

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Description-length parameters. `n` is the order of the original graph
/// even when a solver works on a pruned subgraph.
struct ICDLParams {
  double q{0.01};
  double alpha{0.0};
  double beta{0.0};
  std::size_t n{0};
};

inline ICDLParams params_from_q(double q, std::size_t n, LogBase base = LogBase::bits) {
  if (!(q > 0.0 && q < 0.5)) throw ParamError("q must lie in (0, 1/2), got " + std::to_string(q));
  if (n < 1) throw ParamError("n must be at least 1");
  return {q, log_in(base, (1.0 - q) / q), log_in(base, 1.0 / (1.0 - q)), n};
}

inline double dl(std::size_t length, const ICDLParams& p) {
  return p.alpha * static_cast<double>(length) + static_cast<double>(p.n) * p.beta;
}

/// Sum of surprisals over the cycle's edges; throws InvalidCycle if the
/// cycle is not a simple cycle of the graph.
inline double ic(const Cycle& cycle, const SurprisalGraph& sg) {
  if (cycle.empty()) return 0.0;
  if (!validate_cycle(sg.graph(), cycle)) throw InvalidCycle("not a simple cycle of the graph");
  double s = 0.0;
  for (std::size_t i = 0; i < cycle.length(); ++i) {
    auto [u, v] = cycle.edge_at(i);
    s += *sg.graph().weight(u, v);
  }
  return s;
}

struct ScoredCycle {
  Cycle cycle;
  double f{0.0};
};

inline double ratio(double ic_value, std::size_t length, const ICDLParams& p) {
  return length == 0 ? 0.0 : ic_value / dl(length, p);
}

/// F(C); the empty cycle scores 0.
inline double interestingness(const Cycle& cycle, const SurprisalGraph& sg, const ICDLParams& p) {
  return ratio(ic(cycle, sg), cycle.length(), p);
}

}  // namespace sic
