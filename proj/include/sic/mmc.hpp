#pragma once

// Karp's maximum-mean-cycle solver and the alpha/beta-aware variant.
//
// Both run Karp's recurrence on the sign-reversed graph augmented with a
// virtual super-source s that has a zero-weight edge to every node. The
// augmented graph has N = n + 1 nodes, so the table holds levels 0..N:
//   D_0(s) = 0, D_0(v) = +inf,  D_1(v) = 0,
//   D_k(v) = min over (u, v) of D_{k-1}(u) - w(u, v)   for k >= 2.
// Karp's characterization over the real nodes then reads
//   rho* = min_v max_{1 <= k <= n} (D_N(v) - D_k(v)) / (N - k),
// and the maximum mean surprisal is -rho*.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "sic/graph.hpp"
#include "sic/interestingness.hpp"

namespace sic {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr NodeId kNoPred = std::numeric_limits<NodeId>::max();

struct KarpTable {
  std::size_t n{0};  // real nodes; levels run 0..n+1
  std::vector<double> dist;   // (n + 2) x n, row-major by level
  std::vector<NodeId> pred;   // predecessor of (k, v); kNoPred at level <= 1

  std::size_t levels() const noexcept { return n + 2; }
  std::size_t top() const noexcept { return n + 1; }
  double D(std::size_t k, NodeId v) const { return dist[k * n + v]; }
  NodeId P(std::size_t k, NodeId v) const { return pred[k * n + v]; }
};

inline KarpTable build_karp_table(const SurprisalGraph& sg) {
  const DiGraph& g = sg.graph();
  KarpTable t;
  t.n = g.node_count();
  const std::size_t n = t.n;
  t.dist.assign((n + 2) * n, kInf);
  t.pred.assign((n + 2) * n, kNoPred);
  if (n == 0) return t;
  for (NodeId v = 0; v < n; ++v) t.dist[1 * n + v] = 0.0;
  for (std::size_t k = 2; k <= n + 1; ++k) {
    const double* prev = &t.dist[(k - 1) * n];
    double* cur = &t.dist[k * n];
    NodeId* cur_pred = &t.pred[k * n];
    for (NodeId v = 0; v < n; ++v) {
      for (const auto& a : g.in_arcs(v)) {
        if (prev[a.node] == kInf) continue;
        double cand = prev[a.node] - g.edge(a.edge).weight;
        // Ties keep the smallest predecessor id (in_arcs is sorted).
        if (cand < cur[v]) {
          cur[v] = cand;
          cur_pred[v] = a.node;
        }
      }
    }
  }
  return t;
}

namespace detail {

inline double cycle_weight(const SurprisalGraph& sg, const Cycle& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.length(); ++i) {
    auto [u, v] = c.edge_at(i);
    s += *sg.graph().weight(u, v);
  }
  return s;
}

inline double cycle_mean(const SurprisalGraph& sg, const Cycle& c) {
  return cycle_weight(sg, c) / static_cast<double>(c.length());
}

/// Walk back from (level, v) and return the node at every level, index
/// k -> node at level k (levels 1..level).
inline std::vector<NodeId> progression(const KarpTable& t, std::size_t level, NodeId v) {
  std::vector<NodeId> at(level + 1, kNoPred);
  NodeId cur = v;
  for (std::size_t k = level; k >= 1; --k) {
    at[k] = cur;
    if (k == 1) break;
    cur = t.P(k, cur);
  }
  return at;
}

/// All simple cycles obtained by stack-decomposing the walk `at[1..level]`.
inline std::vector<Cycle> decompose_walk(const std::vector<NodeId>& at, std::size_t n) {
  std::vector<Cycle> out;
  std::vector<NodeId> stack;
  std::vector<std::size_t> pos(n, kUnreachable);
  for (std::size_t k = 1; k < at.size(); ++k) {
    NodeId v = at[k];
    if (pos[v] != kUnreachable) {
      const std::size_t start = pos[v];
      Cycle c;
      c.nodes.assign(stack.begin() + static_cast<std::ptrdiff_t>(start), stack.end());
      for (std::size_t i = start; i < stack.size(); ++i) pos[stack[i]] = kUnreachable;
      stack.resize(start);
      out.push_back(std::move(c));
    }
    pos[v] = stack.size();
    stack.push_back(v);
  }
  return out;
}

}  // namespace detail

/// First cycle closed while walking predecessors back from (N, v).
inline Cycle extract_cycle(const KarpTable& t, NodeId v) {
  if (v >= t.n || t.D(t.top(), v) == kInf) {
    throw InvalidCycle("extract_cycle: D_N(v) is infinite");
  }
  auto at = detail::progression(t, t.top(), v);
  std::vector<std::size_t> seen_level(t.n, 0);
  for (std::size_t k = t.top(); k >= 1; --k) {
    NodeId x = at[k];
    if (seen_level[x] != 0) {
      // Levels k .. seen_level[x]-1 in forward order close back on x.
      Cycle c;
      for (std::size_t j = k; j < seen_level[x]; ++j) c.nodes.push_back(at[j]);
      return c;
    }
    seen_level[x] = k;
  }
  throw InvalidCycle("extract_cycle: progression contains no cycle");
}

struct MeanCycle {
  double mean{0.0};
  Cycle cycle;
};

/// Maximum mean surprisal cycle; nullopt when the graph is acyclic.
inline std::optional<MeanCycle> karp_mmc(const SurprisalGraph& sg, const KarpTable& t) {
  const std::size_t n = t.n;
  const std::size_t top = t.top();
  double best = kInf;
  NodeId best_v = kNoPred;
  for (NodeId v = 0; v < n; ++v) {
    double dn = t.D(top, v);
    if (dn == kInf) continue;
    double worst = -kInf;
    for (std::size_t k = 1; k <= n; ++k) {
      double dk = t.D(k, v);
      if (dk == kInf) continue;
      double r = (dn - dk) / static_cast<double>(top - k);
      if (r > worst) worst = r;
    }
    if (worst < best) {
      best = worst;
      best_v = v;
    }
  }
  if (best_v == kNoPred) return std::nullopt;

  const double target = -best;
  auto close = [&](const Cycle& c) {
    return std::abs(detail::cycle_mean(sg, c) - target) <= 1e-9 * std::max(1.0, std::abs(target));
  };
  Cycle c = extract_cycle(t, best_v);
  if (close(c)) return MeanCycle{detail::cycle_mean(sg, c), std::move(c)};

  // Rare tied tables: search every level of the minimizer's progression,
  // then every other node, for a cycle attaining the optimum.
  std::optional<Cycle> best_cycle;
  double best_mean = -kInf;
  auto scan = [&](NodeId v) {
    for (std::size_t k = top; k >= 2; --k) {
      if (t.D(k, v) == kInf) continue;
      for (auto& cand : detail::decompose_walk(detail::progression(t, k, v), n)) {
        double m = detail::cycle_mean(sg, cand);
        if (m > best_mean) {
          best_mean = m;
          best_cycle = std::move(cand);
        }
      }
    }
  };
  scan(best_v);
  for (NodeId v = 0; v < n && !(best_cycle && close(*best_cycle)); ++v) {
    if (v != best_v) scan(v);
  }
  return MeanCycle{best_mean, std::move(*best_cycle)};
}

inline std::optional<MeanCycle> karp_mmc(const SurprisalGraph& sg) {
  return karp_mmc(sg, build_karp_table(sg));
}

struct VariantCycle {
  double selection_ratio{0.0};  // -min_v max_k (D_N - D_k) / (alpha (N - k) + n beta)
  Cycle cycle;
};

/// Karp's recurrence with the node selected by the DL-weighted ratio.
inline std::optional<VariantCycle> karp_variant(const KarpTable& t, const ICDLParams& p) {
  const std::size_t n = t.n;
  const std::size_t top = t.top();
  const double nb = static_cast<double>(p.n) * p.beta;
  double best = kInf;
  NodeId best_v = kNoPred;
  for (NodeId v = 0; v < n; ++v) {
    double dn = t.D(top, v);
    if (dn == kInf) continue;
    double worst = -kInf;
    for (std::size_t k = 1; k <= n; ++k) {
      double dk = t.D(k, v);
      if (dk == kInf) continue;
      double r = (dn - dk) / (p.alpha * static_cast<double>(top - k) + nb);
      if (r > worst) worst = r;
    }
    if (worst < best) {
      best = worst;
      best_v = v;
    }
  }
  if (best_v == kNoPred) return std::nullopt;
  return VariantCycle{-best, extract_cycle(t, best_v)};
}

inline std::optional<VariantCycle> karp_variant(const SurprisalGraph& sg, const ICDLParams& p) {
  return karp_variant(build_karp_table(sg), p);
}

}  // namespace sic
