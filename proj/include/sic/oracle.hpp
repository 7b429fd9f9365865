#pragma once

// Exhaustive reference solvers and instance generators.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sic/graph.hpp"
#include "sic/interestingness.hpp"

namespace sic {

struct EnumerationBudget {
  std::uint64_t max_cycles{10'000'000};
};

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::uint64_t count)
      : std::runtime_error("cycle enumeration exceeded its budget after " + std::to_string(count) + " cycles"),
        count_(count) {}
  std::uint64_t count() const noexcept { return count_; }

 private:
  std::uint64_t count_;
};

/// Johnson's algorithm. Calls visit(nodes, weight) once per simple cycle, with
/// `nodes` in canonical rotation (smallest id first) and `weight` the sum of
/// edge weights along it. Returns the number of cycles visited.
template <typename Visitor>
std::uint64_t for_each_cycle(const DiGraph& g, Visitor&& visit, EnumerationBudget budget = {}) {
  const std::size_t n = g.node_count();
  std::uint64_t count = 0;

  std::vector<char> in_comp(n, 0), fwd(n, 0), bwd(n, 0);
  std::vector<char> blocked(n, 0);
  std::vector<std::vector<NodeId>> blist(n);
  std::vector<NodeId> path;
  std::vector<double> path_weight;  // prefix sums, path_weight[i] = weight up to path[i]
  std::vector<NodeId> todo;

  struct Frame {
    NodeId v;
    std::size_t next;
    bool closed;
  };
  std::vector<Frame> stack;

  auto unblock = [&](NodeId u) {
    todo.assign(1, u);
    while (!todo.empty()) {
      NodeId x = todo.back();
      todo.pop_back();
      if (!blocked[x]) continue;
      blocked[x] = 0;
      for (NodeId w : blist[x]) todo.push_back(w);
      blist[x].clear();
    }
  };

  auto reach = [&](NodeId s, std::vector<char>& mark, bool reversed) {
    std::fill(mark.begin(), mark.end(), 0);
    todo.assign(1, s);
    mark[s] = 1;
    while (!todo.empty()) {
      NodeId x = todo.back();
      todo.pop_back();
      for (const auto& a : reversed ? g.in_arcs(x) : g.out_arcs(x)) {
        if (a.node >= s && !mark[a.node]) {
          mark[a.node] = 1;
          todo.push_back(a.node);
        }
      }
    }
  };

  for (NodeId s = 0; s < n; ++s) {
    // Strongly connected component of s within the nodes >= s.
    reach(s, fwd, false);
    reach(s, bwd, true);
    std::size_t comp_size = 0;
    for (NodeId v = s; v < n; ++v) {
      in_comp[v] = fwd[v] && bwd[v];
      comp_size += in_comp[v] ? 1 : 0;
    }
    if (comp_size == 1 && !g.has_edge(s, s)) {
      in_comp[s] = 0;
      continue;
    }
    for (NodeId v = s; v < n; ++v) {
      if (in_comp[v]) {
        blocked[v] = 0;
        blist[v].clear();
      }
    }

    path.assign(1, s);
    path_weight.assign(1, 0.0);
    blocked[s] = 1;
    stack.assign(1, Frame{s, 0, false});
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto arcs = g.out_arcs(f.v);
      if (f.next < arcs.size()) {
        const auto& a = arcs[f.next++];
        NodeId w = a.node;
        if (w < s || !in_comp[w]) continue;
        double wt = path_weight.back() + g.edge(a.edge).weight;
        if (w == s) {
          if (++count > budget.max_cycles) throw BudgetExceeded(count);
          visit(std::span<const NodeId>(path), wt);
          f.closed = true;
        } else if (!blocked[w]) {
          path.push_back(w);
          path_weight.push_back(wt);
          blocked[w] = 1;
          stack.push_back(Frame{w, 0, false});
        }
      } else {
        const NodeId v = f.v;
        const bool closed = f.closed;
        if (closed) {
          unblock(v);
        } else {
          for (const auto& a2 : arcs) {
            NodeId w = a2.node;
            if (w < s || !in_comp[w]) continue;
            auto& bl = blist[w];
            if (std::find(bl.begin(), bl.end(), v) == bl.end()) bl.push_back(v);
          }
        }
        stack.pop_back();
        path.pop_back();
        path_weight.pop_back();
        if (!stack.empty() && closed) stack.back().closed = true;
      }
    }
    for (NodeId v = s; v < n; ++v) in_comp[v] = 0;
  }
  return count;
}

inline std::vector<Cycle> enumerate_cycles(const DiGraph& g, EnumerationBudget budget = {}) {
  std::vector<Cycle> out;
  for_each_cycle(
      g, [&](std::span<const NodeId> nodes, double) { out.push_back(Cycle{{nodes.begin(), nodes.end()}}); },
      budget);
  return out;
}

namespace detail {

/// Ranking used by the exact solvers: higher F, then shorter, then
/// lexicographically smaller canonical form.
inline bool better_exact(double f, std::span<const NodeId> nodes, const ScoredCycle& incumbent) {
  if (f != incumbent.f) return f > incumbent.f;
  if (nodes.size() != incumbent.cycle.length()) return nodes.size() < incumbent.cycle.length();
  return std::lexicographical_compare(nodes.begin(), nodes.end(), incumbent.cycle.nodes.begin(),
                                      incumbent.cycle.nodes.end());
}

}  // namespace detail

/// F-maximal simple cycle by exhaustive enumeration; nullopt if acyclic.
inline std::optional<ScoredCycle> exact_msic(const SurprisalGraph& sg, const ICDLParams& p,
                                             EnumerationBudget budget = {}) {
  std::optional<ScoredCycle> best;
  for_each_cycle(
      sg.graph(),
      [&](std::span<const NodeId> nodes, double w) {
        double f = ratio(w, nodes.size(), p);
        if (!best || detail::better_exact(f, nodes, *best)) best = ScoredCycle{Cycle{{nodes.begin(), nodes.end()}}, f};
      },
      budget);
  return best;
}

/// F-maximal simple cycle through every terminal (optionally of length at
/// most l_max); nullopt if none exists.
inline std::optional<ScoredCycle> exact_kmsic(const SurprisalGraph& sg, const ICDLParams& p,
                                              std::span<const NodeId> terminals,
                                              std::optional<std::size_t> l_max = std::nullopt,
                                              EnumerationBudget budget = {}) {
  const std::size_t n = sg.node_count();
  std::vector<char> is_terminal(n, 0);
  std::size_t k = 0;
  for (NodeId q : terminals) {
    if (q >= n) throw GraphError("terminal " + std::to_string(q) + " outside the graph");
    if (!is_terminal[q]) ++k;
    is_terminal[q] = 1;
  }
  const std::size_t max_len = l_max.value_or(n);
  std::optional<ScoredCycle> best;
  for_each_cycle(
      sg.graph(),
      [&](std::span<const NodeId> nodes, double w) {
        if (nodes.size() < k || nodes.size() > max_len) return;
        std::size_t hit = 0;
        for (NodeId v : nodes) hit += is_terminal[v] ? 1 : 0;
        if (hit != k) return;
        double f = ratio(w, nodes.size(), p);
        if (!best || detail::better_exact(f, nodes, *best)) best = ScoredCycle{Cycle{{nodes.begin(), nodes.end()}}, f};
      },
      budget);
  return best;
}

/// Directed Erdos-Renyi graph: every ordered pair (i, j), i != j, is an
/// edge with probability p; weights are integers uniform in [w_lo, w_hi].
inline DiGraph gen_erdos(std::size_t n, double p, std::int64_t w_lo, std::int64_t w_hi, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gen_erdos: p must lie in [0, 1]");
  if (w_lo > w_hi) throw std::invalid_argument("gen_erdos: w_lo > w_hi");
  if (w_lo < 0) throw std::invalid_argument("gen_erdos: weights must be non-negative");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<std::int64_t> weight(w_lo, w_hi);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i == j) continue;
      if (coin(rng)) edges.push_back({i, j, static_cast<double>(weight(rng))});
    }
  }
  return DiGraph(n, std::move(edges));
}

struct R2vdpGadget {
  DiGraph graph;
  NodeId terminal{0};
  NodeId heavy_src{0};
  NodeId heavy_dst{0};
  double heavy_weight{0.0};
};

/// Two copies of `base` (copy 1 keeps ids, copy 2 is shifted by n) joined by
/// 2(G1) -> 1(G2) and 4(G2) -> 3(G1), plus (4,1) in G1 and (2,3) in G2.
/// All edges weigh 1 except (2,3) in G2, which weighs n * poly_value + 1.
/// `marked` lists the base nodes playing the roles 1, 2, 3, 4.
inline R2vdpGadget gen_r2vdp_gadget(const DiGraph& base, std::array<NodeId, 4> marked, double poly_value) {
  const std::size_t n = base.node_count();
  if (n < 4) throw GraphError("gadget base needs at least 4 nodes");
  for (std::size_t a = 0; a < 4; ++a) {
    if (marked[a] >= n) throw GraphError("marked node outside the base graph");
    for (std::size_t b = a + 1; b < 4; ++b) {
      if (marked[a] == marked[b]) throw GraphError("marked nodes must be distinct");
    }
  }
  const auto [m1, m2, m3, m4] = marked;
  const NodeId shift = static_cast<NodeId>(n);
  const double heavy = static_cast<double>(n) * poly_value + 1.0;

  std::vector<Edge> edges;
  auto add = [&](NodeId u, NodeId v, double w) {
    for (Edge& e : edges) {
      if (e.src == u && e.dst == v) {
        e.weight = w;
        return;
      }
    }
    edges.push_back({u, v, w});
  };
  for (const Edge& e : base.edges()) add(e.src, e.dst, 1.0);
  for (const Edge& e : base.edges()) add(e.src + shift, e.dst + shift, 1.0);
  add(m2, m1 + shift, 1.0);
  add(m4 + shift, m3, 1.0);
  add(m4, m1, 1.0);
  add(m2 + shift, m3 + shift, heavy);
  return {DiGraph(2 * n, std::move(edges)), m1, m2 + shift, m3 + shift, heavy};
}

}  // namespace sic
