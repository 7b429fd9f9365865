#pragma once

// Local-SCS: randomized local search for the most interesting cycle through
// a set of terminal nodes with at most l_max edges.
//
// Per restart: prune nodes that cannot lie on a short enough Steiner cycle,
// find an initial Steiner cycle by a guided randomized DFS, extend it towards
// l_max with the best extending changes, then greedily apply the best
// improving sequential-primary, quad or shortcut change until none improves.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sic/graph.hpp"
#include "sic/interestingness.hpp"

namespace sic {

struct SteinerQuery {
  std::vector<NodeId> terminals;
  std::size_t l_max{0};
  std::size_t restarts{5};
  std::uint64_t seed{0};
};

class QueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void check_query(const SteinerQuery& q, std::size_t node_count) {
  if (q.terminals.empty()) throw QueryError("at least one terminal is required");
  std::vector<NodeId> t = q.terminals;
  std::sort(t.begin(), t.end());
  if (std::adjacent_find(t.begin(), t.end()) != t.end()) throw QueryError("duplicate terminal");
  if (t.back() >= node_count) throw QueryError("terminal " + std::to_string(t.back()) + " outside the graph");
  if (q.l_max < std::max<std::size_t>(t.size(), 1)) throw QueryError("l_max must be at least the number of terminals");
  if (q.restarts < 1) throw QueryError("restarts must be at least 1");
}

enum class ChangeKind : unsigned { sequential_primary = 0, quad = 1, shortcut = 2, extend = 3 };

inline const char* to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::sequential_primary: return "sequential-primary";
    case ChangeKind::quad: return "quad";
    case ChangeKind::shortcut: return "shortcut";
    case ChangeKind::extend: return "extend";
  }
  return "?";
}

/// Bit set over ChangeKind.
struct KindSet {
  unsigned bits{0};
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<ChangeKind> ks) {
    for (ChangeKind k : ks) bits |= 1u << static_cast<unsigned>(k);
  }
  constexpr bool has(ChangeKind k) const { return (bits >> static_cast<unsigned>(k)) & 1u; }
  static constexpr KindSet all() {
    return {ChangeKind::sequential_primary, ChangeKind::quad, ChangeKind::shortcut, ChangeKind::extend};
  }
  static constexpr KindSet improving() {
    return {ChangeKind::sequential_primary, ChangeKind::quad, ChangeKind::shortcut};
  }
};

/// Compact description of a change relative to its host cycle of length L.
///  sequential_primary: edge positions i<j<k; segments (i+1..j) and (j+1..k) swap.
///  quad: positions i<j<k<l; segment order A B C D becomes A D C B.
///  shortcut: node positions i, j; nodes strictly between them are dropped.
///  extend: edge position i; `inserted` goes between its endpoints.
struct Move {
  ChangeKind kind{ChangeKind::extend};
  std::array<std::size_t, 4> pos{};
  NodeId inserted{0};
  double delta_ic{0.0};
  std::ptrdiff_t delta_len{0};
  double delta_f{0.0};
};

/// A fully described change: removed and added edges plus the score delta.
struct Change {
  ChangeKind kind{ChangeKind::extend};
  std::vector<std::pair<NodeId, NodeId>> removed;
  std::vector<std::pair<NodeId, NodeId>> added;
  double delta_f{0.0};
  Move move;
};

namespace detail {

inline std::vector<std::size_t> removed_positions(const Move& m, std::size_t L) {
  switch (m.kind) {
    case ChangeKind::sequential_primary: return {m.pos[0], m.pos[1], m.pos[2]};
    case ChangeKind::quad: return {m.pos[0], m.pos[1], m.pos[2], m.pos[3]};
    case ChangeKind::extend: return {m.pos[0]};
    case ChangeKind::shortcut: {
      std::vector<std::size_t> r;
      for (std::size_t x = m.pos[0]; x != m.pos[1]; x = (x + 1) % L) r.push_back(x);
      std::sort(r.begin(), r.end());
      return r;
    }
  }
  return {};
}

/// Strict order used to pick among equally scored changes.
inline bool tie_before(const Move& a, const Move& b, std::size_t L) {
  auto ra = removed_positions(a, L), rb = removed_positions(b, L);
  if (ra != rb) return ra < rb;
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.inserted < b.inserted;
}

}  // namespace detail

/// Resulting node sequence of applying `m` to `c`.
inline Cycle apply_move(const Cycle& c, const Move& m) {
  const auto& v = c.nodes;
  const std::size_t L = v.size();
  Cycle out;
  out.nodes.reserve(L + 1);
  auto append = [&](std::size_t from, std::size_t to) {  // inclusive, from <= to
    for (std::size_t x = from; x <= to; ++x) out.nodes.push_back(v[x]);
  };
  switch (m.kind) {
    case ChangeKind::sequential_primary: {
      auto [i, j, k, _] = m.pos;
      append(0, i);
      append(j + 1, k);
      append(i + 1, j);
      if (k + 1 < L) append(k + 1, L - 1);
      break;
    }
    case ChangeKind::quad: {
      // A D C B rotated to start at v[0], which lies in D = v[l+1..L-1] v[0..i].
      auto [i, j, k, l] = m.pos;
      append(0, i);
      append(k + 1, l);
      append(j + 1, k);
      append(i + 1, j);
      if (l + 1 < L) append(l + 1, L - 1);
      break;
    }
    case ChangeKind::shortcut: {
      const std::size_t i = m.pos[0], j = m.pos[1];
      for (std::size_t x = j;; x = (x + 1) % L) {
        out.nodes.push_back(v[x]);
        if (x == i) break;
      }
      break;
    }
    case ChangeKind::extend: {
      const std::size_t i = m.pos[0];
      append(0, i);
      out.nodes.push_back(m.inserted);
      if (i + 1 < L) append(i + 1, L - 1);
      break;
    }
  }
  return out;
}

/// Everything needed to score and legalize changes on one graph.
class ChangeContext {
 public:
  ChangeContext(const DiGraph& graph, const ICDLParams& p, std::span<const NodeId> terminals, std::size_t l_max)
      : g_(graph), p_(p), l_max_(l_max), terminal_(graph.node_count(), 0), on_cycle_(graph.node_count(), 0) {
    for (NodeId q : terminals) {
      if (q >= graph.node_count()) throw QueryError("terminal outside the graph");
      terminal_[q] = 1;
    }
  }

  const DiGraph& graph() const noexcept { return g_; }
  const ICDLParams& params() const noexcept { return p_; }
  std::size_t l_max() const noexcept { return l_max_; }
  bool is_terminal(NodeId v) const { return terminal_[v] != 0; }

  double cycle_ic(const Cycle& c) const {
    double s = 0.0;
    for (std::size_t i = 0; i < c.length(); ++i) {
      auto [u, v] = c.edge_at(i);
      s += *g_.weight(u, v);
    }
    return s;
  }

  /// Calls visit(const Move&) for every legal change of the requested kinds.
  template <typename Visitor>
  void for_each_move(const Cycle& c, double ic_value, KindSet kinds, Visitor&& visit) {
    const auto& v = c.nodes;
    const std::size_t L = v.size();
    if (L == 0) return;
    const double f0 = ratio(ic_value, L, p_);
    std::vector<double> ew(L);
    for (std::size_t i = 0; i < L; ++i) ew[i] = *g_.weight(v[i], v[(i + 1) % L]);
    auto w = [&](NodeId a, NodeId b) -> std::optional<double> { return g_.weight(a, b); };
    auto nxt = [&](std::size_t i) { return v[(i + 1) % L]; };
    auto emit = [&](Move& m) {
      m.delta_f = ratio(ic_value + m.delta_ic, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(L) + m.delta_len), p_) - f0;
      visit(static_cast<const Move&>(m));
    };

    if (kinds.has(ChangeKind::sequential_primary) && L >= 3) {
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j) {
          auto ad = w(v[i], nxt(j));
          if (!ad) continue;
          for (std::size_t k = j + 1; k < L; ++k) {
            auto cf = w(v[j], nxt(k));
            if (!cf) continue;
            auto eb = w(v[k], nxt(i));
            if (!eb) continue;
            Move m;
            m.kind = ChangeKind::sequential_primary;
            m.pos = {i, j, k, 0};
            m.delta_ic = (*ad + *cf + *eb) - (ew[i] + ew[j] + ew[k]);
            emit(m);
          }
        }
    }

    if (kinds.has(ChangeKind::quad) && L >= 4) {
      // A = v[i+1..j], B = v[j+1..k], C = v[k+1..l], D = v[l+1..i] -> A D C B.
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j)
          for (std::size_t k = j + 1; k < L; ++k) {
            auto kb = w(v[k], nxt(i));  // end B -> start A
            if (!kb) continue;
            for (std::size_t l = k + 1; l < L; ++l) {
              auto ad = w(v[j], nxt(l));  // end A -> start D
              if (!ad) continue;
              auto dc = w(v[i], nxt(k));  // end D -> start C
              if (!dc) continue;
              auto cb = w(v[l], nxt(j));  // end C -> start B
              if (!cb) continue;
              Move m;
              m.kind = ChangeKind::quad;
              m.pos = {i, j, k, l};
              m.delta_ic = (*kb + *ad + *dc + *cb) - (ew[i] + ew[j] + ew[k] + ew[l]);
              emit(m);
            }
          }
    }

    if (kinds.has(ChangeKind::shortcut) && L >= 3) {
      for (std::size_t i = 0; i < L; ++i) {
        double dropped = ew[i];
        bool bypasses_terminal = false;
        // Skip s = 1 .. L-2 nodes after position i.
        for (std::size_t s = 1; s + 2 <= L; ++s) {
          std::size_t skipped = (i + s) % L;
          bypasses_terminal = bypasses_terminal || terminal_[v[skipped]];
          dropped += ew[skipped];
          if (bypasses_terminal) break;
          std::size_t j = (i + s + 1) % L;
          auto ab = w(v[i], v[j]);
          if (!ab) continue;
          Move m;
          m.kind = ChangeKind::shortcut;
          m.pos = {i, j, 0, 0};
          m.delta_ic = *ab - dropped;
          m.delta_len = -static_cast<std::ptrdiff_t>(s);
          emit(m);
        }
      }
    }

    if (kinds.has(ChangeKind::extend) && L + 1 <= l_max_) {
      for (NodeId x : v) on_cycle_[x] = 1;
      for (std::size_t i = 0; i < L; ++i) {
        const NodeId a = v[i], b = nxt(i);
        for (const auto& arc : g_.out_arcs(a)) {
          NodeId x = arc.node;
          if (on_cycle_[x]) continue;
          auto xb = w(x, b);
          if (!xb) continue;
          Move m;
          m.kind = ChangeKind::extend;
          m.pos = {i, 0, 0, 0};
          m.inserted = x;
          m.delta_ic = g_.edge(arc.edge).weight + *xb - ew[i];
          m.delta_len = 1;
          emit(m);
        }
      }
      for (NodeId x : v) on_cycle_[x] = 0;
    }
  }

  /// Highest-delta_f legal move (ties by removed positions), if any.
  std::optional<Move> best_move(const Cycle& c, double ic_value, KindSet kinds) {
    std::optional<Move> best;
    const std::size_t L = c.length();
    for_each_move(c, ic_value, kinds, [&](const Move& m) {
      if (!best || m.delta_f > best->delta_f ||
          (m.delta_f == best->delta_f && detail::tie_before(m, *best, L))) {
        best = m;
      }
    });
    return best;
  }

 private:
  const DiGraph& g_;
  ICDLParams p_;
  std::size_t l_max_;
  std::vector<char> terminal_;
  std::vector<char> on_cycle_;
};

inline Change describe_move(const Cycle& c, const Move& m) {
  Change ch;
  ch.kind = m.kind;
  ch.delta_f = m.delta_f;
  ch.move = m;
  const std::size_t L = c.length();
  auto e = [&](std::size_t i) { return c.edge_at(i); };
  auto at = [&](std::size_t i) { return c.nodes[i % L]; };
  for (std::size_t p : detail::removed_positions(m, L)) ch.removed.push_back(e(p));
  switch (m.kind) {
    case ChangeKind::sequential_primary: {
      auto [i, j, k, _] = m.pos;
      ch.added = {{at(i), at(j + 1)}, {at(j), at(k + 1)}, {at(k), at(i + 1)}};
      break;
    }
    case ChangeKind::quad: {
      auto [i, j, k, l] = m.pos;
      ch.added = {{at(j), at(l + 1)}, {at(i), at(k + 1)}, {at(l), at(j + 1)}, {at(k), at(i + 1)}};
      break;
    }
    case ChangeKind::shortcut: ch.added = {{at(m.pos[0]), at(m.pos[1])}}; break;
    case ChangeKind::extend: ch.added = {{at(m.pos[0]), m.inserted}, {m.inserted, at(m.pos[0] + 1)}}; break;
  }
  return ch;
}

/// All legal changes of the requested kinds on `cycle`.
inline std::vector<Change> enumerate_changes(const Cycle& cycle, const SurprisalGraph& sg, const ICDLParams& p,
                                             std::span<const NodeId> terminals, std::size_t l_max, KindSet kinds) {
  if (!validate_cycle(sg.graph(), cycle)) throw InvalidCycle("enumerate_changes: not a simple cycle of the graph");
  ChangeContext ctx(sg.graph(), p, terminals, l_max);
  std::vector<Change> out;
  ctx.for_each_move(cycle, ctx.cycle_ic(cycle), kinds, [&](const Move& m) { out.push_back(describe_move(cycle, m)); });
  return out;
}

/************ pruning and initial cycle *****************************/

struct PrunedGraph {
  DiGraph graph;                   // induced on kept nodes, original weights
  std::vector<NodeId> original;    // pruned id -> original id
  std::vector<NodeId> terminals;   // pruned ids, same order as the query

  bool empty() const noexcept { return graph.node_count() == 0; }
};

/// Keeps nodes v with hop(q -> v) + hop(v -> q) <= l_max for every terminal
/// q. Returns an empty graph if some terminal itself is discarded.
inline PrunedGraph prune(const DiGraph& graph, std::span<const NodeId> terminals, std::size_t l_max) {
  const std::size_t n = graph.node_count();
  std::vector<bool> keep(n, true);
  for (NodeId q : terminals) {
    if (q >= n) throw QueryError("terminal outside the graph");
    auto from = bfs_hops(graph, q, false);
    auto to = bfs_hops(graph, q, true);
    for (NodeId v = 0; v < n; ++v) {
      if (!keep[v]) continue;
      if (from[v] == kUnreachable || to[v] == kUnreachable || from[v] + to[v] > l_max) keep[v] = false;
    }
  }
  for (NodeId q : terminals) {
    if (!keep[q]) return {};
  }
  auto [sub, original] = graph.induced_subgraph(keep);
  std::vector<NodeId> remap(n, 0);
  for (std::size_t i = 0; i < original.size(); ++i) remap[original[i]] = static_cast<NodeId>(i);
  PrunedGraph out{std::move(sub), std::move(original), {}};
  for (NodeId q : terminals) out.terminals.push_back(remap[q]);
  return out;
}

/// Guided randomized DFS for a simple cycle through all terminals with at
/// most l_max edges. A node's chance of being expanded next is proportional
/// to 1 / sum_q hop(v -> q). Expansions are capped at 50 * node_count.
template <typename Rng>
std::optional<Cycle> initial_cycle(const DiGraph& g, std::span<const NodeId> terminals, std::size_t l_max, Rng& rng) {
  const std::size_t n = g.node_count();
  if (n == 0 || terminals.empty()) return std::nullopt;
  const std::size_t k = terminals.size();

  std::vector<std::vector<std::size_t>> to_q;  // to_q[t][v] = hop(v -> terminals[t])
  to_q.reserve(k);
  for (NodeId q : terminals) to_q.push_back(bfs_hops(g, q, true));
  std::vector<double> weight(n, 0.0);
  std::vector<char> reaches_all(n, 1);
  for (NodeId v = 0; v < n; ++v) {
    std::size_t s = 0;
    for (std::size_t t = 0; t < k; ++t) {
      if (to_q[t][v] == kUnreachable) {
        reaches_all[v] = 0;
        break;
      }
      s += to_q[t][v];
    }
    weight[v] = s == 0 ? 0.0 : 1.0 / static_cast<double>(s);  // 0 marks "sum is zero"
  }
  std::vector<std::size_t> term_index(n, kUnreachable);
  for (std::size_t t = 0; t < k; ++t) term_index[terminals[t]] = t;

  std::uniform_int_distribution<std::size_t> pick_start(0, k - 1);
  const std::size_t start_t = pick_start(rng);
  const NodeId start = terminals[start_t];
  const auto& to_start = to_q[start_t];

  std::vector<char> on_path(n, 0), visited_term(k, 0);
  std::size_t terms_on_path = 0;
  std::vector<NodeId> path;

  struct Frame {
    std::vector<NodeId> cand;
    std::vector<double> w;
  };
  std::vector<Frame> stack;

  // Lower bound on the final cycle length if the path were extended to x.
  auto feasible = [&](NodeId x, std::size_t edges_to_x) {
    std::size_t need = to_start[x];
    for (std::size_t t = 0; t < k; ++t) {
      if (visited_term[t] || terminals[t] == x) continue;
      std::size_t via = to_q[t][x] + to_q[start_t][terminals[t]];
      need = std::max(need, via);
    }
    return edges_to_x + need <= l_max;
  };

  auto open = [&](NodeId u) {
    Frame f;
    const std::size_t edges_to_next = path.size();
    for (const auto& a : g.out_arcs(u)) {
      NodeId x = a.node;
      if (on_path[x] || !reaches_all[x]) continue;
      if (!feasible(x, edges_to_next)) continue;
      f.cand.push_back(x);
      f.w.push_back(weight[x]);
    }
    double max_w = 0.0;
    for (double x : f.w) max_w = std::max(max_w, x);
    for (double& x : f.w) {
      if (x == 0.0) x = max_w > 0.0 ? max_w : 1.0;
    }
    stack.push_back(std::move(f));
  };

  auto enter = [&](NodeId x) {
    path.push_back(x);
    on_path[x] = 1;
    if (term_index[x] != kUnreachable) {
      visited_term[term_index[x]] = 1;
      ++terms_on_path;
    }
  };
  auto leave = [&]() {
    NodeId x = path.back();
    path.pop_back();
    on_path[x] = 0;
    if (term_index[x] != kUnreachable) {
      visited_term[term_index[x]] = 0;
      --terms_on_path;
    }
  };

  const std::size_t budget = 50 * n;
  std::size_t expansions = 0;
  enter(start);
  if (terms_on_path == k && g.has_edge(start, start)) return Cycle{{start}};
  open(start);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.cand.empty()) {
      stack.pop_back();
      leave();
      continue;
    }
    if (++expansions > budget) return std::nullopt;
    std::discrete_distribution<std::size_t> pick(f.w.begin(), f.w.end());
    std::size_t idx = pick(rng);
    NodeId x = f.cand[idx];
    f.cand.erase(f.cand.begin() + static_cast<std::ptrdiff_t>(idx));
    f.w.erase(f.w.begin() + static_cast<std::ptrdiff_t>(idx));
    enter(x);
    if (terms_on_path == k && g.has_edge(x, start) && path.size() <= l_max) return Cycle{path};
    open(x);
  }
  return std::nullopt;
}

/************ local search ******************************************/

struct StepRecord {
  ChangeKind kind;
  double delta_f;
  double predicted_f;   // F before + delta_f
  double recomputed_f;  // F of the new cycle from scratch
  std::size_t length;
};

struct RestartTrace {
  std::uint64_t seed{0};
  bool found_initial{false};
  double initial_f{0.0};
  double extended_f{0.0};        // after the extension phase
  double best_trajectory_f{0.0};
  double final_f{0.0};
  std::vector<StepRecord> steps;
};

struct SearchTrace {
  std::size_t pruned_nodes{0};
  std::vector<RestartTrace> restarts;

  double best_initial_f() const {
    double b = 0.0;
    for (const auto& r : restarts)
      if (r.found_initial) b = std::max(b, r.initial_f);
    return b;
  }
};

struct SteinerResult {
  std::optional<ScoredCycle> best;  // in original node ids
  SearchTrace trace;
};

/// Improvement threshold on F.
inline constexpr double kImproveEps = 1e-12;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Current {
  Cycle cycle;
  double ic;
  double f;
};

inline void apply_step(ChangeContext& ctx, Current& cur, const Move& m, RestartTrace& trace) {
  const double predicted = cur.f + m.delta_f;
  cur.cycle = apply_move(cur.cycle, m);
  cur.ic = ctx.cycle_ic(cur.cycle);
  cur.f = ratio(cur.ic, cur.cycle.length(), ctx.params());
  trace.steps.push_back({m.kind, m.delta_f, predicted, cur.f, cur.cycle.length()});
}

inline Current greedy_improve(ChangeContext& ctx, Current cur, RestartTrace& trace) {
  while (auto m = ctx.best_move(cur.cycle, cur.ic, KindSet::improving())) {
    if (!(m->delta_f > kImproveEps)) break;
    apply_step(ctx, cur, *m, trace);
  }
  return cur;
}

}  // namespace detail

/// One restart of Local-SCS on a pruned graph. Returns the cycle in pruned
/// ids, or nullopt when the DFS finds no initial cycle.
template <typename Rng>
std::optional<detail::Current> local_search_restart(ChangeContext& ctx, const PrunedGraph& pg, Rng& rng,
                                                    RestartTrace& trace) {
  auto init = initial_cycle(pg.graph, pg.terminals, ctx.l_max(), rng);
  if (!init) return std::nullopt;
  trace.found_initial = true;
  detail::Current cur{*init, ctx.cycle_ic(*init), 0.0};
  cur.f = ratio(cur.ic, cur.cycle.length(), ctx.params());
  trace.initial_f = cur.f;
  detail::Current best_seen = cur;

  while (cur.cycle.length() < ctx.l_max()) {
    auto m = ctx.best_move(cur.cycle, cur.ic, KindSet{ChangeKind::extend});
    if (!m) break;
    detail::apply_step(ctx, cur, *m, trace);
    if (cur.f > best_seen.f) best_seen = cur;
  }
  trace.extended_f = cur.f;
  trace.best_trajectory_f = best_seen.f;

  detail::Current result = detail::greedy_improve(ctx, cur, trace);
  if (best_seen.f > result.f + kImproveEps) {
    // An intermediate extension beat the local optimum reached from the
    // fully extended cycle: climb from there as well.
    detail::Current alt = detail::greedy_improve(ctx, best_seen, trace);
    if (alt.f > result.f) result = std::move(alt);
  }
  trace.final_f = result.f;
  return result;
}

inline SteinerResult local_search(const SurprisalGraph& sg, const SteinerQuery& query, const ICDLParams& p) {
  check_query(query, sg.node_count());
  SteinerResult out;
  PrunedGraph pg = prune(sg.graph(), query.terminals, query.l_max);
  out.trace.pruned_nodes = pg.graph.node_count();
  if (pg.empty()) return out;

  ChangeContext ctx(pg.graph, p, pg.terminals, query.l_max);
  std::optional<detail::Current> best;
  for (std::size_t r = 0; r < query.restarts; ++r) {
    RestartTrace trace;
    trace.seed = detail::splitmix64(query.seed + r);
    std::mt19937_64 rng(trace.seed);
    auto res = local_search_restart(ctx, pg, rng, trace);
    if (res && (!best || res->f > best->f)) best = std::move(res);
    out.trace.restarts.push_back(std::move(trace));
  }
  if (best) {
    Cycle mapped;
    for (NodeId v : best->cycle.nodes) mapped.nodes.push_back(pg.original[v]);
    out.best = ScoredCycle{std::move(mapped), best->f};
  }
  return out;
}

}  // namespace sic
