#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <tuple>

#include "sic/oracle.hpp"
#include "sic/steiner.hpp"
#include "change_oracle.hpp"
#include "test_util.hpp"

using namespace sic;

namespace {

bool has_edge_pair(const Cycle& c, std::pair<NodeId, NodeId> e) {
  for (std::size_t i = 0; i < c.length(); ++i)
    if (c.edge_at(i) == e) return true;
  return false;
}

}  // namespace

TEST(CheckQuery, RejectsBadQueries) {
  EXPECT_THROW(check_query({{}, 3, 5, 0}, 5), QueryError);
  EXPECT_THROW(check_query({{0, 0}, 3, 5, 0}, 5), QueryError);
  EXPECT_THROW(check_query({{7}, 3, 5, 0}, 5), QueryError);
  EXPECT_THROW(check_query({{0, 1, 2}, 2, 5, 0}, 5), QueryError);
  EXPECT_THROW(check_query({{0}, 3, 0, 0}, 5), QueryError);
  EXPECT_NO_THROW(check_query({{0, 1}, 2, 1, 0}, 5));
}

TEST(Prune, SingleTerminalKeepsACycle) {
  DiGraph g(5, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}, {2, 3, 1}, {3, 4, 1}});
  std::vector<NodeId> q{0};
  auto pg = prune(g, q, 3);
  EXPECT_EQ(pg.original, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(pg.terminals, (std::vector<NodeId>{0}));
}

TEST(Prune, DisconnectedTerminalEmpties) {
  DiGraph g(4, {{0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 2, 1}});
  std::vector<NodeId> q{0, 2};
  EXPECT_TRUE(prune(g, q, 4).empty());
}

TEST(Prune, MatchesAllPairsFilter) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    DiGraph g = gen_erdos(20, 0.2, 1, 10, seed);
    std::vector<NodeId> nodes(20);
    std::iota(nodes.begin(), nodes.end(), 0);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::vector<NodeId> q(nodes.begin(), nodes.begin() + 3);
    auto hops = ref::floyd_hops(g);
    const std::size_t inf = std::numeric_limits<std::size_t>::max();
    std::vector<NodeId> want;
    for (NodeId v = 0; v < 20; ++v) {
      bool ok = true;
      for (NodeId t : q) ok = ok && hops[t][v] != inf && hops[v][t] != inf && hops[t][v] + hops[v][t] <= 6;
      if (ok) want.push_back(v);
    }
    bool all_terminals = true;
    for (NodeId t : q) all_terminals = all_terminals && std::count(want.begin(), want.end(), t);
    auto pg = prune(g, q, 6);
    if (!all_terminals) {
      EXPECT_TRUE(pg.empty()) << "seed " << seed;
      continue;
    }
    EXPECT_EQ(pg.original, want) << "seed " << seed;
    for (std::size_t i = 0; i < q.size(); ++i) EXPECT_EQ(pg.original[pg.terminals[i]], q[i]);
  }
}

TEST(InitialCycle, RingIsTheOnlyAnswer) {
  DiGraph g = ref::ring(9, 1.0);
  std::vector<NodeId> q{2, 5, 7};
  std::mt19937_64 rng(0);
  auto c = initial_cycle(g, q, 9, rng);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->canonical().nodes, (std::vector<NodeId>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_FALSE(initial_cycle(g, q, 8, rng));
}

TEST(InitialCycle, NoCycleThroughTerminal) {
  DiGraph g(3, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}});
  std::vector<NodeId> q{2};
  std::mt19937_64 rng(0);
  EXPECT_FALSE(initial_cycle(g, q, 3, rng));
}

TEST(InitialCycle, FindsCycleWhenOneExists) {
  std::size_t feasible = 0, found = 0;
  std::mt19937_64 pick(9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    DiGraph g = gen_erdos(12, 0.2, 1, 10, seed);
    std::vector<NodeId> nodes(12);
    std::iota(nodes.begin(), nodes.end(), 0);
    std::shuffle(nodes.begin(), nodes.end(), pick);
    std::vector<NodeId> q(nodes.begin(), nodes.begin() + 3);
    const std::size_t l_max = 8;
    if (!exact_kmsic(SurprisalGraph(g), params_from_q(0.1, 12), q, l_max)) continue;
    ++feasible;
    auto pg = prune(g, q, l_max);
    ASSERT_FALSE(pg.empty());
    bool ok = false;
    for (std::uint64_t r = 0; r < 5 && !ok; ++r) {
      std::mt19937_64 rng(seed * 31 + r);
      auto c = initial_cycle(pg.graph, pg.terminals, l_max, rng);
      if (c) {
        ok = true;
        EXPECT_TRUE(validate_cycle(pg.graph, *c));
        EXPECT_LE(c->length(), l_max);
        for (NodeId t : pg.terminals) EXPECT_TRUE(c->contains(t));
      }
    }
    found += ok;
  }
  ASSERT_GT(feasible, 10u);
  EXPECT_GE(static_cast<double>(found), 0.8 * static_cast<double>(feasible));
}

TEST(EnumerateChanges, TriangleHasNone) {
  SurprisalGraph sg(ref::ring(3, 1.0));
  std::vector<NodeId> q{0};
  EXPECT_TRUE(enumerate_changes(Cycle{{0, 1, 2}}, sg, params_from_q(0.1, 3), q, 3, KindSet::all()).empty());
}

TEST(EnumerateChanges, ChordGivesOneShortcut) {
  SurprisalGraph sg(DiGraph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}, {0, 2, 5}}));
  std::vector<NodeId> q{0};
  auto p = params_from_q(0.1, 4);
  auto ch = enumerate_changes(Cycle{{0, 1, 2, 3}}, sg, p, q, 4, KindSet::all());
  ASSERT_EQ(ch.size(), 1u);
  EXPECT_EQ(ch[0].kind, ChangeKind::shortcut);
  EXPECT_EQ(ch[0].added, (std::vector<std::pair<NodeId, NodeId>>{{0, 2}}));
  EXPECT_EQ(apply_move(Cycle{{0, 1, 2, 3}}, ch[0].move).canonical().nodes, (std::vector<NodeId>{0, 2, 3}));
  EXPECT_NEAR(ch[0].delta_f, ratio(7.0, 3, p) - ratio(4.0, 4, p), 1e-12);

  std::vector<NodeId> guarded{1};
  EXPECT_TRUE(enumerate_changes(Cycle{{0, 1, 2, 3}}, sg, p, guarded, 4, KindSet::all()).empty());
}

TEST(EnumerateChanges, ExtendRespectsLengthBound) {
  SurprisalGraph sg(DiGraph(3, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 1, 1}}));
  std::vector<NodeId> q{0};
  auto p = params_from_q(0.1, 3);
  EXPECT_EQ(enumerate_changes(Cycle{{0, 1}}, sg, p, q, 3, KindSet::all()).size(), 1u);
  EXPECT_TRUE(enumerate_changes(Cycle{{0, 1}}, sg, p, q, 2, KindSet::all()).empty());
}

TEST(EnumerateChanges, MatchesBruteForceGenerator) {
  std::mt19937_64 rng(17);
  std::size_t cycles_checked = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::size_t n = 4 + seed % 5;
    DiGraph g = gen_erdos(n, 0.5, 1, 20, seed);
    SurprisalGraph sg(g);
    auto p = params_from_q(0.1, n);
    for (const auto& c : enumerate_cycles(g)) {
      std::uniform_int_distribution<std::size_t> at(0, c.length() - 1);
      std::vector<NodeId> q{c.nodes[at(rng)]};
      for (std::size_t l_max : {c.length(), n}) {
        auto lib = ref::library_changes(sg, p, c, q, l_max);
        auto brute = ref::brute_changes(g, c.nodes, q, l_max);
        ASSERT_EQ(lib, brute) << "seed " << seed << " cycle length " << c.length();
      }
      ++cycles_checked;
    }
  }
  EXPECT_GT(cycles_checked, 100u);
}

TEST(EnumerateChanges, DeltaMatchesRecomputation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DiGraph g = gen_erdos(7, 0.5, 1, 100, seed);
    SurprisalGraph sg(g);
    auto p = params_from_q(0.05, 7);
    for (const auto& c : enumerate_cycles(g)) {
      std::vector<NodeId> q{c.nodes[0]};
      double f0 = interestingness(c, sg, p);
      for (const auto& ch : enumerate_changes(c, sg, p, q, 7, KindSet::all())) {
        Cycle after = apply_move(c, ch.move);
        ASSERT_TRUE(validate_cycle(g, after));
        EXPECT_TRUE(after.contains(q[0]));
        EXPECT_NEAR(ch.delta_f, interestingness(after, sg, p) - f0, 1e-9);
        for (auto e : ch.added) EXPECT_TRUE(has_edge_pair(after, e));
        for (auto e : ch.removed) EXPECT_FALSE(has_edge_pair(after, e));
      }
    }
  }
}

TEST(LocalSearch, RingThroughTerminals) {
  for (std::size_t n : {3u, 10u, 50u}) {
    SurprisalGraph sg(ref::ring(n, 3.0));
    auto p = params_from_q(0.1, n);
    auto r = local_search(sg, {{0}, n, 5, 0}, p);
    ASSERT_TRUE(r.best);
    EXPECT_EQ(r.best->cycle.length(), n);
    EXPECT_NEAR(r.best->f, 3.0 * n / (p.alpha * n + n * p.beta), 1e-12);
  }
}

TEST(LocalSearch, NoneFoundWhenTerminalsCannotShareACycle) {
  DiGraph g(4, {{0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 2, 1}});
  auto r = local_search(SurprisalGraph(g), {{0, 2}, 4, 3, 0}, params_from_q(0.1, 4));
  EXPECT_FALSE(r.best);
}

TEST(LocalSearch, UniformWeightsPreferLongCycles) {
  // Nested cycles through node 0 of length 2, 3 and 4; each one is an
  // extension of the previous, so the search ends on the longest.
  DiGraph g(4, {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 0, 1}, {2, 3, 1}, {3, 0, 1}});
  auto r = local_search(SurprisalGraph(g), {{0}, 4, 3, 1}, params_from_q(0.2, 4));
  ASSERT_TRUE(r.best);
  EXPECT_EQ(r.best->cycle.length(), 4u);
}

TEST(LocalSearch, Deterministic) {
  DiGraph g = gen_erdos(20, 0.2, 1, 10000, 4);
  SurprisalGraph sg(g);
  auto p = params_from_q(0.05, 20);
  SteinerQuery q{{1, 5, 9}, 20, 5, 123};
  auto a = local_search(sg, q, p), b = local_search(sg, q, p);
  ASSERT_EQ(a.best.has_value(), b.best.has_value());
  if (a.best) {
    EXPECT_EQ(a.best->cycle, b.best->cycle);
    EXPECT_EQ(a.best->f, b.best->f);
  }
}

TEST(LocalSearch, PropertiesOnRandomInstances) {
  std::mt19937_64 pick(21);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    DiGraph g = gen_erdos(12, 0.25, 1, 10000, seed);
    SurprisalGraph sg(g);
    auto p = params_from_q(0.05, 12);
    std::vector<NodeId> nodes(12);
    std::iota(nodes.begin(), nodes.end(), 0);
    std::shuffle(nodes.begin(), nodes.end(), pick);
    for (std::size_t k : {1u, 3u}) {
      SteinerQuery q{{nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(k)}, 12, 5, seed};
      auto r = local_search(sg, q, p);
      auto ex = exact_kmsic(sg, p, q.terminals, q.l_max);
      if (!r.best) continue;
      ASSERT_TRUE(ex);
      const Cycle& c = r.best->cycle;
      ASSERT_TRUE(validate_cycle(g, c));
      EXPECT_LE(c.length(), q.l_max);
      for (NodeId t : q.terminals) EXPECT_TRUE(c.contains(t));
      EXPECT_NEAR(r.best->f, interestingness(c, sg, p), 1e-12);
      EXPECT_LE(r.best->f, ex->f + 1e-9);
      EXPECT_GE(r.best->f + 1e-12, r.trace.best_initial_f());
      for (const auto& ch : enumerate_changes(c, sg, p, q.terminals, q.l_max, KindSet::improving())) {
        EXPECT_LE(ch.delta_f, kImproveEps) << "seed " << seed;
      }
      for (const auto& rt : r.trace.restarts)
        for (const auto& st : rt.steps) EXPECT_NEAR(st.predicted_f, st.recomputed_f, 1e-9);
    }
  }
}

TEST(LocalSearch, GreedyPhaseStrictlyImproves) {
  DiGraph g = gen_erdos(15, 0.3, 1, 10000, 8);
  auto r = local_search(SurprisalGraph(g), {{0, 3}, 15, 5, 2}, params_from_q(0.05, 15));
  for (const auto& rt : r.trace.restarts) {
    for (const auto& st : rt.steps) {
      if (st.kind == ChangeKind::extend) continue;
      EXPECT_GT(st.delta_f, kImproveEps);
    }
  }
}
