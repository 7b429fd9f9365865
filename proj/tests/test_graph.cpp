#include <gtest/gtest.h>

#include <sstream>

#include "sic/graph.hpp"
#include "sic/oracle.hpp"
#include "test_util.hpp"

using namespace sic;

namespace {

LoadedGraph parse(const std::string& text, LoadOptions opts = {}) {
  std::istringstream in(text);
  return parse_edge_list(in, opts);
}

std::set<std::tuple<NodeId, NodeId, double>> edge_set(const DiGraph& g) {
  std::set<std::tuple<NodeId, NodeId, double>> s;
  for (const Edge& e : g.edges()) s.insert({e.src, e.dst, e.weight});
  return s;
}

}  // namespace

TEST(LoadEdgeList, TwoNodeCycle) {
  auto lg = parse("0 1 3.0\n1 0 5.0\n");
  EXPECT_EQ(lg.graph.node_count(), 2u);
  EXPECT_EQ(lg.graph.edge_count(), 2u);
  EXPECT_DOUBLE_EQ(*lg.graph.weight(1, 0), 5.0);
}

TEST(LoadEdgeList, NegativeWeightReportsLine) {
  try {
    parse("0 1 -1.0\n");
    FAIL() << "expected NegativeWeight";
  } catch (const NegativeWeight& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(LoadEdgeList, DuplicateEdgeReportsSecondOccurrence) {
  try {
    parse("# header\n0 1 1\n1 2 1\n0 1 2\n");
    FAIL() << "expected DuplicateEdge";
  } catch (const DuplicateEdge& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(LoadEdgeList, MalformedLine) {
  EXPECT_THROW(parse("0 1\n"), ParseError);
  EXPECT_THROW(parse("0 x 1\n"), ParseError);
  EXPECT_THROW(parse("0 1 abc\n"), ParseError);
}

TEST(LoadEdgeList, SelfLoopsFlag) {
  EXPECT_NO_THROW(parse("0 0 1\n"));
  LoadOptions o;
  o.allow_self_loops = false;
  EXPECT_THROW(parse("0 0 1\n", o), ParseError);
}

TEST(LoadEdgeList, RelabelByFirstAppearance) {
  LoadOptions o;
  o.relabel = true;
  auto lg = parse("shark\ttuna\t2\ntuna\tsardine\t1\nsardine\tshark\t4\n", o);
  ASSERT_EQ(lg.labels.size(), 3u);
  EXPECT_EQ(lg.labels[0], "shark");
  EXPECT_EQ(lg.labels[2], "sardine");
  EXPECT_TRUE(lg.graph.has_edge(2, 0));
}

TEST(LoadEdgeList, TradeMatrixFile) {
  auto lg = load_edge_list(std::string(SIC_DATA_DIR) + "/trade.tsv");
  EXPECT_EQ(lg.graph.node_count(), 4u);
  EXPECT_EQ(lg.graph.edge_count(), 12u);
  for (NodeId v = 0; v < 4; ++v) {
    EXPECT_DOUBLE_EQ(lg.graph.out_strength(v), 100.0);
    EXPECT_DOUBLE_EQ(lg.graph.in_strength(v), 100.0);
  }
}

TEST(LoadEdgeList, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DiGraph g = gen_erdos(12, 0.3, 0, 1000, seed);
    std::vector<double> ws;
    for (std::size_t i = 0; i < g.edge_count(); ++i) ws.push_back(g.edge(i).weight / 7.0);
    DiGraph h = g.with_weights(ws);
    std::stringstream buf;
    write_edge_list(buf, h);
    auto back = parse_edge_list(buf);
    EXPECT_EQ(edge_set(back.graph), edge_set(h)) << "seed " << seed;
  }
}

TEST(DiGraph, RejectsInvalidInput) {
  EXPECT_THROW(DiGraph(2, {{0, 2, 1.0}}), GraphError);
  EXPECT_THROW(DiGraph(2, {{0, 1, -1.0}}), GraphError);
  EXPECT_THROW(DiGraph(2, {{0, 1, 1.0}, {0, 1, 2.0}}), GraphError);
}

TEST(DiGraph, InducedSubgraphKeepsInternalEdges) {
  DiGraph g(4, {{0, 1, 1}, {1, 2, 2}, {2, 0, 3}, {2, 3, 4}, {3, 0, 5}});
  auto [sub, orig] = g.induced_subgraph({true, false, true, true});
  EXPECT_EQ(orig, (std::vector<NodeId>{0, 2, 3}));
  EXPECT_EQ(sub.edge_count(), 3u);
  EXPECT_DOUBLE_EQ(*sub.weight(1, 2), 4.0);
}

TEST(ValidateCycle, Examples) {
  DiGraph two(2, {{0, 1, 1}, {1, 0, 1}});
  std::vector<NodeId> ok{0, 1}, rep{0, 1, 0};
  EXPECT_TRUE(validate_cycle(two, ok));
  EXPECT_FALSE(validate_cycle(two, rep));
  DiGraph path(3, {{0, 1, 1}, {1, 2, 1}});
  std::vector<NodeId> open{0, 1, 2};
  EXPECT_FALSE(validate_cycle(path, open));
  EXPECT_FALSE(validate_cycle(path, std::vector<NodeId>{}));
  DiGraph loop(1, {{0, 0, 1}});
  EXPECT_TRUE(validate_cycle(loop, std::vector<NodeId>{0}));
}

TEST(BfsHops, PathGraph) {
  DiGraph g(3, {{0, 1, 1}, {1, 2, 1}});
  EXPECT_EQ(bfs_hops(g, 0), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(bfs_hops(g, 0, true), (std::vector<std::size_t>{0, kUnreachable, kUnreachable}));
}

TEST(BfsHops, MatchesFloydWarshall) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    DiGraph g = gen_erdos(15, 0.15, 1, 1, seed);
    auto fw = ref::floyd_hops(g);
    for (NodeId s = 0; s < g.node_count(); ++s) {
      auto fwd = bfs_hops(g, s);
      auto bwd = bfs_hops(g, s, true);
      for (NodeId v = 0; v < g.node_count(); ++v) {
        ASSERT_EQ(fwd[v], fw[s][v]) << "seed " << seed;
        ASSERT_EQ(bwd[v], fw[v][s]) << "seed " << seed;
      }
    }
  }
}

TEST(BfsHops, ReversedEqualsTranspose) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DiGraph g = gen_erdos(20, 0.1, 1, 5, seed);
    DiGraph t = g.transpose();
    for (NodeId s = 0; s < g.node_count(); ++s) EXPECT_EQ(bfs_hops(g, s, true), bfs_hops(t, s));
  }
}

TEST(Cycle, CanonicalRotation) {
  Cycle c{{3, 1, 2}};
  EXPECT_EQ(c.canonical().nodes, (std::vector<NodeId>{1, 2, 3}));
  EXPECT_EQ(c.edge_at(2), (std::pair<NodeId, NodeId>{2, 3}));
}
