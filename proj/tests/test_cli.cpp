#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "sic/cli.hpp"
#include "test_util.hpp"

using namespace sic;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sic");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("sic_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string write_graph(const std::string& name, const DiGraph& g) {
    std::ostringstream s;
    write_edge_list(s, g);
    return write(name, s.str());
  }

  fs::path dir_;
};

const std::string kTrade = std::string(SIC_DATA_DIR) + "/trade.tsv";

}  // namespace

TEST_F(CliTest, FitDegreesReproducesUniformExpectation) {
  auto r = run({"fit", kTrade, "--prior", "degrees", "--expected"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["format"], "sic-maxent-1");
  for (const auto& row : j["expected"])
    for (const auto& x : row) EXPECT_NEAR(x.get<double>(), 25.0, 0.5);
}

TEST_F(CliTest, FitWritesModelUsableByMsic) {
  auto model = (dir_ / "m.json").string();
  ASSERT_EQ(run({"fit", kTrade, "--prior", std::string(SIC_DATA_DIR) + "/trade_prior_blocks.json", "-o", model}).code, 0);
  auto r = run({"msic", kTrade, "--model", model, "--algorithm", "exact", "--q", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["cycles"].size(), 1u);
}

TEST_F(CliTest, MsicUniformRing) {
  auto g = write_graph("ring.tsv", ref::ring(7, 4.0));
  auto r = run({"msic", g, "--uniform", "--q", "0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["cycles"].size(), 1u);
  EXPECT_EQ(j["cycles"][0]["nodes"].size(), 7u);
  EXPECT_NEAR(j["params"]["alpha"].get<double>(), 2.0, 1e-12);
}

TEST_F(CliTest, KmsicAgainstExactOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DiGraph g = gen_erdos(10, 0.35, 1, 30, seed);
    auto gp = write_graph("g.tsv", g);
    auto model = (dir_ / "m.json").string();
    ASSERT_EQ(run({"fit", gp, "-o", model}).code, 0);
    auto r = run({"kmsic", gp, "--model", model, "--terminals", "3,7", "--lmax", "6", "--q", "0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(r.out);
    auto sg = surprisal_graph(g, load_model(model));
    auto p = params_from_q(0.1, 10);
    std::vector<NodeId> q{3, 7};
    auto ex = exact_kmsic(sg, p, q, 6);
    if (j["cycles"].empty()) {
      EXPECT_EQ(j["status"], "none found");
      continue;
    }
    ASSERT_TRUE(ex);
    Cycle c{j["cycles"][0]["nodes"].get<std::vector<NodeId>>()};
    EXPECT_TRUE(validate_cycle(g, c));
    EXPECT_TRUE(c.contains(3) && c.contains(7));
    EXPECT_LE(c.length(), 6u);
    EXPECT_LE(j["cycles"][0]["f"].get<double>(), ex->f + 1e-9);
  }
}

TEST_F(CliTest, KmsicNoneFound) {
  auto g = write("g.tsv", "0 1 1\n1 0 1\n2 3 1\n3 2 1\n");
  auto r = run({"kmsic", g, "--uniform", "--terminals", "0,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["status"], "none found");
}

TEST_F(CliTest, TerminalsByLabelAndFile) {
  auto g = write("web.tsv", "shark tuna 2\ntuna sardine 1\nsardine shark 4\nsardine tuna 1\n");
  auto r = run({"kmsic", g, "--relabel", "--uniform", "--terminals", "shark"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["cycles"].size(), 1u);
  EXPECT_EQ(j["cycles"][0]["labels"].size(), 3u);
  auto tf = write("t.txt", "tuna\n");
  EXPECT_EQ(run({"kmsic", g, "--relabel", "--uniform", "--terminals-file", tf}).code, 0);
}

TEST_F(CliTest, MineTsv) {
  auto g = write("g.tsv", "0 1 3\n1 2 3\n2 0 4\n3 4 2\n4 5 2\n5 3 2\n2 3 0\n");
  auto r = run({"mine", g, "--prior", "none", "--top-k", "4", "--output", "tsv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rank\tf"), std::string::npos);
}

TEST_F(CliTest, EnumerateCountAndList) {
  auto g = write("k3.tsv", "0 1 1\n1 0 1\n1 2 1\n2 1 1\n0 2 1\n2 0 1\n");
  auto r = run({"enumerate", g, "--count"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "5\n");
  auto l = run({"enumerate", g, "--output", "tsv"});
  EXPECT_EQ(std::count(l.out.begin(), l.out.end(), '\n'), 6);
  auto over = run({"enumerate", g, "--max-cycles", "2"});
  EXPECT_EQ(over.code, 1);
}

TEST_F(CliTest, BenchCsv) {
  auto r = run({"bench", "--instances", "2", "--n", "8", "--p", "0.3", "--q", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "seed,algorithm,F,cycle_length,runtime_ms");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
  auto k = run({"bench", "--instances", "2", "--n", "10", "--k", "2"});
  ASSERT_EQ(k.code, 0) << k.err;
  EXPECT_NE(k.out.find("local-scs"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"msic"}).code, 2);
  EXPECT_EQ(run({"msic", kTrade, "--q", "0.7"}).code, 2);
  EXPECT_EQ(run({"msic", kTrade, "--uniform", "--model", "x.json"}).code, 2);
  EXPECT_EQ(run({"kmsic", kTrade, "--uniform"}).code, 2);
  EXPECT_EQ(run({"kmsic", kTrade, "--uniform", "--terminals", "nope"}).code, 2);
  EXPECT_EQ(run({"msic", kTrade, "--output", "xml"}).code, 2);
}

TEST_F(CliTest, DataErrorsExitOne) {
  EXPECT_EQ(run({"msic", (dir_ / "missing.tsv").string()}).code, 1);
  auto neg = write("neg.tsv", "0 1 -1.0\n");
  auto r = run({"msic", neg, "--uniform"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  EXPECT_EQ(run({"kmsic", kTrade, "--uniform", "--terminals", "9"}).code, 1);
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }
