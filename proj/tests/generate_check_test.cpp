#include <gtest/gtest.h>

#include "sandpile/check.hpp"
#include "sandpile/generate.hpp"
#include "sandpile/io.hpp"
#include "test_graphs.hpp"

using namespace sandpile;

namespace {

TEST(RandomThickTree, SmallestShape) {
  const auto g = random_thick_tree({2, 1, 0.0, 2}, 0);
  EXPECT_EQ(io::graph_to_json(g.graph, g.sink).dump(), R"({"sink":"s","edges":[["v1","s",1]]})");
}

TEST(RandomThickTree, DeterministicAndValid) {
  const TreeGenParams p{6, 4, 0.0, 2};
  const auto a = io::graph_to_json(random_thick_tree(p, 42).graph, "s").dump();
  const auto b = io::graph_to_json(random_thick_tree(p, 42).graph, "s").dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, io::graph_to_json(random_thick_tree(p, 43).graph, "s").dump());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto g = random_thick_tree({12, 7, 0.5, 3}, seed);
    const auto space = build_ambient(g.graph, g.sink);
    const auto tree = validate_thick_tree(space);
    for (auto m : tree.parent_mult) EXPECT_TRUE(m >= 1 && m <= 7);
    for (std::size_t i = 0; i < space.size(); ++i) EXPECT_LE(space.loop(i), 3u);
  }
}

TEST(RandomThickTree, BadParameters) {
  for (const TreeGenParams& p : {TreeGenParams{1, 1, 0.0, 2}, TreeGenParams{3, 0, 0.0, 2}, TreeGenParams{3, 1, 1.5, 2}}) {
    try {
      random_thick_tree(p, 0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::BadParameters);
    }
  }
}

TEST(RunChecks, PassesOnThickTree) {
  const auto space = fixtures::p23();
  CheckOptions opt;
  opt.trials = 100;
  const auto r = run_checks(space, opt);
  EXPECT_TRUE(r.thick_tree);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(format_report(space, r, opt), "PASS 100/100\n");
}

TEST(RunChecks, DeterministicOnGeneratedTree) {
  auto g = random_thick_tree({6, 4, 0.0, 2}, 42);
  const auto space = build_ambient(g.graph, g.sink);
  CheckOptions opt;
  opt.trials = 50;
  opt.seed = 42;
  const auto first = format_report(space, run_checks(space, opt), opt);
  EXPECT_EQ(first, "PASS 50/50\n");
  EXPECT_EQ(format_report(space, run_checks(space, opt), opt), first);
}

TEST(RunChecks, NonTreeRunsEngineSuitesOnly) {
  const auto space = fixtures::triangle();
  CheckOptions opt;
  opt.trials = 20;
  const auto r = run_checks(space, opt);
  EXPECT_FALSE(r.thick_tree);
  EXPECT_TRUE(r.ok());
  EXPECT_NE(format_report(space, r, opt).find("engine-level suites only"), std::string::npos);
}

TEST(RunChecks, CorruptedOracleFailsWithReproducer) {
  const auto space = fixtures::p23();
  CheckOptions opt;
  opt.trials = 10;
  opt.corrupt_oracle = true;
  const auto r = run_checks(space, opt);
  EXPECT_FALSE(r.ok());
  ASSERT_TRUE(r.first_failure.has_value());
  EXPECT_TRUE(r.first_failure->config.has_value());
  const auto text = format_report(space, r, opt);
  EXPECT_EQ(text.rfind("FAIL ", 0), 0u);
  EXPECT_NE(text.find("graph: {\"sink\":\"s\""), std::string::npos);
  EXPECT_NE(text.find("config: {"), std::string::npos);
}

}  // namespace
