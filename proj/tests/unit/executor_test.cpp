#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "selfstab/executor.hpp"
#include "selfstab/modelcheck.hpp"
#include "selfstab/verifier.hpp"
#include "test_support.hpp"

namespace selfstab {
namespace {

using testing::Worked;
using testing::K2;
using testing::kS;
using testing::kT;

DaemonSpec Spec(DaemonKind kind, std::uint64_t seed = 0) {
  DaemonSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  return spec;
}

TEST(Replay, WorkedScriptReproducesEveryState) {
  Graph g = K2();
  auto configs = Replay(g, Worked('a'), testing::WorkedScript());
  ASSERT_EQ(configs.size(), 14u);
  for (char state = 'a'; state <= 'h'; ++state) {
    EXPECT_EQ(configs[testing::WorkedIndex(state)], Worked(state)) << "state " << state;
  }
}

TEST(Replay, EmptyScript) {
  auto configs = Replay(K2(), Worked('a'), {});
  ASSERT_EQ(configs.size(), 1u);
  EXPECT_EQ(configs[0], Worked('a'));
}

TEST(Replay, DisabledActionNamesStep) {
  auto script = testing::WorkedScript();
  std::swap(script[3], script[4]);  // t writes before marrying: nothing to write
  try {
    Replay(K2(), Worked('a'), script);
    FAIL() << "expected ExecutionError";
  } catch (const ExecutionError& e) {
    EXPECT_EQ(e.step(), 4u);
  }
}

TEST(Run, WorkedSequentialEndsMarried) {
  Graph g = K2();
  Trace t = selfstab::Run(g, Worked('a'), Spec(DaemonKind::kSequential));
  EXPECT_EQ(t.outcome, Outcome::kStable);
  EXPECT_EQ(t.final_config, Worked('h'));
  EXPECT_EQ(ClassifyEdge(g, t.final_config, kS, kT),
            (EdgeState{EdgeState::Kind::kUpdatedCorrect, 2, 2}));
  // Only one action is ever enabled along this execution.
  ASSERT_EQ(t.steps.size(), 13u);
  auto script = testing::WorkedScript();
  for (std::size_t i = 0; i < script.size(); ++i) EXPECT_EQ(t.steps[i].actions, script[i]);
}

TEST(Run, LegitimateStartTakesNoSteps) {
  for (const Graph& g : testing::PropertyGraphs()) {
    Trace t = selfstab::Run(g, LegitimateConfiguration(g), Spec(DaemonKind::kSynchronous));
    EXPECT_EQ(t.outcome, Outcome::kStable);
    EXPECT_TRUE(t.steps.empty());
    EXPECT_EQ(t.moves.total, 0u);
    EXPECT_TRUE(IsLegitimate(g, t.final_config));
  }
}

// The K2 budget of 200 is checked against the exact adversarial worst case.
TEST(Run, K2StabilizesWithin200MovesFromAnyStart) {
  Graph g = K2();
  std::uint64_t worst = LongestMovePath(g);
  ASSERT_LE(worst, 200u);
  RunOptions options;
  options.move_budget = 200;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    DaemonSpec spec = Spec(DaemonKind::kAdversarialRandom, seed);
    spec.tie_break = TieBreak::kUniformRandom;
    Trace t = selfstab::Run(g, RandomConfiguration(g, seed), spec, options);
    ASSERT_EQ(t.outcome, Outcome::kStable) << "seed " << seed;
    EXPECT_LE(t.moves.total, worst);
  }
}

TEST(Run, BudgetExceeded) {
  Graph g = Generate(GraphSpec::Path(10));
  RunOptions options;
  options.move_budget = 3;
  Trace t = selfstab::Run(g, AllNullConfiguration(g), Spec(DaemonKind::kSynchronous), options);
  EXPECT_EQ(t.outcome, Outcome::kBudgetExceeded);
  EXPECT_GE(t.moves.total, 3u);
  EXPECT_FALSE(IsStable(g, t.final_config));
}

TEST(Run, RejectsConfigurationForOtherGraph) {
  Graph g = Generate(GraphSpec::Path(3));
  EXPECT_THROW(selfstab::Run(g, Worked('a'), Spec(DaemonKind::kSequential)), ProtocolError);
}

TEST(Run, DefaultBudget) {
  EXPECT_EQ(DefaultMoveBudget(K2()), 200u * 2 * 1 + 1000);
  EXPECT_EQ(DefaultMoveBudget(Generate(GraphSpec::Complete(4))), 200u * 4 * 27 + 1000);
}

TEST(InitialConfigurations, AllNull) {
  Graph g = Generate(GraphSpec::Cycle(5));
  Configuration c = AllNullConfiguration(g);
  for (const NodeState& s : c.nodes) EXPECT_EQ(s, (NodeState{std::nullopt, 0}));
  for (const RegisterValue& r : c.registers) EXPECT_EQ(r, testing::Idle());
  EXPECT_FALSE(IsStable(K2(), AllNullConfiguration(K2())));
}

TEST(InitialConfigurations, LegitimateIsStable) {
  for (const Graph& g : testing::PropertyGraphs()) {
    Configuration c = LegitimateConfiguration(g);
    EXPECT_TRUE(IsStable(g, c));
    EXPECT_TRUE(IsLegitimate(g, c));
  }
}

TEST(InitialConfigurations, RandomIsDeterministicAndValid) {
  Graph g = Generate(GraphSpec::Gnp(20, 0.3, 1));
  EXPECT_EQ(RandomConfiguration(g, 5), RandomConfiguration(g, 5));
  EXPECT_NE(RandomConfiguration(g, 5), RandomConfiguration(g, 6));
  EXPECT_NO_THROW(ValidateConfiguration(g, RandomConfiguration(g, 5)));
}

// Chi-square over the nine register values on K2, plus the per-value tolerance.
TEST(InitialConfigurations, RandomRegistersUniform) {
  Graph g = K2();
  std::array<int, kRegisterDomainSize> counts{};
  constexpr int kSamples = 10000;
  for (int seed = 0; seed < kSamples; ++seed) {
    counts[RegisterCode(RandomConfiguration(g, seed).registers[0])]++;
  }
  double chi2 = 0;
  const double expected = kSamples / 9.0;
  for (int count : counts) {
    EXPECT_NEAR(count / static_cast<double>(kSamples), 1.0 / 9, 0.02);
    chi2 += (count - expected) * (count - expected) / expected;
  }
  EXPECT_LT(chi2, 26.12);  // 8 degrees of freedom, p = 0.001
}

TEST(InitialConfigurations, RandomPointerAndProgressUniform) {
  Graph g = Generate(GraphSpec::Star(4));  // center has 3 neighbors
  std::array<int, 4> p_counts{};
  std::array<int, 3> m_counts{};
  constexpr int kSamples = 8000;
  for (int seed = 0; seed < kSamples; ++seed) {
    Configuration c = RandomConfiguration(g, seed);
    p_counts[c.nodes[0].p ? *c.nodes[0].p : 0]++;
    m_counts[c.nodes[0].m]++;
  }
  for (int count : p_counts) EXPECT_NEAR(count / double(kSamples), 0.25, 0.02);
  for (int count : m_counts) EXPECT_NEAR(count / double(kSamples), 1.0 / 3, 0.02);
}

TEST(Trace, Reproducible) {
  Graph g = Generate(GraphSpec::Gnp(20, 0.3, 1));
  for (DaemonKind kind : {DaemonKind::kAdversarialRandom, DaemonKind::kSequential,
                          DaemonKind::kSynchronous, DaemonKind::kGreedy}) {
    DaemonSpec spec = Spec(kind, 17);
    spec.tie_break = TieBreak::kUniformRandom;
    Trace a = selfstab::Run(g, RandomConfiguration(g, 17), spec);
    Trace b = selfstab::Run(g, RandomConfiguration(g, 17), spec);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      EXPECT_EQ(a.steps[i].actions, b.steps[i].actions);
      EXPECT_EQ(a.steps[i].hash, b.steps[i].hash);
    }
    EXPECT_EQ(a.final_config, b.final_config);
  }
}

TEST(Trace, MoveCountsConsistent) {
  Graph g = Generate(GraphSpec::Cycle(10));
  RunOptions options;
  options.record_configurations = true;
  Trace t = selfstab::Run(g, RandomConfiguration(g, 3), Spec(DaemonKind::kAdversarialRandom, 3), options);
  std::uint64_t by_rule = std::accumulate(t.moves.per_rule.begin(), t.moves.per_rule.end(), 0ull);
  std::uint64_t by_node = std::accumulate(t.moves.per_node.begin(), t.moves.per_node.end(), 0ull);
  std::uint64_t by_step = 0;
  for (const Step& s : t.steps) by_step += s.actions.size();
  EXPECT_EQ(by_rule, t.moves.total);
  EXPECT_EQ(by_node, t.moves.total);
  EXPECT_EQ(by_step, t.moves.total);
  ASSERT_TRUE(t.has_configurations());
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    EXPECT_NE(t.configurations[i], t.configurations[i + 1]);
    EXPECT_EQ(Fingerprint(t.configurations[i + 1]), t.steps[i].hash);
  }
  EXPECT_EQ(t.configurations.back(), t.final_config);
}

TEST(Trace, ReconstructChecksHashes) {
  Graph g = Generate(GraphSpec::Path(5));
  Trace t = selfstab::Run(g, RandomConfiguration(g, 8), Spec(DaemonKind::kSynchronous));
  EXPECT_FALSE(t.has_configurations());
  Trace copy = t;
  ReconstructConfigurations(g, copy);
  EXPECT_TRUE(copy.has_configurations());
  ASSERT_FALSE(t.steps.empty());
  t.steps.back().hash ^= 1;
  EXPECT_THROW(ReconstructConfigurations(g, t), ExecutionError);
}

TEST(Sweep, CompleteFourTenSeeds) {
  SweepOptions options;
  options.seeds_per_graph = 10;
  options.daemon = Spec(DaemonKind::kAdversarialRandom);
  auto rows = Sweep({{"complete:4", Generate(GraphSpec::Complete(4))}}, options);
  ASSERT_EQ(rows.size(), 10u);
  for (const SweepRow& row : rows) {
    EXPECT_TRUE(row.stabilized);
    EXPECT_EQ(row.n, 4u);
    EXPECT_EQ(row.max_degree, 3u);
    EXPECT_TRUE(std::isfinite(row.ratio));
    if (row.moves > 0) {
      EXPECT_GT(row.ratio, 0);
    }
    EXPECT_DOUBLE_EQ(row.ratio, row.moves / 108.0);
  }
}

TEST(Sweep, EmptyGraphListHasHeaderOnly) {
  std::ostringstream out;
  WriteSweepCsv(out, Sweep({}, SweepOptions{}));
  EXPECT_EQ(out.str(),
            "graph,daemon,seed,n,max_degree,moves,Write,Seduction,Marriage,Increase,Reset,"
            "stabilized,ratio\n");
}

TEST(Sweep, WorkerCountDoesNotChangeRows) {
  std::vector<SweepGraph> graphs{{"path:10", Generate(GraphSpec::Path(10))},
                                 {"gnp", Generate(GraphSpec::Gnp(15, 0.3, 2))}};
  SweepOptions options;
  options.seeds_per_graph = 8;
  options.daemon = Spec(DaemonKind::kGreedy);
  std::ostringstream one, four;
  WriteSweepCsv(one, Sweep(graphs, options));
  options.workers = 4;
  WriteSweepCsv(four, Sweep(graphs, options));
  EXPECT_EQ(one.str(), four.str());
}

}  // namespace
}  // namespace selfstab
