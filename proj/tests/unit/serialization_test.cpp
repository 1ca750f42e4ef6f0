#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "selfstab/serialization.hpp"
#include "test_support.hpp"

namespace selfstab {
namespace {

using testing::Worked;
using testing::K2;

TEST(ConfigurationJson, WorkedInitialSchema) {
  Json j = ConfigurationToJson(K2(), Worked('a'));
  EXPECT_EQ(j.dump(),
            R"({"nodes":{"0":{"p":null,"m":0},"1":{"p":null,"m":0}},)"
            R"("registers":{"0->1":{"p":"You","m":2},"1->0":{"p":"Idle","m":0}}})");
  EXPECT_EQ(ConfigurationFromJson(K2(), j), Worked('a'));
}

TEST(ConfigurationJson, RoundTripIsBitExact) {
  std::mt19937_64 rng(51);
  for (const Graph& g : testing::PropertyGraphs()) {
    for (int i = 0; i < 100; ++i) {
      Configuration c = testing::SampleConfiguration(g, rng);
      std::string text = ConfigurationToJson(g, c).dump();
      Configuration back = ConfigurationFromJson(g, Json::parse(text));
      EXPECT_EQ(back, c);
      EXPECT_EQ(ConfigurationToJson(g, back).dump(), text);
    }
  }
}

TEST(ConfigurationJson, Rejects) {
  Graph g = K2();
  auto parse = [&](const char* text) { return ConfigurationFromJson(g, Json::parse(text)); };
  const char* regs = R"("registers":{"0->1":{"p":"Idle","m":0},"1->0":{"p":"Idle","m":0}})";
  auto doc = [&](const std::string& nodes) { return "{" + nodes + "," + regs + "}"; };
  EXPECT_NO_THROW(parse(doc(R"("nodes":{"0":{"p":null,"m":0},"1":{"p":0,"m":2}})").c_str()));
  // Missing node, bad m, pointer to self, unknown id.
  EXPECT_THROW(parse(doc(R"("nodes":{"0":{"p":null,"m":0}})").c_str()), FormatError);
  EXPECT_THROW(parse(doc(R"("nodes":{"0":{"p":null,"m":3},"1":{"p":null,"m":0}})").c_str()),
               FormatError);
  EXPECT_THROW(parse(doc(R"("nodes":{"0":{"p":0,"m":0},"1":{"p":null,"m":0}})").c_str()),
               FormatError);
  EXPECT_THROW(parse(doc(R"("nodes":{"0":{"p":null,"m":0},"5":{"p":null,"m":0}})").c_str()),
               FormatError);
  // Missing register, bad pointing value.
  EXPECT_THROW(parse(R"({"nodes":{"0":{"p":null,"m":0},"1":{"p":null,"m":0}},)"
                     R"("registers":{"0->1":{"p":"Idle","m":0}}})"),
               FormatError);
  EXPECT_THROW(parse(R"({"nodes":{"0":{"p":null,"m":0},"1":{"p":null,"m":0}},)"
                     R"("registers":{"0->1":{"p":"Me","m":0},"1->0":{"p":"Idle","m":0}}})"),
               FormatError);
  EXPECT_THROW(parse(R"({"nodes":{}})"), FormatError);
}

TEST(GraphJson, RoundTrip) {
  for (const Graph& g : testing::PropertyGraphs()) {
    EXPECT_EQ(GraphFromJson(GraphToJson(g)), g);
  }
  EXPECT_THROW(GraphFromJson(Json::parse(R"({"nodes":[0],"edges":[[0,0]]})")), FormatError);
  EXPECT_THROW(GraphFromJson(Json::parse(R"({"edges":[]})")), FormatError);
}

TEST(DaemonSpecJson, RoundTrip) {
  DaemonSpec spec;
  spec.kind = DaemonKind::kGreedy;
  spec.seed = 99;
  spec.q = 0.25;
  spec.tie_break = TieBreak::kUniformRandom;
  spec.priority = {RuleKind::kWrite, RuleKind::kReset, RuleKind::kIncrease,
                   RuleKind::kMarriage, RuleKind::kSeduction};
  EXPECT_EQ(DaemonSpecFromJson(DaemonSpecToJson(spec)), spec);
  EXPECT_EQ(DaemonSpecFromJson(Json::parse(R"({"kind":"sequential"})")), DaemonSpec{});
  EXPECT_THROW(DaemonSpecFromJson(Json::parse(R"({"kind":"fair"})")), FormatError);
  EXPECT_THROW(DaemonSpecFromJson(Json::parse(R"({"kind":"adv-random","q":0})")), FormatError);
  EXPECT_THROW(DaemonSpecFromJson(Json::parse(R"({"kind":"greedy","priority":["Write"]})")),
               FormatError);
}

TEST(ScriptJson, WorkedScriptRoundTrip) {
  Graph g = K2();
  auto script = testing::WorkedScript();
  Json j = ScriptToJson(g, script);
  EXPECT_EQ(j[0][0].dump(), R"({"node":0,"rule":"Write","arg":1})");
  EXPECT_EQ(j[5][0].dump(), R"({"node":1,"rule":"Increase"})");
  EXPECT_EQ(ScriptFromJson(g, j), script);
  std::ifstream in(SELFSTAB_FIXTURES_DIR "/worked_script.json");
  ASSERT_TRUE(in);
  EXPECT_EQ(ScriptFromJson(g, Json::parse(in)), script);
}

TEST(ScriptJson, Rejects) {
  Graph g = K2();
  EXPECT_THROW(ScriptFromJson(g, Json::parse(R"({})")), FormatError);
  EXPECT_THROW(ScriptFromJson(g, Json::parse(R"([[{"node":0,"rule":"Write"}]])")), FormatError);
  EXPECT_THROW(ScriptFromJson(g, Json::parse(R"([[{"node":0,"rule":"Reset","arg":1}]])")),
               FormatError);
  EXPECT_THROW(ScriptFromJson(g, Json::parse(R"([[{"node":0,"rule":"Write","arg":7}]])")),
               FormatError);
  EXPECT_THROW(ScriptFromJson(g, Json::parse(R"([[{"node":0,"rule":"Elope","arg":1}]])")),
               FormatError);
}

TEST(Fixtures, WorkedInitialMatches) {
  Graph g;
  {
    std::ifstream in(SELFSTAB_FIXTURES_DIR "/k2.edges");
    std::stringstream text;
    text << in.rdbuf();
    g = FromEdgeList(text.str());
  }
  EXPECT_EQ(g, K2());
  std::ifstream in(SELFSTAB_FIXTURES_DIR "/worked_a.json");
  EXPECT_EQ(ConfigurationFromJson(g, Json::parse(in)), Worked('a'));
}

std::string TraceText(const Graph& g, const Trace& t, const TraceMetadata& meta) {
  std::ostringstream out;
  WriteTraceJsonl(out, g, t, meta);
  return out.str();
}

TEST(TraceJsonl, RoundTrip) {
  Graph g = Generate(GraphSpec::Gnp(12, 0.3, 3));
  for (DaemonKind kind : {DaemonKind::kAdversarialRandom, DaemonKind::kSynchronous}) {
    DaemonSpec spec;
    spec.kind = kind;
    spec.seed = 8;
    InitSpec init = InitSpec::Random(8);
    Trace t = selfstab::Run(g, MakeInitial(g, init), spec);
    TraceMetadata meta{spec, init, 8, DefaultMoveBudget(g)};
    std::string text = TraceText(g, t, meta);

    std::istringstream in(text);
    LoadedTrace loaded = ReadTraceJsonl(in);
    EXPECT_EQ(loaded.graph, g);
    EXPECT_EQ(loaded.trace.initial, t.initial);
    EXPECT_EQ(loaded.trace.final_config, t.final_config);
    EXPECT_EQ(loaded.trace.outcome, t.outcome);
    EXPECT_EQ(loaded.trace.moves.total, t.moves.total);
    EXPECT_EQ(loaded.trace.moves.per_rule, t.moves.per_rule);
    ASSERT_EQ(loaded.trace.steps.size(), t.steps.size());
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      EXPECT_EQ(loaded.trace.steps[i].actions, t.steps[i].actions);
      EXPECT_EQ(loaded.trace.steps[i].hash, t.steps[i].hash);
    }
    EXPECT_EQ(DaemonSpecFromJson(loaded.metadata.at("daemon")), spec);
    EXPECT_EQ(TraceText(loaded.graph, loaded.trace, meta), text);
  }
}

TEST(TraceJsonl, LineShapes) {
  Graph g = K2();
  Trace t = selfstab::Run(g, Worked('a'), DaemonSpec{});
  std::istringstream in(TraceText(g, t, {DaemonSpec{}, InitSpec::Explicit(Worked('a')), 0, 1400}));
  std::vector<Json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(Json::parse(line));
  ASSERT_EQ(lines.size(), 15u);
  for (const char* key : {"graph", "daemon", "init", "seed", "initial"}) {
    EXPECT_TRUE(lines[0].contains(key)) << key;
  }
  EXPECT_EQ(lines[1].dump(),
            R"({"step":1,"actions":[{"node":0,"rule":"Write","arg":1}],"hash":")" +
                FingerprintHex(Worked('b')) + R"("})");
  EXPECT_EQ(lines.back()["outcome"], "stable");
  EXPECT_EQ(lines.back()["moves"], 13);
  EXPECT_EQ(ConfigurationFromJson(g, lines.back()["final"]), Worked('h'));
}

TEST(TraceJsonl, Rejects) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return ReadTraceJsonl(in);
  };
  EXPECT_THROW(read(""), FormatError);
  EXPECT_THROW(read("not json\n"), FormatError);
  Graph g = K2();
  Trace t = selfstab::Run(g, Worked('a'), DaemonSpec{});
  std::string text = TraceText(g, t, {DaemonSpec{}, InitSpec::Explicit(Worked('a')), 0, 1400});
  std::string skipped = text;
  skipped.replace(skipped.find("\"step\":2"), 8, "\"step\":9");
  EXPECT_THROW(read(skipped), FormatError);
  std::string bad_outcome = text;
  bad_outcome.replace(bad_outcome.find("\"stable\""), 8, "\"frozen\"");
  EXPECT_THROW(read(bad_outcome), FormatError);
}

TEST(SweepCsv, ParsesBack) {
  SweepOptions options;
  options.seeds_per_graph = 5;
  auto rows = Sweep({{"cycle:5", Generate(GraphSpec::Cycle(5))}}, options);
  std::ostringstream out;
  WriteSweepCsv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::size_t columns = std::count(line.begin(), line.end(), ',') + 1;
  EXPECT_EQ(columns, 13u);
  std::size_t i = 0;
  for (; std::getline(in, line); ++i) {
    std::vector<std::string> cells;
    std::stringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), columns);
    EXPECT_EQ(cells[0], "cycle:5");
    EXPECT_EQ(cells[1], "sequential");
    EXPECT_EQ(std::stoull(cells[2]), rows[i].seed);
    EXPECT_EQ(std::stoull(cells[5]), rows[i].moves);
    EXPECT_EQ(cells[11], "true");
    EXPECT_NEAR(std::stod(cells[12]), rows[i].ratio, 1e-5 * rows[i].ratio + 1e-12);
  }
  EXPECT_EQ(i, rows.size());
}

TEST(Suite, StandardManifest) {
  std::ifstream in(SELFSTAB_SUITES_DIR "/standard.json");
  ASSERT_TRUE(in);
  Suite suite = SuiteFromJson(Json::parse(in));
  EXPECT_EQ(suite.graphs.size(), 14u);
  EXPECT_EQ(suite.seeds, 100u);
  ASSERT_EQ(suite.daemons.size(), 4u);
  EXPECT_EQ(suite.daemons[0].kind, DaemonKind::kAdversarialRandom);
  EXPECT_DOUBLE_EQ(suite.daemons[0].q, 0.5);
  EXPECT_THROW(SuiteFromJson(Json::parse(R"({"graphs":["wheel:3"],"seeds":{"first":0,"count":1},"daemons":[]})")),
               FormatError);
}

TEST(Reports, MonitorResultShape) {
  MonitorResult r;
  r.monitor = "M2";
  r.pass = false;
  r.step = 41;
  r.node = 7;
  r.detail = "x";
  EXPECT_EQ(MonitorResultToJson(r).dump(),
            R"({"monitor":"M2","pass":false,"step":41,"node":7,"detail":"x"})");
  CheckReport report = Verify(K2());
  Json j = CheckReportToJson(K2(), report);
  EXPECT_EQ(j["has_cycle"], false);
  EXPECT_EQ(j["all_sinks_legitimate"], true);
  EXPECT_EQ(j["state_count"], 1296);
}

}  // namespace
}  // namespace selfstab
