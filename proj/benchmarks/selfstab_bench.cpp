#include <benchmark/benchmark.h>

#include "selfstab/daemon.hpp"
#include "selfstab/executor.hpp"
#include "selfstab/graph.hpp"
#include "selfstab/modelcheck.hpp"
#include "selfstab/protocol.hpp"
#include "selfstab/verifier.hpp"

namespace {

using namespace selfstab;

void BM_EnabledRules(benchmark::State& state) {
  Graph g = Generate(GraphSpec::Gnp(static_cast<std::size_t>(state.range(0)), 0.2, 1));
  Configuration c = RandomConfiguration(g, 1);
  for (auto _ : state) {
    std::size_t total = 0;
    for (Vertex u = 0; u < g.num_nodes(); ++u) total += EnabledRules(g, c, u).size();
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * g.num_nodes());
}
BENCHMARK(BM_EnabledRules)->Arg(20)->Arg(100)->Arg(400);

void BM_RunToStability(benchmark::State& state) {
  Graph g = Generate(GraphSpec::Gnp(static_cast<std::size_t>(state.range(0)), 0.15, 1));
  DaemonSpec spec;
  spec.kind = static_cast<DaemonKind>(state.range(1));
  std::uint64_t seed = 0;
  std::uint64_t moves = 0;
  for (auto _ : state) {
    spec.seed = seed;
    Trace t = Run(g, RandomConfiguration(g, seed), spec);
    moves += t.moves.total;
    ++seed;
  }
  state.counters["moves/run"] =
      benchmark::Counter(static_cast<double>(moves), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_RunToStability)
    ->ArgsProduct({{40, 160}, {0, 1, 2, 3}})
    ->ArgNames({"n", "daemon"})
    ->Unit(benchmark::kMillisecond);

void BM_CheckTrace(benchmark::State& state) {
  Graph g = Generate(GraphSpec::Gnp(40, 0.15, 1));
  DaemonSpec spec;
  spec.kind = DaemonKind::kAdversarialRandom;
  RunOptions options;
  options.record_configurations = true;
  Trace t = Run(g, RandomConfiguration(g, 3), spec, options);
  for (auto _ : state) benchmark::DoNotOptimize(CheckTrace(g, t).all_pass());
}
BENCHMARK(BM_CheckTrace)->Unit(benchmark::kMillisecond);

void BM_VerifyK2(benchmark::State& state) {
  Graph g = Generate(GraphSpec::Path(2));
  for (auto _ : state) benchmark::DoNotOptimize(Verify(g).transition_count);
}
BENCHMARK(BM_VerifyK2)->Unit(benchmark::kMillisecond);

void BM_VerifyPath3(benchmark::State& state) {
  Graph g = Generate(GraphSpec::Path(3));
  VerifyOptions options;
  options.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Verify(g, options).transition_count);
}
BENCHMARK(BM_VerifyPath3)->Arg(1)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
