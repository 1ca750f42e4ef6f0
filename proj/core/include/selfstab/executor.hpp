#ifndef SELFSTAB_EXECUTOR_HPP_
#define SELFSTAB_EXECUTOR_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "selfstab/daemon.hpp"
#include "selfstab/graph.hpp"
#include "selfstab/protocol.hpp"

namespace selfstab {

enum class InitKind { kAllNull, kLegitimate, kArbitraryRandom, kExplicit };

struct InitSpec {
  InitKind kind = InitKind::kArbitraryRandom;
  std::uint64_t seed = 0;                   // kArbitraryRandom
  std::optional<Configuration> explicit_config;  // kExplicit

  static InitSpec AllNull() { return {InitKind::kAllNull, 0, std::nullopt}; }
  static InitSpec Legitimate() { return {InitKind::kLegitimate, 0, std::nullopt}; }
  static InitSpec Random(std::uint64_t seed) {
    return {InitKind::kArbitraryRandom, seed, std::nullopt};
  }
  static InitSpec Explicit(Configuration c) {
    return {InitKind::kExplicit, 0, std::move(c)};
  }
};

// Every p = null, m = 0, every register (Idle, 0).
Configuration AllNullConfiguration(const Graph& g);

// A stable configuration holding the greedy maximal matching taken in
// ascending edge order: matched pairs at (You, 2, 2) with registers (You, 2),
// everything else idle.
Configuration LegitimateConfiguration(const Graph& g);

// p uniform over N(u) ∪ {null}, m uniform over {0,1,2}, each register uniform
// over the nine values. Deterministic per seed.
Configuration RandomConfiguration(const Graph& g, std::uint64_t seed);

Configuration MakeInitial(const Graph& g, const InitSpec& init);

// 200·n·Δ³ + 1000.
std::uint64_t DefaultMoveBudget(const Graph& g);

struct Step {
  std::vector<Action> actions;
  std::uint64_t hash = 0;  // Fingerprint of the configuration after the step
};

struct MoveCounts {
  std::array<std::uint64_t, 5> per_rule{};  // indexed by RuleKind
  std::vector<std::uint64_t> per_node;
  std::uint64_t total = 0;

  std::uint64_t of(RuleKind kind) const { return per_rule[static_cast<int>(kind)]; }
};

enum class Outcome { kStable, kBudgetExceeded };

struct Trace {
  Configuration initial;
  std::vector<Step> steps;
  // configurations[i] is the configuration after i steps; filled only when
  // RunOptions::record_configurations is set.
  std::vector<Configuration> configurations;
  MoveCounts moves;
  Outcome outcome = Outcome::kStable;
  Configuration final_config;

  bool has_configurations() const {
    return configurations.size() == steps.size() + 1;
  }
};

struct RunOptions {
  std::uint64_t move_budget = 0;  // 0 selects DefaultMoveBudget
  bool record_configurations = false;
};

class ExecutionError : public std::runtime_error {
 public:
  ExecutionError(std::size_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Select/apply loop. Stops with kStable when no node is eligible, or with
// kBudgetExceeded once the move count reaches the budget on an unstable
// configuration. Throws ProtocolError for an initial configuration that does
// not fit g.
Trace Run(const Graph& g, const Configuration& init, const DaemonSpec& daemon,
          const RunOptions& options = {});

// Applies a scripted execution and returns every configuration, starting with
// `init`. Throws ExecutionError naming the 1-based step of the first invalid
// action set.
std::vector<Configuration> Replay(const Graph& g, const Configuration& init,
                                  const std::vector<std::vector<Action>>& script);

// Rebuilds per-step configurations of a trace from its initial configuration
// and actions, checking every step hash. Throws ExecutionError on mismatch.
void ReconstructConfigurations(const Graph& g, Trace& trace);

struct SweepGraph {
  std::string label;
  Graph graph;
};

struct SweepOptions {
  std::size_t seeds_per_graph = 10;
  std::uint64_t first_seed = 0;
  DaemonSpec daemon;           // seed replaced by the per-row seed
  double budget_scale = 200;   // budget = scale·n·Δ³ + budget_floor
  std::uint64_t budget_floor = 1000;
  unsigned workers = 1;
  bool record_configurations = false;
};

struct SweepRow {
  std::string graph;
  std::string daemon;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t max_degree = 0;
  std::uint64_t moves = 0;
  std::array<std::uint64_t, 5> per_rule{};
  bool stabilized = false;
  double ratio = 0;  // moves / (n·Δ³), 0 when Δ = 0
};

// Called once per finished run, possibly from worker threads concurrently.
using TraceVisitor =
    std::function<void(const SweepGraph&, std::uint64_t seed, const Trace&)>;

// For every graph and seed s: initial configuration RandomConfiguration(g, s),
// daemon seeded with s. Rows come out in (graph, seed) order regardless of
// worker count.
std::vector<SweepRow> Sweep(const std::vector<SweepGraph>& graphs,
                            const SweepOptions& options,
                            const TraceVisitor& visitor = {});

void WriteSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace selfstab

#endif  // SELFSTAB_EXECUTOR_HPP_
