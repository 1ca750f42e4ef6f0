#include "selfstab/executor.hpp"

#include <atomic>
#include <iomanip>
#include <mutex>
#include <random>
#include <thread>

namespace selfstab {

Configuration AllNullConfiguration(const Graph& g) {
  Configuration c;
  c.nodes.assign(g.num_nodes(), NodeState{});
  c.registers.assign(g.num_links(), RegisterValue{});
  return c;
}

Configuration LegitimateConfiguration(const Graph& g) {
  Configuration c = AllNullConfiguration(g);
  for (const auto& [u, v] : g.edges()) {
    if (!c.nodes[u].p && !c.nodes[v].p) {
      c.nodes[u] = {v, kMaxProgress};
      c.nodes[v] = {u, kMaxProgress};
    }
  }
  for (LinkIndex e = 0; e < g.num_links(); ++e) {
    c.registers[e] = CorrectRegisterValue(g, c, g.link_source(e), g.link_target(e));
  }
  return c;
}

Configuration RandomConfiguration(const Graph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> progress(0, kMaxProgress);
  std::uniform_int_distribution<int> reg(0, kRegisterDomainSize - 1);
  Configuration c;
  c.nodes.resize(g.num_nodes());
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    auto nbrs = g.neighbors(u);
    std::uniform_int_distribution<std::size_t> pointer(0, nbrs.size());
    std::size_t k = pointer(rng);
    if (k < nbrs.size()) c.nodes[u].p = nbrs[k];
    c.nodes[u].m = static_cast<Progress>(progress(rng));
  }
  c.registers.resize(g.num_links());
  for (auto& r : c.registers) r = RegisterFromCode(reg(rng));
  return c;
}

Configuration MakeInitial(const Graph& g, const InitSpec& init) {
  switch (init.kind) {
    case InitKind::kAllNull: return AllNullConfiguration(g);
    case InitKind::kLegitimate: return LegitimateConfiguration(g);
    case InitKind::kArbitraryRandom: return RandomConfiguration(g, init.seed);
    case InitKind::kExplicit:
      if (!init.explicit_config) throw ProtocolError("explicit init without configuration");
      ValidateConfiguration(g, *init.explicit_config);
      return *init.explicit_config;
  }
  return AllNullConfiguration(g);
}

std::uint64_t DefaultMoveBudget(const Graph& g) {
  const std::uint64_t n = g.num_nodes();
  const std::uint64_t d = MaxDegree(g);
  return 200 * n * d * d * d + 1000;
}

namespace {

bool AnyEligible(const Graph& g, const Configuration& c) {
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    if (!EnabledRules(g, c, u).empty()) return true;
  }
  return false;
}

void Count(MoveCounts& moves, std::span<const Action> actions) {
  for (const Action& a : actions) {
    ++moves.per_rule[static_cast<int>(a.rule.kind)];
    ++moves.per_node[a.node];
    ++moves.total;
  }
}

}  // namespace

Trace Run(const Graph& g, const Configuration& init, const DaemonSpec& spec,
          const RunOptions& options) {
  ValidateConfiguration(g, init);
  const std::uint64_t budget =
      options.move_budget == 0 ? DefaultMoveBudget(g) : options.move_budget;

  Trace trace;
  trace.initial = init;
  trace.moves.per_node.assign(g.num_nodes(), 0);
  if (options.record_configurations) trace.configurations.push_back(init);

  Daemon daemon(spec);
  Configuration current = init;
  while (true) {
    if (!AnyEligible(g, current)) {
      trace.outcome = Outcome::kStable;
      break;
    }
    if (trace.moves.total >= budget) {
      trace.outcome = Outcome::kBudgetExceeded;
      break;
    }
    std::vector<Action> actions = daemon.Select(g, current);
    ValidateSelection(g, current, actions);
    Configuration next = ApplyStepUnchecked(g, current, actions);
    if (next == current) {
      throw ExecutionError(trace.steps.size() + 1, "step left the configuration unchanged");
    }
    Count(trace.moves, actions);
    trace.steps.push_back({std::move(actions), Fingerprint(next)});
    if (options.record_configurations) trace.configurations.push_back(next);
    current = std::move(next);
  }
  trace.final_config = std::move(current);
  return trace;
}

std::vector<Configuration> Replay(const Graph& g, const Configuration& init,
                                  const std::vector<std::vector<Action>>& script) {
  ValidateConfiguration(g, init);
  std::vector<Configuration> out{init};
  out.reserve(script.size() + 1);
  for (std::size_t i = 0; i < script.size(); ++i) {
    try {
      out.push_back(ApplyStep(g, out.back(), script[i]));
    } catch (const ProtocolError& e) {
      throw ExecutionError(i + 1, e.what());
    }
  }
  return out;
}

void ReconstructConfigurations(const Graph& g, Trace& trace) {
  ValidateConfiguration(g, trace.initial);
  std::vector<Configuration> configs{trace.initial};
  configs.reserve(trace.steps.size() + 1);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    Configuration next;
    try {
      next = ApplyStep(g, configs.back(), trace.steps[i].actions);
    } catch (const ProtocolError& e) {
      throw ExecutionError(i + 1, e.what());
    }
    if (Fingerprint(next) != trace.steps[i].hash) {
      throw ExecutionError(i + 1, "configuration hash mismatch");
    }
    configs.push_back(std::move(next));
  }
  trace.configurations = std::move(configs);
}

std::vector<SweepRow> Sweep(const std::vector<SweepGraph>& graphs,
                            const SweepOptions& options, const TraceVisitor& visitor) {
  struct Job {
    std::size_t graph;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (std::size_t k = 0; k < options.seeds_per_graph; ++k) {
      jobs.push_back({gi, options.first_seed + k});
    }
  }
  std::vector<SweepRow> rows(jobs.size());

  auto run_job = [&](std::size_t j) {
    const SweepGraph& entry = graphs[jobs[j].graph];
    const Graph& g = entry.graph;
    const std::uint64_t seed = jobs[j].seed;
    const std::uint64_t n = g.num_nodes();
    const std::uint64_t d = MaxDegree(g);
    const double cube = static_cast<double>(n * d * d * d);

    DaemonSpec spec = options.daemon;
    spec.seed = seed;
    RunOptions run_options;
    run_options.move_budget =
        static_cast<std::uint64_t>(options.budget_scale * cube) + options.budget_floor;
    run_options.record_configurations = options.record_configurations;
    Trace trace = Run(g, RandomConfiguration(g, seed), spec, run_options);

    SweepRow& row = rows[j];
    row.graph = entry.label;
    row.daemon = DaemonKindName(spec.kind);
    row.seed = seed;
    row.n = n;
    row.max_degree = d;
    row.moves = trace.moves.total;
    row.per_rule = trace.moves.per_rule;
    row.stabilized = trace.outcome == Outcome::kStable;
    row.ratio = cube > 0 ? static_cast<double>(row.moves) / cube : 0.0;
    if (visitor) visitor(entry, seed, trace);
  };

  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1 || jobs.size() <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t j = next++; j < jobs.size(); j = next++) {
        try {
          run_job(j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void WriteSweepCsv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "graph,daemon,seed,n,max_degree,moves";
  for (RuleKind kind : kAllRuleKinds) out << ',' << RuleName(kind);
  out << ",stabilized,ratio\n";
  for (const SweepRow& row : rows) {
    out << row.graph << ',' << row.daemon << ',' << row.seed << ',' << row.n << ','
        << row.max_degree << ',' << row.moves;
    for (auto count : row.per_rule) out << ',' << count;
    out << ',' << (row.stabilized ? "true" : "false") << ',' << std::setprecision(6)
        << row.ratio << '\n';
  }
}

}  // namespace selfstab
