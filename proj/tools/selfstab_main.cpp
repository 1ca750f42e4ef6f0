// selfstab: run, sweep, model-check and audit executions of the
// self-stabilizing maximal matching protocol.
//
// Exit codes: 0 success, 1 a property was violated (or a run hit its move
// budget), 2 usage, IO or format error.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "selfstab/daemon.hpp"
#include "selfstab/executor.hpp"
#include "selfstab/graph.hpp"
#include "selfstab/modelcheck.hpp"
#include "selfstab/protocol.hpp"
#include "selfstab/serialization.hpp"
#include "selfstab/verifier.hpp"

namespace fs = std::filesystem;
using namespace selfstab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

// Default modelcheck cap without --big: K2 fits, path(3) does not.
constexpr std::uint64_t kSmallStateCap = 200'000;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void SetUpLogging() {
  auto logger = spdlog::stderr_logger_mt("selfstab");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SELFSTAB_LOG")) {
    std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring SELFSTAB_LOG={}", level);
  }
}

std::string ReadText(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json ReadJson(const std::string& path) {
  try {
    return Json::parse(ReadText(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// stdout unless a path other than "-" is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw UsageError("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  bool is_stdout() const { return !file_.is_open(); }

 private:
  std::ofstream file_;
};

// "gen:<spec>" generates; *.json reads {"nodes", "edges"}; anything else is an
// edge list.
Graph LoadGraph(const std::string& arg) {
  if (arg.rfind("gen:", 0) == 0) return Generate(ParseGraphSpec(arg.substr(4)));
  if (fs::path(arg).extension() == ".json") return GraphFromJson(ReadJson(arg));
  return FromEdgeList(ReadText(arg));
}

// allnull | legit | random | file:<path>; a bare path is read as a file.
InitSpec LoadInit(const std::string& arg, const Graph& g, std::uint64_t seed) {
  if (arg == "allnull") return InitSpec::AllNull();
  if (arg == "legit") return InitSpec::Legitimate();
  if (arg == "random") return InitSpec::Random(seed);
  std::string path = arg.rfind("file:", 0) == 0 ? arg.substr(5) : arg;
  if (!fs::exists(path)) throw UsageError("unknown --init '" + arg + "'");
  return InitSpec::Explicit(ConfigurationFromJson(g, ReadJson(path)));
}

RulePriority ParsePriority(const std::string& text) {
  RulePriority priority{};
  std::stringstream in(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(in, item, ',')) {
    if (i == priority.size()) throw UsageError("--priority lists more than five rules");
    priority[i++] = RuleKindFromName(item);
  }
  if (i != priority.size()) throw UsageError("--priority must list five rules");
  return priority;
}

void WriteSummary(std::ostream& out, const Graph& g, const MoveCounts& moves) {
  const std::size_t delta = MaxDegree(g);
  const double scale = static_cast<double>(g.num_nodes()) * delta * delta * delta;
  out << "n=" << g.num_nodes() << " delta=" << delta << " moves=" << moves.total;
  for (RuleKind kind : kAllRuleKinds) out << ' ' << RuleName(kind) << '=' << moves.of(kind);
  out << " ratio=" << (scale > 0 ? moves.total / scale : 0.0) << '\n';
}

fs::path ResolveSuite(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const char* dir : {SELFSTAB_SUITES_DIR, SELFSTAB_INSTALLED_SUITES_DIR}) {
    fs::path candidate = fs::path(dir) / (arg + ".json");
    if (fs::exists(candidate)) return candidate;
  }
  throw UsageError("no suite '" + arg + "'");
}

// ---------------------------------------------------------------------------

struct GenGraphArgs {
  std::string spec;
  bool no_isolated = false;
  std::string out;
};

int GenGraphCommand(const GenGraphArgs& args) {
  GraphSpec spec = ParseGraphSpec(args.spec);
  spec.require_no_isolated = args.no_isolated;
  Output out(args.out);
  out.stream() << ToEdgeList(Generate(spec));
  return kExitOk;
}

struct RunArgs {
  std::string graph;
  std::string init = "random";
  std::string daemon = "sequential";
  std::uint64_t seed = 0;
  double q = 0.5;
  std::string tie_break = "fixed";
  std::string priority;
  std::uint64_t budget = 0;
  std::string out;
  bool summary = false;
};

int RunCommand(const RunArgs& args) {
  Graph g = LoadGraph(args.graph);
  DaemonSpec daemon;
  daemon.kind = DaemonKindFromName(args.daemon);
  daemon.seed = args.seed;
  daemon.q = args.q;
  daemon.tie_break = TieBreakFromName(args.tie_break);
  if (!args.priority.empty()) daemon.priority = ParsePriority(args.priority);
  ValidateDaemonSpec(daemon);

  InitSpec init = LoadInit(args.init, g, args.seed);
  RunOptions options;
  options.move_budget = args.budget == 0 ? DefaultMoveBudget(g) : args.budget;
  spdlog::info("run: n={} m={} daemon={} budget={}", g.num_nodes(), g.num_edges(),
               args.daemon, options.move_budget);
  Trace trace = Run(g, MakeInitial(g, init), daemon, options);

  TraceMetadata meta{daemon, init, args.seed, options.move_budget};
  if (!args.summary || !args.out.empty()) {
    Output out(args.out);
    WriteTraceJsonl(out.stream(), g, trace, meta);
  }
  if (args.summary) {
    std::cout << "outcome=" << (trace.outcome == Outcome::kStable ? "stable" : "budget")
              << ' ';
    WriteSummary(std::cout, g, trace.moves);
  }
  if (trace.outcome != Outcome::kStable) {
    spdlog::error("move budget {} exhausted", options.move_budget);
    return kExitViolation;
  }
  return kExitOk;
}

struct SweepArgs {
  std::string suite;
  std::vector<std::string> graphs;
  std::vector<std::string> daemons;
  std::size_t seeds = 10;
  std::uint64_t first_seed = 0;
  double q = 0.5;
  std::string tie_break = "fixed";
  unsigned workers = 1;
  std::string out;
  bool summary = false;
  bool check = false;
};

int SweepCommand(const SweepArgs& args) {
  if (args.suite.empty() == args.graphs.empty()) {
    throw UsageError("sweep needs exactly one of --suite or --graph");
  }
  Suite suite;
  std::vector<SweepGraph> graphs;
  if (!args.suite.empty()) {
    suite = SuiteFromJson(ReadJson(ResolveSuite(args.suite).string()));
    for (const GraphSpec& spec : suite.graphs) {
      graphs.push_back({FormatGraphSpec(spec), Generate(spec)});
    }
  } else {
    for (const std::string& arg : args.graphs) graphs.push_back({arg, LoadGraph(arg)});
    suite.first_seed = args.first_seed;
    suite.seeds = args.seeds;
    for (const std::string& name : args.daemons) {
      DaemonSpec spec;
      spec.kind = DaemonKindFromName(name);
      spec.q = args.q;
      spec.tie_break = TieBreakFromName(args.tie_break);
      ValidateDaemonSpec(spec);
      suite.daemons.push_back(spec);
    }
    if (suite.daemons.empty()) suite.daemons.push_back(DaemonSpec{});
  }

  std::atomic<std::size_t> check_failures{0};
  std::mutex log_mutex;
  TraceVisitor visitor;
  if (args.check) {
    visitor = [&](const SweepGraph& entry, std::uint64_t seed, const Trace& trace) {
      MonitorReport report = CheckTrace(entry.graph, trace);
      if (report.all_pass()) return;
      ++check_failures;
      std::lock_guard lock(log_mutex);
      for (const MonitorResult& r : report.results) {
        if (!r.pass) spdlog::error("{} seed {}: {} {}", entry.label, seed, r.monitor, r.detail);
      }
    };
  }

  std::vector<SweepRow> rows;
  for (const DaemonSpec& daemon : suite.daemons) {
    SweepOptions options;
    options.seeds_per_graph = suite.seeds;
    options.first_seed = suite.first_seed;
    options.daemon = daemon;
    options.workers = args.workers;
    options.record_configurations = args.check;
    spdlog::info("sweep: {} graphs x {} seeds, daemon {}", graphs.size(), suite.seeds,
                 DaemonKindName(daemon.kind));
    std::vector<SweepRow> part = Sweep(graphs, options, visitor);
    rows.insert(rows.end(), part.begin(), part.end());
  }

  std::size_t unstable = 0;
  for (const SweepRow& row : rows) {
    if (!row.stabilized) {
      ++unstable;
      spdlog::error("{} {} seed {}: no stabilization within budget", row.graph, row.daemon,
                    row.seed);
    }
  }

  if (!args.summary || !args.out.empty()) {
    Output out(args.out);
    WriteSweepCsv(out.stream(), rows);
  }
  if (args.summary) {
    double max_ratio = 0;
    std::uint64_t max_moves = 0;
    std::array<std::uint64_t, 5> per_rule{};
    for (const SweepRow& row : rows) {
      max_ratio = std::max(max_ratio, row.ratio);
      max_moves = std::max(max_moves, row.moves);
      for (std::size_t k = 0; k < per_rule.size(); ++k) per_rule[k] += row.per_rule[k];
    }
    std::cout << "runs=" << rows.size() << " unstable=" << unstable
              << " max_moves=" << max_moves << " max_ratio=" << max_ratio;
    for (RuleKind kind : kAllRuleKinds) {
      std::cout << ' ' << RuleName(kind) << '=' << per_rule[static_cast<int>(kind)];
    }
    if (args.check) std::cout << " check_failures=" << check_failures.load();
    std::cout << '\n';
  }
  return unstable == 0 && check_failures == 0 ? kExitOk : kExitViolation;
}

struct ModelcheckArgs {
  std::string graph;
  bool big = false;
  bool no_canonical = false;
  unsigned workers = 1;
  std::string out;
};

int ModelcheckCommand(const ModelcheckArgs& args) {
  Graph g = LoadGraph(args.graph);
  VerifyOptions options;
  options.canonicalize_null_m = !args.no_canonical;
  options.state_cap = args.big ? kDefaultStateCap : kSmallStateCap;
  options.workers = args.workers;
  CheckReport report;
  try {
    report = Verify(g, options);
  } catch (const StateSpaceTooLarge& e) {
    spdlog::error("{} states exceed the cap of {}{}", e.projected(), options.state_cap,
                  args.big ? "" : "; pass --big to raise it");
    return kExitUsage;
  }
  Output out(args.out);
  out.stream() << CheckReportToJson(g, report).dump(2) << '\n';
  return report.verified() ? kExitOk : kExitViolation;
}

int CheckTraceCommand(const std::string& in_path) {
  std::istringstream in(ReadText(in_path));
  LoadedTrace loaded = ReadTraceJsonl(in);
  MonitorReport report = CheckTrace(loaded.graph, loaded.trace);
  std::cout << MonitorReportToJson(report).dump(2) << '\n';
  return report.all_pass() ? kExitOk : kExitViolation;
}

struct ReplayArgs {
  std::string graph;
  std::string init;
  std::string script;
  std::string out;
};

int ReplayCommand(const ReplayArgs& args) {
  Graph g = LoadGraph(args.graph);
  Configuration init = MakeInitial(g, LoadInit(args.init, g, 0));
  auto script = ScriptFromJson(g, ReadJson(args.script));
  std::vector<Configuration> configs;
  try {
    configs = Replay(g, init, script);
  } catch (const ExecutionError& e) {
    spdlog::error("replay failed at {}", e.what());
    return kExitViolation;
  }
  Output out(args.out);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    Json line = Json::object();
    line["step"] = i;
    line["stable"] = IsStable(g, configs[i]);
    line["config"] = ConfigurationToJson(g, configs[i]);
    out.stream() << line.dump() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  SetUpLogging();

  CLI::App app{"Self-stabilizing maximal matching: simulator, verifier, model checker"};
  app.require_subcommand(1);

  GenGraphArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-graph", "Print a generated graph as an edge list");
  gen_cmd->add_option("spec", gen.spec, "path:N | cycle:N | complete:N | star:N | gnp:N:P:SEED")
      ->required();
  gen_cmd->add_flag("--no-isolated", gen.no_isolated, "Resample gnp until no node is isolated");
  gen_cmd->add_option("--out", gen.out, "Output path (default stdout)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one execution and emit its trace as JSONL");
  run_cmd->add_option("--graph", run.graph, "Edge list, graph JSON, or gen:<spec>")->required();
  run_cmd->add_option("--init", run.init, "allnull | legit | random | file:<path>");
  run_cmd->add_option("--daemon", run.daemon, "adv-random | sequential | synchronous | greedy");
  run_cmd->add_option("--seed", run.seed, "Seed for the daemon and random init");
  run_cmd->add_option("--q", run.q, "Inclusion probability for adv-random");
  run_cmd->add_option("--tie-break", run.tie_break, "fixed | random");
  run_cmd->add_option("--priority", run.priority, "Greedy rule order, e.g. Reset,Seduction,...");
  run_cmd->add_option("--budget", run.budget, "Move budget (default 200*n*D^3+1000)");
  run_cmd->add_option("--out", run.out, "Trace output path (default stdout)");
  run_cmd->add_flag("--summary", run.summary, "Print move totals instead of the trace");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run many executions and emit CSV rows");
  sweep_cmd->add_option("--suite", sweep.suite, "Suite manifest path or name (e.g. standard)");
  sweep_cmd->add_option("--graph", sweep.graphs, "Graph (repeatable), instead of --suite");
  sweep_cmd->add_option("--daemon", sweep.daemons, "Daemon (repeatable), with --graph");
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per graph, with --graph");
  sweep_cmd->add_option("--first-seed", sweep.first_seed, "First seed, with --graph");
  sweep_cmd->add_option("--q", sweep.q, "Inclusion probability for adv-random");
  sweep_cmd->add_option("--tie-break", sweep.tie_break, "fixed | random");
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.out, "CSV output path (default stdout)");
  sweep_cmd->add_flag("--summary", sweep.summary, "Print aggregate totals");
  sweep_cmd->add_flag("--check", sweep.check, "Run every trace through check-trace monitors");

  ModelcheckArgs mc;
  auto* mc_cmd = app.add_subcommand("modelcheck", "Exhaustively verify a small graph");
  mc_cmd->add_option("--graph", mc.graph, "Edge list, graph JSON, or gen:<spec>")->required();
  mc_cmd->add_flag("--big", mc.big, "Allow up to 10^7 states");
  mc_cmd->add_flag("--no-canonical", mc.no_canonical, "Keep m of single nodes distinct");
  mc_cmd->add_option("--workers", mc.workers, "Worker threads")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--out", mc.out, "Report output path (default stdout)");

  std::string check_in;
  auto* check_cmd = app.add_subcommand("check-trace", "Run all monitors over a trace");
  check_cmd->add_option("--in", check_in, "Trace JSONL path, or - for stdin")->required();

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Apply an action script step by step");
  replay_cmd->add_option("--graph", replay.graph, "Edge list, graph JSON, or gen:<spec>")
      ->required();
  replay_cmd->add_option("--init", replay.init, "allnull | legit | file:<path>")->required();
  replay_cmd->add_option("--script", replay.script, "JSON array of steps")->required();
  replay_cmd->add_option("--out", replay.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return GenGraphCommand(gen);
    if (*run_cmd) return RunCommand(run);
    if (*sweep_cmd) return SweepCommand(sweep);
    if (*mc_cmd) return ModelcheckCommand(mc);
    if (*check_cmd) return CheckTraceCommand(check_in);
    if (*replay_cmd) return ReplayCommand(replay);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
  }
  return kExitUsage;
}
