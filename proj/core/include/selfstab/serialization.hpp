#ifndef SELFSTAB_SERIALIZATION_HPP_
#define SELFSTAB_SERIALIZATION_HPP_

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selfstab/daemon.hpp"
#include "selfstab/executor.hpp"
#include "selfstab/graph.hpp"
#include "selfstab/modelcheck.hpp"
#include "selfstab/protocol.hpp"
#include "selfstab/verifier.hpp"

namespace selfstab {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"nodes": {"<id>": {"p": <id|null>, "m": 0|1|2}},
//  "registers": {"<u>-><v>": {"p": "Idle"|"You"|"Other", "m": 0|1|2}}}
// Nodes in id order, registers in (u, v) order, so dumping a parsed document
// reproduces it byte for byte.
Json ConfigurationToJson(const Graph& g, const Configuration& c);
// Throws FormatError on schema violations, missing or extra registers, and
// pointers to non-neighbors.
Configuration ConfigurationFromJson(const Graph& g, const Json& j);

Json GraphToJson(const Graph& g);  // {"nodes": [...], "edges": [[u, v], ...]}
Graph GraphFromJson(const Json& j);

Json DaemonSpecToJson(const DaemonSpec& spec);
DaemonSpec DaemonSpecFromJson(const Json& j);

Json InitSpecToJson(const InitSpec& init);

Json ActionToJson(const Graph& g, const Action& a);
Action ActionFromJson(const Graph& g, const Json& j);

// A replay script: an array of steps, each an array of actions.
Json ScriptToJson(const Graph& g, const std::vector<std::vector<Action>>& script);
std::vector<std::vector<Action>> ScriptFromJson(const Graph& g, const Json& j);

struct TraceMetadata {
  DaemonSpec daemon;
  InitSpec init;
  std::uint64_t seed = 0;
  std::uint64_t move_budget = 0;
};

// Line 0: {"graph", "daemon", "init", "seed", "budget", "initial"};
// line i >= 1: {"step": i, "actions": [...], "hash": "<hex>"};
// last line: {"outcome": "stable"|"budget", "moves": N, "final": {...}}.
void WriteTraceJsonl(std::ostream& out, const Graph& g, const Trace& trace,
                     const TraceMetadata& meta);

struct LoadedTrace {
  Graph graph;
  Json metadata;
  Trace trace;
};

// Reads what WriteTraceJsonl produces. Per-step configurations are not
// rebuilt; see ReconstructConfigurations. Throws FormatError.
LoadedTrace ReadTraceJsonl(std::istream& in);

// Sweep manifest: {"name", "graphs": ["path:5", ...],
// "seeds": {"first", "count"}, "daemons": [<daemon spec>, ...]}.
struct Suite {
  std::string name;
  std::vector<GraphSpec> graphs;
  std::uint64_t first_seed = 0;
  std::size_t seeds = 0;
  std::vector<DaemonSpec> daemons;
};

Suite SuiteFromJson(const Json& j);

Json MonitorResultToJson(const MonitorResult& r);
Json MonitorReportToJson(const MonitorReport& report);

Json CheckReportToJson(const Graph& g, const CheckReport& report);

}  // namespace selfstab

#endif  // SELFSTAB_SERIALIZATION_HPP_
