#include "selfstab/serialization.hpp"

#include <charconv>

namespace selfstab {

namespace {

NodeId ParseNodeKey(std::string_view text) {
  NodeId id = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError("bad node id '" + std::string(text) + "'");
  }
  return id;
}

Vertex VertexOf(const Graph& g, NodeId id) {
  if (!g.contains(id)) throw FormatError("unknown node " + std::to_string(id));
  return g.vertex_of(id);
}

Vertex VertexFromJson(const Graph& g, const Json& j) {
  if (!j.is_number_unsigned()) throw FormatError("node id must be a nonnegative integer");
  return VertexOf(g, j.get<NodeId>());
}

Progress ProgressFromJson(const Json& j) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() > kMaxProgress) {
    throw FormatError("m must be 0, 1 or 2");
  }
  return static_cast<Progress>(j.get<std::uint64_t>());
}

std::string_view PointingName(Pointing p) {
  switch (p) {
    case Pointing::kIdle: return "Idle";
    case Pointing::kYou: return "You";
    case Pointing::kOther: return "Other";
  }
  return "?";
}

Pointing PointingFromJson(const Json& j) {
  if (j == "Idle") return Pointing::kIdle;
  if (j == "You") return Pointing::kYou;
  if (j == "Other") return Pointing::kOther;
  throw FormatError("register p must be Idle, You or Other");
}

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

Json ConfigurationToJson(const Graph& g, const Configuration& c) {
  Json nodes = Json::object();
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    const NodeState& s = c.nodes[u];
    Json state = Json::object();
    state["p"] = s.p ? Json(g.id(*s.p)) : Json(nullptr);
    state["m"] = s.m;
    nodes[std::to_string(g.id(u))] = std::move(state);
  }
  Json registers = Json::object();
  for (LinkIndex e = 0; e < g.num_links(); ++e) {
    const RegisterValue& r = c.registers[e];
    Json value = Json::object();
    value["p"] = PointingName(r.p);
    value["m"] = r.m;
    registers[std::to_string(g.id(g.link_source(e))) + "->" +
              std::to_string(g.id(g.link_target(e)))] = std::move(value);
  }
  Json out = Json::object();
  out["nodes"] = std::move(nodes);
  out["registers"] = std::move(registers);
  return out;
}

Configuration ConfigurationFromJson(const Graph& g, const Json& j) {
  const Json& nodes = Field(j, "nodes");
  const Json& registers = Field(j, "registers");
  if (!nodes.is_object() || !registers.is_object()) {
    throw FormatError("nodes and registers must be objects");
  }

  Configuration c;
  c.nodes.resize(g.num_nodes());
  std::vector<bool> seen_node(g.num_nodes(), false);
  for (const auto& [key, value] : nodes.items()) {
    Vertex u = VertexOf(g, ParseNodeKey(key));
    if (seen_node[u]) throw FormatError("node " + key + " listed twice");
    seen_node[u] = true;
    const Json& p = Field(value, "p");
    if (!p.is_null()) {
      Vertex v = VertexFromJson(g, p);
      if (!g.adjacent(u, v)) throw FormatError("node " + key + ": p is not a neighbor");
      c.nodes[u].p = v;
    }
    c.nodes[u].m = ProgressFromJson(Field(value, "m"));
  }
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    if (!seen_node[u]) throw FormatError("missing node " + std::to_string(g.id(u)));
  }

  c.registers.resize(g.num_links());
  std::vector<bool> seen_link(g.num_links(), false);
  for (const auto& [key, value] : registers.items()) {
    auto arrow = key.find("->");
    if (arrow == std::string::npos) throw FormatError("bad register key '" + key + "'");
    Vertex u = VertexOf(g, ParseNodeKey(std::string_view(key).substr(0, arrow)));
    Vertex v = VertexOf(g, ParseNodeKey(std::string_view(key).substr(arrow + 2)));
    if (!g.adjacent(u, v)) throw FormatError("register " + key + " is not on an edge");
    LinkIndex e = g.link(u, v);
    if (seen_link[e]) throw FormatError("register " + key + " listed twice");
    seen_link[e] = true;
    c.registers[e] = {PointingFromJson(Field(value, "p")), ProgressFromJson(Field(value, "m"))};
  }
  for (LinkIndex e = 0; e < g.num_links(); ++e) {
    if (!seen_link[e]) {
      throw FormatError("missing register " + std::to_string(g.id(g.link_source(e))) +
                        "->" + std::to_string(g.id(g.link_target(e))));
    }
  }
  return c;
}

Json GraphToJson(const Graph& g) {
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({g.id(u), g.id(v)});
  Json out = Json::object();
  out["nodes"] = g.ids();
  out["edges"] = std::move(edges);
  return out;
}

Graph GraphFromJson(const Json& j) {
  try {
    auto nodes = Field(j, "nodes").get<std::vector<NodeId>>();
    auto edges = Field(j, "edges").get<std::vector<std::pair<NodeId, NodeId>>>();
    return Graph::FromEdges(std::move(nodes), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad graph: ") + e.what());
  } catch (const GraphError& e) {
    throw FormatError(std::string("bad graph: ") + e.what());
  }
}

Json DaemonSpecToJson(const DaemonSpec& spec) {
  Json out = Json::object();
  out["kind"] = DaemonKindName(spec.kind);
  out["seed"] = spec.seed;
  out["q"] = spec.q;
  out["tie_break"] = TieBreakName(spec.tie_break);
  Json priority = Json::array();
  for (RuleKind kind : spec.priority) priority.push_back(RuleName(kind));
  out["priority"] = std::move(priority);
  return out;
}

DaemonSpec DaemonSpecFromJson(const Json& j) {
  try {
    DaemonSpec spec;
    spec.kind = DaemonKindFromName(Field(j, "kind").get<std::string>());
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("q")) spec.q = j.at("q").get<double>();
    if (j.contains("tie_break")) {
      spec.tie_break = TieBreakFromName(j.at("tie_break").get<std::string>());
    }
    if (j.contains("priority")) {
      const Json& list = j.at("priority");
      if (!list.is_array() || list.size() != spec.priority.size()) {
        throw FormatError("priority must list five rules");
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        spec.priority[i] = RuleKindFromName(list[i].get<std::string>());
      }
    }
    ValidateDaemonSpec(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad daemon spec: ") + e.what());
  } catch (const DaemonError& e) {
    throw FormatError(e.what());
  } catch (const ProtocolError& e) {
    throw FormatError(e.what());
  }
}

Json InitSpecToJson(const InitSpec& init) {
  Json out = Json::object();
  switch (init.kind) {
    case InitKind::kAllNull: out["kind"] = "allnull"; break;
    case InitKind::kLegitimate: out["kind"] = "legit"; break;
    case InitKind::kArbitraryRandom:
      out["kind"] = "random";
      out["seed"] = init.seed;
      break;
    case InitKind::kExplicit: out["kind"] = "explicit"; break;
  }
  return out;
}

Json ActionToJson(const Graph& g, const Action& a) {
  Json out = Json::object();
  out["node"] = g.id(a.node);
  out["rule"] = RuleName(a.rule.kind);
  if (a.rule.neighbor) out["arg"] = g.id(*a.rule.neighbor);
  return out;
}

Action ActionFromJson(const Graph& g, const Json& j) {
  Action a;
  a.node = VertexFromJson(g, Field(j, "node"));
  const Json& rule = Field(j, "rule");
  if (!rule.is_string()) throw FormatError("rule must be a string");
  try {
    a.rule.kind = RuleKindFromName(rule.get<std::string>());
  } catch (const ProtocolError& e) {
    throw FormatError(e.what());
  }
  const bool has_arg = j.contains("arg") && !j.at("arg").is_null();
  if (TakesNeighbor(a.rule.kind) != has_arg) {
    throw FormatError(std::string(RuleName(a.rule.kind)) +
                      (has_arg ? " takes no argument" : " needs an argument"));
  }
  if (has_arg) a.rule.neighbor = VertexFromJson(g, j.at("arg"));
  return a;
}

Json ScriptToJson(const Graph& g, const std::vector<std::vector<Action>>& script) {
  Json out = Json::array();
  for (const auto& step : script) {
    Json actions = Json::array();
    for (const Action& a : step) actions.push_back(ActionToJson(g, a));
    out.push_back(std::move(actions));
  }
  return out;
}

std::vector<std::vector<Action>> ScriptFromJson(const Graph& g, const Json& j) {
  if (!j.is_array()) throw FormatError("script must be an array of steps");
  std::vector<std::vector<Action>> script;
  for (const Json& step : j) {
    if (!step.is_array()) throw FormatError("script step must be an array of actions");
    std::vector<Action> actions;
    for (const Json& a : step) actions.push_back(ActionFromJson(g, a));
    script.push_back(std::move(actions));
  }
  return script;
}

void WriteTraceJsonl(std::ostream& out, const Graph& g, const Trace& trace,
                     const TraceMetadata& meta) {
  Json head = Json::object();
  head["graph"] = GraphToJson(g);
  head["daemon"] = DaemonSpecToJson(meta.daemon);
  head["init"] = InitSpecToJson(meta.init);
  head["seed"] = meta.seed;
  head["budget"] = meta.move_budget;
  head["initial"] = ConfigurationToJson(g, trace.initial);
  out << head.dump() << '\n';

  char hex[17];
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const Step& step = trace.steps[i];
    Json line = Json::object();
    line["step"] = i + 1;
    Json actions = Json::array();
    for (const Action& a : step.actions) actions.push_back(ActionToJson(g, a));
    line["actions"] = std::move(actions);
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(step.hash));
    line["hash"] = hex;
    out << line.dump() << '\n';
  }

  Json tail = Json::object();
  tail["outcome"] = trace.outcome == Outcome::kStable ? "stable" : "budget";
  tail["moves"] = trace.moves.total;
  tail["final"] = ConfigurationToJson(g, trace.final_config);
  out << tail.dump() << '\n';
}

LoadedTrace ReadTraceJsonl(std::istream& in) {
  std::vector<Json> lines;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    try {
      lines.push_back(Json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (lines.size() < 2) throw FormatError("trace needs a metadata line and an outcome line");

  LoadedTrace loaded;
  loaded.metadata = lines.front();
  loaded.graph = GraphFromJson(Field(loaded.metadata, "graph"));
  const Graph& g = loaded.graph;
  Trace& trace = loaded.trace;
  trace.initial = ConfigurationFromJson(g, Field(loaded.metadata, "initial"));
  trace.moves.per_node.assign(g.num_nodes(), 0);

  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const Json& line = lines[i];
    const Json& step_no = Field(line, "step");
    if (!step_no.is_number_unsigned() || step_no.get<std::size_t>() != i) {
      throw FormatError("trace line " + std::to_string(i) + ": step number out of sequence");
    }
    Step step;
    const Json& actions = Field(line, "actions");
    if (!actions.is_array()) throw FormatError("actions must be an array");
    for (const Json& a : actions) {
      Action action = ActionFromJson(g, a);
      ++trace.moves.per_rule[static_cast<int>(action.rule.kind)];
      ++trace.moves.per_node[action.node];
      ++trace.moves.total;
      step.actions.push_back(action);
    }
    const Json& hash = Field(line, "hash");
    if (!hash.is_string()) throw FormatError("hash must be a hex string");
    try {
      std::size_t used = 0;
      const std::string& h = hash.get_ref<const std::string&>();
      step.hash = std::stoull(h, &used, 16);
      if (used != h.size()) throw FormatError("bad hash");
    } catch (const std::logic_error&) {
      throw FormatError("bad hash");
    }
    trace.steps.push_back(std::move(step));
  }

  const Json& tail = lines.back();
  const Json& outcome = Field(tail, "outcome");
  if (outcome == "stable") {
    trace.outcome = Outcome::kStable;
  } else if (outcome == "budget") {
    trace.outcome = Outcome::kBudgetExceeded;
  } else {
    throw FormatError("outcome must be stable or budget");
  }
  trace.final_config = ConfigurationFromJson(g, Field(tail, "final"));
  return loaded;
}

Suite SuiteFromJson(const Json& j) {
  try {
    Suite suite;
    if (j.contains("name")) suite.name = j.at("name").get<std::string>();
    for (const Json& g : Field(j, "graphs")) {
      suite.graphs.push_back(ParseGraphSpec(g.get<std::string>()));
    }
    const Json& seeds = Field(j, "seeds");
    suite.first_seed = Field(seeds, "first").get<std::uint64_t>();
    suite.seeds = Field(seeds, "count").get<std::size_t>();
    for (const Json& d : Field(j, "daemons")) suite.daemons.push_back(DaemonSpecFromJson(d));
    return suite;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad suite: ") + e.what());
  } catch (const GraphError& e) {
    throw FormatError(std::string("bad suite: ") + e.what());
  }
}

Json MonitorResultToJson(const MonitorResult& r) {
  Json out = Json::object();
  out["monitor"] = r.monitor;
  out["pass"] = r.pass;
  out["step"] = r.step ? Json(*r.step) : Json(nullptr);
  out["node"] = r.node ? Json(*r.node) : Json(nullptr);
  out["detail"] = r.detail;
  return out;
}

Json MonitorReportToJson(const MonitorReport& report) {
  Json monitors = Json::array();
  for (const auto& r : report.results) monitors.push_back(MonitorResultToJson(r));
  Json out = Json::object();
  out["pass"] = report.all_pass();
  out["monitors"] = std::move(monitors);
  return out;
}

Json CheckReportToJson(const Graph& g, const CheckReport& report) {
  Json out = Json::object();
  out["state_count"] = report.state_count;
  out["transition_count"] = report.transition_count;
  out["sink_count"] = report.sink_count;
  out["has_cycle"] = report.has_cycle;
  out["all_sinks_legitimate"] = report.all_sinks_legitimate;
  out["sinks_registers_correct"] = report.sinks_registers_correct;
  out["max_moves_to_stability"] = report.max_moves_to_stability
                                      ? Json(*report.max_moves_to_stability)
                                      : Json(nullptr);
  Json cycle = Json::array();
  for (const auto& c : report.cycle_witness) cycle.push_back(ConfigurationToJson(g, c));
  out["cycle_witness"] = std::move(cycle);
  out["bad_sink_witness"] = report.bad_sink_witness
                                ? ConfigurationToJson(g, *report.bad_sink_witness)
                                : Json(nullptr);
  return out;
}

}  // namespace selfstab
