#include "selfstab/verifier.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace selfstab {

bool IsStable(const Graph& g, const Configuration& c) {
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    if (!EnabledRules(g, c, u).empty()) return false;
  }
  return true;
}

std::vector<std::pair<Vertex, Vertex>> MatchedPairs(const Graph& g,
                                                    const Configuration& c) {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (const auto& [u, v] : g.edges()) {
    if (c.nodes[u].p == v && c.nodes[v].p == u) out.emplace_back(u, v);
  }
  return out;
}

bool IsLegitimate(const Graph& g, const Configuration& c) {
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    const auto& p = c.nodes[u].p;
    if (p) {
      if (c.nodes[*p].p != u) return false;
    } else {
      for (Vertex v : g.neighbors(u)) {
        if (!c.nodes[v].p) return false;
      }
    }
  }
  return true;
}

bool CheckStableRegisters(const Graph& g, const Configuration& c) {
  if (!IsStable(g, c)) throw VerifierError("configuration is not stable");
  for (LinkIndex e = 0; e < g.num_links(); ++e) {
    if (c.registers[e] !=
        CorrectRegisterValue(g, c, g.link_source(e), g.link_target(e))) {
      return false;
    }
  }
  return true;
}

namespace {

using Pair = std::pair<Progress, Progress>;

constexpr std::array<Pair, 5> kUpdatedStates = {
    Pair{0, 0}, Pair{0, 1}, Pair{1, 1}, Pair{2, 1}, Pair{2, 2}};

bool Contains(std::span<const Pair> set, Pair p) {
  return std::find(set.begin(), set.end(), p) != set.end();
}

RegisterValue You(int m) { return {Pointing::kYou, static_cast<Progress>(m)}; }

}  // namespace

std::string ToString(const EdgeState& state) {
  std::ostringstream out;
  switch (state.kind) {
    case EdgeState::Kind::kNotMatched: return "NotMatched";
    case EdgeState::Kind::kMatchedNotCorrect: out << "Matched"; break;
    case EdgeState::Kind::kUpdatedCorrect: out << "UpdatedCorrect"; break;
    case EdgeState::Kind::kToUpdateCorrect: out << "ToUpdateCorrect"; break;
  }
  out << "(You," << int{state.alpha} << ',' << int{state.beta} << ')';
  return out.str();
}

EdgeState ClassifyEdge(const Graph& g, const Configuration& c, Vertex s, Vertex t) {
  if (s >= t) throw VerifierError("classify_edge needs s < t");
  if (!g.adjacent(s, t)) throw VerifierError("classify_edge needs an edge");

  EdgeState out;
  if (c.nodes[s].p != t || c.nodes[t].p != s) return out;
  const Progress a = c.nodes[s].m;
  const Progress b = c.nodes[t].m;
  out.alpha = a;
  out.beta = b;
  out.kind = EdgeState::Kind::kMatchedNotCorrect;

  const RegisterValue& r_st = c.registers[g.link(s, t)];
  const RegisterValue& r_ts = c.registers[g.link(t, s)];
  if (Contains(kUpdatedStates, {a, b}) && r_st == You(a) && r_ts == You(b)) {
    out.kind = EdgeState::Kind::kUpdatedCorrect;
    return out;
  }
  constexpr std::array<Pair, 2> kLaggingT = {Pair{0, 1}, Pair{2, 2}};
  constexpr std::array<Pair, 2> kLaggingS = {Pair{1, 1}, Pair{2, 1}};
  if (Contains(kLaggingT, {a, b}) && r_st == You(a) && r_ts == You(b - 1)) {
    out.kind = EdgeState::Kind::kToUpdateCorrect;
  } else if (Contains(kLaggingS, {a, b}) && r_st == You(a - 1) && r_ts == You(b)) {
    out.kind = EdgeState::Kind::kToUpdateCorrect;
  }
  return out;
}

bool MonitorReport::all_pass() const {
  return std::all_of(results.begin(), results.end(),
                     [](const MonitorResult& r) { return r.pass; });
}

const MonitorResult* MonitorReport::find(const std::string& monitor) const {
  for (const auto& r : results) {
    if (r.monitor == monitor) return &r;
  }
  return nullptr;
}

namespace {

// One row of the closure case study: a correct state, the relevant rules each
// endpoint may run there, and the state reached when that rule fires.
// Quadruples are (m_s, m_t, r_st.m, r_ts.m).
enum Relevant : int { kNone = 0, kIncrease = 1, kWrite = 2 };

struct ClosureRow {
  EdgeState::Kind kind;
  Pair state;
  std::array<int, 4> before;
  int s_rule;
  int t_rule;
  std::array<int, 4> after;
  EdgeState::Kind after_kind;
};

constexpr auto kUpd = EdgeState::Kind::kUpdatedCorrect;
constexpr auto kTo = EdgeState::Kind::kToUpdateCorrect;

constexpr std::array<ClosureRow, 9> kClosureTable = {{
    {kUpd, {0, 0}, {0, 0, 0, 0}, kNone, kIncrease, {0, 1, 0, 0}, kTo},
    {kUpd, {0, 1}, {0, 1, 0, 1}, kIncrease, kNone, {1, 1, 0, 1}, kTo},
    {kUpd, {1, 1}, {1, 1, 1, 1}, kIncrease, kNone, {2, 1, 1, 1}, kTo},
    {kUpd, {2, 1}, {2, 1, 2, 1}, kNone, kIncrease, {2, 2, 2, 1}, kTo},
    {kUpd, {2, 2}, {2, 2, 2, 2}, kNone, kNone, {0, 0, 0, 0}, kUpd},
    {kTo, {0, 1}, {0, 1, 0, 0}, kNone, kWrite, {0, 1, 0, 1}, kUpd},
    {kTo, {1, 1}, {1, 1, 0, 1}, kWrite, kNone, {1, 1, 1, 1}, kUpd},
    {kTo, {2, 1}, {2, 1, 1, 1}, kWrite, kNone, {2, 1, 2, 1}, kUpd},
    {kTo, {2, 2}, {2, 2, 2, 1}, kNone, kWrite, {2, 2, 2, 2}, kUpd},
}};

const ClosureRow* FindRow(const EdgeState& state) {
  for (const auto& row : kClosureTable) {
    if (row.kind == state.kind && row.state == Pair{state.alpha, state.beta}) return &row;
  }
  return nullptr;
}

std::array<int, 4> Quad(const Graph& g, const Configuration& c, Vertex s, Vertex t) {
  return {c.nodes[s].m, c.nodes[t].m, c.registers[g.link(s, t)].m,
          c.registers[g.link(t, s)].m};
}

// Relevant rule of `u` towards partner `v` enabled in c, or kNone.
int RelevantEnabled(const Graph& g, const Configuration& c, Vertex u, Vertex v) {
  int out = kNone;
  if (IsEnabled(g, c, u, Rule::Increase())) out |= kIncrease;
  if (IsEnabled(g, c, u, Rule::Write(v))) out |= kWrite;
  return out;
}

int RelevantExecuted(const Action* action, Vertex partner) {
  if (!action) return kNone;
  if (action->rule.kind == RuleKind::kIncrease) return kIncrease;
  if (action->rule.kind == RuleKind::kWrite && action->rule.neighbor == partner) {
    return kWrite;
  }
  return kNone;
}

MonitorResult Fail(std::string monitor, std::size_t step, NodeId node, std::string detail) {
  MonitorResult r;
  r.monitor = std::move(monitor);
  r.pass = false;
  r.step = step;
  r.node = node;
  r.detail = std::move(detail);
  return r;
}

std::string EdgeName(const Graph& g, Vertex s, Vertex t) {
  return "(" + std::to_string(g.id(s)) + "," + std::to_string(g.id(t)) + ")";
}

}  // namespace

MonitorResult CheckClosure(const Graph& g, const Trace& trace) {
  if (!trace.has_configurations()) {
    throw VerifierError("closure check needs per-step configurations");
  }
  std::vector<const Action*> acted(g.num_nodes(), nullptr);
  for (std::size_t k = 1; k <= trace.steps.size(); ++k) {
    const Configuration& before = trace.configurations[k - 1];
    const Configuration& after = trace.configurations[k];
    const auto& actions = trace.steps[k - 1].actions;
    for (const Action& a : actions) acted[a.node] = &a;

    // Only edges with an acting endpoint can change state.
    std::vector<std::pair<Vertex, Vertex>> touched;
    for (const Action& a : actions) {
      for (Vertex v : g.neighbors(a.node)) {
        touched.emplace_back(std::min(a.node, v), std::max(a.node, v));
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    for (const auto& [s, t] : touched) {
      const EdgeState state = ClassifyEdge(g, before, s, t);
      if (!state.correct()) continue;
      const std::string where = "edge " + EdgeName(g, s, t) + " in " + ToString(state);

      for (Vertex u : {s, t}) {
        const Action* a = acted[u];
        if (a && (a->rule.kind == RuleKind::kSeduction ||
                  a->rule.kind == RuleKind::kMarriage || a->rule.kind == RuleKind::kReset)) {
          return Fail("closure", k, g.id(u), where + ": endpoint ran " + Describe(g, *a));
        }
      }
      const EdgeState next = ClassifyEdge(g, after, s, t);
      if (!next.correct()) {
        return Fail("closure", k, g.id(s), where + " left the correct states: " + ToString(next));
      }

      const ClosureRow* row = FindRow(state);
      if (!row || Quad(g, before, s, t) != row->before) {
        return Fail("closure", k, g.id(s), where + ": no matching closure table row");
      }
      if (RelevantEnabled(g, before, s, t) != row->s_rule ||
          RelevantEnabled(g, before, t, s) != row->t_rule) {
        return Fail("closure", k, g.id(s), where + ": relevant-rule eligibility differs from table");
      }
      const bool fired = RelevantExecuted(acted[s], t) != kNone ||
                         RelevantExecuted(acted[t], s) != kNone;
      if (fired && (Quad(g, after, s, t) != row->after || next.kind != row->after_kind)) {
        return Fail("closure", k, g.id(s),
                    where + ": successor " + ToString(next) + " differs from table");
      }
      if (!fired && next != state) {
        return Fail("closure", k, g.id(s), where + ": changed without a relevant rule");
      }
    }
    for (const Action& a : actions) acted[a.node] = nullptr;
  }
  return MonitorResult::Pass("closure");
}

std::vector<MonitorResult> CheckInterleavings(const Graph& g,
                                              const std::vector<Step>& steps) {
  const std::size_t seduction_cap = 2 * MaxDegree(g) + 3;
  MonitorResult m1 = MonitorResult::Pass("M1");
  MonitorResult m2 = MonitorResult::Pass("M2");
  MonitorResult m3 = MonitorResult::Pass("M3");
  MonitorResult m4 = MonitorResult::Pass("M4");

  struct MarriageTrack {
    std::size_t last = 0;  // step of t's last Marriage(s), 0 = none
    bool seduced = false;  // s ran Seduction(t) after it
  };
  std::map<std::pair<Vertex, Vertex>, MarriageTrack> marriages;  // key (t, s)
  std::map<std::pair<Vertex, Vertex>, std::size_t> seductions;   // key (s, t)

  struct NodeTrack {
    std::size_t last_reset = 0;
    std::size_t selections = 0;  // Seduction/Marriage since last_reset
    std::array<std::size_t, 2> increases{};  // previous two Increase steps
  };
  std::vector<NodeTrack> nodes(g.num_nodes());

  for (std::size_t k = 1; k <= steps.size(); ++k) {
    const auto& actions = steps[k - 1].actions;

    for (const Action& a : actions) {
      if (a.rule.kind != RuleKind::kMarriage || !m1.pass) continue;
      auto& track = marriages[{a.node, *a.rule.neighbor}];
      if (track.last != 0 && !track.seduced) {
        m1 = Fail("M1", k, g.id(a.node),
                  Describe(g, a) + " at steps " + std::to_string(track.last) + " and " +
                      std::to_string(k) + " with no Seduction(" +
                      std::to_string(g.id(a.node)) + ") by " +
                      std::to_string(g.id(*a.rule.neighbor)) + " in between");
      }
    }
    for (const Action& a : actions) {
      if (a.rule.kind == RuleKind::kMarriage) {
        marriages[{a.node, *a.rule.neighbor}] = {k, false};
      }
    }

    for (const Action& a : actions) {
      const Vertex u = a.node;
      NodeTrack& track = nodes[u];
      switch (a.rule.kind) {
        case RuleKind::kSeduction: {
          auto it = marriages.find({*a.rule.neighbor, u});
          if (it != marriages.end() && it->second.last < k) it->second.seduced = true;
          std::size_t count = ++seductions[{u, *a.rule.neighbor}];
          if (count > seduction_cap && m4.pass) {
            m4 = Fail("M4", k, g.id(u),
                      Describe(g, a) + " executed " + std::to_string(count) +
                          " times, above 2*Delta+3 = " + std::to_string(seduction_cap));
          }
          [[fallthrough]];
        }
        case RuleKind::kMarriage:
          if (track.last_reset != 0) ++track.selections;
          break;
        case RuleKind::kReset:
          if (track.last_reset != 0 && track.selections != 1 && m2.pass) {
            m2 = Fail("M2", k, g.id(u),
                      "Resets at steps " + std::to_string(track.last_reset) + " and " +
                          std::to_string(k) + " enclose " +
                          std::to_string(track.selections) +
                          " Seduction/Marriage moves (exactly-once reading fails; "
                          "at-least-once reading " +
                          (track.selections >= 1 ? "holds" : "fails") + ")");
          }
          track.last_reset = k;
          track.selections = 0;
          break;
        case RuleKind::kIncrease: {
          const std::size_t first = track.increases[0];
          if (first != 0 && track.last_reset <= first && m3.pass) {
            m3 = Fail("M3", k, g.id(u),
                      "Increases at steps " + std::to_string(first) + ", " +
                          std::to_string(track.increases[1]) + ", " + std::to_string(k) +
                          " with no Reset in between");
          }
          track.increases = {track.increases[1], k};
          break;
        }
        case RuleKind::kWrite:
          break;
      }
    }
  }
  return {m1, m2, m3, m4};
}

MonitorReport CheckTrace(const Graph& g, const Trace& trace) {
  MonitorReport report;
  report.results = CheckInterleavings(g, trace.steps);

  const Trace* full = &trace;
  Trace rebuilt;
  bool replayable = true;
  if (!trace.has_configurations()) {
    rebuilt = trace;
    try {
      ReconstructConfigurations(g, rebuilt);
      full = &rebuilt;
    } catch (const std::exception& e) {
      replayable = false;
      MonitorResult r;
      r.monitor = "replay";
      r.pass = false;
      if (auto* ee = dynamic_cast<const ExecutionError*>(&e)) r.step = ee->step();
      r.detail = e.what();
      report.results.push_back(r);
    }
  }
  if (!replayable) return report;

  report.results.push_back(CheckClosure(g, *full));

  const Configuration& last = full->configurations.back();
  MonitorResult stable = MonitorResult::Pass("stable-registers");
  MonitorResult legit = MonitorResult::Pass("legitimate");
  if (IsStable(g, last)) {
    if (!CheckStableRegisters(g, last)) {
      stable = Fail("stable-registers", full->steps.size(), 0,
                    "stable configuration with a stale register");
      stable.node.reset();
    }
    if (!IsLegitimate(g, last)) {
      legit = Fail("legitimate", full->steps.size(), 0,
                   "stable configuration is not a maximal matching");
      legit.node.reset();
    }
    for (const auto& [s, t] : MatchedPairs(g, last)) {
      EdgeState state = ClassifyEdge(g, last, s, t);
      if (state != EdgeState{EdgeState::Kind::kUpdatedCorrect, 2, 2} && legit.pass) {
        legit = Fail("legitimate", full->steps.size(), g.id(s),
                     "matched edge " + EdgeName(g, s, t) + " stable in " + ToString(state));
      }
    }
  }
  report.results.push_back(stable);
  report.results.push_back(legit);
  return report;
}

}  // namespace selfstab
