#include "selfstab/protocol.hpp"

#include <algorithm>
#include <cstdio>

namespace selfstab {

int RegisterCode(RegisterValue r) { return static_cast<int>(r.p) * 3 + r.m; }

RegisterValue RegisterFromCode(int code) {
  return {static_cast<Pointing>(code / 3), static_cast<Progress>(code % 3)};
}

void ValidateConfiguration(const Graph& g, const Configuration& c) {
  if (c.nodes.size() != g.num_nodes()) {
    throw ProtocolError("configuration has " + std::to_string(c.nodes.size()) +
                        " node states, graph has " + std::to_string(g.num_nodes()) +
                        " nodes");
  }
  if (c.registers.size() != g.num_links()) {
    throw ProtocolError("configuration has " + std::to_string(c.registers.size()) +
                        " registers, graph has " + std::to_string(g.num_links()) +
                        " directed links");
  }
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    const NodeState& s = c.nodes[u];
    if (s.m > kMaxProgress) {
      throw ProtocolError("node " + std::to_string(g.id(u)) + ": m out of range");
    }
    if (s.p && (*s.p >= g.num_nodes() || !g.adjacent(u, *s.p))) {
      throw ProtocolError("node " + std::to_string(g.id(u)) +
                          ": p is not a neighbor");
    }
  }
  for (const RegisterValue& r : c.registers) {
    if (r.m > kMaxProgress || r.p > Pointing::kOther) {
      throw ProtocolError("register value out of range");
    }
  }
}

std::uint64_t Fingerprint(const Configuration& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      h ^= (word >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const NodeState& s : c.nodes) {
    mix(s.p ? *s.p : 0xffffffffULL, 4);
    mix(s.m, 1);
  }
  for (const RegisterValue& r : c.registers) mix(RegisterCode(r), 1);
  return h;
}

std::string FingerprintHex(const Configuration& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(Fingerprint(c)));
  return buf;
}

std::string_view RuleName(RuleKind kind) {
  switch (kind) {
    case RuleKind::kWrite: return "Write";
    case RuleKind::kSeduction: return "Seduction";
    case RuleKind::kMarriage: return "Marriage";
    case RuleKind::kIncrease: return "Increase";
    case RuleKind::kReset: return "Reset";
  }
  return "?";
}

RuleKind RuleKindFromName(std::string_view name) {
  for (RuleKind kind : kAllRuleKinds) {
    if (RuleName(kind) == name) return kind;
  }
  throw ProtocolError("unknown rule '" + std::string(name) + "'");
}

std::string Describe(const Graph& g, const Action& action) {
  std::string out = std::to_string(g.id(action.node)) + ":" +
                    std::string(RuleName(action.rule.kind));
  if (action.rule.neighbor) out += "(" + std::to_string(g.id(*action.rule.neighbor)) + ")";
  return out;
}

namespace {

RegisterValue CorrectValue(const NodeState& s, Vertex a) {
  if (!s.p) return {Pointing::kIdle, 0};
  if (*s.p == a) return {Pointing::kYou, s.m};
  return {Pointing::kOther, s.m};
}

// r_{p_u,u}: what u's partner candidate publishes towards u.
const RegisterValue& PartnerRegister(const Graph& g, const Configuration& c, Vertex u) {
  return c.registers[g.link(*c.nodes[u].p, u)];
}

bool OwnPartnerRegisterCorrect(const Graph& g, const Configuration& c, Vertex u) {
  Vertex p = *c.nodes[u].p;
  return c.registers[g.link(u, p)] == CorrectValue(c.nodes[u], p);
}

bool IncreaseCondition(const Graph& g, const Configuration& c, Vertex u) {
  const NodeState& s = c.nodes[u];
  const RegisterValue& r = PartnerRegister(g, c, u);
  if (r.p != Pointing::kYou) return false;
  const bool lower = u < *s.p;
  if (s.m == 0) return (lower && r.m == 1) || (!lower && r.m == 0);
  if (s.m == 1) return (lower && r.m == 1) || (!lower && r.m == 2);
  return false;
}

bool SelectionGuard(const Graph& g, const Configuration& c, Vertex u, Vertex a,
                    RegisterValue expected, bool want_lower) {
  const NodeState& s = c.nodes[u];
  if (s.p) return false;
  if ((u < a) != want_lower) return false;
  if (c.registers[g.link(u, a)] != CorrectValue(s, a)) return false;
  return c.registers[g.link(a, u)] == expected;
}

}  // namespace

RegisterValue CorrectRegisterValue(const Graph& g, const Configuration& c, Vertex u,
                                   Vertex a) {
  if (!g.adjacent(u, a)) {
    throw ProtocolError(std::to_string(g.id(a)) + " is not a neighbor of " +
                        std::to_string(g.id(u)));
  }
  return CorrectValue(c.nodes[u], a);
}

bool PrAbandonment(const Graph& g, const Configuration& c, Vertex u) {
  const NodeState& s = c.nodes[u];
  if (!s.p) return false;
  const RegisterValue& r = PartnerRegister(g, c, u);
  const bool higher = u > *s.p;
  if (r.p != Pointing::kYou && (higher || s.m != 0)) return true;
  return r == RegisterValue{Pointing::kOther, 2} && !higher;
}

bool PrReset(const Graph& g, const Configuration& c, Vertex u) {
  const NodeState& s = c.nodes[u];
  if (!s.p) return false;
  const RegisterValue& r = PartnerRegister(g, c, u);
  if (r.p != Pointing::kYou) return false;
  const bool lower = u < *s.p;
  const bool higher = !lower;
  const Progress mine = s.m;
  const Progress theirs = r.m;
  return (mine == 0 && theirs == 2) ||
         (mine == 2 && theirs == 0) ||
         (mine == 0 && theirs == 1 && higher) ||
         (mine == 1 && theirs == 0 && lower) ||
         (mine == 1 && theirs == 2 && lower) ||
         (mine == 2 && theirs == 1 && higher);
}

bool IsEnabled(const Graph& g, const Configuration& c, Vertex u, const Rule& rule) {
  if (TakesNeighbor(rule.kind) != rule.neighbor.has_value()) return false;
  if (rule.neighbor && !g.adjacent(u, *rule.neighbor)) return false;
  const NodeState& s = c.nodes[u];
  switch (rule.kind) {
    case RuleKind::kWrite: {
      Vertex a = *rule.neighbor;
      return c.registers[g.link(u, a)] != CorrectValue(s, a);
    }
    case RuleKind::kSeduction:
      return SelectionGuard(g, c, u, *rule.neighbor, {Pointing::kIdle, 0}, true);
    case RuleKind::kMarriage:
      return SelectionGuard(g, c, u, *rule.neighbor, {Pointing::kYou, 0}, false);
    case RuleKind::kIncrease:
      return s.p && OwnPartnerRegisterCorrect(g, c, u) && IncreaseCondition(g, c, u);
    case RuleKind::kReset:
      return s.p && OwnPartnerRegisterCorrect(g, c, u) &&
             (PrAbandonment(g, c, u) || PrReset(g, c, u));
  }
  return false;
}

std::vector<Rule> EnabledRules(const Graph& g, const Configuration& c, Vertex u) {
  std::vector<Rule> out;
  for (RuleKind kind : {RuleKind::kWrite, RuleKind::kSeduction, RuleKind::kMarriage}) {
    for (Vertex a : g.neighbors(u)) {
      Rule rule{kind, a};
      if (IsEnabled(g, c, u, rule)) out.push_back(rule);
    }
  }
  if (IsEnabled(g, c, u, Rule::Increase())) out.push_back(Rule::Increase());
  if (IsEnabled(g, c, u, Rule::Reset())) out.push_back(Rule::Reset());
  return out;
}

void ApplyAction(const Graph& g, const Configuration& source, const Action& action,
                 Configuration& target) {
  const Vertex u = action.node;
  NodeState& s = target.nodes[u];
  switch (action.rule.kind) {
    case RuleKind::kWrite: {
      Vertex a = *action.rule.neighbor;
      target.registers[g.link(u, a)] = CorrectValue(source.nodes[u], a);
      break;
    }
    case RuleKind::kSeduction:
    case RuleKind::kMarriage:
      s.p = *action.rule.neighbor;
      s.m = 0;
      break;
    case RuleKind::kIncrease:
      s.m = static_cast<Progress>(source.nodes[u].m + 1);
      break;
    case RuleKind::kReset:
      s.p.reset();
      s.m = 0;
      break;
  }
}

Configuration ApplyStepUnchecked(const Graph& g, const Configuration& c,
                                 std::span<const Action> actions) {
  Configuration next = c;
  for (const Action& action : actions) ApplyAction(g, c, action, next);
  return next;
}

Configuration ApplyStep(const Graph& g, const Configuration& c,
                        std::span<const Action> actions) {
  if (actions.empty()) throw ProtocolError("empty action set");
  std::vector<Vertex> seen;
  seen.reserve(actions.size());
  for (const Action& action : actions) {
    if (action.node >= g.num_nodes()) throw ProtocolError("action on unknown node");
    if (std::find(seen.begin(), seen.end(), action.node) != seen.end()) {
      throw ProtocolError("two actions for node " + std::to_string(g.id(action.node)));
    }
    seen.push_back(action.node);
    if (!IsEnabled(g, c, action.node, action.rule)) {
      throw ProtocolError("disabled action " + Describe(g, action));
    }
  }
  return ApplyStepUnchecked(g, c, actions);
}

}  // namespace selfstab
