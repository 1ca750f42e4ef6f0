#include "selfstab/daemon.hpp"

#include <algorithm>

namespace selfstab {

void ValidateDaemonSpec(const DaemonSpec& spec) {
  if (!(spec.q > 0.0 && spec.q <= 1.0)) {
    throw DaemonError("inclusion probability q must be in (0, 1]");
  }
  RulePriority sorted = spec.priority;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != kAllRuleKinds) {
    throw DaemonError("rule priority must list each rule kind exactly once");
  }
}

std::string_view DaemonKindName(DaemonKind kind) {
  switch (kind) {
    case DaemonKind::kAdversarialRandom: return "adv-random";
    case DaemonKind::kSequential: return "sequential";
    case DaemonKind::kSynchronous: return "synchronous";
    case DaemonKind::kGreedy: return "greedy";
  }
  return "?";
}

DaemonKind DaemonKindFromName(std::string_view name) {
  for (DaemonKind kind : {DaemonKind::kAdversarialRandom, DaemonKind::kSequential,
                          DaemonKind::kSynchronous, DaemonKind::kGreedy}) {
    if (DaemonKindName(kind) == name) return kind;
  }
  throw DaemonError("unknown daemon '" + std::string(name) + "'");
}

std::string_view TieBreakName(TieBreak tie_break) {
  return tie_break == TieBreak::kFixedPriority ? "fixed" : "random";
}

TieBreak TieBreakFromName(std::string_view name) {
  if (name == "fixed") return TieBreak::kFixedPriority;
  if (name == "random") return TieBreak::kUniformRandom;
  throw DaemonError("unknown tie-break '" + std::string(name) + "'");
}

namespace {

int FixedRank(RuleKind kind) {
  switch (kind) {
    case RuleKind::kReset: return 0;
    case RuleKind::kIncrease: return 1;
    case RuleKind::kMarriage: return 2;
    case RuleKind::kSeduction: return 3;
    case RuleKind::kWrite: return 4;
  }
  return 5;
}

}  // namespace

Rule FixedPriorityChoice(std::span<const Rule> enabled) {
  return *std::min_element(enabled.begin(), enabled.end(),
                           [](const Rule& a, const Rule& b) {
                             int ra = FixedRank(a.kind), rb = FixedRank(b.kind);
                             if (ra != rb) return ra < rb;
                             return a.neighbor < b.neighbor;
                           });
}

void ValidateSelection(const Graph& g, const Configuration& c,
                       std::span<const Action> actions) {
  if (actions.empty()) throw ProtocolError("daemon selected no action");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    for (std::size_t j = i + 1; j < actions.size(); ++j) {
      if (actions[i].node == actions[j].node) {
        throw ProtocolError("daemon selected two actions for node " +
                            std::to_string(g.id(actions[i].node)));
      }
    }
    if (!IsEnabled(g, c, actions[i].node, actions[i].rule)) {
      throw ProtocolError("daemon selected disabled action " + Describe(g, actions[i]));
    }
  }
}

Daemon::Daemon(DaemonSpec spec) : spec_(spec), rng_(spec.seed) {
  ValidateDaemonSpec(spec_);
}

Rule Daemon::PickRule(std::span<const Rule> enabled) {
  if (spec_.tie_break == TieBreak::kFixedPriority || enabled.size() == 1) {
    return FixedPriorityChoice(enabled);
  }
  std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
  return enabled[pick(rng_)];
}

Rule Daemon::GreedyRule(std::span<const Rule> enabled) {
  for (RuleKind kind : spec_.priority) {
    std::vector<Rule> same;
    for (const Rule& r : enabled) {
      if (r.kind == kind) same.push_back(r);
    }
    if (!same.empty()) return PickRule(same);
  }
  return enabled.front();
}

std::vector<Action> Daemon::Select(const Graph& g, const Configuration& c) {
  std::vector<Vertex> eligible;
  std::vector<std::vector<Rule>> rules;
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    auto enabled = EnabledRules(g, c, u);
    if (!enabled.empty()) {
      eligible.push_back(u);
      rules.push_back(std::move(enabled));
    }
  }
  if (eligible.empty()) throw DaemonError("no node is eligible: configuration is stable");

  std::vector<Action> out;
  switch (spec_.kind) {
    case DaemonKind::kSequential: {
      std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
      std::size_t i = pick(rng_);
      out.push_back({eligible[i], PickRule(rules[i])});
      break;
    }
    case DaemonKind::kSynchronous:
      for (std::size_t i = 0; i < eligible.size(); ++i) {
        out.push_back({eligible[i], PickRule(rules[i])});
      }
      break;
    case DaemonKind::kGreedy:
      for (std::size_t i = 0; i < eligible.size(); ++i) {
        out.push_back({eligible[i], GreedyRule(rules[i])});
      }
      break;
    case DaemonKind::kAdversarialRandom: {
      std::bernoulli_distribution include(spec_.q);
      std::vector<bool> chosen(eligible.size());
      bool any = false;
      for (std::size_t i = 0; i < eligible.size(); ++i) {
        chosen[i] = include(rng_);
        any = any || chosen[i];
      }
      if (!any) {
        std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
        chosen[pick(rng_)] = true;
      }
      for (std::size_t i = 0; i < eligible.size(); ++i) {
        if (chosen[i]) out.push_back({eligible[i], PickRule(rules[i])});
      }
      break;
    }
  }
  return out;
}

}  // namespace selfstab
