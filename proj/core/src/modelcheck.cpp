#include "selfstab/modelcheck.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "selfstab/verifier.hpp"

namespace selfstab {

StateSpaceTooLarge::StateSpaceTooLarge(std::uint64_t projected)
    : std::runtime_error("state space too large: projected " + std::to_string(projected) +
                         " states"),
      projected_(projected) {}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t NodeRadix(std::size_t degree, bool canonical) {
  return canonical ? 1 + 3 * degree : 3 * (1 + degree);
}

std::uint64_t SaturatingMul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

}  // namespace

std::uint64_t StateCount(const Graph& g, bool canonicalize_null_m) {
  std::uint64_t total = 1;
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    total = SaturatingMul(total, NodeRadix(g.degree(u), canonicalize_null_m));
  }
  for (LinkIndex e = 0; e < g.num_links(); ++e) {
    total = SaturatingMul(total, kRegisterDomainSize);
  }
  return total;
}

StateCodec::StateCodec(const Graph& g, bool canonicalize_null_m, std::uint64_t cap)
    : graph_(&g), canonical_(canonicalize_null_m) {
  size_ = StateCount(g, canonicalize_null_m);
  if (size_ > cap) throw StateSpaceTooLarge(size_);
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    radix_.push_back(NodeRadix(g.degree(u), canonical_));
  }
  radix_.insert(radix_.end(), g.num_links(), kRegisterDomainSize);
}

bool StateCodec::Representable(const Configuration& c) const {
  if (!canonical_) return true;
  return std::all_of(c.nodes.begin(), c.nodes.end(),
                     [](const NodeState& s) { return s.p || s.m == 0; });
}

std::uint64_t StateCodec::Encode(const Configuration& c) const {
  const Graph& g = *graph_;
  std::uint64_t index = 0;
  std::uint64_t scale = 1;
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    const NodeState& s = c.nodes[u];
    std::uint64_t digit;
    if (!s.p) {
      digit = canonical_ ? 0 : s.m;
    } else {
      std::uint64_t slot = g.link(u, *s.p) - g.first_link(u);
      digit = canonical_ ? 1 + slot * 3 + s.m : (1 + slot) * 3 + s.m;
    }
    index += digit * scale;
    scale *= radix_[u];
  }
  for (LinkIndex e = 0; e < g.num_links(); ++e) {
    index += static_cast<std::uint64_t>(RegisterCode(c.registers[e])) * scale;
    scale *= kRegisterDomainSize;
  }
  return index;
}

Configuration StateCodec::Decode(std::uint64_t index) const {
  const Graph& g = *graph_;
  Configuration c;
  c.nodes.resize(g.num_nodes());
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    std::uint64_t digit = index % radix_[u];
    index /= radix_[u];
    NodeState& s = c.nodes[u];
    if (canonical_) {
      if (digit > 0) {
        s.p = g.neighbors(u)[(digit - 1) / 3];
        s.m = static_cast<Progress>((digit - 1) % 3);
      }
    } else {
      if (digit >= 3) s.p = g.neighbors(u)[digit / 3 - 1];
      s.m = static_cast<Progress>(digit % 3);
    }
  }
  c.registers.resize(g.num_links());
  for (LinkIndex e = 0; e < g.num_links(); ++e) {
    c.registers[e] = RegisterFromCode(static_cast<int>(index % kRegisterDomainSize));
    index /= kRegisterDomainSize;
  }
  return c;
}

std::vector<std::vector<Action>> AllSelections(const Graph& g, const Configuration& c) {
  std::vector<Vertex> eligible;
  std::vector<std::vector<Rule>> rules;
  for (Vertex u = 0; u < g.num_nodes(); ++u) {
    auto enabled = EnabledRules(g, c, u);
    if (!enabled.empty()) {
      eligible.push_back(u);
      rules.push_back(std::move(enabled));
    }
  }
  std::vector<std::vector<Action>> out;
  if (eligible.empty()) return out;

  // Odometer digit i ranges over 0 (node idle) .. |rules[i]|.
  std::vector<std::size_t> choice(eligible.size(), 0);
  while (true) {
    std::size_t i = 0;
    while (i < choice.size() && choice[i] == rules[i].size()) choice[i++] = 0;
    if (i == choice.size()) break;
    ++choice[i];
    std::vector<Action> selection;
    for (std::size_t j = 0; j < eligible.size(); ++j) {
      if (choice[j] > 0) selection.push_back({eligible[j], rules[j][choice[j] - 1]});
    }
    out.push_back(std::move(selection));
  }
  return out;
}

TransitionSystem BuildTransitionSystem(const Graph& g, const StateCodec& codec,
                                       unsigned workers) {
  if (codec.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw StateSpaceTooLarge(codec.size());
  }
  const std::uint64_t n = codec.size();
  workers = std::max(1u, workers);

  struct Chunk {
    std::vector<std::uint32_t> counts;
    std::vector<std::uint32_t> targets;
    std::vector<std::uint8_t> weights;
  };
  std::vector<Chunk> chunks(workers);
  auto build = [&](unsigned w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    Chunk& chunk = chunks[w];
    chunk.counts.reserve(end - begin);
    for (std::uint64_t s = begin; s < end; ++s) {
      Configuration c = codec.Decode(s);
      auto selections = AllSelections(g, c);
      chunk.counts.push_back(static_cast<std::uint32_t>(selections.size()));
      for (const auto& actions : selections) {
        Configuration next = ApplyStepUnchecked(g, c, actions);
        chunk.targets.push_back(static_cast<std::uint32_t>(codec.Encode(next)));
        chunk.weights.push_back(static_cast<std::uint8_t>(actions.size()));
      }
    }
  };
  if (workers == 1) {
    build(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(build, w);
    for (auto& t : pool) t.join();
  }

  TransitionSystem ts;
  ts.states = n;
  ts.offsets.reserve(n + 1);
  ts.offsets.push_back(0);
  for (auto& chunk : chunks) {
    for (auto count : chunk.counts) ts.offsets.push_back(ts.offsets.back() + count);
    ts.targets.insert(ts.targets.end(), chunk.targets.begin(), chunk.targets.end());
    ts.weights.insert(ts.weights.end(), chunk.weights.begin(), chunk.weights.end());
    chunk = Chunk{};
  }
  return ts;
}

namespace {

constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();

struct SccResult {
  // States in the order Tarjan completes them; every state appears after all
  // states reachable from it when the system is acyclic.
  std::vector<std::uint32_t> finish_order;
  // Some nontrivial component or self-loop, if any.
  std::vector<std::uint32_t> cyclic_component;
};

SccResult Tarjan(const TransitionSystem& ts) {
  const std::uint64_t n = ts.states;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t v;
    std::uint64_t edge;
  };
  std::vector<Frame> call;
  SccResult result;
  result.finish_order.reserve(n);
  std::uint32_t counter = 0;

  for (std::uint64_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({static_cast<std::uint32_t>(root), ts.offsets[root]});
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<std::uint32_t>(root));
    on_stack[root] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      const std::uint32_t v = f.v;
      if (f.edge < ts.offsets[v + 1]) {
        const std::uint32_t w = ts.targets[f.edge++];
        if (w == v && result.cyclic_component.empty()) result.cyclic_component = {v};
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, ts.offsets[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::uint32_t> component;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
          result.finish_order.push_back(w);
        } while (w != v);
        if (component.size() > 1 && result.cyclic_component.empty()) {
          result.cyclic_component = std::move(component);
        }
      }
      call.pop_back();
      if (!call.empty()) {
        const std::uint32_t parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return result;
}

// Closed walk inside a strongly connected component, starting and ending at
// its first member.
std::vector<std::uint32_t> CycleWitness(const TransitionSystem& ts,
                                        std::vector<std::uint32_t> component) {
  std::sort(component.begin(), component.end());
  auto member = [&](std::uint32_t s) {
    return std::binary_search(component.begin(), component.end(), s);
  };
  const std::uint32_t root = component.front();
  std::vector<std::uint32_t> parent(component.size(), kUnvisited);
  auto slot = [&](std::uint32_t s) {
    return std::lower_bound(component.begin(), component.end(), s) - component.begin();
  };
  std::vector<std::uint32_t> queue{root};
  parent[slot(root)] = root;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t v = queue[head];
    for (std::uint64_t e = ts.offsets[v]; e < ts.offsets[v + 1]; ++e) {
      const std::uint32_t w = ts.targets[e];
      if (w == root) {
        std::vector<std::uint32_t> walk{root};
        for (std::uint32_t x = v; x != root; x = parent[slot(x)]) walk.push_back(x);
        walk.push_back(root);
        std::reverse(walk.begin(), walk.end());
        return walk;
      }
      if (member(w) && parent[slot(w)] == kUnvisited) {
        parent[slot(w)] = v;
        queue.push_back(w);
      }
    }
  }
  return {root, root};
}

}  // namespace

CheckReport Verify(const Graph& g, const VerifyOptions& options) {
  StateCodec codec(g, options.canonicalize_null_m, options.state_cap);
  TransitionSystem ts = BuildTransitionSystem(g, codec, options.workers);

  CheckReport report;
  report.state_count = ts.states;
  report.transition_count = ts.transitions();

  for (std::uint64_t s = 0; s < ts.states; ++s) {
    if (ts.offsets[s] != ts.offsets[s + 1]) continue;
    ++report.sink_count;
    Configuration c = codec.Decode(s);
    const bool legit = IsLegitimate(g, c);
    const bool registers = CheckStableRegisters(g, c);
    if ((!legit || !registers) && !report.bad_sink_witness) report.bad_sink_witness = c;
    report.all_sinks_legitimate = report.all_sinks_legitimate && legit;
    report.sinks_registers_correct = report.sinks_registers_correct && registers;
  }

  SccResult scc = Tarjan(ts);
  if (!scc.cyclic_component.empty()) {
    report.has_cycle = true;
    for (std::uint32_t s : CycleWitness(ts, scc.cyclic_component)) {
      report.cycle_witness.push_back(codec.Decode(s));
    }
    return report;
  }

  std::vector<std::uint64_t> longest(ts.states, 0);
  std::uint64_t best = 0;
  for (std::uint32_t v : scc.finish_order) {
    std::uint64_t here = 0;
    for (std::uint64_t e = ts.offsets[v]; e < ts.offsets[v + 1]; ++e) {
      here = std::max(here, ts.weights[e] + longest[ts.targets[e]]);
    }
    longest[v] = here;
    best = std::max(best, here);
  }
  report.max_moves_to_stability = best;
  return report;
}

std::uint64_t LongestMovePath(const Graph& g, const VerifyOptions& options) {
  CheckReport report = Verify(g, options);
  if (report.has_cycle) throw CyclicSystemError("transition system has a cycle");
  return *report.max_moves_to_stability;
}

}  // namespace selfstab
