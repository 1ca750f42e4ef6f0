#ifndef SELFSTAB_DAEMON_HPP_
#define SELFSTAB_DAEMON_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "selfstab/graph.hpp"
#include "selfstab/protocol.hpp"

namespace selfstab {

enum class DaemonKind { kAdversarialRandom, kSequential, kSynchronous, kGreedy };
enum class TieBreak { kFixedPriority, kUniformRandom };

using RulePriority = std::array<RuleKind, 5>;

// Greedy default: Resets and Seductions first, to stress convergence.
inline constexpr RulePriority kGreedyDefaultPriority = {
    RuleKind::kReset, RuleKind::kSeduction, RuleKind::kMarriage,
    RuleKind::kIncrease, RuleKind::kWrite};

struct DaemonSpec {
  DaemonKind kind = DaemonKind::kSequential;
  std::uint64_t seed = 0;
  double q = 0.5;  // adversarial-random inclusion probability, in (0, 1]
  TieBreak tie_break = TieBreak::kFixedPriority;
  RulePriority priority = kGreedyDefaultPriority;  // greedy only

  friend bool operator==(const DaemonSpec&, const DaemonSpec&) = default;
};

class DaemonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DaemonError if q is outside (0, 1] or priority is not a permutation.
void ValidateDaemonSpec(const DaemonSpec& spec);

std::string_view DaemonKindName(DaemonKind kind);  // "adv-random", ...
DaemonKind DaemonKindFromName(std::string_view name);
std::string_view TieBreakName(TieBreak tie_break);  // "fixed" | "random"
TieBreak TieBreakFromName(std::string_view name);

// Rule a node runs under FixedPriority: Reset > Increase > Marriage > Seduction
// > Write, lowest neighbor first within a kind. `enabled` must be nonempty.
Rule FixedPriorityChoice(std::span<const Rule> enabled);

// Throws ProtocolError unless `actions` is nonempty, names each node at most
// once, and holds only enabled actions.
void ValidateSelection(const Graph& g, const Configuration& c,
                       std::span<const Action> actions);

// A seeded scheduler. Each execution owns one; the generator state advances on
// every call, so a fixed (spec, configuration sequence) gives a fixed output.
class Daemon {
 public:
  explicit Daemon(DaemonSpec spec);

  const DaemonSpec& spec() const { return spec_; }

  // Throws DaemonError on a stable configuration. Actions come out sorted by
  // node.
  std::vector<Action> Select(const Graph& g, const Configuration& c);

 private:
  Rule PickRule(std::span<const Rule> enabled);
  Rule GreedyRule(std::span<const Rule> enabled);

  DaemonSpec spec_;
  std::mt19937_64 rng_;
};

}  // namespace selfstab

#endif  // SELFSTAB_DAEMON_HPP_
