#ifndef SELFSTAB_PROTOCOL_HPP_
#define SELFSTAB_PROTOCOL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selfstab/graph.hpp"

namespace selfstab {

// Marriage-progress counter. Always in {0, 1, 2}.
using Progress = std::uint8_t;
inline constexpr Progress kMaxProgress = 2;

// p-field of a link register: what the writer's pointer says about the reader.
enum class Pointing : std::uint8_t { kIdle, kYou, kOther };

struct RegisterValue {
  Pointing p = Pointing::kIdle;
  Progress m = 0;

  friend bool operator==(const RegisterValue&, const RegisterValue&) = default;
};

inline constexpr int kRegisterDomainSize = 9;
// Bijection between RegisterValue and [0, 9): p * 3 + m.
int RegisterCode(RegisterValue r);
RegisterValue RegisterFromCode(int code);

struct NodeState {
  std::optional<Vertex> p;
  Progress m = 0;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

// Local variables of every node plus one register per directed link, indexed
// by the graph's LinkIndex.
struct Configuration {
  std::vector<NodeState> nodes;
  std::vector<RegisterValue> registers;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ProtocolError when `c` does not fit `g`: wrong sizes, a pointer to a
// non-neighbor, or a counter outside {0,1,2}.
void ValidateConfiguration(const Graph& g, const Configuration& c);

// 64-bit FNV-1a over a fixed byte layout of the configuration.
std::uint64_t Fingerprint(const Configuration& c);
std::string FingerprintHex(const Configuration& c);

enum class RuleKind : std::uint8_t { kWrite, kSeduction, kMarriage, kIncrease, kReset };
inline constexpr std::array<RuleKind, 5> kAllRuleKinds = {
    RuleKind::kWrite, RuleKind::kSeduction, RuleKind::kMarriage,
    RuleKind::kIncrease, RuleKind::kReset};

std::string_view RuleName(RuleKind kind);
// Throws ProtocolError on an unknown name.
RuleKind RuleKindFromName(std::string_view name);
inline bool TakesNeighbor(RuleKind kind) {
  return kind == RuleKind::kWrite || kind == RuleKind::kSeduction ||
         kind == RuleKind::kMarriage;
}

// Write/Seduction/Marriage carry the neighbor they concern; Increase and
// Reset carry nothing.
struct Rule {
  RuleKind kind = RuleKind::kWrite;
  std::optional<Vertex> neighbor;

  static Rule Write(Vertex a) { return {RuleKind::kWrite, a}; }
  static Rule Seduction(Vertex a) { return {RuleKind::kSeduction, a}; }
  static Rule Marriage(Vertex a) { return {RuleKind::kMarriage, a}; }
  static Rule Increase() { return {RuleKind::kIncrease, std::nullopt}; }
  static Rule Reset() { return {RuleKind::kReset, std::nullopt}; }

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Action {
  Vertex node = 0;
  Rule rule;

  friend bool operator==(const Action&, const Action&) = default;
};

std::string Describe(const Graph& g, const Action& action);

// The register value u should publish towards neighbor a.
// Throws ProtocolError if a is not a neighbor of u.
RegisterValue CorrectRegisterValue(const Graph& g, const Configuration& c,
                                   Vertex u, Vertex a);

bool PrAbandonment(const Graph& g, const Configuration& c, Vertex u);
bool PrReset(const Graph& g, const Configuration& c, Vertex u);

bool IsEnabled(const Graph& g, const Configuration& c, Vertex u, const Rule& rule);

// All rules whose guard holds for u, in the order Write, Seduction, Marriage
// (each by ascending neighbor), then Increase, then Reset.
std::vector<Rule> EnabledRules(const Graph& g, const Configuration& c, Vertex u);

// Effect of one action on a copy of the configuration it was selected in.
// Does not check the guard.
void ApplyAction(const Graph& g, const Configuration& source, const Action& action,
                 Configuration& target);

// Concurrent application of a daemon selection. Throws ProtocolError if the
// set is empty, names a node twice, or contains a disabled action.
Configuration ApplyStep(const Graph& g, const Configuration& c,
                        std::span<const Action> actions);

// Same as ApplyStep without the guard checks; for callers that generated the
// actions from EnabledRules.
Configuration ApplyStepUnchecked(const Graph& g, const Configuration& c,
                                 std::span<const Action> actions);

}  // namespace selfstab

#endif  // SELFSTAB_PROTOCOL_HPP_
