#ifndef SELFSTAB_MODELCHECK_HPP_
#define SELFSTAB_MODELCHECK_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "selfstab/graph.hpp"
#include "selfstab/protocol.hpp"

namespace selfstab {

inline constexpr std::uint64_t kDefaultStateCap = 10'000'000;

class StateSpaceTooLarge : public std::runtime_error {
 public:
  explicit StateSpaceTooLarge(std::uint64_t projected);
  std::uint64_t projected() const { return projected_; }

 private:
  std::uint64_t projected_;
};

// Mixed-radix packing of configurations. Digits, least significant first:
// one per node in id order, then one per register in (u, v) order. A node
// digit is 0 for p = null (times m when not canonical), otherwise
// 1 + slot·3 + m in canonical mode, or (1 + slot)·3 + m otherwise, where slot
// is the position of p in the sorted neighbor list. A register digit is
// RegisterCode.
//
// Canonical mode pins m = 0 whenever p = null: no guard or effect reads m
// while p is null, and every rule that nulls p also zeroes m.
class StateCodec {
 public:
  StateCodec(const Graph& g, bool canonicalize_null_m,
             std::uint64_t cap = kDefaultStateCap);

  // Product of all radices; throws StateSpaceTooLarge above the cap (also on
  // overflow) at construction.
  std::uint64_t size() const { return size_; }
  bool canonical() const { return canonical_; }

  std::uint64_t Encode(const Configuration& c) const;
  Configuration Decode(std::uint64_t index) const;
  // False for configurations outside the encoded space (canonical mode with
  // p = null and m != 0).
  bool Representable(const Configuration& c) const;

 private:
  const Graph* graph_;
  bool canonical_;
  std::vector<std::uint64_t> radix_;
  std::uint64_t size_ = 1;
};

// Projected state count without building a codec.
std::uint64_t StateCount(const Graph& g, bool canonicalize_null_m);

// Every nonempty selection with at most one enabled rule per node, each
// applied to c. Result order follows a fixed odometer over eligible nodes.
std::vector<std::vector<Action>> AllSelections(const Graph& g, const Configuration& c);

// Explicit transition system over the whole configuration space.
struct TransitionSystem {
  std::uint64_t states = 0;
  std::vector<std::uint64_t> offsets;   // CSR, size states + 1
  std::vector<std::uint32_t> targets;
  std::vector<std::uint8_t> weights;   // |actions| of each transition

  std::uint64_t transitions() const { return targets.size(); }
};

TransitionSystem BuildTransitionSystem(const Graph& g, const StateCodec& codec,
                                       unsigned workers = 1);

struct CheckReport {
  std::uint64_t state_count = 0;
  std::uint64_t transition_count = 0;
  std::uint64_t sink_count = 0;
  bool has_cycle = false;
  bool all_sinks_legitimate = true;
  bool sinks_registers_correct = true;
  // Longest move-weighted path to a sink; set only when acyclic.
  std::optional<std::uint64_t> max_moves_to_stability;
  std::vector<Configuration> cycle_witness;   // closed walk, first == last
  std::optional<Configuration> bad_sink_witness;

  bool verified() const { return !has_cycle && all_sinks_legitimate && sinks_registers_correct; }
};

struct VerifyOptions {
  bool canonicalize_null_m = true;
  std::uint64_t state_cap = kDefaultStateCap;
  unsigned workers = 1;
};

// Throws StateSpaceTooLarge when the space exceeds the cap. A cycle is a
// reported falsification, not an exception.
CheckReport Verify(const Graph& g, const VerifyOptions& options = {});

class CyclicSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact worst-case number of moves an adversarial daemon can force on g from
// any start. Throws CyclicSystemError if some execution never terminates.
std::uint64_t LongestMovePath(const Graph& g, const VerifyOptions& options = {});

}  // namespace selfstab

#endif  // SELFSTAB_MODELCHECK_HPP_
