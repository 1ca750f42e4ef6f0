#ifndef SELFSTAB_VERIFIER_HPP_
#define SELFSTAB_VERIFIER_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "selfstab/executor.hpp"
#include "selfstab/graph.hpp"
#include "selfstab/protocol.hpp"

namespace selfstab {

class VerifierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool IsStable(const Graph& g, const Configuration& c);

// Mutually pointing adjacent pairs, as (smaller, larger), ascending.
std::vector<std::pair<Vertex, Vertex>> MatchedPairs(const Graph& g,
                                                    const Configuration& c);

// Every non-null pointer is reciprocated and no two adjacent nodes are both
// single.
bool IsLegitimate(const Graph& g, const Configuration& c);

// Every register holds CorrectRegisterValue. Throws VerifierError if `c` is
// not stable.
bool CheckStableRegisters(const Graph& g, const Configuration& c);

// Classification of an edge (s, t), s < t. alpha = m_s, beta = m_t; both are
// meaningful only for matched kinds.
struct EdgeState {
  enum class Kind { kNotMatched, kMatchedNotCorrect, kUpdatedCorrect, kToUpdateCorrect };

  Kind kind = Kind::kNotMatched;
  Progress alpha = 0;
  Progress beta = 0;

  bool correct() const {
    return kind == Kind::kUpdatedCorrect || kind == Kind::kToUpdateCorrect;
  }
  friend bool operator==(const EdgeState&, const EdgeState&) = default;
};

std::string ToString(const EdgeState& state);

// Requires s < t and (s, t) ∈ E; throws VerifierError otherwise. The
// orientation is part of the contract: (You,0,1) can be correct, (You,1,0)
// never is.
EdgeState ClassifyEdge(const Graph& g, const Configuration& c, Vertex s, Vertex t);

struct MonitorResult {
  std::string monitor;
  bool pass = true;
  std::optional<std::size_t> step;  // 1-based step of the first violation
  std::optional<NodeId> node;
  std::string detail;

  static MonitorResult Pass(std::string monitor) {
    MonitorResult r;
    r.monitor = std::move(monitor);
    return r;
  }
};

struct MonitorReport {
  std::vector<MonitorResult> results;

  bool all_pass() const;
  const MonitorResult* find(const std::string& monitor) const;
};

// Correct edges stay correct, their endpoints never run Seduction, Marriage or
// Reset, and each transition out of a correct state follows the closure
// transition tables. Throws VerifierError if the trace carries no per-step
// configurations.
MonitorResult CheckClosure(const Graph& g, const Trace& trace);

// Four action-sequence monitors:
//   M1  between two Marriage(s) by t, s runs Seduction(t);
//   M2  between consecutive Resets by u, exactly one Seduction/Marriage by u;
//   M3  among three consecutive Increases by u, a Reset by u strictly inside;
//   M4  Seduction(t) by s at most 2Δ+3 times per pair s < t.
std::vector<MonitorResult> CheckInterleavings(const Graph& g,
                                              const std::vector<Step>& steps);

// Everything check-trace reports: M1-M4, closure (reconstructing
// configurations if needed and possible), and for a stable final
// configuration, legitimacy and register agreement.
MonitorReport CheckTrace(const Graph& g, const Trace& trace);

}  // namespace selfstab

#endif  // SELFSTAB_VERIFIER_HPP_
