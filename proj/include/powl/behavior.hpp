#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "powl/net.hpp"
#include "powl/traces.hpp"

namespace wfpowl {

class BehaviorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotEnabled : public BehaviorError {
 public:
  using BehaviorError::BehaviorError;
};

class BudgetExceeded : public BehaviorError {
 public:
  using BehaviorError::BehaviorError;
};

inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

std::vector<Index> enabled(const PetriNet& net, const Marking& m);
IdSet enabled_ids(const PetriNet& net, const Marking& m);
Marking fire(const PetriNet& net, const Marking& m, Index t);
Marking fire(const PetriNet& net, const Marking& m, const std::string& t);

enum class Truncation { None, Budget, Unsafe };

struct ReachabilityGraph {
  struct Edge {
    std::size_t from;
    Index transition;
    std::size_t to;
  };
  /// states[0] is the initial marking.
  std::vector<Marking> states;
  std::vector<Edge> edges;
  Truncation truncated = Truncation::None;
  /// Marking with a place holding two tokens, and the firing sequence to it.
  std::optional<Marking> unsafe_witness;
  std::vector<std::string> witness_sequence;

  const Marking& initial() const { return states.front(); }
  bool complete() const { return truncated == Truncation::None; }
};

/// Breadth-first exploration from [source]. Stops at the first marking that
/// puts two tokens in a place or once state_budget markings are stored.
ReachabilityGraph reachability_graph(const WorkflowNet& wf,
                                     std::size_t state_budget = kDefaultStateBudget);

enum class Verdict { Yes, No, Unknown };

struct SafetyVerdict {
  Verdict status = Verdict::Unknown;
  std::optional<Marking> witness;
  std::vector<std::string> firing_sequence;
  bool safe() const { return status == Verdict::Yes; }
};

SafetyVerdict check_safe(const WorkflowNet& wf, std::size_t state_budget = kDefaultStateBudget);

enum class SoundnessClause { None, DeadTransition, OptionToComplete, ProperCompletion };
const char* to_string(SoundnessClause c);

struct SoundnessVerdict {
  Verdict status = Verdict::Unknown;
  SoundnessClause violated = SoundnessClause::None;
  std::string witness;  // transition id or marking
  std::string reason;   // for Unknown verdicts
  bool sound() const { return status == Verdict::Yes; }
};

SoundnessVerdict check_sound(const WorkflowNet& wf,
                             std::size_t state_budget = kDefaultStateBudget);

/// Exact set of visible traces of length <= max_visible_len of complete runs
/// [source] -> [sink]. The net must be safe. Throws BudgetExceeded if the
/// reachability graph does not fit in state_budget.
TraceSet enumerate_language(const WorkflowNet& wf, std::size_t max_visible_len,
                            std::size_t state_budget = kDefaultStateBudget);

}  // namespace wfpowl
