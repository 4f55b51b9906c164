#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "powl/behavior.hpp"
#include "powl/decompose.hpp"
#include "powl/model.hpp"
#include "powl/net.hpp"
#include "powl/preprocess.hpp"

namespace wfpowl {

/// Raised when a partition that passed its validity check yields a projection
/// breaking the projection contract. Points at a bug or an unsound input.
class InternalInvariant : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FallThroughPolicy { Fail };

struct ConversionOptions {
  bool preprocess = true;
  PreprocessRules rules{};
  /// Re-run preprocessing on every projection, not only at the root.
  bool preprocess_every_level = false;
  FallThroughPolicy fall_through_policy = FallThroughPolicy::Fail;
  /// Check every projection with validate_wf_net, check_safe and check_sound.
  bool verify_projections = false;
  bool reflexive_reach = true;
  CgAvoidance cg_avoidance = CgAvoidance::SharedBranchPlaces;
  std::size_t state_budget = kDefaultStateBudget;
};

/// Why one decomposition attempt was not taken.
struct AttemptDiagnostic {
  enum class Outcome { SinglePart, ConditionsViolated, NoProgress };
  Outcome outcome = Outcome::SinglePart;
  TransitionPartition partition;
  std::vector<ConditionViolation> violations;
  /// Part whose projection is isomorphic to the fragment (NoProgress).
  std::optional<std::size_t> stalled_part;

  std::string describe() const;
};

const char* to_string(AttemptDiagnostic::Outcome o);

struct ConversionFailure {
  WorkflowNet fragment;  // the irreducible sub-net
  AttemptDiagnostic partial_order;
  AttemptDiagnostic choice_graph;
  std::size_t depth = 0;

  std::string describe() const;
};

struct ConversionStats {
  std::size_t depth = 0;  // deepest recursion level reached
  std::size_t partial_orders = 0;
  std::size_t choice_graphs = 0;
  std::size_t leaves = 0;
  std::size_t projections_verified = 0;
  double wall_ms = 0.0;
};

struct ConversionReport {
  std::optional<PowlNode> model;
  std::optional<ConversionFailure> failure;
  ConversionStats stats;
  /// Net the recursion started from (after root-level preprocessing).
  std::optional<WorkflowNet> converted_net;

  bool success() const { return model.has_value(); }
};

/// The sole transition iff the net is source -> t -> sink and nothing else.
std::optional<std::string> is_base_case(const WorkflowNet& wf);

ConversionReport convert(const WorkflowNet& wf, const ConversionOptions& opts = {});

struct VerifiedConversion {
  ConversionReport report;
  /// Absent when conversion failed.
  std::optional<Equivalence> equivalence;
};

/// Converts, then compares the bounded languages of the input net and the
/// resulting model.
VerifiedConversion convert_and_verify(const WorkflowNet& wf, const ConversionOptions& opts,
                                      std::size_t max_len);

}  // namespace wfpowl
