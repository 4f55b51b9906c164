#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "powl/model.hpp"
#include "powl/net.hpp"

namespace wfpowl {

/// A projection or composition contract was violated; indicates a bug or an
/// unsound input.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CyclicOrder : public DecompositionError {
 public:
  using DecompositionError::DecompositionError;
};

class InvalidFlowGraph : public DecompositionError {
 public:
  using DecompositionError::DecompositionError;
};

/// Transitions reachable from p along place/transition paths that never fire
/// `stop`.
IdSet restricted_reach_fwd(const PetriNet& net, const std::string& p, const std::string& stop);
/// Transitions from which p is reachable along paths that never fire `stop`.
IdSet restricted_reach_bwd(const PetriNet& net, const std::string& p, const std::string& stop);

/// Conflict-hiding partitioning. With reflexive_reach (the default) group
/// membership uses t =>* t' including t itself.
TransitionPartition po_partition(const WorkflowNet& wf, bool reflexive_reach = true);

/// Which transitions the restricted reachability of a split (join) avoids.
/// SplitOnly avoids the split itself. SharedBranchPlaces also avoids every
/// other producer of the split's output places (consumer of the join's input
/// places), so that a concurrent region entered through alternative splits on
/// a cycle is still recognized.
enum class CgAvoidance { SplitOnly, SharedBranchPlaces };

/// Concurrency-hiding partitioning.
TransitionPartition cg_partition(const WorkflowNet& wf,
                                 CgAvoidance avoidance = CgAvoidance::SharedBranchPlaces);

enum class PartitionCondition {
  NoTopLevelXorSplit,
  NoTopLevelXorJoin,
  SingleEntry,
  SingleExit,
  NotSingleEntryExit,  // concurrency-hiding requirement
};

const char* to_string(PartitionCondition c);

struct ConditionViolation {
  PartitionCondition condition;
  std::vector<std::size_t> parts;   // offending part indices
  std::vector<std::string> places;  // witness places
  std::string describe(const TransitionPartition& g) const;
};

struct PartitionCheck {
  std::vector<ConditionViolation> violations;
  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }
};

/// Boundary places of every part, computed in one pass.
struct PartInterfaces {
  std::vector<IdSet> entries;
  std::vector<IdSet> exits;
};
PartInterfaces part_interfaces(const WorkflowNet& wf, const TransitionPartition& g);

PartitionCheck is_conflict_hiding(const WorkflowNet& wf, const TransitionPartition& g);
PartitionCheck is_concurrency_hiding(const WorkflowNet& wf, const TransitionPartition& g);

/// Adds a fresh source (plus silent transition) before p_s when p_s has
/// producers, and a fresh sink after p_e when p_e has consumers.
WorkflowNet normalize(const PetriNet& net, const std::string& p_s, const std::string& p_e,
                      FreshIds& ids);
WorkflowNet normalize(const PetriNet& net, const std::string& p_s, const std::string& p_e);

WorkflowNet po_project(const WorkflowNet& wf, const IdSet& part, FreshIds& ids);
WorkflowNet po_project(const WorkflowNet& wf, const IdSet& part);
WorkflowNet cg_project(const WorkflowNet& wf, const IdSet& part, FreshIds& ids);
WorkflowNet cg_project(const WorkflowNet& wf, const IdSet& part);

/// Transitive closure of exit/entry sharing between parts; throws CyclicOrder.
OrderStruct execution_order(const WorkflowNet& wf, const TransitionPartition& g);
/// Throws InvalidFlowGraph when the result is not a choice graph.
ChoiceGraphStruct execution_flow(const WorkflowNet& wf, const TransitionPartition& g);

}  // namespace wfpowl
