#pragma once

#include <string>

#include "powl/net.hpp"

namespace wfpowl {

struct Rewrite {
  WorkflowNet net;
  bool changed = false;
};

/// Keeps one place (smallest id) of every group sharing both pre- and post-set.
Rewrite remove_duplicate_places(const WorkflowNet& wf);

/// For a maximal bundle Q of places with one common non-empty pre-set, where
/// some transition consumes all of Q and another consumes only part of it:
/// producers mark a fresh place instead, full consumers take that place, and a
/// fresh silent transition distributes it over Q for the partial consumers.
Rewrite introduce_xor_split_places(const WorkflowNet& wf);
Rewrite introduce_xor_split_places(const WorkflowNet& wf, FreshIds& ids);

/// Mirror of the split rule over bundles with a common non-empty post-set.
Rewrite introduce_xor_join_places(const WorkflowNet& wf);
Rewrite introduce_xor_join_places(const WorkflowNet& wf, FreshIds& ids);

struct PreprocessRules {
  bool duplicates = true;
  bool xor_splits = true;
  bool xor_joins = true;

  static PreprocessRules none() { return {false, false, false}; }
  /// Comma-separated subset of "dup,split,join"; throws std::invalid_argument.
  static PreprocessRules parse(const std::string& list);
};

struct PreprocessResult {
  WorkflowNet net;
  std::size_t passes = 0;
  bool hit_iteration_cap = false;
};

/// Applies the enabled rules round-robin (duplicates, split, join) until a
/// full pass changes nothing, for at most |P| + |T| passes.
PreprocessResult preprocess_net(const WorkflowNet& wf, const PreprocessRules& rules = {});
/// Same, drawing new node ids from `ids` (which must already reserve the net's ids).
PreprocessResult preprocess_net(const WorkflowNet& wf, const PreprocessRules& rules, FreshIds& ids);

inline WorkflowNet preprocess(const WorkflowNet& wf, const PreprocessRules& rules = {}) {
  return preprocess_net(wf, rules).net;
}

}  // namespace wfpowl
