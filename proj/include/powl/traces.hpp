#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wfpowl {

using Trace = std::vector<std::string>;

/// Finite set of visible traces, all of length <= bound.
struct TraceSet {
  std::set<Trace> traces;
  std::size_t bound = 0;

  std::size_t size() const { return traces.size(); }
  bool contains(const Trace& t) const { return traces.count(t) > 0; }
  /// Traces of length <= b (b larger than bound is clamped).
  TraceSet restricted(std::size_t b) const;
};

std::string to_string(const Trace& t);

struct Equivalence {
  bool equal = true;
  std::size_t bound = 0;
  /// First trace (in lexicographic order) present on exactly one side.
  std::optional<Trace> counterexample;
  /// True when the counterexample belongs to the left-hand set.
  bool counterexample_in_left = false;
};

/// Set equality after restricting both sides to min(a.bound, b.bound).
Equivalence bounded_equal(const TraceSet& a, const TraceSet& b);

}  // namespace wfpowl
