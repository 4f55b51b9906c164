#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wfpowl {

/// Raised for structurally malformed nets (unknown nodes, id clashes, bad arcs).
class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A transition label: a visible activity name or the silent marker.
class Label {
 public:
  Label() = default;  // silent
  static Label silent() { return Label{}; }
  static Label activity(std::string name);

  bool is_silent() const { return !name_.has_value(); }
  /// Activity name; empty for the silent label.
  const std::string& name() const;
  std::string display() const { return is_silent() ? std::string{"tau"} : *name_; }

  auto operator<=>(const Label&) const = default;
  bool operator==(const Label&) const = default;

 private:
  std::optional<std::string> name_;
};

struct Arc {
  std::string source;
  std::string target;
  auto operator<=>(const Arc&) const = default;
  bool operator==(const Arc&) const = default;
};

using IdSet = std::set<std::string>;
using Index = std::uint32_t;

/// Immutable place/transition net. Identifiers are kept in ascending order, so
/// every dense index below doubles as the deterministic iteration order.
class PetriNet {
 public:
  PetriNet() = default;
  PetriNet(const IdSet& places, const std::map<std::string, Label>& transitions,
           const std::set<Arc>& arcs);

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<std::string>& transitions() const { return transitions_; }
  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  std::size_t arc_count() const { return arc_count_; }

  bool has_place(const std::string& id) const;
  bool has_transition(const std::string& id) const;
  bool has_node(const std::string& id) const { return has_place(id) || has_transition(id); }

  Index place_index(const std::string& id) const;
  Index transition_index(const std::string& id) const;

  const Label& label(Index t) const { return labels_[t]; }
  const Label& label(const std::string& t) const { return labels_[transition_index(t)]; }

  // Dense adjacency: place lists hold transition indices and vice versa.
  std::span<const Index> place_pre(Index p) const { return place_pre_[p]; }
  std::span<const Index> place_post(Index p) const { return place_post_[p]; }
  std::span<const Index> transition_pre(Index t) const { return trans_pre_[t]; }
  std::span<const Index> transition_post(Index t) const { return trans_post_[t]; }

  /// All arcs, sorted.
  std::set<Arc> arcs() const;
  std::map<std::string, Label> labeled_transitions() const;
  IdSet place_set() const { return {places_.begin(), places_.end()}; }

  bool operator==(const PetriNet& other) const;

 private:
  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::vector<Label> labels_;
  std::unordered_map<std::string, Index> place_idx_;
  std::unordered_map<std::string, Index> trans_idx_;
  std::vector<std::vector<Index>> place_pre_, place_post_, trans_pre_, trans_post_;
  std::size_t arc_count_ = 0;
};

struct WfCheck;

/// Petri net with a designated unique source and sink. Obtainable only through
/// validate_wf_net (or WorkflowNet::from), so every instance satisfies the
/// unique-source, unique-sink and connectivity clauses.
class WorkflowNet {
 public:
  static WorkflowNet from(PetriNet net);  // throws NetError with the diagnostic

  const PetriNet& net() const { return net_; }
  const std::string& source() const { return net_.places()[source_]; }
  const std::string& sink() const { return net_.places()[sink_]; }
  Index source_index() const { return source_; }
  Index sink_index() const { return sink_; }

 private:
  friend WfCheck validate_wf_net(PetriNet net);
  WorkflowNet(PetriNet net, Index source, Index sink)
      : net_(std::move(net)), source_(source), sink_(sink) {}

  PetriNet net_;
  Index source_ = 0;
  Index sink_ = 0;
};

enum class WfViolation { NoSource, MultipleSources, NoSink, MultipleSinks, DisconnectedNode };

const char* to_string(WfViolation v);

struct WfDiagnostic {
  WfViolation violation;
  std::vector<std::string> nodes;
  std::string message() const;
};

struct WfCheck {
  std::optional<WorkflowNet> net;
  std::optional<WfDiagnostic> diagnostic;
  explicit operator bool() const { return net.has_value(); }
};

WfCheck validate_wf_net(PetriNet net);

/// Multiset of places over a fixed net, stored densely by place index.
struct Marking {
  std::vector<std::uint8_t> tokens;

  static Marking single(std::size_t place_count, Index place);
  std::size_t total() const;
  bool operator==(const Marking&) const = default;
  /// Place id -> token count, only places with positive counts.
  std::map<std::string, int> as_multiset(const PetriNet& net) const;
  std::string to_string(const PetriNet& net) const;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept;
};

/// A partition of a transition set into disjoint non-empty parts. Parts are
/// ordered by their smallest member, members within a part ascending.
class TransitionPartition {
 public:
  TransitionPartition() = default;
  explicit TransitionPartition(std::vector<IdSet> parts);

  std::size_t size() const { return parts_.size(); }
  const std::vector<IdSet>& parts() const { return parts_; }
  const IdSet& part(std::size_t i) const { return parts_[i]; }
  /// Index of the part holding t; throws NetError for unknown transitions.
  std::size_t part_of(const std::string& t) const;
  const IdSet& part_containing(const std::string& t) const { return parts_[part_of(t)]; }

  bool operator==(const TransitionPartition& o) const { return parts_ == o.parts_; }

 private:
  std::vector<IdSet> parts_;
  std::map<std::string, std::size_t> lookup_;
};

// Structural notation.
IdSet preset(const PetriNet& net, const std::string& node);
IdSet postset(const PetriNet& net, const std::string& node);
IdSet project_places(const PetriNet& net, const IdSet& transitions);
std::set<Arc> project_flow(const PetriNet& net, const IdSet& places, const IdSet& transitions);

/// Dense transition reachability: row t holds every t' with a non-empty path
/// t -> ... -> t' (plus t itself when reflexive).
class ReachabilityMatrix {
 public:
  ReachabilityMatrix(const PetriNet& net, bool reflexive);
  bool reaches(Index from, Index to) const { return bit(rows_[from], to); }
  std::size_t size() const { return n_; }
  const std::vector<std::uint64_t>& row(Index t) const { return rows_[t]; }
  /// Same relation transposed: column(t) holds every t' with t' => t.
  const std::vector<std::uint64_t>& column(Index t) const { return cols_[t]; }

  static bool bit(const std::vector<std::uint64_t>& v, Index i) {
    return (v[i >> 6] >> (i & 63)) & 1U;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::uint64_t>> rows_, cols_;
};

std::set<std::pair<std::string, std::string>> transition_reachability(const PetriNet& net,
                                                                      bool reflexive);

IdSet entry_points(const WorkflowNet& wf, const IdSet& subset);
IdSet exit_points(const WorkflowNet& wf, const IdSet& subset);
bool places_equivalent(const PetriNet& net, const IdSet& subset, const std::string& p,
                       const std::string& q);

bool is_free_choice(const PetriNet& net);
bool is_state_machine(const PetriNet& net);
bool is_marked_graph(const PetriNet& net);

struct IsomorphismOptions {
  std::size_t node_budget = 2'000'000;
};

enum class IsoResult { Isomorphic, NotIsomorphic, BudgetExhausted };

IsoResult isomorphism(const PetriNet& a, const PetriNet& b, const IsomorphismOptions& opts = {});
/// BudgetExhausted is reported as false.
bool isomorphic(const PetriNet& a, const PetriNet& b);

/// Replaces transition t of host by the workflow net sub.
PetriNet substitute(const PetriNet& host, const std::string& t, const WorkflowNet& sub);

/// Mutable accumulator used by every construction in the library.
class NetBuilder {
 public:
  NetBuilder() = default;
  explicit NetBuilder(const PetriNet& net);

  NetBuilder& place(const std::string& id);
  NetBuilder& transition(const std::string& id, Label label = Label::silent());
  NetBuilder& arc(const std::string& from, const std::string& to);
  NetBuilder& remove_arc(const std::string& from, const std::string& to);
  /// Removes a node and all adjacent arcs.
  NetBuilder& remove(const std::string& id);

  bool has_node(const std::string& id) const {
    return places_.count(id) || transitions_.count(id);
  }
  PetriNet build() const { return PetriNet(places_, transitions_, arcs_); }

 private:
  IdSet places_;
  std::map<std::string, Label> transitions_;
  std::set<Arc> arcs_;
};

/// Deterministic generator of identifiers that avoid a set of reserved ones.
class FreshIds {
 public:
  FreshIds() = default;
  explicit FreshIds(std::string prefix) : prefix_(std::move(prefix)) {}

  void reserve(const std::string& id) { used_.insert(id); }
  void reserve(const PetriNet& net);
  /// Next unused "<prefix><kind><n>".
  std::string next(const std::string& kind);

 private:
  std::string prefix_ = "_";
  std::set<std::string> used_;
  std::map<std::string, std::size_t> counters_;
};

}  // namespace wfpowl
