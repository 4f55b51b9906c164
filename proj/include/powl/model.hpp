#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "powl/net.hpp"
#include "powl/traces.hpp"

namespace wfpowl {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict partial order over child indices 0..n-1.
class OrderStruct {
 public:
  OrderStruct() = default;
  /// Transitively closes `relation`; throws ModelError on cycles, self-pairs
  /// or out-of-range indices.
  OrderStruct(std::size_t n, const std::set<std::pair<std::size_t, std::size_t>>& relation);
  /// Stores the relation as given, for diagnosing malformed input.
  static OrderStruct unchecked(std::size_t n, std::set<std::pair<std::size_t, std::size_t>> rel);

  std::size_t size() const { return n_; }
  const std::set<std::pair<std::size_t, std::size_t>>& relation() const { return rel_; }
  bool precedes(std::size_t i, std::size_t j) const { return rel_.count({i, j}) > 0; }
  /// Transitive reduction of the relation.
  std::set<std::pair<std::size_t, std::size_t>> covering() const;
  /// Empty when the relation is a strict partial order over 0..n-1.
  std::optional<std::string> problem() const;

  bool operator==(const OrderStruct&) const = default;

 private:
  std::size_t n_ = 0;
  std::set<std::pair<std::size_t, std::size_t>> rel_;
};

/// Choice graph over child indices 0..n-1 plus the artificial start and end.
class ChoiceGraphStruct {
 public:
  static constexpr long kStart = -1;
  static constexpr long kEnd = -2;
  using Edge = std::pair<long, long>;

  ChoiceGraphStruct() = default;
  ChoiceGraphStruct(std::size_t n, std::set<Edge> edges) : n_(n), edges_(std::move(edges)) {}

  std::size_t size() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  bool has_edge(long from, long to) const { return edges_.count({from, to}) > 0; }
  std::vector<long> successors(long node) const;
  /// Empty when the graph satisfies every choice-graph invariant.
  std::optional<std::string> problem() const;

  bool operator==(const ChoiceGraphStruct&) const = default;

 private:
  std::size_t n_ = 0;
  std::set<Edge> edges_;
};

class PowlNode;

struct Leaf {
  std::string id;  // transition identity
  Label label;
  bool operator==(const Leaf&) const = default;
};

struct PartialOrderNode {
  OrderStruct order;
  std::vector<PowlNode> children;
  bool operator==(const PartialOrderNode&) const;
};

struct ChoiceGraphNode {
  ChoiceGraphStruct graph;
  std::vector<PowlNode> children;
  bool operator==(const ChoiceGraphNode&) const;
};

/// A POWL model: a leaf transition, a partial order or a choice graph.
class PowlNode {
 public:
  using Variant = std::variant<Leaf, PartialOrderNode, ChoiceGraphNode>;

  PowlNode(Leaf leaf) : v_(std::move(leaf)) {}
  PowlNode(PartialOrderNode po) : v_(std::move(po)) {}
  PowlNode(ChoiceGraphNode cg) : v_(std::move(cg)) {}

  static PowlNode leaf(std::string id, Label label) { return Leaf{std::move(id), std::move(label)}; }
  static PowlNode partial_order(OrderStruct order, std::vector<PowlNode> children) {
    return PartialOrderNode{std::move(order), std::move(children)};
  }
  static PowlNode choice_graph(ChoiceGraphStruct graph, std::vector<PowlNode> children) {
    return ChoiceGraphNode{std::move(graph), std::move(children)};
  }

  const Variant& get() const { return v_; }
  bool is_leaf() const { return std::holds_alternative<Leaf>(v_); }
  bool is_partial_order() const { return std::holds_alternative<PartialOrderNode>(v_); }
  bool is_choice_graph() const { return std::holds_alternative<ChoiceGraphNode>(v_); }
  const Leaf& as_leaf() const { return std::get<Leaf>(v_); }
  const PartialOrderNode& as_partial_order() const { return std::get<PartialOrderNode>(v_); }
  const ChoiceGraphNode& as_choice_graph() const { return std::get<ChoiceGraphNode>(v_); }
  /// Children of a composite; empty for leaves.
  const std::vector<PowlNode>& children() const;

  std::size_t leaf_count() const;
  std::size_t depth() const;

  bool operator==(const PowlNode&) const = default;

 private:
  Variant v_;
};

struct ModelCheck {
  bool ok = true;
  std::string violation;
  std::string path;  // e.g. "/2/0": child indices from the root
  explicit operator bool() const { return ok; }
};

/// Structural validation: order/graph invariants, child counts >= 2 matching
/// the structure, and unique leaf transition identities.
ModelCheck validate_powl(const PowlNode& model);

/// Index sequences of paths start -> ... -> end with at most max_path_len nodes.
std::set<std::vector<std::size_t>> paths_bounded(const ChoiceGraphStruct& cg,
                                                 std::size_t max_path_len);

/// Order-preserving shuffle of seqs under order (one sequence per child).
std::set<Trace> shuffle(const std::vector<Trace>& seqs, const OrderStruct& order);

class LanguageTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every trace of the model's language with length <= max_visible_len. If
/// trace_cap is given and some intermediate set exceeds it, throws
/// LanguageTooLarge.
TraceSet language_bounded(const PowlNode& model, std::size_t max_visible_len,
                          std::optional<std::size_t> trace_cap = std::nullopt);

/// Minimum visible trace length of the model's language.
std::size_t min_visible_length(const PowlNode& model);

/// Safe and sound WF-net with the same language. Leaves keep their transition
/// identities; added routing nodes are silent with fresh "_"-prefixed ids.
WorkflowNet powl_to_net(const PowlNode& model);

std::string describe(const PowlNode& model);

}  // namespace wfpowl
