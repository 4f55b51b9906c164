#include "powl/decompose.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>

namespace wfpowl {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  void unite_all(const std::vector<Index>& group) {
    for (std::size_t i = 1; i < group.size(); ++i) unite(group[0], group[i]);
  }

 private:
  std::vector<std::size_t> parent_;
};

TransitionPartition to_partition(const PetriNet& net, UnionFind& uf) {
  std::map<std::size_t, IdSet> parts;
  for (Index t = 0; t < net.transition_count(); ++t) parts[uf.find(t)].insert(net.transitions()[t]);
  std::vector<IdSet> out;
  for (auto& [root, part] : parts) out.push_back(std::move(part));
  return TransitionPartition(std::move(out));
}

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& b, Index i) { b[i >> 6] |= 1ULL << (i & 63); }
bool get_bit(const Bits& b, Index i) { return (b[i >> 6] >> (i & 63)) & 1U; }

// Transitions set in some row but not in all of them.
std::vector<Index> some_but_not_all(const std::vector<const Bits*>& rows, std::size_t n) {
  std::vector<Index> out;
  if (rows.empty()) return out;
  const std::size_t words = rows[0]->size();
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t any = 0, all = ~0ULL;
    for (const auto* r : rows) {
      any |= (*r)[w];
      all &= (*r)[w];
    }
    std::uint64_t diff = any & ~all;
    while (diff) {
      int bit = __builtin_ctzll(diff);
      Index t = static_cast<Index>(w * 64 + bit);
      if (t < n) out.push_back(t);
      diff &= diff - 1;
    }
  }
  return out;
}

// Restricted reachability as a bit row. forward: transitions reachable from
// place p; backward: transitions from which p is reachable.
// Transitions in `stop` are never fired; they are marked as seen up front.
Bits restricted_reach(const PetriNet& net, Index p, const Bits& stop, bool forward) {
  const std::size_t n = net.transition_count();
  Bits seen_t = stop;
  std::vector<bool> seen_p(net.place_count(), false);
  std::vector<Index> stack{p};
  seen_p[p] = true;
  while (!stack.empty()) {
    Index q = stack.back();
    stack.pop_back();
    for (Index t : forward ? net.place_post(q) : net.place_pre(q)) {
      if (get_bit(seen_t, t)) continue;
      set_bit(seen_t, t);
      for (Index r : forward ? net.transition_post(t) : net.transition_pre(t))
        if (!seen_p[r]) {
          seen_p[r] = true;
          stack.push_back(r);
        }
    }
  }
  for (std::size_t w = 0; w < seen_t.size(); ++w) seen_t[w] &= ~stop[w];
  return seen_t;
}

Bits restricted_reach(const PetriNet& net, Index p, Index stop, bool forward) {
  Bits s((net.transition_count() + 63) / 64, 0);
  set_bit(s, stop);
  return restricted_reach(net, p, s, forward);
}

// t itself, plus (when siblings is set) every transition that also produces
// into one of t's output places (forward) or consumes from one of its input
// places (backward).
Bits avoided(const PetriNet& net, Index t, bool forward, bool siblings) {
  Bits s((net.transition_count() + 63) / 64, 0);
  set_bit(s, t);
  if (siblings)
    for (Index p : forward ? net.transition_post(t) : net.transition_pre(t))
      for (Index u : forward ? net.place_pre(p) : net.place_post(p)) set_bit(s, u);
  return s;
}

IdSet to_ids(const PetriNet& net, const Bits& b) {
  IdSet out;
  for (Index t = 0; t < net.transition_count(); ++t)
    if (get_bit(b, t)) out.insert(net.transitions()[t]);
  return out;
}

}  // namespace

IdSet restricted_reach_fwd(const PetriNet& net, const std::string& p, const std::string& stop) {
  return to_ids(net, restricted_reach(net, net.place_index(p), net.transition_index(stop), true));
}

IdSet restricted_reach_bwd(const PetriNet& net, const std::string& p, const std::string& stop) {
  return to_ids(net, restricted_reach(net, net.place_index(p), net.transition_index(stop), false));
}

TransitionPartition po_partition(const WorkflowNet& wf, bool reflexive_reach) {
  const auto& net = wf.net();
  const std::size_t n = net.transition_count();
  ReachabilityMatrix reach(net, reflexive_reach);
  UnionFind uf(n);
  // XOR-splits: transitions reachable from some but not all successors.
  for (Index p = 0; p < net.place_count(); ++p) {
    auto post = net.place_post(p);
    if (post.size() <= 1) continue;
    std::vector<const Bits*> rows;
    for (Index t : post) rows.push_back(&reach.row(t));
    auto group = some_but_not_all(rows, n);
    if (group.size() > 1) uf.unite_all(group);
  }
  // XOR-joins: transitions reaching some but not all predecessors.
  for (Index p = 0; p < net.place_count(); ++p) {
    auto pre = net.place_pre(p);
    if (pre.size() <= 1) continue;
    std::vector<const Bits*> cols;
    for (Index t : pre) cols.push_back(&reach.column(t));
    auto group = some_but_not_all(cols, n);
    if (group.size() > 1) uf.unite_all(group);
  }
  return to_partition(net, uf);
}

// Boundary places of every union-find class, indexed by class root. Entries
// when `entries` is set, exits otherwise.
std::vector<std::vector<Index>> class_interfaces(const WorkflowNet& wf, UnionFind& uf,
                                                 bool entries) {
  const auto& net = wf.net();
  std::vector<std::vector<Index>> out(net.transition_count());
  const Index boundary = entries ? wf.source_index() : wf.sink_index();
  for (Index p = 0; p < net.place_count(); ++p) {
    auto inside = entries ? net.place_post(p) : net.place_pre(p);
    auto outside = entries ? net.place_pre(p) : net.place_post(p);
    std::set<std::size_t> roots;
    for (Index t : inside) roots.insert(uf.find(t));
    for (auto r : roots)
      if (p == boundary ||
          std::any_of(outside.begin(), outside.end(), [&](Index u) { return uf.find(u) != r; }))
        out[r].push_back(p);
  }
  return out;
}

// Shortest place-to-place distance from the source (forward) or to the sink.
std::vector<std::size_t> place_depth(const WorkflowNet& wf, bool from_source) {
  const auto& net = wf.net();
  const auto inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> d(net.place_count(), inf);
  std::deque<Index> queue{from_source ? wf.source_index() : wf.sink_index()};
  d[queue.front()] = 0;
  while (!queue.empty()) {
    Index p = queue.front();
    queue.pop_front();
    for (Index t : from_source ? net.place_post(p) : net.place_pre(p))
      for (Index q : from_source ? net.transition_post(t) : net.transition_pre(t))
        if (d[q] == inf) {
          d[q] = d[p] + 1;
          queue.push_back(q);
        }
  }
  return d;
}

// Merges every class having several entry places (exit places) with the
// producers (consumers) of its deepest such places, one layer at a time, until
// no class has more than one. Going deepest first keeps a region's own entry,
// which dominates the region, from being crossed before the others converge.
bool close_side(const WorkflowNet& wf, UnionFind& uf, bool entries) {
  const auto& net = wf.net();
  const auto depth = place_depth(wf, entries);
  bool any = false;
  for (bool changed = true; changed;) {
    changed = false;
    auto io = class_interfaces(wf, uf, entries);
    for (std::size_t r = 0; r < io.size(); ++r) {
      if (io[r].size() <= 1) continue;
      std::size_t deepest = 0;
      for (Index p : io[r]) deepest = std::max(deepest, depth[p]);
      for (Index p : io[r]) {
        if (depth[p] != deepest) continue;
        for (Index u : entries ? net.place_pre(p) : net.place_post(p))
          if (uf.find(u) != uf.find(r)) {
            uf.unite(u, r);
            changed = any = true;
          }
      }
      if (changed) break;  // interfaces are stale now
    }
  }
  return any;
}

void close_interfaces(const WorkflowNet& wf, UnionFind& uf, bool entries_first) {
  for (bool changed = true; changed;) {
    changed = close_side(wf, uf, entries_first);
    changed = close_side(wf, uf, !entries_first) || changed;
  }
}

TransitionPartition cg_partition(const WorkflowNet& wf, CgAvoidance avoidance) {
  const auto& net = wf.net();
  const std::size_t n = net.transition_count();
  UnionFind uf(n);
  for (bool forward : {true, false}) {
    for (Index t = 0; t < n; ++t) {
      auto branches = forward ? net.transition_post(t) : net.transition_pre(t);
      if (branches.size() <= 1) continue;
      auto stop = avoided(net, t, forward, avoidance == CgAvoidance::SharedBranchPlaces);
      std::vector<Bits> rows;
      for (Index p : branches) rows.push_back(restricted_reach(net, p, stop, forward));
      std::vector<const Bits*> ptrs;
      for (const auto& r : rows) ptrs.push_back(&r);
      auto group = some_but_not_all(ptrs, n);
      group.push_back(t);
      if (group.size() > 1) uf.unite_all(group);
    }
  }
  if (avoidance == CgAvoidance::SplitOnly) return to_partition(net, uf);
  // A concurrent region entered (left) through alternative transitions still
  // shows several entry (exit) places; pull the surrounding choice logic in.
  // Either side can cascade when closed first, so both orders are tried.
  std::optional<TransitionPartition> fallback;
  for (bool entries_first : {true, false}) {
    UnionFind closed = uf;
    close_interfaces(wf, closed, entries_first);
    auto g = to_partition(net, closed);
    if (g.size() > 1 && is_concurrency_hiding(wf, g).ok()) return g;
    if (!fallback) fallback = std::move(g);
  }
  return *fallback;
}

// ---------------------------------------------------------------------------

const char* to_string(PartitionCondition c) {
  switch (c) {
    case PartitionCondition::NoTopLevelXorSplit: return "no top-level XOR-splits";
    case PartitionCondition::NoTopLevelXorJoin: return "no top-level XOR-joins";
    case PartitionCondition::SingleEntry: return "single entry fragments";
    case PartitionCondition::SingleExit: return "single exit fragments";
    case PartitionCondition::NotSingleEntryExit: return "exactly one entry and one exit place";
  }
  return "?";
}

std::string ConditionViolation::describe(const TransitionPartition& g) const {
  std::string s = to_string(condition);
  s += " violated;";
  for (auto i : parts) {
    s += " part {";
    bool first = true;
    for (const auto& t : g.part(i)) {
      if (!first) s += ",";
      first = false;
      s += t;
    }
    s += "}";
  }
  if (!places.empty()) {
    s += " places";
    for (const auto& p : places) s += " " + p;
  }
  return s;
}

PartInterfaces part_interfaces(const WorkflowNet& wf, const TransitionPartition& g) {
  const auto& net = wf.net();
  std::vector<std::size_t> part(net.transition_count());
  for (Index t = 0; t < net.transition_count(); ++t) part[t] = g.part_of(net.transitions()[t]);
  PartInterfaces out;
  out.entries.resize(g.size());
  out.exits.resize(g.size());
  for (Index p = 0; p < net.place_count(); ++p) {
    const auto& id = net.places()[p];
    auto pre = net.place_pre(p), post = net.place_post(p);
    // p is an entry of part i if it feeds i and is the source or fed from outside i.
    for (Index t : post) {
      auto i = part[t];
      bool external = p == wf.source_index() ||
                      std::any_of(pre.begin(), pre.end(), [&](Index u) { return part[u] != i; });
      if (external) out.entries[i].insert(id);
    }
    for (Index t : pre) {
      auto i = part[t];
      bool external = p == wf.sink_index() ||
                      std::any_of(post.begin(), post.end(), [&](Index u) { return part[u] != i; });
      if (external) out.exits[i].insert(id);
    }
  }
  return out;
}

PartitionCheck is_conflict_hiding(const WorkflowNet& wf, const TransitionPartition& g) {
  const auto& net = wf.net();
  auto io = part_interfaces(wf, g);
  PartitionCheck check;
  for (const auto& p : net.places()) {
    std::vector<std::size_t> entering, leaving;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (io.entries[i].count(p)) entering.push_back(i);
      if (io.exits[i].count(p)) leaving.push_back(i);
    }
    if (entering.size() > 1)
      check.violations.push_back({PartitionCondition::NoTopLevelXorSplit, entering, {p}});
    if (leaving.size() > 1)
      check.violations.push_back({PartitionCondition::NoTopLevelXorJoin, leaving, {p}});
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto first_mismatch = [&](const IdSet& places) -> std::vector<std::string> {
      if (places.empty()) return {};
      const auto& ref = *places.begin();
      for (const auto& q : places)
        if (!places_equivalent(net, g.part(i), ref, q)) return {ref, q};
      return {};
    };
    if (auto w = first_mismatch(io.entries[i]); !w.empty())
      check.violations.push_back({PartitionCondition::SingleEntry, {i}, w});
    if (auto w = first_mismatch(io.exits[i]); !w.empty())
      check.violations.push_back({PartitionCondition::SingleExit, {i}, w});
  }
  return check;
}

PartitionCheck is_concurrency_hiding(const WorkflowNet& wf, const TransitionPartition& g) {
  auto io = part_interfaces(wf, g);
  PartitionCheck check;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (io.entries[i].size() == 1 && io.exits[i].size() == 1) continue;
    std::vector<std::string> places(io.entries[i].begin(), io.entries[i].end());
    places.push_back("|");
    places.insert(places.end(), io.exits[i].begin(), io.exits[i].end());
    check.violations.push_back({PartitionCondition::NotSingleEntryExit, {i}, places});
  }
  return check;
}

// ---------------------------------------------------------------------------

WorkflowNet normalize(const PetriNet& net, const std::string& p_s, const std::string& p_e,
                      FreshIds& ids) {
  NetBuilder b(net);
  std::string source = p_s, sink = p_e;
  if (!net.place_pre(net.place_index(p_s)).empty()) {
    source = ids.next("p");
    auto t = ids.next("t");
    b.place(source).transition(t).arc(source, t).arc(t, p_s);
  }
  if (!net.place_post(net.place_index(p_e)).empty()) {
    sink = ids.next("p");
    auto t = ids.next("t");
    b.place(sink).transition(t).arc(p_e, t).arc(t, sink);
  }
  auto check = validate_wf_net(b.build());
  if (!check)
    throw DecompositionError("normalized projection is not a workflow net: " +
                             check.diagnostic->message());
  if (check.net->source() != source || check.net->sink() != sink)
    throw DecompositionError("normalized projection has unexpected source/sink");
  return std::move(*check.net);
}

WorkflowNet normalize(const PetriNet& net, const std::string& p_s, const std::string& p_e) {
  FreshIds ids("_");
  ids.reserve(net);
  return normalize(net, p_s, p_e, ids);
}

WorkflowNet po_project(const WorkflowNet& wf, const IdSet& part, FreshIds& ids) {
  const auto& net = wf.net();
  IdSet entries = entry_points(wf, part), exits = exit_points(wf, part);
  IdSet kept;
  for (const auto& p : project_places(net, part))
    if (!entries.count(p) && !exits.count(p)) kept.insert(p);
  auto ps = ids.next("p"), pe = ids.next("p");

  NetBuilder b;
  for (const auto& p : kept) b.place(p);
  b.place(ps).place(pe);
  for (const auto& t : part) b.transition(t, net.label(t));
  for (const auto& a : project_flow(net, kept, part)) b.arc(a.source, a.target);
  for (const auto& a : net.arcs()) {
    // Arcs between part transitions and boundary places move to ps/pe.
    if (part.count(a.target)) {
      if (entries.count(a.source)) b.arc(ps, a.target);
      if (exits.count(a.source)) b.arc(pe, a.target);
    } else if (part.count(a.source)) {
      if (entries.count(a.target)) b.arc(a.source, ps);
      if (exits.count(a.target)) b.arc(a.source, pe);
    }
  }
  return normalize(b.build(), ps, pe, ids);
}

WorkflowNet po_project(const WorkflowNet& wf, const IdSet& part) {
  FreshIds ids("_");
  ids.reserve(wf.net());
  return po_project(wf, part, ids);
}

WorkflowNet cg_project(const WorkflowNet& wf, const IdSet& part, FreshIds& ids) {
  const auto& net = wf.net();
  IdSet entries = entry_points(wf, part), exits = exit_points(wf, part);
  if (entries.size() != 1 || exits.size() != 1)
    throw DecompositionError("choice graph projection needs exactly one entry and one exit");
  IdSet places = project_places(net, part);
  NetBuilder b;
  for (const auto& p : places) b.place(p);
  for (const auto& t : part) b.transition(t, net.label(t));
  for (const auto& a : project_flow(net, places, part)) b.arc(a.source, a.target);
  return normalize(b.build(), *entries.begin(), *exits.begin(), ids);
}

WorkflowNet cg_project(const WorkflowNet& wf, const IdSet& part) {
  FreshIds ids("_");
  ids.reserve(wf.net());
  return cg_project(wf, part, ids);
}

namespace {

bool shares_place(const IdSet& a, const IdSet& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& p) { return b.count(p) > 0; });
}

}  // namespace

OrderStruct execution_order(const WorkflowNet& wf, const TransitionPartition& g) {
  auto io = part_interfaces(wf, g);
  std::set<std::pair<std::size_t, std::size_t>> raw;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (shares_place(io.exits[i], io.entries[j])) {
        if (i == j)
          throw CyclicOrder("part " + std::to_string(i) + " feeds its own entry");
        raw.emplace(i, j);
      }
  try {
    return OrderStruct(g.size(), raw);
  } catch (const ModelError& e) {
    throw CyclicOrder(std::string("execution order is not a strict partial order: ") + e.what());
  }
}

ChoiceGraphStruct execution_flow(const WorkflowNet& wf, const TransitionPartition& g) {
  auto io = part_interfaces(wf, g);
  std::set<ChoiceGraphStruct::Edge> edges;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (io.entries[i].count(wf.source())) edges.emplace(ChoiceGraphStruct::kStart, long(i));
    if (io.exits[i].count(wf.sink())) edges.emplace(long(i), ChoiceGraphStruct::kEnd);
    for (std::size_t j = 0; j < g.size(); ++j)
      if (shares_place(io.exits[i], io.entries[j])) edges.emplace(long(i), long(j));
  }
  ChoiceGraphStruct cg(g.size(), std::move(edges));
  if (auto p = cg.problem()) throw InvalidFlowGraph("execution flow is not a choice graph: " + *p);
  return cg;
}

}  // namespace wfpowl
