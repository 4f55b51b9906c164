#include "powl/model.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace wfpowl {

using IndexPair = std::pair<std::size_t, std::size_t>;

OrderStruct::OrderStruct(std::size_t n, const std::set<IndexPair>& relation) : n_(n) {
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
  for (auto [i, j] : relation) {
    if (i >= n || j >= n) throw ModelError("order index out of range");
    if (i == j) throw ModelError("order relation is not irreflexive at " + std::to_string(i));
    m[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (m[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (m[k][j]) m[i][j] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i][i]) throw ModelError("order relation is cyclic through " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j)
      if (m[i][j]) rel_.emplace(i, j);
  }
}

OrderStruct OrderStruct::unchecked(std::size_t n, std::set<IndexPair> rel) {
  OrderStruct o;
  o.n_ = n;
  o.rel_ = std::move(rel);
  return o;
}

std::set<IndexPair> OrderStruct::covering() const {
  std::set<IndexPair> out;
  for (auto [i, j] : rel_) {
    bool implied = false;
    for (std::size_t k = 0; k < n_ && !implied; ++k)
      implied = precedes(i, k) && precedes(k, j);
    if (!implied) out.emplace(i, j);
  }
  return out;
}

std::optional<std::string> OrderStruct::problem() const {
  for (auto [i, j] : rel_) {
    if (i >= n_ || j >= n_) return "order index out of range";
    if (i == j) return "order is not irreflexive at " + std::to_string(i);
  }
  for (auto [i, j] : rel_)
    for (std::size_t k = 0; k < n_; ++k)
      if (precedes(j, k) && !precedes(i, k))
        return "order is not transitive: " + std::to_string(i) + "<" + std::to_string(j) + "<" +
               std::to_string(k);
  return std::nullopt;
}

std::vector<long> ChoiceGraphStruct::successors(long node) const {
  std::vector<long> out;
  for (auto it = edges_.lower_bound({node, std::numeric_limits<long>::min()});
       it != edges_.end() && it->first == node; ++it)
    out.push_back(it->second);
  return out;
}

std::optional<std::string> ChoiceGraphStruct::problem() const {
  const long n = static_cast<long>(n_);
  auto name = [](long v) {
    return v == kStart ? std::string("start") : v == kEnd ? std::string("end") : std::to_string(v);
  };
  for (auto [u, v] : edges_) {
    if (u == kEnd) return "end node has an outgoing edge";
    if (v == kStart) return "start node has an incoming edge";
    if (u == kStart && v == kEnd) return "direct start->end edge";
    if ((u != kStart && (u < 0 || u >= n)) || (v != kEnd && (v < 0 || v >= n)))
      return "edge endpoint out of range: " + name(u) + "->" + name(v);
  }
  // Nodes 0..n-1, start = n, end = n+1 for the searches below.
  auto slot = [&](long v) { return v == kStart ? n_ : v == kEnd ? n_ + 1 : std::size_t(v); };
  std::vector<std::vector<std::size_t>> fwd(n_ + 2), bwd(n_ + 2);
  for (auto [u, v] : edges_) {
    fwd[slot(u)].push_back(slot(v));
    bwd[slot(v)].push_back(slot(u));
  }
  auto reach = [&](std::size_t from, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<bool> seen(n_ + 2, false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      for (auto y : adj[x])
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
    }
    return seen;
  };
  auto from_start = reach(n_, fwd);
  auto to_end = reach(n_ + 1, bwd);
  for (std::size_t v = 0; v < n_; ++v)
    if (!from_start[v] || !to_end[v])
      return "node " + std::to_string(v) + " is not on a start-to-end path";
  if (!from_start[n_ + 1]) return "end is unreachable from start";
  return std::nullopt;
}

bool PartialOrderNode::operator==(const PartialOrderNode& o) const {
  return order == o.order && children == o.children;
}

bool ChoiceGraphNode::operator==(const ChoiceGraphNode& o) const {
  return graph == o.graph && children == o.children;
}

const std::vector<PowlNode>& PowlNode::children() const {
  static const std::vector<PowlNode> none;
  if (auto* po = std::get_if<PartialOrderNode>(&v_)) return po->children;
  if (auto* cg = std::get_if<ChoiceGraphNode>(&v_)) return cg->children;
  return none;
}

std::size_t PowlNode::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : children()) n += c.leaf_count();
  return n;
}

std::size_t PowlNode::depth() const {
  std::size_t d = 0;
  for (const auto& c : children()) d = std::max(d, c.depth());
  return is_leaf() ? 1 : d + 1;
}

// ---------------------------------------------------------------------------

ModelCheck validate_powl(const PowlNode& model) {
  ModelCheck result;
  std::set<std::string> ids;
  std::function<bool(const PowlNode&, const std::string&)> visit =
      [&](const PowlNode& node, const std::string& path) {
        auto fail = [&](std::string why) {
          result.ok = false;
          result.violation = std::move(why);
          result.path = path.empty() ? "/" : path;
          return false;
        };
        if (node.is_leaf()) {
          const auto& leaf = node.as_leaf();
          if (leaf.id.empty()) return fail("leaf without transition identity");
          if (!ids.insert(leaf.id).second) return fail("duplicate transition identity " + leaf.id);
          return true;
        }
        const auto& kids = node.children();
        if (kids.size() < 2) return fail("composite node with fewer than two children");
        if (node.is_partial_order()) {
          const auto& order = node.as_partial_order().order;
          if (order.size() != kids.size()) return fail("order arity does not match children");
          if (auto p = order.problem()) return fail(*p);
        } else {
          const auto& graph = node.as_choice_graph().graph;
          if (graph.size() != kids.size()) return fail("graph arity does not match children");
          if (auto p = graph.problem()) return fail(*p);
        }
        for (std::size_t i = 0; i < kids.size(); ++i)
          if (!visit(kids[i], path + "/" + std::to_string(i))) return false;
        return true;
      };
  visit(model, "");
  return result;
}

std::set<std::vector<std::size_t>> paths_bounded(const ChoiceGraphStruct& cg,
                                                 std::size_t max_path_len) {
  std::set<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  std::function<void(long)> walk = [&](long node) {
    for (long next : cg.successors(node)) {
      if (next == ChoiceGraphStruct::kEnd) {
        if (!path.empty()) out.insert(path);
        continue;
      }
      if (path.size() == max_path_len) continue;
      path.push_back(static_cast<std::size_t>(next));
      walk(next);
      path.pop_back();
    }
  };
  walk(ChoiceGraphStruct::kStart);
  return out;
}

namespace {

void shuffle_into(const std::vector<Trace>& seqs, const OrderStruct& order,
                  std::vector<std::size_t>& pos, Trace& acc, std::size_t total,
                  std::set<Trace>& out) {
  if (acc.size() == total) {
    out.insert(acc);
    return;
  }
  const std::size_t n = seqs.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (pos[j] == seqs[j].size()) continue;
    bool ready = true;
    for (std::size_t i = 0; i < n && ready; ++i)
      if (order.precedes(i, j) && pos[i] < seqs[i].size()) ready = false;
    if (!ready) continue;
    acc.push_back(seqs[j][pos[j]++]);
    shuffle_into(seqs, order, pos, acc, total, out);
    --pos[j];
    acc.pop_back();
  }
}

}  // namespace

std::set<Trace> shuffle(const std::vector<Trace>& seqs, const OrderStruct& order) {
  if (seqs.size() != order.size())
    throw ModelError("shuffle arity mismatch: " + std::to_string(seqs.size()) + " sequences, order over " +
                     std::to_string(order.size()));
  std::size_t total = 0;
  for (const auto& s : seqs) total += s.size();
  std::vector<std::size_t> pos(seqs.size(), 0);
  Trace acc;
  std::set<Trace> out;
  shuffle_into(seqs, order, pos, acc, total, out);
  return out;
}

std::size_t min_visible_length(const PowlNode& model) {
  if (model.is_leaf()) return model.as_leaf().label.is_silent() ? 0 : 1;
  const auto& kids = model.children();
  std::vector<std::size_t> w;
  for (const auto& k : kids) w.push_back(min_visible_length(k));
  if (model.is_partial_order()) return std::accumulate(w.begin(), w.end(), std::size_t{0});
  // Shortest node-weighted start-to-end path (Bellman-Ford over n nodes).
  const auto& g = model.as_choice_graph().graph;
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(kids.size(), inf);
  for (long v : g.successors(ChoiceGraphStruct::kStart)) dist[v] = w[v];
  for (std::size_t round = 0; round < kids.size(); ++round)
    for (auto [u, v] : g.edges())
      if (u >= 0 && v >= 0 && dist[u] != inf && dist[u] + w[v] < dist[v]) dist[v] = dist[u] + w[v];
  std::size_t best = inf;
  for (std::size_t v = 0; v < kids.size(); ++v)
    if (g.has_edge(static_cast<long>(v), ChoiceGraphStruct::kEnd)) best = std::min(best, dist[v]);
  return best;
}

namespace {

class BoundedLanguage {
 public:
  BoundedLanguage(std::size_t bound, std::optional<std::size_t> cap) : bound_(bound), cap_(cap) {}

  std::set<Trace> of(const PowlNode& node) {
    if (node.is_leaf()) {
      const auto& l = node.as_leaf().label;
      if (l.is_silent()) return {Trace{}};
      if (bound_ == 0) return {};
      return {Trace{l.name()}};
    }
    std::vector<std::set<Trace>> langs;
    for (const auto& c : node.children()) langs.push_back(of(c));
    auto result = node.is_partial_order() ? partial_order(node.as_partial_order().order, langs)
                                          : choice_graph(node.as_choice_graph().graph, langs);
    check(result);
    return result;
  }

 private:
  void check(const std::set<Trace>& s) const {
    if (cap_ && s.size() > *cap_)
      throw LanguageTooLarge("bounded language exceeds " + std::to_string(*cap_) + " traces");
  }

  std::set<Trace> partial_order(const OrderStruct& order, const std::vector<std::set<Trace>>& langs) {
    const std::size_t n = langs.size();
    // Shortest trace of children i.. onwards, to prune combinations early.
    std::vector<std::size_t> min_rest(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
      if (langs[i].empty()) return {};
      std::size_t m = std::numeric_limits<std::size_t>::max();
      for (const auto& t : langs[i]) m = std::min(m, t.size());
      min_rest[i] = min_rest[i + 1] + m;
    }
    std::set<Trace> out;
    std::vector<Trace> pick(n);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t i, std::size_t used) {
      if (i == n) {
        auto s = shuffle(pick, order);
        out.insert(s.begin(), s.end());
        check(out);
        return;
      }
      for (const auto& t : langs[i]) {
        if (used + t.size() + min_rest[i + 1] > bound_) continue;
        pick[i] = t;
        choose(i + 1, used + t.size());
      }
    };
    choose(0, 0);
    return out;
  }

  // Least fixpoint of suffix languages: suffix[v] = L(child v) . U suffix[w]
  // over successors w, truncated to the bound; suffix[end] = {<>}.
  std::set<Trace> choice_graph(const ChoiceGraphStruct& g, const std::vector<std::set<Trace>>& langs) {
    const std::size_t n = langs.size();
    std::vector<std::set<Trace>> suffix(n);
    auto successors_union = [&](long node) {
      std::set<Trace> u;
      for (long w : g.successors(node)) {
        if (w == ChoiceGraphStruct::kEnd)
          u.insert(Trace{});
        else
          u.insert(suffix[w].begin(), suffix[w].end());
      }
      return u;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t v = 0; v < n; ++v) {
        auto tails = successors_union(static_cast<long>(v));
        for (const auto& head : langs[v])
          for (const auto& tail : tails) {
            if (head.size() + tail.size() > bound_) continue;
            Trace t = head;
            t.insert(t.end(), tail.begin(), tail.end());
            if (suffix[v].insert(std::move(t)).second) changed = true;
          }
        check(suffix[v]);
      }
    }
    return successors_union(ChoiceGraphStruct::kStart);
  }

  std::size_t bound_;
  std::optional<std::size_t> cap_;
};

}  // namespace

TraceSet language_bounded(const PowlNode& model, std::size_t max_visible_len,
                          std::optional<std::size_t> trace_cap) {
  TraceSet out;
  out.bound = max_visible_len;
  out.traces = BoundedLanguage(max_visible_len, trace_cap).of(model);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void collect_leaf_ids(const PowlNode& node, FreshIds& ids) {
  if (node.is_leaf()) {
    ids.reserve(node.as_leaf().id);
    return;
  }
  for (const auto& c : node.children()) collect_leaf_ids(c, ids);
}

// Minimal union-find over string keys.
struct KeyUnion {
  std::map<std::string, std::string> parent;
  std::string find(const std::string& k) {
    auto it = parent.find(k);
    if (it == parent.end()) {
      parent[k] = k;
      return k;
    }
    if (it->second == k) return k;
    auto root = find(it->second);
    parent[k] = root;
    return root;
  }
  void unite(const std::string& a, const std::string& b) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
};

class NetConstruction {
 public:
  explicit NetConstruction(FreshIds& ids) : ids_(ids) {}

  WorkflowNet build(const PowlNode& node) {
    if (node.is_leaf()) {
      const auto& leaf = node.as_leaf();
      auto src = ids_.next("p"), snk = ids_.next("p");
      NetBuilder b;
      b.place(src).place(snk).transition(leaf.id, leaf.label).arc(src, leaf.id).arc(leaf.id, snk);
      return WorkflowNet::from(b.build());
    }
    const auto& kids = node.children();
    std::vector<std::string> holes;
    for (std::size_t i = 0; i < kids.size(); ++i) holes.push_back(ids_.next("h"));
    PetriNet skeleton = node.is_partial_order()
                            ? order_skeleton(node.as_partial_order().order, holes)
                            : graph_skeleton(node.as_choice_graph().graph, holes);
    for (std::size_t i = 0; i < kids.size(); ++i)
      skeleton = substitute(skeleton, holes[i], build(kids[i]));
    return WorkflowNet::from(std::move(skeleton));
  }

 private:
  PetriNet order_skeleton(const OrderStruct& order, const std::vector<std::string>& holes) {
    const std::size_t n = holes.size();
    NetBuilder b;
    auto src = ids_.next("p"), snk = ids_.next("p");
    b.place(src).place(snk);
    for (const auto& h : holes) b.transition(h);
    std::vector<std::size_t> minimal, maximal;
    for (std::size_t i = 0; i < n; ++i) {
      bool has_pred = false, has_succ = false;
      for (std::size_t j = 0; j < n; ++j) {
        has_pred = has_pred || order.precedes(j, i);
        has_succ = has_succ || order.precedes(i, j);
      }
      if (!has_pred) minimal.push_back(i);
      if (!has_succ) maximal.push_back(i);
    }
    if (minimal.size() == 1) {
      b.arc(src, holes[minimal[0]]);
    } else {
      auto open = ids_.next("t");
      b.transition(open).arc(src, open);
      for (auto i : minimal) {
        auto p = ids_.next("p");
        b.place(p).arc(open, p).arc(p, holes[i]);
      }
    }
    if (maximal.size() == 1) {
      b.arc(holes[maximal[0]], snk);
    } else {
      auto close = ids_.next("t");
      b.transition(close).arc(close, snk);
      for (auto i : maximal) {
        auto p = ids_.next("p");
        b.place(p).arc(holes[i], p).arc(p, close);
      }
    }
    for (auto [i, j] : order.covering()) {
      auto p = ids_.next("p");
      b.place(p).arc(holes[i], p).arc(p, holes[j]);
    }
    return b.build();
  }

  // One entry and one exit place per child; an edge fuses exit and entry when
  // it is the only edge leaving the one and entering the other, otherwise a
  // silent transition routes the token.
  PetriNet graph_skeleton(const ChoiceGraphStruct& g, const std::vector<std::string>& holes) {
    auto exit_key = [](long u) {
      return u == ChoiceGraphStruct::kStart ? std::string("S") : "o" + std::to_string(u);
    };
    auto entry_key = [](long v) {
      return v == ChoiceGraphStruct::kEnd ? std::string("E") : "i" + std::to_string(v);
    };
    std::map<long, int> out_degree, in_degree;
    for (auto [u, v] : g.edges()) {
      ++out_degree[u];
      ++in_degree[v];
    }
    KeyUnion places;
    std::vector<ChoiceGraphStruct::Edge> routed;
    for (auto [u, v] : g.edges()) {
      if (out_degree[u] == 1 && in_degree[v] == 1)
        places.unite(exit_key(u), entry_key(v));
      else
        routed.emplace_back(u, v);
    }
    std::map<std::string, std::string> names;
    auto place_of = [&](const std::string& key) {
      auto root = places.find(key);
      auto it = names.find(root);
      if (it == names.end()) it = names.emplace(root, ids_.next("p")).first;
      return it->second;
    };
    NetBuilder b;
    b.place(place_of("S")).place(place_of("E"));
    for (std::size_t i = 0; i < holes.size(); ++i) {
      auto in = place_of(entry_key(long(i))), out = place_of(exit_key(long(i)));
      b.place(in).place(out).transition(holes[i]).arc(in, holes[i]).arc(holes[i], out);
    }
    for (auto [u, v] : routed) {
      auto t = ids_.next("t");
      b.transition(t).arc(place_of(exit_key(u)), t).arc(t, place_of(entry_key(v)));
    }
    return b.build();
  }

  FreshIds& ids_;
};

}  // namespace

WorkflowNet powl_to_net(const PowlNode& model) {
  auto check = validate_powl(model);
  if (!check) throw ModelError("invalid model at " + check.path + ": " + check.violation);
  FreshIds ids("_");
  collect_leaf_ids(model, ids);
  return NetConstruction(ids).build(model);
}

std::string describe(const PowlNode& model) {
  std::ostringstream os;
  std::function<void(const PowlNode&)> go = [&](const PowlNode& n) {
    if (n.is_leaf()) {
      os << n.as_leaf().label.display();
      return;
    }
    const auto& kids = n.children();
    if (n.is_partial_order()) {
      os << "PO[";
      bool first = true;
      for (auto [i, j] : n.as_partial_order().order.covering()) {
        if (!first) os << ',';
        first = false;
        os << i << '<' << j;
      }
    } else {
      os << "CG[";
      bool first = true;
      for (auto [u, v] : n.as_choice_graph().graph.edges()) {
        if (!first) os << ',';
        first = false;
        auto name = [](long x) {
          return x == ChoiceGraphStruct::kStart ? std::string("s")
                 : x == ChoiceGraphStruct::kEnd ? std::string("e")
                                                : std::to_string(x);
        };
        os << name(u) << '>' << name(v);
      }
    }
    os << "](";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) os << ", ";
      go(kids[i]);
    }
    os << ')';
  };
  go(model);
  return os.str();
}

}  // namespace wfpowl
