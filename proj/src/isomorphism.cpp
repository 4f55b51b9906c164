// Label- and arc-preserving bijection search between two nets. Nodes are first
// separated by iterated color refinement run jointly on both nets, so colors
// are comparable; the backtracking search then only pairs nodes of equal color.
#include <algorithm>
#include <map>
#include <numeric>

#include "powl/net.hpp"

namespace wfpowl {
namespace {

struct Graph {
  std::size_t np = 0;  // places first, transitions after
  std::vector<std::vector<std::uint32_t>> out, in;
  std::vector<std::string> base;  // initial color key
};

Graph as_graph(const PetriNet& net) {
  Graph g;
  g.np = net.place_count();
  const std::size_t n = g.np + net.transition_count();
  g.out.resize(n);
  g.in.resize(n);
  g.base.resize(n);
  for (Index p = 0; p < g.np; ++p) {
    for (Index t : net.place_post(p)) g.out[p].push_back(static_cast<std::uint32_t>(g.np + t));
    for (Index t : net.place_pre(p)) g.in[p].push_back(static_cast<std::uint32_t>(g.np + t));
    g.base[p] = "P";
  }
  for (Index t = 0; t < net.transition_count(); ++t) {
    auto v = g.np + t;
    for (Index p : net.transition_post(t)) g.out[v].push_back(p);
    for (Index p : net.transition_pre(t)) g.in[v].push_back(p);
    const auto& l = net.label(t);
    g.base[v] = l.is_silent() ? std::string("T") : "T:" + l.name();
  }
  return g;
}

// Refines colors of both graphs with a shared palette until stable.
void refine(const Graph& a, const Graph& b, std::vector<int>& ca, std::vector<int>& cb) {
  std::map<std::string, int> palette;
  for (const auto* g : {&a, &b})
    for (const auto& k : g->base) palette.emplace(k, 0);
  int next = 0;
  for (auto& [k, v] : palette) v = next++;
  ca.resize(a.base.size());
  cb.resize(b.base.size());
  for (std::size_t i = 0; i < a.base.size(); ++i) ca[i] = palette[a.base[i]];
  for (std::size_t i = 0; i < b.base.size(); ++i) cb[i] = palette[b.base[i]];

  std::size_t classes = palette.size();
  for (;;) {
    using Key = std::pair<int, std::pair<std::vector<int>, std::vector<int>>>;
    std::map<Key, int> keys;
    auto key_of = [](const Graph& g, const std::vector<int>& c, std::size_t v) {
      std::vector<int> o, i;
      for (auto w : g.out[v]) o.push_back(c[w]);
      for (auto w : g.in[v]) i.push_back(c[w]);
      std::sort(o.begin(), o.end());
      std::sort(i.begin(), i.end());
      return Key{c[v], {std::move(o), std::move(i)}};
    };
    std::vector<Key> ka, kb;
    for (std::size_t v = 0; v < a.base.size(); ++v) ka.push_back(key_of(a, ca, v));
    for (std::size_t v = 0; v < b.base.size(); ++v) kb.push_back(key_of(b, cb, v));
    for (const auto& k : ka) keys.emplace(k, 0);
    for (const auto& k : kb) keys.emplace(k, 0);
    int id = 0;
    for (auto& [k, v] : keys) v = id++;
    for (std::size_t v = 0; v < ka.size(); ++v) ca[v] = keys[ka[v]];
    for (std::size_t v = 0; v < kb.size(); ++v) cb[v] = keys[kb[v]];
    if (keys.size() == classes) break;
    classes = keys.size();
  }
}

class Matcher {
 public:
  Matcher(const Graph& a, const Graph& b, const std::vector<int>& ca,
          const std::vector<int>& cb, std::size_t budget)
      : a_(a), b_(b), ca_(ca), cb_(cb), budget_(budget) {
    const std::size_t n = a.base.size();
    map_.assign(n, -1);
    used_.assign(n, false);
    // Nodes in smallest-color-class-first order, ties broken by connectivity to
    // earlier nodes through a BFS-ish pass so consistency checks prune early.
    std::map<int, std::size_t> class_size;
    for (int c : ca) ++class_size[c];
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      return class_size[ca[x]] < class_size[ca[y]];
    });
    for (std::size_t v = 0; v < b.base.size(); ++v) candidates_[cb[v]].push_back(v);
  }

  IsoResult run() {
    if (search(0)) return IsoResult::Isomorphic;
    return exhausted_ ? IsoResult::BudgetExhausted : IsoResult::NotIsomorphic;
  }

 private:
  bool consistent(std::size_t v, std::size_t w) const {
    auto check = [&](const std::vector<std::uint32_t>& av, const std::vector<std::uint32_t>& bw) {
      for (auto x : av) {
        if (map_[x] < 0) continue;
        if (std::find(bw.begin(), bw.end(), static_cast<std::uint32_t>(map_[x])) == bw.end())
          return false;
      }
      return true;
    };
    return check(a_.out[v], b_.out[w]) && check(a_.in[v], b_.in[w]);
  }

  bool search(std::size_t depth) {
    if (depth == order_.size()) return true;
    if (++steps_ > budget_) {
      exhausted_ = true;
      return false;
    }
    std::size_t v = order_[depth];
    for (std::size_t w : candidates_[ca_[v]]) {
      if (used_[w] || !consistent(v, w)) continue;
      map_[v] = static_cast<long>(w);
      used_[w] = true;
      if (search(depth + 1)) return true;
      map_[v] = -1;
      used_[w] = false;
      if (exhausted_) return false;
    }
    return false;
  }

  const Graph& a_;
  const Graph& b_;
  const std::vector<int>& ca_;
  const std::vector<int>& cb_;
  std::size_t budget_;
  std::size_t steps_ = 0;
  bool exhausted_ = false;
  std::vector<long> map_;
  std::vector<bool> used_;
  std::vector<std::size_t> order_;
  std::map<int, std::vector<std::size_t>> candidates_;
};

}  // namespace

IsoResult isomorphism(const PetriNet& a, const PetriNet& b, const IsomorphismOptions& opts) {
  if (a.place_count() != b.place_count() || a.transition_count() != b.transition_count() ||
      a.arc_count() != b.arc_count())
    return IsoResult::NotIsomorphic;
  Graph ga = as_graph(a), gb = as_graph(b);
  std::vector<int> ca, cb;
  refine(ga, gb, ca, cb);
  auto hist_a = ca, hist_b = cb;
  std::sort(hist_a.begin(), hist_a.end());
  std::sort(hist_b.begin(), hist_b.end());
  if (hist_a != hist_b) return IsoResult::NotIsomorphic;
  return Matcher(ga, gb, ca, cb, opts.node_budget).run();
}

bool isomorphic(const PetriNet& a, const PetriNet& b) {
  return isomorphism(a, b) == IsoResult::Isomorphic;
}

}  // namespace wfpowl
