#include "powl/preprocess.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wfpowl {
namespace {

using Adjacency = std::vector<Index>;

std::vector<std::vector<Index>> bundles_by(const PetriNet& net, bool by_preset) {
  std::map<Adjacency, std::vector<Index>> groups;
  for (Index p = 0; p < net.place_count(); ++p) {
    auto key = by_preset ? net.place_pre(p) : net.place_post(p);
    if (key.empty()) continue;
    groups[Adjacency(key.begin(), key.end())].push_back(p);
  }
  std::vector<std::vector<Index>> out;
  for (auto& [key, places] : groups)
    if (places.size() >= 2) out.push_back(std::move(places));
  return out;
}

// Number of places of `bundle` adjacent to t on the consuming (split) or
// producing (join) side.
std::size_t overlap(const PetriNet& net, Index t, const std::vector<Index>& bundle, bool split) {
  auto adj = split ? net.transition_pre(t) : net.transition_post(t);
  std::size_t n = 0;
  for (Index p : bundle)
    if (std::binary_search(adj.begin(), adj.end(), p)) ++n;
  return n;
}

Rewrite introduce_xor_places(const WorkflowNet& wf, bool split, FreshIds& ids) {
  const auto& net = wf.net();
  NetBuilder b(net);
  bool changed = false;
  for (const auto& bundle : bundles_by(net, split)) {
    std::vector<Index> full, partial;
    for (Index t = 0; t < net.transition_count(); ++t) {
      auto k = overlap(net, t, bundle, split);
      if (k == bundle.size())
        full.push_back(t);
      else if (k > 0)
        partial.push_back(t);
    }
    if (full.empty() || partial.empty()) continue;
    changed = true;
    auto fresh = ids.next("p");
    auto tau = ids.next("t");
    b.place(fresh).transition(tau);
    const auto& shared = split ? net.place_pre(bundle[0]) : net.place_post(bundle[0]);
    for (Index p : bundle) {
      const auto& pid = net.places()[p];
      for (Index t : shared) {
        const auto& tid = net.transitions()[t];
        if (split) b.remove_arc(tid, pid);
        else b.remove_arc(pid, tid);
      }
      for (Index t : full) {
        const auto& tid = net.transitions()[t];
        if (split) b.remove_arc(pid, tid);
        else b.remove_arc(tid, pid);
      }
      if (split) b.arc(tau, pid);
      else b.arc(pid, tau);
    }
    for (Index t : shared) {
      const auto& tid = net.transitions()[t];
      if (split) b.arc(tid, fresh);
      else b.arc(fresh, tid);
    }
    for (Index t : full) {
      const auto& tid = net.transitions()[t];
      if (split) b.arc(fresh, tid);
      else b.arc(tid, fresh);
    }
    if (split) b.arc(fresh, tau);
    else b.arc(tau, fresh);
  }
  if (!changed) return {wf, false};
  return {WorkflowNet::from(b.build()), true};
}

}  // namespace

Rewrite remove_duplicate_places(const WorkflowNet& wf) {
  const auto& net = wf.net();
  std::map<std::pair<Adjacency, Adjacency>, std::vector<Index>> groups;
  for (Index p = 0; p < net.place_count(); ++p) {
    auto pre = net.place_pre(p), post = net.place_post(p);
    groups[{Adjacency(pre.begin(), pre.end()), Adjacency(post.begin(), post.end())}].push_back(p);
  }
  NetBuilder b(net);
  bool changed = false;
  for (const auto& [key, places] : groups) {
    // Places are in ascending id order; keep the first.
    for (std::size_t i = 1; i < places.size(); ++i) {
      Index p = places[i];
      if (p == wf.source_index() || p == wf.sink_index()) continue;
      b.remove(net.places()[p]);
      changed = true;
    }
  }
  if (!changed) return {wf, false};
  return {WorkflowNet::from(b.build()), true};
}

Rewrite introduce_xor_split_places(const WorkflowNet& wf, FreshIds& ids) {
  return introduce_xor_places(wf, true, ids);
}

Rewrite introduce_xor_join_places(const WorkflowNet& wf, FreshIds& ids) {
  return introduce_xor_places(wf, false, ids);
}

Rewrite introduce_xor_split_places(const WorkflowNet& wf) {
  FreshIds ids("_pre");
  ids.reserve(wf.net());
  return introduce_xor_split_places(wf, ids);
}

Rewrite introduce_xor_join_places(const WorkflowNet& wf) {
  FreshIds ids("_pre");
  ids.reserve(wf.net());
  return introduce_xor_join_places(wf, ids);
}

PreprocessRules PreprocessRules::parse(const std::string& list) {
  PreprocessRules r = none();
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "dup") r.duplicates = true;
    else if (item == "split") r.xor_splits = true;
    else if (item == "join") r.xor_joins = true;
    else if (!item.empty()) throw std::invalid_argument("unknown preprocessing rule: " + item);
  }
  return r;
}

PreprocessResult preprocess_net(const WorkflowNet& wf, const PreprocessRules& rules) {
  FreshIds ids("_pre");
  ids.reserve(wf.net());
  return preprocess_net(wf, rules, ids);
}

PreprocessResult preprocess_net(const WorkflowNet& wf, const PreprocessRules& rules,
                                FreshIds& ids) {
  PreprocessResult result{wf};
  const std::size_t cap = wf.net().place_count() + wf.net().transition_count();
  for (;;) {
    if (result.passes >= cap) {
      result.hit_iteration_cap = true;
      return result;
    }
    ++result.passes;
    bool changed = false;
    auto apply = [&](bool enabled, auto rule) {
      if (!enabled) return;
      Rewrite r = rule(result.net);
      if (r.changed) {
        result.net = std::move(r.net);
        changed = true;
      }
    };
    apply(rules.duplicates, [](const WorkflowNet& n) { return remove_duplicate_places(n); });
    apply(rules.xor_splits, [&](const WorkflowNet& n) { return introduce_xor_places(n, true, ids); });
    apply(rules.xor_joins, [&](const WorkflowNet& n) { return introduce_xor_places(n, false, ids); });
    if (!changed) return result;
  }
}

}  // namespace wfpowl
