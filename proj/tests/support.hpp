// Helpers shared by the unit tests: compact net construction and brute-force
// oracles that do not reuse the library's own enumeration code.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "powl/behavior.hpp"
#include "powl/io.hpp"
#include "powl/model.hpp"
#include "powl/net.hpp"

namespace testing_support {

using namespace wfpowl;

struct T {
  std::string id;
  std::string label;  // empty means silent
  std::vector<std::string> in, out;
};

inline PetriNet make_net(const std::vector<T>& ts, const std::vector<std::string>& extra_places = {}) {
  NetBuilder b;
  for (const auto& p : extra_places) b.place(p);
  for (const auto& t : ts) {
    for (const auto& p : t.in) b.place(p);
    for (const auto& p : t.out) b.place(p);
    b.transition(t.id, t.label.empty() ? Label::silent() : Label::activity(t.label));
  }
  for (const auto& t : ts) {
    for (const auto& p : t.in) b.arc(p, t.id);
    for (const auto& p : t.out) b.arc(t.id, p);
  }
  return b.build();
}

inline WorkflowNet make_wf(const std::vector<T>& ts) { return WorkflowNet::from(make_net(ts)); }

inline WorkflowNet fixture(const std::string& name) {
  return parse_pnml(read_file(std::string(FIXTURE_DIR) + "/" + name + ".pnml"));
}

// a;(b||c);d
inline WorkflowNet seq_par() {
  return make_wf({{"a", "a", {"i"}, {"p1", "p2"}},
                  {"b", "b", {"p1"}, {"p3"}},
                  {"c", "c", {"p2"}, {"p4"}},
                  {"d", "d", {"p3", "p4"}, {"o"}}});
}

// a;(b|c);d
inline WorkflowNet seq_xor() {
  return make_wf({{"a", "a", {"i"}, {"p1"}},
                  {"b", "b", {"p1"}, {"p2"}},
                  {"c", "c", {"p1"}, {"p2"}},
                  {"d", "d", {"p2"}, {"o"}}});
}

// a;b;c
inline WorkflowNet chain3() {
  return make_wf({{"a", "a", {"i"}, {"p1"}}, {"b", "b", {"p1"}, {"p2"}}, {"c", "c", {"p2"}, {"o"}}});
}

/// Visible traces of length <= max_len of firing sequences [source] -> [sink]
/// with at most max_steps firings, by plain depth-first search over firings.
/// Exact whenever every such trace has a witnessing run within max_steps.
inline std::set<Trace> brute_force_net_language(const WorkflowNet& wf, std::size_t max_len,
                                                std::size_t max_steps) {
  const auto& net = wf.net();
  std::set<Trace> out;
  std::map<std::string, int> marking{{wf.source(), 1}};
  Trace trace;
  std::function<void(std::size_t)> dfs = [&](std::size_t steps) {
    if (marking.size() == 1 && marking.begin()->first == wf.sink() && marking.begin()->second == 1)
      out.insert(trace);
    if (steps == max_steps) return;
    for (const auto& t : net.transitions()) {
      auto pre = preset(net, t), post = postset(net, t);
      bool ok = std::all_of(pre.begin(), pre.end(), [&](const std::string& p) {
        auto it = marking.find(p);
        return it != marking.end() && it->second > 0;
      });
      if (!ok) continue;
      const auto& label = net.label(t);
      if (!label.is_silent() && trace.size() == max_len) continue;
      auto saved = marking;
      for (const auto& p : pre)
        if (--marking[p] == 0) marking.erase(p);
      for (const auto& p : post) ++marking[p];
      if (!label.is_silent()) trace.push_back(label.name());
      dfs(steps + 1);
      if (!label.is_silent()) trace.pop_back();
      marking = saved;
    }
  };
  dfs(0);
  return out;
}

/// All interleavings of `seqs` respecting each sequence's internal order and
/// `before` (pairs (i, j): all of i precedes all of j), by filtering every
/// permutation of the tagged events.
inline std::set<Trace> brute_force_shuffle(const std::vector<Trace>& seqs,
                                           const std::set<std::pair<std::size_t, std::size_t>>& before) {
  std::vector<std::pair<std::size_t, std::size_t>> events;  // (child, position)
  for (std::size_t i = 0; i < seqs.size(); ++i)
    for (std::size_t k = 0; k < seqs[i].size(); ++k) events.push_back({i, k});
  std::sort(events.begin(), events.end());
  std::set<Trace> out;
  do {
    std::map<std::size_t, std::size_t> next;
    std::vector<std::size_t> first(seqs.size(), events.size()), last(seqs.size(), 0);
    bool ok = true;
    for (std::size_t pos = 0; pos < events.size() && ok; ++pos) {
      auto [c, k] = events[pos];
      if (next[c] != k) ok = false;
      ++next[c];
      first[c] = std::min(first[c], pos);
      last[c] = std::max(last[c], pos);
    }
    for (auto [i, j] : before)
      if (ok && !seqs[i].empty() && !seqs[j].empty() && last[i] > first[j]) ok = false;
    if (!ok) continue;
    Trace t;
    for (auto [c, k] : events) t.push_back(seqs[c][k]);
    out.insert(t);
  } while (std::next_permutation(events.begin(), events.end()));
  return out;
}

/// Language of a model straight from the definitions: leaves, unions over
/// choice-graph walks of concatenated child words, and shuffles of child words
/// for partial orders (via brute_force_shuffle). Only for small models.
inline std::set<Trace> brute_force_model_language(const PowlNode& m, std::size_t max_len) {
  if (m.is_leaf()) {
    const auto& l = m.as_leaf().label;
    if (l.is_silent()) return {Trace{}};
    if (max_len == 0) return {};
    return {Trace{l.name()}};
  }
  std::vector<std::set<Trace>> child;
  for (const auto& c : m.children()) child.push_back(brute_force_model_language(c, max_len));
  std::set<Trace> out;
  if (m.is_partial_order()) {
    std::vector<Trace> pick(child.size());
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t len) {
      if (i == child.size()) {
        for (auto& t : brute_force_shuffle(pick, m.as_partial_order().order.relation())) out.insert(t);
        return;
      }
      for (const auto& w : child[i]) {
        if (len + w.size() > max_len) continue;
        pick[i] = w;
        rec(i + 1, len + w.size());
      }
    };
    rec(0, 0);
    return out;
  }
  // Walk the graph directly. A run of more than n consecutive empty child
  // words revisits a node with the same prefix, so it is cut.
  const auto& g = m.as_choice_graph().graph;
  const std::size_t n = child.size();
  Trace acc;
  std::function<void(long, std::size_t)> walk = [&](long node, std::size_t empty_run) {
    for (const auto& w : child[static_cast<std::size_t>(node)]) {
      if (acc.size() + w.size() > max_len) continue;
      std::size_t run = w.empty() ? empty_run + 1 : 0;
      if (run > n) continue;
      auto len = acc.size();
      acc.insert(acc.end(), w.begin(), w.end());
      for (auto s : g.successors(node)) {
        if (s == ChoiceGraphStruct::kEnd) out.insert(acc);
        else walk(s, run);
      }
      acc.resize(len);
    }
  };
  for (auto s : g.successors(ChoiceGraphStruct::kStart)) walk(s, 0);
  return out;
}

inline PowlNode leaf(const std::string& id, const std::string& label = "") {
  return PowlNode::leaf(id, label.empty() ? Label::silent() : Label::activity(label));
}

}  // namespace testing_support
