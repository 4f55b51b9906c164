#include "powl/behavior.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <unordered_map>

namespace wfpowl {

std::string to_string(const Trace& t) {
  std::string s = "<";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += t[i];
  }
  return s + ">";
}

TraceSet TraceSet::restricted(std::size_t b) const {
  TraceSet out;
  out.bound = std::min(b, bound);
  for (const auto& t : traces)
    if (t.size() <= out.bound) out.traces.insert(t);
  return out;
}

Equivalence bounded_equal(const TraceSet& a, const TraceSet& b) {
  Equivalence eq;
  eq.bound = std::min(a.bound, b.bound);
  auto ra = a.restricted(eq.bound), rb = b.restricted(eq.bound);
  auto ia = ra.traces.begin(), ib = rb.traces.begin();
  while (ia != ra.traces.end() || ib != rb.traces.end()) {
    if (ib == rb.traces.end() || (ia != ra.traces.end() && *ia < *ib)) {
      eq.equal = false;
      eq.counterexample = *ia;
      eq.counterexample_in_left = true;
      return eq;
    }
    if (ia == ra.traces.end() || *ib < *ia) {
      eq.equal = false;
      eq.counterexample = *ib;
      eq.counterexample_in_left = false;
      return eq;
    }
    ++ia;
    ++ib;
  }
  return eq;
}

// ---------------------------------------------------------------------------

std::vector<Index> enabled(const PetriNet& net, const Marking& m) {
  std::vector<Index> out;
  for (Index t = 0; t < net.transition_count(); ++t) {
    auto pre = net.transition_pre(t);
    if (std::all_of(pre.begin(), pre.end(), [&](Index p) { return m.tokens[p] > 0; }))
      out.push_back(t);
  }
  return out;
}

IdSet enabled_ids(const PetriNet& net, const Marking& m) {
  IdSet out;
  for (Index t : enabled(net, m)) out.insert(net.transitions()[t]);
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, Index t) {
  Marking next = m;
  for (Index p : net.transition_pre(t)) {
    if (next.tokens[p] == 0) throw NotEnabled("transition not enabled: " + net.transitions()[t]);
    --next.tokens[p];
  }
  for (Index p : net.transition_post(t)) {
    if (next.tokens[p] == std::numeric_limits<std::uint8_t>::max())
      throw BehaviorError("token count overflow at " + net.places()[p]);
    ++next.tokens[p];
  }
  return next;
}

Marking fire(const PetriNet& net, const Marking& m, const std::string& t) {
  return fire(net, m, net.transition_index(t));
}

ReachabilityGraph reachability_graph(const WorkflowNet& wf, std::size_t state_budget) {
  if (state_budget == 0) throw BehaviorError("state budget must be at least 1");
  const auto& net = wf.net();
  ReachabilityGraph g;
  std::unordered_map<Marking, std::size_t, MarkingHash> index;
  std::vector<std::pair<std::size_t, Index>> parent;

  g.states.push_back(Marking::single(net.place_count(), wf.source_index()));
  index.emplace(g.states[0], 0);
  parent.emplace_back(0, 0);

  auto path_to = [&](std::size_t s) {
    std::vector<std::string> seq;
    while (s != 0) {
      seq.push_back(net.transitions()[parent[s].second]);
      s = parent[s].first;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  };

  for (std::size_t cur = 0; cur < g.states.size(); ++cur) {
    for (Index t : enabled(net, g.states[cur])) {
      Marking next = fire(net, g.states[cur], t);
      if (std::any_of(next.tokens.begin(), next.tokens.end(), [](auto c) { return c > 1; })) {
        g.truncated = Truncation::Unsafe;
        g.unsafe_witness = next;
        g.witness_sequence = path_to(cur);
        g.witness_sequence.push_back(net.transitions()[t]);
        return g;
      }
      auto it = index.find(next);
      if (it == index.end()) {
        if (g.states.size() >= state_budget) {
          g.truncated = Truncation::Budget;
          return g;
        }
        it = index.emplace(next, g.states.size()).first;
        g.states.push_back(std::move(next));
        parent.emplace_back(cur, t);
      }
      g.edges.push_back({cur, t, it->second});
    }
  }
  return g;
}

SafetyVerdict check_safe(const WorkflowNet& wf, std::size_t state_budget) {
  auto g = reachability_graph(wf, state_budget);
  SafetyVerdict v;
  switch (g.truncated) {
    case Truncation::None: v.status = Verdict::Yes; break;
    case Truncation::Budget: v.status = Verdict::Unknown; break;
    case Truncation::Unsafe:
      v.status = Verdict::No;
      v.witness = g.unsafe_witness;
      v.firing_sequence = g.witness_sequence;
      break;
  }
  return v;
}

const char* to_string(SoundnessClause c) {
  switch (c) {
    case SoundnessClause::None: return "none";
    case SoundnessClause::DeadTransition: return "no dead transitions";
    case SoundnessClause::OptionToComplete: return "option to complete";
    case SoundnessClause::ProperCompletion: return "proper completion";
  }
  return "?";
}

namespace {

// Predecessor lists of the reachability graph.
std::vector<std::vector<std::size_t>> reverse_edges(const ReachabilityGraph& g) {
  std::vector<std::vector<std::size_t>> rev(g.states.size());
  for (const auto& e : g.edges) rev[e.to].push_back(e.from);
  return rev;
}

std::optional<std::size_t> find_state(const ReachabilityGraph& g, const Marking& m) {
  for (std::size_t s = 0; s < g.states.size(); ++s)
    if (g.states[s] == m) return s;
  return std::nullopt;
}

}  // namespace

SoundnessVerdict check_sound(const WorkflowNet& wf, std::size_t state_budget) {
  const auto& net = wf.net();
  auto g = reachability_graph(wf, state_budget);
  SoundnessVerdict v;
  if (g.truncated == Truncation::Budget) {
    v.reason = "state budget exceeded";
    return v;
  }
  if (g.truncated == Truncation::Unsafe) {
    v.reason = "net is unsafe at " + g.unsafe_witness->to_string(net);
    return v;
  }

  std::vector<bool> fired(net.transition_count(), false);
  for (const auto& e : g.edges) fired[e.transition] = true;
  for (Index t = 0; t < net.transition_count(); ++t)
    if (!fired[t]) {
      v.status = Verdict::No;
      v.violated = SoundnessClause::DeadTransition;
      v.witness = net.transitions()[t];
      return v;
    }

  const Marking final_marking = Marking::single(net.place_count(), wf.sink_index());
  std::vector<bool> completes(g.states.size(), false);
  if (auto f = find_state(g, final_marking)) {
    auto rev = reverse_edges(g);
    std::vector<std::size_t> stack{*f};
    completes[*f] = true;
    while (!stack.empty()) {
      auto s = stack.back();
      stack.pop_back();
      for (auto p : rev[s])
        if (!completes[p]) {
          completes[p] = true;
          stack.push_back(p);
        }
    }
  }
  for (std::size_t s = 0; s < g.states.size(); ++s)
    if (!completes[s]) {
      v.status = Verdict::No;
      v.violated = SoundnessClause::OptionToComplete;
      v.witness = g.states[s].to_string(net);
      return v;
    }
  for (const auto& m : g.states)
    if (m.tokens[wf.sink_index()] > 0 && !(m == final_marking)) {
      v.status = Verdict::No;
      v.violated = SoundnessClause::ProperCompletion;
      v.witness = m.to_string(net);
      return v;
    }
  v.status = Verdict::Yes;
  return v;
}

// ---------------------------------------------------------------------------

namespace {

// Visible-prefix exploration over sets of silently-closed markings. A prefix is
// extended only when some marking in its set can still reach the final
// marking within the remaining length budget, so the search only visits
// prefixes of traces that end up in the result.
class LanguageEnumerator {
 public:
  LanguageEnumerator(const WorkflowNet& wf, const ReachabilityGraph& g, std::size_t bound)
      : net_(wf.net()), g_(g), bound_(bound) {
    const std::size_t n = g.states.size();
    silent_.resize(n);
    visible_.resize(n);
    for (const auto& e : g.edges) {
      const auto& l = net_.label(e.transition);
      if (l.is_silent())
        silent_[e.from].push_back(e.to);
      else
        visible_[e.from].emplace_back(&l.name(), e.to);
    }
    final_ = find_state(g, Marking::single(net_.place_count(), wf.sink_index()));
    distance_.assign(n, kInf);
    if (final_) compute_distances();
  }

  TraceSet run() {
    TraceSet out;
    out.bound = bound_;
    if (!final_ || distance_[0] > bound_) return out;
    Trace prefix;
    explore(closure({0}), prefix, out);
    return out;
  }

 private:
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

  // Minimum number of visible firings from each state to the final marking
  // (0-1 BFS over reversed edges).
  void compute_distances() {
    std::vector<std::vector<std::pair<std::size_t, int>>> rev(g_.states.size());
    for (const auto& e : g_.edges)
      rev[e.to].emplace_back(e.from, net_.label(e.transition).is_silent() ? 0 : 1);
    std::deque<std::size_t> dq{*final_};
    distance_[*final_] = 0;
    while (!dq.empty()) {
      auto s = dq.front();
      dq.pop_front();
      for (auto [p, w] : rev[s]) {
        if (distance_[s] + w < distance_[p]) {
          distance_[p] = distance_[s] + w;
          if (w == 0)
            dq.push_front(p);
          else
            dq.push_back(p);
        }
      }
    }
  }

  std::vector<std::size_t> closure(std::vector<std::size_t> seeds) const {
    std::vector<bool> seen(g_.states.size(), false);
    std::vector<std::size_t> out;
    for (auto s : seeds)
      if (!seen[s]) {
        seen[s] = true;
        out.push_back(s);
      }
    for (std::size_t i = 0; i < out.size(); ++i)
      for (auto w : silent_[out[i]])
        if (!seen[w]) {
          seen[w] = true;
          out.push_back(w);
        }
    std::sort(out.begin(), out.end());
    return out;
  }

  void explore(const std::vector<std::size_t>& states, Trace& prefix, TraceSet& out) const {
    if (std::binary_search(states.begin(), states.end(), *final_)) out.traces.insert(prefix);
    if (prefix.size() == bound_) return;
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (auto s : states)
      for (const auto& [label, to] : visible_[s]) by_label[*label].push_back(to);
    const std::size_t remaining = bound_ - prefix.size() - 1;
    for (auto& [label, targets] : by_label) {
      auto next = closure(std::move(targets));
      bool viable = std::any_of(next.begin(), next.end(),
                                [&](std::size_t s) { return distance_[s] <= remaining; });
      if (!viable) continue;
      prefix.push_back(label);
      explore(next, prefix, out);
      prefix.pop_back();
    }
  }

  const PetriNet& net_;
  const ReachabilityGraph& g_;
  std::size_t bound_;
  std::vector<std::vector<std::size_t>> silent_;
  std::vector<std::vector<std::pair<const std::string*, std::size_t>>> visible_;
  std::optional<std::size_t> final_;
  std::vector<std::size_t> distance_;
};

}  // namespace

TraceSet enumerate_language(const WorkflowNet& wf, std::size_t max_visible_len,
                            std::size_t state_budget) {
  auto g = reachability_graph(wf, state_budget);
  if (g.truncated == Truncation::Budget)
    throw BudgetExceeded("reachability graph exceeds " + std::to_string(state_budget) +
                         " markings");
  if (g.truncated == Truncation::Unsafe)
    throw BehaviorError("language enumeration requires a safe net; unsafe marking " +
                        g.unsafe_witness->to_string(wf.net()));
  return LanguageEnumerator(wf, g, max_visible_len).run();
}

}  // namespace wfpowl
