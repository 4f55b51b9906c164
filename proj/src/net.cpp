#include "powl/net.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace wfpowl {

Label Label::activity(std::string name) {
  if (name.empty()) throw NetError("activity label must be non-empty");
  Label l;
  l.name_ = std::move(name);
  return l;
}

const std::string& Label::name() const {
  static const std::string empty;
  return name_ ? *name_ : empty;
}

PetriNet::PetriNet(const IdSet& places, const std::map<std::string, Label>& transitions,
                   const std::set<Arc>& arcs) {
  places_.assign(places.begin(), places.end());
  transitions_.reserve(transitions.size());
  labels_.reserve(transitions.size());
  for (const auto& [id, label] : transitions) {
    if (places.count(id)) throw NetError("identifier used as place and transition: " + id);
    transitions_.push_back(id);
    labels_.push_back(label);
  }
  for (Index i = 0; i < places_.size(); ++i) place_idx_.emplace(places_[i], i);
  for (Index i = 0; i < transitions_.size(); ++i) trans_idx_.emplace(transitions_[i], i);

  place_pre_.resize(places_.size());
  place_post_.resize(places_.size());
  trans_pre_.resize(transitions_.size());
  trans_post_.resize(transitions_.size());
  for (const auto& a : arcs) {
    auto ps = place_idx_.find(a.source);
    auto tt = trans_idx_.find(a.target);
    if (ps != place_idx_.end() && tt != trans_idx_.end()) {
      place_post_[ps->second].push_back(tt->second);
      trans_pre_[tt->second].push_back(ps->second);
      continue;
    }
    auto ts = trans_idx_.find(a.source);
    auto pt = place_idx_.find(a.target);
    if (ts != trans_idx_.end() && pt != place_idx_.end()) {
      trans_post_[ts->second].push_back(pt->second);
      place_pre_[pt->second].push_back(ts->second);
      continue;
    }
    throw NetError("arc " + a.source + " -> " + a.target +
                   " does not connect an existing place and transition");
  }
  arc_count_ = arcs.size();
  for (auto* adj : {&place_pre_, &place_post_, &trans_pre_, &trans_post_})
    for (auto& v : *adj) std::sort(v.begin(), v.end());
}

bool PetriNet::has_place(const std::string& id) const { return place_idx_.count(id) > 0; }
bool PetriNet::has_transition(const std::string& id) const { return trans_idx_.count(id) > 0; }

Index PetriNet::place_index(const std::string& id) const {
  auto it = place_idx_.find(id);
  if (it == place_idx_.end()) throw NetError("unknown place: " + id);
  return it->second;
}

Index PetriNet::transition_index(const std::string& id) const {
  auto it = trans_idx_.find(id);
  if (it == trans_idx_.end()) throw NetError("unknown transition: " + id);
  return it->second;
}

std::set<Arc> PetriNet::arcs() const {
  std::set<Arc> out;
  for (Index p = 0; p < places_.size(); ++p) {
    for (Index t : place_post_[p]) out.insert({places_[p], transitions_[t]});
    for (Index t : place_pre_[p]) out.insert({transitions_[t], places_[p]});
  }
  return out;
}

std::map<std::string, Label> PetriNet::labeled_transitions() const {
  std::map<std::string, Label> out;
  for (Index t = 0; t < transitions_.size(); ++t) out.emplace(transitions_[t], labels_[t]);
  return out;
}

bool PetriNet::operator==(const PetriNet& other) const {
  return places_ == other.places_ && transitions_ == other.transitions_ &&
         labels_ == other.labels_ && place_post_ == other.place_post_ &&
         place_pre_ == other.place_pre_;
}

// ---------------------------------------------------------------------------

const char* to_string(WfViolation v) {
  switch (v) {
    case WfViolation::NoSource: return "NoSource";
    case WfViolation::MultipleSources: return "MultipleSources";
    case WfViolation::NoSink: return "NoSink";
    case WfViolation::MultipleSinks: return "MultipleSinks";
    case WfViolation::DisconnectedNode: return "DisconnectedNode";
  }
  return "?";
}

std::string WfDiagnostic::message() const {
  std::string s = to_string(violation);
  if (!nodes.empty()) {
    s += ":";
    for (const auto& n : nodes) s += " " + n;
  }
  return s;
}

WfCheck validate_wf_net(PetriNet net) {
  auto fail = [](WfViolation v, std::vector<std::string> nodes) {
    WfCheck c;
    c.diagnostic = WfDiagnostic{v, std::move(nodes)};
    return c;
  };
  std::vector<Index> sources, sinks;
  for (Index p = 0; p < net.place_count(); ++p) {
    if (net.place_pre(p).empty()) sources.push_back(p);
    if (net.place_post(p).empty()) sinks.push_back(p);
  }
  auto names = [&](const std::vector<Index>& ps) {
    std::vector<std::string> out;
    for (Index p : ps) out.push_back(net.places()[p]);
    return out;
  };
  if (sources.empty()) return fail(WfViolation::NoSource, {});
  if (sources.size() > 1) return fail(WfViolation::MultipleSources, names(sources));
  if (sinks.empty()) return fail(WfViolation::NoSink, {});
  if (sinks.size() > 1) return fail(WfViolation::MultipleSinks, names(sinks));

  // Forward search from the source and backward search from the sink over the
  // bipartite graph; places occupy [0, |P|), transitions follow.
  const std::size_t np = net.place_count();
  const std::size_t n = np + net.transition_count();
  auto search = [&](Index start, bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      auto push_all = [&](std::span<const Index> next, std::size_t offset) {
        for (Index w : next)
          if (!seen[w + offset]) {
            seen[w + offset] = true;
            stack.push_back(w + offset);
          }
      };
      if (v < np) {
        push_all(forward ? net.place_post(v) : net.place_pre(v), np);
      } else {
        Index t = static_cast<Index>(v - np);
        push_all(forward ? net.transition_post(t) : net.transition_pre(t), 0);
      }
    }
    return seen;
  };
  auto fwd = search(sources[0], true);
  auto bwd = search(sinks[0], false);
  std::vector<std::string> disconnected;
  for (std::size_t v = 0; v < n; ++v) {
    if (fwd[v] && bwd[v]) continue;
    disconnected.push_back(v < np ? net.places()[v] : net.transitions()[v - np]);
  }
  if (!disconnected.empty()) return fail(WfViolation::DisconnectedNode, disconnected);

  WfCheck ok;
  Index src = sources[0], snk = sinks[0];
  ok.net = WorkflowNet(std::move(net), src, snk);
  return ok;
}

WorkflowNet WorkflowNet::from(PetriNet net) {
  auto check = validate_wf_net(std::move(net));
  if (!check) throw NetError("not a workflow net: " + check.diagnostic->message());
  return std::move(*check.net);
}

// ---------------------------------------------------------------------------

Marking Marking::single(std::size_t place_count, Index place) {
  Marking m;
  m.tokens.assign(place_count, 0);
  m.tokens[place] = 1;
  return m;
}

std::size_t Marking::total() const {
  std::size_t s = 0;
  for (auto c : tokens) s += c;
  return s;
}

std::map<std::string, int> Marking::as_multiset(const PetriNet& net) const {
  std::map<std::string, int> out;
  for (Index p = 0; p < tokens.size(); ++p)
    if (tokens[p] > 0) out[net.places()[p]] = tokens[p];
  return out;
}

std::string Marking::to_string(const PetriNet& net) const {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (const auto& [p, c] : as_multiset(net)) {
    if (!first) os << ", ";
    first = false;
    os << p;
    if (c > 1) os << '^' << c;
  }
  os << ']';
  return os.str();
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (auto c : m.tokens) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------

TransitionPartition::TransitionPartition(std::vector<IdSet> parts) {
  for (const auto& part : parts)
    if (part.empty()) throw NetError("partition parts must be non-empty");
  std::sort(parts.begin(), parts.end(),
            [](const IdSet& a, const IdSet& b) { return *a.begin() < *b.begin(); });
  parts_ = std::move(parts);
  for (std::size_t i = 0; i < parts_.size(); ++i)
    for (const auto& t : parts_[i])
      if (!lookup_.emplace(t, i).second) throw NetError("transition in two parts: " + t);
}

std::size_t TransitionPartition::part_of(const std::string& t) const {
  auto it = lookup_.find(t);
  if (it == lookup_.end()) throw NetError("transition not in partition: " + t);
  return it->second;
}

// ---------------------------------------------------------------------------

IdSet preset(const PetriNet& net, const std::string& node) {
  IdSet out;
  if (net.has_place(node)) {
    for (Index t : net.place_pre(net.place_index(node))) out.insert(net.transitions()[t]);
  } else {
    for (Index p : net.transition_pre(net.transition_index(node))) out.insert(net.places()[p]);
  }
  return out;
}

IdSet postset(const PetriNet& net, const std::string& node) {
  IdSet out;
  if (net.has_place(node)) {
    for (Index t : net.place_post(net.place_index(node))) out.insert(net.transitions()[t]);
  } else {
    for (Index p : net.transition_post(net.transition_index(node))) out.insert(net.places()[p]);
  }
  return out;
}

namespace {

std::vector<bool> transition_mask(const PetriNet& net, const IdSet& subset) {
  std::vector<bool> mask(net.transition_count(), false);
  for (const auto& t : subset) mask[net.transition_index(t)] = true;
  return mask;
}

}  // namespace

IdSet project_places(const PetriNet& net, const IdSet& transitions) {
  auto mask = transition_mask(net, transitions);
  IdSet out;
  for (Index p = 0; p < net.place_count(); ++p) {
    auto touches = [&](std::span<const Index> ts) {
      return std::any_of(ts.begin(), ts.end(), [&](Index t) { return mask[t]; });
    };
    if (touches(net.place_pre(p)) || touches(net.place_post(p))) out.insert(net.places()[p]);
  }
  return out;
}

std::set<Arc> project_flow(const PetriNet& net, const IdSet& places, const IdSet& transitions) {
  for (const auto& p : places) net.place_index(p);
  for (const auto& t : transitions) net.transition_index(t);
  std::set<Arc> out;
  for (const auto& a : net.arcs()) {
    bool keep = (places.count(a.source) && transitions.count(a.target)) ||
                (transitions.count(a.source) && places.count(a.target));
    if (keep) out.insert(a);
  }
  return out;
}

ReachabilityMatrix::ReachabilityMatrix(const PetriNet& net, bool reflexive)
    : n_(net.transition_count()) {
  const std::size_t words = (n_ + 63) / 64;
  rows_.assign(n_, std::vector<std::uint64_t>(words, 0));
  cols_.assign(n_, std::vector<std::uint64_t>(words, 0));
  // Direct successor lists over transitions (t -> p -> t').
  std::vector<std::vector<Index>> succ(n_);
  for (Index t = 0; t < n_; ++t) {
    std::vector<bool> seen(n_, false);
    for (Index p : net.transition_post(t))
      for (Index u : net.place_post(p))
        if (!seen[u]) {
          seen[u] = true;
          succ[t].push_back(u);
        }
  }
  std::vector<Index> stack;
  for (Index t = 0; t < n_; ++t) {
    auto& row = rows_[t];
    stack.assign(succ[t].begin(), succ[t].end());
    for (Index u : succ[t]) row[u >> 6] |= (1ULL << (u & 63));
    while (!stack.empty()) {
      Index v = stack.back();
      stack.pop_back();
      for (Index w : succ[v])
        if (!bit(row, w)) {
          row[w >> 6] |= (1ULL << (w & 63));
          stack.push_back(w);
        }
    }
    if (reflexive) row[t >> 6] |= (1ULL << (t & 63));
  }
  for (Index t = 0; t < n_; ++t)
    for (Index u = 0; u < n_; ++u)
      if (bit(rows_[t], u)) cols_[u][t >> 6] |= (1ULL << (t & 63));
}

std::set<std::pair<std::string, std::string>> transition_reachability(const PetriNet& net,
                                                                      bool reflexive) {
  ReachabilityMatrix m(net, reflexive);
  std::set<std::pair<std::string, std::string>> out;
  for (Index a = 0; a < m.size(); ++a)
    for (Index b = 0; b < m.size(); ++b)
      if (m.reaches(a, b)) out.emplace(net.transitions()[a], net.transitions()[b]);
  return out;
}

namespace {

// Entry (forward=true) or exit points of a subset given as a transition mask.
IdSet boundary_points(const WorkflowNet& wf, const std::vector<bool>& in, bool entry) {
  const auto& net = wf.net();
  IdSet out;
  for (Index p = 0; p < net.place_count(); ++p) {
    auto inner = entry ? net.place_post(p) : net.place_pre(p);
    auto outer = entry ? net.place_pre(p) : net.place_post(p);
    bool touches = std::any_of(inner.begin(), inner.end(), [&](Index t) { return in[t]; });
    if (!touches) continue;
    bool terminal = entry ? p == wf.source_index() : p == wf.sink_index();
    bool external = std::any_of(outer.begin(), outer.end(), [&](Index t) { return !in[t]; });
    if (terminal || external) out.insert(net.places()[p]);
  }
  return out;
}

}  // namespace

IdSet entry_points(const WorkflowNet& wf, const IdSet& subset) {
  return boundary_points(wf, transition_mask(wf.net(), subset), true);
}

IdSet exit_points(const WorkflowNet& wf, const IdSet& subset) {
  return boundary_points(wf, transition_mask(wf.net(), subset), false);
}

bool places_equivalent(const PetriNet& net, const IdSet& subset, const std::string& p,
                       const std::string& q) {
  auto mask = transition_mask(net, subset);
  auto restrict = [&](std::span<const Index> ts) {
    std::vector<Index> out;
    for (Index t : ts)
      if (mask[t]) out.push_back(t);
    return out;
  };
  Index a = net.place_index(p), b = net.place_index(q);
  return restrict(net.place_pre(a)) == restrict(net.place_pre(b)) &&
         restrict(net.place_post(a)) == restrict(net.place_post(b));
}

bool is_free_choice(const PetriNet& net) {
  for (Index p = 0; p < net.place_count(); ++p) {
    auto consumers = net.place_post(p);
    for (std::size_t i = 1; i < consumers.size(); ++i) {
      auto a = net.transition_pre(consumers[0]);
      auto b = net.transition_pre(consumers[i]);
      if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) return false;
    }
  }
  return true;
}

bool is_state_machine(const PetriNet& net) {
  for (Index t = 0; t < net.transition_count(); ++t)
    if (net.transition_pre(t).size() > 1 || net.transition_post(t).size() > 1) return false;
  return true;
}

bool is_marked_graph(const PetriNet& net) {
  for (Index p = 0; p < net.place_count(); ++p)
    if (net.place_pre(p).size() > 1 || net.place_post(p).size() > 1) return false;
  return true;
}

PetriNet substitute(const PetriNet& host, const std::string& t, const WorkflowNet& sub) {
  if (!host.has_transition(t)) throw NetError("unknown transition: " + t);
  const auto& sn = sub.net();
  for (const auto& p : sn.places())
    if (host.has_node(p)) throw NetError("identifier collision: " + p);
  for (const auto& u : sn.transitions())
    if (host.has_node(u)) throw NetError("identifier collision: " + u);

  NetBuilder b(host);
  IdSet inputs = preset(host, t), outputs = postset(host, t);
  b.remove(t);
  for (const auto& p : sn.places())
    if (p != sub.source() && p != sub.sink()) b.place(p);
  for (Index u = 0; u < sn.transition_count(); ++u) b.transition(sn.transitions()[u], sn.label(u));
  for (const auto& a : sn.arcs()) {
    if (a.source == sub.source()) {
      for (const auto& p : inputs) b.arc(p, a.target);
    } else if (a.target == sub.sink()) {
      for (const auto& p : outputs) b.arc(a.source, p);
    } else {
      b.arc(a.source, a.target);
    }
  }
  return b.build();
}

// ---------------------------------------------------------------------------

NetBuilder::NetBuilder(const PetriNet& net)
    : places_(net.place_set()), transitions_(net.labeled_transitions()), arcs_(net.arcs()) {}

NetBuilder& NetBuilder::place(const std::string& id) {
  if (transitions_.count(id)) throw NetError("identifier already a transition: " + id);
  places_.insert(id);
  return *this;
}

NetBuilder& NetBuilder::transition(const std::string& id, Label label) {
  if (places_.count(id)) throw NetError("identifier already a place: " + id);
  transitions_[id] = std::move(label);
  return *this;
}

NetBuilder& NetBuilder::arc(const std::string& from, const std::string& to) {
  arcs_.insert({from, to});
  return *this;
}

NetBuilder& NetBuilder::remove_arc(const std::string& from, const std::string& to) {
  arcs_.erase({from, to});
  return *this;
}

NetBuilder& NetBuilder::remove(const std::string& id) {
  places_.erase(id);
  transitions_.erase(id);
  for (auto it = arcs_.begin(); it != arcs_.end();) {
    if (it->source == id || it->target == id)
      it = arcs_.erase(it);
    else
      ++it;
  }
  return *this;
}

void FreshIds::reserve(const PetriNet& net) {
  used_.insert(net.places().begin(), net.places().end());
  used_.insert(net.transitions().begin(), net.transitions().end());
}

std::string FreshIds::next(const std::string& kind) {
  for (;;) {
    std::string id = prefix_ + kind + std::to_string(++counters_[kind]);
    if (used_.insert(id).second) return id;
  }
}

}  // namespace wfpowl
