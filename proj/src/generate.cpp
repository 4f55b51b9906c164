#include "powl/generate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace wfpowl {
namespace {

// Draws are derived from raw mt19937_64 output so sequences do not depend on
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

class Generator {
 public:
  explicit Generator(const GenParams& p) : p_(p), rng_(p.seed) {}

  PowlNode node(std::size_t leaves, std::size_t depth) {
    if (leaves == 1) {
      auto i = next_leaf_++;
      auto label = rng_.chance(p_.silent_probability) ? Label::silent()
                                                       : Label::activity("a" + std::to_string(i));
      return PowlNode::leaf("t" + std::to_string(i), std::move(label));
    }
    bool po = rng_.unit() * (p_.partial_order_weight + p_.choice_graph_weight) <
              p_.partial_order_weight;
    std::size_t n = depth + 1 >= p_.max_depth
                        ? leaves
                        : std::min(leaves, rng_.between(2, p_.max_children));
    std::vector<PowlNode> children;
    for (auto k : split(leaves, n)) children.push_back(node(k, depth + 1));
    if (po) return PowlNode::partial_order(random_order(n), std::move(children));
    return PowlNode::choice_graph(random_graph(n), std::move(children));
  }

 private:
  // n positive sizes summing to total.
  std::vector<std::size_t> split(std::size_t total, std::size_t n) {
    std::vector<std::size_t> cuts(total - 1);
    std::iota(cuts.begin(), cuts.end(), 1);
    rng_.shuffle(cuts);
    cuts.resize(n - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> sizes;
    std::size_t prev = 0;
    for (auto c : cuts) {
      sizes.push_back(c - prev);
      prev = c;
    }
    sizes.push_back(total - prev);
    return sizes;
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng_.shuffle(perm);
    return perm;
  }

  // Keeps the expected number of extra edges per node bounded for wide nodes.
  double pair_probability(std::size_t n) const {
    return p_.edge_density * std::min(1.0, 4.0 / static_cast<double>(n));
  }

  OrderStruct random_order(std::size_t n) {
    auto perm = permutation(n);
    const double q = pair_probability(n);
    std::set<std::pair<std::size_t, std::size_t>> rel;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng_.chance(q)) rel.insert({perm[i], perm[j]});
    return OrderStruct(n, rel);
  }

  ChoiceGraphStruct random_graph(std::size_t n) {
    auto perm = permutation(n);
    using C = ChoiceGraphStruct;
    std::set<C::Edge> edges;
    auto node = [&](std::size_t pos) { return static_cast<long>(perm[pos]); };
    for (std::size_t r = 0; r < n; ++r) {
      // one predecessor among start and earlier nodes, one successor among
      // later nodes and end
      std::size_t pred = rng_.below(r + 1);
      edges.insert({pred == 0 ? C::kStart : node(pred - 1), node(r)});
      std::size_t succ = rng_.between(r + 1, n);
      edges.insert({node(r), succ == n ? C::kEnd : node(succ)});
    }
    const double q = pair_probability(n) / 2;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t s = r + 1; s < n; ++s)
        if (rng_.chance(q)) edges.insert({node(r), node(s)});
      if (rng_.chance(p_.edge_density / 2)) edges.insert({C::kStart, node(r)});
      if (rng_.chance(p_.edge_density / 2)) edges.insert({node(r), C::kEnd});
      if (rng_.chance(p_.cycle_probability)) edges.insert({node(r), node(rng_.below(r + 1))});
    }
    return C(n, std::move(edges));
  }

  const GenParams& p_;
  Rng rng_;
  std::size_t next_leaf_ = 0;
};

}  // namespace

void GenParams::validate() const {
  auto prob = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw UnsatisfiableParams(std::string(what) + " not in [0,1]");
  };
  prob(silent_probability, "silent probability");
  prob(cycle_probability, "cycle probability");
  prob(edge_density, "edge density");
  if (leaf_weight < 0 || partial_order_weight < 0 || choice_graph_weight < 0)
    throw UnsatisfiableParams("negative node-kind weight");
  if (target_leaves < 1) throw UnsatisfiableParams("target leaf count must be at least 1");
  if (max_depth < 1) throw UnsatisfiableParams("max depth must be at least 1");
  if (max_children < 2) throw UnsatisfiableParams("composites need at least 2 children");
  if (target_leaves == 1 && leaf_weight == 0)
    throw UnsatisfiableParams("a single leaf is requested but the root is forced to be composite");
  if (target_leaves > 1 && partial_order_weight + choice_graph_weight == 0)
    throw UnsatisfiableParams("several leaves requested but composites are disabled");
}

PowlNode random_powl(const GenParams& params) {
  params.validate();
  return Generator(params).node(params.target_leaves, 0);
}

GeneratedNet generate_separable_net(const GenParams& params) {
  auto model = random_powl(params);
  auto net = powl_to_net(model);
  return {std::move(net), std::move(model)};
}

GeneratedNet generate_with_transitions(std::uint64_t seed, std::size_t transitions,
                                       std::size_t max_depth) {
  GenParams p;
  p.seed = seed;
  p.max_depth = max_depth;
  p.target_leaves = std::max<std::size_t>(1, transitions);
  auto best = generate_separable_net(p);
  auto distance = [&](const GeneratedNet& g) {
    auto got = g.net.net().transition_count();
    return got > transitions ? got - transitions : transitions - got;
  };
  // Routing transitions inflate the count and the structure changes with the
  // leaf count, so a few proportional corrections are made; the closest wins.
  std::set<std::size_t> tried{p.target_leaves};
  auto current = best.net.net().transition_count();
  for (int round = 0; round < 6 && distance(best) > transitions / 20; ++round) {
    auto scaled = std::llround(static_cast<double>(p.target_leaves) * transitions / current);
    p.target_leaves = static_cast<std::size_t>(std::max<long long>(1, scaled));
    if (!tried.insert(p.target_leaves).second) break;
    auto g = generate_separable_net(p);
    current = g.net.net().transition_count();
    if (distance(g) < distance(best)) best = std::move(g);
  }
  return best;
}

std::vector<BenchRow> bench_run(const std::vector<std::size_t>& sizes, std::size_t per_size,
                                std::uint64_t seed_base, const ConversionOptions& opts) {
  std::vector<BenchRow> rows;
  for (auto size : sizes) {
    for (std::size_t i = 0; i < per_size; ++i) {
      BenchRow row;
      row.size = size;
      row.seed = seed_base + i;
      auto g = generate_with_transitions(row.seed, size);
      row.transitions = g.net.net().transition_count();
      row.places = g.net.net().place_count();
      auto start = std::chrono::steady_clock::now();
      auto report = convert(g.net, opts);
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
      row.success = report.success();
      row.po_nodes = report.stats.partial_orders;
      row.cg_nodes = report.stats.choice_graphs;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = std::string(kBenchCsvHeader) + "\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{:.3f},{},{},{}\n", r.size, r.seed, r.transitions, r.places,
                       r.wall_ms, r.success ? 1 : 0, r.po_nodes, r.cg_nodes);
  return out;
}

}  // namespace wfpowl
