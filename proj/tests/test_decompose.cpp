#include <gtest/gtest.h>

#include <random>

#include "powl/behavior.hpp"
#include "powl/decompose.hpp"
#include "powl/generate.hpp"
#include "support.hpp"

using namespace wfpowl;
using namespace testing_support;

namespace {
using C = ChoiceGraphStruct;
using Parts = std::vector<IdSet>;

// a; (b; c)*; x
WorkflowNet loop_net() {
  return make_wf({{"a", "a", {"i"}, {"p1"}}, {"b", "b", {"p1"}, {"p2"}}, {"c", "c", {"p2"}, {"p1"}},
                  {"x", "x", {"p2"}, {"o"}}});
}

bool has(const PartitionCheck& c, PartitionCondition cond) {
  return std::any_of(c.violations.begin(), c.violations.end(),
                     [&](const ConditionViolation& v) { return v.condition == cond; });
}

// Renames every node through a random bijection so that the id order changes.
std::pair<WorkflowNet, std::map<std::string, std::string>> scramble(const WorkflowNet& wf,
                                                                     std::uint64_t seed) {
  const auto& net = wf.net();
  std::vector<std::string> ids(net.places());
  ids.insert(ids.end(), net.transitions().begin(), net.transitions().end());
  std::vector<std::string> fresh;
  for (std::size_t i = 0; i < ids.size(); ++i) fresh.push_back("n" + std::to_string(i));
  std::shuffle(fresh.begin(), fresh.end(), std::mt19937_64(seed));
  std::map<std::string, std::string> fwd, back;
  for (std::size_t i = 0; i < ids.size(); ++i) fwd[ids[i]] = fresh[i], back[fresh[i]] = ids[i];
  NetBuilder b;
  for (const auto& p : net.places()) b.place(fwd[p]);
  for (const auto& t : net.transitions()) b.transition(fwd[t], net.label(t));
  for (const auto& a : net.arcs()) b.arc(fwd[a.source], fwd[a.target]);
  return {WorkflowNet::from(b.build()), back};
}

std::set<IdSet> unscramble(const TransitionPartition& g, std::map<std::string, std::string>& back) {
  std::set<IdSet> out;
  for (const auto& part : g.parts()) {
    IdSet s;
    for (const auto& t : part) s.insert(back[t]);
    out.insert(s);
  }
  return out;
}

std::set<IdSet> as_set(const TransitionPartition& g) { return {g.parts().begin(), g.parts().end()}; }

void expect_projection_ok(const WorkflowNet& w, const std::string& what) {
  EXPECT_TRUE(validate_wf_net(w.net())) << what;
  EXPECT_TRUE(check_safe(w).safe()) << what;
  EXPECT_TRUE(check_sound(w).sound()) << what;
}
}  // namespace

TEST(Decompose, RestrictedReach) {
  auto chain = make_net({{"a", "a", {"p"}, {"q"}}, {"b", "b", {"q"}, {"r"}}});
  EXPECT_EQ(restricted_reach_fwd(chain, "p", "b"), IdSet{"a"});
  EXPECT_EQ(restricted_reach_fwd(chain, "p", "a"), IdSet{});
  EXPECT_EQ(restricted_reach_bwd(chain, "r", "a"), IdSet{"b"});
  EXPECT_EQ(restricted_reach_bwd(chain, "r", "b"), IdSet{});
  auto sp = seq_par().net();
  EXPECT_EQ(restricted_reach_fwd(sp, "p1", "a"), (IdSet{"b", "d"}));
  EXPECT_EQ(restricted_reach_bwd(sp, "p3", "d"), (IdSet{"a", "b"}));
  // the stop transition is never included, even on a cycle
  auto loop = loop_net().net();
  EXPECT_FALSE(restricted_reach_fwd(loop, "p1", "c").count("c"));
  EXPECT_EQ(restricted_reach_fwd(loop, "p1", "c"), (IdSet{"b", "x"}));
}

TEST(Decompose, PoPartitionExamples) {
  EXPECT_EQ(po_partition(seq_par()).parts(), (Parts{{"a"}, {"b"}, {"c"}, {"d"}}));
  EXPECT_EQ(po_partition(seq_xor()).parts(), (Parts{{"a"}, {"b", "c"}, {"d"}}));
  EXPECT_EQ(po_partition(chain3()).parts(), (Parts{{"a"}, {"b"}, {"c"}}));
}

TEST(Decompose, ReflexiveReachNeededForNestedChoice) {
  // a; ((b | c) || e); d: with strict reachability b and c are never grouped
  auto wf = make_wf({{"a", "a", {"i"}, {"p1", "p2"}}, {"b", "b", {"p1"}, {"p3"}}, {"c", "c", {"p1"}, {"p3"}},
                     {"e", "e", {"p2"}, {"p4"}}, {"d", "d", {"p3", "p4"}, {"o"}}});
  auto refl = po_partition(wf, true);
  EXPECT_EQ(refl.parts(), (Parts{{"a"}, {"b", "c"}, {"d"}, {"e"}}));
  EXPECT_TRUE(is_conflict_hiding(wf, refl));
  auto strict = po_partition(wf, false);
  EXPECT_FALSE(is_conflict_hiding(wf, strict));
}

TEST(Decompose, ConflictHiding) {
  auto sx = seq_xor();
  EXPECT_TRUE(is_conflict_hiding(sx, TransitionPartition({{"a"}, {"b", "c"}, {"d"}})));
  auto single = is_conflict_hiding(sx, TransitionPartition({{"a"}, {"b"}, {"c"}, {"d"}}));
  EXPECT_TRUE(has(single, PartitionCondition::NoTopLevelXorSplit));
  bool at_p1 = false;
  for (const auto& v : single.violations)
    if (v.condition == PartitionCondition::NoTopLevelXorSplit)
      at_p1 |= std::count(v.places.begin(), v.places.end(), "p1") > 0;
  EXPECT_TRUE(at_p1);

  auto fig9a = fixture("fig9a");
  auto g = po_partition(fig9a);
  auto check = is_conflict_hiding(fig9a, g);
  EXPECT_TRUE(has(check, PartitionCondition::SingleExit));
  bool on_ab = false;
  for (const auto& v : check.violations)
    if (v.condition == PartitionCondition::SingleExit && g.part(v.parts.at(0)) == IdSet{"a", "b"}) {
      on_ab = true;
      ASSERT_EQ(v.places.size(), 2u);
      EXPECT_FALSE(places_equivalent(fig9a.net(), {"a", "b"}, v.places[0], v.places[1]));
    }
  EXPECT_TRUE(on_ab);
  auto exits = exit_points(fig9a, {"a", "b"});
  EXPECT_TRUE(exits.count("p3") && exits.count("p4"));
}

TEST(Decompose, Normalize) {
  auto clean = chain3();
  EXPECT_EQ(normalize(clean.net(), "i", "o").net(), clean.net());
  // loop body: p1 is fed back by c, so a silent transition and a place go before it
  auto ln = make_net({{"b", "b", {"p1"}, {"p2"}}, {"c", "c", {"p2"}, {"p1"}}, {"x", "x", {"p2"}, {"o"}}});
  auto n1 = normalize(ln, "p1", "o");
  EXPECT_EQ(n1.net().transition_count(), ln.transition_count() + 1);
  EXPECT_EQ(n1.net().place_count(), ln.place_count() + 1);
  EXPECT_EQ(n1.net().arc_count(), ln.arc_count() + 2);
  EXPECT_EQ(preset(n1.net(), "p1").size(), 2u);
  auto body = make_net({{"b", "b", {"p1"}, {"p2"}}, {"c", "c", {"p2"}, {"p1"}}});
  auto both = normalize(body, "p1", "p2");
  EXPECT_EQ(both.net().transition_count(), body.transition_count() + 2);
  EXPECT_EQ(both.net().arc_count(), body.arc_count() + 4);
}

TEST(Decompose, PoProject) {
  auto proj = po_project(seq_xor(), {"b", "c"});
  auto expected = make_net({{"b", "b", {"s"}, {"e"}}, {"c", "c", {"s"}, {"e"}}});
  EXPECT_TRUE(isomorphic(proj.net(), expected));
  auto base = po_project(chain3(), {"b"});
  EXPECT_TRUE(isomorphic(base.net(), make_net({{"b", "b", {"s"}, {"e"}}})));
}

TEST(Decompose, ExecutionOrder) {
  auto sp = seq_par();
  auto o = execution_order(sp, po_partition(sp));
  // parts a=0, b=1, c=2, d=3
  EXPECT_EQ(o.relation(), (std::set<std::pair<std::size_t, std::size_t>>{
                              {0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 3}}));
  // b and c share no interface place
  EXPECT_FALSE(o.precedes(1, 2));
  EXPECT_FALSE(o.precedes(2, 1));
  EXPECT_THROW(execution_order(loop_net(), TransitionPartition({{"a"}, {"b"}, {"c"}, {"x"}})), CyclicOrder);
}

TEST(Decompose, CgPartitionExamples) {
  EXPECT_EQ(cg_partition(seq_par()).parts(), (Parts{{"a", "b", "c", "d"}}));
  EXPECT_EQ(cg_partition(seq_par(), CgAvoidance::SplitOnly).parts(), (Parts{{"a", "b", "c", "d"}}));
  EXPECT_EQ(cg_partition(loop_net()).parts(), (Parts{{"a"}, {"b"}, {"c"}, {"x"}}));
  EXPECT_EQ(cg_partition(seq_xor()).parts(), (Parts{{"a"}, {"b"}, {"c"}, {"d"}}));
}

TEST(Decompose, ConcurrencyHiding) {
  auto ln = loop_net();
  EXPECT_TRUE(is_concurrency_hiding(ln, TransitionPartition({{"a"}, {"b"}, {"c"}, {"x"}})));
  auto sp = seq_par();
  auto bad = is_concurrency_hiding(sp, TransitionPartition({{"a"}, {"b", "c"}, {"d"}}));
  EXPECT_TRUE(has(bad, PartitionCondition::NotSingleEntryExit));
}

TEST(Decompose, CgProject) {
  auto ln = loop_net();
  auto body = cg_project(ln, {"b", "c"});
  EXPECT_EQ(body.net().transition_count(), 4u);
  std::size_t silent = 0;
  for (const auto& t : body.net().transitions()) silent += body.net().label(t).is_silent();
  EXPECT_EQ(silent, 2u);
  expect_projection_ok(body, "loop body");
  auto sub = cg_project(chain3(), {"b"});
  EXPECT_TRUE(isomorphic(sub.net(), make_net({{"b", "b", {"p1"}, {"p2"}}})));
  EXPECT_THROW(cg_project(seq_par(), {"b", "c"}), DecompositionError);
}

TEST(Decompose, ExecutionFlow) {
  auto sx = seq_xor();
  auto level = po_project(sx, {"b", "c"});
  auto f = execution_flow(level, cg_partition(level));
  EXPECT_EQ(f.edges(), (std::set<C::Edge>{{C::kStart, 0}, {C::kStart, 1}, {0, C::kEnd}, {1, C::kEnd}}));
  auto chain = execution_flow(chain3(), cg_partition(chain3()));
  EXPECT_EQ(chain.edges(), (std::set<C::Edge>{{C::kStart, 0}, {0, 1}, {1, 2}, {2, C::kEnd}}));
  auto ln = loop_net();
  auto lf = execution_flow(ln, cg_partition(ln));
  // a=0, b=1, c=2, x=3
  EXPECT_EQ(lf.edges(), (std::set<C::Edge>{{C::kStart, 0}, {0, 1}, {1, 2}, {2, 1}, {1, 3}, {3, C::kEnd}}));
}

TEST(Decompose, PartitionsIgnoreIdentifierOrder) {
  std::vector<WorkflowNet> nets;
  for (auto name : {"fig1a", "fig2", "fig8a", "fig9a", "fig9b", "fig9c", "fig9d"}) nets.push_back(fixture(name));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) nets.push_back(generate_with_transitions(seed, 30).net);
  for (std::size_t k = 0; k < nets.size(); ++k) {
    auto po = as_set(po_partition(nets[k])), cg = as_set(cg_partition(nets[k]));
    for (std::uint64_t s = 1; s <= 3; ++s) {
      auto [renamed, back] = scramble(nets[k], s * 7919 + k);
      EXPECT_EQ(unscramble(po_partition(renamed), back), po) << k;
      EXPECT_EQ(unscramble(cg_partition(renamed), back), cg) << k;
    }
  }
}

TEST(Decompose, ValidPartitionsProjectToSoundNets) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto wf = generate_with_transitions(seed, 5 + seed % 25).net;
    auto po = po_partition(wf);
    if (po.size() > 1 && is_conflict_hiding(wf, po)) {
      std::size_t total = 0, extra = 0;
      for (const auto& part : po.parts()) {
        auto proj = po_project(wf, part);
        expect_projection_ok(proj, "po seed " + std::to_string(seed));
        total += proj.net().transition_count();
        for (const auto& t : proj.net().transitions()) extra += !part.count(t);
      }
      EXPECT_EQ(total, wf.net().transition_count() + extra);
      EXPECT_NO_THROW(execution_order(wf, po));
    }
    auto cg = cg_partition(wf);
    if (cg.size() > 1 && is_concurrency_hiding(wf, cg)) {
      for (const auto& part : cg.parts())
        expect_projection_ok(cg_project(wf, part), "cg seed " + std::to_string(seed));
      auto flow = execution_flow(wf, cg);
      EXPECT_FALSE(flow.problem().has_value());
    }
  }
}
