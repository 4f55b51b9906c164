#include <gtest/gtest.h>

#include "powl/generate.hpp"
#include "support.hpp"

using namespace wfpowl;
using namespace testing_support;

namespace {
Marking at(const PetriNet& net, std::initializer_list<const char*> places) {
  Marking m{std::vector<std::uint8_t>(net.place_count(), 0)};
  for (auto p : places) ++m.tokens[net.place_index(p)];
  return m;
}
}  // namespace

TEST(Behavior, EnabledAndFire) {
  auto base = make_wf({{"t", "a", {"i"}, {"o"}}});
  const auto& bn = base.net();
  EXPECT_EQ(enabled_ids(bn, at(bn, {"i"})), IdSet{"t"});
  EXPECT_EQ(enabled_ids(bn, at(bn, {})), IdSet{});
  EXPECT_EQ(fire(bn, at(bn, {"i"}), "t"), at(bn, {"o"}));
  EXPECT_THROW(fire(bn, at(bn, {"o"}), "t"), NotEnabled);

  auto sp = seq_par();
  const auto& n = sp.net();
  EXPECT_EQ(fire(n, at(n, {"i"}), "a"), at(n, {"p1", "p2"}));
  EXPECT_FALSE(enabled_ids(n, at(n, {"p3"})).count("d"));

  auto loop = make_wf({{"s", "s", {"i"}, {"p"}}, {"x", "x", {"p"}, {"q"}}, {"y", "y", {"q"}, {"p"}},
                       {"e", "e", {"p"}, {"o"}}});
  const auto& ln = loop.net();
  auto m0 = fire(ln, at(ln, {"i"}), "s");
  EXPECT_EQ(fire(ln, fire(ln, m0, "x"), "y"), m0);
}

TEST(Behavior, ReachabilityGraph) {
  auto base = reachability_graph(make_wf({{"t", "a", {"i"}, {"o"}}}));
  EXPECT_EQ(base.states.size(), 2u);
  EXPECT_EQ(base.edges.size(), 1u);
  EXPECT_TRUE(base.complete());
  // [i], [p1,p2], [p3,p2], [p1,p4], [p3,p4], [o]
  EXPECT_EQ(reachability_graph(seq_par()).states.size(), 6u);
}

TEST(Behavior, UnsafeWitness) {
  // a puts a token into p twice around the loop through q
  auto unsafe = make_wf({{"a", "a", {"i"}, {"p", "q"}}, {"b", "b", {"q"}, {"p", "q"}},
                         {"c", "c", {"p", "q"}, {"o"}}});
  auto g = reachability_graph(unsafe);
  EXPECT_EQ(g.truncated, Truncation::Unsafe);
  ASSERT_TRUE(g.unsafe_witness);
  auto v = check_safe(unsafe);
  EXPECT_EQ(v.status, Verdict::No);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->as_multiset(unsafe.net()).at("p"), 2);
  EXPECT_EQ(v.firing_sequence, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(check_safe(chain3()).safe());
}

TEST(Behavior, Soundness) {
  EXPECT_TRUE(check_sound(fixture("fig1a")).sound());
  EXPECT_TRUE(check_sound(make_wf({{"t", "a", {"i"}, {"o"}}})).sound());
  // x needs a token in q that is never produced
  auto dead = make_wf({{"t", "a", {"i"}, {"o"}}, {"s", "b", {"i"}, {"q"}}, {"x", "c", {"q", "r"}, {"o"}},
                       {"y", "d", {"q"}, {"r2"}}, {"z", "e", {"r2"}, {"o"}}, {"w", "f", {"i"}, {"r"}},
                       {"v", "g", {"r"}, {"o"}}});
  auto v = check_sound(dead);
  EXPECT_EQ(v.status, Verdict::No);
  EXPECT_EQ(v.violated, SoundnessClause::DeadTransition);
  EXPECT_EQ(v.witness, "x");
  auto unsound = fixture("unsound");
  EXPECT_EQ(check_sound(unsound).status, Verdict::No);
  auto tight = check_sound(fixture("fig1a"), 2);
  EXPECT_EQ(tight.status, Verdict::Unknown);
}

TEST(Behavior, EnumerateLanguageExamples) {
  auto base = enumerate_language(make_wf({{"t", "a", {"i"}, {"o"}}}), 3);
  EXPECT_EQ(base.traces, (std::set<Trace>{{"a"}}));
  auto x = enumerate_language(make_wf({{"a", "a", {"i"}, {"o"}}, {"b", "b", {"i"}, {"o"}}}), 3);
  EXPECT_EQ(x.traces, (std::set<Trace>{{"a"}, {"b"}}));
  auto diamond = make_wf({{"s", "", {"i"}, {"p", "q"}}, {"a", "a", {"p"}, {"p2"}},
                          {"b", "b", {"q"}, {"q2"}}, {"e", "", {"p2", "q2"}, {"o"}}});
  EXPECT_EQ(enumerate_language(diamond, 4).traces, (std::set<Trace>{{"a", "b"}, {"b", "a"}}));
  EXPECT_EQ(enumerate_language(diamond, 1).traces, std::set<Trace>{});
}

TEST(Behavior, EnumerateLanguageAgainstBruteForce) {
  // silent loop: tau cycles must not diverge and add nothing
  auto silent_loop = make_wf({{"a", "a", {"i"}, {"p"}}, {"t1", "", {"p"}, {"q"}}, {"t2", "", {"q"}, {"p"}},
                              {"b", "b", {"p"}, {"o"}}});
  EXPECT_EQ(enumerate_language(silent_loop, 5).traces, (std::set<Trace>{{"a", "b"}}));
  for (auto name : {"fig1a", "fig2", "fig8a", "fig9a", "fig9b", "fig9c", "fig9d"}) {
    auto wf = fixture(name);
    for (std::size_t len : {3u, 5u}) {
      EXPECT_EQ(enumerate_language(wf, len).traces, brute_force_net_language(wf, len, 4 * len + 8))
          << name << " L=" << len;
    }
  }
}

TEST(Behavior, LanguageMonotoneInBound) {
  auto wf = fixture("fig1a");
  auto small = enumerate_language(wf, 6), large = enumerate_language(wf, 9);
  for (const auto& t : small.traces) EXPECT_TRUE(large.contains(t));
  EXPECT_EQ(large.restricted(6).traces, small.traces);
}

TEST(Behavior, BoundedEqual) {
  TraceSet a{{{"a"}, {"a", "b"}}, 3}, b{{{"a"}, {"a", "b"}}, 3};
  EXPECT_TRUE(bounded_equal(a, b).equal);
  b.traces.insert({"c"});
  auto eq = bounded_equal(a, b);
  EXPECT_FALSE(eq.equal);
  EXPECT_EQ(*eq.counterexample, (Trace{"c"}));
  EXPECT_FALSE(eq.counterexample_in_left);
  TraceSet c{{{"a"}, {"a", "b"}, {"a", "b", "c"}}, 3}, d{{{"a"}, {"a", "b"}}, 2};
  EXPECT_TRUE(bounded_equal(c, d).equal);
  EXPECT_EQ(bounded_equal(c, d).bound, 2u);
}

TEST(Behavior, GeneratedNetsSafeAndSound) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GenParams p;
    p.seed = seed;
    p.target_leaves = 3 + seed % 20;
    auto g = generate_separable_net(p);
    EXPECT_TRUE(check_safe(g.net).safe()) << seed;
    EXPECT_TRUE(check_sound(g.net).sound()) << seed;
  }
}
