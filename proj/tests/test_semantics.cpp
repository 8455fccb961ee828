#include <gtest/gtest.h>

#include "support.hpp"

using namespace rpntest;

namespace {

RpnState run(const RpnNet& net, Semantics sem, const std::string& script) {
  RpnState st = initialState(net);
  for (const auto& it : parseScript(script)) st = apply(net, st, sem, resolveMove(net, st, sem, it));
  return st;
}

RpnState fig3Full(const RpnNet& net) { return run(net, Semantics::OOC, "t1;t2;t3;t4"); }

}  // namespace

TEST(Semantics, BondingEffect) {
  RpnNet net = fixture("fig2");
  EXPECT_EQ(bondingEffect(net, trans(net, "t3"), sel(net, {{"p4", "a1"}, {"p4", "b1"}})),
            std::vector<BondInstance>{bond(net, "a1", "b1")});
  EXPECT_TRUE(bondingEffect(net, trans(net, "t1"), sel(net, {{"p1", "a1"}})).empty());
  EXPECT_EQ(bondingEffect(net, trans(net, "t2"), sel(net, {{"p2", "b1"}, {"p3", "c1"}})),
            std::vector<BondInstance>{bond(net, "b1", "c1")});
}

TEST(Semantics, ForwardEnabledSelections) {
  RpnNet net = fixture("fig2");
  RpnState s0 = initialState(net);
  auto s = forwardEnabled(net, s0, trans(net, "t1"));
  std::vector<Selection> want = {sel(net, {{"p1", "a1"}}), sel(net, {{"p1", "a2"}})};
  EXPECT_EQ(s, want);
  EXPECT_EQ(forwardEnabled(net, s0, trans(net, "t2")).size(), 4u);
  EXPECT_TRUE(forwardEnabled(net, s0, trans(net, "t3")).empty());
}

TEST(Semantics, BondedPairBlocksOnePlaceBonding) {
  RpnNet net = parseRpn(
      "bases a b\nplaces p q\ntransitions t\narc p -> t : a b !a-b\narc t -> q : a-b\nmarking p : a1 b1 a1-b1\n");
  EXPECT_TRUE(forwardEnabled(net, initialState(net), 0).empty());
}

TEST(Semantics, FigureTwoForward) {
  RpnNet net = fixture("fig2");
  RpnState s = run(net, Semantics::OOC, "t1:a1;t2:b1,c1");
  Marking want = {bag(net, {"a2"}), bag(net, {"b2"}), bag(net, {"c2"}), bag(net, {"a1", "b1", "c1", "b1-c1"}), {}};
  EXPECT_EQ(s.marking, want);
  EXPECT_EQ(s.history[trans(net, "t1")], (std::vector<Occurrence>{{1, sel(net, {{"p1", "a1"}})}}));
  EXPECT_EQ(s.history[trans(net, "t2")], (std::vector<Occurrence>{{2, sel(net, {{"p2", "b1"}, {"p3", "c1"}})}}));
  EXPECT_TRUE(s.history[trans(net, "t3")].empty());

  RpnState r = run(net, Semantics::OOC, "t2:b1,c1;t1:a1");
  EXPECT_EQ(r.marking, want);
  EXPECT_EQ(r.history[trans(net, "t1")][0].k, 2);
  EXPECT_EQ(r.history[trans(net, "t2")][0].k, 1);
}

TEST(Semantics, FigureThreeForward) {
  RpnNet net = fixture("fig3");
  RpnState s = fig3Full(net);
  for (int p = 0; p < net.placeCount(); ++p)
    if (net.places[p] != "p9") {
      EXPECT_TRUE(s.marking[p].empty()) << net.places[p];
    }
  EXPECT_EQ(s.marking[place(net, "p9")],
            bag(net, {"a1", "b1", "c1", "d1", "e1", "a1-b1", "c1-d1", "a1-c1", "a1-e1"}));
}

TEST(Semantics, FireRejectsDisabledSelection) {
  RpnNet net = fixture("fig2");
  EXPECT_THROW(fireForward(net, initialState(net), trans(net, "t1"), sel(net, {{"p1", "b1"}})),
               std::invalid_argument);
}

TEST(Semantics, BacktrackingEnabledness) {
  RpnNet net = fixture("fig2");
  RpnState s = run(net, Semantics::BT, "t1:a1;t2:b1,c1");
  EXPECT_EQ(btEnabled(s, trans(net, "t2")).size(), 1u);
  EXPECT_EQ(btEnabled(s, trans(net, "t2"))[0].k, 2);
  EXPECT_TRUE(btEnabled(s, trans(net, "t1")).empty());
  EXPECT_TRUE(btEnabled(initialState(net), trans(net, "t1")).empty());
  RpnState r = run(net, Semantics::BT, "t2:b1,c1;t1:a1");
  EXPECT_FALSE(btEnabled(r, trans(net, "t1")).empty());
}

TEST(Semantics, ReverseBt) {
  RpnNet net = fixture("fig2");
  RpnState s = run(net, Semantics::BT, "t1:a1;t2:b1,c1");
  RpnState r = reverseBt(net, s, trans(net, "t2"), 2);
  EXPECT_EQ(r.marking[place(net, "p2")], bag(net, {"b1", "b2"}));
  EXPECT_EQ(r.marking[place(net, "p3")], bag(net, {"c1", "c2"}));
  EXPECT_EQ(r.marking[place(net, "p4")], bag(net, {"a1"}));
  RpnState one = run(net, Semantics::BT, "t1:a1");
  EXPECT_EQ(reverseBt(net, one, trans(net, "t1"), 1), initialState(net));
  EXPECT_THROW(reverseBt(net, s, trans(net, "t1"), 1), std::invalid_argument);
}

TEST(Semantics, CausalEnabledness) {
  RpnNet f2 = fixture("fig2");
  RpnState s = run(f2, Semantics::C, "t1:a1;t2:b1,c1");
  EXPECT_FALSE(coEnabled(s, trans(f2, "t1")).empty());
  EXPECT_FALSE(coEnabled(s, trans(f2, "t2")).empty());
  EXPECT_TRUE(coEnabled(initialState(f2), trans(f2, "t1")).empty());
  RpnNet f3 = fixture("fig3");
  EXPECT_TRUE(coEnabled(fig3Full(f3), trans(f3, "t1")).empty());
  EXPECT_FALSE(coEnabled(fig3Full(f3), trans(f3, "t4")).empty());
}

TEST(Semantics, ReverseCoShiftsHistory) {
  RpnNet net = fixture("fig2");
  RpnState s = run(net, Semantics::C, "t1:a1;t2:b1,c1");
  RpnState r = reverseCo(net, s, trans(net, "t1"), 1);
  EXPECT_EQ(r.history[trans(net, "t2")][0].k, 1);
  EXPECT_TRUE(r.history[trans(net, "t1")].empty());
  EXPECT_EQ(reverseCo(net, s, trans(net, "t2"), 2), reverseBt(net, s, trans(net, "t2"), 2));
  RpnState a = reverseCo(net, reverseCo(net, s, trans(net, "t1"), 1), trans(net, "t2"), 1);
  RpnState b = reverseCo(net, reverseCo(net, s, trans(net, "t2"), 2), trans(net, "t1"), 1);
  EXPECT_EQ(a, initialState(net));
  EXPECT_EQ(b, initialState(net));
}

TEST(Semantics, OutOfOrderEnabledness) {
  RpnNet f3 = fixture("fig3");
  RpnState s = fig3Full(f3);
  for (int t = 0; t < f3.transitionCount(); ++t) EXPECT_EQ(oEnabled(s, t).size(), 1u);
  EXPECT_TRUE(oEnabled(initialState(f3), 0).empty());
  RpnNet f2 = fixture("fig2");
  EXPECT_EQ(oEnabled(run(f2, Semantics::OOC, "t1:a1;t1:a2"), trans(f2, "t1")).size(), 2u);
}

TEST(Semantics, LastUser) {
  RpnNet net = fixture("fig3");
  RpnState s = fig3Full(net);
  int t3 = trans(net, "t3"), t1 = trans(net, "t1");
  Bag p9 = s.marking[place(net, "p9")];
  eraseSorted(p9.bonds, bond(net, "a1", "c1"));
  History h = detail::removeAndShift(s.history, t3, 3);
  EXPECT_EQ(lastUser(con(inst(net, "c1"), p9), h), trans(net, "t2"));
  EXPECT_FALSE(lastUser(bag(net, {"a1"}), History(net.transitionCount())));
  History h1 = detail::removeAndShift(s.history, t1, 1);
  EXPECT_FALSE(lastUser(bag(net, {"b1"}), h1));
}

TEST(Semantics, ReverseOocFigureThree) {
  RpnNet net = fixture("fig3");
  RpnState s = fig3Full(net);
  RpnState r3 = reverseOoc(net, s, trans(net, "t3"), 3);
  EXPECT_EQ(r3.marking[place(net, "p6")], bag(net, {"c1", "d1", "c1-d1"}));
  EXPECT_EQ(r3.marking[place(net, "p9")], bag(net, {"e1", "a1", "b1", "a1-e1", "a1-b1"}));
  RpnState r1 = reverseOoc(net, s, trans(net, "t1"), 1);
  EXPECT_EQ(r1.marking[place(net, "p2")], bag(net, {"b1"}));
  EXPECT_EQ(r1.marking[place(net, "p9")], bag(net, {"d1", "c1", "a1", "e1", "c1-d1", "a1-c1", "a1-e1"}));
  EXPECT_EQ(reverseOoc(net, s, trans(net, "t4"), 4), reverseBt(net, s, trans(net, "t4"), 4));
}

TEST(Semantics, InvariantsOnRandomTraces) {
  std::mt19937 rng(2024);
  for (int round = 0; round < 300; ++round) {
    RpnNet net = randomNet(rng, 2 + int(rng() % 3));
    ASSERT_TRUE(validateLowLevel(net).empty());
    Semantics sem = Semantics(rng() % 3);
    RpnState st = initialState(net);
    auto universe = allInstances(st.marking);
    for (int step = 0; step < 10; ++step) {
      for (int t = 0; t < net.transitionCount(); ++t) {
        auto bt = btEnabled(st, t), co = coEnabled(st, t), o = oEnabled(st, t);
        for (const auto& x : bt) ASSERT_NE(std::find(co.begin(), co.end(), x), co.end());
        for (const auto& x : co) ASSERT_NE(std::find(o.begin(), o.end(), x), o.end());
      }
      auto mv = randomMove(rng, net, st, sem);
      if (!mv) break;
      RpnState next = apply(net, st, sem, *mv);
      if (mv->forward) {
        ASSERT_EQ(reverseBt(net, next, mv->t, maxK(next.history)), st);
      }
      st = next;
      ASSERT_EQ(allInstances(st.marking), universe);
      std::vector<int> ks;
      for (const auto& v : st.history)
        for (const auto& occ : v) ks.push_back(occ.k);
      std::sort(ks.begin(), ks.end());
      for (std::size_t i = 0; i < ks.size(); ++i) ASSERT_EQ(ks[i], int(i + 1));
      for (const auto& b : st.marking)
        for (const auto& bd : b.bonds) ASSERT_TRUE(b.has(bd.x) && b.has(bd.y));
    }
  }
}

TEST(Semantics, CausalityAgreesWithStructuralOrder) {
  std::mt19937 rng(99);
  for (int round = 0; round < 200; ++round) {
    RpnNet net = randomNet(rng, 2 + int(rng() % 4));
    Order o = transOrder(net);
    RpnState st = initialState(net);
    std::vector<std::pair<int, std::vector<BaseInstance>>> log;
    for (int step = 0; step < 8; ++step) {
      std::vector<Move> fwd;
      for (const auto& m : enabledMoves(net, st, Semantics::BT))
        if (m.forward) fwd.push_back(m);
      if (fwd.empty()) break;
      Move mv = fwd[rng() % fwd.size()];
      auto used = selectedInstances(mv.sel);
      normalize(used);
      for (const auto& [earlier, inst] : log)
        if (intersects(inst, used)) {
          ASSERT_FALSE(o.trans(mv.t, earlier));
        }
      log.push_back({mv.t, used});
      st = apply(net, st, Semantics::BT, mv);
    }
  }
}
