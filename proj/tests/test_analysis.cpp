#include <gtest/gtest.h>

#include "support.hpp"

using namespace rpntest;

namespace {

using Matrix = std::vector<std::vector<char>>;

Matrix arcMatrix(const RpnNet& net) {
  int P = net.placeCount(), N = P + net.transitionCount();
  Matrix m(N, std::vector<char>(N, 0));
  for (int t = 0; t < net.transitionCount(); ++t) {
    for (const auto& [p, l] : net.pre[t]) m[p][P + t] = 1;
    for (const auto& [p, l] : net.post[t]) m[P + t][p] = 1;
  }
  return m;
}

// Oracle: Floyd-Warshall transitive closure of the arc relation.
Matrix closure(Matrix m) {
  int N = int(m.size());
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (m[i][k] && m[k][j]) m[i][j] = 1;
  return m;
}

// Oracle for the neighbourhood of BT/C: one or two arcs away in either direction.
std::vector<int> twoStep(const Matrix& a, int x) {
  int N = int(a.size());
  std::vector<int> r;
  for (int y = 0; y < N; ++y) {
    bool near = a[x][y] || a[y][x];
    for (int z = 0; z < N && !near; ++z) near = (a[x][z] && a[z][y]) || (a[y][z] && a[z][x]);
    if (near) r.push_back(y);
  }
  return r;
}

std::vector<int> withT0(std::vector<int> v) {
  v.insert(v.begin(), kT0);
  return v;
}

std::vector<int> transitionsIn(const RpnNet& net, const std::vector<int>& nodes) {
  std::vector<int> r;
  for (int x : nodes)
    if (x >= net.placeCount()) r.push_back(x - net.placeCount());
  return r;
}

std::vector<int> placesIn(const RpnNet& net, const std::vector<int>& nodes) {
  std::vector<int> r;
  for (int x : nodes)
    if (x < net.placeCount()) r.push_back(x);
  return r;
}

}  // namespace

TEST(Analysis, ClassifiesFigureTwo) {
  RpnNet net = fixture("fig2");
  EXPECT_EQ(classify(net, trans(net, "t1")), TransitionKind::TRN);
  EXPECT_EQ(classify(net, trans(net, "t2")), TransitionKind::BC2);
  EXPECT_EQ(classify(net, trans(net, "t3")), TransitionKind::BC1);
}

TEST(Analysis, TwoOutputPlacesMatchNoKind) {
  RpnNet net = fixture("fig2");
  int t = trans(net, "t1");
  net.post[t][place(net, "p5")] = net.post[t].begin()->second;
  EXPECT_FALSE(tryClassify(net, t));
  EXPECT_THROW(classify(net, t), std::invalid_argument);
}

TEST(Analysis, FixturesAreLowLevel) {
  EXPECT_TRUE(validateLowLevel(fixture("fig2")).empty());
  EXPECT_TRUE(validateLowLevel(fixture("fig3")).empty());
  EXPECT_TRUE(validateLowLevel(fixture("example1")).empty());
}

TEST(Analysis, BaseLossViolatesFirstCondition) {
  RpnNet net = fixture("fig2");
  int t = trans(net, "t3");
  ArcLabel& in = net.pre[t][place(net, "p4")];
  in.bases = {*net.findBase("a")};
  auto v = validateLowLevel(net);
  ASSERT_FALSE(v.empty());
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.rule == "L1"; }));
}

TEST(Analysis, MissingNegatedBondViolatesFourthCondition) {
  RpnNet net = parseRpn(
      "bases a b\nplaces p q\ntransitions t\narc p -> t : a b\narc t -> q : a-b\nmarking p : a1 b1\n");
  auto v = validateLowLevel(net);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "L4");
}

TEST(Analysis, CycleIsReported) {
  RpnNet net = parseRpn(
      "bases a\nplaces p q\ntransitions t u\narc p -> t : a\narc t -> q : a\narc q -> u : a\narc u -> p : a\n");
  EXPECT_FALSE(isAcyclic(net));
  auto v = validateLowLevel(net);
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.rule == "acyclic"; }));
  EXPECT_THROW(transOrder(net), std::invalid_argument);
}

TEST(Analysis, OrdersOnFigures) {
  RpnNet f2 = fixture("fig2");
  Order o = transOrder(f2);
  int t1 = trans(f2, "t1"), t2 = trans(f2, "t2"), t3 = trans(f2, "t3");
  EXPECT_TRUE(o.trans(t1, t3));
  EXPECT_TRUE(o.trans(t2, t3));
  EXPECT_FALSE(o.trans(t1, t2));
  EXPECT_FALSE(o.trans(t2, t1));

  RpnNet f3 = fixture("fig3");
  Order o3 = transOrder(f3);
  EXPECT_TRUE(o3.trans(trans(f3, "t1"), trans(f3, "t3")));
  EXPECT_TRUE(o3.trans(trans(f3, "t3"), trans(f3, "t4")));
  EXPECT_TRUE(o3.trans(trans(f3, "t1"), trans(f3, "t4")));
  EXPECT_TRUE(o3.trans(trans(f3, "t2"), trans(f3, "t3")));

  RpnNet empty;
  EXPECT_TRUE(transOrder(empty).lt.empty());
}

TEST(Analysis, OrderMatchesClosureOracle) {
  std::mt19937 rng(11);
  std::vector<RpnNet> nets = {fixture("fig2"), fixture("fig3")};
  for (int i = 0; i < 100; ++i) nets.push_back(randomNet(rng, 1 + int(rng() % 5)));
  for (const auto& net : nets) {
    Matrix a = arcMatrix(net), c = closure(a);
    Order o = transOrder(net);
    ASSERT_EQ(o.lt, c);
    for (std::size_t x = 0; x < c.size(); ++x) ASSERT_FALSE(o.lt[x][x]);
    auto adj = directOrder(net);
    for (std::size_t x = 0; x < adj.size(); ++x)
      for (int y : adj[x]) ASSERT_TRUE(a[x][y]);
  }
}

TEST(Analysis, RenumberSortsTopologically) {
  RpnNet net = fixture("fig2");
  // Relabel so the one-place bonding transition comes first.
  RpnNet shuffled = net;
  std::vector<int> perm = {2, 0, 1};
  for (int i = 0; i < 3; ++i) {
    shuffled.transitions[i] = net.transitions[perm[i]];
    shuffled.pre[i] = net.pre[perm[i]];
    shuffled.post[i] = net.post[perm[i]];
  }
  EXPECT_FALSE(isRenumbered(shuffled));
  RpnNet r = renumber(shuffled);
  EXPECT_TRUE(isRenumbered(r));
  EXPECT_EQ(r.transitions.back(), "t3");
  EXPECT_EQ(renumber(r), r);
  EXPECT_EQ(renumber(net), net);
  RpnNet single = parseRpn("bases a\nplaces p q\ntransitions t\narc p -> t : a\narc t -> q : a\n");
  EXPECT_EQ(renumber(single), single);
}

TEST(Analysis, RenumberRespectsOrderOnRandomNets) {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    RpnNet net = randomNet(rng, 1 + int(rng() % 5));
    std::vector<int> perm(net.transitionCount());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    RpnNet s = net;
    for (int t = 0; t < net.transitionCount(); ++t) {
      s.transitions[t] = net.transitions[perm[t]];
      s.pre[t] = net.pre[perm[t]];
      s.post[t] = net.post[perm[t]];
    }
    RpnNet r = renumber(s);
    Order o = transOrder(r);
    for (int a = 0; a < r.transitionCount(); ++a)
      for (int b = 0; b < r.transitionCount(); ++b)
        if (o.trans(a, b)) {
          ASSERT_LT(a, b);
        }
    ASSERT_EQ(renumber(r), r);
  }
}

TEST(Analysis, DependencySetsOfFigureTwo) {
  RpnNet net = fixture("fig2");
  int t1 = trans(net, "t1"), t2 = trans(net, "t2"), t3 = trans(net, "t3");
  auto ooc = dependencySets(net, Semantics::OOC);
  EXPECT_EQ(ooc.dpc[t1], withT0({t3}));
  EXPECT_EQ(ooc.dph[t1], withT0({t3}));
  EXPECT_EQ(ooc.dpc[t2], withT0({t3}));
  EXPECT_EQ(ooc.dpc[t3], withT0({t1, t2}));
  std::vector<int> all5 = {0, 1, 2, 3, 4};
  EXPECT_EQ(ooc.rin[t3], all5);

  auto bt = dependencySets(net, Semantics::BT);
  EXPECT_EQ(bt.dpc[t1], withT0({t2, t3}));
  EXPECT_EQ(bt.dpc[t3], withT0({t1, t2}));
}

TEST(Analysis, DependencySetsMatchOracles) {
  std::mt19937 rng(3);
  std::vector<RpnNet> nets = {fixture("fig2"), fixture("fig3")};
  for (int i = 0; i < 60; ++i) nets.push_back(randomNet(rng, 1 + int(rng() % 5)));
  for (const auto& net : nets) {
    Matrix a = arcMatrix(net), c = closure(a);
    int P = net.placeCount(), T = net.transitionCount();
    for (Semantics sem : {Semantics::BT, Semantics::C, Semantics::OOC}) {
      auto d = dependencySets(net, sem);
      for (int t = 0; t < T; ++t) {
        int x = P + t;
        std::vector<int> nei;
        if (sem == Semantics::OOC) {
          for (int y = 0; y < P + T; ++y)
            if (c[x][y] || c[y][x]) nei.push_back(y);
        } else {
          nei = twoStep(a, x);
        }
        ASSERT_EQ(d.nei[x], nei);
        std::vector<int> others;
        for (int u = 0; u < T; ++u)
          if (u != t) others.push_back(u);
        ASSERT_EQ(d.dpc[t], withT0(sem == Semantics::BT ? others : transitionsIn(net, nei)));
        ASSERT_EQ(d.dph[t], withT0(transitionsIn(net, nei)));
        ASSERT_EQ(d.rin[t], placesIn(net, nei));
        ASSERT_EQ(d.rout[t], placesIn(net, nei));
      }
    }
  }
}
