#pragma once

#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "model.hpp"

namespace rpn {

enum class TransitionKind { TRN, BC1, BC2 };
enum class Semantics { BT, C, OOC };

// Identifier of the virtual initial transition in transition sets.
inline constexpr int kT0 = -1;

inline const char* kindName(TransitionKind k) {
  switch (k) {
    case TransitionKind::TRN: return "TRN";
    case TransitionKind::BC1: return "BC1";
    case TransitionKind::BC2: return "BC2";
  }
  return "?";
}

inline const char* semanticsName(Semantics s) {
  switch (s) {
    case Semantics::BT: return "bt";
    case Semantics::C: return "co";
    case Semantics::OOC: return "ooc";
  }
  return "?";
}

inline std::optional<Semantics> parseSemantics(const std::string& s) {
  if (s == "bt" || s == "BT") return Semantics::BT;
  if (s == "co" || s == "c" || s == "C" || s == "causal") return Semantics::C;
  if (s == "ooc" || s == "OOC") return Semantics::OOC;
  return std::nullopt;
}

namespace detail {
inline bool onlyBases(const ArcLabel& l) { return l.bonds.empty(); }
}  // namespace detail

// Kind of t, or nullopt with a reason when t matches none of the three patterns.
inline std::optional<TransitionKind> tryClassify(const RpnNet& net, int t, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) -> std::optional<TransitionKind> {
    if (why) *why = m;
    return std::nullopt;
  };
  const auto& in = net.pre.at(t);
  const auto& out = net.post.at(t);
  if (out.size() != 1) return fail("must have exactly one output place");
  const ArcLabel& o = out.begin()->second;
  if (in.size() == 1) {
    const ArcLabel& i = in.begin()->second;
    if (!detail::onlyBases(i)) return fail("positive bond on input arc");
    if (i.bases.size() == 1 && o.bonds.empty() && o.bases == i.bases) return TransitionKind::TRN;
    if (i.bases.size() == 2 && o.bases.empty() && o.bonds.size() == 1 &&
        o.bonds[0] == BondType(i.bases[0], i.bases[1]))
      return TransitionKind::BC1;
    return fail("single input place matches neither TRN {a}->{a} nor BC1 {a,b}->{a-b}");
  }
  if (in.size() == 2) {
    auto it = in.begin();
    const ArcLabel& i1 = it->second;
    const ArcLabel& i2 = (++it)->second;
    if (!detail::onlyBases(i1) || !detail::onlyBases(i2)) return fail("positive bond on input arc");
    if (i1.bases.size() == 1 && i2.bases.size() == 1 && o.bases.empty() && o.bonds.size() == 1 &&
        o.bonds[0] == BondType(i1.bases[0], i2.bases[0]))
      return TransitionKind::BC2;
    return fail("two input places do not match BC2 a,b->{a-b}");
  }
  return fail("must have one or two input places");
}

inline TransitionKind classify(const RpnNet& net, int t) {
  std::string why;
  auto k = tryClassify(net, t, &why);
  if (!k) throw std::invalid_argument("transition " + net.transitions.at(t) + ": " + why);
  return *k;
}

// Node numbering: places 0..P-1, transitions P..P+T-1.
inline int nodeOfPlace(const RpnNet&, int p) { return p; }
inline int nodeOfTransition(const RpnNet& n, int t) { return n.placeCount() + t; }

inline std::vector<std::vector<int>> directOrder(const RpnNet& net) {
  std::vector<std::vector<int>> adj(net.placeCount() + net.transitionCount());
  for (int t = 0; t < net.transitionCount(); ++t) {
    int tn = nodeOfTransition(net, t);
    for (const auto& [p, l] : net.pre[t])
      if (!l.empty()) adj[p].push_back(tn);
    for (const auto& [p, l] : net.post[t])
      if (!l.empty()) adj[tn].push_back(p);
  }
  for (auto& v : adj) normalize(v);
  return adj;
}

// Strict order x < y over nodes; lt[x][y] true iff a nonempty directed path leads from x to y.
struct Order {
  int P = 0;
  std::vector<std::vector<char>> lt;
  bool place(int p, int q) const { return lt[p][q]; }
  bool trans(int t, int u) const { return lt[P + t][P + u]; }
  bool pt(int p, int t) const { return lt[p][P + t]; }
  bool tp(int t, int p) const { return lt[P + t][p]; }
};

inline bool isAcyclic(const RpnNet& net) {
  auto adj = directOrder(net);
  std::vector<int> indeg(adj.size(), 0);
  for (const auto& v : adj)
    for (int w : v) ++indeg[w];
  std::queue<int> q;
  for (int i = 0; i < int(adj.size()); ++i)
    if (!indeg[i]) q.push(i);
  std::size_t seen = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    ++seen;
    for (int w : adj[v])
      if (--indeg[w] == 0) q.push(w);
  }
  return seen == adj.size();
}

inline Order transOrder(const RpnNet& net) {
  if (!isAcyclic(net)) throw std::invalid_argument("net has a cycle");
  auto adj = directOrder(net);
  int n = int(adj.size());
  Order o;
  o.P = net.placeCount();
  o.lt.assign(n, std::vector<char>(n, 0));
  for (int s = 0; s < n; ++s) {
    std::vector<int> stack(adj[s].begin(), adj[s].end());
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (o.lt[s][v]) continue;
      o.lt[s][v] = 1;
      for (int w : adj[v]) stack.push_back(w);
    }
  }
  return o;
}

struct Violation {
  std::string rule;     // acyclic, L1..L4, output-negative, marking, declaration
  std::string element;  // offending transition / place name
  std::string detail;
  auto operator<=>(const Violation&) const = default;
};

inline std::vector<Violation> validateLowLevel(const RpnNet& net) {
  std::vector<Violation> out;
  if (!isAcyclic(net)) out.push_back({"acyclic", net.name, "arc graph contains a cycle"});

  auto baseSet = [](const std::vector<BaseType>& v) {
    std::vector<BaseType> r = v;
    normalize(r);
    return r;
  };
  for (int t = 0; t < net.transitionCount(); ++t) {
    const std::string& tn = net.transitions[t];
    for (const auto& [p, l] : net.post[t])
      if (l.hasNegatives()) out.push_back({"output-negative", tn, "negative label on arc to " + net.places[p]});

    std::vector<BaseType> guardBases, effectBases;
    std::vector<BondType> guardBonds, effectBonds;
    for (const auto& [p, l] : net.pre[t]) {
      auto c = l.baseContent();
      guardBases.insert(guardBases.end(), c.begin(), c.end());
      guardBonds.insert(guardBonds.end(), l.bonds.begin(), l.bonds.end());
    }
    for (const auto& [p, l] : net.post[t]) {
      auto c = l.baseContent();
      effectBases.insert(effectBases.end(), c.begin(), c.end());
      effectBonds.insert(effectBonds.end(), l.bonds.begin(), l.bonds.end());
    }
    if (baseSet(guardBases) != baseSet(effectBases))
      out.push_back({"L1", tn, "base types consumed differ from base types produced"});
    normalize(guardBonds);
    normalize(effectBonds);
    if (!isSubset(guardBonds, effectBonds)) out.push_back({"L2", tn, "bond in guard missing from effects"});

    std::string why;
    if (!tryClassify(net, t, &why)) out.push_back({"L3", tn, why});

    for (const auto& [p, in] : net.pre[t])
      for (const auto& [q, o] : net.post[t])
        for (const auto& b : o.bonds) {
          bool both = b.a == b.b ? in.count(b.a) >= 2 : (in.count(b.a) >= 1 && in.count(b.b) >= 1);
          if (both && !contains(in.negBonds, b))
            out.push_back({"L4", tn, "arc from " + net.places[p] + " lacks negated " + net.bondTypeName(b)});
        }
  }

  // Marking well-formedness.
  std::set<BaseInstance> seen;
  for (int p = 0; p < net.placeCount(); ++p) {
    for (const auto& a : net.initial[p].nodes) {
      if (a.type < 0 || a.type >= int(net.baseTypes.size()))
        out.push_back({"declaration", net.places[p], "instance of undeclared type"});
      else if (!seen.insert(a).second)
        out.push_back({"marking", net.places[p], net.instanceName(a) + " occurs in two places"});
    }
    for (const auto& b : net.initial[p].bonds)
      if (!net.initial[p].has(b.x) || !net.initial[p].has(b.y))
        out.push_back({"marking", net.places[p], "bond end outside the place"});
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.rule, a.element, a.detail) < std::tie(b.rule, b.element, b.detail);
  });
  return out;
}

// Transition permutation consistent with <, ties broken by original index:
// result[i] is the original index of the transition placed at position i.
inline std::vector<int> topologicalOrder(const RpnNet& net) {
  Order o = transOrder(net);
  int n = net.transitionCount();
  std::vector<int> indeg(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (o.trans(a, b)) ++indeg[b];
  std::set<int> ready;
  for (int t = 0; t < n; ++t)
    if (!indeg[t]) ready.insert(t);
  std::vector<int> order;
  while (!ready.empty()) {
    int t = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(t);
    for (int u = 0; u < n; ++u)
      if (o.trans(t, u) && --indeg[u] == 0) ready.insert(u);
  }
  return order;
}

inline RpnNet renumber(const RpnNet& net) {
  auto order = topologicalOrder(net);
  RpnNet r = net;
  for (int i = 0; i < int(order.size()); ++i) {
    r.transitions[i] = net.transitions[order[i]];
    r.pre[i] = net.pre[order[i]];
    r.post[i] = net.post[order[i]];
  }
  return r;
}

inline bool isRenumbered(const RpnNet& net) {
  auto order = topologicalOrder(net);
  for (int i = 0; i < int(order.size()); ++i)
    if (order[i] != i) return false;
  return true;
}

struct DependencySets {
  Semantics sem = Semantics::BT;
  std::vector<std::vector<int>> nei;  // over nodes
  // Per transition; dpc and dph contain kT0 as their first element.
  std::vector<std::vector<int>> dpc, dph, rin, rout;
  auto operator<=>(const DependencySets&) const = default;
};

inline DependencySets dependencySets(const RpnNet& net, Semantics sem) {
  const int P = net.placeCount(), T = net.transitionCount(), N = P + T;
  DependencySets d;
  d.sem = sem;
  d.nei.assign(N, {});
  if (sem == Semantics::OOC) {
    Order o = transOrder(net);
    for (int x = 0; x < N; ++x)
      for (int y = 0; y < N; ++y)
        if (x != y && (o.lt[x][y] || o.lt[y][x])) d.nei[x].push_back(y);
  } else {
    auto adj = directOrder(net);
    std::vector<std::vector<int>> radj(N);
    for (int x = 0; x < N; ++x)
      for (int y : adj[x]) radj[y].push_back(x);
    for (int x = 0; x < N; ++x) {
      auto& v = d.nei[x];
      for (int y : adj[x]) {
        v.push_back(y);
        for (int z : adj[y]) v.push_back(z);
      }
      for (int y : radj[x]) {
        v.push_back(y);
        for (int z : radj[y]) v.push_back(z);
      }
      normalize(v);
      eraseSorted(v, x);
    }
  }
  d.dpc.assign(T, {});
  d.dph.assign(T, {});
  d.rin.assign(T, {});
  d.rout.assign(T, {});
  for (int t = 0; t < T; ++t) {
    std::vector<int> neiT, neiP;
    for (int y : d.nei[P + t]) (y < P ? neiP : neiT).push_back(y < P ? y : y - P);
    d.dph[t] = neiT;
    d.rin[t] = d.rout[t] = neiP;
    if (sem == Semantics::BT) {
      for (int u = 0; u < T; ++u)
        if (u != t) d.dpc[t].push_back(u);
    } else {
      d.dpc[t] = neiT;
    }
    d.dpc[t].insert(d.dpc[t].begin(), kT0);
    d.dph[t].insert(d.dph[t].begin(), kT0);
  }
  return d;
}

}  // namespace rpn
