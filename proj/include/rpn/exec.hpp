#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpn.hpp"

namespace rpn {

inline bool isIdle(const Molecule& m) { return m.empty(); }

inline bool isElement(const BaseInstance& a, const Molecule& m) { return m.has(a); }
inline bool isElement(const BondInstance& b, const Molecule& m) { return m.has(b); }
inline bool isElement(const HistoryQuad& q, const HistorySet& h) { return contains(h, q); }

inline int numOfnonEmpty(const std::vector<Molecule>& ms) {
  int n = 0;
  for (const auto& m : ms)
    if (!isIdle(m)) ++n;
  return n;
}

// Drops the quads (k_j, t_j, owner, .) for every pair and closes the gaps each leaves.
inline HistorySet updateIntHist(const std::vector<std::pair<int, int>>& K, HistorySet h) {
  for (const auto& [j, kj] : K) {
    auto it = std::find_if(h.begin(), h.end(), [&](const HistoryQuad& q) { return q.other == j && q.k == kj; });
    if (it == h.end()) throw std::logic_error("updateIntHist: missing quad");
    h.erase(it);
    for (auto& q : h)
      if (q.other == j && q.k > kj) --q.k;
  }
  std::sort(h.begin(), h.end());
  return h;
}

// Closes the gap left in the pair (reverser, owner of h) by a removed quad of index kj.
inline HistorySet updateExtHist(int reverser, int kj, HistorySet h) {
  for (auto& q : h) {
    if (q.other != reverser) continue;
    if (q.k == kj) throw std::logic_error("updateExtHist: index collides with the removed quad");
    if (q.k > kj) --q.k;
  }
  std::sort(h.begin(), h.end());
  return h;
}

// The latest user (by transition order) among the owners of the given
// histories whose logged payload meets C; quads of the reversed occurrence are
// ignored. kT0 when nobody but the initial transition touched C.
inline int maxUser(const CpnNet& cpn, const std::vector<std::pair<int, const HistorySet*>>& hs, const Bag& c,
                   int reverser, const std::optional<Payload>& reversed) {
  int best = kT0;
  for (const auto& [owner, h] : hs)
    for (const auto& q : *h) {
      if (reversed && q.owner == reverser && q.payload == *reversed) continue;
      auto inst = payloadInstances(q.payload);
      normalize(inst);
      if (!intersects(inst, c.nodes)) continue;
      if (best == kT0 || cpn.topoRank[q.owner] > cpn.topoRank[best]) best = q.owner;
    }
  return best;
}

// Same, reading the histories of dph(t) and t from a marking.
inline int maxUser(const CpnNet& cpn, const CpnMarking& m, const Bag& c, int t,
                   const std::optional<Payload>& reversed = std::nullopt) {
  std::vector<std::pair<int, const HistorySet*>> hs;
  hs.push_back({t, &historyAt(m, cpn.historyPlace[t])});
  for (int j : cpn.deps.dph[t])
    if (j != kT0) hs.push_back({j, &historyAt(m, cpn.historyPlace[j])});
  return maxUser(cpn, hs, c, t, reversed);
}

namespace detail {

inline bool violates(const Negatives& n, const Molecule& m) {
  for (BaseType a : n.bases)
    if (!restrictByType(m.nodes, a).empty()) return true;
  for (const auto& b : n.bonds)
    if (!restrictByType(m.bonds, b).empty()) return true;
  return false;
}

inline Payload payloadOf(bool bond, const Binding& b) {
  if (bond) return Bonded{BondInstance(b.alpha1, b.alpha2)};
  return Transferred{b.alpha1};
}

struct GuardEval {
  const CpnNet& cpn;
  const Binding& b;

  bool operator()(const GuardTRN& g) const {
    const Molecule& x = b.x.at(0);
    return isElement(b.alpha1, x) && b.alpha1.type == g.type && !violates(g.neg, x);
  }
  bool operator()(const GuardBC1& g) const {
    const Molecule &x1 = b.x.at(0), &x2 = b.x.at(1);
    if (b.alpha1 == b.alpha2) return false;
    if (BondType(b.alpha1.type, b.alpha2.type) != BondType(g.a, g.b)) return false;
    bool apart = isElement(b.alpha1, x1) && isElement(b.alpha2, x2);
    bool together = isElement(b.alpha1, x1) && isElement(b.alpha2, x1) &&
                    !isElement(BondInstance(b.alpha1, b.alpha2), x1) && isIdle(x2);
    return (apart || together) && !violates(g.neg, bagUnion(x1, x2));
  }
  bool operator()(const GuardBC2& g) const {
    const Molecule &x1 = b.x.at(0), &x2 = b.x.at(1);
    return isElement(b.alpha1, x1) && b.alpha1.type == g.a && isElement(b.alpha2, x2) && b.alpha2.type == g.b &&
           !violates(g.neg0, x1) && !violates(g.neg1, x2);
  }
  bool rev(const RevGuardData& g, bool bond) const {
    if (!b.payload) return false;
    if (bond != std::holds_alternative<Bonded>(*b.payload)) return false;
    const HistorySet& hi = b.h.at(0);
    for (std::size_t s = 0; s < g.dpc.size(); ++s) {
      if (!isElement(HistoryQuad{b.k.at(s), g.dpc[s], g.owner, *b.payload}, hi)) return false;
      if (g.pinned && b.k[s] != b.cnt.at(s)) return false;
    }
    std::vector<Molecule> rin(b.x.begin(), b.x.begin() + g.rinSlots);
    if (numOfnonEmpty(rin) != 1) return false;
    Molecule all;
    for (const auto& m : rin) all.add(m);
    if (auto* t = std::get_if<Transferred>(&*b.payload)) return isElement(t->a, all);
    return isElement(std::get<Bonded>(*b.payload).b, all);
  }
  bool operator()(const GuardRevTRN& g) const { return rev(g, false); }
  bool operator()(const GuardRevBC& g) const { return rev(g, true); }
  bool operator()(const GuardFalse&) const { return false; }
};

struct ArcEval {
  const CpnNet& cpn;
  const Binding& b;

  std::vector<CpnToken> idles(int n) const { return std::vector<CpnToken>(std::size_t(n), CpnToken(Molecule{})); }

  std::vector<CpnToken> operator()(const TakeOneMolecule& f) const { return {b.x.at(f.slot)}; }
  std::vector<CpnToken> operator()(const TakeTwoMolecules& f) const { return {b.x.at(f.slot0), b.x.at(f.slot1)}; }
  std::vector<CpnToken> operator()(const EmitIdle& f) const { return idles(f.n); }
  std::vector<CpnToken> operator()(const EmitMoved& f) const { return {b.x.at(f.slot)}; }
  std::vector<CpnToken> operator()(const EmitBonded& f) const {
    Molecule m = bagUnion(b.x.at(f.slot0), b.x.at(f.slot1));
    insertSorted(m.bonds, BondInstance(b.alpha1, b.alpha2));
    return {m};
  }
  std::vector<CpnToken> operator()(const TakeCounter& f) const { return {Counter{b.cnt.at(f.slot)}}; }
  std::vector<CpnToken> operator()(const EmitCounterPlus1& f) const { return {Counter{b.cnt.at(f.slot) + 1}}; }
  std::vector<CpnToken> operator()(const EmitCounterMinus1& f) const { return {Counter{b.cnt.at(f.slot) - 1}}; }
  std::vector<CpnToken> operator()(const TakeHistory& f) const { return {b.h.at(f.slot)}; }
  std::vector<CpnToken> operator()(const EmitHistoryAppend& f) const {
    HistorySet h = b.h.at(f.slot);
    Payload p = payloadOf(f.bond, b);
    for (std::size_t s = 0; s < f.dpc.size(); ++s) insertSorted(h, HistoryQuad{b.cnt.at(s) + 1, f.dpc[s], f.owner, p});
    return {h};
  }
  std::vector<CpnToken> operator()(const EmitHistoryUpdateInt& f) const {
    std::vector<std::pair<int, int>> K;
    for (std::size_t s = 0; s < f.dpc.size(); ++s) K.push_back({f.dpc[s], b.k.at(s)});
    return {updateIntHist(K, b.h.at(f.slot))};
  }
  std::vector<CpnToken> operator()(const EmitHistoryUpdateExt& f) const {
    return {updateExtHist(f.reverser, b.k.at(f.kSlot), b.h.at(f.slot))};
  }
  std::vector<CpnToken> operator()(const RevTake& f) const {
    if (f.twoIdle) return idles(2);
    return {b.x.at(f.slot), Molecule{}};
  }
  std::vector<CpnToken> operator()(const RevEmitRouted& f) const {
    const auto& g = cpn.transitions.at(cpn.reverse.at(f.owner)).guard;
    int rinSlots = std::holds_alternative<GuardRevTRN>(g) ? std::get<GuardRevTRN>(g).rinSlots
                                                          : std::get<GuardRevBC>(g).rinSlots;
    Molecule all;
    for (int s = 0; s < rinSlots; ++s) all.add(b.x.at(s));
    std::vector<Bag> parts;
    if (!f.bond) {
      parts.push_back(con(std::get<Transferred>(*b.payload).a, all));
    } else {
      const BondInstance& bd = std::get<Bonded>(*b.payload).b;
      eraseSorted(all.bonds, bd);
      Bag c1 = con(bd.x, all), c2 = con(bd.y, all);
      parts.push_back(c1);
      if (c2 != c1) parts.push_back(c2);
    }
    std::vector<std::pair<int, const HistorySet*>> hs;
    for (std::size_t s = 0; s < f.historyOwners.size(); ++s) hs.push_back({f.historyOwners[s], &b.h.at(s)});
    std::vector<CpnToken> out;
    for (const auto& c : parts) {
      int u = maxUser(cpn, hs, c, f.owner, b.payload);
      bool here;
      if (u == kT0) {
        here = true;
        for (const auto& a : c.nodes) {
          auto it = cpn.initialPlace.find(a);
          if (it == cpn.initialPlace.end() || it->second != f.place) here = false;
        }
      } else {
        here = contains(f.producers, u);
      }
      out.push_back(here ? c : Molecule{});
    }
    while (out.size() < 2) out.push_back(Molecule{});
    return out;
  }
};

}  // namespace detail

inline bool evalGuard(const CpnNet& cpn, int transition, const Binding& b) {
  return std::visit(detail::GuardEval{cpn, b}, cpn.transitions.at(transition).guard);
}

inline std::vector<CpnToken> evalArc(const CpnNet& cpn, const CpnArc& arc, const Binding& b) {
  return std::visit(detail::ArcEval{cpn, b}, arc.expr);
}

// True when every input arc's multiset is available in m.
inline bool tokensAvailable(const CpnNet& cpn, const CpnMarking& m, int transition, const Binding& b) {
  std::map<int, std::vector<CpnToken>> need;
  for (int a : cpn.arcsOf.at(transition)) {
    const auto& arc = cpn.arcs[a];
    if (!arc.toTransition) continue;
    for (auto& tok : evalArc(cpn, arc, b)) addToken(need[arc.place], std::move(tok));
  }
  for (const auto& [p, toks] : need) {
    for (std::size_t i = 0; i < toks.size();) {
      std::size_t j = i;
      while (j < toks.size() && toks[j] == toks[i]) ++j;
      if (countToken(m.tokens.at(p), toks[i]) < int(j - i)) return false;
      i = j;
    }
  }
  return true;
}

namespace detail {

inline std::vector<Molecule> distinctMolecules(const std::vector<CpnToken>& ms) {
  std::vector<Molecule> r;
  for (const auto& t : ms)
    if (auto* m = std::get_if<Molecule>(&t)) r.push_back(*m);
  normalize(r);
  return r;
}

inline void readCounters(const CpnNet& cpn, const CpnMarking& m, int t, Binding& b) {
  for (int j : cpn.deps.dpc[t]) b.cnt.push_back(counterAt(m, cpn.connectionPlace(t, j)));
}

}  // namespace detail

// Every binding of the transition enabled in m, sorted. Candidate values are
// generated from the tokens present; the guard and the take arcs decide.
inline std::vector<Binding> enumerateBindings(const CpnNet& cpn, const CpnMarking& m, int transition) {
  const CpnTransition& tr = cpn.transitions.at(transition);
  std::vector<Binding> cand;
  if (tr.role == TransitionRole::Virtual) return {};
  const int t = tr.t;
  const RpnNet& net = cpn.rpn;
  Binding base;
  detail::readCounters(cpn, m, t, base);
  base.h.push_back(historyAt(m, cpn.historyPlace[t]));

  if (tr.role == TransitionRole::Forward) {
    std::vector<int> ins;
    for (const auto& [p, l] : net.pre[t]) ins.push_back(p);
    auto mols = [&](int p) { return detail::distinctMolecules(m.tokens[p]); };
    switch (cpn.kindOf[t]) {
      case TransitionKind::TRN:
        for (const auto& x : mols(ins[0]))
          for (const auto& a : x.nodes) {
            Binding b = base;
            b.x = {x};
            b.alpha1 = a;
            cand.push_back(std::move(b));
          }
        break;
      case TransitionKind::BC1: {
        auto all = mols(ins[0]);
        for (const auto& x1 : all)
          for (const auto& a1 : x1.nodes)
            for (const auto& x2 : all) {
              const Molecule& src = isIdle(x2) ? x1 : x2;
              for (const auto& a2 : src.nodes) {
                Binding b = base;
                b.x = {x1, x2};
                b.alpha1 = a1;
                b.alpha2 = a2;
                cand.push_back(std::move(b));
              }
            }
        break;
      }
      case TransitionKind::BC2:
        for (const auto& x1 : mols(ins[0]))
          for (const auto& a1 : x1.nodes)
            for (const auto& x2 : mols(ins[1]))
              for (const auto& a2 : x2.nodes) {
                Binding b = base;
                b.x = {x1, x2};
                b.alpha1 = a1;
                b.alpha2 = a2;
                cand.push_back(std::move(b));
              }
        break;
    }
  } else {
    for (int j : cpn.deps.dph[t])
      if (j != kT0) base.h.push_back(historyAt(m, cpn.historyPlace[j]));
    const auto& dpc = cpn.deps.dpc[t];
    const auto& rin = cpn.deps.rin[t];
    std::vector<Payload> payloads;
    for (const auto& q : base.h[0]) payloads.push_back(q.payload);
    normalize(payloads);
    for (const auto& pl : payloads) {
      Binding b = base;
      b.payload = pl;
      bool complete = true;
      for (int j : dpc) {
        auto it = std::find_if(base.h[0].begin(), base.h[0].end(),
                               [&](const HistoryQuad& q) { return q.other == j && q.payload == pl; });
        if (it == base.h[0].end()) {
          complete = false;
          break;
        }
        b.k.push_back(it->k);
      }
      if (!complete) continue;
      for (std::size_t g = 0; g < rin.size(); ++g)
        for (const auto& x : detail::distinctMolecules(m.tokens[rin[g]])) {
          if (isIdle(x)) continue;
          Binding c = b;
          c.x.assign(rin.size(), Molecule{});
          c.x[g] = x;
          cand.push_back(std::move(c));
        }
    }
  }
  std::vector<Binding> out;
  for (auto& b : cand)
    if (evalGuard(cpn, transition, b) && tokensAvailable(cpn, m, transition, b)) out.push_back(std::move(b));
  normalize(out);
  return out;
}

inline CpnMarking fire(const CpnNet& cpn, const CpnMarking& m, int transition, const Binding& b) {
  if (!evalGuard(cpn, transition, b)) throw std::invalid_argument("guard does not hold for this binding");
  CpnMarking r = m;
  for (int a : cpn.arcsOf.at(transition)) {
    const auto& arc = cpn.arcs[a];
    if (!arc.toTransition) continue;
    for (const auto& tok : evalArc(cpn, arc, b))
      if (!removeToken(r.tokens.at(arc.place), tok))
        throw std::logic_error("insufficient tokens in " + cpn.places[arc.place].name);
  }
  for (int a : cpn.arcsOf.at(transition)) {
    const auto& arc = cpn.arcs[a];
    if (arc.toTransition) continue;
    for (auto& tok : evalArc(cpn, arc, b)) addToken(r.tokens.at(arc.place), std::move(tok));
  }
  return r;
}

struct CpnMove {
  int transition = 0;
  Binding binding;
  auto operator<=>(const CpnMove&) const = default;
};

inline std::vector<CpnMove> enabledCpnMoves(const CpnNet& cpn, const CpnMarking& m) {
  std::vector<CpnMove> r;
  for (int t = 0; t < int(cpn.transitions.size()); ++t)
    for (auto& b : enumerateBindings(cpn, m, t)) r.push_back({t, std::move(b)});
  return r;
}

}  // namespace rpn
