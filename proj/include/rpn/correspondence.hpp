#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "cpn.hpp"
#include "exec.hpp"
#include "semantics.hpp"

namespace rpn {

// Payload logged for an RPN occurrence: the moved instance or the created bond.
inline Payload payloadOfOccurrence(const CpnNet& cpn, int t, const Selection& s) {
  if (cpn.kindOf.at(t) == TransitionKind::TRN) {
    auto inst = selectedInstances(s);
    if (inst.size() != 1) throw std::logic_error("transfer occurrence without a single instance");
    return Transferred{inst[0]};
  }
  auto eff = bondingEffect(cpn.rpn, t, s);
  if (eff.size() != 1) throw std::logic_error("bond occurrence without a single created bond");
  return Bonded{eff[0]};
}

// Quad index of an occurrence with number k of t relative to the pair (t, j):
// its rank among the occurrences of both, t0 counting as fired at 0.
inline int pairIndex(const History& h, int t, int j, int k) {
  int n = 1;
  for (const auto& o : h[t])
    if (o.k < k) ++n;
  if (j == kT0) return n + 1;
  for (const auto& o : h[j])
    if (o.k < k) ++n;
  return n;
}

inline CpnMarking rpnToCpn(const CpnNet& cpn, const RpnState& st) {
  CpnMarking m;
  m.tokens.resize(cpn.places.size());
  const History& h = st.history;
  for (std::size_t i = 0; i < cpn.places.size(); ++i) {
    const auto& pl = cpn.places[i];
    switch (pl.role) {
      case PlaceRole::Original: m.tokens[i] = moleculeTokens(st.marking.at(pl.a), cpn.K); break;
      case PlaceRole::History: {
        int t = pl.a;
        HistorySet hs;
        for (const auto& o : h.at(t)) {
          Payload p = payloadOfOccurrence(cpn, t, o.sel);
          for (int j : cpn.deps.dpc[t]) hs.push_back({pairIndex(h, t, j, o.k), j, t, p});
        }
        normalize(hs);
        m.tokens[i] = {CpnToken(hs)};
        break;
      }
      case PlaceRole::Connection:
        m.tokens[i] = {CpnToken(Counter{int(h.at(pl.a).size() + h.at(pl.b).size())})};
        break;
      case PlaceRole::ConnectionT0: m.tokens[i] = {CpnToken(Counter{1 + int(h.at(pl.b).size())})}; break;
    }
  }
  return m;
}

inline bool corresponds(const CpnNet& cpn, const RpnState& st, const CpnMarking& m) { return rpnToCpn(cpn, st) == m; }

// A quad matches (k, other, owner, X) when X spells the payload either as its
// instance set or as the payload itself.
inline bool quadMatches(const HistoryQuad& q, int k, int other, int owner, std::vector<BaseInstance> instances) {
  normalize(instances);
  auto mine = payloadInstances(q.payload);
  normalize(mine);
  return q.k == k && q.other == other && q.owner == owner && mine == instances;
}

// Sequence number of the occurrence of t logged with payload x, recovered from
// the quads of h_t alone. Only meaningful for backtracking nets.
inline int sequenceNumber(const CpnNet& cpn, const HistorySet& ht, int t, const Payload& x) {
  std::vector<int> others;
  for (int j : cpn.deps.dpc[t])
    if (j != kT0) others.push_back(j);
  auto kOf = [&](int j, const Payload& p) -> int {
    for (const auto& q : ht)
      if (q.other == j && q.payload == p) return q.k;
    throw std::logic_error("incomplete history place");
  };
  if (others.empty()) {
    int e = 0;
    int kx = kOf(kT0, x);
    for (const auto& q : ht)
      if (q.other == kT0 && q.k < kx) ++e;
    return 1 + e;
  }
  int n = int(others.size());
  int sum = 0, earlier = 0;
  for (int j : others) {
    int kf = kOf(j, x);
    sum += kf - 1;
    for (const auto& q : ht)
      if (q.other == j && q.k < kf) ++earlier;
  }
  return 1 + sum - earlier * (n - 1) / n;
}

inline RpnState cpnToRpnBt(const CpnNet& cpn, const CpnMarking& m) {
  if (cpn.sem != Semantics::BT) throw std::invalid_argument("the inverse map exists only for backtracking nets");
  const RpnNet& net = cpn.rpn;
  RpnState st;
  st.marking.assign(net.placeCount(), {});
  for (std::size_t i = 0; i < cpn.places.size(); ++i) {
    if (cpn.places[i].role != PlaceRole::Original) continue;
    for (const auto& tok : m.tokens[i]) st.marking[cpn.places[i].a].add(std::get<Molecule>(tok));
  }
  struct Rec {
    int k, t;
    Payload p;
  };
  std::vector<Rec> recs;
  for (int t = 0; t < net.transitionCount(); ++t) {
    const HistorySet& ht = historyAt(m, cpn.historyPlace[t]);
    std::vector<Payload> ps;
    for (const auto& q : ht) ps.push_back(q.payload);
    normalize(ps);
    for (const auto& p : ps) recs.push_back({sequenceNumber(cpn, ht, t, p), t, p});
  }
  std::sort(recs.begin(), recs.end(), [](const Rec& a, const Rec& b) { return a.k > b.k; });
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (recs[i].k != int(recs.size() - i)) throw std::logic_error("recovered sequence numbers are not 1..n");

  // Undo occurrences from the latest one to find where each selected instance came from.
  st.history.assign(net.transitionCount(), {});
  Marking cur = st.marking;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const Rec& r = recs[i];
    auto inst = payloadInstances(r.p);
    Selection sel;
    const auto& in = net.pre.at(r.t);
    if (in.size() == 1) {
      sel[in.begin()->first] = inst;
    } else {
      auto it = in.begin();
      int p0 = it->first, p1 = (++it)->first;
      BaseType ty0 = in.at(p0).bases.at(0), ty1 = in.at(p1).bases.at(0);
      if (ty0 != ty1) {
        for (const auto& a : inst) sel[a.type == ty0 ? p0 : p1].push_back(a);
      } else {
        // Same type on both arcs: a fragment returns to the output of its last
        // earlier user, or to its initial place.
        const BondInstance& bd = std::get<Bonded>(r.p).b;
        int q = locate(cur, bd);
        Bag rest = cur.at(q);
        eraseSorted(rest.bonds, bd);
        for (const auto& a : inst) {
          Bag c = con(a, rest);
          int src = -1, bestK = 0;
          for (std::size_t e = i + 1; e < recs.size(); ++e) {
            auto ui = payloadInstances(recs[e].p);
            normalize(ui);
            if (recs[e].k > bestK && intersects(ui, c.nodes)) {
              bestK = recs[e].k;
              src = net.post.at(recs[e].t).begin()->first;
            }
          }
          if (src < 0) src = cpn.initialPlace.at(a);
          sel[src].push_back(a);
        }
      }
    }
    for (auto& [p, v] : sel) normalize(v);
    Occurrence occ{r.k, sel};
    cur = detail::reverseMarking(net, cur, r.t, occ);
    st.history[r.t].push_back(occ);
  }
  for (auto& v : st.history) std::sort(v.begin(), v.end());
  return st;
}

}  // namespace rpn
