#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "cpn.hpp"

namespace rpn {

struct TranslationConfig {
  Semantics semantics = Semantics::OOC;
  double spacing = 120;  // grid step used when the net carries no positions
};

namespace detail {

inline std::vector<int> inputPlaces(const RpnNet& net, int t) {
  std::vector<int> r;
  for (const auto& [p, l] : net.pre.at(t)) r.push_back(p);
  return r;
}

inline int outputPlace(const RpnNet& net, int t) { return net.post.at(t).begin()->first; }

inline std::vector<int> producersOf(const RpnNet& net, int p) {
  std::vector<int> r;
  for (int t = 0; t < net.transitionCount(); ++t)
    if (net.post[t].count(p)) r.push_back(t);
  return r;
}

inline int indexIn(const std::vector<int>& v, int x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it == v.end()) throw std::logic_error("element missing from dependency set");
  return int(it - v.begin());
}

inline Negatives negativesOf(const ArcLabel& l) { return {l.negBases, l.negBonds}; }

// Histories a reverser reads besides its own: dph without t0, which has no place.
inline std::vector<int> extHistories(const DependencySets& d, int t) {
  std::vector<int> r;
  for (int j : d.dph[t])
    if (j != kT0) r.push_back(j);
  return r;
}

}  // namespace detail

inline std::string historyPlaceName(int t) { return "h" + std::to_string(t + 1); }
inline std::string connectionPlaceName(int i, int j) {
  return "h" + std::to_string(std::min(i, j) + 1) + "_" + std::to_string(std::max(i, j) + 1);
}
inline std::string reverserName(int t) { return "tr" + std::to_string(t + 1); }

// Guard of the forward transition t, the reverser of t, or the virtual t0 (t == kT0).
inline GuardForm buildGuard(const RpnNet& net, const DependencySets& d, int t, bool reverser) {
  if (t == kT0) return GuardFalse{};
  TransitionKind kind = classify(net, t);
  if (reverser) {
    RevGuardData g;
    g.owner = t;
    g.dpc = d.dpc.at(t);
    g.pinned = d.sem == Semantics::BT;
    g.rinSlots = int(d.rin.at(t).size());
    if (kind == TransitionKind::TRN) return GuardRevTRN{g};
    return GuardRevBC{g};
  }
  const auto& in = net.pre.at(t);
  switch (kind) {
    case TransitionKind::TRN: {
      const ArcLabel& l = in.begin()->second;
      return GuardTRN{l.bases[0], detail::negativesOf(l)};
    }
    case TransitionKind::BC1: {
      const ArcLabel& l = in.begin()->second;
      return GuardBC1{l.bases[0], l.bases[1], detail::negativesOf(l)};
    }
    case TransitionKind::BC2: {
      auto it = in.begin();
      const ArcLabel& l0 = it->second;
      const ArcLabel& l1 = (++it)->second;
      return GuardBC2{l0.bases[0], l1.bases[0], detail::negativesOf(l0), detail::negativesOf(l1)};
    }
  }
  return GuardFalse{};
}

// Inscription of the arc between a transition of the translated net and one
// of its places. role/t name the transition; pl is the place.
inline ArcExprForm buildArcExpr(const RpnNet& net, const DependencySets& d, TransitionRole role, int t,
                                const CpnPlace& pl, bool toTransition) {
  auto shapeError = [&]() -> ArcExprForm { throw std::logic_error("arc shape not in catalogue for " + pl.name); };
  if (role == TransitionRole::Virtual) {
    if (pl.role != PlaceRole::ConnectionT0) return shapeError();
    int slot = pl.b;
    if (toTransition) return TakeCounter{slot};
    return EmitCounterPlus1{slot};
  }
  TransitionKind kind = classify(net, t);
  bool bond = kind != TransitionKind::TRN;
  const auto& dpc = d.dpc.at(t);
  if (pl.role == PlaceRole::Connection || pl.role == PlaceRole::ConnectionT0) {
    int other = pl.a == t ? pl.b : pl.a;
    int slot = detail::indexIn(dpc, other);
    if (toTransition) return TakeCounter{slot};
    if (role == TransitionRole::Forward) return EmitCounterPlus1{slot};
    return EmitCounterMinus1{slot};
  }
  if (pl.role == PlaceRole::History) {
    int owner = pl.a;
    if (owner == t) {
      if (toTransition) return TakeHistory{0};
      if (role == TransitionRole::Forward) return EmitHistoryAppend{0, t, bond, dpc};
      return EmitHistoryUpdateInt{0, dpc};
    }
    if (role != TransitionRole::Reverse) return shapeError();
    auto ext = detail::extHistories(d, t);
    int slot = 1 + detail::indexIn(ext, owner);
    if (toTransition) return TakeHistory{slot};
    return EmitHistoryUpdateExt{slot, t, detail::indexIn(dpc, owner)};
  }
  // Molecule place of the source net.
  int p = pl.a;
  if (role == TransitionRole::Forward) {
    auto ins = detail::inputPlaces(net, t);
    bool isInput = net.pre.at(t).count(p) > 0;
    bool isOutput = net.post.at(t).count(p) > 0;
    if (isInput) {
      if (!toTransition) return EmitIdle{kind == TransitionKind::BC1 ? 2 : 1};
      if (kind == TransitionKind::BC1) return TakeTwoMolecules{0, 1};
      return TakeOneMolecule{detail::indexIn(ins, p)};
    }
    if (isOutput) {
      if (toTransition) return EmitIdle{1};
      if (kind == TransitionKind::TRN) return EmitMoved{0};
      return EmitBonded{0, 1};
    }
    return shapeError();
  }
  const auto& rin = d.rin.at(t);
  if (toTransition) {
    int slot = detail::indexIn(rin, p);
    return RevTake{slot, detail::producersOf(net, p).empty()};
  }
  RevEmitRouted r;
  r.bond = bond;
  r.owner = t;
  r.place = p;
  r.producers = detail::producersOf(net, p);
  r.historyOwners.push_back(t);
  for (int j : detail::extHistories(d, t)) r.historyOwners.push_back(j);
  return r;
}

inline CpnNet translate(const RpnNet& rpn, const TranslationConfig& cfg = {}) {
  if (auto v = validateLowLevel(rpn); !v.empty())
    throw std::invalid_argument("net is not low-level: " + v.front().rule + " at " + v.front().element + ": " +
                                v.front().detail);
  if (!isRenumbered(rpn)) throw std::invalid_argument("transitions are not in topological order; renumber first");

  CpnNet c;
  c.rpn = rpn;
  c.sem = cfg.semantics;
  c.deps = dependencySets(rpn, cfg.semantics);
  std::tie(c.K, c.nb) = boundsOf(rpn);
  const int P = rpn.placeCount(), T = rpn.transitionCount();
  const auto& d = c.deps;
  for (int t = 0; t < T; ++t) c.kindOf.push_back(classify(rpn, t));
  for (int t = 0; t < T; ++t) c.topoRank.push_back(t);
  for (int p = 0; p < P; ++p)
    for (const auto& a : rpn.initial[p].nodes) c.initialPlace[a] = p;

  // Layout: given positions, else columns by longest path depth.
  std::vector<Point> pos(P + T);
  {
    auto adj = directOrder(rpn);
    Order o = transOrder(rpn);
    // Nodes sorted by the number of strict predecessors form a topological order.
    std::vector<int> below(P + T, 0), order(P + T), depth(P + T, 0);
    for (int x = 0; x < P + T; ++x)
      for (int y = 0; y < P + T; ++y)
        if (o.lt[y][x]) ++below[x];
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return below[a] < below[b]; });
    for (int x : order)
      for (int y : adj[x]) depth[y] = std::max(depth[y], depth[x] + 1);
    std::map<int, int> rowOf;
    for (int x : order) {
      int row = rowOf[depth[x]]++;
      pos[x] = {depth[x] * cfg.spacing, row * cfg.spacing * 1.5};
    }
    for (int p = 0; p < P; ++p)
      if (auto it = rpn.positions.find(rpn.places[p]); it != rpn.positions.end()) pos[p] = it->second;
    for (int t = 0; t < T; ++t)
      if (auto it = rpn.positions.find(rpn.transitions[t]); it != rpn.positions.end()) pos[P + t] = it->second;
  }
  const double up = cfg.spacing * 0.5;

  std::set<std::string> names;
  auto claim = [&](const std::string& n) {
    if (!names.insert(n).second) throw std::invalid_argument("name clash in translated net: " + n);
    return n;
  };

  for (int p = 0; p < P; ++p)
    c.places.push_back({claim(rpn.places[p]), PlaceRole::Original, ColourSet::Molecule, p, -1, pos[p]});
  for (int t = 0; t < T; ++t) {
    c.historyPlace.push_back(int(c.places.size()));
    Point q = pos[P + t];
    c.places.push_back({claim(historyPlaceName(t)), PlaceRole::History, ColourSet::History, t, -1, {q.x, q.y - up}});
  }
  for (int j = 0; j < T; ++j) {
    c.connection[{kT0, j}] = int(c.places.size());
    Point q = pos[P + j];
    c.places.push_back({claim("h0_" + std::to_string(j + 1)), PlaceRole::ConnectionT0, ColourSet::Counter, kT0, j,
                        {q.x - up * 0.5, q.y + up}});
  }
  for (int i = 0; i < T; ++i)
    for (int j : d.dpc[i])
      if (j != kT0 && i < j) {
        c.connection[{i, j}] = int(c.places.size());
        Point a = pos[P + i], b = pos[P + j];
        c.places.push_back({claim(connectionPlaceName(i, j)), PlaceRole::Connection, ColourSet::Counter, i, j,
                            {(a.x + b.x) / 2, std::max(a.y, b.y) + up + up * 0.2 * (j - i)}});
      }

  for (int t = 0; t < T; ++t) {
    c.forward.push_back(int(c.transitions.size()));
    c.transitions.push_back({claim(rpn.transitions[t]), TransitionRole::Forward, t, c.kindOf[t],
                             buildGuard(rpn, d, t, false), pos[P + t]});
  }
  for (int t = 0; t < T; ++t) {
    c.reverse.push_back(int(c.transitions.size()));
    Point q = pos[P + t];
    c.transitions.push_back({claim(reverserName(t)), TransitionRole::Reverse, t, c.kindOf[t],
                             buildGuard(rpn, d, t, true), {q.x + up, q.y}});
  }
  c.t0 = int(c.transitions.size());
  c.transitions.push_back({claim("t0"), TransitionRole::Virtual, kT0, std::nullopt, GuardFalse{}, {-cfg.spacing, 0}});

  auto link = [&](int place, int trans) {
    const auto& tr = c.transitions[trans];
    c.arcs.push_back({place, trans, true, buildArcExpr(rpn, d, tr.role, tr.t, c.places[place], true)});
    c.arcs.push_back({place, trans, false, buildArcExpr(rpn, d, tr.role, tr.t, c.places[place], false)});
  };
  for (int t = 0; t < T; ++t) {
    int f = c.forward[t], r = c.reverse[t];
    for (const auto& [p, l] : rpn.pre[t]) link(p, f);
    for (const auto& [p, l] : rpn.post[t]) link(p, f);
    link(c.historyPlace[t], f);
    for (int j : d.dpc[t]) link(c.connectionPlace(t, j), f);

    for (int p : d.rin[t]) link(p, r);
    link(c.historyPlace[t], r);
    for (int j : detail::extHistories(d, t)) link(c.historyPlace[j], r);
    for (int j : d.dpc[t]) link(c.connectionPlace(t, j), r);
  }
  for (int j = 0; j < T; ++j) link(c.connectionPlace(kT0, j), c.t0);

  c.arcsOf.assign(c.transitions.size(), {});
  for (int a = 0; a < int(c.arcs.size()); ++a) c.arcsOf[c.arcs[a].transition].push_back(a);
  return c;
}

}  // namespace rpn
