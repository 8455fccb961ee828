#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "analysis.hpp"
#include "model.hpp"

namespace rpn {

// What an occurrence of a forward transition logs: the moved instance for
// TRN, the created bond for BC1/BC2.
struct Transferred {
  BaseInstance a;
  auto operator<=>(const Transferred&) const = default;
};
struct Bonded {
  BondInstance b;
  auto operator<=>(const Bonded&) const = default;
};
using Payload = std::variant<Transferred, Bonded>;

inline std::vector<BaseInstance> payloadInstances(const Payload& p) {
  if (auto* t = std::get_if<Transferred>(&p)) return {t->a};
  const auto& b = std::get<Bonded>(p).b;
  return {b.x, b.y};
}

struct HistoryQuad {
  int k = 0;
  int other = 0;  // transition index or kT0
  int owner = 0;
  Payload payload;
  auto operator<=>(const HistoryQuad&) const = default;
};
using HistorySet = std::vector<HistoryQuad>;  // sorted

struct Counter {
  int n = 0;
  auto operator<=>(const Counter&) const = default;
};

// Molecule tokens include the idle token, the empty molecule.
using CpnToken = std::variant<Molecule, HistorySet, Counter>;

enum class ColourSet { Molecule, History, Counter };

// Multiset of tokens per place, each kept sorted.
struct CpnMarking {
  std::vector<std::vector<CpnToken>> tokens;
  auto operator<=>(const CpnMarking&) const = default;
};

inline void addToken(std::vector<CpnToken>& ms, CpnToken tok) {
  ms.insert(std::upper_bound(ms.begin(), ms.end(), tok), std::move(tok));
}

inline bool removeToken(std::vector<CpnToken>& ms, const CpnToken& tok) {
  auto it = std::lower_bound(ms.begin(), ms.end(), tok);
  if (it == ms.end() || *it != tok) return false;
  ms.erase(it);
  return true;
}

inline int countToken(const std::vector<CpnToken>& ms, const CpnToken& tok) {
  auto r = std::equal_range(ms.begin(), ms.end(), tok);
  return int(r.second - r.first);
}

// Variable assignment of one CPN transition. Slots are fixed by the translator.
struct Binding {
  std::vector<Molecule> x;       // molecule variables
  BaseInstance alpha1, alpha2;   // forward instance variables
  std::optional<Payload> payload;  // reversers: the occurrence addressed
  std::vector<int> cnt;          // connection counters, one per dpc member
  std::vector<HistorySet> h;     // history variables
  std::vector<int> k;            // quad indices, one per dpc member
  auto operator<=>(const Binding&) const = default;
};

// Negative labels an input arc imposes on the molecules it binds.
struct Negatives {
  std::vector<BaseType> bases;
  std::vector<BondType> bonds;
  bool empty() const { return bases.empty() && bonds.empty(); }
  auto operator<=>(const Negatives&) const = default;
};

// Guard catalogue.
struct GuardTRN {
  BaseType type = 0;
  Negatives neg;
  auto operator<=>(const GuardTRN&) const = default;
};
struct GuardBC1 {
  BaseType a = 0, b = 0;
  Negatives neg;
  auto operator<=>(const GuardBC1&) const = default;
};
struct GuardBC2 {
  BaseType a = 0, b = 0;  // types bound from molecule slots 0 and 1
  Negatives neg0, neg1;
  auto operator<=>(const GuardBC2&) const = default;
};
struct RevGuardData {
  int owner = 0;
  std::vector<int> dpc;  // k and cnt slots follow this order
  bool pinned = false;   // backtracking: each k_j equals its counter
  int rinSlots = 0;      // x slots 0..rinSlots-1 bind one molecule per rin place
  auto operator<=>(const RevGuardData&) const = default;
};
struct GuardRevTRN : RevGuardData {
  auto operator<=>(const GuardRevTRN&) const = default;
};
struct GuardRevBC : RevGuardData {
  auto operator<=>(const GuardRevBC&) const = default;
};
struct GuardFalse {
  auto operator<=>(const GuardFalse&) const = default;
};
using GuardForm = std::variant<GuardTRN, GuardBC1, GuardBC2, GuardRevTRN, GuardRevBC, GuardFalse>;

// Arc expression catalogue.
struct TakeOneMolecule {
  int slot = 0;
  auto operator<=>(const TakeOneMolecule&) const = default;
};
struct TakeTwoMolecules {
  int slot0 = 0, slot1 = 1;
  auto operator<=>(const TakeTwoMolecules&) const = default;
};
struct EmitIdle {
  int n = 1;
  auto operator<=>(const EmitIdle&) const = default;
};
struct EmitMoved {
  int slot = 0;
  auto operator<=>(const EmitMoved&) const = default;
};
struct EmitBonded {
  int slot0 = 0, slot1 = 1;
  auto operator<=>(const EmitBonded&) const = default;
};
struct TakeCounter {
  int slot = 0;
  auto operator<=>(const TakeCounter&) const = default;
};
struct EmitCounterPlus1 {
  int slot = 0;
  auto operator<=>(const EmitCounterPlus1&) const = default;
};
struct EmitCounterMinus1 {
  int slot = 0;
  auto operator<=>(const EmitCounterMinus1&) const = default;
};
struct TakeHistory {
  int slot = 0;
  auto operator<=>(const TakeHistory&) const = default;
};
// H ∪ {(cnt_l + 1, t_l, owner, payload) for each l in dpc}.
struct EmitHistoryAppend {
  int slot = 0;
  int owner = 0;
  bool bond = false;
  std::vector<int> dpc;  // cnt slots in this order
  auto operator<=>(const EmitHistoryAppend&) const = default;
};
struct EmitHistoryUpdateInt {
  int slot = 0;
  std::vector<int> dpc;  // k slots in this order
  auto operator<=>(const EmitHistoryUpdateInt&) const = default;
};
struct EmitHistoryUpdateExt {
  int slot = 0;
  int reverser = 0;  // owner of the reversed occurrence
  int kSlot = 0;     // k slot of the pair (reverser, owner of this place)
  auto operator<=>(const EmitHistoryUpdateExt&) const = default;
};
// Reverser take from a rin place: 2 idles when no transition outputs to the
// place, otherwise the bound molecule plus one idle.
struct RevTake {
  int slot = 0;
  bool twoIdle = false;
  auto operator<=>(const RevTake&) const = default;
};
// Reverser output to a rout place: each fragment left after undoing the
// occurrence goes here iff the last user of the fragment outputs here, or no
// user exists and the fragment started here.
struct RevEmitRouted {
  bool bond = false;
  int owner = 0;
  int place = 0;                 // rpn place index
  std::vector<int> producers;    // rpn transitions with this place as output
  std::vector<int> historyOwners;  // owner of h slot s: historyOwners[s]
  auto operator<=>(const RevEmitRouted&) const = default;
};
using ArcExprForm = std::variant<TakeOneMolecule, TakeTwoMolecules, EmitIdle, EmitMoved, EmitBonded, TakeCounter,
                                 EmitCounterPlus1, EmitCounterMinus1, TakeHistory, EmitHistoryAppend,
                                 EmitHistoryUpdateInt, EmitHistoryUpdateExt, RevTake, RevEmitRouted>;

enum class PlaceRole { Original, History, Connection, ConnectionT0 };
enum class TransitionRole { Forward, Reverse, Virtual };

struct CpnPlace {
  std::string name;
  PlaceRole role = PlaceRole::Original;
  ColourSet colour = ColourSet::Molecule;
  int a = -1, b = -1;  // rpn place; history owner; connection pair (a < b, kT0 first)
  Point pos;
  auto operator<=>(const CpnPlace&) const = default;
};

struct CpnTransition {
  std::string name;
  TransitionRole role = TransitionRole::Forward;
  int t = kT0;  // rpn transition
  std::optional<TransitionKind> kind;
  GuardForm guard;
  Point pos;
  auto operator<=>(const CpnTransition&) const = default;
};

struct CpnArc {
  int place = 0;
  int transition = 0;
  bool toTransition = true;  // place -> transition
  ArcExprForm expr;
  auto operator<=>(const CpnArc&) const = default;
};

struct CpnNet {
  RpnNet rpn;
  Semantics sem = Semantics::BT;
  DependencySets deps;
  int K = 2, nb = 4;
  std::vector<CpnPlace> places;
  std::vector<CpnTransition> transitions;
  std::vector<CpnArc> arcs;

  std::vector<int> historyPlace;                 // per rpn transition
  std::map<std::pair<int, int>, int> connection;  // unordered pair (lo, hi), kT0 allowed
  std::vector<int> forward, reverse;             // cpn transition per rpn transition
  int t0 = -1;
  std::vector<std::vector<int>> arcsOf;  // per cpn transition
  std::vector<TransitionKind> kindOf;    // per rpn transition
  std::map<BaseInstance, int> initialPlace;  // where t0 put each instance
  std::vector<int> topoRank;             // per rpn transition; extends the order

  int connectionPlace(int i, int j) const { return connection.at({std::min(i, j), std::max(i, j)}); }
  auto operator<=>(const CpnNet&) const = default;
};

inline std::pair<int, int> boundsOf(const RpnNet& net) {
  int k = net.instanceCount() + 2;
  return {k, 2 * k};
}

// Molecule tokens of a place contents, idle padded to K.
inline std::vector<CpnToken> moleculeTokens(const Bag& contents, int K) {
  std::vector<CpnToken> r;
  auto comps = conCom(contents);
  for (auto& m : comps) r.emplace_back(std::move(m));
  while (int(r.size()) < K) r.emplace_back(Molecule{});
  std::sort(r.begin(), r.end());
  return r;
}

// Marking right after the virtual initial transition: initial molecules, empty
// histories, counters at 0 except the t0 pairings which count its one firing.
inline CpnMarking initialMarking(const CpnNet& cpn) {
  CpnMarking m;
  m.tokens.resize(cpn.places.size());
  for (std::size_t i = 0; i < cpn.places.size(); ++i) {
    const auto& pl = cpn.places[i];
    switch (pl.role) {
      case PlaceRole::Original: m.tokens[i] = moleculeTokens(cpn.rpn.initial[pl.a], cpn.K); break;
      case PlaceRole::History: m.tokens[i] = {CpnToken(HistorySet{})}; break;
      case PlaceRole::Connection: m.tokens[i] = {CpnToken(Counter{0})}; break;
      case PlaceRole::ConnectionT0: m.tokens[i] = {CpnToken(Counter{1})}; break;
    }
  }
  return m;
}

inline const HistorySet& historyAt(const CpnMarking& m, int place) {
  return std::get<HistorySet>(m.tokens.at(place).at(0));
}

inline int counterAt(const CpnMarking& m, int place) { return std::get<Counter>(m.tokens.at(place).at(0)).n; }

// Copies of the history sets with every quad paired with t0 removed.
inline HistorySet stripT0(const HistorySet& h) {
  HistorySet r;
  for (const auto& q : h)
    if (q.other != kT0) r.push_back(q);
  return r;
}

}  // namespace rpn
