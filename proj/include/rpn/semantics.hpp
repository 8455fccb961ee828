#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "model.hpp"

namespace rpn {

// Bonds created by t for selection S: one per output bond type and pair of
// distinct selected instances of its end types.
inline std::vector<BondInstance> bondingEffect(const RpnNet& net, int t, const Selection& s) {
  std::vector<BondInstance> out;
  auto sel = selectedInstances(s);
  for (const auto& [q, l] : net.post.at(t))
    for (const auto& bt : l.bonds)
      for (const auto& x : sel)
        for (const auto& y : sel)
          if (x < y && BondType(x.type, y.type) == bt) out.emplace_back(x, y);
  normalize(out);
  return out;
}

namespace detail {

inline void combinations(const std::vector<BaseInstance>& pool, int k, std::size_t from,
                         std::vector<BaseInstance>& cur, std::vector<std::vector<BaseInstance>>& out) {
  if (int(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    combinations(pool, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Union of the components of the selected instances within one place.
inline Bag selectedComponents(const Bag& place, const std::vector<BaseInstance>& sel) {
  Bag r;
  for (const auto& a : sel) r.add(con(a, place));
  return r;
}

inline Bag inputContents(const RpnNet& net, const Marking& m, int t) {
  Bag r;
  for (const auto& [p, l] : net.pre.at(t)) r.add(m[p]);
  return r;
}

}  // namespace detail

// Checks every enabledness condition for one concrete selection.
inline bool isForwardEnabled(const RpnNet& net, const RpnState& st, int t, const Selection& s) {
  const Marking& m = st.marking;
  for (const auto& [p, v] : s)
    if (!net.pre.at(t).count(p)) return false;
  for (const auto& [p, l] : net.pre.at(t)) {
    auto it = s.find(p);
    std::vector<BaseInstance> sel = it == s.end() ? std::vector<BaseInstance>{} : it->second;
    for (const auto& a : sel)
      if (!m[p].has(a)) return false;
    std::vector<BaseType> types;
    for (const auto& a : sel) types.push_back(a.type);
    std::sort(types.begin(), types.end());
    if (types != l.bases) return false;
    Bag comp = detail::selectedComponents(m[p], sel);
    for (BaseType a : l.negBases)
      if (!restrictByType(comp.nodes, a).empty()) return false;
    for (const auto& b : l.negBonds)
      if (!restrictByType(comp.bonds, b).empty()) return false;
  }
  // Base preservation between the consumed and produced sides.
  std::vector<BaseType> in, out;
  for (const auto& [p, l] : net.pre.at(t)) {
    auto c = l.baseContent();
    in.insert(in.end(), c.begin(), c.end());
  }
  for (const auto& [p, l] : net.post.at(t)) {
    auto c = l.baseContent();
    out.insert(out.end(), c.begin(), c.end());
  }
  std::sort(in.begin(), in.end());
  std::sort(out.begin(), out.end());
  if (in != out) return false;
  Bag inBag = detail::inputContents(net, m, t);
  auto sel = selectedInstances(s);
  for (const auto& [q, l] : net.post.at(t))
    for (const auto& bt : l.bonds) {
      bool ok = false;
      for (const auto& x : sel)
        for (const auto& y : sel)
          if (x != y && x.type == bt.a && y.type == bt.b && !inBag.has(BondInstance(x, y))) ok = true;
      if (!ok) return false;
    }
  return true;
}

// All selections enabling t, in canonical order.
inline std::vector<Selection> forwardEnabled(const RpnNet& net, const RpnState& st, int t) {
  std::vector<Selection> acc{Selection{}};
  for (const auto& [p, l] : net.pre.at(t)) {
    std::vector<BaseType> types = l.bases;
    normalize(types);
    std::vector<std::vector<BaseInstance>> choices{{}};
    for (BaseType a : types) {
      std::vector<std::vector<BaseInstance>> combos, cur;
      std::vector<BaseInstance> tmp;
      detail::combinations(restrictByType(st.marking[p].nodes, a), l.count(a), 0, tmp, combos);
      for (const auto& c : choices)
        for (const auto& d : combos) {
          auto e = c;
          e.insert(e.end(), d.begin(), d.end());
          cur.push_back(e);
        }
      choices = std::move(cur);
    }
    std::vector<Selection> next;
    for (const auto& s : acc)
      for (auto c : choices) {
        normalize(c);
        Selection e = s;
        e[p] = c;
        next.push_back(e);
      }
    acc = std::move(next);
  }
  std::vector<Selection> out;
  for (const auto& s : acc)
    if (isForwardEnabled(net, st, t, s)) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

inline RpnState fireForward(const RpnNet& net, const RpnState& st, int t, const Selection& s) {
  if (!isForwardEnabled(net, st, t, s))
    throw std::invalid_argument("transition " + net.transitions.at(t) + " is not enabled for this selection");
  RpnState r = st;
  Bag moved;
  for (const auto& [p, sel] : s) {
    Bag comp = detail::selectedComponents(st.marking[p], sel);
    r.marking[p].remove(comp);
    moved.add(comp);
  }
  Bag inBag = detail::inputContents(net, st.marking, t);
  for (const auto& [q, l] : net.post.at(t)) {
    r.marking[q].add(moved);
    Bag eff;
    auto sel = selectedInstances(s);
    for (const auto& bt : l.bonds)
      for (const auto& x : sel)
        for (const auto& y : sel)
          if (x < y && BondType(x.type, y.type) == bt && !inBag.has(BondInstance(x, y)))
            eff.bonds.push_back(BondInstance(x, y));
    eff.normalize();
    r.marking[q].add(eff);
  }
  r.history[t].push_back({maxK(st.history) + 1, s});
  std::sort(r.history[t].begin(), r.history[t].end());
  return r;
}

struct OccurrenceRef {
  int t = 0;
  int k = 0;
  auto operator<=>(const OccurrenceRef&) const = default;
};

inline const Occurrence* findOccurrence(const RpnState& st, int t, int k) {
  for (const auto& o : st.history.at(t))
    if (o.k == k) return &o;
  return nullptr;
}

inline std::vector<Occurrence> btEnabled(const RpnState& st, int t) {
  int top = maxK(st.history);
  std::vector<Occurrence> r;
  for (const auto& o : st.history.at(t))
    if (o.k == top) r.push_back(o);
  return r;
}

// Causal reversibility: no later occurrence selected an instance of the
// current component of any instance selected by this one.
inline bool isCoEnabled(const RpnState& st, int t, const Occurrence& occ) {
  for (const auto& a : selectedInstances(occ.sel)) {
    int q = locate(st.marking, a);
    if (q < 0) return false;
    Bag c = con(a, st.marking[q]);
    for (const auto& hv : st.history)
      for (const auto& o : hv)
        if (o.k > occ.k && intersects(selectedInstances(o.sel), c.nodes)) return false;
  }
  (void)t;
  return true;
}

inline std::vector<Occurrence> coEnabled(const RpnState& st, int t) {
  std::vector<Occurrence> r;
  for (const auto& o : st.history.at(t))
    if (isCoEnabled(st, t, o)) r.push_back(o);
  return r;
}

inline std::vector<Occurrence> oEnabled(const RpnState& st, int t) { return st.history.at(t); }

inline std::vector<Occurrence> enabledReversals(const RpnState& st, int t, Semantics sem) {
  switch (sem) {
    case Semantics::BT: return btEnabled(st, t);
    case Semantics::C: return coEnabled(st, t);
    case Semantics::OOC: return oEnabled(st, t);
  }
  return {};
}

namespace detail {

inline History removeAndShift(const History& h, int t, int k) {
  History r = h;
  auto& v = r[t];
  v.erase(std::remove_if(v.begin(), v.end(), [&](const Occurrence& o) { return o.k == k; }), v.end());
  for (auto& hv : r)
    for (auto& o : hv)
      if (o.k > k) --o.k;
  return r;
}

// Marking update shared by backtracking and causal reversal.
inline Marking reverseMarking(const RpnNet& net, const Marking& m, int t, const Occurrence& occ) {
  Bag eff;
  eff.bonds = bondingEffect(net, t, occ.sel);
  Marking r = m;
  for (const auto& [q, l] : net.post.at(t)) {
    Bag reduced = m[q];
    reduced.remove(eff);
    for (const auto& [p, sel] : occ.sel)
      for (const auto& a : sel) r[p].add(con(a, reduced));
    Bag gone;
    for (const auto& a : selectedInstances(occ.sel)) gone.add(con(a, m[q]));
    r[q].remove(gone);
  }
  return r;
}

}  // namespace detail

inline RpnState reverseBt(const RpnNet& net, const RpnState& st, int t, int k) {
  const Occurrence* occ = findOccurrence(st, t, k);
  if (!occ || k != maxK(st.history))
    throw std::invalid_argument("occurrence is not the last executed one");
  RpnState r;
  r.marking = detail::reverseMarking(net, st.marking, t, *occ);
  r.history = st.history;
  auto& v = r.history[t];
  v.erase(std::remove_if(v.begin(), v.end(), [&](const Occurrence& o) { return o.k == k; }), v.end());
  return r;
}

inline RpnState reverseCo(const RpnNet& net, const RpnState& st, int t, int k) {
  const Occurrence* occ = findOccurrence(st, t, k);
  if (!occ || !isCoEnabled(st, t, *occ)) throw std::invalid_argument("occurrence is not causally reversible");
  RpnState r;
  r.marking = detail::reverseMarking(net, st.marking, t, *occ);
  r.history = detail::removeAndShift(st.history, t, k);
  return r;
}

// The transition whose occurrence with the largest k selected an instance of C.
inline std::optional<int> lastUser(const Bag& c, const History& h) {
  std::optional<int> best;
  int bestK = 0;
  for (int t = 0; t < int(h.size()); ++t)
    for (const auto& o : h[t])
      if (o.k > bestK && intersects(selectedInstances(o.sel), c.nodes)) {
        bestK = o.k;
        best = t;
      }
  return best;
}

inline RpnState reverseOoc(const RpnNet& net, const RpnState& st, int t, int k) {
  const Occurrence* found = findOccurrence(st, t, k);
  if (!found) throw std::invalid_argument("no such occurrence");
  const Occurrence occ = *found;
  RpnState r;
  r.history = detail::removeAndShift(st.history, t, k);
  Marking m = st.marking;
  auto eff = bondingEffect(net, t, occ.sel);
  for (auto& b : m) b.bonds = setMinus(b.bonds, eff);
  for (const auto& a : selectedInstances(occ.sel)) {
    int z = locate(m, a);
    if (z < 0) throw std::logic_error("selected instance missing from marking");
    Bag c = con(a, m[z]);
    int target = -1;
    if (auto u = lastUser(c, r.history)) {
      const auto& out = net.post.at(*u);
      if (out.size() != 1) throw std::logic_error("transition without a single output place");
      target = out.begin()->first;
    } else {
      for (int p = 0; p < net.placeCount(); ++p)
        if (isSubset(c.nodes, net.initial[p].nodes)) target = p;
      if (target < 0) throw std::logic_error("component with no user spans several initial places");
    }
    m[z].remove(c);
    m[target].add(c);
  }
  r.marking = std::move(m);
  return r;
}

inline RpnState reverse(const RpnNet& net, const RpnState& st, Semantics sem, int t, int k) {
  switch (sem) {
    case Semantics::BT: return reverseBt(net, st, t, k);
    case Semantics::C: return reverseCo(net, st, t, k);
    case Semantics::OOC: return reverseOoc(net, st, t, k);
  }
  throw std::logic_error("unknown semantics");
}

// One step of an RPN run.
struct Move {
  bool forward = true;
  int t = 0;
  Selection sel;  // forward
  int k = 0;      // reverse
  auto operator<=>(const Move&) const = default;
};

inline std::vector<Move> enabledMoves(const RpnNet& net, const RpnState& st, Semantics sem) {
  std::vector<Move> r;
  for (int t = 0; t < net.transitionCount(); ++t)
    for (auto& s : forwardEnabled(net, st, t)) r.push_back({true, t, std::move(s), 0});
  for (int t = 0; t < net.transitionCount(); ++t)
    for (const auto& o : enabledReversals(st, t, sem)) r.push_back({false, t, {}, o.k});
  return r;
}

inline RpnState apply(const RpnNet& net, const RpnState& st, Semantics sem, const Move& mv) {
  return mv.forward ? fireForward(net, st, mv.t, mv.sel) : reverse(net, st, sem, mv.t, mv.k);
}

}  // namespace rpn
