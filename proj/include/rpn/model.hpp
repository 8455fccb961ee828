#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rpn {

// Base types and places/transitions are referred to by their index in the net.
using BaseType = int;

struct BaseInstance {
  BaseType type = 0;
  int index = 0;
  auto operator<=>(const BaseInstance&) const = default;
};

struct BondType {
  BaseType a = 0, b = 0;  // a <= b
  BondType() = default;
  BondType(BaseType x, BaseType y) : a(std::min(x, y)), b(std::max(x, y)) {}
  auto operator<=>(const BondType&) const = default;
};

struct BondInstance {
  BaseInstance x, y;  // x < y
  BondInstance() = default;
  BondInstance(BaseInstance p, BaseInstance q) : x(std::min(p, q)), y(std::max(p, q)) {
    if (p == q) throw std::invalid_argument("bond ends must differ");
  }
  BondType type() const { return {x.type, y.type}; }
  bool touches(const BaseInstance& a) const { return x == a || y == a; }
  auto operator<=>(const BondInstance&) const = default;
};

inline BaseType typeOf(const BaseInstance& a) { return a.type; }

// Sorted-vector set helpers. All set-valued members in this library are kept
// sorted and duplicate free so that == is set equality.
template <class T>
void normalize(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

template <class T>
bool contains(const std::vector<T>& v, const T& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

template <class T>
void insertSorted(std::vector<T>& v, const T& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

template <class T>
bool eraseSorted(std::vector<T>& v, const T& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return false;
  v.erase(it);
  return true;
}

template <class T>
std::vector<T> setUnion(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r;
  r.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

template <class T>
std::vector<T> setMinus(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

template <class T>
bool intersects(const std::vector<T>& a, const std::vector<T>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return true;
  }
  return false;
}

template <class T>
bool isSubset(const std::vector<T>& a, const std::vector<T>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// A set of instances and bonds: the content of a place, a molecule, or any
// sub-part of one. A molecule is a connected Bag; the idle token is the empty Bag.
struct Bag {
  std::vector<BaseInstance> nodes;
  std::vector<BondInstance> bonds;

  bool empty() const { return nodes.empty() && bonds.empty(); }
  bool has(const BaseInstance& a) const { return contains(nodes, a); }
  bool has(const BondInstance& b) const { return contains(bonds, b); }
  void normalize() {
    rpn::normalize(nodes);
    rpn::normalize(bonds);
  }
  void add(const Bag& o) {
    nodes = setUnion(nodes, o.nodes);
    bonds = setUnion(bonds, o.bonds);
  }
  void remove(const Bag& o) {
    nodes = setMinus(nodes, o.nodes);
    bonds = setMinus(bonds, o.bonds);
  }
  auto operator<=>(const Bag&) const = default;
};

using Molecule = Bag;

inline Bag bagUnion(const Bag& a, const Bag& b) {
  Bag r = a;
  r.add(b);
  return r;
}

// Every simple path of at least two vertices starting at a, following bonds of C.
inline std::vector<std::vector<BaseInstance>> paths(const BaseInstance& a, const Bag& c) {
  std::vector<std::vector<BaseInstance>> out;
  if (!c.has(a)) return out;
  std::vector<BaseInstance> cur{a};
  auto rec = [&](auto&& self) -> void {
    const BaseInstance last = cur.back();
    for (const auto& b : c.bonds) {
      if (!b.touches(last)) continue;
      BaseInstance nxt = b.x == last ? b.y : b.x;
      if (!c.has(nxt) || std::find(cur.begin(), cur.end(), nxt) != cur.end()) continue;
      cur.push_back(nxt);
      out.push_back(cur);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  normalize(out);
  return out;
}

// Connected component of a inside C; empty when a is not in C.
inline Bag con(const BaseInstance& a, const Bag& c) {
  Bag r;
  if (!c.has(a)) return r;
  std::vector<BaseInstance> stack{a};
  r.nodes.push_back(a);
  while (!stack.empty()) {
    BaseInstance v = stack.back();
    stack.pop_back();
    for (const auto& b : c.bonds) {
      if (!b.touches(v)) continue;
      BaseInstance w = b.x == v ? b.y : b.x;
      if (!c.has(w)) continue;
      r.bonds.push_back(b);
      if (std::find(r.nodes.begin(), r.nodes.end(), w) == r.nodes.end()) {
        r.nodes.push_back(w);
        stack.push_back(w);
      }
    }
  }
  r.normalize();
  return r;
}

// Partition of X into its connected components, ordered by smallest instance.
inline std::vector<Molecule> conCom(const Bag& x) {
  for (const auto& b : x.bonds)
    if (!x.has(b.x) || !x.has(b.y)) throw std::invalid_argument("bond with an end outside the set");
  std::vector<int> parent(x.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto idx = [&](const BaseInstance& a) {
    return int(std::lower_bound(x.nodes.begin(), x.nodes.end(), a) - x.nodes.begin());
  };
  for (const auto& b : x.bonds) {
    int i = find(idx(b.x)), j = find(idx(b.y));
    if (i != j) parent[std::max(i, j)] = std::min(i, j);
  }
  std::map<int, Molecule> groups;
  for (std::size_t i = 0; i < x.nodes.size(); ++i) groups[find(int(i))].nodes.push_back(x.nodes[i]);
  for (const auto& b : x.bonds) groups[find(idx(b.x))].bonds.push_back(b);
  std::vector<Molecule> out;
  for (auto& [root, m] : groups) out.push_back(std::move(m));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<BaseInstance> restrictByType(const std::vector<BaseInstance>& x, BaseType t) {
  std::vector<BaseInstance> r;
  for (const auto& a : x)
    if (a.type == t) r.push_back(a);
  return r;
}

inline std::vector<BondInstance> restrictByType(const std::vector<BondInstance>& x, const BondType& t) {
  std::vector<BondInstance> r;
  for (const auto& b : x)
    if (b.type() == t) r.push_back(b);
  return r;
}

// Arc inscription. Positives are multisets (sorted, repeats allowed);
// negatives are sets and may only label place->transition arcs.
struct ArcLabel {
  std::vector<BaseType> bases;
  std::vector<BondType> bonds;
  std::vector<BaseType> negBases;
  std::vector<BondType> negBonds;

  void normalize() {
    std::sort(bases.begin(), bases.end());
    std::sort(bonds.begin(), bonds.end());
    rpn::normalize(negBases);
    rpn::normalize(negBonds);
  }
  int count(BaseType a) const { return int(std::count(bases.begin(), bases.end(), a)); }
  bool hasNegatives() const { return !negBases.empty() || !negBonds.empty(); }
  bool empty() const { return bases.empty() && bonds.empty() && !hasNegatives(); }
  // Base content with each bond type read as the two-element multiset of its ends.
  std::vector<BaseType> baseContent() const {
    std::vector<BaseType> r = bases;
    for (const auto& b : bonds) {
      r.push_back(b.a);
      r.push_back(b.b);
    }
    std::sort(r.begin(), r.end());
    return r;
  }
  auto operator<=>(const ArcLabel&) const = default;
};

using Marking = std::vector<Bag>;  // indexed by place

struct Point {
  double x = 0, y = 0;
  auto operator<=>(const Point&) const = default;
};

struct RpnNet {
  std::string name = "net";
  std::vector<std::string> baseTypes;
  std::vector<BondType> bondTypes;
  std::vector<std::string> places;
  std::vector<std::string> transitions;
  // pre[t][p] labels the arc p->t, post[t][p] labels t->p.
  std::vector<std::map<int, ArcLabel>> pre, post;
  Marking initial;
  std::map<std::string, Point> positions;  // optional layout hints by node name

  int placeCount() const { return int(places.size()); }
  int transitionCount() const { return int(transitions.size()); }

  int addPlace(const std::string& n) {
    places.push_back(n);
    initial.emplace_back();
    return placeCount() - 1;
  }
  int addTransition(const std::string& n) {
    transitions.push_back(n);
    pre.emplace_back();
    post.emplace_back();
    return transitionCount() - 1;
  }

  std::optional<int> findPlace(const std::string& n) const {
    for (int i = 0; i < placeCount(); ++i)
      if (places[i] == n) return i;
    return std::nullopt;
  }
  std::optional<int> findTransition(const std::string& n) const {
    for (int i = 0; i < transitionCount(); ++i)
      if (transitions[i] == n) return i;
    return std::nullopt;
  }
  std::optional<BaseType> findBase(const std::string& n) const {
    for (int i = 0; i < int(baseTypes.size()); ++i)
      if (baseTypes[i] == n) return i;
    return std::nullopt;
  }

  std::string instanceName(const BaseInstance& a) const {
    return baseTypes.at(a.type) + std::to_string(a.index);
  }
  std::string bondName(const BondInstance& b) const { return instanceName(b.x) + "-" + instanceName(b.y); }
  std::string bondTypeName(const BondType& b) const { return baseTypes.at(b.a) + "-" + baseTypes.at(b.b); }

  // All base instances of the initial marking, sorted.
  std::vector<BaseInstance> instances() const {
    std::vector<BaseInstance> r;
    for (const auto& b : initial) r.insert(r.end(), b.nodes.begin(), b.nodes.end());
    rpn::normalize(r);
    return r;
  }
  int instanceCount() const { return int(instances().size()); }

  // Place initially holding a, if any.
  std::optional<int> initialPlaceOf(const BaseInstance& a) const {
    for (int p = 0; p < placeCount(); ++p)
      if (initial[p].has(a)) return p;
    return std::nullopt;
  }

  auto operator<=>(const RpnNet&) const = default;
};

// Selected instances per input place.
using Selection = std::map<int, std::vector<BaseInstance>>;

inline std::vector<BaseInstance> selectedInstances(const Selection& s) {
  std::vector<BaseInstance> r;
  for (const auto& [p, v] : s) r.insert(r.end(), v.begin(), v.end());
  normalize(r);
  return r;
}

struct Occurrence {
  int k = 0;
  Selection sel;
  auto operator<=>(const Occurrence&) const = default;
};

// H(t) per transition, each sorted by k.
using History = std::vector<std::vector<Occurrence>>;

struct RpnState {
  Marking marking;
  History history;
  auto operator<=>(const RpnState&) const = default;
};

inline RpnState initialState(const RpnNet& net) {
  return {net.initial, History(net.transitionCount())};
}

// Place currently holding instance a, or -1.
inline int locate(const Marking& m, const BaseInstance& a) {
  for (int p = 0; p < int(m.size()); ++p)
    if (m[p].has(a)) return p;
  return -1;
}

inline int locate(const Marking& m, const BondInstance& b) {
  for (int p = 0; p < int(m.size()); ++p)
    if (m[p].has(b)) return p;
  return -1;
}

inline int occurrenceCount(const History& h) {
  int n = 0;
  for (const auto& v : h) n += int(v.size());
  return n;
}

inline int maxK(const History& h) {
  int k = 0;
  for (const auto& v : h)
    for (const auto& o : v) k = std::max(k, o.k);
  return k;
}

}  // namespace rpn
