#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <rpn/rpn.hpp>

namespace rpntest {

using namespace rpn;

inline std::string readFixture(const std::string& name) {
  std::ifstream in(std::string(RPN_FIXTURES) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline RpnNet fixture(const std::string& name) { return parseRpn(readFixture(name + ".rpn")); }

inline BaseInstance inst(const RpnNet& net, const std::string& name) {
  std::size_t i = name.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
  return {*net.findBase(name.substr(0, i)), std::stoi(name.substr(i))};
}

inline BondInstance bond(const RpnNet& net, const std::string& a, const std::string& b) {
  return {inst(net, a), inst(net, b)};
}

inline int place(const RpnNet& net, const std::string& n) { return *net.findPlace(n); }
inline int trans(const RpnNet& net, const std::string& n) { return *net.findTransition(n); }

// Bag built from instance names and "x-y" bonds.
inline Bag bag(const RpnNet& net, std::initializer_list<std::string> items) {
  Bag b;
  for (const auto& s : items) {
    auto dash = s.find('-');
    if (dash == std::string::npos) b.nodes.push_back(inst(net, s));
    else b.bonds.push_back(bond(net, s.substr(0, dash), s.substr(dash + 1)));
  }
  b.normalize();
  return b;
}

inline Selection sel(const RpnNet& net, std::initializer_list<std::pair<std::string, std::string>> items) {
  Selection s;
  for (const auto& [p, a] : items) s[place(net, p)].push_back(inst(net, a));
  for (auto& [p, v] : s) normalize(v);
  return s;
}

inline Move forwardMove(const RpnNet& net, const std::string& t, const Selection& s) {
  return {true, trans(net, t), s, 0};
}
inline Move reverseMove(const RpnNet& net, const std::string& t, int k) { return {false, trans(net, t), {}, k}; }

// Random acyclic low-level net built layer by layer: every transition writes a
// fresh place, so the transition order is already topological.
inline RpnNet randomNet(std::mt19937& rng, int transitions = 3) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  RpnNet net;
  net.name = "random";
  int types = 2 + pick(3);
  for (int i = 0; i < types; ++i) net.baseTypes.push_back(std::string(1, char('a' + i)));
  std::vector<std::vector<BaseType>> content;  // base types that may reach each place
  int places = 2 + pick(3);
  std::vector<int> next(types, 1);
  for (int p = 0; p < places; ++p) {
    net.addPlace("p" + std::to_string(p + 1));
    BaseType ty = pick(types);
    int n = 1 + pick(2);
    for (int i = 0; i < n; ++i) net.initial[p].nodes.push_back({ty, next[ty]++});
    net.initial[p].normalize();
    content.push_back({ty});
  }
  for (int t = 0; t < transitions; ++t) {
    int tr = net.addTransition("t" + std::to_string(t + 1));
    int out = net.addPlace("p" + std::to_string(net.placeCount() + 1));
    int kind = pick(3);
    int p = pick(net.placeCount() - 1);
    ArcLabel in, o;
    std::vector<BaseType> reach = content[p];
    if (kind == 0 || kind == 2) {
      BaseType a = content[p][pick(int(content[p].size()))];
      if (kind == 0) {
        in.bases = {a};
        o.bases = {a};
      } else {
        BaseType b = content[p][pick(int(content[p].size()))];
        in.bases = {a, b};
        in.negBonds = {BondType(a, b)};
        o.bonds = {BondType(a, b)};
        insertSorted(net.bondTypes, BondType(a, b));
      }
      in.normalize();
      o.normalize();
      net.pre[tr][p] = in;
    } else {
      int q = pick(net.placeCount() - 1);
      if (q == p) q = (p + 1) % (net.placeCount() - 1);
      BaseType a = content[p][pick(int(content[p].size()))];
      BaseType b = content[q][pick(int(content[q].size()))];
      ArcLabel l1, l2;
      l1.bases = {a};
      l2.bases = {b};
      o.bonds = {BondType(a, b)};
      insertSorted(net.bondTypes, BondType(a, b));
      net.pre[tr][p] = l1;
      net.pre[tr][q] = l2;
      reach = setUnion(reach, content[q]);
    }
    net.post[tr][out] = o;
    normalize(reach);
    content.push_back(reach);
  }
  return net;
}

// Every base instance in the marking, duplicates kept.
inline std::vector<BaseInstance> allInstances(const Marking& m) {
  std::vector<BaseInstance> r;
  for (const auto& b : m) r.insert(r.end(), b.nodes.begin(), b.nodes.end());
  std::sort(r.begin(), r.end());
  return r;
}

// Uniformly random enabled move, or nullopt in a dead state.
inline std::optional<Move> randomMove(std::mt19937& rng, const RpnNet& net, const RpnState& st, Semantics sem) {
  auto ms = enabledMoves(net, st, sem);
  if (ms.empty()) return std::nullopt;
  return ms[std::uniform_int_distribution<std::size_t>(0, ms.size() - 1)(rng)];
}

}  // namespace rpntest
