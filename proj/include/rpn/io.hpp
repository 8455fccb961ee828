#pragma once

#include <cctype>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpn.hpp"
#include "translate.hpp"

namespace rpn {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int l, const std::string& m) : std::runtime_error("line " + std::to_string(l) + ": " + m), line(l) {}
};

namespace detail {

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> r;
  std::string cur;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      if (!cur.empty()) r.push_back(cur), cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) r.push_back(cur);
  return r;
}

inline bool isIdent(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  RpnNet run() {
    std::istringstream in(text_);
    std::string raw;
    int ln = 0;
    bool any = false;
    while (std::getline(in, raw)) {
      ++ln;
      line_ = ln;
      auto hash = raw.find('#');
      std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
      auto w = words(s);
      if (w.empty()) continue;
      any = true;
      statement(w, s);
    }
    if (!any) throw ParseError(ln == 0 ? 1 : ln, "empty net description");
    for (auto& m : net_.initial) m.normalize();
    normalize(net_.bondTypes);
    return net_;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(line_, m); }

  BaseType base(const std::string& n) const {
    auto b = net_.findBase(n);
    if (!b) fail("undeclared base type '" + n + "'");
    return *b;
  }

  BondType bondType(const std::string& s) {
    auto dash = s.find('-');
    BondType b(base(s.substr(0, dash)), base(s.substr(dash + 1)));
    insertSorted(net_.bondTypes, b);
    return b;
  }

  BaseInstance instance(const std::string& s) const {
    std::size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    if (i == 0 || i == s.size()) fail("instance '" + s + "' needs a base type and an index");
    int idx = std::stoi(s.substr(i));
    if (idx <= 0) fail("instance index must be positive in '" + s + "'");
    return {base(s.substr(0, i)), idx};
  }

  void declareNames(const std::vector<std::string>& w, std::vector<std::string>& into, const char* what) {
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (!isIdent(w[i])) fail(std::string("bad ") + what + " name '" + w[i] + "'");
      if (std::find(into.begin(), into.end(), w[i]) != into.end()) fail(std::string("duplicate ") + what + " '" + w[i] + "'");
      if (what == std::string("place") && (net_.findTransition(w[i]) || net_.findPlace(w[i])))
        fail("name '" + w[i] + "' already used");
      if (what == std::string("transition") && net_.findPlace(w[i])) fail("name '" + w[i] + "' already used");
      if (what == std::string("place")) net_.addPlace(w[i]);
      else if (what == std::string("transition")) net_.addTransition(w[i]);
      else into.push_back(w[i]);
    }
  }

  ArcLabel label(const std::vector<std::string>& items, bool input) {
    ArcLabel l;
    for (const auto& it : items) {
      bool neg = it[0] == '!';
      std::string body = neg ? it.substr(1) : it;
      if (neg && !input) fail("negative label on an output arc");
      if (body.find('-') != std::string::npos) {
        BondType b = bondType(body);
        (neg ? l.negBonds : l.bonds).push_back(b);
      } else {
        BaseType b = base(body);
        (neg ? l.negBases : l.bases).push_back(b);
      }
    }
    l.normalize();
    return l;
  }

  void statement(const std::vector<std::string>& w, const std::string& s) {
    const std::string& kw = w[0];
    if (kw == "net") {
      if (w.size() != 2) fail("usage: net NAME");
      net_.name = w[1];
    } else if (kw == "bases") {
      if (!net_.places.empty() || !net_.transitions.empty()) fail("bases must be declared before places and transitions");
      for (std::size_t i = 1; i < w.size(); ++i) {
        const auto& n = w[i];
        if (!isIdent(n) || std::isdigit(static_cast<unsigned char>(n.back())))
          fail("base type '" + n + "' must be an identifier not ending in a digit");
      }
      declareNames(w, net_.baseTypes, "base");
    } else if (kw == "bonds") {
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i].find('-') == std::string::npos) fail("bond type '" + w[i] + "' must be written a-b");
        bondType(w[i]);
      }
    } else if (kw == "places") {
      declareNames(w, net_.places, "place");
    } else if (kw == "transitions") {
      declareNames(w, net_.transitions, "transition");
    } else if (kw == "arc") {
      auto colon = s.find(':');
      if (colon == std::string::npos) fail("usage: arc SRC -> DST : ITEMS");
      auto head = words(s.substr(0, colon));
      if (head.size() != 4 || head[2] != "->") fail("usage: arc SRC -> DST : ITEMS");
      auto items = words(s.substr(colon + 1));
      if (items.empty()) fail("arc label is empty");
      auto p1 = net_.findPlace(head[1]), t1 = net_.findTransition(head[1]);
      auto p2 = net_.findPlace(head[3]), t2 = net_.findTransition(head[3]);
      if (p1 && t2) {
        if (net_.pre[*t2].count(*p1)) fail("duplicate arc");
        net_.pre[*t2][*p1] = label(items, true);
      } else if (t1 && p2) {
        if (net_.post[*t1].count(*p2)) fail("duplicate arc");
        net_.post[*t1][*p2] = label(items, false);
      } else {
        fail("arc must connect a declared place and a declared transition");
      }
    } else if (kw == "marking") {
      auto colon = s.find(':');
      if (colon == std::string::npos) fail("usage: marking PLACE : ITEMS");
      auto head = words(s.substr(0, colon));
      if (head.size() != 2) fail("usage: marking PLACE : ITEMS");
      auto p = net_.findPlace(head[1]);
      if (!p) fail("undeclared place '" + head[1] + "'");
      Bag& b = net_.initial[*p];
      std::vector<BondInstance> bonds;
      for (const auto& it : words(s.substr(colon + 1))) {
        auto dash = it.find('-');
        if (dash == std::string::npos) {
          BaseInstance a = instance(it);
          for (const auto& other : net_.initial)
            if (other.has(a)) fail("instance " + it + " already placed");
          insertSorted(b.nodes, a);
        } else {
          BaseInstance x = instance(it.substr(0, dash)), y = instance(it.substr(dash + 1));
          if (x == y) fail("bond ends must differ in " + it);
          bonds.emplace_back(x, y);
        }
      }
      for (const auto& bd : bonds) {
        if (!b.has(bd.x) || !b.has(bd.y)) fail("bond ends must be listed in the same place");
        insertSorted(net_.bondTypes, bd.type());
        insertSorted(b.bonds, bd);
      }
    } else if (kw == "pos") {
      if (w.size() != 4) fail("usage: pos NODE X Y");
      if (!net_.findPlace(w[1]) && !net_.findTransition(w[1])) fail("unknown node '" + w[1] + "'");
      try {
        net_.positions[w[1]] = {std::stod(w[2]), std::stod(w[3])};
      } catch (const std::exception&) {
        fail("bad coordinates");
      }
    } else {
      fail("unknown statement '" + kw + "'");
    }
  }

  std::string text_;
  RpnNet net_;
  int line_ = 0;
};

inline std::string fmtNum(double v) {
  std::ostringstream o;
  o << std::setprecision(10) << v;
  return o.str();
}

}  // namespace detail

inline RpnNet parseRpn(const std::string& text) { return detail::Parser(text).run(); }

inline std::string labelText(const RpnNet& net, const ArcLabel& l) {
  std::vector<std::string> items;
  for (BaseType b : l.bases) items.push_back(net.baseTypes[b]);
  for (const auto& b : l.bonds) items.push_back(net.bondTypeName(b));
  for (BaseType b : l.negBases) items.push_back("!" + net.baseTypes[b]);
  for (const auto& b : l.negBonds) items.push_back("!" + net.bondTypeName(b));
  std::string r;
  for (const auto& s : items) r += (r.empty() ? "" : " ") + s;
  return r;
}

inline std::string bagText(const RpnNet& net, const Bag& b) {
  std::string r;
  for (const auto& a : b.nodes) r += (r.empty() ? "" : " ") + net.instanceName(a);
  for (const auto& bd : b.bonds) r += (r.empty() ? "" : " ") + net.bondName(bd);
  return r;
}

inline std::string serializeRpn(const RpnNet& net) {
  std::ostringstream o;
  auto list = [&](const char* kw, const std::vector<std::string>& v) {
    o << kw;
    for (const auto& s : v) o << ' ' << s;
    o << '\n';
  };
  o << "net " << net.name << '\n';
  list("bases", net.baseTypes);
  if (!net.bondTypes.empty()) {
    std::vector<std::string> b;
    for (const auto& x : net.bondTypes) b.push_back(net.bondTypeName(x));
    list("bonds", b);
  }
  list("places", net.places);
  list("transitions", net.transitions);
  for (int t = 0; t < net.transitionCount(); ++t) {
    for (const auto& [p, l] : net.pre[t])
      o << "arc " << net.places[p] << " -> " << net.transitions[t] << " : " << labelText(net, l) << '\n';
    for (const auto& [p, l] : net.post[t])
      o << "arc " << net.transitions[t] << " -> " << net.places[p] << " : " << labelText(net, l) << '\n';
  }
  for (int p = 0; p < net.placeCount(); ++p)
    if (!net.initial[p].empty()) o << "marking " << net.places[p] << " : " << bagText(net, net.initial[p]) << '\n';
  for (const auto& [n, pt] : net.positions) o << "pos " << n << ' ' << detail::fmtNum(pt.x) << ' ' << detail::fmtNum(pt.y) << '\n';
  return o.str();
}

// Molecule as "{a1 b1 | a1-b1}", the idle token as "{}".
inline std::string moleculeText(const RpnNet& net, const Molecule& m) {
  if (m.empty()) return "{}";
  std::string r = "{";
  for (std::size_t i = 0; i < m.nodes.size(); ++i) r += (i ? " " : "") + net.instanceName(m.nodes[i]);
  if (!m.bonds.empty()) {
    r += " |";
    for (const auto& b : m.bonds) r += " " + net.bondName(b);
  }
  return r + "}";
}

inline std::string markingText(const RpnNet& net, const Marking& m) {
  std::ostringstream o;
  for (int p = 0; p < net.placeCount(); ++p) {
    o << net.places[p] << ":";
    for (const auto& c : conCom(m[p])) o << ' ' << moleculeText(net, c);
    o << '\n';
  }
  return o.str();
}

inline std::string transitionRef(const RpnNet& net, int t) { return t == kT0 ? "t0" : net.transitions.at(t); }

inline std::string payloadText(const RpnNet& net, const Payload& p) {
  if (auto* t = std::get_if<Transferred>(&p)) return net.instanceName(t->a);
  return net.bondName(std::get<Bonded>(p).b);
}

inline std::string quadText(const RpnNet& net, const HistoryQuad& q) {
  return "(" + std::to_string(q.k) + "," + transitionRef(net, q.other) + "," + transitionRef(net, q.owner) + "," +
         payloadText(net, q.payload) + ")";
}

inline std::string tokenText(const RpnNet& net, const CpnToken& tok) {
  if (auto* m = std::get_if<Molecule>(&tok)) return moleculeText(net, *m);
  if (auto* c = std::get_if<Counter>(&tok)) return std::to_string(c->n);
  std::string r = "{";
  const auto& h = std::get<HistorySet>(tok);
  for (std::size_t i = 0; i < h.size(); ++i) r += (i ? " " : "") + quadText(net, h[i]);
  return r + "}";
}

inline std::string cpnMarkingText(const CpnNet& cpn, const CpnMarking& m) {
  std::ostringstream o;
  for (std::size_t i = 0; i < cpn.places.size(); ++i) {
    o << cpn.places[i].name << ":";
    int idle = 0;
    for (const auto& tok : m.tokens[i]) {
      if (auto* mol = std::get_if<Molecule>(&tok); mol && mol->empty()) {
        ++idle;
        continue;
      }
      o << ' ' << tokenText(cpn.rpn, tok);
    }
    if (idle) o << ' ' << idle << "x{}";
    o << '\n';
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// Inscription text for the catalogue values.

namespace detail {

inline std::string tIdx(int t) { return std::to_string(t == kT0 ? 0 : t + 1); }
inline std::string mol(int s) { return "(X" + std::to_string(s + 1) + ",Y" + std::to_string(s + 1) + ")"; }
inline std::string cntVar(int owner, int j) { return "cnt" + tIdx(owner) + "_" + tIdx(j); }
inline std::string kVar(int j) { return "k" + tIdx(j); }
inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

inline std::string negText(const RpnNet& net, const Negatives& n) {
  std::string r = "[";
  bool first = true;
  for (BaseType b : n.bases) r += (first ? "" : ",") + quoted(net.baseTypes[b]), first = false;
  for (const auto& b : n.bonds) r += (first ? "" : ",") + quoted(net.bondTypeName(b)), first = false;
  return r + "]";
}

struct GuardText {
  const CpnNet& cpn;
  std::string operator()(const GuardTRN& g) const {
    std::string r = "[isElement(a1,X1), typeOf(a1)=" + quoted(cpn.rpn.baseTypes[g.type]);
    if (!g.neg.empty()) r += ", noneOf(" + negText(cpn.rpn, g.neg) + ",[(X1,Y1)])";
    return r + "]";
  }
  std::string operator()(const GuardBC1& g) const {
    std::string r = "[a1<>a2, sameTypes([typeOf(a1),typeOf(a2)],[" + quoted(cpn.rpn.baseTypes[g.a]) + "," +
                    quoted(cpn.rpn.baseTypes[g.b]) + "]), (isElement(a1,X1) andalso isElement(a2,X2)) orelse "
                    "(isElement(a1,X1) andalso isElement(a2,X1) andalso not (isBond((a1,a2),Y1)) andalso "
                    "(X2,Y2)=([],[]))";
    if (!g.neg.empty()) r += ", noneOf(" + negText(cpn.rpn, g.neg) + ",[(X1,Y1),(X2,Y2)])";
    return r + "]";
  }
  std::string operator()(const GuardBC2& g) const {
    std::string r = "[isElement(a1,X1), typeOf(a1)=" + quoted(cpn.rpn.baseTypes[g.a]) + ", isElement(a2,X2), typeOf(a2)=" +
                    quoted(cpn.rpn.baseTypes[g.b]);
    if (!g.neg0.empty()) r += ", noneOf(" + negText(cpn.rpn, g.neg0) + ",[(X1,Y1)])";
    if (!g.neg1.empty()) r += ", noneOf(" + negText(cpn.rpn, g.neg1) + ",[(X2,Y2)])";
    return r + "]";
  }
  std::string rev(const RevGuardData& g, bool bond) const {
    std::string r = "[";
    for (std::size_t s = 0; s < g.dpc.size(); ++s) {
      r += "isElement((" + kVar(g.dpc[s]) + "," + tIdx(g.dpc[s]) + "," + tIdx(g.owner) + ",pay),H" + tIdx(g.owner) + "), ";
      if (g.pinned) r += kVar(g.dpc[s]) + "=" + cntVar(g.owner, g.dpc[s]) + ", ";
    }
    std::string rin = "[";
    for (int s = 0; s < g.rinSlots; ++s) rin += (s ? "," : "") + mol(s);
    rin += "]";
    r += std::string(bond ? "isBondIn(pay," : "isInstIn(pay,") + rin + "), numOfnonEmpty(" + rin + ")=1]";
    return r;
  }
  std::string operator()(const GuardRevTRN& g) const { return rev(g, false); }
  std::string operator()(const GuardRevBC& g) const { return rev(g, true); }
  std::string operator()(const GuardFalse&) const { return "[false]"; }
};

struct ArcText {
  const CpnNet& cpn;
  const CpnTransition& tr;
  std::string idle(int n) const { return std::to_string(n) + "`([],[])"; }
  std::string operator()(const TakeOneMolecule& f) const { return "1`" + mol(f.slot); }
  std::string operator()(const TakeTwoMolecules& f) const { return "1`" + mol(f.slot0) + "++1`" + mol(f.slot1); }
  std::string operator()(const EmitIdle& f) const { return idle(f.n); }
  std::string operator()(const EmitMoved& f) const { return "1`" + mol(f.slot); }
  std::string operator()(const EmitBonded&) const { return "1`(union X1 X2, union (union Y1 Y2) [(a1,a2)])"; }
  int other(int slot) const {
    return tr.role == TransitionRole::Virtual ? slot : cpn.deps.dpc.at(tr.t).at(slot);
  }
  std::string counter(int slot) const {
    return tr.role == TransitionRole::Virtual ? cntVar(kT0, slot) : cntVar(tr.t, other(slot));
  }
  std::string operator()(const TakeCounter& f) const { return counter(f.slot); }
  std::string operator()(const EmitCounterPlus1& f) const { return counter(f.slot) + "+1"; }
  std::string operator()(const EmitCounterMinus1& f) const { return counter(f.slot) + "-1"; }
  std::string hist(int slot) const {
    if (slot == 0) return "H" + tIdx(tr.t);
    return "H" + tIdx(detail::extHistories(cpn.deps, tr.t).at(slot - 1));
  }
  std::string operator()(const TakeHistory& f) const { return hist(f.slot); }
  std::string operator()(const EmitHistoryAppend& f) const {
    std::string pay = f.bond ? "BD(a1,a2)" : "TR(a1)";
    std::string r = hist(f.slot) + "^^[";
    for (std::size_t s = 0; s < f.dpc.size(); ++s)
      r += (s ? "," : "") + std::string("(") + cntVar(f.owner, f.dpc[s]) + "+1," + tIdx(f.dpc[s]) + "," + tIdx(f.owner) +
           "," + pay + ")";
    return r + "]";
  }
  std::string operator()(const EmitHistoryUpdateInt& f) const {
    std::string r = "updateIntHist([";
    for (std::size_t s = 0; s < f.dpc.size(); ++s) r += (s ? "," : "") + std::string("(") + tIdx(f.dpc[s]) + "," + kVar(f.dpc[s]) + ")";
    return r + "]," + hist(f.slot) + ")";
  }
  std::string operator()(const EmitHistoryUpdateExt& f) const {
    return "updateExtHist(" + tIdx(f.reverser) + "," + kVar(cpn.deps.dpc.at(tr.t).at(f.kSlot)) + "," + hist(f.slot) + ")";
  }
  std::string operator()(const RevTake& f) const { return f.twoIdle ? idle(2) : "1`" + mol(f.slot) + "++1`([],[])"; }
  std::string operator()(const RevEmitRouted& f) const {
    int rin = int(cpn.deps.rin.at(f.owner).size());
    std::string ms = "[";
    for (int s = 0; s < rin; ++s) ms += (s ? "," : "") + mol(s);
    ms += "]";
    std::string hs = "[";
    for (std::size_t s = 0; s < f.historyOwners.size(); ++s) hs += (s ? "," : "") + hist(int(s));
    hs += "]";
    return std::string(f.bond ? "routeBC(" : "routeTRN(") + quoted(cpn.rpn.places[f.place]) + "," + tIdx(f.owner) +
           ",pay," + ms + "," + hs + ")";
  }
};

}  // namespace detail

inline std::string guardText(const CpnNet& cpn, int transition) {
  return std::visit(detail::GuardText{cpn}, cpn.transitions.at(transition).guard);
}

inline std::string arcText(const CpnNet& cpn, const CpnArc& a) {
  return std::visit(detail::ArcText{cpn, cpn.transitions.at(a.transition)}, a.expr);
}

inline const char* roleColour(PlaceRole r) {
  switch (r) {
    case PlaceRole::Original: return "Gray";
    case PlaceRole::History: return "Yellow";
    case PlaceRole::Connection: return "Green";
    case PlaceRole::ConnectionT0: return "Silver";
  }
  return "Black";
}

inline const char* roleColour(TransitionRole r) {
  switch (r) {
    case TransitionRole::Forward: return "Gray";
    case TransitionRole::Reverse: return "Blue";
    case TransitionRole::Virtual: return "Silver";
  }
  return "Black";
}

namespace detail {

inline std::string xmlEscape(const std::string& s) {
  std::string r;
  for (char ch : s) {
    switch (ch) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      default: r += ch;
    }
  }
  return r;
}

inline std::string mlInstances(const RpnNet& net, const std::vector<BaseInstance>& v) {
  std::string r = "[";
  for (std::size_t i = 0; i < v.size(); ++i) r += (i ? "," : "") + quoted(net.instanceName(v[i]));
  return r + "]";
}

inline std::string mlMolecule(const RpnNet& net, const Molecule& m) {
  std::string r = "(" + mlInstances(net, m.nodes) + ",[";
  for (std::size_t i = 0; i < m.bonds.size(); ++i)
    r += (i ? "," : "") + std::string("(") + quoted(net.instanceName(m.bonds[i].x)) + "," +
         quoted(net.instanceName(m.bonds[i].y)) + ")";
  return r + "])";
}

inline std::string initMarkText(const CpnNet& cpn, const CpnMarking& m, int place) {
  const auto& toks = m.tokens.at(place);
  const auto& pl = cpn.places[place];
  if (pl.colour == ColourSet::Counter) return std::to_string(counterAt(m, place));
  if (pl.colour == ColourSet::History) return "[]";
  std::string r;
  std::size_t i = 0;
  while (i < toks.size()) {
    std::size_t j = i;
    while (j < toks.size() && toks[j] == toks[i]) ++j;
    r += (r.empty() ? "" : "++") + std::to_string(j - i) + "`" + mlMolecule(cpn.rpn, std::get<Molecule>(toks[i]));
    i = j;
  }
  return r;
}

// ML helper definitions placed in the declarations block.
inline const char* kMlHelpers = R"ML(fun isElement(x, xs) = List.exists (fn y => y = x) xs;
fun isBond(b, ys) = isElement(b, ys);
fun union xs ys = xs ^^ List.filter (fn y => not (isElement(y, xs))) ys;
fun numOfnonEmpty(ms) = List.length (List.filter (fn m => m <> ([],[])) ms);
fun isInstIn(TR(a), ms) = List.exists (fn (xs,_) => isElement(a, xs)) ms | isInstIn(_, _) = false;
fun isBondIn(BD(b), ms) = List.exists (fn (_,ys) => isBond(b, ys)) ms | isBondIn(_, _) = false;
fun updateIntHist(ks, h) = List.foldl (fn ((j,kj), acc) =>
      List.map (fn (k,o,w,p) => if o = j andalso k > kj then (k-1,o,w,p) else (k,o,w,p))
        (List.filter (fn (k,o,_,_) => not (o = j andalso k = kj)) acc)) h ks;
fun updateExtHist(i, kj, h) = List.map (fn (k,o,w,p) => if o = i andalso k > kj then (k-1,o,w,p) else (k,o,w,p)) h;
fun payInsts(TR(a)) = [a] | payInsts(BD((x,y))) = [x,y];
fun con(a, (xs,ys)) = let
      fun grow(vs) = let val ns = union vs (List.concat (List.map (fn (x,y) =>
            if isElement(x, vs) then [y] else if isElement(y, vs) then [x] else []) ys))
        in if List.length ns = List.length vs then vs else grow ns end
      val vs = if isElement(a, xs) then grow [a] else []
    in (vs, List.filter (fn (x,_) => isElement(x, vs)) ys) end;
fun maxUser(i, pay, c, hs) = List.foldl (fn ((k,o,w,p), best) =>
      if (w = i andalso p = pay) orelse not (List.exists (fn a => isElement(a, #1 c)) (payInsts p)) then best
      else if w > best then w else best) 0 (List.concat hs);
fun routeTo(place, used, c) = if used = 0 then List.all (fn a => initialPlace(a) = place) (#1 c)
      else isElement(used, producers(place));
fun routeTRN(place, i, TR(a), ms, hs) = let
      val c = con(a, List.foldl (fn ((x,y),(xs,ys)) => (union xs x, union ys y)) ([],[]) ms)
    in if routeTo(place, maxUser(i, TR(a), c, hs), c) then 1`c ++ 1`([],[]) else 2`([],[]) end
  | routeTRN(_, _, _, _, _) = 2`([],[]);
fun routeBC(place, i, BD((x,y)), ms, hs) = let
      val (xs,ys) = List.foldl (fn ((x,y),(xs,ys)) => (union xs x, union ys y)) ([],[]) ms
      val rest = (xs, List.filter (fn b => b <> (x,y)) ys)
      val c1 = con(x, rest) val c2 = con(y, rest)
      fun emit c = if routeTo(place, maxUser(i, BD((x,y)), c, hs), c) then c else ([],[])
    in 1`(emit c1) ++ 1`(if c2 = c1 then ([],[]) else emit c2) end
  | routeBC(_, _, _, _, _) = 2`([],[]);)ML";

}  // namespace detail

// CPN-Tools style net file; byte-deterministic for equal nets.
inline std::string emitCpnToolsXml(const CpnNet& cpn) {
  using detail::xmlEscape;
  const RpnNet& net = cpn.rpn;
  std::ostringstream o;
  int nextId = 1;
  auto id = [&]() { return "ID" + std::to_string(nextId++); };
  CpnMarking init = initialMarking(cpn);

  o << "<?xml version=\"1.0\" encoding=\"iso-8859-1\"?>\n";
  o << "<!DOCTYPE workspaceElements PUBLIC \"-//CPN//DTD CPNXML 1.0//EN\" \"http://cpntools.org/DTD/6/cpn.dtd\">\n";
  o << "<workspaceElements>\n";
  o << "  <generator tool=\"CPN Tools\" version=\"4.0.1\" format=\"6\"/>\n";
  o << "  <cpnet>\n    <globbox>\n";
  o << "      <block id=\"" << id() << "\">\n        <id>Declarations</id>\n";
  int T = net.transitionCount();
  std::vector<std::string> decls = {
      "colset INST = string;",
      "colset BOND = product INST * INST;",
      "colset INSTS = list INST;",
      "colset BONDS = list BOND;",
      "colset MOL = product INSTS * BONDS;",
      "colset TRANS = int with 0.." + std::to_string(T) + ";",
      "colset NB = int with 0.." + std::to_string(cpn.nb) + ";",
      "colset PAYLOAD = union TR:INST + BD:BOND;",
      "colset QUAD = product NB * TRANS * TRANS * PAYLOAD;",
      "colset HIST = list QUAD;",
      "var a1, a2 : INST;",
      "var pay : PAYLOAD;",
  };
  int maxSlots = 2;
  for (int t = 0; t < T; ++t) maxSlots = std::max(maxSlots, int(cpn.deps.rin[t].size()));
  {
    std::string xs = "var ", ys = "var ";
    for (int s = 0; s < maxSlots; ++s) {
      xs += (s ? ", X" : "X") + std::to_string(s + 1);
      ys += (s ? ", Y" : "Y") + std::to_string(s + 1);
    }
    decls.push_back(xs + " : INSTS;");
    decls.push_back(ys + " : BONDS;");
  }
  {
    std::string hs = "var ";
    for (int t = 0; t < T; ++t) hs += (t ? ", H" : "H") + std::to_string(t + 1);
    if (T) decls.push_back(hs + " : HIST;");
    std::set<std::string> cv, kv;
    for (int t = 0; t < T; ++t)
      for (int j : cpn.deps.dpc[t]) {
        cv.insert(detail::cntVar(t, j));
        kv.insert(detail::kVar(j));
      }
    for (int j = 0; j < T; ++j) cv.insert(detail::cntVar(kT0, j));
    std::string c = "var ", k = "var ";
    bool f = true;
    for (const auto& s : cv) c += (f ? "" : ", ") + s, f = false;
    f = true;
    for (const auto& s : kv) k += (f ? "" : ", ") + s, f = false;
    if (!cv.empty()) decls.push_back(c + " : NB;");
    if (!kv.empty()) decls.push_back(k + " : NB;");
  }
  {
    std::string ip = "fun initialPlace(a) = case a of ";
    bool first = true;
    for (const auto& [a, p] : cpn.initialPlace) {
      ip += (first ? "" : " | ") + detail::quoted(net.instanceName(a)) + " => " + detail::quoted(net.places[p]);
      first = false;
    }
    ip += (first ? "_ => \"\";" : " | _ => \"\";");
    decls.push_back(ip);
    std::string pr = "fun producers(p) = case p of ";
    for (int p = 0; p < net.placeCount(); ++p) {
      pr += detail::quoted(net.places[p]) + " => [";
      auto prod = detail::producersOf(net, p);
      for (std::size_t i = 0; i < prod.size(); ++i) pr += (i ? "," : "") + std::to_string(prod[i] + 1);
      pr += "] | ";
    }
    pr += "_ => [];";
    decls.push_back(pr);
  }
  for (const auto& d : decls) o << "        <ml id=\"" << id() << "\">\n          <layout>" << xmlEscape(d) << "</layout>\n        </ml>\n";
  o << "        <ml id=\"" << id() << "\">\n          <layout>" << xmlEscape(detail::kMlHelpers) << "</layout>\n        </ml>\n";
  o << "      </block>\n    </globbox>\n";
  o << "    <page id=\"" << id() << "\">\n      <pageattr name=\"" << xmlEscape(net.name) << "\"/>\n";

  std::vector<std::string> placeIds, transIds;
  for (std::size_t i = 0; i < cpn.places.size(); ++i) {
    const auto& pl = cpn.places[i];
    placeIds.push_back(id());
    const char* colset = pl.colour == ColourSet::Molecule ? "MOL" : pl.colour == ColourSet::History ? "HIST" : "NB";
    std::string x = detail::fmtNum(pl.pos.x), y = detail::fmtNum(-pl.pos.y);
    o << "      <place id=\"" << placeIds.back() << "\">\n";
    o << "        <posattr x=\"" << x << "\" y=\"" << y << "\"/>\n";
    o << "        <fillattr colour=\"" << roleColour(pl.role) << "\" pattern=\"\" filled=\"true\"/>\n";
    o << "        <lineattr colour=\"Black\" thick=\"1\" type=\"Solid\"/>\n";
    o << "        <textattr colour=\"Black\" bold=\"false\"/>\n";
    o << "        <text>" << xmlEscape(pl.name) << "</text>\n";
    o << "        <ellipse w=\"60\" h=\"40\"/>\n";
    o << "        <type id=\"" << id() << "\">\n          <posattr x=\"" << x << "\" y=\"" << y
      << "\"/>\n          <text tool=\"CPN Tools\" version=\"4.0.1\">" << colset << "</text>\n        </type>\n";
    o << "        <initmark id=\"" << id() << "\">\n          <posattr x=\"" << x << "\" y=\"" << y
      << "\"/>\n          <text tool=\"CPN Tools\" version=\"4.0.1\">" << xmlEscape(detail::initMarkText(cpn, init, int(i)))
      << "</text>\n        </initmark>\n";
    o << "      </place>\n";
  }
  for (std::size_t i = 0; i < cpn.transitions.size(); ++i) {
    const auto& tr = cpn.transitions[i];
    transIds.push_back(id());
    std::string x = detail::fmtNum(tr.pos.x), y = detail::fmtNum(-tr.pos.y);
    o << "      <trans id=\"" << transIds.back() << "\" explicit=\"false\">\n";
    o << "        <posattr x=\"" << x << "\" y=\"" << y << "\"/>\n";
    o << "        <fillattr colour=\"" << roleColour(tr.role) << "\" pattern=\"\" filled=\"true\"/>\n";
    o << "        <lineattr colour=\"Black\" thick=\"1\" type=\"solid\"/>\n";
    o << "        <textattr colour=\"Black\" bold=\"false\"/>\n";
    o << "        <text>" << xmlEscape(tr.name) << "</text>\n";
    o << "        <box w=\"60\" h=\"40\"/>\n";
    o << "        <cond id=\"" << id() << "\">\n          <posattr x=\"" << x << "\" y=\"" << y
      << "\"/>\n          <text tool=\"CPN Tools\" version=\"4.0.1\">" << xmlEscape(guardText(cpn, int(i)))
      << "</text>\n        </cond>\n";
    o << "      </trans>\n";
  }
  for (const auto& a : cpn.arcs) {
    o << "      <arc id=\"" << id() << "\" orientation=\"" << (a.toTransition ? "PtoT" : "TtoP") << "\" order=\"1\">\n";
    const char* style = "Solid";
    const auto& tr = cpn.transitions[a.transition];
    if (tr.role == TransitionRole::Reverse) style = "Dashed";
    if (cpn.places[a.place].colour != ColourSet::Molecule) style = "Dotted";
    o << "        <lineattr colour=\"Black\" thick=\"1\" type=\"" << style << "\"/>\n";
    o << "        <transend idref=\"" << transIds[a.transition] << "\"/>\n";
    o << "        <placeend idref=\"" << placeIds[a.place] << "\"/>\n";
    o << "        <annot id=\"" << id() << "\">\n          <text tool=\"CPN Tools\" version=\"4.0.1\">"
      << xmlEscape(arcText(cpn, a)) << "</text>\n        </annot>\n";
    o << "      </arc>\n";
  }
  o << "    </page>\n  </cpnet>\n</workspaceElements>\n";
  return o.str();
}

inline std::string emitDot(const RpnNet& net) {
  std::ostringstream o;
  o << "digraph \"" << net.name << "\" {\n  rankdir=LR;\n";
  for (int p = 0; p < net.placeCount(); ++p) {
    std::string m = bagText(net, net.initial[p]);
    o << "  \"" << net.places[p] << "\" [shape=circle, style=filled, fillcolor=grey, label=\"" << net.places[p]
      << (m.empty() ? "" : "\\n" + m) << "\"];\n";
  }
  for (int t = 0; t < net.transitionCount(); ++t)
    o << "  \"" << net.transitions[t] << "\" [shape=box, style=filled, fillcolor=grey];\n";
  for (int t = 0; t < net.transitionCount(); ++t) {
    for (const auto& [p, l] : net.pre[t])
      o << "  \"" << net.places[p] << "\" -> \"" << net.transitions[t] << "\" [label=\"" << labelText(net, l) << "\"];\n";
    for (const auto& [p, l] : net.post[t])
      o << "  \"" << net.transitions[t] << "\" -> \"" << net.places[p] << "\" [label=\"" << labelText(net, l) << "\"];\n";
  }
  o << "}\n";
  return o.str();
}

inline std::string dotColour(const char* cpnColour) {
  std::string c = cpnColour;
  if (c == "Gray") return "grey";
  if (c == "Yellow") return "yellow";
  if (c == "Green") return "green";
  if (c == "Blue") return "lightblue";
  if (c == "Silver") return "lightgrey";
  return "white";
}

inline std::string emitDot(const CpnNet& cpn) {
  std::ostringstream o;
  o << "digraph \"" << cpn.rpn.name << "_cpn\" {\n";
  for (const auto& pl : cpn.places)
    o << "  \"" << pl.name << "\" [shape=ellipse, style=filled, fillcolor=" << dotColour(roleColour(pl.role)) << "];\n";
  for (const auto& tr : cpn.transitions)
    o << "  \"" << tr.name << "\" [shape=box, style=filled, fillcolor=" << dotColour(roleColour(tr.role)) << "];\n";
  for (const auto& a : cpn.arcs) {
    const auto& pn = cpn.places[a.place].name;
    const auto& tn = cpn.transitions[a.transition].name;
    std::string style = cpn.transitions[a.transition].role == TransitionRole::Reverse ? "dashed" : "solid";
    std::string lbl = arcText(cpn, a);
    std::string esc;
    for (char ch : lbl) esc += ch == '"' ? std::string("\\\"") : std::string(1, ch);
    if (a.toTransition) o << "  \"" << pn << "\" -> \"" << tn << "\"";
    else o << "  \"" << tn << "\" -> \"" << pn << "\"";
    o << " [style=" << style << ", label=\"" << esc << "\"];\n";
  }
  o << "}\n";
  return o.str();
}

}  // namespace rpn
