#pragma once

#include <cctype>
#include <deque>
#include <optional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "correspondence.hpp"
#include "exec.hpp"
#include "semantics.hpp"
#include "translate.hpp"

namespace rpn {

// A move label shared by both nets: direction and source transition.
struct MoveLabel {
  bool forward = true;
  int t = 0;
  auto operator<=>(const MoveLabel&) const = default;
};

inline MoveLabel labelOf(const Move& m) { return {m.forward, m.t}; }

inline MoveLabel labelOf(const CpnNet& cpn, const CpnMove& m) {
  const auto& tr = cpn.transitions.at(m.transition);
  return {tr.role == TransitionRole::Forward, tr.t};
}

inline std::string labelName(const RpnNet& net, const MoveLabel& l) {
  return (l.forward ? "" : "~") + net.transitions.at(l.t);
}

// First binding of the CPN counterpart of mv whose firing yields want.
inline std::optional<CpnMove> matchingBinding(const CpnNet& cpn, const CpnMarking& m, const Move& mv,
                                              const CpnMarking& want) {
  int ct = mv.forward ? cpn.forward.at(mv.t) : cpn.reverse.at(mv.t);
  for (const auto& b : enumerateBindings(cpn, m, ct))
    if (fire(cpn, m, ct, b) == want) return CpnMove{ct, b};
  return std::nullopt;
}

struct CoSimStep {
  Move move;
  CpnMove cpnMove;
  RpnState rpnBefore, rpnAfter;
  CpnMarking cpnBefore, cpnAfter;
};

struct CoSimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs the moves on the RPN and, in lockstep, a matching binding on the CPN.
// Throws CoSimError at the first divergence.
inline std::vector<CoSimStep> cosimulate(const CpnNet& cpn, const std::vector<Move>& script) {
  const RpnNet& net = cpn.rpn;
  RpnState s = initialState(net);
  CpnMarking m = initialMarking(cpn);
  if (!corresponds(cpn, s, m)) throw CoSimError("initial states do not correspond");
  std::vector<CoSimStep> out;
  for (std::size_t i = 0; i < script.size(); ++i) {
    const Move& mv = script[i];
    auto legal = enabledMoves(net, s, cpn.sem);
    if (std::find(legal.begin(), legal.end(), mv) == legal.end())
      throw CoSimError("step " + std::to_string(i + 1) + ": " + labelName(net, labelOf(mv)) + " not enabled in the RPN");
    RpnState s2 = apply(net, s, cpn.sem, mv);
    CpnMarking want = rpnToCpn(cpn, s2);
    auto cm = matchingBinding(cpn, m, mv, want);
    if (!cm) {
      int ct = mv.forward ? cpn.forward[mv.t] : cpn.reverse[mv.t];
      throw CoSimError("step " + std::to_string(i + 1) + ": no binding of " + cpn.transitions[ct].name +
                       " reaches the corresponding marking");
    }
    out.push_back({mv, *cm, s, s2, m, want});
    s = std::move(s2);
    m = std::move(want);
  }
  return out;
}

struct UnmatchedMove {
  std::string side;  // "rpn" when an RPN move has no CPN counterpart, "cpn" otherwise
  std::string move;
  int state = 0;  // index in the respective state list
  auto operator<=>(const UnmatchedMove&) const = default;
};

struct ExplorationReport {
  Semantics sem = Semantics::BT;
  std::size_t rpnStateCount = 0, cpnMarkingCount = 0;
  std::size_t rpnEdgeCount = 0, cpnEdgeCount = 0;
  std::vector<UnmatchedMove> unmatchedMoves;
  std::map<std::size_t, std::size_t> correspondenceClassSizes;  // class size -> number of classes
  bool lemma1 = true;          // every reachable marking has a reachable preimage
  bool imageReachable = true;  // every reachable state maps to a reachable marking
  bool capped = false;
  std::optional<bool> btRoundTrip;  // backtracking only: inverse map recovers every state
  bool ok() const {
    return !capped && unmatchedMoves.empty() && lemma1 && imageReachable && btRoundTrip.value_or(true);
  }
};

inline ExplorationReport explore(const CpnNet& cpn, std::size_t cap = 100000) {
  const RpnNet& net = cpn.rpn;
  ExplorationReport rep;
  rep.sem = cpn.sem;

  // RPN transition system.
  std::vector<RpnState> rs;
  std::map<RpnState, int> rIdx;
  std::vector<std::vector<std::pair<MoveLabel, int>>> rEdges;
  auto addR = [&](RpnState s) {
    auto [it, fresh] = rIdx.emplace(s, int(rs.size()));
    if (fresh) {
      rs.push_back(std::move(s));
      rEdges.emplace_back();
    }
    return it->second;
  };
  addR(initialState(net));
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs.size() > cap) {
      rep.capped = true;
      break;
    }
    RpnState s = rs[i];
    for (const auto& mv : enabledMoves(net, s, cpn.sem)) {
      int j = addR(apply(net, s, cpn.sem, mv));
      rEdges[i].push_back({labelOf(mv), j});
    }
  }

  // CPN transition system.
  std::vector<CpnMarking> cs;
  std::map<CpnMarking, int> cIdx;
  std::vector<std::vector<std::pair<MoveLabel, int>>> cEdges;
  auto addC = [&](CpnMarking m) {
    auto [it, fresh] = cIdx.emplace(m, int(cs.size()));
    if (fresh) {
      cs.push_back(std::move(m));
      cEdges.emplace_back();
    }
    return it->second;
  };
  addC(initialMarking(cpn));
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs.size() > cap) {
      rep.capped = true;
      break;
    }
    CpnMarking m = cs[i];
    for (const auto& mv : enabledCpnMoves(cpn, m)) {
      int j = addC(fire(cpn, m, mv.transition, mv.binding));
      cEdges[i].push_back({labelOf(cpn, mv), j});
    }
  }
  rep.rpnStateCount = rs.size();
  rep.cpnMarkingCount = cs.size();
  for (const auto& e : rEdges) rep.rpnEdgeCount += e.size();
  for (const auto& e : cEdges) rep.cpnEdgeCount += e.size();
  if (rep.capped) return rep;

  // Image of every RPN state among the reachable markings.
  std::vector<int> image(rs.size(), -1);
  std::vector<std::vector<int>> preimage(cs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto it = cIdx.find(rpnToCpn(cpn, rs[i]));
    if (it == cIdx.end()) {
      rep.imageReachable = false;
      rep.unmatchedMoves.push_back({"rpn", "state has no reachable counterpart", int(i)});
      continue;
    }
    image[i] = it->second;
    preimage[it->second].push_back(int(i));
  }
  for (std::size_t c = 0; c < cs.size(); ++c) {
    if (preimage[c].empty()) rep.lemma1 = false;
    else ++rep.correspondenceClassSizes[preimage[c].size()];
  }

  std::vector<std::set<std::pair<MoveLabel, int>>> cSet(cs.size()), rSet(rs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) cSet[i] = {cEdges[i].begin(), cEdges[i].end()};
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (const auto& [l, j] : rEdges[i])
      if (image[j] >= 0) rSet[i].insert({l, image[j]});
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (image[i] < 0) continue;
    // Every move of the RPN is matched from the corresponding marking ...
    for (const auto& e : rSet[i])
      if (!cSet[image[i]].count(e)) rep.unmatchedMoves.push_back({"rpn", labelName(net, e.first), int(i)});
    // ... and every move of the CPN is matched from every corresponding state.
    for (const auto& e : cSet[image[i]])
      if (!rSet[i].count(e)) rep.unmatchedMoves.push_back({"cpn", labelName(net, e.first), int(i)});
  }
  if (cpn.sem == Semantics::BT) {
    bool ok = true;
    for (const auto& s : rs)
      if (cpnToRpnBt(cpn, rpnToCpn(cpn, s)) != s) ok = false;
    rep.btRoundTrip = ok;
  }
  return rep;
}

// One step of a textual script: "t2:b1,c1" fires, "~t3:2" reverses occurrence 2.
struct ScriptItem {
  bool forward = true;
  std::string transition;
  std::optional<std::vector<std::string>> instances;
  std::optional<int> k;
};

struct ScriptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<ScriptItem> parseScript(const std::string& text) {
  std::vector<ScriptItem> r;
  std::string tok;
  auto flush = [&]() {
    std::string t;
    for (char ch : tok)
      if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    tok.clear();
    if (t.empty()) return;
    ScriptItem it;
    if (t[0] == '~') it.forward = false, t = t.substr(1);
    auto colon = t.find(':');
    it.transition = t.substr(0, colon);
    if (it.transition.empty()) throw ScriptError("missing transition name in script");
    if (colon != std::string::npos) {
      std::string rest = t.substr(colon + 1);
      if (it.forward) {
        std::vector<std::string> v;
        std::stringstream ss(rest);
        std::string x;
        while (std::getline(ss, x, ','))
          if (!x.empty()) v.push_back(x);
        it.instances = v;
      } else {
        try {
          std::size_t used = 0;
          it.k = std::stoi(rest, &used);
          if (used != rest.size()) throw std::invalid_argument(rest);
        } catch (const std::exception&) {
          throw ScriptError("bad occurrence number '" + rest + "'");
        }
      }
    }
    r.push_back(it);
  };
  bool comment = false;
  for (char ch : text) {
    if (ch == '\n') comment = false;
    if (comment) continue;
    if (ch == '#') comment = true;
    else if (ch == ';' || ch == '\n') flush();
    else tok += ch;
  }
  flush();
  return r;
}

// Picks the enabled move the item denotes. An unspecified choice takes the first
// candidate in canonical order and records a warning.
inline Move resolveMove(const RpnNet& net, const RpnState& st, Semantics sem, const ScriptItem& it,
                        std::vector<std::string>* warnings = nullptr) {
  auto t = net.findTransition(it.transition);
  if (!t) throw ScriptError("unknown transition '" + it.transition + "'");
  std::string label = (it.forward ? "" : "~") + it.transition;
  std::vector<Move> cands;
  for (const auto& mv : enabledMoves(net, st, sem))
    if (mv.forward == it.forward && mv.t == *t) cands.push_back(mv);
  if (cands.empty()) throw ScriptError(label + " is not enabled");
  if (it.forward && it.instances) {
    std::vector<std::string> want = *it.instances;
    std::sort(want.begin(), want.end());
    for (const auto& mv : cands) {
      std::vector<std::string> got;
      for (const auto& a : selectedInstances(mv.sel)) got.push_back(net.instanceName(a));
      std::sort(got.begin(), got.end());
      if (got == want) return mv;
    }
    throw ScriptError(label + " has no enabled selection of the given instances");
  }
  if (!it.forward && it.k) {
    for (const auto& mv : cands)
      if (mv.k == *it.k) return mv;
    throw ScriptError(label + " cannot reverse occurrence " + std::to_string(*it.k));
  }
  if (cands.size() > 1 && warnings)
    warnings->push_back(label + ": " + std::to_string(cands.size()) + " choices, taking the first");
  return cands.front();
}

}  // namespace rpn
