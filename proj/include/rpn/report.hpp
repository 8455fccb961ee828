#pragma once

#include <string>

#include <json.hpp>

#include "harness.hpp"
#include "io.hpp"

namespace rpn {

using json = nlohmann::ordered_json;

inline json toJson(const RpnNet& net, const Molecule& m) {
  json r = {{"instances", json::array()}, {"bonds", json::array()}};
  for (const auto& a : m.nodes) r["instances"].push_back(net.instanceName(a));
  for (const auto& b : m.bonds) r["bonds"].push_back(net.bondName(b));
  return r;
}

inline json toJson(const RpnNet& net, const Selection& s) {
  json r = json::object();
  for (const auto& [p, v] : s) {
    json a = json::array();
    for (const auto& x : v) a.push_back(net.instanceName(x));
    r[net.places[p]] = a;
  }
  return r;
}

inline json toJson(const RpnNet& net, const RpnState& st) {
  json marking = json::object();
  for (int p = 0; p < net.placeCount(); ++p) {
    json ms = json::array();
    for (const auto& c : conCom(st.marking[p])) ms.push_back(toJson(net, c));
    marking[net.places[p]] = ms;
  }
  json history = json::object();
  for (int t = 0; t < net.transitionCount(); ++t) {
    json os = json::array();
    for (const auto& o : st.history[t]) os.push_back({{"k", o.k}, {"selection", toJson(net, o.sel)}});
    history[net.transitions[t]] = os;
  }
  return {{"marking", marking}, {"history", history}};
}

inline const char* roleName(PlaceRole r) {
  switch (r) {
    case PlaceRole::Original: return "original";
    case PlaceRole::History: return "history";
    case PlaceRole::Connection: return "connection";
    case PlaceRole::ConnectionT0: return "connection-t0";
  }
  return "?";
}

inline json toJson(const CpnNet& cpn, const CpnMarking& m) {
  json places = json::array();
  for (std::size_t i = 0; i < cpn.places.size(); ++i) {
    const auto& pl = cpn.places[i];
    json toks = json::array();
    int idle = 0;
    for (const auto& tok : m.tokens[i]) {
      if (auto* mol = std::get_if<Molecule>(&tok)) {
        if (mol->empty()) ++idle;
        else toks.push_back(toJson(cpn.rpn, *mol));
      } else if (auto* c = std::get_if<Counter>(&tok)) {
        toks.push_back(c->n);
      } else {
        json hs = json::array();
        for (const auto& q : std::get<HistorySet>(tok))
          hs.push_back({{"k", q.k},
                        {"other", transitionRef(cpn.rpn, q.other)},
                        {"owner", transitionRef(cpn.rpn, q.owner)},
                        {"payload", payloadText(cpn.rpn, q.payload)}});
        toks.push_back(hs);
      }
    }
    json p = {{"name", pl.name}, {"role", roleName(pl.role)}, {"colour", roleColour(pl.role)}, {"tokens", toks}};
    if (pl.colour == ColourSet::Molecule) p["idle"] = idle;
    places.push_back(p);
  }
  return places;
}

inline json toJson(const RpnNet& net, const Move& mv) {
  json r = {{"direction", mv.forward ? "forward" : "reverse"}, {"transition", net.transitions.at(mv.t)},
            {"label", labelName(net, labelOf(mv))}};
  if (mv.forward) r["selection"] = toJson(net, mv.sel);
  else r["k"] = mv.k;
  return r;
}

inline json toJson(const RpnNet& net, const ExplorationReport& rep) {
  json classes = json::object();
  for (const auto& [size, n] : rep.correspondenceClassSizes) classes[std::to_string(size)] = n;
  json unmatched = json::array();
  for (const auto& u : rep.unmatchedMoves) unmatched.push_back({{"side", u.side}, {"move", u.move}, {"state", u.state}});
  json r = {{"net", net.name},
            {"semantics", semanticsName(rep.sem)},
            {"rpnStateCount", rep.rpnStateCount},
            {"cpnMarkingCount", rep.cpnMarkingCount},
            {"rpnEdgeCount", rep.rpnEdgeCount},
            {"cpnEdgeCount", rep.cpnEdgeCount},
            {"capped", rep.capped},
            {"lemma1", rep.lemma1},
            {"imageReachable", rep.imageReachable},
            {"correspondenceClassSizes", classes},
            {"unmatchedMoves", unmatched}};
  if (rep.btRoundTrip) r["btRoundTrip"] = *rep.btRoundTrip;
  r["ok"] = rep.ok();
  return r;
}

}  // namespace rpn
