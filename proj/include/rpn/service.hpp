#pragma once

#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "report.hpp"

namespace rpn {

inline constexpr int kSchemaVersion = 1;

struct ServiceError : std::runtime_error {
  int status;
  std::string code;
  ServiceError(int s, std::string c, const std::string& m) : std::runtime_error(m), status(s), code(std::move(c)) {}
};

// One loaded net stepped in lockstep with its translation.
class Session {
 public:
  Session(RpnNet net, Semantics sem) : net_(renumber(net)), sem_(sem) {
    cpn_ = translate(net_, {sem_});
    states_.push_back(initialState(net_));
    markings_.push_back(initialMarking(cpn_));
  }

  const RpnNet& net() const { return net_; }
  const CpnNet& cpn() const { return cpn_; }
  Semantics semantics() const { return sem_; }
  const RpnState& state() const { return states_.back(); }
  const CpnMarking& marking() const { return markings_.back(); }
  const std::vector<Move>& trace() const { return trace_; }
  std::vector<Move> moves() const { return enabledMoves(net_, state(), sem_); }

  void step(const Move& mv) {
    auto legal = moves();
    if (std::find(legal.begin(), legal.end(), mv) == legal.end())
      throw ServiceError(409, "not-enabled", labelName(net_, labelOf(mv)) + " is not enabled");
    RpnState s2 = apply(net_, state(), sem_, mv);
    CpnMarking want = rpnToCpn(cpn_, s2);
    if (!matchingBinding(cpn_, marking(), mv, want))
      throw ServiceError(500, "cpn-diverged", "the translated net has no matching step");
    states_.push_back(std::move(s2));
    markings_.push_back(std::move(want));
    trace_.push_back(mv);
  }

  bool undo() {
    if (trace_.empty()) return false;
    states_.pop_back();
    markings_.pop_back();
    trace_.pop_back();
    return true;
  }

  // The RPN state carries over; the marking is recomputed for the new translation.
  void setSemantics(Semantics sem) {
    if (sem == sem_) return;
    sem_ = sem;
    cpn_ = translate(net_, {sem_});
    for (std::size_t i = 0; i < states_.size(); ++i) markings_[i] = rpnToCpn(cpn_, states_[i]);
  }

 private:
  RpnNet net_;
  Semantics sem_;
  CpnNet cpn_;
  std::vector<RpnState> states_;
  std::vector<CpnMarking> markings_;
  std::vector<Move> trace_;
};

struct ServiceResponse {
  int status = 200;
  std::string body;
  std::string contentType = "application/json";
};

// HTTP-agnostic request handler; documented in docs/protocol.md.
class Service {
 public:
  ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body,
                         const std::string& query = "") {
    try {
      json in = body.empty() ? json::object() : json::parse(body);
      if (!in.is_object()) throw ServiceError(400, "bad-request", "request body must be a JSON object");
      return {200, route(method, path, in, query).dump()};
    } catch (const ServiceError& e) {
      return error(e.status, e.code, e.what());
    } catch (const json::exception& e) {
      return error(400, "bad-json", e.what());
    } catch (const ParseError& e) {
      return error(400, "parse-error", e.what());
    } catch (const std::invalid_argument& e) {
      return error(400, "invalid-net", e.what());
    } catch (const std::exception& e) {
      return error(500, "internal", e.what());
    }
  }

 private:
  static ServiceResponse error(int status, const std::string& code, const std::string& msg) {
    json e = {{"schema", kSchemaVersion}, {"error", {{"code", code}, {"message", msg}}}};
    return {status, e.dump()};
  }

  Session& session() {
    if (!session_) throw ServiceError(409, "no-net", "no net loaded");
    return *session_;
  }

  static Semantics semanticsOf(const json& in) {
    std::string s = in.value("semantics", "ooc");
    auto sem = parseSemantics(s);
    if (!sem) throw ServiceError(400, "bad-semantics", "unknown semantics '" + s + "'");
    return *sem;
  }

  json stateJson() {
    Session& s = session();
    json trace = json::array();
    for (const auto& mv : s.trace()) trace.push_back(labelName(s.net(), labelOf(mv)));
    json r = {{"schema", kSchemaVersion}, {"net", s.net().name}, {"semantics", semanticsName(s.semantics())}};
    r["rpn"] = toJson(s.net(), s.state());
    r["cpn"] = toJson(s.cpn(), s.marking());
    r["trace"] = trace;
    return r;
  }

  json movesJson() {
    Session& s = session();
    json fwd = json::array(), rev = json::array();
    auto ms = s.moves();
    for (std::size_t i = 0; i < ms.size(); ++i) {
      json m = toJson(s.net(), ms[i]);
      m["index"] = i;
      if (ms[i].forward) {
        fwd.push_back(m);
      } else {
        for (const auto& o : s.state().history[ms[i].t])
          if (o.k == ms[i].k) m["payload"] = payloadText(s.net(), payloadOfOccurrence(s.cpn(), ms[i].t, o.sel));
        rev.push_back(m);
      }
    }
    return {{"schema", kSchemaVersion}, {"semantics", semanticsName(s.semantics())}, {"forward", fwd}, {"reverse", rev}};
  }

  Move moveOf(const json& in) {
    Session& s = session();
    auto ms = s.moves();
    if (in.contains("index")) {
      auto i = in.at("index").get<long>();
      if (i < 0 || i >= long(ms.size())) throw ServiceError(409, "not-enabled", "no enabled move with that index");
      return ms[std::size_t(i)];
    }
    ScriptItem it;
    it.transition = in.at("transition").get<std::string>();
    if (!s.net().findTransition(it.transition))
      throw ServiceError(400, "unknown-transition", "unknown transition '" + it.transition + "'");
    it.forward = in.value("direction", "forward") != "reverse";
    if (in.contains("instances")) it.instances = in.at("instances").get<std::vector<std::string>>();
    if (in.contains("k")) it.k = in.at("k").get<int>();
    try {
      return resolveMove(s.net(), s.state(), s.semantics(), it);
    } catch (const ScriptError& e) {
      throw ServiceError(409, "not-enabled", e.what());
    }
  }

  json exportJson(const std::string& format) {
    Session& s = session();
    std::string content;
    if (format == "cpn") content = emitCpnToolsXml(s.cpn());
    else if (format == "dot") content = emitDot(s.net());
    else if (format == "cpn-dot") content = emitDot(s.cpn());
    else if (format == "rpn") content = serializeRpn(s.net());
    else throw ServiceError(400, "bad-format", "unknown export format '" + format + "'");
    return {{"schema", kSchemaVersion}, {"format", format}, {"content", content}};
  }

  static std::string queryParam(const std::string& query, const std::string& key) {
    std::size_t i = 0;
    while (i < query.size()) {
      auto amp = query.find('&', i);
      std::string kv = query.substr(i, amp == std::string::npos ? std::string::npos : amp - i);
      auto eq = kv.find('=');
      if (kv.substr(0, eq) == key) return eq == std::string::npos ? "" : kv.substr(eq + 1);
      if (amp == std::string::npos) break;
      i = amp + 1;
    }
    return "";
  }

  json route(const std::string& method, const std::string& path, const json& in, const std::string& query) {
    bool get = method == "GET", post = method == "POST";
    if (path == "/api/health" && get) {
      std::shared_lock lk(mu_);
      return {{"schema", kSchemaVersion}, {"loaded", bool(session_)}};
    }
    if (path == "/api/state" && get) {
      std::shared_lock lk(mu_);
      return stateJson();
    }
    if (path == "/api/moves" && get) {
      std::shared_lock lk(mu_);
      return movesJson();
    }
    if (path == "/api/export" && get) {
      std::shared_lock lk(mu_);
      std::string f = queryParam(query, "format");
      return exportJson(f.empty() ? in.value("format", "cpn") : f);
    }
    if (path == "/api/load" && post) {
      RpnNet net = parseRpn(in.at("source").get<std::string>());
      auto bad = validateLowLevel(net);
      if (!bad.empty())
        throw ServiceError(422, "invalid-net", bad[0].rule + " at " + bad[0].element + ": " + bad[0].detail);
      Session fresh(net, semanticsOf(in));
      std::unique_lock lk(mu_);
      session_ = std::move(fresh);
      return stateJson();
    }
    if (path == "/api/step" && post) {
      std::unique_lock lk(mu_);
      session().step(moveOf(in));
      return stateJson();
    }
    if (path == "/api/undo" && post) {
      std::unique_lock lk(mu_);
      if (!session().undo()) throw ServiceError(409, "empty-trace", "nothing to undo");
      return stateJson();
    }
    if (path == "/api/semantics" && post) {
      std::unique_lock lk(mu_);
      session().setSemantics(semanticsOf(in));
      return stateJson();
    }
    static const char* known[] = {"/api/health", "/api/state", "/api/moves", "/api/export",
                                  "/api/load", "/api/step", "/api/undo", "/api/semantics"};
    for (const char* k : known)
      if (path == k) throw ServiceError(405, "bad-method", method + " not allowed on " + path);
    throw ServiceError(404, "not-found", "no endpoint " + path);
  }

  std::shared_mutex mu_;
  std::optional<Session> session_;
};

}  // namespace rpn
