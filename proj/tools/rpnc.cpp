// rpnc: validate, simulate, translate and verify reversing Petri nets.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <rpn/http.hpp>
#include <rpn/rpn.hpp>
#include <rpn/report.hpp>
#include <rpn/service.hpp>

using namespace rpn;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure("cannot write " + path);
  out << text;
}

RpnNet loadNet(const std::string& path) {
  RpnNet net;
  try {
    net = parseRpn(readFile(path));
  } catch (const ParseError& e) {
    throw Failure(path + ": " + e.what());
  }
  auto v = validateLowLevel(net);
  if (!v.empty()) {
    std::string msg = path + ": not a valid low-level net";
    for (const auto& x : v) msg += "\n  " + x.rule + " at " + x.element + ": " + x.detail;
    throw Failure(msg);
  }
  return renumber(net);
}

Semantics semanticsFrom(const std::string& s) {
  auto sem = parseSemantics(s);
  if (!sem) throw Failure("unknown semantics '" + s + "' (expected bt, co or ooc)");
  return *sem;
}

// A script argument is either a file name or the script itself.
std::string scriptText(const std::string& arg) {
  std::ifstream in(arg);
  if (in) return readFile(arg);
  return arg;
}

std::vector<Move> resolveScript(const RpnNet& net, Semantics sem, const std::string& text) {
  std::vector<Move> out;
  RpnState st = initialState(net);
  std::vector<std::string> warnings;
  for (const auto& item : parseScript(text)) {
    Move mv;
    try {
      mv = resolveMove(net, st, sem, item, &warnings);
    } catch (const ScriptError& e) {
      throw Failure("step " + std::to_string(out.size() + 1) + ": " + e.what());
    }
    st = apply(net, st, sem, mv);
    out.push_back(mv);
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return out;
}

int cmdValidate(const std::string& file) {
  RpnNet net;
  try {
    net = parseRpn(readFile(file));
  } catch (const ParseError& e) {
    throw Failure(file + ": " + e.what());
  }
  auto v = validateLowLevel(net);
  for (const auto& x : v) std::cout << x.rule << " " << x.element << ": " << x.detail << "\n";
  if (!v.empty()) return 1;
  for (int t = 0; t < net.transitionCount(); ++t)
    std::cout << net.transitions[t] << " " << kindName(classify(net, t)) << "\n";
  std::cout << "ok\n";
  return 0;
}

int cmdSimulate(const std::string& file, Semantics sem, const std::string& script, bool interactive) {
  RpnNet net = loadNet(file);
  if (interactive) {
    // One JSON request per line, as accepted by the service.
    Service svc;
    json load = {{"source", serializeRpn(net)}, {"semantics", semanticsName(sem)}};
    std::cout << svc.handle("POST", "/api/load", load.dump()).body << std::endl;
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      json req;
      try {
        req = json::parse(line);
      } catch (const json::exception& e) {
        std::cout << json{{"schema", kSchemaVersion}, {"error", {{"code", "bad-json"}, {"message", e.what()}}}}.dump()
                  << std::endl;
        continue;
      }
      std::string op = req.value("op", "step");
      ServiceResponse r;
      if (op == "moves") r = svc.handle("GET", "/api/moves", "");
      else if (op == "state") r = svc.handle("GET", "/api/state", "");
      else if (op == "undo") r = svc.handle("POST", "/api/undo", "");
      else r = svc.handle("POST", "/api/step", line);
      std::cout << r.body << std::endl;
    }
    return 0;
  }
  RpnState st = initialState(net);
  for (const auto& mv : resolveScript(net, sem, scriptText(script))) st = apply(net, st, sem, mv);
  std::cout << markingText(net, st.marking);
  for (int t = 0; t < net.transitionCount(); ++t) {
    std::cout << "H(" << net.transitions[t] << ") =";
    for (const auto& o : st.history[t]) {
      std::cout << " (" << o.k << ",{";
      bool first = true;
      for (const auto& [p, v] : o.sel)
        for (const auto& a : v) {
          std::cout << (first ? "" : ",") << "(" << net.places[p] << "," << net.instanceName(a) << ")";
          first = false;
        }
      std::cout << "})";
    }
    std::cout << "\n";
  }
  return 0;
}

int cmdTranslate(const std::string& file, Semantics sem, const std::string& out, const std::string& dot,
                 const std::string& rpnDot) {
  RpnNet net = loadNet(file);
  CpnNet cpn = translate(net, {sem});
  std::string xml = emitCpnToolsXml(cpn);
  if (out.empty()) std::cout << xml;
  else writeFile(out, xml);
  if (!dot.empty()) writeFile(dot, emitDot(cpn));
  if (!rpnDot.empty()) writeFile(rpnDot, emitDot(net));
  if (!out.empty()) {
    std::cerr << cpn.places.size() << " places, " << cpn.transitions.size() << " transitions, " << cpn.arcs.size()
              << " arcs\n";
  }
  return 0;
}

int cmdCosim(const std::string& file, Semantics sem, const std::string& script) {
  RpnNet net = loadNet(file);
  CpnNet cpn = translate(net, {sem});
  auto moves = resolveScript(net, sem, scriptText(script));
  try {
    auto steps = cosimulate(cpn, moves);
    for (std::size_t i = 0; i < steps.size(); ++i)
      std::cout << i + 1 << " " << labelName(net, labelOf(steps[i].move)) << " ~ "
                << cpn.transitions[steps[i].cpnMove.transition].name << " ok\n";
    std::cout << cpnMarkingText(cpn, steps.empty() ? initialMarking(cpn) : steps.back().cpnAfter);
  } catch (const CoSimError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmdExplore(const std::string& file, Semantics sem, std::size_t cap) {
  RpnNet net = loadNet(file);
  CpnNet cpn = translate(net, {sem});
  auto rep = explore(cpn, cap);
  std::cout << toJson(net, rep).dump(2) << "\n";
  return rep.ok() ? 0 : 1;
}

int cmdServe(const std::string& host, int port, const std::string& file, Semantics sem) {
  Service svc;
  if (!file.empty()) {
    json load = {{"source", readFile(file)}, {"semantics", semanticsName(sem)}};
    auto r = svc.handle("POST", "/api/load", load.dump());
    if (r.status != 200) throw Failure(r.body);
  }
  httplib::Server srv;
  mountService(srv, svc);
  std::cerr << "listening on http://" << host << ":" << port << "\n";
  if (!srv.listen(host, port)) throw Failure("cannot listen on " + host + ":" + std::to_string(port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversing Petri nets: simulation, translation to coloured nets, verification"};
  app.require_subcommand(1);

  std::string file, semName = "ooc", script, out, dot, rpnDot, host = "127.0.0.1";
  bool interactive = false;
  std::size_t cap = 100000;
  int port = 8080;

  auto* validate = app.add_subcommand("validate", "check the low-level conditions");
  validate->add_option("file", file, "net file")->required();

  auto* simulate = app.add_subcommand("simulate", "run a script on the net and print the final state");
  simulate->add_option("file", file, "net file")->required();
  simulate->add_option("--semantics", semName, "bt, co or ooc");
  auto* scriptOpt = simulate->add_option("--script", script, "script text or file, e.g. \"t1;t2:b1,c1;~t1\"");
  simulate->add_flag("--interactive-json", interactive, "read JSON step requests from stdin")->excludes(scriptOpt);

  auto* trans = app.add_subcommand("translate", "emit the coloured net as CPN Tools XML");
  trans->add_option("file", file, "net file")->required();
  trans->add_option("--semantics", semName, "bt, co or ooc");
  trans->add_option("-o,--output", out, "output file (stdout if absent)");
  trans->add_option("--dot", dot, "also write the coloured net as DOT");
  trans->add_option("--rpn-dot", rpnDot, "also write the source net as DOT");

  auto* cosim = app.add_subcommand("cosim", "run a script on both nets in lockstep");
  cosim->add_option("file", file, "net file")->required();
  cosim->add_option("--semantics", semName, "bt, co or ooc");
  cosim->add_option("--script", script, "script text or file")->required();

  auto* expl = app.add_subcommand("explore", "exhaustively check the state correspondence");
  expl->add_option("file", file, "net file")->required();
  expl->add_option("--semantics", semName, "bt, co or ooc");
  expl->add_option("--cap", cap, "state cap per net");

  auto* serve = app.add_subcommand("serve", "HTTP/JSON stepping service");
  serve->add_option("--port", port, "port");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--load", file, "net to load at start");
  serve->add_option("--semantics", semName, "bt, co or ooc");

  CLI11_PARSE(app, argc, argv);
  try {
    Semantics sem = semanticsFrom(semName);
    if (*validate) return cmdValidate(file);
    if (*simulate) {
      if (!interactive && script.empty()) throw Failure("simulate needs --script or --interactive-json");
      return cmdSimulate(file, sem, script, interactive);
    }
    if (*trans) return cmdTranslate(file, sem, out, dot, rpnDot);
    if (*cosim) return cmdCosim(file, sem, script);
    if (*expl) return cmdExplore(file, sem, cap);
    if (*serve) return cmdServe(host, port, file, sem);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
