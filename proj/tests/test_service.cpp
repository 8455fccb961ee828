#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <rpn/http.hpp>

#include "support.hpp"

using namespace rpntest;

namespace {

struct Reply {
  int status;
  json body;
};

Reply call(Service& svc, const std::string& method, const std::string& path, const json& body = json::object(),
           const std::string& query = "") {
  auto r = svc.handle(method, path, body.dump(), query);
  EXPECT_EQ(r.contentType, "application/json");
  return {r.status, json::parse(r.body)};
}

Reply load(Service& svc, const std::string& fixtureName, const std::string& sem = "ooc") {
  return call(svc, "POST", "/api/load", {{"source", readFixture(fixtureName + ".rpn")}, {"semantics", sem}});
}

void expectError(const Reply& r, int status, const std::string& code) {
  EXPECT_EQ(r.status, status);
  EXPECT_EQ(r.body.at("schema"), kSchemaVersion);
  EXPECT_EQ(r.body.at("error").at("code"), code);
  EXPECT_TRUE(r.body.at("error").at("message").is_string());
}

const json& cpnPlace(const json& state, const std::string& name) {
  for (const auto& p : state.at("cpn"))
    if (p.at("name") == name) return p;
  throw std::out_of_range(name);
}

}  // namespace

TEST(Service, HealthBeforeLoad) {
  Service svc;
  auto r = call(svc, "GET", "/api/health");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("schema"), kSchemaVersion);
  EXPECT_EQ(r.body.at("loaded"), false);
  expectError(call(svc, "GET", "/api/state"), 409, "no-net");
  expectError(call(svc, "GET", "/api/moves"), 409, "no-net");
  expectError(call(svc, "POST", "/api/step", {{"index", 0}}), 409, "no-net");
}

TEST(Service, LoadAndState) {
  Service svc;
  auto r = load(svc, "fig2");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("net"), "fig2");
  EXPECT_EQ(r.body.at("semantics"), "ooc");
  EXPECT_EQ(r.body.at("rpn").at("marking").at("p1").size(), 2u);
  EXPECT_EQ(r.body.at("cpn").size(), 13u);
  EXPECT_EQ(cpnPlace(r.body, "p4").at("idle"), 8);
  EXPECT_EQ(cpnPlace(r.body, "h0_1").at("tokens"), json::array({1}));
  EXPECT_TRUE(r.body.at("trace").empty());
  EXPECT_EQ(call(svc, "GET", "/api/health").body.at("loaded"), true);
}

TEST(Service, LoadErrors) {
  Service svc;
  expectError(call(svc, "POST", "/api/load", {{"source", "bases a\nfrobnicate\n"}}), 400, "parse-error");
  expectError(call(svc, "POST", "/api/load", {{"source", readFixture("fig2.rpn")}, {"semantics", "zz"}}), 400,
              "bad-semantics");
  expectError(call(svc, "POST", "/api/load", {{"source", "bases a b\nplaces p q\ntransitions t\narc p -> t : a b\n"
                                                         "arc t -> q : a-b\n"}}),
              422, "invalid-net");
  expectError(call(svc, "POST", "/api/load", json::object()), 400, "bad-json");
  auto raw = svc.handle("POST", "/api/load", "{not json");
  EXPECT_EQ(raw.status, 400);
  EXPECT_EQ(json::parse(raw.body).at("error").at("code"), "bad-json");
  EXPECT_EQ(svc.handle("POST", "/api/load", "[1]").status, 400);
}

TEST(Service, MovesStepAndUndo) {
  Service svc;
  load(svc, "fig2");
  auto mv = call(svc, "GET", "/api/moves");
  ASSERT_EQ(mv.status, 200);
  EXPECT_EQ(mv.body.at("forward").size(), 6u);
  EXPECT_TRUE(mv.body.at("reverse").empty());
  EXPECT_EQ(mv.body.at("forward")[0].at("selection").at("p1"), json::array({"a1"}));

  auto s1 = call(svc, "POST", "/api/step", {{"index", 0}});
  ASSERT_EQ(s1.status, 200);
  EXPECT_EQ(s1.body.at("trace"), json::array({"t1"}));
  EXPECT_EQ(cpnPlace(s1.body, "h1_3").at("tokens"), json::array({1}));

  auto s2 = call(svc, "POST", "/api/step", {{"transition", "t2"}, {"instances", {"b1", "c1"}}});
  ASSERT_EQ(s2.status, 200);
  auto rev = call(svc, "GET", "/api/moves").body.at("reverse");
  ASSERT_EQ(rev.size(), 2u);
  EXPECT_EQ(rev[0].at("payload"), "a1");

  auto s3 = call(svc, "POST", "/api/step", {{"transition", "t1"}, {"direction", "reverse"}});
  ASSERT_EQ(s3.status, 200);
  EXPECT_EQ(s3.body.at("trace"), json::array({"t1", "t2", "~t1"}));

  auto u = call(svc, "POST", "/api/undo");
  EXPECT_EQ(u.body.at("trace"), s2.body.at("trace"));
  EXPECT_EQ(u.body.at("cpn"), s2.body.at("cpn"));
  call(svc, "POST", "/api/undo");
  call(svc, "POST", "/api/undo");
  expectError(call(svc, "POST", "/api/undo"), 409, "empty-trace");
}

TEST(Service, StepErrors) {
  Service svc;
  load(svc, "fig2");
  expectError(call(svc, "POST", "/api/step", {{"index", 99}}), 409, "not-enabled");
  expectError(call(svc, "POST", "/api/step", {{"index", -1}}), 409, "not-enabled");
  expectError(call(svc, "POST", "/api/step", {{"transition", "t3"}}), 409, "not-enabled");
  expectError(call(svc, "POST", "/api/step", {{"transition", "t9"}}), 400, "unknown-transition");
  expectError(call(svc, "POST", "/api/step", {{"transition", "t1"}, {"direction", "reverse"}}), 409, "not-enabled");
  expectError(call(svc, "POST", "/api/step", json::object()), 400, "bad-json");
}

TEST(Service, SwitchSemanticsKeepsState) {
  Service svc;
  load(svc, "fig2", "bt");
  call(svc, "POST", "/api/step", {{"transition", "t1"}, {"instances", {"a1"}}});
  auto r = call(svc, "POST", "/api/semantics", {{"semantics", "ooc"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("semantics"), "ooc");
  EXPECT_EQ(r.body.at("trace"), json::array({"t1"}));
  EXPECT_EQ(r.body.at("cpn").size(), 13u);
  expectError(call(svc, "POST", "/api/semantics", {{"semantics", "zz"}}), 400, "bad-semantics");
}

TEST(Service, Export) {
  Service svc;
  load(svc, "fig3");
  for (const char* f : {"cpn", "dot", "cpn-dot", "rpn"}) {
    auto r = call(svc, "GET", "/api/export", json::object(), std::string("format=") + f);
    ASSERT_EQ(r.status, 200) << f;
    EXPECT_EQ(r.body.at("format"), f);
    EXPECT_FALSE(r.body.at("content").get<std::string>().empty());
  }
  auto rpn = call(svc, "GET", "/api/export", json::object(), "format=rpn");
  EXPECT_EQ(parseRpn(rpn.body.at("content").get<std::string>()), fixture("fig3"));
  auto byDefault = call(svc, "GET", "/api/export");
  EXPECT_EQ(byDefault.body.at("format"), "cpn");
  expectError(call(svc, "GET", "/api/export", json::object(), "format=pdf"), 400, "bad-format");
}

TEST(Service, RoutingErrors) {
  Service svc;
  expectError(call(svc, "GET", "/api/nowhere"), 404, "not-found");
  expectError(call(svc, "POST", "/api/health"), 405, "bad-method");
  expectError(call(svc, "GET", "/api/step"), 405, "bad-method");
  expectError(call(svc, "DELETE", "/api/state"), 405, "bad-method");
}

TEST(Service, ServesOverHttp) {
  Service svc;
  httplib::Server srv;
  mountService(srv, svc);
  int port = srv.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto h = cli.Get("/api/health");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->status, 200);
  EXPECT_EQ(h->get_header_value("X-RPN-Schema"), std::to_string(kSchemaVersion));
  json body = {{"source", readFixture("fig3.rpn")}, {"semantics", "ooc"}};
  auto l = cli.Post("/api/load", body.dump(), "application/json");
  ASSERT_TRUE(l);
  EXPECT_EQ(l->status, 200);
  auto e = cli.Get("/api/export?format=dot");
  ASSERT_TRUE(e);
  EXPECT_EQ(json::parse(e->body).at("format"), "dot");
  auto bad = cli.Get("/api/nowhere");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 404);
  EXPECT_EQ(bad->get_header_value("X-RPN-Schema"), std::to_string(kSchemaVersion));

  srv.stop();
  th.join();
}

TEST(Service, ConcurrentReadsAndSteps) {
  Service svc;
  load(svc, "fig2");
  std::vector<std::thread> ts;
  std::atomic<int> bad{0};
  for (int i = 0; i < 4; ++i)
    ts.emplace_back([&] {
      for (int j = 0; j < 50; ++j)
        if (svc.handle("GET", "/api/state", "").status != 200) ++bad;
    });
  ts.emplace_back([&] {
    for (int j = 0; j < 20; ++j) {
      svc.handle("POST", "/api/step", R"({"index":0})");
      svc.handle("POST", "/api/undo", "");
    }
  });
  for (auto& t : ts) t.join();
  EXPECT_EQ(bad, 0);
  EXPECT_TRUE(call(svc, "GET", "/api/state").body.at("trace").empty());
}
