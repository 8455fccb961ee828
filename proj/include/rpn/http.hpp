#pragma once

#include <string>

#include <httplib.h>

#include "service.hpp"

namespace rpn {

// Routes every /api request of srv to svc and stamps the schema header.
inline void mountService(httplib::Server& srv, Service& svc) {
  auto forward = [&svc](const httplib::Request& req, httplib::Response& res) {
    std::string query;
    for (const auto& [k, v] : req.params) query += (query.empty() ? "" : "&") + k + "=" + v;
    ServiceResponse r = svc.handle(req.method, req.path, req.body, query);
    res.status = r.status;
    res.set_header("X-RPN-Schema", std::to_string(kSchemaVersion));
    res.set_content(r.body, r.contentType);
  };
  srv.Get(R"(/api/.*)", forward);
  srv.Post(R"(/api/.*)", forward);
  srv.Put(R"(/api/.*)", forward);
  srv.Delete(R"(/api/.*)", forward);
}

}  // namespace rpn
