// Copyright 2026 The Clarify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clarify/service/http.hpp"

#include <httplib.h>

namespace clarify::service {

namespace {

const char* kJson = "application/json";

std::string bearer(const httplib::Request& req) {
  const auto h = req.get_header_value("Authorization");
  const std::string prefix = "Bearer ";
  if (h.rfind(prefix, 0) != 0) return {};
  return h.substr(prefix.size());
}

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  reply(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

Json body_of(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("request body: ") + e.what());
  }
}

// Wraps a handler with the error-to-status mapping.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
      reply_error(res, 400, to_string(ErrorCode::kParse), e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "internal", e.what());
    }
  };
}

ExportFilter filter_of(const httplib::Request& req) {
  ExportFilter f;
  if (req.has_param("campaign")) f.campaign = req.get_param_value("campaign");
  if (req.has_param("phase")) f.phase = parse_phase(req.get_param_value("phase"));
  if (req.has_param("annotator")) f.annotator = req.get_param_value("annotator");
  return f;
}

std::string ndjson(const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAuthentication: return 401;
    case ErrorCode::kAuthorization: return 403;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kPolicy: return 422;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse: return 400;
    case ErrorCode::kBackend: return 503;
    default: return 500;
  }
}

Json to_json(const Task& task) {
  switch (task.kind) {
    case Task::Kind::kNone:
      return {{"kind", "none"}};
    case Task::Kind::kTutorial:
      return {{"kind", "tutorial"},
              {"contribution", task.contribution},
              {"tutorial_index", task.tutorial_index},
              {"tutorial_total", task.tutorial_total}};
    case Task::Kind::kTask:
      break;
  }
  Json draft = Json::array();
  for (const auto& [au, attempts] : task.draft) {
    Json list = Json::array();
    for (const auto& a : attempts) list.push_back({{"attempt", a.attempt}, {"backend", a.backend}, {"text", a.text}});
    draft.push_back({{"au_index", au}, {"attempts", list}});
  }
  return {{"kind", "task"},
          {"contribution", task.contribution},
          {"phase", to_string(task.phase)},
          {"regenerate_allowed", task.phase != Phase::kPhase2},
          {"expires_ms", task.expires_ms},
          {"draft", draft}};
}

Json to_json(const AccountInfo& info) {
  return {{"id", info.id},
          {"name", info.name},
          {"tutorial_progress", info.tutorial_progress},
          {"tutorial_total", info.tutorial_total},
          {"tutorial_passed", info.tutorial_passed},
          {"completed", info.completed}};
}

Json to_json(const Regeneration& r) {
  return {{"text", r.text},
          {"attempt", r.attempt},
          {"backend", r.backend},
          {"superseded", r.superseded ? Json(*r.superseded) : Json(nullptr)}};
}

struct HttpServer::Impl {
  explicit Impl(AnnotationService& s) : svc(s) {}
  AnnotationService& svc;
  httplib::Server server;
};

HttpServer::HttpServer(AnnotationService& svc, HttpOptions options)
    : impl_(std::make_unique<Impl>(svc)) {
  auto& s = impl_->server;
  auto& service = impl_->svc;
  auto user = [&service](const httplib::Request& req) { return service.authenticate(bearer(req)); };

  s.Post("/api/login", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    const auto who = service.authenticate(body.value("token", std::string{}));
    auto j = to_json(service.account(who));
    j["campaign"] = service.config().name;
    reply(res, 200, j);
  }));

  s.Get("/api/task", guarded([&service, user](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, to_json(service.next_task(user(req))));
  }));

  s.Post("/api/annotations", guarded([&service, user](const httplib::Request& req, httplib::Response& res) {
    const auto who = user(req);
    auto body = body_of(req);
    if (!body.is_object()) throw Error(ErrorCode::kParse, "record must be an object");
    if (!body.contains("annotator_id")) body["annotator_id"] = who;
    if (!body.contains("phase")) body["phase"] = to_string(Phase::kPhase1);
    if (!body.contains("status")) body["status"] = to_string(RecordStatus::kCompleted);
    if (!body.contains("events")) body["events"] = Json::array();
    const auto result = service.submit(who, body.get<AnnotationRecord>());
    Json j{{"accepted", result.accepted}, {"violations", result.violations}};
    if (result.record) j["record"] = *result.record;
    if (result.tutorial_f1) {
      j["tutorial_f1"] = *result.tutorial_f1;
      j["tutorial_passed"] = result.tutorial_passed;
    }
    reply(res, result.violations.empty() ? 200 : 422, j);
  }));

  s.Post("/api/clarify/regenerate", guarded([&service, user](const httplib::Request& req, httplib::Response& res) {
    const auto who = user(req);
    const auto body = body_of(req);
    const auto r = service.regenerate(who, body.at("contribution_id").get<std::string>(),
                                      body.at("au_index").get<std::size_t>(),
                                      body.at("unit").get<ArgumentativeUnit>());
    reply(res, 200, to_json(r));
  }));

  s.Post("/api/skip", guarded([&service, user](const httplib::Request& req, httplib::Response& res) {
    const auto who = user(req);
    const auto body = body_of(req);
    const auto record = service.skip(who, body.at("contribution_id").get<std::string>(),
                                     parse_skip_reason(body.at("reason").get<std::string>()));
    reply(res, 200, {{"record", record}});
  }));

  s.Get("/api/me/annotations", guarded([&service, user](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, Json(service.my_annotations(user(req))));
  }));

  s.Get("/api/admin/annotations", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    service.require_admin(bearer(req));
    reply(res, 200, Json(service.records(filter_of(req))));
  }));

  s.Get("/api/admin/export", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    service.require_admin(bearer(req));
    const auto stream = req.has_param("stream") ? req.get_param_value("stream") : std::string("records");
    if (stream != "records" && stream != "events") {
      throw Error(ErrorCode::kInvalidArgument, "stream must be records or events");
    }
    const auto data = service.export_dataset(filter_of(req));
    std::vector<Json> rows;
    if (stream == "records") {
      for (const auto& r : data.records) rows.emplace_back(r);
    } else {
      rows = data.events;
    }
    res.status = 200;
    res.set_content(ndjson(rows), "application/x-ndjson");
  }));

  if (!options.static_dir.empty()) {
    if (!s.set_mount_point("/", options.static_dir.string())) {
      throw Error(ErrorCode::kIo, "static directory not found: " + options.static_dir.string());
    }
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& s = impl_->server;
  const int bound = port == 0 ? s.bind_to_any_port(host) : (s.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace clarify::service
