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

#include <doctest.h>
#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "../support/pipeline_fixture.hpp"
#include "../support/service_fixture.hpp"
#include "clarify/quality/events.hpp"
#include "clarify/service/http.hpp"

using namespace clarify;
using namespace clarify::service;
namespace fs = std::filesystem;

namespace {

// Runs an HttpServer on a free local port for the lifetime of the object.
class Running {
 public:
  explicit Running(AnnotationService& svc, HttpOptions opts = {}) : server_(svc, std::move(opts)) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.serve(); });
  }
  ~Running() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client(const std::string& token = {}) const {
    httplib::Client c("127.0.0.1", port_);
    if (!token.empty()) c.set_bearer_token_auth(token);
    return c;
  }

 private:
  HttpServer server_;
  int port_ = 0;
  std::thread thread_;
};

Json post(httplib::Client& c, const std::string& path, const Json& body, int expected) {
  auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expected);
  return res->body.empty() ? Json() : Json::parse(res->body);
}

Json get(httplib::Client& c, const std::string& path, int expected) {
  auto res = c.Get(path);
  REQUIRE(res);
  CHECK(res->status == expected);
  return Json::parse(res->body);
}

Json record_body(const std::string& cid) {
  return {{"contribution_id", cid}, {"units", fixture::gold_units()}};
}

}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::kAuthentication) == 401);
  CHECK(http_status(ErrorCode::kAuthorization) == 403);
  CHECK(http_status(ErrorCode::kNotFound) == 404);
  CHECK(http_status(ErrorCode::kConflict) == 409);
  CHECK(http_status(ErrorCode::kPolicy) == 422);
  CHECK(http_status(ErrorCode::kParse) == 400);
  CHECK(http_status(ErrorCode::kBackend) == 503);
  CHECK(http_status(ErrorCode::kCorruption) == 500);
}

TEST_CASE("annotator workflow over HTTP") {
  fixture::ServiceSetup s;
  s.tutorial_items = 1;
  s.overlap = 0.0;
  auto svc = fixture::make_service(s);
  Running server(*svc);
  auto anon = server.client();
  auto a1 = server.client("tok-a1");

  CHECK(post(anon, "/api/login", {{"token", "wrong"}}, 401).at("error").at("code") == "authentication");
  const auto me = post(anon, "/api/login", {{"token", "tok-a1"}}, 200);
  CHECK(me.at("id") == "a1");
  CHECK(me.at("name") == "Annotator 1");
  CHECK(me.at("tutorial_passed") == false);
  CHECK(get(anon, "/api/task", 401).contains("error"));

  auto task = get(a1, "/api/task", 200);
  CHECK(task.at("kind") == "tutorial");
  CHECK(task.at("tutorial_total") == 1);
  const Json regen{{"contribution_id", "c-00000"}, {"au_index", 0}, {"unit", fixture::gold_units()[0]}};
  post(a1, "/api/clarify/regenerate", regen, 403);
  const auto tut = post(a1, "/api/annotations", record_body("tut-0"), 200);
  CHECK(tut.at("tutorial_passed") == true);

  task = get(a1, "/api/task", 200);
  REQUIRE(task.at("kind") == "task");
  CHECK(task.at("phase") == "phase1");
  CHECK(task.at("regenerate_allowed") == true);
  const auto cid = task.at("contribution").at("id").get<std::string>();
  Json r{{"contribution_id", cid}, {"au_index", 0}, {"unit", fixture::gold_units()[0]}};
  const auto g1 = post(a1, "/api/clarify/regenerate", r, 200);
  CHECK(g1.at("attempt") == 1);
  CHECK(g1.at("superseded").is_null());
  const auto g2 = post(a1, "/api/clarify/regenerate", r, 200);
  CHECK(g2.at("attempt") == 2);
  CHECK(g2.at("superseded").at("generated") == g1.at("text"));
  CHECK(g2.at("superseded").at("accepted") == false);
  CHECK(get(a1, "/api/task", 200).at("draft").at(0).at("attempts").size() == 2);

  auto bad = record_body(cid);
  const auto violated = post(a1, "/api/annotations", bad, 422);
  CHECK(violated.at("accepted") == false);
  CHECK(violated.at("violations").at(0).at("rule") == "clarification_required");

  auto good = record_body(cid);
  good["units"][0]["clarification"] = g2.at("text");
  const auto ok = post(a1, "/api/annotations", good, 200);
  CHECK(ok.at("accepted") == true);
  const auto& events = ok.at("record").at("events");
  REQUIRE(events.size() == 2);
  CHECK(events.at(1).at("observed_quality") == 1.0);

  const auto mine = get(a1, "/api/me/annotations", 200);
  REQUIRE(mine.size() == 1);
  CHECK(mine.at(0).at("contribution_id") == cid);

  const auto next = get(a1, "/api/task", 200).at("contribution").at("id").get<std::string>();
  CHECK(post(a1, "/api/skip", {{"contribution_id", next}, {"reason", "hate_speech"}}, 200)
            .at("record")
            .at("status") == "skipped");
  post(a1, "/api/skip", {{"contribution_id", next}, {"reason", "hate_speech"}}, 409);

  auto raw = a1.Post("/api/annotations", "{not json", "application/json");
  REQUIRE(raw);
  CHECK(raw->status == 400);
}

TEST_CASE("phase 2 regeneration is refused with 422") {
  fixture::ServiceSetup s;
  s.phase2_start = 0.0;
  auto svc = fixture::make_service(s);
  Running server(*svc);
  auto a1 = server.client("tok-a1");
  const auto task = get(a1, "/api/task", 200);
  CHECK(task.at("regenerate_allowed") == false);
  const Json r{{"contribution_id", task.at("contribution").at("id")}, {"au_index", 1}, {"unit", fixture::gold_units()[1]}};
  post(a1, "/api/clarify/regenerate", r, 200);
  CHECK(post(a1, "/api/clarify/regenerate", r, 422).at("error").at("code") == "policy");
}

TEST_CASE("a failing backend yields 503 and no journal event") {
  fixture::ServiceSetup s;
  s.failing_backends = true;
  auto svc = fixture::make_service(s);
  Running server(*svc);
  auto a1 = server.client("tok-a1");
  const auto task = get(a1, "/api/task", 200);
  const auto seq = svc->state().last_seq;
  const Json r{{"contribution_id", task.at("contribution").at("id")}, {"au_index", 0}, {"unit", fixture::gold_units()[0]}};
  CHECK(post(a1, "/api/clarify/regenerate", r, 503).at("error").at("code") == "backend");
  CHECK(svc->state().last_seq == seq);
}

TEST_CASE("admin routes and NDJSON export") {
  fixture::ServiceSetup s;
  s.contributions = 20;
  auto svc = fixture::make_service(s);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 9; ++i) {
    const auto who = fixture::account_id(static_cast<std::size_t>(i) % 3);
    REQUIRE(fixture::annotate(*svc, who, svc->next_task(who), rng).accepted);
  }
  Running server(*svc);
  auto a1 = server.client("tok-a1");
  auto admin = server.client("admin-secret");
  get(a1, "/api/admin/annotations", 403);
  get(a1, "/api/admin/export", 403);
  CHECK(get(admin, "/api/admin/annotations", 200).size() == 9);
  CHECK(get(admin, "/api/admin/annotations?annotator=a2", 200).size() == 3);
  CHECK(get(admin, "/api/admin/annotations?campaign=nope", 200).empty());

  auto res = admin.Get("/api/admin/export?stream=records");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/x-ndjson");
  std::istringstream lines(res->body);
  std::vector<AnnotationRecord> records;
  for (std::string line; std::getline(lines, line);) records.push_back(Json::parse(line).get<AnnotationRecord>());
  CHECK(records.size() == 9);

  res = admin.Get("/api/admin/export?stream=events");
  REQUIRE(res);
  std::vector<Json> rows;
  std::istringstream ev(res->body);
  for (std::string line; std::getline(ev, line);) rows.push_back(Json::parse(line));
  std::size_t expected = 0;
  for (const auto& r : records) expected += r.events.size();
  CHECK(rows.size() == expected);
  for (const auto& row : rows) {
    if (!row.at("accepted").get<bool>()) continue;
    CHECK(row.at("observed_quality").get<double>() ==
          doctest::Approx(fixture::rouge_l_oracle(row.at("final_text"), row.at("generated"))));
  }
  CHECK(quality::dataset_from_events(rows, std::nullopt).observations.size() == expected);
  res = admin.Get("/api/admin/export?stream=other");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(svc->state().exports == 2);
}

TEST_CASE("the UI bundle is served statically") {
  const auto dir = fixture::fresh_dir("http_static");
  std::ofstream(dir / "index.html") << "<html>ui</html>";
  auto svc = fixture::make_service({});
  Running server(*svc, {dir});
  auto c = server.client();
  auto res = c.Get("/index.html");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "<html>ui</html>");
  res = c.Get("/");
  REQUIRE(res);
  CHECK(res->body == "<html>ui</html>");
}
