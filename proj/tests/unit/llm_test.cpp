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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "clarify/core/error.hpp"
#include "clarify/llm/backend.hpp"
#include "clarify/llm/parse.hpp"
#include "clarify/llm/prompts.hpp"

using namespace clarify;
using namespace clarify::llm;
namespace ph = clarify::llm::placeholder;

namespace {

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

// Local chat-completions server; the handler decides each response.
class FakeServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeServer(Handler h) {
    server_.Post("/v1/chat/completions", std::move(h));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string ok_body(const std::string& text) {
  return nlohmann::json{{"model", "served"},
                        {"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}},
                        {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 3}}}}
      .dump();
}

BackendConfig http_config(const std::string& url) {
  BackendConfig c;
  c.name = "local";
  c.base_url = url;
  c.model = "m";
  c.retry.max_attempts = 3;
  c.retry.backoff_base_ms = 1;
  c.timeout_seconds = 2;
  return c;
}

const Messages kHello{{"user", "bonjour"}};

}  // namespace

TEST_CASE("substitution and placeholders") {
  CHECK(placeholders_in("a {{x}} b {{ argumentative unit }} {{x}}") ==
        std::vector<std::string>{"x", "argumentative unit"});
  CHECK(substitute("<{{a}}|{{b}}>", {{"a", "{{b}}"}, {"b", "2"}}) == "<{{b}}|2>");
  CHECK_THROWS_WITH_AS(substitute("{{theme}}", {}), "missing placeholder theme", Error);
  CHECK(substitute("no placeholders {", {}) == "no placeholders {");
}

TEST_CASE("every built-in template is consistent") {
  const auto& lib = PromptLibrary::builtin();
  CHECK(lib.templates().size() == 12);
  for (const auto& t : lib.templates()) {
    CHECK_NOTHROW(check_template(t));
    REQUIRE(t.example.has_value());
  }
  PromptTemplate bad{Stage::kAsDetection, "fr", kDefaultVariant, "sys", "{{contribution}}", std::nullopt};
  CHECK_THROWS_AS(check_template(bad), Error);
  bad.user = "{{contribution}} {{argumentative unit}} {{theme}}";
  CHECK_THROWS_AS(check_template(bad), Error);
}

TEST_CASE("render_prompt examples") {
  const std::string c = "Il faut taxer le kérosène. Les avions polluent.";
  const std::string u = "Il faut taxer le kérosène.";
  for (const char* lang : {"fr", "en"}) {
    auto m = render_prompt(Stage::kClarification, {{ph::kContribution, c}, {ph::kUnit, u}}, {lang});
    REQUIRE(m.size() == 2);
    CHECK(m[0].role == "system");
    CHECK(m[1].role == "user");
    CHECK(contains(m[1].content, c));
    CHECK(contains(m[1].content, u));
  }

  RenderOptions annot{"fr", kAnnotationVariant, false};
  CHECK_THROWS_WITH_AS(render_prompt(Stage::kClarification,
                                     {{ph::kContribution, c}, {ph::kStatements, ""},
                                      {ph::kPremises, ""}, {ph::kSolutions, u}},
                                     annot),
                       "missing placeholder theme", Error);

  auto au = render_prompt(Stage::kAuExtraction, {{ph::kContribution, "X"}});
  CHECK(au.back().content.size() >= 1);
  CHECK(au.back().content.back() == 'X');
  auto au_en = render_prompt(Stage::kAuExtraction, {{ph::kContribution, "X"}}, {"en"});
  CHECK(au_en.back().content == "Here is the text:\nX");

  auto one = render_prompt(Stage::kAuExtraction, {{ph::kContribution, "X"}}, {"fr", kDefaultVariant, true});
  REQUIRE(one.size() == 4);
  CHECK(one[2].role == "assistant");
  CHECK(one[3].content.back() == 'X');

  // Pure: same inputs, same messages.
  CHECK(render_prompt(Stage::kClusterJudge, {{ph::kClusterA, "- a"}, {ph::kClusterB, "- b"}}) ==
        render_prompt(Stage::kClusterJudge, {{ph::kClusterA, "- a"}, {ph::kClusterB, "- b"}}));
  CHECK_THROWS_AS(render_prompt(Stage::kAuExtraction, {{ph::kContribution, "X"}}, {"de"}), Error);
}

TEST_CASE("unit list parsing") {
  CHECK(parse_unit_list("- unit A\n- unit B") == std::vector<std::string>{"unit A", "unit B"});
  CHECK(parse_unit_list("Voici :\r\n  -   a  \n-\n- b\ntexte") == std::vector<std::string>{"a", "b"});
  try {
    parse_unit_list("rien ici");
    FAIL("expected a parse error");
  } catch (const StageParseError& e) {
    CHECK(e.raw() == "rien ici");
    CHECK(e.code() == ErrorCode::kParse);
  }
}

TEST_CASE("typed segment parsing") {
  auto s = parse_typed_segments("- [SOLUTION] Baisser les taxes");
  REQUIRE(s.size() == 1);
  CHECK(s[0] == TypedSegment{SegmentType::kSolution, "Baisser les taxes"});
  auto fr = parse_typed_segments(
      "- [CONSTAT] Les impôts sont trop hauts\n- [PRÉMISSE] car on paie tout\n"
      "- [prémisse] bis\n- [INCONNU] x\n- [SOLUTION]\n- [Statement]: fin");
  REQUIRE(fr.size() == 4);
  CHECK(fr[0].type == SegmentType::kStatement);
  CHECK(fr[1].type == SegmentType::kPremise);
  CHECK(fr[2].type == SegmentType::kPremise);
  CHECK(fr[3] == TypedSegment{SegmentType::kStatement, "fin"});
  CHECK_THROWS_AS(parse_typed_segments("- unit"), StageParseError);

  auto custom = TagTable::from_json(
      {{"segment_tags", {{"VORSCHLAG", "solution"}}}, {"verdicts", {{"GLEICH", "tie"}}}});
  CHECK(parse_typed_segments("- [Vorschlag] mehr", custom)[0].type == SegmentType::kSolution);
  CHECK(parse_verdict("gleich", custom) == Verdict::kTie);
}

TEST_CASE("clarification parsing") {
  auto p = parse_clarification("L'argument clair et auto-suffisant sous-jacent est : **X**");
  CHECK(p.text == "X");
  CHECK(p.misformulation);
  CHECK(p.stripped.size() == 2);

  auto plain = parse_clarification("  Il faut baisser la TVA sur les produits de première nécessité.  ");
  CHECK(plain.text == "Il faut baisser la TVA sur les produits de première nécessité.");
  CHECK_FALSE(plain.misformulation);

  CHECK(parse_clarification("Voici la clarification :\n« Il faut taxer le kérosène. »").text ==
        "Il faut taxer le kérosène.");
  CHECK(parse_clarification("Here is the clarified segment: *Lower VAT.*").text == "Lower VAT.");
  CHECK(parse_clarification("L’argument est : Réduire les niches fiscales.").text ==
        "Réduire les niches fiscales.");
  // Emphasis inside the text is kept.
  CHECK(parse_clarification("Il faut **vraiment** agir.").text == "Il faut **vraiment** agir.");
  CHECK_THROWS_AS(parse_clarification("  ****  "), StageParseError);

  // Idempotent.
  for (const char* raw : {"Voici : **A b.**", "Réponse : « x »", "plain text", "**Answer: y**"}) {
    auto once = parse_clarification(raw);
    auto twice = parse_clarification(once.text);
    CHECK(twice.text == once.text);
    CHECK_FALSE(twice.misformulation);
  }
}

TEST_CASE("verdict parsing") {
  CHECK(parse_verdict("A") == Verdict::kA);
  CHECK(parse_verdict(" b.") == Verdict::kB);
  CHECK(parse_verdict("**TIE**") == Verdict::kTie);
  CHECK(parse_verdict("ÉGALITÉ") == Verdict::kTie);
  CHECK(parse_verdict("égalité") == Verdict::kTie);
  CHECK(parse_verdict("EQUALITY") == Verdict::kTie);
  CHECK(parse_verdict("Verdict : B") == Verdict::kB);
  CHECK(parse_verdict("Answer: A") == Verdict::kA);
  CHECK_THROWS_AS(parse_verdict("Les deux se valent"), StageParseError);
  CHECK_THROWS_AS(parse_verdict(""), StageParseError);
}

TEST_CASE("backend configuration") {
  auto dir = std::filesystem::temp_directory_path() / "clarify_llm_cfg";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "backends.json");
    f << R"({"backends": [
      {"name": "gpt", "base_url": "http://localhost:1/v1", "model": "gpt-x", "api_key_env": "K",
       "max_in_flight": 2, "retry": {"max_attempts": 5, "backoff_base_ms": 10}},
      {"name": "mock", "kind": "mock", "model": "m", "transcript": "t.jsonl"}]})";
  }
  auto cfgs = load_backend_configs(dir / "backends.json");
  REQUIRE(cfgs.size() == 2);
  CHECK(cfgs[0].retry.max_attempts == 5);
  CHECK(cfgs[0].temperature == 0.0);
  CHECK(cfgs[1].transcript == dir / "t.jsonl");
  nlohmann::json j = cfgs[0];
  CHECK(j.get<BackendConfig>().max_in_flight == 2);

  BackendConfig bad = cfgs[0];
  bad.max_in_flight = 0;
  CHECK_THROWS_AS(check_backend_config(bad), Error);
  bad = cfgs[0];
  bad.temperature = -1;
  CHECK_THROWS_AS(check_backend_config(bad), Error);
  bad = cfgs[0];
  bad.base_url = "ftp://x";
  CHECK_THROWS_AS(HttpChatBackend{bad}, Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mock backend replays transcripts") {
  BackendConfig c;
  c.name = "mock";
  c.kind = "mock";
  c.model = "m";
  auto recorder = std::make_shared<RecordingBackend>(
      std::make_shared<FunctionBackend>(c, [](const Messages& m) { return "echo: " + m.back().content; }));
  CHECK(recorder->complete(kHello).text == "echo: bonjour");
  auto path = std::filesystem::temp_directory_path() / "clarify_mock_transcript.jsonl";
  recorder->write_transcript(path);
  c.transcript = path;
  MockBackend mock(c);
  auto a = mock.complete(kHello);
  CHECK(a.text == "echo: bonjour");
  CHECK(mock.complete(kHello).text == a.text);
  CHECK_THROWS_AS(mock.complete({{"user", "autre"}}), Error);
  CHECK(request_key("m", kHello) != request_key("n", kHello));
  CHECK(request_key("m", kHello).size() == 16);
  std::filesystem::remove(path);
}

TEST_CASE("http backend: 429 then 200 retries once") {
  std::atomic<int> calls{0};
  std::string seen_auth, seen_body;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
      return;
    }
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    res.set_content(ok_body("réponse"), "application/json");
  });
  auto cfg = http_config(server.url());
  cfg.api_key_env = "CLARIFY_TEST_KEY";
  ::setenv("CLARIFY_TEST_KEY", "secret", 1);
  std::vector<std::chrono::milliseconds> sleeps;
  HttpChatBackend backend(cfg, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  auto out = backend.complete(kHello);
  CHECK(out.text == "réponse");
  CHECK(out.retries == 1);
  CHECK(out.prompt_tokens == 11);
  CHECK(calls == 2);
  CHECK(sleeps.size() == 1);
  CHECK(seen_auth == "Bearer secret");
  auto body = nlohmann::json::parse(seen_body);
  CHECK(body["model"] == "m");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["messages"][0]["content"] == "bonjour");

  ::unsetenv("CLARIFY_TEST_KEY");
  CHECK_THROWS_AS(backend.complete(kHello), Error);
}

TEST_CASE("http backend: failures") {
  SUBCASE("server errors exhaust the attempts") {
    std::atomic<int> calls{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 503;
    });
    std::vector<std::chrono::milliseconds> sleeps;
    HttpChatBackend backend(http_config(server.url()), [&](auto d) { sleeps.push_back(d); });
    CHECK_THROWS_WITH_AS(backend.complete(kHello), doctest::Contains("HTTP 503"), Error);
    CHECK(calls == 3);
    REQUIRE(sleeps.size() == 2);
    CHECK(sleeps[1] == 2 * sleeps[0]);
  }
  SUBCASE("client errors are not retried") {
    std::atomic<int> calls{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 400;
      res.set_content("bad model", "text/plain");
    });
    HttpChatBackend backend(http_config(server.url()), [](auto) {});
    try {
      backend.complete(kHello);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kBackend);
      CHECK(contains(e.what(), "bad model"));
    }
    CHECK(calls == 1);
  }
  SUBCASE("non-JSON body is a protocol error") {
    FakeServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html>oops</html>", "text/html");
    });
    HttpChatBackend backend(http_config(server.url()), [](auto) {});
    try {
      backend.complete(kHello);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kProtocol);
    }
  }
  SUBCASE("timeouts on every attempt") {
    std::atomic<int> calls{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      std::this_thread::sleep_for(std::chrono::milliseconds(400));
      res.set_content(ok_body("late"), "application/json");
    });
    auto cfg = http_config(server.url());
    cfg.timeout_seconds = 0.1;
    HttpChatBackend backend(cfg, [](auto) {});
    CHECK_THROWS_WITH_AS(backend.complete(kHello), doctest::Contains("after 3 attempts"), Error);
    CHECK(calls == 3);
  }
  SUBCASE("connection refused") {
    auto cfg = http_config("http://127.0.0.1:1/v1");
    cfg.retry.max_attempts = 2;
    HttpChatBackend backend(cfg, [](auto) {});
    CHECK_THROWS_WITH_AS(backend.complete(kHello), doctest::Contains("network error"), Error);
  }
}

TEST_CASE("http backend: in-flight cap") {
  std::atomic<int> active{0}, peak{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    int now = ++active;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(40));
    --active;
    res.set_content(ok_body("ok"), "application/json");
  });
  auto cfg = http_config(server.url());
  cfg.max_in_flight = 2;
  HttpChatBackend backend(cfg, [](auto) {});
  std::vector<std::thread> threads;
  std::atomic<int> done{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (backend.complete(kHello).text == "ok") ++done;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(done == 8);
  CHECK(backend.peak_in_flight() <= 2);
  CHECK(peak.load() <= 2);
}
