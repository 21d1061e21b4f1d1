#include "vforge/errors.hpp"
#include "vforge/generation.hpp"
#include "vforge/util.hpp"

#include "support/paths.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <random>
#include <thread>

using namespace vforge;
namespace fs = std::filesystem;

namespace {

GenerationRequest sample_request(const std::string& user = "write code") {
  GenerationRequest request;
  request.model = "m1";
  request.temperature = 0.2;
  request.messages = {{"system", "sys"}, {"user", user}};
  return request;
}

}  // namespace

TEST_CASE("replay store round-trips recorded responses") {
  const fs::path dir = test::fresh_dir("replay");
  const GenerationRequest request = sample_request();
  ReplayStore::record(dir, request, "method Foo() {}");

  ReplayStore store(dir);
  const GenerationResponse response = store.complete(request);
  CHECK(response.raw_text == "method Foo() {}");
  CHECK(response.backend == BackendKind::Replay);
}

TEST_CASE("replay store misses raise ReplayMissError with the key") {
  const fs::path dir = test::fresh_dir("replay-miss");
  ReplayStore store(dir);
  const GenerationRequest request = sample_request();
  try {
    store.complete(request);
    FAIL("expected ReplayMissError");
  } catch (const ReplayMissError& ex) {
    CHECK(ex.key == request_key(request));
  }
}

TEST_CASE("request keys depend on model, temperature and messages") {
  const GenerationRequest a = sample_request();
  GenerationRequest b = a;
  CHECK(request_key(a) == request_key(b));
  b.temperature = 0.4;
  CHECK(request_key(a) != request_key(b));
  b = a;
  b.model = "m2";
  CHECK(request_key(a) != request_key(b));
  b = a;
  b.messages.push_back({"assistant", "reply"});
  CHECK(request_key(a) != request_key(b));
}

TEST_CASE("replay determinism is independent of read order and threads") {
  const fs::path dir = test::fresh_dir("replay-threads");
  std::vector<GenerationRequest> requests;
  for (int i = 0; i < 24; ++i) {
    GenerationRequest request = sample_request("task " + std::to_string(i));
    ReplayStore::record(dir, request, "response " + std::to_string(i));
    requests.push_back(std::move(request));
  }

  ReplayStore store(dir);
  std::vector<std::string> results(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      results[i] = store.complete(requests[i]).raw_text;
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < requests.size(); ++i) {
    CHECK(results[i] == "response " + std::to_string(i));
  }
}

TEST_CASE("extract_code handles fenced blocks") {
  CHECK(extract_code("```dafny\nmethod M() {}\n```") == "method M() {}");
  CHECK(extract_code("```\nmethod M() {}\n```") == "method M() {}");
  CHECK(extract_code("```Dafny\nmethod M() {}\n```") == "method M() {}");

  // Blocks with other tags are skipped entirely.
  const std::string mixed =
      "```python\nprint('hi')\n```\nsome prose\n```dafny\nmethod M() {}\n```";
  CHECK(extract_code(mixed) == "method M() {}");

  // Multiple kept blocks concatenate in order.
  const std::string two =
      "```dafny\nfunction F(): int { 1 }\n```\ntext\n```\nmethod M() {}\n```";
  CHECK(extract_code(two) == "function F(): int { 1 }\nmethod M() {}");
}

TEST_CASE("extract_code on unfenced responses trims prose") {
  CHECK(extract_code("method M() {}") == "method M() {}");
  const std::string prose =
      "Sure! Here is a solution.\nmethod M() {\n  print 1;\n}\nHope that helps!";
  CHECK(extract_code(prose) == "method M() {\n  print 1;\n}");
}

TEST_CASE("extract_code fails on responses with no Dafny-significant token") {
  CHECK(extract_code("Sure! Here is the code: ...") == std::nullopt);
  CHECK(extract_code("") == std::nullopt);
  CHECK(extract_code("```\n\n```") == std::nullopt);
  // Braces alone do not make Dafny.
  CHECK(extract_code("if (x) { return; }") == std::nullopt);
}

TEST_CASE("extract_code is idempotent and never fabricates lines") {
  std::mt19937 rng(1234);
  const std::vector<std::string> pieces = {
      "Sure, here you go:",  "method M() {",      "  var x := 1;",
      "}",                   "```dafny",          "```",
      "function F(): int",   "Hope this helps!",  "",
      "lemma L()",           "красивый текст",  "```python",
  };
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      text += pieces[rng() % pieces.size()];
      text += '\n';
    }
    const auto once = extract_code(text);
    if (!once) continue;

    // Idempotence.
    const auto twice = extract_code(*once);
    REQUIRE(twice.has_value());
    CHECK(*twice == *once);

    // Every output line is one of the input lines (subsequence of lines).
    const auto in_lines = split_lines(text);
    std::size_t cursor = 0;
    for (const std::string& line : split_lines(*once)) {
      bool found = false;
      while (cursor < in_lines.size()) {
        if (in_lines[cursor++] == line) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("live endpoint: unreachable host raises EndpointError") {
  HttpBackend backend({"http://127.0.0.1:9", 1});
  GenerationRequest request = sample_request();
  request.timeout = std::chrono::milliseconds(30000);
  CHECK_THROWS_AS(backend.complete(request), EndpointError);
}

TEST_CASE("live endpoint behaviors against a local server") {
  httplib::Server server;
  std::atomic<int> fail_remaining{0};
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions",
              [&](const httplib::Request&, httplib::Response& response) {
                ++hits;
                if (fail_remaining.fetch_sub(1) > 0) {
                  response.status = 500;
                  response.set_content("boom", "text/plain");
                  return;
                }
                response.set_content(
                    R"({"choices":[{"message":{"role":"assistant","content":"method M() {}"}}]})",
                    "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackend backend({"http://127.0.0.1:" + std::to_string(port), 1});

  SUBCASE("one retry recovers from a transient 500") {
    fail_remaining = 1;
    const GenerationResponse response = backend.complete(sample_request());
    CHECK(response.raw_text == "method M() {}");
    CHECK(response.backend == BackendKind::Live);
    CHECK(hits == 2);
  }

  SUBCASE("a second 5xx surfaces as EndpointError") {
    fail_remaining = 2;
    try {
      backend.complete(sample_request());
      FAIL("expected EndpointError");
    } catch (const EndpointError& ex) {
      CHECK(ex.status == 500);
    }
  }

  server.stop();
  server_thread.join();
}

TEST_CASE("live endpoint: stalled response raises TimeoutError") {
  httplib::Server server;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request&, httplib::Response& response) {
                std::this_thread::sleep_for(std::chrono::seconds(3));
                response.set_content("{}", "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackend backend({"http://127.0.0.1:" + std::to_string(port), 1});
  GenerationRequest request = sample_request();
  request.timeout = std::chrono::milliseconds(1000);
  CHECK_THROWS_AS(backend.complete(request), TimeoutError);

  server.stop();
  server_thread.join();
}
