#include "vforge/generation.hpp"

#include "vforge/errors.hpp"
#include "vforge/util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdio>

namespace vforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string request_key(const GenerationRequest& request) {
  char temp[32];
  std::snprintf(temp, sizeof(temp), "%.6g", request.temperature);
  std::string canonical = request.model;
  canonical += '\n';
  canonical += temp;
  canonical += '\n';
  for (const auto& message : request.messages) {
    canonical += message.role;
    canonical += '\x1f';
    canonical += message.content;
    canonical += '\x1e';
  }
  return to_hex64(fnv1a64(canonical));
}

ReplayStore::ReplayStore(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_)) {
    throw ConfigError("replay directory not found: " + dir_.string());
  }
}

GenerationResponse ReplayStore::complete(const GenerationRequest& request) {
  const std::string key = request_key(request);
  const fs::path file = dir_ / (key + ".txt");
  if (!fs::exists(file)) {
    throw ReplayMissError(key);
  }
  return {read_file(file), std::chrono::milliseconds{0}, BackendKind::Replay};
}

void ReplayStore::record(const fs::path& dir, const GenerationRequest& request,
                         std::string_view raw_text) {
  fs::create_directories(dir);
  write_file(dir / (request_key(request) + ".txt"), raw_text);
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path prefix, no trailing slash
};

ParsedUrl parse_base_url(const std::string& base_url) {
  std::string url = base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  if (url.empty()) throw ConfigError("empty endpoint URL");
  std::size_t scheme_end = url.find("://");
  std::size_t path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, ""};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

json request_body(const GenerationRequest& request) {
  json messages = json::array();
  for (const auto& message : request.messages) {
    messages.push_back({{"role", message.role}, {"content", message.content}});
  }
  json body = {
      {"model", request.model},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
  };
  if (request.max_tokens) body["max_tokens"] = *request.max_tokens;
  return body;
}

std::string first_choice_content(const std::string& payload) {
  json doc;
  try {
    doc = json::parse(payload);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& ex) {
    throw EndpointError(200, std::string("unexpected response shape: ") + ex.what());
  }
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) {
    throw ConfigError("live backend needs an endpoint URL");
  }
  if (options_.max_inflight < 1) options_.max_inflight = 1;
}

GenerationResponse HttpBackend::complete(const GenerationRequest& request) {
  if (request.messages.empty()) {
    throw ConfigError("generation request has no messages");
  }

  std::unique_lock lock(mutex_);
  slot_free_.wait(lock, [&] { return in_flight_ < options_.max_inflight; });
  ++in_flight_;
  lock.unlock();

  struct SlotGuard {
    HttpBackend* self;
    ~SlotGuard() {
      std::lock_guard guard(self->mutex_);
      --self->in_flight_;
      self->slot_free_.notify_one();
    }
  } slot_guard{this};

  const ParsedUrl url = parse_base_url(options_.base_url);
  const std::string path = url.prefix + "/v1/chat/completions";
  const std::string body = request_body(request).dump();
  const auto start = std::chrono::steady_clock::now();

  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
  };

  for (int attempt = 0;; ++attempt) {
    httplib::Client client(url.origin);
    client.set_connection_timeout(request.timeout);
    client.set_read_timeout(request.timeout);
    client.set_write_timeout(request.timeout);

    httplib::Result result = client.Post(path, body, "application/json");

    if (!result) {
      const bool deadline_hit = elapsed() >= request.timeout;
      if (result.error() == httplib::Error::ConnectionTimeout || deadline_hit) {
        throw TimeoutError("no response within " +
                           std::to_string(request.timeout.count()) + " ms");
      }
      if (attempt == 0) continue;  // one retry on connection trouble
      throw EndpointError(0, httplib::to_string(result.error()));
    }

    if (result->status >= 500 && attempt == 0) {
      continue;  // one retry on server errors
    }
    if (result->status != 200) {
      throw EndpointError(result->status, result->body);
    }
    return {first_choice_content(result->body), elapsed(), BackendKind::Live};
  }
}

namespace {

const char* const kDafnyTokens[] = {"method", "function", "lemma",
                                    "datatype", "module", "predicate"};

bool is_fence(const std::string& line) {
  return trim(line).rfind("```", 0) == 0;
}

std::string fence_tag(const std::string& line) {
  std::string t = trim(line);
  std::size_t i = 0;
  while (i < t.size() && t[i] == '`') ++i;
  return to_lower(trim(t.substr(i)));
}

bool line_anchors_code(const std::string& line) {
  if (line.find('{') != std::string::npos || line.find('}') != std::string::npos) {
    return true;
  }
  if (trim(line).rfind("//", 0) == 0) return true;  // comment lines belong to code
  return contains_dafny_token(line);
}

// Drops leading/trailing lines that do not look like code. Idempotent, which
// keeps extract_code a fixed point even on unterminated fences.
std::vector<std::string> edge_trim(const std::vector<std::string>& lines) {
  std::size_t first = lines.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (line_anchors_code(lines[i])) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == lines.size()) return {};
  return std::vector<std::string>(lines.begin() + first, lines.begin() + last + 1);
}

}  // namespace

bool contains_dafny_token(std::string_view text) {
  for (const char* token : kDafnyTokens) {
    if (contains_word(text, token)) return true;
  }
  return false;
}

std::optional<std::string> extract_code(const std::string& raw_text) {
  const std::vector<std::string> lines = split_lines(raw_text);

  std::vector<std::string> collected;
  bool in_block = false;
  bool keep_block = false;
  bool saw_block = false;
  for (const auto& line : lines) {
    if (is_fence(line)) {
      if (!in_block) {
        in_block = true;
        const std::string tag = fence_tag(line);
        keep_block = tag.empty() || tag == "dafny";
        saw_block = true;
      } else {
        in_block = false;
      }
      continue;
    }
    if (in_block && keep_block) {
      collected.push_back(line);
    }
  }

  const std::vector<std::string> kept = edge_trim(saw_block ? collected : lines);
  if (kept.empty()) return std::nullopt;
  const std::string code = join_lines(kept);

  if (trim(code).empty() || !contains_dafny_token(code)) {
    return std::nullopt;
  }
  return code;
}

}  // namespace vforge
