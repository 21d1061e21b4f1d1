#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vforge {

struct Message {
  std::string role;
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct GenerationRequest {
  std::string model;
  double temperature = 0.0;
  std::vector<Message> messages;  // first message role is "system"
  std::chrono::milliseconds timeout{180000};
  std::optional<int> max_tokens;
};

enum class BackendKind { Live, Replay };

struct GenerationResponse {
  std::string raw_text;  // verbatim, fences and all
  std::chrono::milliseconds latency{0};
  BackendKind backend = BackendKind::Live;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationResponse complete(const GenerationRequest& request) = 0;
};

/// Stable key over (model, temperature, full message list); also the replay
/// store's file name stem.
std::string request_key(const GenerationRequest& request);

/// Directory of `<request-key>.txt` files holding raw response text.
class ReplayStore final : public Backend {
 public:
  explicit ReplayStore(std::filesystem::path dir);

  GenerationResponse complete(const GenerationRequest& request) override;

  /// Writes an entry; used to author replay fixtures.
  static void record(const std::filesystem::path& dir,
                     const GenerationRequest& request, std::string_view raw_text);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct HttpBackendOptions {
  std::string base_url;  // e.g. http://127.0.0.1:1234
  int max_inflight = 1;  // bound on concurrent requests to the endpoint
};

/// Chat-completions-compatible endpoint: POST <base>/v1/chat/completions.
/// One retry on 5xx/connection errors, none on timeout.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  GenerationResponse complete(const GenerationRequest& request) override;

 private:
  HttpBackendOptions options_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
};

/// Pulls Dafny source out of a raw model response: fenced blocks tagged
/// empty or "dafny" win; otherwise leading/trailing prose lines are dropped.
/// nullopt when nothing Dafny-significant remains.
std::optional<std::string> extract_code(const std::string& raw_text);

bool contains_dafny_token(std::string_view text);

}  // namespace vforge
