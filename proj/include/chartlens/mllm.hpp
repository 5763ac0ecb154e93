#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "chartlens/http_util.hpp"
#include "chartlens/image.hpp"

namespace chartlens {

struct MllmRequest {
  std::string record_id;  // used by scripted clients only
  std::string system_text;
  std::string user_text;
  const ChartImage* image = nullptr;
};

class MllmClient {
 public:
  virtual ~MllmClient() = default;
  /// Assistant text verbatim. Throws ServiceError("mllm unavailable: ...").
  virtual std::string complete(const MllmRequest& req) = 0;
};

struct MllmConfig {
  std::string base_url;                // e.g. https://api.openai.com/v1
  std::string model = "gpt-4o";
  std::optional<std::string> api_key;  // from the environment only
  int max_in_flight = 4;
  double requests_per_second = 2.0;
  double burst = 4.0;
  int retries = 1;
  int max_tokens = 1024;
  std::chrono::milliseconds timeout{120000};
};

/// OpenAI-compatible POST {base_url}/chat/completions at temperature 0 with
/// the image attached as a PNG data URL.
class HttpMllmClient final : public MllmClient {
 public:
  explicit HttpMllmClient(MllmConfig cfg);
  std::string complete(const MllmRequest& req) override;

  /// Request body as sent; exposed for tests.
  std::string request_body(const MllmRequest& req) const;

 private:
  MllmConfig cfg_;
  http::Endpoint endpoint_;
  http::InFlightLimiter limiter_;
  http::TokenBucket bucket_;
};

/// Replays recorded responses keyed by record id; "*" is the fallback.
class ScriptedMllm final : public MllmClient {
 public:
  explicit ScriptedMllm(std::map<std::string, std::string> responses);
  /// Fixture file: a JSON object mapping record ids to response text.
  static ScriptedMllm from_file(const std::filesystem::path& path);

  std::string complete(const MllmRequest& req) override;

 private:
  std::map<std::string, std::string> responses_;
};

}  // namespace chartlens
