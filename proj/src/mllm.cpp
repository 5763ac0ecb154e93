#include "chartlens/mllm.hpp"

#include <json.hpp>

#include "chartlens/error.hpp"
#include "chartlens/fs_util.hpp"

namespace chartlens {

HttpMllmClient::HttpMllmClient(MllmConfig cfg)
    : cfg_(std::move(cfg)),
      endpoint_(http::parse_url(cfg_.base_url)),
      limiter_(cfg_.max_in_flight),
      bucket_(cfg_.requests_per_second, cfg_.burst) {}

std::string HttpMllmClient::request_body(const MllmRequest& req) const {
  nlohmann::ordered_json user_content = nlohmann::ordered_json::array();
  user_content.push_back({{"type", "text"}, {"text", req.user_text}});
  if (req.image) {
    user_content.push_back(
        {{"type", "image_url"},
         {"image_url", {{"url", "data:image/png;base64," + base64_encode(encode_png(*req.image))}}}});
  }
  nlohmann::ordered_json body;
  body["model"] = cfg_.model;
  body["temperature"] = 0;
  body["max_tokens"] = cfg_.max_tokens;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", req.system_text}}, {{"role", "user"}, {"content", user_content}}});
  return body.dump();
}

std::string HttpMllmClient::complete(const MllmRequest& req) {
  const std::string body = request_body(req);
  http::Headers headers;
  if (cfg_.api_key) headers.emplace_back("Authorization", "Bearer " + *cfg_.api_key);

  http::Response res;
  {
    auto permit = limiter_.acquire();
    bucket_.acquire();
    res = http::post_with_retry(endpoint_, "/chat/completions", body, headers, cfg_.timeout, cfg_.retries);
  }
  if (res.status == 0) throw ServiceError("mllm unavailable: " + res.error);
  if (!res.ok()) throw ServiceError("mllm unavailable: HTTP " + std::to_string(res.status) + ": " + res.body);
  try {
    const auto j = nlohmann::json::parse(res.body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    // Some servers return content parts.
    std::string text;
    for (const auto& part : content)
      if (part.value("type", "") == "text") text += part.at("text").get<std::string>();
    return text;
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError(std::string("mllm unavailable: malformed response: ") + e.what());
  }
}

ScriptedMllm::ScriptedMllm(std::map<std::string, std::string> responses) : responses_(std::move(responses)) {}

ScriptedMllm ScriptedMllm::from_file(const std::filesystem::path& path) {
  std::map<std::string, std::string> responses;
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    if (!j.is_object()) throw InputError("mock mllm fixture " + path.string() + ": expected an object");
    for (const auto& [id, text] : j.items()) responses[id] = text.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError("mock mllm fixture " + path.string() + ": " + e.what());
  }
  return ScriptedMllm(std::move(responses));
}

std::string ScriptedMllm::complete(const MllmRequest& req) {
  if (auto it = responses_.find(req.record_id); it != responses_.end()) return it->second;
  if (auto it = responses_.find("*"); it != responses_.end()) return it->second;
  throw ServiceError("mllm unavailable: no scripted response for '" + req.record_id + "'");
}

}  // namespace chartlens
