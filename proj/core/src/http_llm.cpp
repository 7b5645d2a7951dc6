#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "wokie/llm.hpp"

namespace wokie::llm {

using nlohmann::json;

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  std::size_t path_start = scheme_end == std::string::npos
                               ? endpoint.find('/')
                               : endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/v1/chat/completions"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

CompletionResult HttpChatLlm::complete(const Prompt& prompt, const LlmConfig& cfg) {
  if (cfg.endpoint.empty()) {
    return LlmError{LlmError::Kind::network, "no LLM endpoint configured"};
  }
  json body = {
      {"model", cfg.model_id},
      {"temperature", cfg.temperature},
  };
  json messages = json::array();
  if (cfg.supports_system_prompt) {
    messages.push_back({{"role", "system"}, {"content", prompt.instructions}});
  }
  messages.push_back({{"role", "user"}, {"content", prompt.input}});
  body["messages"] = std::move(messages);

  auto [host, path] = split_endpoint(cfg.endpoint);
  httplib::Client client(host);
  client.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Result res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    return LlmError{LlmError::Kind::network, httplib::to_string(res.error())};
  }
  if (res->status == 401 || res->status == 403) {
    return LlmError{LlmError::Kind::auth, "HTTP " + std::to_string(res->status)};
  }
  if (res->status == 429) {
    return LlmError{LlmError::Kind::rate_limited, "HTTP 429"};
  }
  if (res->status < 200 || res->status >= 300) {
    return LlmError{LlmError::Kind::network, "HTTP " + std::to_string(res->status)};
  }
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    return LlmError{LlmError::Kind::malformed_response, "response is not JSON"};
  }
  const json::json_pointer content_ptr("/choices/0/message/content");
  if (!parsed.contains(content_ptr) || !parsed.at(content_ptr).is_string()) {
    return LlmError{LlmError::Kind::malformed_response, "no completion content in response"};
  }
  return parsed.at(content_ptr).get<std::string>();
}

}  // namespace wokie::llm
