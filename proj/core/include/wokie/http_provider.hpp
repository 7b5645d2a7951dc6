#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "wokie/providers.hpp"

namespace wokie::providers {

/// Declarative HTTP service adapter. The request body and headers are
/// templates with {{text}}, {{source}}, {{target}} and {{key}} placeholders;
/// the translated string is extracted with a JSON pointer.
struct HttpServiceConfig {
  std::string id;
  std::string endpoint;        // e.g. https://host/path
  std::string method = "POST";
  std::string body_template;   // JSON text with placeholders
  std::map<std::string, std::string> headers;
  std::string result_pointer;  // e.g. /data/translations/0/translatedText
  std::set<std::string> languages;  // supported primary subtags; empty = any
  bool requires_key = true;
  std::string key_env;         // defaults to WOKIE_<ID>_API_KEY
  std::chrono::milliseconds timeout{15000};
  double rate_per_second = 5.0;

  std::string resolved_key_env() const;
};

class HttpProvider : public TranslationProvider {
 public:
  explicit HttpProvider(HttpServiceConfig config);

  const std::string& id() const override { return config_.id; }
  bool supports(std::string_view src, std::string_view tgt) const override;
  bool requires_key() const override { return config_.requires_key; }
  TranslateResult fetch(const std::string& text, const std::string& src,
                        const std::string& tgt) override;

  const HttpServiceConfig& config() const { return config_; }

 private:
  HttpServiceConfig config_;
};

/// Endpoint/auth stubs for the eight built-in services in recommended
/// priority order. Endpoints and request shapes are configurable; these
/// defaults document the expected wiring and are exercised only by opt-in
/// live tests.
std::vector<HttpServiceConfig> builtin_service_stubs();

/// Renders {{placeholders}}; text values are JSON-escaped when `json_escape`.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values, bool json_escape);

}  // namespace wokie::providers
