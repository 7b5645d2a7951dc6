#include "wokie/http_provider.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "wokie/skos.hpp"

namespace wokie::providers {

using nlohmann::json;

std::string HttpServiceConfig::resolved_key_env() const {
  if (!key_env.empty()) return key_env;
  std::string upper = id;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return "WOKIE_" + upper + "_API_KEY";
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values,
                            bool json_escape) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    auto open = tmpl.find("{{", i);
    if (open == std::string::npos) {
      out.append(tmpl, i, std::string::npos);
      break;
    }
    auto close = tmpl.find("}}", open);
    if (close == std::string::npos) {
      out.append(tmpl, i, std::string::npos);
      break;
    }
    out.append(tmpl, i, open - i);
    const std::string name = tmpl.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it != values.end()) {
      if (json_escape) {
        std::string quoted = json(it->second).dump();
        out.append(quoted, 1, quoted.size() - 2);  // drop surrounding quotes
      } else {
        out.append(it->second);
      }
    }
    i = close + 2;
  }
  return out;
}

HttpProvider::HttpProvider(HttpServiceConfig config) : config_(std::move(config)) {}

bool HttpProvider::supports(std::string_view src, std::string_view tgt) const {
  if (src == tgt) return false;
  if (config_.languages.empty()) return true;
  return config_.languages.count(skos::primary_subtag(src)) > 0 &&
         config_.languages.count(skos::primary_subtag(tgt)) > 0;
}

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  std::size_t path_start = scheme_end == std::string::npos
                               ? endpoint.find('/')
                               : endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::optional<std::chrono::milliseconds> retry_after_of(const httplib::Response& res) {
  if (!res.has_header("Retry-After")) return std::nullopt;
  const std::string v = res.get_header_value("Retry-After");
  char* end = nullptr;
  long seconds = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || seconds < 0) return std::nullopt;
  return std::chrono::milliseconds(seconds * 1000);
}

}  // namespace

TranslateResult HttpProvider::fetch(const std::string& text, const std::string& src,
                                    const std::string& tgt) {
  std::map<std::string, std::string> values = {
      {"text", text},
      {"source", skos::primary_subtag(src)},
      {"target", skos::primary_subtag(tgt)},
  };
  if (config_.requires_key) {
    const char* key = std::getenv(config_.resolved_key_env().c_str());
    if (key == nullptr || *key == '\0') {
      return ProviderError{ErrorKind::auth, config_.id,
                           "missing API key (set " + config_.resolved_key_env() + ")",
                           std::nullopt};
    }
    values["key"] = key;
  }

  auto [host, path] = split_endpoint(config_.endpoint);
  httplib::Client client(host);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
      config_.timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));

  httplib::Headers headers;
  for (const auto& [name, value] : config_.headers) {
    headers.emplace(name, render_template(value, values, false));
  }
  const std::string rendered_path = render_template(path, values, false);

  httplib::Result res =
      config_.method == "GET"
          ? client.Get(rendered_path, headers)
          : client.Post(rendered_path, headers,
                        render_template(config_.body_template, values, true),
                        "application/json");
  if (!res) {
    return ProviderError{ErrorKind::network, config_.id, httplib::to_string(res.error()),
                         std::nullopt};
  }
  if (res->status == 401 || res->status == 403) {
    return ProviderError{ErrorKind::auth, config_.id, "HTTP " + std::to_string(res->status),
                         std::nullopt};
  }
  if (res->status == 429) {
    return ProviderError{ErrorKind::rate_limited, config_.id, "HTTP 429", retry_after_of(*res)};
  }
  if (res->status < 200 || res->status >= 300) {
    return ProviderError{ErrorKind::network, config_.id, "HTTP " + std::to_string(res->status),
                         std::nullopt};
  }
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded()) {
    return ProviderError{ErrorKind::malformed_response, config_.id, "response is not JSON",
                         std::nullopt};
  }
  json::json_pointer ptr;
  try {
    ptr = json::json_pointer(config_.result_pointer);
  } catch (const json::exception&) {
    return ProviderError{ErrorKind::malformed_response, config_.id,
                         "bad result pointer: " + config_.result_pointer, std::nullopt};
  }
  if (!body.contains(ptr) || !body.at(ptr).is_string()) {
    return ProviderError{ErrorKind::malformed_response, config_.id,
                         "no translation at " + config_.result_pointer, std::nullopt};
  }
  return body.at(ptr).get<std::string>();
}

std::vector<HttpServiceConfig> builtin_service_stubs() {
  // The languages each stub claims cover the scripts the pipeline targets;
  // restrict or extend per service via the config file. PONS offers no
  // Latin or Serbian.
  const std::set<std::string> common = {"en", "de", "fr", "es", "it", "pt", "sr", "la",
                                        "el", "ar", "ru", "hr", "hu", "sl", "nl", "pl"};
  std::set<std::string> pons = common;
  pons.erase("la");
  pons.erase("sr");

  std::vector<HttpServiceConfig> out;

  HttpServiceConfig lingvanex;
  lingvanex.id = "lingvanex";
  lingvanex.endpoint = "https://api-b2b.backenster.com/b1/api/v3/translate";
  lingvanex.body_template =
      R"({"data":"{{text}}","from":"{{source}}","to":"{{target}}","platform":"api"})";
  lingvanex.headers = {{"Authorization", "Bearer {{key}}"}};
  lingvanex.result_pointer = "/result";
  lingvanex.languages = common;
  out.push_back(lingvanex);

  HttpServiceConfig google;
  google.id = "google";
  google.endpoint = "https://translation.googleapis.com/language/translate/v2?key={{key}}";
  google.body_template =
      R"({"q":"{{text}}","source":"{{source}}","target":"{{target}}","format":"text"})";
  google.result_pointer = "/data/translations/0/translatedText";
  google.languages = common;
  out.push_back(google);

  HttpServiceConfig modernmt;
  modernmt.id = "modernmt";
  modernmt.endpoint = "https://api.modernmt.com/translate";
  modernmt.body_template = R"({"q":"{{text}}","source":"{{source}}","target":"{{target}}"})";
  modernmt.headers = {{"MMT-ApiKey", "{{key}}"}};
  modernmt.result_pointer = "/data/translation";
  modernmt.languages = common;
  out.push_back(modernmt);

  HttpServiceConfig microsoft;
  microsoft.id = "microsoft";
  microsoft.endpoint =
      "https://api.cognitive.microsofttranslator.com/translate?api-version=3.0"
      "&from={{source}}&to={{target}}";
  microsoft.body_template = R"([{"Text":"{{text}}"}])";
  microsoft.headers = {{"Ocp-Apim-Subscription-Key", "{{key}}"}};
  microsoft.result_pointer = "/0/translations/0/text";
  microsoft.languages = common;
  out.push_back(microsoft);

  HttpServiceConfig yandex;
  yandex.id = "yandex";
  yandex.endpoint = "https://translate.api.cloud.yandex.net/translate/v2/translate";
  yandex.body_template =
      R"({"texts":["{{text}}"],"sourceLanguageCode":"{{source}}","targetLanguageCode":"{{target}}"})";
  yandex.headers = {{"Authorization", "Api-Key {{key}}"}};
  yandex.result_pointer = "/translations/0/text";
  yandex.languages = common;
  out.push_back(yandex);

  HttpServiceConfig argos;
  argos.id = "argos";
  argos.endpoint = "http://localhost:5000/translate";  // local LibreTranslate
  argos.body_template =
      R"({"q":"{{text}}","source":"{{source}}","target":"{{target}}","format":"text"})";
  argos.result_pointer = "/translatedText";
  argos.languages = common;
  argos.requires_key = false;
  out.push_back(argos);

  HttpServiceConfig reverso;
  reverso.id = "reverso";
  reverso.endpoint = "https://api.reverso.net/translate/v1/translation";
  reverso.body_template =
      R"({"input":"{{text}}","from":"{{source}}","to":"{{target}}","format":"text"})";
  reverso.result_pointer = "/translation/0";
  reverso.languages = common;
  reverso.requires_key = false;
  out.push_back(reverso);

  HttpServiceConfig pons_cfg;
  pons_cfg.id = "pons";
  pons_cfg.endpoint = "https://api.pons.com/text-translation-web/v4/translate";
  pons_cfg.body_template =
      R"({"text":"{{text}}","sourceLanguage":"{{source}}","targetLanguage":"{{target}}"})";
  pons_cfg.headers = {{"X-Secret", "{{key}}"}};
  pons_cfg.result_pointer = "/text";
  pons_cfg.languages = pons;
  out.push_back(pons_cfg);

  return out;
}

}  // namespace wokie::providers
