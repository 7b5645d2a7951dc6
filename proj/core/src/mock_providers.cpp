#include "wokie/mock_providers.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "wokie/skos.hpp"

namespace wokie::providers {

using nlohmann::json;

DictionaryProvider::DictionaryProvider(std::string id, std::set<std::string> languages)
    : id_(std::move(id)), languages_(std::move(languages)) {}

std::shared_ptr<DictionaryProvider> DictionaryProvider::from_json_file(const std::string& id,
                                                                       const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dictionary file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("dictionary file is not a JSON object: " + path);
  }
  auto provider = std::make_shared<DictionaryProvider>(id);
  for (const auto& [key, value] : j.items()) {
    auto bar = key.find('|');
    if (value.is_string()) {
      provider->add(key, value.get<std::string>());
    } else if (value.is_object() && bar != std::string::npos) {
      const std::string src = key.substr(0, bar);
      const std::string tgt = key.substr(bar + 1);
      for (const auto& [text, translation] : value.items()) {
        if (translation.is_string()) {
          provider->add(src, tgt, text, translation.get<std::string>());
        }
      }
    }
  }
  return provider;
}

void DictionaryProvider::add(const std::string& text, const std::string& translation) {
  any_pair_[text] = translation;
}

void DictionaryProvider::add(const std::string& src, const std::string& tgt,
                             const std::string& text, const std::string& translation) {
  per_pair_[src + "|" + tgt][text] = translation;
}

bool DictionaryProvider::supports(std::string_view src, std::string_view tgt) const {
  if (languages_.empty()) return src != tgt;
  return src != tgt && languages_.count(skos::primary_subtag(src)) > 0 &&
         languages_.count(skos::primary_subtag(tgt)) > 0;
}

TranslateResult DictionaryProvider::fetch(const std::string& text, const std::string& src,
                                          const std::string& tgt) {
  calls_.fetch_add(1);
  auto pair_it = per_pair_.find(skos::primary_subtag(src) + "|" + skos::primary_subtag(tgt));
  if (pair_it != per_pair_.end()) {
    auto hit = pair_it->second.find(text);
    if (hit != pair_it->second.end()) return hit->second;
  }
  auto any = any_pair_.find(text);
  if (any != any_pair_.end()) return any->second;
  return ProviderError{ErrorKind::malformed_response, id_, "no dictionary entry for: " + text,
                       std::nullopt};
}

}  // namespace wokie::providers
