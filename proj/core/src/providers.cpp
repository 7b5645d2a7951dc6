#include "wokie/providers.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "wokie/text.hpp"

namespace wokie::providers {

using nlohmann::json;

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::rate_limited: return "rate_limited";
    case ErrorKind::unsupported_pair: return "unsupported_pair";
    case ErrorKind::network: return "network";
    case ErrorKind::malformed_response: return "malformed_response";
    case ErrorKind::auth: return "auth";
  }
  return "unknown";
}

std::string normalize_response(std::string_view raw) {
  return text::collapse_whitespace(text::strip_quotes(text::trim(raw)));
}

std::vector<std::string> default_priority() {
  return {"lingvanex", "google", "modernmt", "microsoft", "yandex", "argos", "reverso", "pons"};
}

// ---------------------------------------------------------------------------
// RateLimiter
// ---------------------------------------------------------------------------

RateLimiter::RateLimiter(double per_second, double burst)
    : per_second_(per_second),
      capacity_(burst > 0 ? burst : std::max(1.0, per_second)),
      tokens_(capacity_),
      clock_([] { return std::chrono::steady_clock::now(); }),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

void RateLimiter::acquire() {
  if (per_second_ <= 0) return;
  while (true) {
    std::chrono::milliseconds wait{0};
    {
      std::lock_guard lock(mu_);
      auto now = clock_();
      if (!started_) {
        last_ = now;
        started_ = true;
      }
      const double elapsed = std::chrono::duration<double>(now - last_).count();
      tokens_ = std::min(capacity_, tokens_ + elapsed * per_second_);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const double missing = 1.0 - tokens_;
      wait = std::chrono::milliseconds(
          static_cast<long>(std::max(1.0, missing / per_second_ * 1000.0)));
    }
    sleeper_(wait);
  }
}

// ---------------------------------------------------------------------------
// TranslationCache
// ---------------------------------------------------------------------------

TranslationCache::TranslationCache(std::string path) : path_(std::move(path)) { load(); }

std::string TranslationCache::key(const std::string& provider, const std::string& src,
                                  const std::string& tgt, const std::string& text) {
  json k = {provider, src, tgt, text};
  return k.dump();
}

void TranslationCache::load() {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;  // absent file: start empty
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (!(j.contains("provider") && j.contains("src") && j.contains("tgt") &&
          j.contains("text") && j.contains("result"))) {
      continue;
    }
    entries_[key(j["provider"], j["src"], j["tgt"], j["text"])] = j["result"];
  }
}

std::optional<std::string> TranslationCache::lookup(const std::string& provider,
                                                    const std::string& src,
                                                    const std::string& tgt,
                                                    const std::string& text) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key(provider, src, tgt, text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranslationCache::store(const std::string& provider, const std::string& src,
                             const std::string& tgt, const std::string& text,
                             const std::string& result) {
  std::lock_guard lock(mu_);
  auto [it, inserted] = entries_.emplace(key(provider, src, tgt, text), result);
  if (!inserted) return;
  if (path_.empty()) return;
  json j = {{"provider", provider}, {"src", src},       {"tgt", tgt},
            {"text", text},         {"result", result}, {"ts", std::time(nullptr)}};
  std::ofstream out(path_, std::ios::app);
  if (out) out << j.dump() << "\n";
}

std::size_t TranslationCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::map<std::string, std::size_t> TranslationCache::per_provider() const {
  std::lock_guard lock(mu_);
  std::map<std::string, std::size_t> out;
  for (const auto& [k, v] : entries_) {
    json parsed = json::parse(k, nullptr, false);
    if (parsed.is_array() && !parsed.empty()) out[parsed[0].get<std::string>()] += 1;
  }
  return out;
}

void TranslationCache::clear() {
  std::lock_guard lock(mu_);
  entries_.clear();
  if (!path_.empty()) std::ofstream(path_, std::ios::trunc);
}

// ---------------------------------------------------------------------------
// ProviderHub
// ---------------------------------------------------------------------------

ProviderHub::ProviderHub() {
  retry_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

void ProviderHub::register_provider(std::shared_ptr<TranslationProvider> provider,
                                    double rate_per_second) {
  const std::string id = provider->id();
  if (entries_.count(id) > 0) throw DuplicateProvider(id);
  Entry entry;
  entry.provider = std::move(provider);
  if (rate_per_second > 0) entry.limiter = std::make_unique<RateLimiter>(rate_per_second);
  entries_.emplace(id, std::move(entry));
  order_.push_back(id);
}

bool ProviderHub::has(const std::string& id) const { return entries_.count(id) > 0; }

TranslationProvider& ProviderHub::at(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw ConfigError("unknown provider: " + id);
  return *it->second.provider;
}

std::vector<std::string> ProviderHub::ids() const { return order_; }

std::vector<std::string> ProviderHub::resolve_priority(
    const std::vector<std::string>& requested) const {
  if (requested.empty()) {
    // Default order restricted to what is actually registered.
    std::vector<std::string> out;
    for (const auto& id : default_priority()) {
      if (has(id)) out.push_back(id);
    }
    if (out.empty()) out = order_;
    return out;
  }
  for (const auto& id : requested) {
    if (!has(id)) throw ConfigError("unknown provider: " + id);
  }
  return requested;
}

bool ProviderHub::supports(const std::string& id, std::string_view src,
                           std::string_view tgt) const {
  return at(id).supports(src, tgt);
}

void ProviderHub::set_rate_limit(const std::string& id, double per_second) {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw ConfigError("unknown provider: " + id);
  it->second.limiter =
      per_second > 0 ? std::make_unique<RateLimiter>(per_second) : nullptr;
}

Expected<TranslationCandidate, ProviderError> ProviderHub::translate(const std::string& id,
                                                                     const std::string& text,
                                                                     const std::string& src,
                                                                     const std::string& tgt) {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw ConfigError("unknown provider: " + id);
  TranslationProvider& provider = *it->second.provider;

  if (!provider.supports(src, tgt)) {
    return ProviderError{ErrorKind::unsupported_pair, id,
                         "unsupported pair " + src + " -> " + tgt, std::nullopt};
  }

  auto make_candidate = [&](std::string translated, std::chrono::microseconds latency) {
    TranslationCandidate c;
    c.text = std::move(translated);
    c.provider_id = id;
    c.source_text = text;
    c.source_lang = src;
    c.latency = latency;
    return c;
  };

  if (cache_) {
    if (auto hit = cache_->lookup(id, src, tgt, text)) {
      cache_hits_.fetch_add(1);
      return make_candidate(*hit, std::chrono::microseconds{0});
    }
  }

  ProviderError last_error{ErrorKind::network, id, "not attempted", std::nullopt};
  auto backoff = retry_.initial_backoff;
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto wait = backoff;
      if (last_error.retry_after) wait = std::max(wait, *last_error.retry_after);
      if (retry_.sleeper) retry_.sleeper(wait);
      backoff *= 2;
    }
    if (it->second.limiter) it->second.limiter->acquire();
    const auto t0 = std::chrono::steady_clock::now();
    TranslateResult result = provider.fetch(text, src, tgt);
    const auto latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - t0);
    network_calls_.fetch_add(1);
    if (result.ok()) {
      std::string normalized = normalize_response(result.value());
      if (normalized.empty()) {
        last_error = ProviderError{ErrorKind::malformed_response, id, "empty translation",
                                   std::nullopt};
        break;  // empty results never improve on retry
      }
      if (cache_) cache_->store(id, src, tgt, text, normalized);
      return make_candidate(std::move(normalized), latency);
    }
    last_error = result.error();
    if (!last_error.retryable()) break;
  }
  return last_error;
}

}  // namespace wokie::providers
