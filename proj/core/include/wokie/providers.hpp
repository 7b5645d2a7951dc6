#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wokie/expected.hpp"

namespace wokie::providers {

enum class ErrorKind { rate_limited, unsupported_pair, network, malformed_response, auth };

std::string_view to_string(ErrorKind kind);

struct ProviderError {
  ErrorKind kind;
  std::string provider_id;
  std::string message;
  std::optional<std::chrono::milliseconds> retry_after;

  /// Only rate_limited and network failures are worth retrying.
  bool retryable() const { return kind == ErrorKind::rate_limited || kind == ErrorKind::network; }
};

struct TranslationCandidate {
  std::string text;
  std::string provider_id;
  std::string source_text;
  std::string source_lang;
  std::chrono::microseconds latency{0};
};

using TranslateResult = Expected<std::string, ProviderError>;

/// Common contract for translation services; mock and HTTP-backed providers
/// register identically.
class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual const std::string& id() const = 0;
  virtual bool supports(std::string_view source_lang, std::string_view target_lang) const = 0;
  virtual bool requires_key() const { return false; }
  /// Raw service call; caching, rate limiting and retries live in the hub.
  virtual TranslateResult fetch(const std::string& text, const std::string& source_lang,
                                const std::string& target_lang) = 0;
};

/// Trims, strips matching outer quote pairs and collapses internal
/// whitespace so frequency counting compares like with like.
std::string normalize_response(std::string_view raw);

/// §-recommended service order; a configured order overrides it.
std::vector<std::string> default_priority();

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class DuplicateProvider : public std::runtime_error {
 public:
  explicit DuplicateProvider(const std::string& id)
      : std::runtime_error("provider already registered: " + id) {}
};

/// Token-bucket limiter; zero rate means unlimited.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  RateLimiter(double per_second, double burst = 0.0);

  void acquire();
  double per_second() const { return per_second_; }

  /// Test hooks; defaults use the real clock and thread sleep.
  void set_clock(Clock clock) { clock_ = std::move(clock); }
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

 private:
  double per_second_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  bool started_ = false;
  std::mutex mu_;
  Clock clock_;
  Sleeper sleeper_;
};

/// Append-only JSON-lines cache keyed by (provider, source, target, text).
/// An empty path keeps the cache in memory only.
class TranslationCache {
 public:
  explicit TranslationCache(std::string path = {});

  std::optional<std::string> lookup(const std::string& provider, const std::string& src,
                                    const std::string& tgt, const std::string& text) const;
  void store(const std::string& provider, const std::string& src, const std::string& tgt,
             const std::string& text, const std::string& result);

  std::size_t size() const;
  std::map<std::string, std::size_t> per_provider() const;
  void clear();
  const std::string& path() const { return path_; }

 private:
  static std::string key(const std::string& provider, const std::string& src,
                         const std::string& tgt, const std::string& text);
  void load();

  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  RateLimiter::Sleeper sleeper;  // injectable for tests
};

/// Registry plus orchestration: capability gate, cache, per-provider rate
/// limit, retry with exponential backoff, response normalization.
class ProviderHub {
 public:
  ProviderHub();

  /// rate_per_second <= 0 disables rate limiting for the provider.
  void register_provider(std::shared_ptr<TranslationProvider> provider,
                         double rate_per_second = 0.0);

  bool has(const std::string& id) const;
  TranslationProvider& at(const std::string& id) const;
  std::vector<std::string> ids() const;  // registration order

  /// Validates a requested priority order against the registry.
  std::vector<std::string> resolve_priority(const std::vector<std::string>& requested) const;

  bool supports(const std::string& id, std::string_view src, std::string_view tgt) const;

  Expected<TranslationCandidate, ProviderError> translate(const std::string& id,
                                                          const std::string& text,
                                                          const std::string& src,
                                                          const std::string& tgt);

  void set_cache(std::shared_ptr<TranslationCache> cache) { cache_ = std::move(cache); }
  TranslationCache* cache() const { return cache_.get(); }
  void set_retry_policy(RetryPolicy policy) { retry_ = std::move(policy); }
  void set_rate_limit(const std::string& id, double per_second);

  long network_calls() const { return network_calls_.load(); }
  long cache_hits() const { return cache_hits_.load(); }

 private:
  struct Entry {
    std::shared_ptr<TranslationProvider> provider;
    std::unique_ptr<RateLimiter> limiter;  // null = unlimited
  };
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;  // registration order
  std::shared_ptr<TranslationCache> cache_;
  RetryPolicy retry_;
  std::atomic<long> network_calls_{0};
  std::atomic<long> cache_hits_{0};
};

}  // namespace wokie::providers
