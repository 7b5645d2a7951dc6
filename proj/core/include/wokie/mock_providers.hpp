#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "wokie/providers.hpp"

namespace wokie::providers {

/// Fixed lookup table provider. Entries are keyed by (source lang, target
/// lang, text); entries with empty langs match any pair. Deterministic and
/// offline, the backbone of the test suites.
class DictionaryProvider : public TranslationProvider {
 public:
  DictionaryProvider(std::string id, std::set<std::string> languages = {});

  /// JSON file: {"src|tgt": {"text": "translation", ...}, ...} or the flat
  /// form {"text": "translation"} applying to every pair.
  static std::shared_ptr<DictionaryProvider> from_json_file(const std::string& id,
                                                            const std::string& path);

  void add(const std::string& text, const std::string& translation);
  void add(const std::string& src, const std::string& tgt, const std::string& text,
           const std::string& translation);

  const std::string& id() const override { return id_; }
  bool supports(std::string_view src, std::string_view tgt) const override;
  TranslateResult fetch(const std::string& text, const std::string& src,
                        const std::string& tgt) override;

  long calls() const { return calls_.load(); }

 private:
  std::string id_;
  std::set<std::string> languages_;  // empty = any
  std::map<std::string, std::string> any_pair_;
  std::map<std::string, std::map<std::string, std::string>> per_pair_;
  std::atomic<long> calls_{0};
};

/// Returns the source text unchanged; supports every pair.
class EchoProvider : public TranslationProvider {
 public:
  explicit EchoProvider(std::string id) : id_(std::move(id)) {}
  const std::string& id() const override { return id_; }
  bool supports(std::string_view, std::string_view) const override { return true; }
  TranslateResult fetch(const std::string& text, const std::string&,
                        const std::string&) override {
    return text;
  }

 private:
  std::string id_;
};

/// Arbitrary behavior via a callable; used for fault injection and synthetic
/// corpora.
class ScriptedProvider : public TranslationProvider {
 public:
  using Handler =
      std::function<TranslateResult(const std::string& text, const std::string& src,
                                    const std::string& tgt)>;
  using PairFilter = std::function<bool(std::string_view src, std::string_view tgt)>;

  ScriptedProvider(std::string id, Handler handler, PairFilter filter = nullptr)
      : id_(std::move(id)), handler_(std::move(handler)), filter_(std::move(filter)) {}

  const std::string& id() const override { return id_; }
  bool supports(std::string_view src, std::string_view tgt) const override {
    return filter_ ? filter_(src, tgt) : true;
  }
  TranslateResult fetch(const std::string& text, const std::string& src,
                        const std::string& tgt) override {
    calls_.fetch_add(1);
    return handler_(text, src, tgt);
  }

  long calls() const { return calls_.load(); }

 private:
  std::string id_;
  Handler handler_;
  PairFilter filter_;
  std::atomic<long> calls_{0};
};

/// Fails the first `failures` fetches with the given kind, then delegates.
class FlakyProvider : public TranslationProvider {
 public:
  FlakyProvider(std::shared_ptr<TranslationProvider> inner, int failures,
                ErrorKind kind = ErrorKind::network)
      : inner_(std::move(inner)), remaining_(failures), kind_(kind) {}

  const std::string& id() const override { return inner_->id(); }
  bool supports(std::string_view src, std::string_view tgt) const override {
    return inner_->supports(src, tgt);
  }
  TranslateResult fetch(const std::string& text, const std::string& src,
                        const std::string& tgt) override {
    if (remaining_.fetch_sub(1) > 0) {
      return ProviderError{kind_, inner_->id(), "injected failure", std::nullopt};
    }
    return inner_->fetch(text, src, tgt);
  }

 private:
  std::shared_ptr<TranslationProvider> inner_;
  std::atomic<int> remaining_;
  ErrorKind kind_;
};

}  // namespace wokie::providers
