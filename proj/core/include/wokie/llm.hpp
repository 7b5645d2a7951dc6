#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wokie/expected.hpp"
#include "wokie/providers.hpp"

namespace wokie::llm {

struct LlmConfig {
  std::string model_id = "gemini-2.0-flash";
  double temperature = 0.0;
  std::string endpoint;  // chat-completions URL for the HTTP adapter
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds timeout{15000};
  bool supports_system_prompt = true;
  std::string api_key_env = "WOKIE_LLM_API_KEY";
  std::function<void(std::chrono::milliseconds)> sleeper;  // test hook
};

/// Optional context blocks embedded into prompts when available.
struct PromptContext {
  std::optional<std::string> term_description;
  std::optional<std::string> scheme_description;
  std::optional<std::string> user_context;

  bool empty() const {
    return !term_description && !scheme_description && !user_context;
  }
};

struct Prompt {
  std::string instructions;
  std::string input;
};

struct LlmError {
  enum class Kind { network, rate_limited, auth, malformed_response };
  Kind kind;
  std::string message;

  bool retryable() const { return kind == Kind::network || kind == Kind::rate_limited; }
};

using CompletionResult = Expected<std::string, LlmError>;

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual CompletionResult complete(const Prompt& prompt, const LlmConfig& cfg) = 0;
};

/// Deterministic mock: either a fixed response queue (cycled) or a handler.
class ScriptedLlm : public LlmClient {
 public:
  using Handler = std::function<CompletionResult(const Prompt&)>;

  explicit ScriptedLlm(std::vector<std::string> responses);
  explicit ScriptedLlm(Handler handler) : handler_(std::move(handler)) {}

  CompletionResult complete(const Prompt& prompt, const LlmConfig& cfg) override;

  long calls() const { return calls_; }
  const std::vector<Prompt>& prompts() const { return prompts_; }

 private:
  Handler handler_;
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  long calls_ = 0;
  std::vector<Prompt> prompts_;
};

/// Generic OpenAI-style chat-completions HTTP adapter.
class HttpChatLlm : public LlmClient {
 public:
  CompletionResult complete(const Prompt& prompt, const LlmConfig& cfg) override;
};

/// English names for common language tags; falls back to the tag itself.
std::string language_name(std::string_view tag);

/// Zero-shot translation prompt. Without a system channel the instructions
/// are repeated at the head of the input.
Prompt build_translation_prompt(const std::string& source_text, const std::string& source_lang,
                                const std::string& target_lang, const PromptContext& ctx,
                                bool supports_system_prompt = true);

class TooFewCandidates : public std::runtime_error {
 public:
  TooFewCandidates() : std::runtime_error("selection needs at least two distinct candidates") {}
};

/// Candidate-selection prompt over the distinct candidates (comma-separated;
/// entries containing commas are quote-delimited).
Prompt build_selection_prompt(const std::string& target_lang,
                              std::span<const std::string> candidates,
                              const std::string& source_text, const PromptContext& ctx,
                              bool supports_system_prompt = true);

/// Extracts a term from possibly verbose model output. Returns nothing when
/// the output does not look like a term (code, restated questions, prose).
std::optional<std::string> parse_llm_output(
    const std::string& raw, std::span<const std::string> expected_candidates = {});

enum class RefineRoute { llm_translation_matched, llm_selection, frequency_fallback };

std::string_view to_string(RefineRoute route);

struct LlmExchange {
  std::string stage;  // "translation" or "selection"
  Prompt prompt;
  std::string raw_response;
  bool transport_failed = false;
};

struct RefinementOutcome {
  std::string final_text;
  RefineRoute route = RefineRoute::frequency_fallback;
  int llm_calls = 0;  // refinement stages that invoked the model (1 or 2)
  std::vector<std::string> raw_responses;
  std::vector<LlmExchange> exchanges;
  std::size_t request_chars = 0;
  std::size_t response_chars = 0;
};

struct SourceLabel {
  std::string text;
  std::string lang;
};

/// The two-step refinement: per-label LLM translation with the
/// match-against-candidates rule, then LLM candidate selection, then
/// frequency fallback. The result is always drawn from the primary
/// candidates or the parsed LLM translations.
RefinementOutcome refine(std::span<const SourceLabel> labels,
                         std::span<const providers::TranslationCandidate> primary_candidates,
                         const std::string& target_lang, const PromptContext& ctx,
                         const LlmConfig& cfg, LlmClient& client,
                         std::span<const std::string> priority);

}  // namespace wokie::llm
