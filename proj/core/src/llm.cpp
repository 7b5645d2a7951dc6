#include "wokie/llm.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <thread>

#include "wokie/consensus.hpp"
#include "wokie/text.hpp"

namespace wokie::llm {

// ---------------------------------------------------------------------------
// ScriptedLlm
// ---------------------------------------------------------------------------

ScriptedLlm::ScriptedLlm(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

CompletionResult ScriptedLlm::complete(const Prompt& prompt, const LlmConfig&) {
  ++calls_;
  prompts_.push_back(prompt);
  if (handler_) return handler_(prompt);
  if (responses_.empty()) {
    return LlmError{LlmError::Kind::network, "scripted LLM has no responses"};
  }
  const std::string& r = responses_[next_ % responses_.size()];
  ++next_;
  return r;
}

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

std::string language_name(std::string_view tag) {
  static const std::map<std::string_view, std::string_view> names = {
      {"en", "English"},    {"de", "German"},     {"fr", "French"},    {"es", "Spanish"},
      {"it", "Italian"},    {"pt", "Portuguese"}, {"sr", "Serbian"},   {"la", "Latin"},
      {"el", "Greek"},      {"ar", "Arabic"},     {"ru", "Russian"},   {"hr", "Croatian"},
      {"hu", "Hungarian"},  {"sl", "Slovenian"},  {"nl", "Dutch"},     {"pl", "Polish"},
      {"cs", "Czech"},      {"da", "Danish"},     {"sv", "Swedish"},   {"no", "Norwegian"},
      {"fi", "Finnish"},    {"tr", "Turkish"},    {"zh", "Chinese"},   {"ja", "Japanese"},
      {"ko", "Korean"},     {"uk", "Ukrainian"},  {"bg", "Bulgarian"}, {"ro", "Romanian"},
      {"sk", "Slovak"},     {"he", "Hebrew"},     {"hi", "Hindi"},     {"und", "an unknown language"},
  };
  std::string primary;
  for (char c : tag.substr(0, tag.find('-'))) {
    primary.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  auto it = names.find(primary);
  if (it != names.end()) return std::string(it->second);
  return std::string(tag);
}

namespace {

std::string context_blocks(const PromptContext& ctx) {
  std::string out;
  if (ctx.term_description) {
    out += "\n\nDescription of the term that should be translated:\n" + *ctx.term_description;
  }
  if (ctx.scheme_description) {
    out += "\n\nDescription of the vocabulary the term belongs to:\n" + *ctx.scheme_description;
  }
  if (ctx.user_context) {
    out += "\n\nAdditional context:\n" + *ctx.user_context;
  }
  return out;
}

Prompt assemble(std::string instructions, std::string input, bool supports_system_prompt) {
  if (!supports_system_prompt) input = instructions + "\n\n" + input;
  return {std::move(instructions), std::move(input)};
}

}  // namespace

Prompt build_translation_prompt(const std::string& source_text, const std::string& source_lang,
                                const std::string& target_lang, const PromptContext& ctx,
                                bool supports_system_prompt) {
  (void)source_lang;  // any-language wording keeps the prompt robust to tag noise
  std::string instructions =
      "You are a machine translation system that translates a term from any language to " +
      language_name(target_lang) +
      ".\n\nTo determine the correct context, use the provided additional details. "
      "Return only the translated term and nothing else.";
  std::string input = "Term to translate: " + source_text + context_blocks(ctx);
  return assemble(std::move(instructions), std::move(input), supports_system_prompt);
}

namespace {

std::vector<std::string> distinct_canonical(std::span<const std::string> values) {
  std::vector<std::string> out;
  for (const auto& v : values) {
    std::string c = text::canonical(v);
    if (c.empty()) continue;
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

}  // namespace

Prompt build_selection_prompt(const std::string& target_lang,
                              std::span<const std::string> candidates,
                              const std::string& source_text, const PromptContext& ctx,
                              bool supports_system_prompt) {
  std::vector<std::string> distinct = distinct_canonical(candidates);
  if (distinct.size() < 2) throw TooFewCandidates();

  std::string list;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (i > 0) list += ", ";
    if (distinct[i].find(',') != std::string::npos) {
      list += "\"" + distinct[i] + "\"";
    } else {
      list += distinct[i];
    }
  }

  const std::string target = language_name(target_lang);
  std::string instructions =
      "You are a professional translation review system that assesses the quality of "
      "translations of a single term given in different source languages. The translations "
      "are already given by a translation system. Give me the best fitting translation out "
      "of the given list.\n\nCriteria for high accuracy are:\n"
      "- The best fitting translation is already found in the already given possible "
      "translations\n"
      "- In the current context, there is no possible translation that has a different "
      "meaning.\n\n"
      "Only give me the best fitting translation. Return exactly one option from the given "
      "list and nothing else.";
  std::string input = "Choose the best fitting translation to " + target +
                      ".\n\nTerm to translate: " + source_text + context_blocks(ctx) +
                      "\n\nThe possible translations to " + target +
                      " coming from translation systems are:\n" + list;
  return assemble(std::move(instructions), std::move(input), supports_system_prompt);
}

// ---------------------------------------------------------------------------
// Output parsing
// ---------------------------------------------------------------------------

namespace {

std::string clean_term(std::string_view line) {
  std::u32string u = text::decode_utf8(text::trim(line));
  auto is_emphasis = [](char32_t c) {
    return c == U'*' || c == U'_' || c == U'#';
  };
  std::size_t begin = 0, end = u.size();
  while (begin < end && (is_emphasis(u[begin]) || text::is_space(u[begin]))) ++begin;
  // leading list bullets
  if (begin < end && (u[begin] == U'-' || u[begin] == U'•') && begin + 1 < end &&
      text::is_space(u[begin + 1])) {
    begin += 2;
  }
  while (end > begin && (is_emphasis(u[end - 1]) || text::is_space(u[end - 1]))) --end;
  // final punctuation
  auto is_final_punct = [](char32_t c) {
    return c == U'.' || c == U'!' || c == U'?' || c == U':' || c == U';' || c == U',';
  };
  while (end > begin && is_final_punct(u[end - 1])) --end;
  std::string cleaned = text::encode_utf8(std::u32string_view(u).substr(begin, end - begin));
  return text::strip_quotes(cleaned);
}

// Rejects lines that cannot be a term: code fragments, restated questions,
// long prose.
bool plausible_term(std::string_view raw_line, const std::string& cleaned) {
  if (cleaned.empty()) return false;
  if (text::word_count(cleaned) > 8) return false;
  static constexpr std::string_view code_chars = "{}();=<>`|\\";
  for (char c : raw_line) {
    if (code_chars.find(c) != std::string_view::npos) return false;
    if (c == '?') return false;
  }
  return true;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto nl = s.find('\n', start);
    std::string line = s.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    if (!text::trim(line).empty()) out.push_back(line);
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return out;
}

}  // namespace

std::optional<std::string> parse_llm_output(const std::string& raw,
                                            std::span<const std::string> expected_candidates) {
  std::vector<std::string> lines = split_lines(raw);
  if (lines.empty()) return std::nullopt;

  if (lines.size() == 1) {
    std::string cleaned = clean_term(lines.front());
    if (plausible_term(lines.front(), cleaned)) return cleaned;
    return std::nullopt;
  }

  if (!expected_candidates.empty()) {
    std::vector<std::string> keys;
    keys.reserve(expected_candidates.size());
    for (const auto& c : expected_candidates) keys.push_back(text::match_key(c));
    for (const auto& line : lines) {
      std::string cleaned = clean_term(line);
      if (cleaned.empty()) continue;
      if (std::find(keys.begin(), keys.end(), text::match_key(cleaned)) != keys.end()) {
        return cleaned;
      }
    }
  }

  std::string first = clean_term(lines.front());
  if (plausible_term(lines.front(), first)) return first;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

namespace {

CompletionResult call_with_retries(LlmClient& client, const Prompt& prompt,
                                   const LlmConfig& cfg) {
  auto sleeper = cfg.sleeper
                     ? cfg.sleeper
                     : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  auto backoff = cfg.initial_backoff;
  CompletionResult last = LlmError{LlmError::Kind::network, "not attempted"};
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper(backoff);
      backoff *= 2;
    }
    last = client.complete(prompt, cfg);
    if (last.ok() || !last.error().retryable()) return last;
  }
  return last;
}

struct PrimaryGroup {
  std::string surface;  // canonical form
  int size = 0;
  std::size_t best_rank = std::numeric_limits<std::size_t>::max();
};

std::size_t rank_of(const std::string& provider_id, std::span<const std::string> priority) {
  for (std::size_t i = 0; i < priority.size(); ++i) {
    if (priority[i] == provider_id) return i;
  }
  return priority.size();
}

}  // namespace

std::string_view to_string(RefineRoute route) {
  switch (route) {
    case RefineRoute::llm_translation_matched: return "llm_translation_matched";
    case RefineRoute::llm_selection: return "llm_selection";
    case RefineRoute::frequency_fallback: return "frequency_fallback";
  }
  return "unknown";
}

RefinementOutcome refine(std::span<const SourceLabel> labels,
                         std::span<const providers::TranslationCandidate> primary_candidates,
                         const std::string& target_lang, const PromptContext& ctx,
                         const LlmConfig& cfg, LlmClient& client,
                         std::span<const std::string> priority) {
  if (primary_candidates.empty()) throw consensus::EmptyCandidates();

  RefinementOutcome out;

  // Consensus-style groups over the primaries; the match relation is the
  // case-insensitive key on top of them.
  std::vector<PrimaryGroup> groups;
  std::map<std::string, std::size_t> group_by_surface;
  std::vector<std::string> primary_surfaces;  // first-appearance order
  for (const auto& c : primary_candidates) {
    const std::string surface = text::canonical(c.text);
    auto it = group_by_surface.find(surface);
    if (it == group_by_surface.end()) {
      it = group_by_surface.emplace(surface, groups.size()).first;
      groups.push_back({surface, 0, std::numeric_limits<std::size_t>::max()});
      primary_surfaces.push_back(surface);
    }
    PrimaryGroup& g = groups[it->second];
    g.size += 1;
    g.best_rank = std::min(g.best_rank, rank_of(c.provider_id, priority));
  }
  std::map<std::string, std::vector<std::size_t>> groups_by_key;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    groups_by_key[text::match_key(groups[i].surface)].push_back(i);
  }

  auto run_stage = [&](const char* stage, const Prompt& prompt) -> std::optional<std::string> {
    out.request_chars += prompt.instructions.size() + prompt.input.size();
    CompletionResult res = call_with_retries(client, prompt, cfg);
    LlmExchange exchange{stage, prompt, {}, false};
    if (res.ok()) {
      exchange.raw_response = res.value();
      out.response_chars += res.value().size();
      out.raw_responses.push_back(res.value());
      out.exchanges.push_back(std::move(exchange));
      return res.value();
    }
    exchange.raw_response = res.error().message;
    exchange.transport_failed = true;
    out.exchanges.push_back(std::move(exchange));
    return std::nullopt;
  };

  // Step 1: one translation prompt per source label (individual strategy).
  out.llm_calls = 1;
  std::vector<std::string> llm_translations;  // parsed, canonical
  std::size_t transport_failures = 0;
  for (const auto& label : labels) {
    Prompt prompt = build_translation_prompt(label.text, label.lang, target_lang, ctx,
                                             cfg.supports_system_prompt);
    auto raw = run_stage("translation", prompt);
    if (!raw) {
      ++transport_failures;
      continue;
    }
    auto parsed = parse_llm_output(*raw, primary_surfaces);
    if (!parsed) continue;
    const std::string canonical = text::canonical(*parsed);
    if (!canonical.empty() &&
        std::find(llm_translations.begin(), llm_translations.end(), canonical) ==
            llm_translations.end()) {
      llm_translations.push_back(canonical);
    }
  }

  // Match rule: an LLM translation equal (case-insensitive, NFC, trimmed) to
  // a primary candidate selects that primary's surface form. Several matches
  // resolve to the largest group, then provider priority, then text.
  const PrimaryGroup* matched = nullptr;
  for (const auto& translation : llm_translations) {
    auto hit = groups_by_key.find(text::match_key(translation));
    if (hit == groups_by_key.end()) continue;
    for (std::size_t idx : hit->second) {
      const PrimaryGroup& g = groups[idx];
      if (matched == nullptr || g.size > matched->size ||
          (g.size == matched->size && g.best_rank < matched->best_rank) ||
          (g.size == matched->size && g.best_rank == matched->best_rank &&
           g.surface < matched->surface)) {
        matched = &g;
      }
    }
  }
  if (matched != nullptr) {
    out.final_text = matched->surface;
    out.route = RefineRoute::llm_translation_matched;
    return out;
  }

  // Step 2: selection over primaries plus LLM translations. Skipped when the
  // model was unreachable for every label or fewer than two options exist.
  const bool llm_reachable = labels.empty() || transport_failures < labels.size();
  std::vector<std::string> options = primary_surfaces;
  for (const auto& t : llm_translations) {
    if (std::find(options.begin(), options.end(), t) == options.end()) options.push_back(t);
  }
  if (llm_reachable && options.size() >= 2) {
    const std::string& source_text = labels.empty() ? primary_surfaces.front() : labels[0].text;
    Prompt prompt = build_selection_prompt(target_lang, options, source_text, ctx,
                                           cfg.supports_system_prompt);
    out.llm_calls = 2;
    if (auto raw = run_stage("selection", prompt)) {
      if (auto parsed = parse_llm_output(*raw, options)) {
        const std::string key = text::match_key(*parsed);
        for (const auto& option : options) {
          if (text::match_key(option) == key) {
            out.final_text = option;
            out.route = RefineRoute::llm_selection;
            return out;
          }
        }
      }
    }
  }

  // Step 3: frequency fallback.
  out.final_text = consensus::fallback_pick(primary_candidates, priority);
  out.route = RefineRoute::frequency_fallback;
  return out;
}

}  // namespace wokie::llm
