#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wokie/consensus.hpp"
#include "wokie/llm.hpp"
#include "wokie/providers.hpp"
#include "wokie/skos.hpp"

namespace wokie::pipeline {

using providers::ConfigError;

struct PipelineConfig {
  std::string target_lang;
  skos::LabelProperty prop = skos::LabelProperty::pref_label();
  double threshold = 0.6;
  int min_translations = 5;
  std::vector<std::string> provider_order;  // empty = registered defaults
  std::optional<llm::LlmConfig> llm;        // absent = frequency fallback only
  bool skip_existing = true;
  int max_inflight = 8;
  bool mark_generated = false;
  std::optional<std::string> user_context;
  std::optional<std::string> assume_source_lang;  // language for untagged labels
  std::string audit_log_path;
  std::function<void(std::size_t done, std::size_t total)> progress;  // optional

  /// Throws ConfigError on invalid values; call before any network use.
  void validate() const;
  /// Non-fatal issues, e.g. threshold * min_translations below three.
  std::vector<std::string> warnings() const;
};

inline const std::string kGeneratedNote = "machine-translated by WOKIE-style pipeline";

enum class TermRoute {
  accepted_by_frequency,
  llm_translation_matched,
  llm_selection,
  frequency_fallback,
  untranslated,
  skipped_existing,
};

std::string_view to_string(TermRoute route);

struct UncoveredLabel {
  std::string iri;
  std::string lang;
  std::string text;
};

struct TermOutcome {
  std::string iri;
  std::optional<std::string> final_text;  // absent iff untranslated / skipped
  TermRoute route = TermRoute::untranslated;
  std::vector<providers::TranslationCandidate> candidates;
  double confidence = 0.0;
  std::string best_provider;
  int llm_calls = 0;
  std::chrono::microseconds gather_time{0};
  std::chrono::microseconds refine_time{0};
  std::vector<UncoveredLabel> uncovered;
  std::vector<llm::LlmExchange> exchanges;
  std::vector<std::string> warnings;
};

struct RunReport {
  int terms = 0;
  std::map<std::string, int> route_counts;
  long provider_calls = 0;
  long cache_hits = 0;
  long llm_requests = 0;   // individual model calls
  long llm_terms = 0;      // terms that entered refinement
  std::size_t llm_request_chars = 0;
  std::size_t llm_response_chars = 0;
  double gather_total_ms = 0.0;
  double refine_total_ms = 0.0;
  double gather_avg_ms = 0.0;  // micro average per gathered candidate
  double refine_avg_ms = 0.0;  // micro average per refined term
  double total_seconds = 0.0;
  std::vector<UncoveredLabel> uncovered;
  std::vector<std::string> warnings;

  std::string to_json() const;
  std::string to_table() const;
};

/// Queries providers in priority order until the minimum candidate count is
/// reached and every source label has at least one translation. Provider
/// failures are skipped; labels nothing could translate are reported.
std::vector<providers::TranslationCandidate> gather_candidates(
    const skos::Term& term, const PipelineConfig& cfg, providers::ProviderHub& hub,
    std::vector<UncoveredLabel>* uncovered = nullptr);

/// Full per-term decision: skip, gather, score, refine or fall back. Pure
/// with respect to the thesaurus; writes happen in translate_thesaurus's
/// single-writer phase (or via apply_outcome).
TermOutcome translate_term(const skos::Term& term, const PipelineConfig& cfg,
                           providers::ProviderHub& hub, llm::LlmClient* client);

/// Writes an outcome's final text (and provenance note) into the graph.
void apply_outcome(skos::Thesaurus& t, const TermOutcome& outcome, const PipelineConfig& cfg);

/// Translates every term; terms are processed concurrently up to
/// cfg.max_inflight and written back in IRI-sorted order.
std::pair<skos::Thesaurus, RunReport> translate_thesaurus(const skos::Thesaurus& t,
                                                          const PipelineConfig& cfg,
                                                          providers::ProviderHub& hub,
                                                          llm::LlmClient* client);

}  // namespace wokie::pipeline
