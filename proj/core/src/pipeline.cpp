#include "wokie/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "wokie/text.hpp"

namespace wokie::pipeline {

using nlohmann::json;
using providers::TranslationCandidate;

void PipelineConfig::validate() const {
  if (target_lang.empty() || !skos::well_formed_tag(target_lang)) {
    throw ConfigError("target language tag is missing or malformed; valid tags look like "
                      "'de' or 'en-gb'");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold must be in (0, 1], got " + std::to_string(threshold));
  }
  if (min_translations < 1) {
    throw ConfigError("min-translations must be >= 1, got " +
                      std::to_string(min_translations));
  }
  if (max_inflight < 1) {
    throw ConfigError("max-inflight must be >= 1, got " + std::to_string(max_inflight));
  }
  if (assume_source_lang && !skos::well_formed_tag(*assume_source_lang)) {
    throw ConfigError("assume-source-lang tag is malformed: " + *assume_source_lang);
  }
  if (llm && llm->temperature < 0.0) {
    throw ConfigError("LLM temperature must be >= 0");
  }
}

std::vector<std::string> PipelineConfig::warnings() const {
  std::vector<std::string> out;
  if (threshold * min_translations < 3.0) {
    std::ostringstream msg;
    msg << "threshold (" << threshold << ") x min-translations (" << min_translations
        << ") = " << threshold * min_translations
        << " is below 3; at least three agreeing candidates are recommended for direct "
           "acceptance";
    out.push_back(msg.str());
  }
  return out;
}

std::string_view to_string(TermRoute route) {
  switch (route) {
    case TermRoute::accepted_by_frequency: return "accepted_by_frequency";
    case TermRoute::llm_translation_matched: return "llm_translation_matched";
    case TermRoute::llm_selection: return "llm_selection";
    case TermRoute::frequency_fallback: return "frequency_fallback";
    case TermRoute::untranslated: return "untranslated";
    case TermRoute::skipped_existing: return "skipped_existing";
  }
  return "unknown";
}

namespace {

struct SourceLabels {
  std::vector<llm::SourceLabel> labels;
  std::vector<std::string> warnings;
};

SourceLabels collect_source_labels(const skos::Term& term, const PipelineConfig& cfg) {
  SourceLabels out;
  const std::string target = skos::primary_subtag(cfg.target_lang);
  for (const auto& [lang, texts] : term.labels) {
    std::string effective = lang;
    if (lang == "und") {
      if (!cfg.assume_source_lang) {
        out.warnings.push_back("term " + term.iri + " has " + std::to_string(texts.size()) +
                               " untagged label(s); skipped (use --assume-source-lang to "
                               "include them)");
        continue;
      }
      effective = skos::primary_subtag(*cfg.assume_source_lang);
    }
    if (effective == target) continue;
    for (const auto& text : texts) out.labels.push_back({text, effective});
  }
  return out;
}

llm::PromptContext make_context(const skos::Term& term, const skos::Thesaurus* thesaurus,
                                const PipelineConfig& cfg,
                                const std::string& first_source_lang) {
  llm::PromptContext ctx;
  if (!term.definitions.empty()) {
    auto it = term.definitions.find(first_source_lang);
    if (it == term.definitions.end()) it = term.definitions.find("en");
    if (it == term.definitions.end()) it = term.definitions.begin();
    ctx.term_description = it->second;
  }
  if (thesaurus != nullptr && thesaurus->scheme_description) {
    ctx.scheme_description = thesaurus->scheme_description;
  }
  if (cfg.user_context) ctx.user_context = cfg.user_context;
  return ctx;
}

TermOutcome resolve_term(const skos::Term& term, const PipelineConfig& cfg,
                         providers::ProviderHub& hub, llm::LlmClient* client,
                         const skos::Thesaurus* thesaurus,
                         const std::vector<std::string>& order) {
  TermOutcome outcome;
  outcome.iri = term.iri;

  const std::string target = skos::primary_subtag(cfg.target_lang);
  if (cfg.skip_existing && term.labels.count(target) > 0) {
    outcome.route = TermRoute::skipped_existing;
    return outcome;
  }

  SourceLabels sources = collect_source_labels(term, cfg);
  outcome.warnings = sources.warnings;
  if (sources.labels.empty()) {
    outcome.route = TermRoute::untranslated;
    return outcome;
  }

  const auto gather_start = std::chrono::steady_clock::now();
  outcome.candidates = gather_candidates(term, cfg, hub, &outcome.uncovered);
  outcome.gather_time = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - gather_start);
  if (outcome.candidates.empty()) {
    outcome.route = TermRoute::untranslated;
    return outcome;
  }

  consensus::ConsensusResult scored = consensus::score(outcome.candidates, cfg.threshold, order);
  outcome.confidence = scored.confidence;
  outcome.best_provider = scored.best_provider;
  if (scored.route == consensus::Route::accepted_by_frequency) {
    outcome.final_text = scored.best;
    outcome.route = TermRoute::accepted_by_frequency;
    return outcome;
  }

  if (client != nullptr && cfg.llm) {
    const auto refine_start = std::chrono::steady_clock::now();
    llm::PromptContext ctx = make_context(term, thesaurus, cfg, sources.labels.front().lang);
    llm::RefinementOutcome refined = llm::refine(sources.labels, outcome.candidates,
                                                 cfg.target_lang, ctx, *cfg.llm, *client, order);
    outcome.refine_time = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - refine_start);
    outcome.final_text = refined.final_text;
    outcome.llm_calls = refined.llm_calls;
    outcome.exchanges = std::move(refined.exchanges);
    switch (refined.route) {
      case llm::RefineRoute::llm_translation_matched:
        outcome.route = TermRoute::llm_translation_matched;
        break;
      case llm::RefineRoute::llm_selection:
        outcome.route = TermRoute::llm_selection;
        break;
      case llm::RefineRoute::frequency_fallback:
        outcome.route = TermRoute::frequency_fallback;
        break;
    }
    return outcome;
  }

  outcome.final_text = consensus::fallback_pick(outcome.candidates, order);
  outcome.route = TermRoute::frequency_fallback;
  return outcome;
}

}  // namespace

std::vector<TranslationCandidate> gather_candidates(const skos::Term& term,
                                                    const PipelineConfig& cfg,
                                                    providers::ProviderHub& hub,
                                                    std::vector<UncoveredLabel>* uncovered) {
  SourceLabels sources = collect_source_labels(term, cfg);
  std::vector<TranslationCandidate> candidates;
  if (sources.labels.empty()) return candidates;

  const std::vector<std::string> order = hub.resolve_priority(cfg.provider_order);
  std::vector<int> successes(sources.labels.size(), 0);

  auto satisfied = [&] {
    if (static_cast<int>(candidates.size()) < cfg.min_translations) return false;
    return std::all_of(successes.begin(), successes.end(), [](int n) { return n > 0; });
  };

  for (const auto& provider_id : order) {
    if (satisfied()) break;
    for (std::size_t i = 0; i < sources.labels.size(); ++i) {
      const auto& label = sources.labels[i];
      if (!hub.supports(provider_id, label.lang, skos::primary_subtag(cfg.target_lang))) {
        continue;
      }
      auto result = hub.translate(provider_id, label.text, label.lang,
                                  skos::primary_subtag(cfg.target_lang));
      if (result.ok()) {
        candidates.push_back(result.value());
        successes[i] += 1;
      }
      // Errors are logged by the hub's counters and simply skipped here.
    }
  }

  if (uncovered != nullptr) {
    for (std::size_t i = 0; i < sources.labels.size(); ++i) {
      if (successes[i] == 0) {
        uncovered->push_back({term.iri, sources.labels[i].lang, sources.labels[i].text});
      }
    }
  }
  return candidates;
}

TermOutcome translate_term(const skos::Term& term, const PipelineConfig& cfg,
                           providers::ProviderHub& hub, llm::LlmClient* client) {
  cfg.validate();
  const std::vector<std::string> order = hub.resolve_priority(cfg.provider_order);
  return resolve_term(term, cfg, hub, client, nullptr, order);
}

void apply_outcome(skos::Thesaurus& t, const TermOutcome& outcome, const PipelineConfig& cfg) {
  if (!outcome.final_text) return;
  skos::add_translation(t, outcome.iri, cfg.prop, *outcome.final_text, cfg.target_lang);
  if (cfg.mark_generated) skos::add_editorial_note(t, outcome.iri, kGeneratedNote);
}

namespace {

void write_audit_log(const std::string& path, const std::vector<TermOutcome>& outcomes) {
  std::ofstream out(path, std::ios::app);
  if (!out) return;
  for (const auto& o : outcomes) {
    for (const auto& e : o.exchanges) {
      json j = {{"iri", o.iri},
                {"stage", e.stage},
                {"instructions", e.prompt.instructions},
                {"input", e.prompt.input},
                {"response", e.raw_response},
                {"transport_failed", e.transport_failed},
                {"route", std::string(to_string(o.route))}};
      out << j.dump() << "\n";
    }
  }
}

}  // namespace

std::pair<skos::Thesaurus, RunReport> translate_thesaurus(const skos::Thesaurus& t,
                                                          const PipelineConfig& cfg,
                                                          providers::ProviderHub& hub,
                                                          llm::LlmClient* client) {
  cfg.validate();
  const std::vector<std::string> order = hub.resolve_priority(cfg.provider_order);
  const auto run_start = std::chrono::steady_clock::now();
  const long calls_before = hub.network_calls();
  const long hits_before = hub.cache_hits();

  std::vector<skos::Term> terms = skos::extract_terms(t, cfg.prop);
  std::sort(terms.begin(), terms.end(),
            [](const skos::Term& a, const skos::Term& b) { return a.iri < b.iri; });

  std::vector<TermOutcome> outcomes(terms.size());
  const int workers =
      std::max(1, std::min<int>(cfg.max_inflight, static_cast<int>(terms.size())));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= terms.size()) break;
      outcomes[i] = resolve_term(terms[i], cfg, hub, client, &t, order);
      const std::size_t finished = done.fetch_add(1) + 1;
      if (cfg.progress) cfg.progress(finished, terms.size());
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Single-writer phase in deterministic IRI order.
  skos::Thesaurus enriched = t;
  for (const auto& outcome : outcomes) apply_outcome(enriched, outcome, cfg);

  RunReport report;
  report.terms = static_cast<int>(terms.size());
  report.warnings = cfg.warnings();
  long candidate_count = 0;
  for (const auto& o : outcomes) {
    report.route_counts[std::string(to_string(o.route))] += 1;
    report.llm_requests += o.llm_calls;
    if (o.llm_calls > 0) report.llm_terms += 1;
    report.gather_total_ms += static_cast<double>(o.gather_time.count()) / 1000.0;
    report.refine_total_ms += static_cast<double>(o.refine_time.count()) / 1000.0;
    candidate_count += static_cast<long>(o.candidates.size());
    for (const auto& u : o.uncovered) report.uncovered.push_back(u);
    for (const auto& w : o.warnings) report.warnings.push_back(w);
    for (const auto& e : o.exchanges) {
      report.llm_request_chars += e.prompt.instructions.size() + e.prompt.input.size();
      report.llm_response_chars += e.raw_response.size();
    }
  }
  report.provider_calls = hub.network_calls() - calls_before;
  report.cache_hits = hub.cache_hits() - hits_before;
  if (candidate_count > 0) {
    report.gather_avg_ms = report.gather_total_ms / static_cast<double>(candidate_count);
  }
  if (report.llm_terms > 0) {
    report.refine_avg_ms = report.refine_total_ms / static_cast<double>(report.llm_terms);
  }
  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();

  if (!cfg.audit_log_path.empty()) write_audit_log(cfg.audit_log_path, outcomes);

  return {std::move(enriched), std::move(report)};
}

std::string RunReport::to_json() const {
  json j;
  j["terms"] = terms;
  j["routes"] = route_counts;
  j["provider_calls"] = provider_calls;
  j["cache_hits"] = cache_hits;
  j["llm"] = {{"requests", llm_requests},
              {"terms_refined", llm_terms},
              {"request_chars", llm_request_chars},
              {"response_chars", llm_response_chars}};
  j["timings"] = {{"gather_total_ms", gather_total_ms},
                  {"refine_total_ms", refine_total_ms},
                  {"gather_avg_ms_per_candidate", gather_avg_ms},
                  {"refine_avg_ms_per_term", refine_avg_ms},
                  {"total_seconds", total_seconds}};
  json unc = json::array();
  for (const auto& u : uncovered) {
    unc.push_back({{"iri", u.iri}, {"lang", u.lang}, {"text", u.text}});
  }
  j["uncovered_labels"] = std::move(unc);
  j["warnings"] = warnings;
  return j.dump(2);
}

std::string RunReport::to_table() const {
  std::ostringstream out;
  out << "terms processed:   " << terms << "\n";
  for (const auto& [route, count] : route_counts) {
    out << "  " << route << ": " << count << "\n";
  }
  out << "provider calls:    " << provider_calls << " (+" << cache_hits << " cache hits)\n";
  out << "llm requests:      " << llm_requests << " over " << llm_terms << " terms\n";
  out << "avg gather/cand:   " << gather_avg_ms << " ms\n";
  out << "avg refine/term:   " << refine_avg_ms << " ms\n";
  out << "total time:        " << total_seconds << " s\n";
  if (!uncovered.empty()) out << "uncovered labels:  " << uncovered.size() << "\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace wokie::pipeline
