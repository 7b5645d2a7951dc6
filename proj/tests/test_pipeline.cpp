#include <doctest.h>

#include <atomic>
#include <thread>

#include "wokie/mock_providers.hpp"
#include "wokie/pipeline.hpp"

using namespace wokie::pipeline;
using namespace wokie::providers;
namespace skos = wokie::skos;
namespace llm = wokie::llm;

namespace {

const std::string kFixtures = WOKIE_FIXTURE_DIR;

skos::Term monolingual_term(const std::string& iri, const std::string& text,
                            const std::string& lang) {
  skos::Term t;
  t.iri = iri;
  t.labels[lang] = {text};
  return t;
}

PipelineConfig base_config(std::vector<std::string> order) {
  PipelineConfig cfg;
  cfg.target_lang = "de";
  cfg.provider_order = std::move(order);
  cfg.llm.reset();
  return cfg;
}

// Eight providers that all answer with provider-specific spellings.
void register_suffix_providers(ProviderHub& hub, int count = 8) {
  for (int i = 1; i <= count; ++i) {
    const std::string id = "mock_p" + std::to_string(i);
    hub.register_provider(std::make_shared<ScriptedProvider>(
        id, [id](const std::string& text, const std::string&, const std::string&)
            -> TranslateResult { return text + "-" + id; }));
  }
}

std::vector<std::string> provider_ids(int count = 8) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back("mock_p" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("config validation enforces ranges") {
  PipelineConfig cfg = base_config({});
  cfg.threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.threshold = 1.0;
  cfg.min_translations = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.min_translations = 5;
  cfg.target_lang = "not a tag";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.target_lang = "de";
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("threshold times min translations below three warns") {
  PipelineConfig cfg = base_config({});
  cfg.threshold = 0.4;
  cfg.min_translations = 5;
  auto warnings = cfg.warnings();
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("below 3") != std::string::npos);
  cfg.threshold = 0.6;
  CHECK(cfg.warnings().empty());
}

TEST_CASE("monolingual term queries five providers for min 5") {
  ProviderHub hub;
  register_suffix_providers(hub);
  PipelineConfig cfg = base_config(provider_ids());
  cfg.min_translations = 5;
  skos::Term term = monolingual_term("http://e/c", "gloss", "en");
  auto candidates = gather_candidates(term, cfg, hub);
  CHECK(candidates.size() == 5);
  CHECK(candidates[0].provider_id == "mock_p1");
  CHECK(candidates[4].provider_id == "mock_p5");
  CHECK(hub.network_calls() == 5);
}

TEST_CASE("five source languages are satisfied by a single provider") {
  ProviderHub hub;
  register_suffix_providers(hub);
  PipelineConfig cfg = base_config(provider_ids());
  cfg.min_translations = 5;
  skos::Term term;
  term.iri = "http://e/multi";
  term.labels["en"] = {"gloss"};
  term.labels["fr"] = {"glose"};
  term.labels["es"] = {"glosa"};
  term.labels["it"] = {"glossa"};
  term.labels["pt"] = {"glosa marginal"};
  auto candidates = gather_candidates(term, cfg, hub);
  CHECK(candidates.size() == 5);
  for (const auto& c : candidates) CHECK(c.provider_id == "mock_p1");
}

TEST_CASE("gathering reports labels no provider could translate") {
  ProviderHub hub;
  // p_en translates only English; nothing handles French.
  hub.register_provider(std::make_shared<ScriptedProvider>(
      "p_en",
      [](const std::string& text, const std::string&, const std::string&) -> TranslateResult {
        return text + "-de";
      },
      [](std::string_view src, std::string_view) { return src == "en"; }));
  PipelineConfig cfg = base_config({"p_en"});
  cfg.min_translations = 1;
  skos::Term term;
  term.iri = "http://e/c";
  term.labels["en"] = {"gloss"};
  term.labels["fr"] = {"glose"};
  std::vector<UncoveredLabel> uncovered;
  auto candidates = gather_candidates(term, cfg, hub, &uncovered);
  CHECK(candidates.size() == 1);
  REQUIRE(uncovered.size() == 1);
  CHECK(uncovered[0].lang == "fr");
  CHECK(uncovered[0].text == "glose");
}

TEST_CASE("failing providers are skipped, gathering continues") {
  ProviderHub hub;
  hub.register_provider(std::make_shared<ScriptedProvider>(
      "down", [](const std::string&, const std::string&, const std::string&)
          -> TranslateResult {
        return ProviderError{ErrorKind::auth, "down", "no key", std::nullopt};
      }));
  register_suffix_providers(hub, 2);
  PipelineConfig cfg = base_config({"down", "mock_p1", "mock_p2"});
  cfg.min_translations = 2;
  skos::Term term = monolingual_term("http://e/c", "gloss", "en");
  std::vector<UncoveredLabel> uncovered;
  auto candidates = gather_candidates(term, cfg, hub, &uncovered);
  CHECK(candidates.size() == 2);
  CHECK(uncovered.empty());
}

TEST_CASE("translate_term accepts by frequency and keeps provenance") {
  ProviderHub hub;
  for (int i = 1; i <= 5; ++i) {
    const std::string id = "mock_p" + std::to_string(i);
    const bool agree = i <= 3;
    hub.register_provider(std::make_shared<ScriptedProvider>(
        id, [agree, id](const std::string&, const std::string&, const std::string&)
            -> TranslateResult {
          return std::string(agree ? "Analyse" : "Variante-" + id);
        }));
  }
  PipelineConfig cfg = base_config(provider_ids(5));
  cfg.threshold = 0.6;
  cfg.min_translations = 5;
  skos::Term term = monolingual_term("http://e/analyzing", "Analyzing", "en");
  TermOutcome outcome = translate_term(term, cfg, hub, nullptr);
  CHECK(outcome.route == TermRoute::accepted_by_frequency);
  CHECK(outcome.final_text == "Analyse");
  CHECK(outcome.confidence == doctest::Approx(0.6));
  CHECK(outcome.best_provider == "mock_p1");
  CHECK(outcome.llm_calls == 0);
}

TEST_CASE("translate_term skips terms that already carry the target language") {
  ProviderHub hub;
  register_suffix_providers(hub, 1);
  PipelineConfig cfg = base_config(provider_ids(1));
  skos::Term term = monolingual_term("http://e/c", "gloss", "en");
  term.labels["de"] = {"Glosse"};
  TermOutcome outcome = translate_term(term, cfg, hub, nullptr);
  CHECK(outcome.route == TermRoute::skipped_existing);
  CHECK(!outcome.final_text.has_value());
  CHECK(hub.network_calls() == 0);

  cfg.skip_existing = false;
  TermOutcome forced = translate_term(term, cfg, hub, nullptr);
  CHECK(forced.route != TermRoute::skipped_existing);
  CHECK(forced.final_text.has_value());
}

TEST_CASE("translate_term marks terms without candidates untranslated") {
  ProviderHub hub;
  hub.register_provider(std::make_shared<ScriptedProvider>(
      "down", [](const std::string&, const std::string&, const std::string&)
          -> TranslateResult {
        return ProviderError{ErrorKind::network, "down", "boom", std::nullopt};
      }));
  PipelineConfig cfg = base_config({"down"});
  RetryPolicy no_sleep;
  no_sleep.sleeper = [](std::chrono::milliseconds) {};
  hub.set_retry_policy(no_sleep);
  skos::Term term = monolingual_term("http://e/c", "gloss", "en");
  TermOutcome outcome = translate_term(term, cfg, hub, nullptr);
  CHECK(outcome.route == TermRoute::untranslated);
  CHECK(!outcome.final_text.has_value());
  REQUIRE(outcome.uncovered.size() == 1);
}

TEST_CASE("untagged labels are skipped unless assume-source-lang is given") {
  ProviderHub hub;
  register_suffix_providers(hub, 1);
  PipelineConfig cfg = base_config(provider_ids(1));
  cfg.min_translations = 1;
  skos::Term term;
  term.iri = "http://e/c";
  term.labels["und"] = {"plain label"};

  TermOutcome skipped = translate_term(term, cfg, hub, nullptr);
  CHECK(skipped.route == TermRoute::untranslated);
  REQUIRE(skipped.warnings.size() == 1);
  CHECK(skipped.warnings[0].find("untagged") != std::string::npos);

  cfg.assume_source_lang = "en";
  TermOutcome translated = translate_term(term, cfg, hub, nullptr);
  CHECK(translated.route != TermRoute::untranslated);
  CHECK(translated.final_text == "plain label-mock_p1");
}

TEST_CASE("disagreeing candidates with an LLM take the refinement routes") {
  ProviderHub hub;
  register_suffix_providers(hub, 4);  // four distinct answers
  PipelineConfig cfg = base_config(provider_ids(4));
  cfg.min_translations = 4;
  cfg.llm = llm::LlmConfig{};
  cfg.llm->sleeper = [](std::chrono::milliseconds) {};
  skos::Term term = monolingual_term("http://e/c", "gloss", "en");

  llm::ScriptedLlm matching({"gloss-mock_p2"});
  TermOutcome outcome = translate_term(term, cfg, hub, &matching);
  CHECK(outcome.route == TermRoute::llm_translation_matched);
  CHECK(outcome.final_text == "gloss-mock_p2");
  CHECK(outcome.llm_calls == 1);
  CHECK(outcome.exchanges.size() == 1);
}

TEST_CASE("no LLM configured falls back to frequency") {
  ProviderHub hub;
  register_suffix_providers(hub, 4);
  PipelineConfig cfg = base_config(provider_ids(4));
  cfg.min_translations = 4;
  skos::Term term = monolingual_term("http://e/c", "gloss", "en");
  TermOutcome outcome = translate_term(term, cfg, hub, nullptr);
  CHECK(outcome.route == TermRoute::frequency_fallback);
  CHECK(outcome.final_text == "gloss-mock_p1");
}

TEST_CASE("translate_thesaurus enriches the graph as a strict superset") {
  skos::Thesaurus input = skos::parse_thesaurus(kFixtures + "/tadirah.ttl");
  auto [stripped, removed] = skos::strip_language(input, "de", skos::LabelProperty::pref_label());

  ProviderHub hub;
  hub.register_provider(
      DictionaryProvider::from_json_file("mock_dict", kFixtures + "/tadirah_wokie_de.json"));
  PipelineConfig cfg = base_config({"mock_dict"});
  cfg.min_translations = 1;

  auto [enriched, report] = translate_thesaurus(stripped, cfg, hub, nullptr);
  CHECK(report.terms == 42);
  CHECK(report.route_counts.at("accepted_by_frequency") == 42);
  CHECK(enriched.graph.is_superset_of(stripped.graph));
  CHECK(enriched.graph.size() == stripped.graph.size() + 42);
  auto labels = skos::labels_of(enriched, "https://vocabs.dariah.eu/tadirah/analyzing",
                                skos::LabelProperty::pref_label(), "de");
  CHECK(labels == std::vector<std::string>{"Analyse"});
}

TEST_CASE("second run over an enriched thesaurus skips everything") {
  skos::Thesaurus input = skos::parse_thesaurus(kFixtures + "/tadirah.ttl");
  auto [stripped, removed] = skos::strip_language(input, "de", skos::LabelProperty::pref_label());
  ProviderHub hub;
  hub.register_provider(
      DictionaryProvider::from_json_file("mock_dict", kFixtures + "/tadirah_wokie_de.json"));
  PipelineConfig cfg = base_config({"mock_dict"});
  cfg.min_translations = 1;

  auto [enriched, first] = translate_thesaurus(stripped, cfg, hub, nullptr);
  auto [second_graph, second] = translate_thesaurus(enriched, cfg, hub, nullptr);
  CHECK(second.route_counts.at("skipped_existing") == 42);
  CHECK(second.route_counts.size() == 1);
  CHECK(second_graph.graph == enriched.graph);
}

TEST_CASE("mark_generated annotates written labels") {
  skos::Thesaurus input = skos::parse_thesaurus(kFixtures + "/tadirah.ttl");
  auto [stripped, removed] = skos::strip_language(input, "de", skos::LabelProperty::pref_label());
  ProviderHub hub;
  hub.register_provider(
      DictionaryProvider::from_json_file("mock_dict", kFixtures + "/tadirah_wokie_de.json"));
  PipelineConfig cfg = base_config({"mock_dict"});
  cfg.min_translations = 1;
  cfg.mark_generated = true;
  auto [enriched, report] = translate_thesaurus(stripped, cfg, hub, nullptr);
  auto notes = enriched.graph.objects(
      wokie::rdf::Node::iri("https://vocabs.dariah.eu/tadirah/analyzing"),
      wokie::rdf::Node::iri(skos::props::editorial_note));
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].value == kGeneratedNote);
}

TEST_CASE("concurrent processing respects the in-flight bound") {
  ProviderHub hub;
  std::atomic<int> inflight{0};
  std::atomic<int> peak{0};
  hub.register_provider(std::make_shared<ScriptedProvider>(
      "counting", [&](const std::string& text, const std::string&, const std::string&)
          -> TranslateResult {
        const int now = inflight.fetch_add(1) + 1;
        int expected = peak.load();
        while (now > expected && !peak.compare_exchange_weak(expected, now)) {
        }
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        inflight.fetch_sub(1);
        return text + "-x";
      }));

  skos::Thesaurus input;
  for (int i = 0; i < 64; ++i) {
    const std::string iri = "http://e/c" + std::to_string(i);
    input.graph.insert({wokie::rdf::Node::iri(iri),
                        wokie::rdf::Node::iri(skos::props::pref_label),
                        wokie::rdf::Node::literal("term " + std::to_string(i), "en")});
  }
  PipelineConfig cfg = base_config({"counting"});
  cfg.min_translations = 1;
  cfg.max_inflight = 4;
  auto [enriched, report] = translate_thesaurus(input, cfg, hub, nullptr);
  CHECK(report.terms == 64);
  CHECK(peak.load() <= 4);
  CHECK(report.route_counts.at("frequency_fallback") == 64);
}

TEST_CASE("run report aggregates counts and timings") {
  skos::Thesaurus input = skos::parse_thesaurus(kFixtures + "/tadirah.ttl");
  auto [stripped, removed] = skos::strip_language(input, "de", skos::LabelProperty::pref_label());
  ProviderHub hub;
  hub.register_provider(
      DictionaryProvider::from_json_file("mock_dict", kFixtures + "/tadirah_wokie_de.json"));
  PipelineConfig cfg = base_config({"mock_dict"});
  cfg.min_translations = 1;
  auto [enriched, report] = translate_thesaurus(stripped, cfg, hub, nullptr);
  CHECK(report.provider_calls == 42);
  CHECK(report.llm_requests == 0);
  CHECK(report.total_seconds > 0.0);
  const std::string json = report.to_json();
  CHECK(json.find("\"accepted_by_frequency\": 42") != std::string::npos);
  const std::string table = report.to_table();
  CHECK(table.find("terms processed:   42") != std::string::npos);
}

TEST_CASE("unknown provider id in the order fails before any call") {
  ProviderHub hub;
  register_suffix_providers(hub, 1);
  skos::Thesaurus input = skos::parse_thesaurus(kFixtures + "/small3.ttl");
  PipelineConfig cfg = base_config({"mock_p1", "not_registered"});
  CHECK_THROWS_WITH_AS(translate_thesaurus(input, cfg, hub, nullptr),
                       "unknown provider: not_registered", ConfigError);
  CHECK(hub.network_calls() == 0);
}
