#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wokie/config.hpp"
#include "wokie/embeddings.hpp"
#include "wokie/http_provider.hpp"
#include "wokie/llm.hpp"
#include "wokie/mock_providers.hpp"
#include "wokie/pipeline.hpp"
#include "wokie/providers.hpp"
#include "wokie/simeval.hpp"
#include "wokie/skos.hpp"

namespace {

using wokie::config::ConfigFile;
using wokie::providers::ConfigError;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitParse = 2;
constexpr int kExitUntranslated = 3;

std::string default_cache_path() {
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg != nullptr && *xdg != '\0') {
    return std::string(xdg) + "/wokie/translations.jsonl";
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return std::string(home) + "/.cache/wokie/translations.jsonl";
  }
  return "wokie-translations.jsonl";
}

wokie::skos::LabelProperty parse_prop(const std::string& name) {
  std::string lowered = name;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lowered == "preflabel") return wokie::skos::LabelProperty::pref_label();
  if (lowered == "altlabel") return wokie::skos::LabelProperty::alt_label();
  if (lowered == "definition") return wokie::skos::LabelProperty::definition();
  if (name.find("://") != std::string::npos) return {name};
  throw ConfigError("unknown label property: " + name +
                    " (use prefLabel, altLabel, definition or an absolute IRI)");
}

wokie::rdf::Format parse_format(const std::string& name) {
  if (name == "turtle" || name == "ttl") return wokie::rdf::Format::turtle;
  if (name == "rdfxml" || name == "rdf" || name == "xml") return wokie::rdf::Format::rdfxml;
  if (name == "auto" || name.empty()) return wokie::rdf::Format::autodetect;
  throw ConfigError("unknown RDF format: " + name);
}

// ---------------------------------------------------------------------------
// Flag bundles shared by translate and evaluate
// ---------------------------------------------------------------------------

struct TranslateFlags {
  std::string input;
  std::string target_lang;
  std::string prop = "prefLabel";
  double threshold = 0.6;
  int min_translations = 5;
  std::vector<std::string> providers;
  std::string llm_model;
  std::string llm_endpoint;
  bool no_llm = false;
  bool force = false;
  bool mark_generated = false;
  std::string audit_log;
  std::string out;
  std::string out_format = "auto";
  std::string config_path;
  std::string report_path;
  std::string cache_path;
  std::string user_context;
  std::string assume_source_lang;
  int max_inflight = 8;

  CLI::Option* threshold_opt = nullptr;
  CLI::Option* min_opt = nullptr;
  CLI::Option* providers_opt = nullptr;
  CLI::Option* inflight_opt = nullptr;
  CLI::Option* target_opt = nullptr;
};

void add_translate_flags(CLI::App& cmd, TranslateFlags& f, bool input_required) {
  auto* input = cmd.add_option("input", f.input, "Input thesaurus (.ttl, .rdf, .xml)");
  if (input_required) input->required();
  f.target_opt = cmd.add_option("--target-lang", f.target_lang,
                                "Target language tag, e.g. de or en-gb");
  cmd.add_option("--prop", f.prop,
                 "Label property to translate: prefLabel, altLabel, definition or IRI")
      ->capture_default_str();
  f.threshold_opt =
      cmd.add_option("--threshold", f.threshold,
                     "Confidence threshold in (0,1] gating LLM refinement (default 0.6)")
          ->capture_default_str();
  f.min_opt = cmd.add_option("--min-translations", f.min_translations,
                             "Minimum number of primary candidates per term (default 5)")
                  ->capture_default_str();
  f.providers_opt = cmd.add_option(
      "--providers", f.providers,
      "Provider priority order (comma separated). Default: lingvanex, google, modernmt, "
      "microsoft, yandex, argos, reverso, pons")
      ->delimiter(',');
  cmd.add_option("--llm-model", f.llm_model,
                 "LLM model id for refinement (default gemini-2.0-flash)");
  cmd.add_option("--llm-endpoint", f.llm_endpoint,
                 "Chat-completions endpoint URL for the LLM adapter");
  cmd.add_flag("--no-llm", f.no_llm, "Disable LLM refinement (frequency fallback only)");
  cmd.add_flag("--force", f.force, "Re-translate terms that already have a target label");
  cmd.add_flag("--mark-generated", f.mark_generated,
               "Annotate written labels with an editorial note flagging machine translation");
  cmd.add_option("--audit-log", f.audit_log, "Append LLM prompts/responses as JSON lines");
  cmd.add_option("--out", f.out, "Output file for the enriched thesaurus (default stdout)");
  cmd.add_option("--format", f.out_format, "Output format: turtle, rdfxml or auto")
      ->capture_default_str();
  cmd.add_option("--config", f.config_path, "Config file (flat key=value with sections)");
  cmd.add_option("--report", f.report_path, "Write the JSON run report to this file");
  cmd.add_option("--cache", f.cache_path, "Persistent translation cache (JSON lines)");
  cmd.add_option("--user-context", f.user_context,
                 "Extra context text embedded into LLM prompts");
  cmd.add_option("--assume-source-lang", f.assume_source_lang,
                 "Treat untagged labels as this language (they are skipped otherwise)");
  f.inflight_opt = cmd.add_option("--max-inflight", f.max_inflight,
                                  "Concurrent in-flight terms (default 8)")
                       ->capture_default_str();
}

// Precedence: flag beats config file beats built-in default.
wokie::pipeline::PipelineConfig build_pipeline_config(const TranslateFlags& f,
                                                      const ConfigFile& file) {
  wokie::pipeline::PipelineConfig cfg;

  if (auto v = file.get("pipeline", "target_lang")) cfg.target_lang = *v;
  if (f.target_opt != nullptr && f.target_opt->count() > 0) cfg.target_lang = f.target_lang;

  std::string prop = f.prop;
  if (auto v = file.get("pipeline", "prop"); v && f.prop == "prefLabel") prop = *v;
  cfg.prop = parse_prop(prop);

  if (auto v = file.get_double("pipeline", "threshold")) cfg.threshold = *v;
  if (f.threshold_opt != nullptr && f.threshold_opt->count() > 0) cfg.threshold = f.threshold;

  if (auto v = file.get_int("pipeline", "min_translations")) {
    cfg.min_translations = static_cast<int>(*v);
  }
  if (f.min_opt != nullptr && f.min_opt->count() > 0) cfg.min_translations = f.min_translations;

  if (auto v = file.get_list("pipeline", "providers")) cfg.provider_order = *v;
  if (f.providers_opt != nullptr && f.providers_opt->count() > 0) {
    cfg.provider_order = f.providers;
  }

  if (auto v = file.get_bool("pipeline", "skip_existing")) cfg.skip_existing = *v;
  if (f.force) cfg.skip_existing = false;

  if (auto v = file.get_int("pipeline", "max_inflight")) {
    cfg.max_inflight = static_cast<int>(*v);
  }
  if (f.inflight_opt != nullptr && f.inflight_opt->count() > 0) {
    cfg.max_inflight = f.max_inflight;
  }

  if (auto v = file.get_bool("pipeline", "mark_generated")) cfg.mark_generated = *v;
  if (f.mark_generated) cfg.mark_generated = true;

  if (auto v = file.get("pipeline", "user_context")) cfg.user_context = *v;
  if (!f.user_context.empty()) cfg.user_context = f.user_context;

  if (auto v = file.get("pipeline", "assume_source_lang")) cfg.assume_source_lang = *v;
  if (!f.assume_source_lang.empty()) cfg.assume_source_lang = f.assume_source_lang;

  if (auto v = file.get("pipeline", "audit_log")) cfg.audit_log_path = *v;
  if (!f.audit_log.empty()) cfg.audit_log_path = f.audit_log;

  if (!f.no_llm) {
    wokie::llm::LlmConfig llm;
    if (auto v = file.get("llm", "model")) llm.model_id = *v;
    if (!f.llm_model.empty()) llm.model_id = f.llm_model;
    if (auto v = file.get("llm", "endpoint")) llm.endpoint = *v;
    if (!f.llm_endpoint.empty()) llm.endpoint = f.llm_endpoint;
    if (auto v = file.get_double("llm", "temperature")) llm.temperature = *v;
    if (auto v = file.get_int("llm", "max_retries")) llm.max_retries = static_cast<int>(*v);
    if (auto v = file.get_int("llm", "timeout_ms")) {
      llm.timeout = std::chrono::milliseconds(*v);
    }
    if (auto v = file.get_bool("llm", "supports_system_prompt")) {
      llm.supports_system_prompt = *v;
    }
    if (auto v = file.get("llm", "api_key_env")) llm.api_key_env = *v;
    cfg.llm = std::move(llm);
  }
  return cfg;
}

std::string cache_path_from(const TranslateFlags& f, const ConfigFile& file) {
  if (!f.cache_path.empty()) return f.cache_path;
  if (auto v = file.get("pipeline", "cache_file")) return *v;
  return {};  // in-memory only
}

// Registers the eight built-in service stubs plus any mock providers named
// in the priority order or configured in [provider.*] sections.
void register_providers(wokie::providers::ProviderHub& hub, const ConfigFile& file,
                        const std::vector<std::string>& requested) {
  using namespace wokie::providers;

  auto section_for = [&](const std::string& id) { return file.section("provider." + id); };

  for (HttpServiceConfig stub : builtin_service_stubs()) {
    if (const auto* sec = section_for(stub.id)) {
      if (auto it = sec->find("endpoint"); it != sec->end()) stub.endpoint = it->second;
      if (auto it = sec->find("result_pointer"); it != sec->end()) {
        stub.result_pointer = it->second;
      }
      if (auto it = sec->find("body_template"); it != sec->end()) {
        stub.body_template = it->second;
      }
      if (auto it = sec->find("key_env"); it != sec->end()) stub.key_env = it->second;
      if (auto it = sec->find("timeout_ms"); it != sec->end()) {
        stub.timeout = std::chrono::milliseconds(std::stol(it->second));
      }
      if (auto it = sec->find("rate_limit"); it != sec->end()) {
        stub.rate_per_second = std::stod(it->second);
      }
      if (auto it = sec->find("languages"); it != sec->end()) {
        stub.languages.clear();
        std::size_t start = 0;
        const std::string& v = it->second;
        while (start <= v.size()) {
          auto comma = v.find(',', start);
          std::string lang = v.substr(
              start, comma == std::string::npos ? std::string::npos : comma - start);
          lang.erase(std::remove_if(lang.begin(), lang.end(), ::isspace), lang.end());
          if (!lang.empty()) stub.languages.insert(lang);
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
      }
    }
    const double rate = stub.rate_per_second;
    hub.register_provider(std::make_shared<HttpProvider>(std::move(stub)), rate);
  }

  // Mock providers: referenced explicitly or configured with a section.
  std::vector<std::string> mock_ids = requested;
  for (const auto& sec : file.sections()) {
    if (sec.rfind("provider.", 0) == 0) mock_ids.push_back(sec.substr(9));
  }
  for (const auto& id : mock_ids) {
    if (hub.has(id)) continue;
    const auto* sec = section_for(id);
    if (id.rfind("mock_dict", 0) == 0) {
      std::string dict_path;
      if (sec != nullptr) {
        if (auto it = sec->find("dictionary"); it != sec->end()) dict_path = it->second;
      }
      if (dict_path.empty()) {
        throw ConfigError("provider '" + id + "' needs a [provider." + id +
                          "] dictionary = <json file> config entry");
      }
      hub.register_provider(DictionaryProvider::from_json_file(id, dict_path));
    } else if (id.rfind("mock_echo", 0) == 0) {
      hub.register_provider(std::make_shared<EchoProvider>(id));
    }
  }
}

void print_warnings(const wokie::pipeline::PipelineConfig& cfg) {
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
}

int write_output(const wokie::skos::Thesaurus& enriched, const TranslateFlags& f) {
  wokie::rdf::Format format = parse_format(f.out_format);
  if (f.out.empty()) {
    if (format == wokie::rdf::Format::autodetect) format = wokie::rdf::Format::turtle;
    std::cout << (format == wokie::rdf::Format::turtle
                      ? wokie::rdf::serialize_turtle(enriched.graph)
                      : wokie::rdf::serialize_rdfxml(enriched.graph));
  } else {
    if (format == wokie::rdf::Format::autodetect) {
      format = wokie::rdf::detect_format(f.out, {});
    }
    wokie::skos::serialize(enriched, f.out, format);
  }
  return kExitOk;
}

std::unique_ptr<wokie::llm::LlmClient> make_llm_client(
    const wokie::pipeline::PipelineConfig& cfg) {
  if (!cfg.llm) return nullptr;
  return std::make_unique<wokie::llm::HttpChatLlm>();
}

int cmd_translate(const TranslateFlags& f) {
  ConfigFile file;
  if (!f.config_path.empty()) file = ConfigFile::parse_file(f.config_path);
  wokie::pipeline::PipelineConfig cfg = build_pipeline_config(f, file);
  cfg.validate();
  print_warnings(cfg);

  wokie::providers::ProviderHub hub;
  register_providers(hub, file, cfg.provider_order);
  hub.resolve_priority(cfg.provider_order);  // fail fast on unknown ids
  const std::string cache_path = cache_path_from(f, file);
  hub.set_cache(std::make_shared<wokie::providers::TranslationCache>(cache_path));

  wokie::skos::Thesaurus input = wokie::skos::parse_thesaurus(f.input);

  if (isatty(fileno(stderr)) != 0) {
    cfg.progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\rtranslating " << done << "/" << total << std::flush;
      if (done == total) std::cerr << "\n";
    };
  }

  auto client = make_llm_client(cfg);
  auto [enriched, report] = wokie::pipeline::translate_thesaurus(input, cfg, hub, client.get());

  std::cerr << report.to_table();
  if (!f.report_path.empty()) {
    std::ofstream out(f.report_path);
    out << report.to_json() << "\n";
  }
  const int rc = write_output(enriched, f);
  if (rc != kExitOk) return rc;
  const auto untranslated = report.route_counts.find("untranslated");
  if (report.terms > 0 && untranslated != report.route_counts.end() &&
      untranslated->second == report.terms) {
    return kExitUntranslated;
  }
  return kExitOk;
}

struct EvaluateFlags {
  TranslateFlags base;
  std::string strip_lang;
  std::vector<std::string> measures;
  std::string report_path;
  std::string csv_path;
  std::string vectors_path;
  std::string vocab_path;
};

int cmd_evaluate(const EvaluateFlags& f) {
  ConfigFile file;
  if (!f.base.config_path.empty()) file = ConfigFile::parse_file(f.base.config_path);
  wokie::pipeline::PipelineConfig cfg = build_pipeline_config(f.base, file);
  if (cfg.target_lang.empty()) cfg.target_lang = f.strip_lang;
  cfg.validate();
  print_warnings(cfg);

  wokie::simeval::MeasureSet measures;
  if (!f.measures.empty()) {
    measures = {false, false, false, false};
    for (const auto& m : f.measures) {
      if (m == "exact") {
        measures.exact = true;
      } else if (m == "levenshtein") {
        measures.levenshtein = true;
      } else if (m == "jaro_winkler" || m == "jaro-winkler") {
        measures.jaro_winkler = true;
      } else if (m == "cosine") {
        measures.cosine = true;
      } else {
        throw ConfigError("unknown measure: " + m +
                          " (expected exact, levenshtein, jaro_winkler, cosine)");
      }
    }
  }

  std::optional<wokie::embeddings::EmbeddingModel> model;
  if (measures.cosine) {
    std::string vectors = f.vectors_path;
    if (vectors.empty()) {
      if (auto v = file.get("embeddings", "vectors")) vectors = *v;
    }
    std::optional<std::string> vocab;
    if (!f.vocab_path.empty()) {
      vocab = f.vocab_path;
    } else if (auto v = file.get("embeddings", "vocab")) {
      vocab = *v;
    }
    if (vectors.empty()) {
      throw ConfigError(
          "cosine needs an embedding model: pass --embedding-vectors (see "
          "scripts/fetch_bpemb.sh) or exclude it via --measures");
    }
    model = wokie::embeddings::EmbeddingModel::load(vectors, vocab, f.strip_lang);
  }

  wokie::providers::ProviderHub hub;
  register_providers(hub, file, cfg.provider_order);
  hub.resolve_priority(cfg.provider_order);
  hub.set_cache(
      std::make_shared<wokie::providers::TranslationCache>(cache_path_from(f.base, file)));

  wokie::skos::Thesaurus input = wokie::skos::parse_thesaurus(f.base.input);
  auto client = make_llm_client(cfg);

  wokie::simeval::TranslateFn translate_fn =
      [&](const wokie::skos::Thesaurus& stripped) -> wokie::skos::Thesaurus {
    auto [enriched, report] = wokie::pipeline::translate_thesaurus(stripped, cfg, hub,
                                                                   client.get());
    std::cerr << report.to_table();
    return enriched;
  };

  wokie::simeval::SimilarityReport report = wokie::simeval::evaluate_backtranslation(
      input, f.strip_lang, cfg.prop, translate_fn, model ? &*model : nullptr, measures);

  if (f.report_path.empty()) {
    std::cout << report.to_json() << "\n";
  } else {
    std::ofstream out(f.report_path);
    out << report.to_json() << "\n";
  }
  if (!f.csv_path.empty()) {
    std::ofstream out(f.csv_path);
    out << report.to_csv();
  }
  return kExitOk;
}

struct ProvidersFlags {
  bool list = false;
  std::vector<std::string> check_pair;
  std::string config_path;
  std::vector<std::string> providers;
};

int cmd_providers(const ProvidersFlags& f) {
  ConfigFile file;
  if (!f.config_path.empty()) file = ConfigFile::parse_file(f.config_path);
  wokie::providers::ProviderHub hub;
  register_providers(hub, file, f.providers);
  std::vector<std::string> order = hub.resolve_priority(f.providers);

  if (!f.check_pair.empty()) {
    const std::string& src = f.check_pair[0];
    const std::string& tgt = f.check_pair[1];
    for (const auto& id : order) {
      if (hub.supports(id, src, tgt)) std::cout << id << "\n";
    }
    return kExitOk;
  }
  // default: --list
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& provider = hub.at(order[i]);
    std::cout << (i + 1) << ". " << order[i]
              << (provider.requires_key() ? "  (API key required)" : "") << "\n";
  }
  return kExitOk;
}

struct CacheFlags {
  bool stats = false;
  bool clear = false;
  std::string cache_path;
  std::string config_path;
};

int cmd_cache(const CacheFlags& f) {
  std::string path = f.cache_path;
  if (path.empty() && !f.config_path.empty()) {
    ConfigFile file = ConfigFile::parse_file(f.config_path);
    if (auto v = file.get("pipeline", "cache_file")) path = *v;
  }
  if (path.empty()) path = default_cache_path();

  wokie::providers::TranslationCache cache(path);
  if (f.clear) {
    cache.clear();
    std::cout << "cleared " << path << "\n";
    return kExitOk;
  }
  std::cout << "cache file: " << path << "\n";
  std::cout << "entries:    " << cache.size() << "\n";
  for (const auto& [provider, count] : cache.per_provider()) {
    std::cout << "  " << provider << ": " << count << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wokie - SKOS thesaurus translation via an ensemble of translation services "
               "with frequency consensus and selective LLM refinement"};
  app.require_subcommand(1);

  TranslateFlags tf;
  auto* translate = app.add_subcommand(
      "translate", "Translate label properties of a thesaurus into a target language");
  add_translate_flags(*translate, tf, true);

  EvaluateFlags ef;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Back-translation quality evaluation: strip a language, re-translate it "
                  "and score the result against the removed originals");
  add_translate_flags(*evaluate, ef.base, true);
  evaluate->add_option("--strip-lang", ef.strip_lang, "Language to remove and back-translate")
      ->required();
  evaluate->add_option("--measures", ef.measures,
                       "Subset of measures: exact, levenshtein, jaro_winkler, cosine "
                       "(default: all four)")
      ->delimiter(',');
  evaluate->add_option("--report", ef.report_path,
                       "Write the JSON similarity report here (default stdout)");
  evaluate->add_option("--csv", ef.csv_path, "Write aggregate scores as CSV");
  evaluate->add_option("--embedding-vectors", ef.vectors_path,
                       "word2vec .bin/.txt subword vectors for the cosine measure");
  evaluate->add_option("--embedding-vocab", ef.vocab_path,
                       "Optional piece vocabulary restricting the embedding model");

  ProvidersFlags pf;
  auto* providers_cmd =
      app.add_subcommand("providers", "Inspect registered translation providers");
  providers_cmd->add_flag("--list", pf.list, "List providers in effective priority order");
  providers_cmd
      ->add_option("--check-pair", pf.check_pair,
                   "Print providers supporting a language pair: --check-pair SRC TGT")
      ->expected(2);
  providers_cmd->add_option("--config", pf.config_path, "Config file");
  providers_cmd->add_option("--providers", pf.providers, "Priority order override")
      ->delimiter(',');

  CacheFlags cf;
  auto* cache_cmd = app.add_subcommand("cache", "Inspect or clear the translation cache");
  cache_cmd->add_flag("--stats", cf.stats, "Show cache statistics (default)");
  cache_cmd->add_flag("--clear", cf.clear, "Remove all cached translations");
  cache_cmd->add_option("--cache", cf.cache_path, "Cache file path");
  cache_cmd->add_option("--config", cf.config_path, "Config file");

  // The report JSON on the translate path is the run report; evaluate's
  // --report belongs to the similarity report, so keep them separate.
  try {
    app.parse(argc, argv);
    if (translate->parsed()) return cmd_translate(tf);
    if (evaluate->parsed()) return cmd_evaluate(ef);
    if (providers_cmd->parsed()) return cmd_providers(pf);
    if (cache_cmd->parsed()) return cmd_cache(cf);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const wokie::rdf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const wokie::rdf::UnsupportedFormat& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const wokie::rdf::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitParse;
  } catch (const wokie::embeddings::ModelError& e) {
    std::cerr << "embedding model error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
