#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wokie/rdf.hpp"

namespace wokie::skos {

namespace props {
inline const std::string pref_label = std::string(rdf::ns::skos) + "prefLabel";
inline const std::string alt_label = std::string(rdf::ns::skos) + "altLabel";
inline const std::string definition = std::string(rdf::ns::skos) + "definition";
inline const std::string broader = std::string(rdf::ns::skos) + "broader";
inline const std::string editorial_note = std::string(rdf::ns::skos) + "editorialNote";
inline const std::string concept_scheme = std::string(rdf::ns::skos) + "ConceptScheme";
inline const std::string concept_class = std::string(rdf::ns::skos) + "Concept";
}  // namespace props

/// The property whose literals get translated (default skos:prefLabel).
struct LabelProperty {
  std::string property_iri = props::pref_label;

  static LabelProperty pref_label() { return {props::pref_label}; }
  static LabelProperty alt_label() { return {props::alt_label}; }
  static LabelProperty definition() { return {props::definition}; }

  bool operator==(const LabelProperty&) const = default;
};

/// Lowercased primary subtag: "EN-GB" -> "en". Untagged literals use "und".
std::string primary_subtag(std::string_view tag);

/// Full-tag normalization for writing: lowercase, subtags preserved.
std::string normalize_tag(std::string_view tag);

bool well_formed_tag(std::string_view tag);

/// One concept as a translation unit: labels of the selected property grouped
/// by primary language subtag.
struct Term {
  std::string iri;  // concept IRI, or "_:label" for blank subjects
  std::map<std::string, std::vector<std::string>> labels;
  std::map<std::string, std::string> definitions;
  std::vector<std::string> broader;

  bool has_language(std::string_view lang) const {
    return labels.count(primary_subtag(lang)) > 0;
  }
};

struct Thesaurus {
  rdf::Graph graph;
  std::optional<std::string> scheme_description;
  std::string source_path;
};

class UnknownConcept : public std::runtime_error {
 public:
  explicit UnknownConcept(const std::string& iri)
      : std::runtime_error("unknown concept: " + iri) {}
};

Thesaurus parse_thesaurus(const std::string& path,
                          rdf::Format format = rdf::Format::autodetect);
Thesaurus thesaurus_from_graph(rdf::Graph g, std::string source_path = {});

/// One Term per subject carrying at least one value of `prop`. Labels are
/// trimmed; empty ones are dropped. Untagged literals go under "und".
std::vector<Term> extract_terms(const Thesaurus& t, const LabelProperty& prop);

/// Inserts (iri, prop, text@lang). Idempotent; throws UnknownConcept if the
/// concept is not a subject in the graph.
void add_translation(Thesaurus& t, const std::string& iri, const LabelProperty& prop,
                     const std::string& text, const std::string& lang);

/// Adds a skos:editorialNote to the concept (provenance marker).
void add_editorial_note(Thesaurus& t, const std::string& iri, const std::string& note);

/// Removes every `prop` literal whose language matches `lang` (by primary
/// subtag). Returns the pruned thesaurus and the removed texts by concept.
std::pair<Thesaurus, std::map<std::string, std::vector<std::string>>> strip_language(
    const Thesaurus& t, const std::string& lang, const LabelProperty& prop);

void serialize(const Thesaurus& t, const std::string& path, rdf::Format format);

/// Labels of `prop` in `lang` for one concept, in graph order.
std::vector<std::string> labels_of(const Thesaurus& t, const std::string& iri,
                                   const LabelProperty& prop, const std::string& lang);

}  // namespace wokie::skos
