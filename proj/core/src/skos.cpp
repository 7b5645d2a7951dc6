#include "wokie/skos.hpp"

#include <algorithm>
#include <cctype>

#include "wokie/text.hpp"

namespace wokie::skos {

std::string primary_subtag(std::string_view tag) {
  if (tag.empty()) return "und";
  auto dash = tag.find('-');
  std::string primary(tag.substr(0, dash));
  std::transform(primary.begin(), primary.end(), primary.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return primary;
}

std::string normalize_tag(std::string_view tag) {
  std::string out(tag);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool well_formed_tag(std::string_view tag) {
  if (tag.empty()) return false;
  std::size_t subtag_len = 0;
  bool first = true;
  for (char c : tag) {
    if (c == '-') {
      if (subtag_len == 0) return false;
      subtag_len = 0;
      first = false;
      continue;
    }
    if (first && !std::isalpha(static_cast<unsigned char>(c))) return false;
    if (!first && !std::isalnum(static_cast<unsigned char>(c))) return false;
    if (++subtag_len > 8) return false;
  }
  return subtag_len > 0;
}

Thesaurus thesaurus_from_graph(rdf::Graph g, std::string source_path) {
  Thesaurus t;
  t.graph = std::move(g);
  t.source_path = std::move(source_path);

  // Scheme description: description-type properties first, then titles,
  // over subjects typed skos:ConceptScheme.
  const rdf::Node scheme_type = rdf::Node::iri(props::concept_scheme);
  auto schemes = t.graph.subjects_with(rdf::Node::iri(rdf::vocab::rdf_type), scheme_type);
  std::sort(schemes.begin(), schemes.end());
  const std::vector<std::string> preference = {
      std::string(rdf::ns::dct) + "description", std::string(rdf::ns::dc) + "description",
      std::string(rdf::ns::rdfs) + "comment",    std::string(rdf::ns::dct) + "title",
      std::string(rdf::ns::dc) + "title",        std::string(rdf::ns::rdfs) + "label",
  };
  for (const auto& prop : preference) {
    for (const auto& scheme : schemes) {
      for (const auto& o : t.graph.objects(scheme, rdf::Node::iri(prop))) {
        if (o.is_literal()) {
          std::string v = text::trim(o.value);
          if (!v.empty()) {
            t.scheme_description = v;
            return t;
          }
        }
      }
    }
  }
  return t;
}

Thesaurus parse_thesaurus(const std::string& path, rdf::Format format) {
  return thesaurus_from_graph(rdf::parse_file(path, format), path);
}

std::vector<Term> extract_terms(const Thesaurus& t, const LabelProperty& prop) {
  const rdf::Node prop_node = rdf::Node::iri(prop.property_iri);
  const rdf::Node def_node = rdf::Node::iri(props::definition);
  const rdf::Node broader_node = rdf::Node::iri(props::broader);

  std::map<std::string, Term> terms;
  for (const auto& triple : t.graph) {
    if (triple.predicate != prop_node || !triple.object.is_literal()) continue;
    std::string value = text::trim(triple.object.value);
    if (value.empty()) continue;
    const std::string id = triple.subject.id();
    Term& term = terms[id];
    term.iri = id;
    term.labels[primary_subtag(triple.object.lang)].push_back(std::move(value));
  }

  for (auto& [id, term] : terms) {
    const rdf::Node subject = rdf::Node::ref(id);
    for (const auto& o : t.graph.objects(subject, def_node)) {
      if (!o.is_literal()) continue;
      std::string v = text::trim(o.value);
      if (v.empty()) continue;
      term.definitions.emplace(primary_subtag(o.lang), std::move(v));
    }
    for (const auto& o : t.graph.objects(subject, broader_node)) {
      if (!o.is_literal()) term.broader.push_back(o.id());
    }
    std::sort(term.broader.begin(), term.broader.end());
  }

  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& [id, term] : terms) out.push_back(std::move(term));
  return out;
}

void add_translation(Thesaurus& t, const std::string& iri, const LabelProperty& prop,
                     const std::string& text_value, const std::string& lang) {
  const std::string trimmed = text::trim(text_value);
  if (trimmed.empty()) throw std::invalid_argument("translation text is empty");
  if (!well_formed_tag(lang)) throw std::invalid_argument("malformed language tag: " + lang);
  const rdf::Node subject = rdf::Node::ref(iri);
  if (!t.graph.has_subject(subject)) throw UnknownConcept(iri);
  t.graph.insert({subject, rdf::Node::iri(prop.property_iri),
                  rdf::Node::literal(trimmed, normalize_tag(lang))});
}

void add_editorial_note(Thesaurus& t, const std::string& iri, const std::string& note) {
  const rdf::Node subject = rdf::Node::ref(iri);
  if (!t.graph.has_subject(subject)) throw UnknownConcept(iri);
  t.graph.insert({subject, rdf::Node::iri(props::editorial_note), rdf::Node::literal(note)});
}

std::pair<Thesaurus, std::map<std::string, std::vector<std::string>>> strip_language(
    const Thesaurus& t, const std::string& lang, const LabelProperty& prop) {
  const std::string target = primary_subtag(lang);
  const rdf::Node prop_node = rdf::Node::iri(prop.property_iri);

  Thesaurus out = t;
  std::map<std::string, std::vector<std::string>> removed;
  std::vector<rdf::Triple> doomed;
  for (const auto& triple : t.graph) {
    if (triple.predicate != prop_node || !triple.object.is_literal()) continue;
    if (target == "und") {
      if (!triple.object.lang.empty()) continue;
    } else if (triple.object.lang.empty() || primary_subtag(triple.object.lang) != target) {
      continue;
    }
    doomed.push_back(triple);
  }
  for (const auto& triple : doomed) {
    out.graph.erase(triple);
    removed[triple.subject.id()].push_back(triple.object.value);
  }
  return {std::move(out), std::move(removed)};
}

void serialize(const Thesaurus& t, const std::string& path, rdf::Format format) {
  rdf::serialize_file(t.graph, path, format);
}

std::vector<std::string> labels_of(const Thesaurus& t, const std::string& iri,
                                   const LabelProperty& prop, const std::string& lang) {
  const std::string target = primary_subtag(lang);
  std::vector<std::string> out;
  for (const auto& o :
       t.graph.objects(rdf::Node::ref(iri), rdf::Node::iri(prop.property_iri))) {
    if (!o.is_literal()) continue;
    const bool match = target == "und" ? o.lang.empty()
                                       : !o.lang.empty() && primary_subtag(o.lang) == target;
    if (match) out.push_back(o.value);
  }
  return out;
}

}  // namespace wokie::skos
