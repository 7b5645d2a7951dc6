#pragma once

#include <compare>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wokie::rdf {

enum class NodeKind { iri, blank, literal };

/// An RDF node. Literals carry an optional language tag or datatype IRI;
/// xsd:string is normalized away so plain literals compare equal to it.
struct Node {
  NodeKind kind = NodeKind::iri;
  std::string value;     // IRI, blank node label, or literal lexical form
  std::string lang;      // literals only
  std::string datatype;  // literals only

  static Node iri(std::string v) { return {NodeKind::iri, std::move(v), {}, {}}; }
  static Node blank(std::string label) { return {NodeKind::blank, std::move(label), {}, {}}; }
  static Node literal(std::string lex, std::string lang = {}, std::string datatype = {});

  /// "_:label" strings become blank node references, anything else an IRI.
  static Node ref(std::string_view iri_or_blank);

  bool is_iri() const { return kind == NodeKind::iri; }
  bool is_blank() const { return kind == NodeKind::blank; }
  bool is_literal() const { return kind == NodeKind::literal; }

  /// IRI as-is, or "_:label" for blank nodes; usable with Node::ref.
  std::string id() const;

  auto operator<=>(const Node&) const = default;
};

struct Triple {
  Node subject;
  Node predicate;
  Node object;

  auto operator<=>(const Triple&) const = default;
};

/// A set of triples with deterministic (sorted) iteration order.
class Graph {
 public:
  using TripleSet = std::set<Triple>;
  using const_iterator = TripleSet::const_iterator;

  bool insert(Triple t) { return triples_.insert(std::move(t)).second; }
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  std::size_t erase(const Triple& t) { return triples_.erase(t); }

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }

  bool has_subject(const Node& s) const;
  std::vector<Triple> with_subject(const Node& s) const;
  std::vector<Node> objects(const Node& s, const Node& p) const;
  std::vector<Node> subjects_with(const Node& p, const Node& o) const;
  std::set<Node> subjects() const;

  bool is_superset_of(const Graph& other) const;

  bool operator==(const Graph&) const = default;

 private:
  TripleSet triples_;
};

/// Triple-set equality up to blank node relabeling. Uses iterative signature
/// refinement; sufficient for the graph sizes this library handles.
bool isomorphic(const Graph& a, const Graph& b);

enum class Format { turtle, rdfxml, autodetect };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedFormat : public std::runtime_error {
 public:
  explicit UnsupportedFormat(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

Graph parse_turtle(std::string_view content, std::string_view base = {});
Graph parse_rdfxml(std::string_view content, std::string_view base = {});
Graph parse_file(const std::string& path, Format format = Format::autodetect);

std::string serialize_turtle(const Graph& g);
std::string serialize_rdfxml(const Graph& g);
void serialize_file(const Graph& g, const std::string& path, Format format);

/// Infers the serialization from the file extension, then from the content.
Format detect_format(const std::string& path, std::string_view content);

namespace ns {
inline constexpr std::string_view skos = "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view dct = "http://purl.org/dc/terms/";
inline constexpr std::string_view dc = "http://purl.org/dc/elements/1.1/";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
}  // namespace ns

namespace vocab {
inline const std::string rdf_type = std::string(ns::rdf) + "type";
inline const std::string rdf_first = std::string(ns::rdf) + "first";
inline const std::string rdf_rest = std::string(ns::rdf) + "rest";
inline const std::string rdf_nil = std::string(ns::rdf) + "nil";
inline const std::string xsd_string = std::string(ns::xsd) + "string";
inline const std::string xsd_integer = std::string(ns::xsd) + "integer";
inline const std::string xsd_decimal = std::string(ns::xsd) + "decimal";
inline const std::string xsd_double = std::string(ns::xsd) + "double";
inline const std::string xsd_boolean = std::string(ns::xsd) + "boolean";
}  // namespace vocab

}  // namespace wokie::rdf
