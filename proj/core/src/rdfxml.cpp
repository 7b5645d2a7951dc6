#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wokie/rdf.hpp"
#include "wokie/text.hpp"

namespace wokie::rdf {

namespace {

// ---------------------------------------------------------------------------
// Minimal namespace-aware XML reader: elements, attributes, character data,
// comments, CDATA, numeric and predefined entities. DTDs are skipped.
// ---------------------------------------------------------------------------

struct XmlAttr {
  std::string name;  // as written, possibly prefixed
  std::string value;
};

struct XmlElement {
  std::string name;  // as written
  std::vector<XmlAttr> attrs;
  std::vector<XmlElement> children;
  std::string text;  // concatenated character data
  std::map<std::string, std::string> ns;  // prefix -> uri declared here
};

class XmlParser {
 public:
  explicit XmlParser(std::string_view in) : in_(in) {}

  XmlElement parse_document() {
    skip_misc();
    if (eof()) fail("no root element");
    XmlElement root = parse_element();
    skip_misc();
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, column()); }

  bool eof() const { return pos_ >= in_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < in_.size() ? in_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = in_[pos_++];
    if (c == '\n') {
      ++line_;
      line_start_ = pos_;
    }
    return c;
  }
  std::size_t column() const { return pos_ - line_start_ + 1; }

  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }
  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    for (std::size_t i = 0; i < s.size(); ++i) advance();
  }

  void skip_spaces() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  void skip_misc() {
    while (!eof()) {
      skip_spaces();
      if (starts_with("<?")) {
        while (!eof() && !starts_with("?>")) advance();
        expect("?>");
      } else if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<!")) {
        // DOCTYPE or similar; skip to matching '>'
        int depth = 0;
        while (!eof()) {
          char c = advance();
          if (c == '<') ++depth;
          if (c == '>') {
            if (depth == 0) break;
            --depth;
          }
        }
      } else {
        break;
      }
    }
  }

  void skip_comment() {
    expect("<!--");
    while (!eof() && !starts_with("-->")) advance();
    expect("-->");
  }

  std::string parse_name() {
    std::string out;
    while (!eof()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' ||
          c == '.' || static_cast<unsigned char>(c) >= 0x80) {
        out.push_back(advance());
      } else {
        break;
      }
    }
    if (out.empty()) fail("expected XML name");
    return out;
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      auto end = raw.find(';', i);
      if (end == std::string_view::npos) {
        out.push_back(raw[i]);
        continue;
      }
      std::string_view ent = raw.substr(i + 1, end - i - 1);
      if (ent == "amp") {
        out.push_back('&');
      } else if (ent == "lt") {
        out.push_back('<');
      } else if (ent == "gt") {
        out.push_back('>');
      } else if (ent == "quot") {
        out.push_back('"');
      } else if (ent == "apos") {
        out.push_back('\'');
      } else if (!ent.empty() && ent[0] == '#') {
        char32_t cp = 0;
        if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')) {
          for (std::size_t k = 2; k < ent.size(); ++k) {
            cp = cp * 16 + static_cast<char32_t>(
                               std::isdigit(static_cast<unsigned char>(ent[k]))
                                   ? ent[k] - '0'
                                   : std::tolower(static_cast<unsigned char>(ent[k])) - 'a' + 10);
          }
        } else {
          for (std::size_t k = 1; k < ent.size(); ++k) {
            cp = cp * 10 + static_cast<char32_t>(ent[k] - '0');
          }
        }
        out += text::encode_utf8(std::u32string(1, cp));
      } else {
        out.push_back('&');
        continue;  // unknown entity: keep literally, do not skip
      }
      i = end;
    }
    return out;
  }

  std::string parse_attr_value() {
    char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
    advance();
    std::string raw;
    while (!eof() && peek() != quote) raw.push_back(advance());
    if (eof()) fail("unterminated attribute value");
    advance();
    return decode_entities(raw);
  }

  XmlElement parse_element() {
    expect("<");
    XmlElement el;
    el.name = parse_name();
    while (true) {
      skip_spaces();
      if (starts_with("/>")) {
        expect("/>");
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      XmlAttr attr;
      attr.name = parse_name();
      skip_spaces();
      expect("=");
      skip_spaces();
      attr.value = parse_attr_value();
      if (attr.name == "xmlns") {
        el.ns[""] = attr.value;
      } else if (attr.name.rfind("xmlns:", 0) == 0) {
        el.ns[attr.name.substr(6)] = attr.value;
      } else {
        el.attrs.push_back(std::move(attr));
      }
    }
    // content
    std::string raw_text;
    while (true) {
      if (eof()) fail("unterminated element <" + el.name + ">");
      if (starts_with("</")) {
        el.text = decode_entities(raw_text);
        expect("</");
        std::string close = parse_name();
        if (close != el.name) fail("mismatched closing tag </" + close + ">");
        skip_spaces();
        expect(">");
        return el;
      }
      if (starts_with("<!--")) {
        skip_comment();
        continue;
      }
      if (starts_with("<![CDATA[")) {
        expect("<![CDATA[");
        while (!eof() && !starts_with("]]>")) raw_text.push_back(advance());
        expect("]]>");
        continue;
      }
      if (starts_with("<?")) {
        while (!eof() && !starts_with("?>")) advance();
        expect("?>");
        continue;
      }
      if (peek() == '<') {
        el.children.push_back(parse_element());
        continue;
      }
      raw_text.push_back(advance());
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

// ---------------------------------------------------------------------------
// RDF/XML mapping
// ---------------------------------------------------------------------------

struct NsScope {
  std::map<std::string, std::string> prefixes;  // prefix -> uri
  std::string lang;
  std::string base;
};

const std::string kRdfNs = std::string(ns::rdf);

class RdfXmlReader {
 public:
  RdfXmlReader(std::string_view content, std::string_view base) : base_(base) {
    root_ = XmlParser(content).parse_document();
  }

  Graph read() {
    NsScope scope;
    scope.base = base_;
    apply_scope(root_, scope);
    if (expand(root_.name, scope) == kRdfNs + "RDF") {
      for (const auto& child : root_.children) parse_node_element(child, scope);
    } else {
      parse_node_element(root_, scope);
    }
    return std::move(graph_);
  }

 private:
  [[noreturn]] static void fail(const std::string& msg) { throw ParseError(msg, 0, 0); }

  void apply_scope(const XmlElement& el, NsScope& scope) {
    for (const auto& [p, uri] : el.ns) scope.prefixes[p] = uri;
    for (const auto& a : el.attrs) {
      if (a.name == "xml:lang") scope.lang = a.value;
      if (a.name == "xml:base") scope.base = a.value;
    }
  }

  std::string expand(const std::string& name, const NsScope& scope) const {
    auto colon = name.find(':');
    std::string prefix = colon == std::string::npos ? "" : name.substr(0, colon);
    std::string local = colon == std::string::npos ? name : name.substr(colon + 1);
    if (prefix == "xml") return "http://www.w3.org/XML/1998/namespace" + local;
    auto it = scope.prefixes.find(prefix);
    if (it == scope.prefixes.end()) {
      if (prefix.empty()) fail("element '" + name + "' has no default namespace");
      fail("undeclared XML namespace prefix '" + prefix + "'");
    }
    return it->second + local;
  }

  std::string resolve(const std::string& ref, const NsScope& scope) const {
    if (ref.empty()) {
      auto hash = scope.base.find('#');
      return scope.base.substr(0, hash);
    }
    // Minimal RFC 3986 handling; fragments and absolute IRIs dominate in
    // real SKOS exports.
    bool absolute = ref.find("://") != std::string::npos || ref.rfind("urn:", 0) == 0 ||
                    ref.rfind("mailto:", 0) == 0;
    if (absolute || scope.base.empty()) return ref;
    if (ref[0] == '#') {
      auto hash = scope.base.find('#');
      return scope.base.substr(0, hash) + ref;
    }
    auto slash = scope.base.rfind('/');
    if (slash == std::string::npos) return ref;
    return scope.base.substr(0, slash + 1) + ref;
  }

  std::string fresh_blank() {
    std::string label;
    do {
      label = "genid" + std::to_string(next_blank_++);
    } while (used_blank_labels_.count(label) > 0);
    used_blank_labels_.insert(label);
    return label;
  }

  std::string blank_for(const std::string& node_id) {
    auto it = blank_map_.find(node_id);
    if (it != blank_map_.end()) return it->second;
    std::string internal = node_id;
    if (used_blank_labels_.count(internal) > 0) internal = fresh_blank();
    used_blank_labels_.insert(internal);
    blank_map_[node_id] = internal;
    return internal;
  }

  const XmlAttr* find_attr(const XmlElement& el, const NsScope& scope,
                           const std::string& expanded) const {
    for (const auto& a : el.attrs) {
      if (a.name.rfind("xml:", 0) == 0) continue;
      if (expand(a.name, scope) == expanded) return &a;
    }
    return nullptr;
  }

  Node parse_node_element(const XmlElement& el, NsScope scope) {
    apply_scope(el, scope);
    const std::string name = expand(el.name, scope);

    Node subject;
    if (const auto* about = find_attr(el, scope, kRdfNs + "about")) {
      subject = Node::iri(resolve(about->value, scope));
    } else if (const auto* id = find_attr(el, scope, kRdfNs + "ID")) {
      subject = Node::iri(resolve("#" + id->value, scope));
    } else if (const auto* node_id = find_attr(el, scope, kRdfNs + "nodeID")) {
      subject = Node::blank(blank_for(node_id->value));
    } else {
      subject = Node::blank(fresh_blank());
    }

    if (name != kRdfNs + "Description") {
      graph_.insert({subject, Node::iri(vocab::rdf_type), Node::iri(name)});
    }

    // Property attributes (anything that is not rdf:* syntax or xml:*).
    for (const auto& a : el.attrs) {
      if (a.name.rfind("xml", 0) == 0) continue;
      std::string expanded = expand(a.name, scope);
      if (expanded == kRdfNs + "about" || expanded == kRdfNs + "ID" ||
          expanded == kRdfNs + "nodeID" || expanded == kRdfNs + "parseType" ||
          expanded == kRdfNs + "datatype" || expanded == kRdfNs + "resource") {
        continue;
      }
      if (expanded == kRdfNs + "type") {
        graph_.insert({subject, Node::iri(vocab::rdf_type), Node::iri(resolve(a.value, scope))});
      } else {
        graph_.insert({subject, Node::iri(expanded), Node::literal(a.value, scope.lang)});
      }
    }

    for (const auto& child : el.children) parse_property_element(subject, child, scope);
    return subject;
  }

  void parse_property_element(const Node& subject, const XmlElement& el, NsScope scope) {
    apply_scope(el, scope);
    std::string name = expand(el.name, scope);
    if (name == kRdfNs + "li") name = kRdfNs + "_" + std::to_string(++li_counter_[subject.id()]);
    const Node predicate = Node::iri(name);

    if (const auto* res = find_attr(el, scope, kRdfNs + "resource")) {
      graph_.insert({subject, predicate, Node::iri(resolve(res->value, scope))});
      return;
    }
    if (const auto* node_id = find_attr(el, scope, kRdfNs + "nodeID")) {
      graph_.insert({subject, predicate, Node::blank(blank_for(node_id->value))});
      return;
    }
    if (const auto* pt = find_attr(el, scope, kRdfNs + "parseType")) {
      if (pt->value == "Resource") {
        Node inner = Node::blank(fresh_blank());
        graph_.insert({subject, predicate, inner});
        for (const auto& child : el.children) parse_property_element(inner, child, scope);
        return;
      }
      if (pt->value == "Collection") {
        Node head = Node::iri(vocab::rdf_nil);
        std::vector<Node> items;
        for (const auto& child : el.children) items.push_back(parse_node_element(child, scope));
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
          Node cell = Node::blank(fresh_blank());
          graph_.insert({cell, Node::iri(vocab::rdf_first), *it});
          graph_.insert({cell, Node::iri(vocab::rdf_rest), head});
          head = cell;
        }
        graph_.insert({subject, predicate, head});
        return;
      }
      // parseType="Literal": keep the raw character data.
      graph_.insert({subject, predicate, Node::literal(el.text)});
      return;
    }
    if (!el.children.empty()) {
      if (el.children.size() != 1) fail("property element with multiple node children");
      Node object = parse_node_element(el.children.front(), scope);
      graph_.insert({subject, predicate, object});
      return;
    }
    // Literal content.
    std::string datatype;
    if (const auto* dt = find_attr(el, scope, kRdfNs + "datatype")) datatype = dt->value;
    std::string lang = scope.lang;
    if (!datatype.empty()) lang.clear();
    graph_.insert({subject, predicate, Node::literal(el.text, lang, datatype)});
  }

  std::string base_;
  XmlElement root_;
  Graph graph_;
  std::map<std::string, std::string> blank_map_;
  std::set<std::string> used_blank_labels_;
  std::size_t next_blank_ = 0;
  std::map<std::string, int> li_counter_;
};

std::string xml_escape(const std::string& s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        out += attribute ? "&quot;" : "\"";
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Splits an IRI into (namespace, NCName local part) for property elements.
std::pair<std::string, std::string> split_iri(const std::string& iri) {
  auto is_ncname_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  };
  std::size_t split = iri.size();
  while (split > 0 && is_ncname_char(iri[split - 1])) --split;
  // NCName must not start with digit/dot/dash
  while (split < iri.size() && (std::isdigit(static_cast<unsigned char>(iri[split])) ||
                                iri[split] == '-' || iri[split] == '.')) {
    ++split;
  }
  if (split == 0 || split == iri.size()) return {"", ""};
  return {iri.substr(0, split), iri.substr(split)};
}

}  // namespace

Graph parse_rdfxml(std::string_view content, std::string_view base) {
  return RdfXmlReader(content, base).read();
}

std::string serialize_rdfxml(const Graph& g) {
  // Collect namespaces used by predicates (and typed nodes).
  std::map<std::string, std::string> ns_by_uri;  // uri -> prefix
  ns_by_uri[kRdfNs] = "rdf";
  int next_ns = 1;
  auto prefix_for = [&](const std::string& uri) -> std::string {
    auto it = ns_by_uri.find(uri);
    if (it != ns_by_uri.end()) return it->second;
    for (const auto& known : {std::pair{"skos", ns::skos}, {"rdfs", ns::rdfs},
                              {"xsd", ns::xsd}, {"dct", ns::dct}, {"dc", ns::dc},
                              {"owl", ns::owl}}) {
      if (uri == known.second) {
        ns_by_uri[uri] = known.first;
        return known.first;
      }
    }
    std::string p = "ns" + std::to_string(next_ns++);
    ns_by_uri[uri] = p;
    return p;
  };

  std::set<Node> subjects = g.subjects();
  std::map<Node, std::vector<Triple>> by_subject;
  for (const auto& t : g) by_subject[t.subject].push_back(t);
  std::vector<std::string> rendered;
  for (const Node& s : subjects) {
    std::ostringstream block;
    block << "  <rdf:Description ";
    if (s.is_blank()) {
      block << "rdf:nodeID=\"" << xml_escape(s.value, true) << "\"";
    } else {
      block << "rdf:about=\"" << xml_escape(s.value, true) << "\"";
    }
    block << ">\n";
    for (const auto& t : by_subject[s]) {
      auto [nsuri, local] = split_iri(t.predicate.value);
      std::string qname;
      if (nsuri.empty()) {
        // Cannot form a QName; extremely unusual for vocabulary IRIs.
        throw UnsupportedFormat("cannot express predicate as XML QName: " + t.predicate.value);
      }
      qname = prefix_for(nsuri) + ":" + local;
      block << "    <" << qname;
      const Node& o = t.object;
      if (o.is_literal()) {
        if (!o.lang.empty()) block << " xml:lang=\"" << xml_escape(o.lang, true) << "\"";
        if (!o.datatype.empty()) {
          block << " rdf:datatype=\"" << xml_escape(o.datatype, true) << "\"";
        }
        block << ">" << xml_escape(o.value, false) << "</" << qname << ">\n";
      } else if (o.is_blank()) {
        block << " rdf:nodeID=\"" << xml_escape(o.value, true) << "\"/>\n";
      } else {
        block << " rdf:resource=\"" << xml_escape(o.value, true) << "\"/>\n";
      }
    }
    block << "  </rdf:Description>\n";
    rendered.push_back(block.str());
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rdf:RDF";
  std::map<std::string, std::string> by_prefix;  // prefix -> uri, sorted output
  for (const auto& [uri, prefix] : ns_by_uri) by_prefix[prefix] = uri;
  for (const auto& [prefix, uri] : by_prefix) {
    out << "\n    xmlns:" << prefix << "=\"" << xml_escape(uri, true) << "\"";
  }
  out << ">\n";
  for (const auto& r : rendered) out << r;
  out << "</rdf:RDF>\n";
  return out.str();
}

}  // namespace wokie::rdf
