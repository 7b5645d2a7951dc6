#include "wokie/rdf.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wokie::rdf {

Node Node::literal(std::string lex, std::string lang, std::string datatype) {
  if (datatype == vocab::xsd_string) datatype.clear();
  return {NodeKind::literal, std::move(lex), std::move(lang), std::move(datatype)};
}

Node Node::ref(std::string_view iri_or_blank) {
  if (iri_or_blank.rfind("_:", 0) == 0) return blank(std::string(iri_or_blank.substr(2)));
  return iri(std::string(iri_or_blank));
}

std::string Node::id() const {
  if (kind == NodeKind::blank) return "_:" + value;
  return value;
}

bool Graph::has_subject(const Node& s) const {
  auto it = triples_.lower_bound(Triple{s, Node{}, Node{}});
  return it != triples_.end() && it->subject == s;
}

std::vector<Triple> Graph::with_subject(const Node& s) const {
  std::vector<Triple> out;
  for (auto it = triples_.lower_bound(Triple{s, Node{}, Node{}});
       it != triples_.end() && it->subject == s; ++it) {
    out.push_back(*it);
  }
  return out;
}

std::vector<Node> Graph::objects(const Node& s, const Node& p) const {
  std::vector<Node> out;
  for (auto it = triples_.lower_bound(Triple{s, p, Node{}});
       it != triples_.end() && it->subject == s && it->predicate == p; ++it) {
    out.push_back(it->object);
  }
  return out;
}

std::vector<Node> Graph::subjects_with(const Node& p, const Node& o) const {
  std::vector<Node> out;
  for (const auto& t : triples_) {
    if (t.predicate == p && t.object == o) out.push_back(t.subject);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<Node> Graph::subjects() const {
  std::set<Node> out;
  for (const auto& t : triples_) out.insert(t.subject);
  return out;
}

bool Graph::is_superset_of(const Graph& other) const {
  return std::includes(triples_.begin(), triples_.end(), other.triples_.begin(),
                       other.triples_.end());
}

namespace {

// Deterministic FNV-1a; std::hash is not stable across processes.
std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
  return a;
}

std::uint64_t node_sig(const Node& n) {
  if (n.is_blank()) return 0;
  std::uint64_t h = fnv1a(n.value);
  h = mix(h, fnv1a(n.lang));
  h = mix(h, fnv1a(n.datatype));
  return mix(h, static_cast<std::uint64_t>(n.kind) + 1);
}

// Signature refinement over blank nodes; labels do not participate.
std::map<std::string, std::uint64_t> blank_signatures(const Graph& g) {
  std::map<std::string, std::uint64_t> sig;
  for (const auto& t : g) {
    if (t.subject.is_blank()) sig.emplace(t.subject.value, 1);
    if (t.object.is_blank()) sig.emplace(t.object.value, 1);
  }
  for (int round = 0; round < 4; ++round) {
    std::map<std::string, std::uint64_t> next;
    for (const auto& [label, s] : sig) next[label] = s;
    for (const auto& t : g) {
      const std::uint64_t p = node_sig(t.predicate);
      if (t.subject.is_blank()) {
        std::uint64_t o = t.object.is_blank() ? sig.at(t.object.value) : node_sig(t.object);
        next[t.subject.value] = mix(next[t.subject.value], mix(p, mix(o, 17)));
      }
      if (t.object.is_blank()) {
        std::uint64_t s2 = t.subject.is_blank() ? sig.at(t.subject.value) : node_sig(t.subject);
        next[t.object.value] = mix(next[t.object.value], mix(p, mix(s2, 31)));
      }
    }
    sig = std::move(next);
  }
  return sig;
}

Graph relabel_by_signature(const Graph& g) {
  auto sig = blank_signatures(g);
  // Sort blanks by (signature, label) and assign canonical indexes.
  std::vector<std::pair<std::uint64_t, std::string>> order;
  order.reserve(sig.size());
  for (const auto& [label, s] : sig) order.emplace_back(s, label);
  std::sort(order.begin(), order.end());
  std::map<std::string, std::string> rename;
  for (std::size_t i = 0; i < order.size(); ++i) {
    rename[order[i].second] = "c" + std::to_string(i);
  }
  auto fix = [&](Node n) {
    if (n.is_blank()) n.value = rename.at(n.value);
    return n;
  };
  Graph out;
  for (const auto& t : g) out.insert({fix(t.subject), t.predicate, fix(t.object)});
  return out;
}

}  // namespace

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.size() != b.size()) return false;
  if (a == b) return true;
  return relabel_by_signature(a) == relabel_by_signature(b);
}

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(message + " (line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

Format detect_format(const std::string& path, std::string_view content) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           std::equal(suffix.rbegin(), suffix.rend(), path.rbegin(), [](char a, char b) {
             return std::tolower(static_cast<unsigned char>(a)) ==
                    std::tolower(static_cast<unsigned char>(b));
           });
  };
  if (ends_with(".ttl") || ends_with(".turtle") || ends_with(".n3")) return Format::turtle;
  if (ends_with(".rdf") || ends_with(".xml") || ends_with(".owl")) return Format::rdfxml;
  // Content sniffing: XML prolog or an opening tag means RDF/XML.
  std::size_t i = 0;
  if (content.size() >= 3 && static_cast<unsigned char>(content[0]) == 0xEF) i = 3;  // BOM
  while (i < content.size() && std::isspace(static_cast<unsigned char>(content[i]))) ++i;
  if (i < content.size() && content[i] == '<' && i + 1 < content.size() && content[i + 1] != ' ') {
    // Turtle IRIs also start with '<'; XML follows with '?', '!' or a name
    // then mixes in element syntax. Look for an unescaped '>' followed by
    // tag-like structure.
    std::string_view head = content.substr(i, 256);
    if (head.rfind("<?xml", 0) == 0 || head.rfind("<!", 0) == 0 ||
        head.find("rdf:RDF") != std::string_view::npos ||
        head.find("xmlns") != std::string_view::npos) {
      return Format::rdfxml;
    }
  }
  return Format::turtle;
}

Graph parse_file(const std::string& path, Format format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  Format f = format;
  if (f == Format::autodetect) f = detect_format(path, content);
  switch (f) {
    case Format::turtle:
      return parse_turtle(content, path);
    case Format::rdfxml:
      return parse_rdfxml(content, path);
    default:
      throw UnsupportedFormat("unsupported RDF format for " + path);
  }
}

void serialize_file(const Graph& g, const std::string& path, Format format) {
  if (format == Format::autodetect) format = detect_format(path, {});
  std::string content;
  switch (format) {
    case Format::turtle:
      content = serialize_turtle(g);
      break;
    case Format::rdfxml:
      content = serialize_rdfxml(g);
      break;
    default:
      throw UnsupportedFormat("unsupported RDF output format");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace wokie::rdf
