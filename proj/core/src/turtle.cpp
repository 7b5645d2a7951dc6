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

bool has_scheme(std::string_view iri) {
  if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < iri.size(); ++i) {
    char c = iri[i];
    if (c == ':') return true;
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      return false;
    }
  }
  return false;
}

// RFC 3986 relative reference resolution, trimmed to what Turtle needs.
std::string resolve_iri(std::string_view ref, std::string_view base) {
  if (ref.empty()) return std::string(base);
  if (has_scheme(ref) || base.empty()) return std::string(ref);
  if (ref[0] == '#') {
    auto hash = base.find('#');
    return std::string(base.substr(0, hash)) + std::string(ref);
  }
  if (ref.rfind("//", 0) == 0) {
    auto scheme_end = base.find(':');
    return std::string(base.substr(0, scheme_end + 1)) + std::string(ref);
  }
  // Locate base authority and path.
  std::size_t path_start = 0;
  auto scheme_end = base.find(':');
  if (scheme_end != std::string_view::npos && base.substr(scheme_end + 1, 2) == "//") {
    path_start = base.find('/', scheme_end + 3);
    if (path_start == std::string_view::npos) path_start = base.size();
  }
  std::string_view root = base.substr(0, path_start);
  std::string_view path = base.substr(path_start);
  auto cut = [](std::string_view p, char c) {
    auto pos = p.find(c);
    return pos == std::string_view::npos ? p : p.substr(0, pos);
  };
  path = cut(cut(path, '#'), '?');
  std::string merged;
  if (ref[0] == '/') {
    merged = std::string(ref);
  } else {
    auto last_slash = path.rfind('/');
    if (last_slash == std::string_view::npos) {
      merged = "/" + std::string(ref);
    } else {
      merged = std::string(path.substr(0, last_slash + 1)) + std::string(ref);
    }
  }
  // Remove dot segments. `merged` always starts with '/'.
  std::vector<std::string> segs;
  std::size_t i = 1;
  while (i <= merged.size()) {
    auto next = merged.find('/', i);
    std::string seg = merged.substr(i, next == std::string::npos ? std::string::npos : next - i);
    if (seg == "..") {
      if (!segs.empty()) segs.pop_back();
    } else if (seg != ".") {
      segs.push_back(seg);
    }
    if (next == std::string::npos) break;
    i = next + 1;
  }
  std::string out(root);
  for (const auto& seg : segs) {
    out += "/";
    out += seg;
  }
  return out;
}

class TurtleParser {
 public:
  TurtleParser(std::string_view in, std::string_view base) : in_(in), base_(base) {}

  Graph parse() {
    skip_ws();
    while (!eof()) {
      if (try_directive()) {
        skip_ws();
        continue;
      }
      parse_triples();
      skip_ws();
    }
    return std::move(graph_);
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

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
        advance();
      } else {
        break;
      }
    }
  }

  bool match_keyword(std::string_view kw) {
    if (in_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(in_[pos_ + i])) != kw[i]) return false;
    }
    char after = peek(kw.size());
    if (std::isalnum(static_cast<unsigned char>(after)) || after == '_' || after == '-') {
      return false;
    }
    for (std::size_t i = 0; i < kw.size(); ++i) advance();
    return true;
  }

  bool try_directive() {
    if (peek() == '@') {
      advance();
      if (match_keyword("prefix")) {
        parse_prefix_decl();
      } else if (match_keyword("base")) {
        parse_base_decl();
      } else {
        fail("unknown directive");
      }
      skip_ws();
      if (peek() != '.') fail("expected '.' after directive");
      advance();
      return true;
    }
    // SPARQL-style PREFIX / BASE (no trailing dot).
    std::size_t save_pos = pos_, save_line = line_, save_ls = line_start_;
    if (match_keyword("prefix")) {
      if (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r') {
        parse_prefix_decl();
        return true;
      }
      pos_ = save_pos;
      line_ = save_line;
      line_start_ = save_ls;
      return false;
    }
    if (match_keyword("base")) {
      if (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r') {
        parse_base_decl();
        return true;
      }
      pos_ = save_pos;
      line_ = save_line;
      line_start_ = save_ls;
      return false;
    }
    return false;
  }

  void parse_prefix_decl() {
    skip_ws();
    std::string name;
    while (!eof() && peek() != ':') {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) fail("malformed prefix name");
      name.push_back(advance());
    }
    if (eof()) fail("malformed @prefix");
    advance();  // ':'
    skip_ws();
    if (peek() != '<') fail("expected IRI in @prefix");
    prefixes_[name] = parse_iri_ref();
  }

  void parse_base_decl() {
    skip_ws();
    if (peek() != '<') fail("expected IRI in @base");
    base_ = parse_iri_ref();
  }

  std::string parse_iri_ref() {
    // caller checked '<'
    advance();
    std::string out;
    while (!eof()) {
      char c = advance();
      if (c == '>') return resolve_iri(out, base_);
      if (c == '\\') {
        char e = advance();
        if (e == 'u') {
          out += text::encode_utf8(std::u32string(1, parse_hex(4)));
        } else if (e == 'U') {
          out += text::encode_utf8(std::u32string(1, parse_hex(8)));
        } else {
          fail("invalid escape in IRI");
        }
      } else if (c == '\n') {
        fail("newline in IRI");
      } else {
        out.push_back(c);
      }
    }
    fail("unterminated IRI");
  }

  char32_t parse_hex(int len) {
    char32_t cp = 0;
    for (int i = 0; i < len; ++i) {
      if (eof()) fail("truncated unicode escape");
      char c = advance();
      cp <<= 4;
      if (c >= '0' && c <= '9') {
        cp |= static_cast<char32_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        cp |= static_cast<char32_t>(c - 'a' + 10);
      } else if (c >= 'A' && c <= 'F') {
        cp |= static_cast<char32_t>(c - 'A' + 10);
      } else {
        fail("invalid unicode escape");
      }
    }
    return cp;
  }

  static bool pn_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  std::string parse_pname_or_keyword(bool* is_a) {
    *is_a = false;
    std::string prefix;
    while (!eof() && (pn_char(peek()) || peek() == '.')) {
      // a lone '.' terminates a statement; only consume dots inside names
      if (peek() == '.' && !(pn_char(peek(1)) || peek(1) == '.')) break;
      prefix.push_back(advance());
    }
    if (peek() == ':') {
      advance();
      std::string local;
      while (!eof() &&
             (pn_char(peek()) || peek() == '%' || peek() == '\\' || peek() == '.' ||
              peek() == ':')) {
        if (peek() == '.' && !(pn_char(peek(1)) || peek(1) == ':' || peek(1) == '%')) break;
        char c = advance();
        if (c == '\\') {
          if (eof()) fail("truncated local name escape");
          local.push_back(advance());
        } else {
          local.push_back(c);
        }
      }
      auto it = prefixes_.find(prefix);
      if (it == prefixes_.end()) fail("undefined prefix '" + prefix + ":'");
      return it->second + local;
    }
    if (prefix == "a") {
      *is_a = true;
      return vocab::rdf_type;
    }
    if (prefix == "true" || prefix == "false") {
      *is_a = false;
      bool_keyword_ = prefix;
      return {};
    }
    fail("unexpected token '" + prefix + "'");
  }

  std::string fresh_blank() {
    std::string label;
    do {
      label = "genid" + std::to_string(next_blank_++);
    } while (used_blank_labels_.count(label) > 0);
    used_blank_labels_.insert(label);
    return label;
  }

  std::string blank_for_label(const std::string& label) {
    auto it = blank_map_.find(label);
    if (it != blank_map_.end()) return it->second;
    std::string internal = label;
    if (used_blank_labels_.count(internal) > 0) internal = fresh_blank();
    used_blank_labels_.insert(internal);
    blank_map_[label] = internal;
    return internal;
  }

  Node parse_subject() {
    char c = peek();
    if (c == '<') return Node::iri(parse_iri_ref());
    if (c == '_' && peek(1) == ':') return parse_blank_label();
    if (c == '[') return parse_blank_property_list();
    if (c == '(') return parse_collection();
    bool is_a = false;
    std::string iri = parse_pname_or_keyword(&is_a);
    if (is_a || iri.empty()) fail("invalid subject");
    return Node::iri(iri);
  }

  Node parse_blank_label() {
    advance();
    advance();  // "_:"
    std::string label;
    while (!eof() && (pn_char(peek()) || peek() == '.')) {
      if (peek() == '.' && !pn_char(peek(1))) break;
      label.push_back(advance());
    }
    if (label.empty()) fail("empty blank node label");
    return Node::blank(blank_for_label(label));
  }

  Node parse_blank_property_list() {
    advance();  // '['
    Node node = Node::blank(fresh_blank());
    skip_ws();
    if (peek() == ']') {
      advance();
      return node;
    }
    parse_predicate_object_list(node);
    skip_ws();
    if (peek() != ']') fail("expected ']'");
    advance();
    return node;
  }

  Node parse_collection() {
    advance();  // '('
    skip_ws();
    std::vector<Node> items;
    while (peek() != ')') {
      if (eof()) fail("unterminated collection");
      items.push_back(parse_object());
      skip_ws();
    }
    advance();  // ')'
    Node head = Node::iri(vocab::rdf_nil);
    for (auto it = items.rbegin(); it != items.rend(); ++it) {
      Node cell = Node::blank(fresh_blank());
      graph_.insert({cell, Node::iri(vocab::rdf_first), *it});
      graph_.insert({cell, Node::iri(vocab::rdf_rest), head});
      head = cell;
    }
    return head;
  }

  Node parse_predicate() {
    if (peek() == '<') return Node::iri(parse_iri_ref());
    bool is_a = false;
    std::string iri = parse_pname_or_keyword(&is_a);
    if (iri.empty()) fail("invalid predicate");
    return Node::iri(iri);
  }

  Node parse_object() {
    char c = peek();
    if (c == '<') return Node::iri(parse_iri_ref());
    if (c == '_' && peek(1) == ':') return parse_blank_label();
    if (c == '[') return parse_blank_property_list();
    if (c == '(') return parse_collection();
    if (c == '"' || c == '\'') return parse_literal();
    if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      return parse_numeric();
    }
    bool is_a = false;
    std::string iri = parse_pname_or_keyword(&is_a);
    if (iri.empty() && !bool_keyword_.empty()) {
      std::string kw = std::exchange(bool_keyword_, {});
      return Node::literal(kw, {}, vocab::xsd_boolean);
    }
    if (is_a || iri.empty()) fail("invalid object");
    return Node::iri(iri);
  }

  Node parse_numeric() {
    std::string lex;
    bool has_dot = false, has_exp = false;
    if (peek() == '+' || peek() == '-') lex.push_back(advance());
    while (!eof()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex.push_back(advance());
      } else if (c == '.' && !has_dot && !has_exp &&
                 std::isdigit(static_cast<unsigned char>(peek(1)))) {
        has_dot = true;
        lex.push_back(advance());
      } else if ((c == 'e' || c == 'E') && !has_exp && !lex.empty()) {
        has_exp = true;
        lex.push_back(advance());
        if (peek() == '+' || peek() == '-') lex.push_back(advance());
      } else {
        break;
      }
    }
    if (lex.empty() || lex == "+" || lex == "-") fail("malformed number");
    std::string dt = has_exp   ? vocab::xsd_double
                     : has_dot ? vocab::xsd_decimal
                               : vocab::xsd_integer;
    return Node::literal(lex, {}, dt);
  }

  Node parse_literal() {
    const char quote = peek();
    std::string lex;
    bool long_form = false;
    advance();
    if (peek() == quote && peek(1) == quote) {
      advance();
      advance();
      long_form = true;
    } else if (peek() == quote) {
      advance();  // empty short string
      return finish_literal("");
    }
    while (true) {
      if (eof()) fail("unterminated string literal");
      char c = advance();
      if (c == quote) {
        if (!long_form) break;
        if (peek() == quote && peek(1) == quote) {
          advance();
          advance();
          break;
        }
        lex.push_back(c);
        continue;
      }
      if (c == '\\') {
        if (eof()) fail("truncated escape");
        char e = advance();
        switch (e) {
          case 't': lex.push_back('\t'); break;
          case 'b': lex.push_back('\b'); break;
          case 'n': lex.push_back('\n'); break;
          case 'r': lex.push_back('\r'); break;
          case 'f': lex.push_back('\f'); break;
          case '"': lex.push_back('"'); break;
          case '\'': lex.push_back('\''); break;
          case '\\': lex.push_back('\\'); break;
          case 'u': lex += text::encode_utf8(std::u32string(1, parse_hex(4))); break;
          case 'U': lex += text::encode_utf8(std::u32string(1, parse_hex(8))); break;
          default: fail("invalid string escape");
        }
        continue;
      }
      if (!long_form && (c == '\n' || c == '\r')) fail("newline in short string literal");
      lex.push_back(c);
    }
    return finish_literal(std::move(lex));
  }

  Node finish_literal(std::string lex) {
    if (peek() == '@') {
      advance();
      std::string tag;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
        tag.push_back(advance());
      }
      if (tag.empty()) fail("empty language tag");
      return Node::literal(std::move(lex), tag);
    }
    if (peek() == '^' && peek(1) == '^') {
      advance();
      advance();
      Node dt = parse_predicate();
      return Node::literal(std::move(lex), {}, dt.value);
    }
    return Node::literal(std::move(lex));
  }

  void parse_predicate_object_list(const Node& subject) {
    while (true) {
      skip_ws();
      Node predicate = parse_predicate();
      while (true) {
        skip_ws();
        Node object = parse_object();
        graph_.insert({subject, predicate, object});
        skip_ws();
        if (peek() == ',') {
          advance();
          continue;
        }
        break;
      }
      if (peek() == ';') {
        advance();
        skip_ws();
        // allow trailing ';' before '.' or ']'
        if (peek() == '.' || peek() == ']' || peek() == ';') {
          while (peek() == ';') {
            advance();
            skip_ws();
          }
          if (peek() == '.' || peek() == ']') return;
        }
        continue;
      }
      return;
    }
  }

  void parse_triples() {
    Node subject = parse_subject();
    skip_ws();
    // A bare blank property list may stand alone as a statement.
    if (peek() == '.' && subject.is_blank()) {
      advance();
      return;
    }
    parse_predicate_object_list(subject);
    skip_ws();
    if (peek() != '.') fail("expected '.' at end of statement");
    advance();
  }

  std::string_view in_;
  std::string base_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
  std::map<std::string, std::string> prefixes_;
  std::map<std::string, std::string> blank_map_;
  std::set<std::string> used_blank_labels_;
  std::size_t next_blank_ = 0;
  std::string bool_keyword_;
  Graph graph_;
};

const std::vector<std::pair<std::string, std::string>>& known_prefixes() {
  static const std::vector<std::pair<std::string, std::string>> tbl = {
      {"skos", std::string(ns::skos)}, {"rdf", std::string(ns::rdf)},
      {"rdfs", std::string(ns::rdfs)}, {"xsd", std::string(ns::xsd)},
      {"dct", std::string(ns::dct)},   {"dc", std::string(ns::dc)},
      {"owl", std::string(ns::owl)},
  };
  return tbl;
}

bool valid_local_name(std::string_view local) {
  // Conservative subset of PN_LOCAL; anything else falls back to <full IRI>.
  for (char c : local) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

std::optional<std::string> prefixed_form(const std::string& iri,
                                         std::set<std::string>* used_prefixes) {
  for (const auto& [name, uri] : known_prefixes()) {
    if (iri.size() > uri.size() && iri.compare(0, uri.size(), uri) == 0) {
      std::string local = iri.substr(uri.size());
      if (valid_local_name(local) && local.find('/') == std::string::npos &&
          local.find('#') == std::string::npos) {
        if (used_prefixes) used_prefixes->insert(name);
        return name + ":" + local;
      }
    }
  }
  return std::nullopt;
}

std::string escape_turtle_string(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char raw : s) {
    unsigned char c = static_cast<unsigned char>(raw);
    switch (raw) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out.push_back(raw);
        }
    }
  }
  return out;
}

std::string iri_ref(const std::string& iri) {
  std::string out = "<";
  for (char raw : iri) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (c <= 0x20 || raw == '<' || raw == '>' || raw == '"' || raw == '{' || raw == '}' ||
        raw == '|' || raw == '^' || raw == '`' || raw == '\\') {
      char buf[8];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    } else {
      out.push_back(raw);
    }
  }
  out += ">";
  return out;
}

std::string turtle_node(const Node& n, std::set<std::string>* used_prefixes) {
  switch (n.kind) {
    case NodeKind::iri: {
      if (auto p = prefixed_form(n.value, used_prefixes)) return *p;
      return iri_ref(n.value);
    }
    case NodeKind::blank:
      return "_:" + n.value;
    case NodeKind::literal: {
      std::string out = "\"" + escape_turtle_string(n.value) + "\"";
      if (!n.lang.empty()) {
        out += "@" + n.lang;
      } else if (!n.datatype.empty()) {
        if (auto p = prefixed_form(n.datatype, used_prefixes)) {
          out += "^^" + *p;
        } else {
          out += "^^" + iri_ref(n.datatype);
        }
      }
      return out;
    }
  }
  return {};
}

}  // namespace

Graph parse_turtle(std::string_view content, std::string_view base) {
  return TurtleParser(content, base).parse();
}

std::string serialize_turtle(const Graph& g) {
  // Two passes: collect used prefixes, then emit. Ordering is fully
  // deterministic: sorted subjects, rdf:type first, then sorted predicates
  // and objects.
  std::set<std::string> used;
  const Node type_node = Node::iri(vocab::rdf_type);

  struct SubjectBlock {
    std::string rendered_subject;
    std::vector<std::pair<std::string, std::vector<std::string>>> predicates;
  };
  std::vector<SubjectBlock> blocks;

  std::set<Node> subjects = g.subjects();
  for (const Node& s : subjects) {
    SubjectBlock block;
    block.rendered_subject = turtle_node(s, &used);
    std::map<Node, std::vector<std::string>> by_predicate;
    for (const auto& t : g.with_subject(s)) {
      by_predicate[t.predicate].push_back(turtle_node(t.object, &used));
    }
    // rdf:type first under its 'a' shorthand, then remaining predicates
    // in sorted order.
    auto type_it = by_predicate.find(type_node);
    if (type_it != by_predicate.end()) {
      block.predicates.emplace_back("a", type_it->second);
      by_predicate.erase(type_it);
    }
    for (auto& [p, objs] : by_predicate) {
      block.predicates.emplace_back(turtle_node(p, &used), objs);
    }
    blocks.push_back(std::move(block));
  }

  std::ostringstream out;
  for (const auto& [name, uri] : known_prefixes()) {
    if (used.count(name) > 0) out << "@prefix " << name << ": <" << uri << "> .\n";
  }
  if (!used.empty() && !blocks.empty()) out << "\n";
  for (const auto& block : blocks) {
    out << block.rendered_subject;
    for (std::size_t i = 0; i < block.predicates.size(); ++i) {
      const auto& [pred, objs] = block.predicates[i];
      out << (i == 0 ? " " : " ;\n    ") << pred << " ";
      for (std::size_t k = 0; k < objs.size(); ++k) {
        if (k > 0) out << ", ";
        out << objs[k];
      }
    }
    out << " .\n";
  }
  return out.str();
}

}  // namespace wokie::rdf
