#include <doctest.h>

#include <random>

#include "wokie/rdf.hpp"

using namespace wokie::rdf;

namespace {
const std::string kFixtures = WOKIE_FIXTURE_DIR;
}

TEST_CASE("turtle parses prefixes, lang tags and object lists") {
  const std::string ttl = R"(
@prefix skos: <http://www.w3.org/2004/02/skos/core#> .
@prefix ex: <http://example.org/> .
ex:a a skos:Concept ;
    skos:prefLabel "one"@en, "eins"@de ;
    skos:broader ex:b .
)";
  Graph g = parse_turtle(ttl);
  CHECK(g.size() == 4);
  auto labels = g.objects(Node::iri("http://example.org/a"),
                          Node::iri(std::string(ns::skos) + "prefLabel"));
  REQUIRE(labels.size() == 2);
  CHECK(labels[0].lang == "de");
  CHECK(labels[1].lang == "en");
}

TEST_CASE("turtle literal forms") {
  const std::string ttl = R"(
@prefix ex: <http://example.org/> .
ex:s ex:str "plain" ;
     ex:esc "line\nbreak \"quoted\"" ;
     ex:long """multi
line""" ;
     ex:typed "42"^^<http://www.w3.org/2001/XMLSchema#integer> ;
     ex:num 42 ;
     ex:dec 4.5 ;
     ex:neg -7 ;
     ex:bool true ;
     ex:uni "école" .
)";
  Graph g = parse_turtle(ttl);
  const Node s = Node::iri("http://example.org/s");
  CHECK(g.objects(s, Node::iri("http://example.org/esc"))[0].value == "line\nbreak \"quoted\"");
  CHECK(g.objects(s, Node::iri("http://example.org/long"))[0].value == "multi\nline");
  // a typed "42" and the bare 42 coincide
  CHECK(g.objects(s, Node::iri("http://example.org/typed"))[0] ==
        g.objects(s, Node::iri("http://example.org/num"))[0]);
  CHECK(g.objects(s, Node::iri("http://example.org/dec"))[0].datatype == vocab::xsd_decimal);
  CHECK(g.objects(s, Node::iri("http://example.org/bool"))[0].datatype == vocab::xsd_boolean);
  CHECK(g.objects(s, Node::iri("http://example.org/uni"))[0].value == "école");
}

TEST_CASE("turtle xsd:string collapses to plain literal") {
  const std::string ttl =
      "<http://e/s> <http://e/p> \"x\"^^<http://www.w3.org/2001/XMLSchema#string> .\n"
      "<http://e/s> <http://e/q> \"x\" .";
  Graph g = parse_turtle(ttl);
  CHECK(g.objects(Node::iri("http://e/s"), Node::iri("http://e/p"))[0] ==
        g.objects(Node::iri("http://e/s"), Node::iri("http://e/q"))[0]);
}

TEST_CASE("turtle blank nodes and collections") {
  const std::string ttl = R"(
@prefix ex: <http://example.org/> .
_:b1 ex:p "v" .
ex:a ex:anon [ ex:inner "w" ] .
ex:l ex:list ("x" "y") .
)";
  Graph g = parse_turtle(ttl);
  CHECK(g.size() == 8);  // 1 + 2 + 1 + 2*2 list cells
  bool found_inner = false;
  for (const auto& t : g) {
    if (t.predicate == Node::iri("http://example.org/inner")) {
      CHECK(t.subject.is_blank());
      found_inner = true;
    }
  }
  CHECK(found_inner);
}

TEST_CASE("turtle base resolution") {
  const std::string ttl = R"(
@base <http://example.org/dir/doc> .
<#frag> <rel> <../up> .
)";
  Graph g = parse_turtle(ttl);
  REQUIRE(g.size() == 1);
  const Triple t = *g.begin();
  CHECK(t.subject.value == "http://example.org/dir/doc#frag");
  CHECK(t.predicate.value == "http://example.org/dir/rel");
  CHECK(t.object.value == "http://example.org/up");
}

TEST_CASE("turtle parse errors carry position") {
  CHECK_THROWS_AS(parse_turtle("<http://a> <http://b> ."), ParseError);
  CHECK_THROWS_AS(parse_turtle("@prefix broken <http://x> ."), ParseError);
  CHECK_THROWS_AS(parse_turtle("ex:a ex:b ex:c ."), ParseError);  // undefined prefix
  try {
    parse_turtle("<http://a> <http://b>\n  \"unterminated .");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 2);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("rdfxml parses the small fixture identically to turtle") {
  Graph ttl = parse_file(kFixtures + "/small3.ttl");
  Graph xml = parse_file(kFixtures + "/small3.rdf");
  CHECK(ttl.size() == 16);
  CHECK(ttl == xml);
}

TEST_CASE("rdfxml handles nested nodes, nodeID and datatypes") {
  const std::string xml = R"(<?xml version="1.0"?>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:ex="http://example.org/">
  <rdf:Description rdf:about="http://example.org/a">
    <ex:count rdf:datatype="http://www.w3.org/2001/XMLSchema#integer">3</ex:count>
    <ex:child>
      <rdf:Description rdf:nodeID="inner">
        <ex:p xml:lang="de">wert &amp; mehr</ex:p>
      </rdf:Description>
    </ex:child>
  </rdf:Description>
</rdf:RDF>)";
  Graph g = parse_rdfxml(xml);
  CHECK(g.size() == 3);
  auto counts = g.objects(Node::iri("http://example.org/a"), Node::iri("http://example.org/count"));
  REQUIRE(counts.size() == 1);
  CHECK(counts[0].datatype == vocab::xsd_integer);
  bool found = false;
  for (const auto& t : g) {
    if (t.predicate == Node::iri("http://example.org/p")) {
      CHECK(t.object.value == "wert & mehr");
      CHECK(t.object.lang == "de");
      CHECK(t.subject.is_blank());
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("serialize then parse is a fixed point on fixtures") {
  for (const char* fixture : {"/small3.ttl", "/bnodes.ttl", "/tadirah.ttl"}) {
    Graph g = parse_file(kFixtures + fixture);
    Graph again_ttl = parse_turtle(serialize_turtle(g));
    CHECK(again_ttl == g);
    Graph again_xml = parse_rdfxml(serialize_rdfxml(g));
    CHECK(again_xml == g);
  }
}

TEST_CASE("serialization is deterministic") {
  Graph g = parse_file(kFixtures + "/tadirah.ttl");
  CHECK(serialize_turtle(g) == serialize_turtle(g));
  Graph reparsed = parse_turtle(serialize_turtle(g));
  CHECK(serialize_turtle(reparsed) == serialize_turtle(g));
}

namespace {

Graph random_graph(std::mt19937& rng) {
  Graph g;
  std::uniform_int_distribution<int> subj(0, 5), pred(0, 3), kind(0, 3), lang(0, 2);
  const char* langs[] = {"en", "de", "fr"};
  const int triples = std::uniform_int_distribution<int>(1, 25)(rng);
  for (int i = 0; i < triples; ++i) {
    Node s = subj(rng) < 4 ? Node::iri("http://example.org/s" + std::to_string(subj(rng)))
                           : Node::blank("b" + std::to_string(subj(rng)));
    Node p = Node::iri("http://example.org/p" + std::to_string(pred(rng)));
    Node o;
    switch (kind(rng)) {
      case 0: o = Node::iri("http://example.org/o" + std::to_string(subj(rng))); break;
      case 1: o = Node::blank("b" + std::to_string(subj(rng))); break;
      case 2:
        o = Node::literal("lit \"x\"\n" + std::to_string(pred(rng)), langs[lang(rng)]);
        break;
      default:
        o = Node::literal(std::to_string(pred(rng)), {}, vocab::xsd_integer);
    }
    g.insert({s, p, o});
  }
  return g;
}

}  // namespace

TEST_CASE("round trip property on random graphs") {
  std::mt19937 rng(20250809);
  for (int round = 0; round < 50; ++round) {
    Graph g = random_graph(rng);
    CHECK(parse_turtle(serialize_turtle(g)) == g);
    CHECK(parse_rdfxml(serialize_rdfxml(g)) == g);
  }
}

TEST_CASE("isomorphic compares graphs up to blank labels") {
  Graph a = parse_turtle("_:x <http://e/p> \"v\" . _:x <http://e/q> _:y .");
  Graph b = parse_turtle("_:m <http://e/p> \"v\" . _:m <http://e/q> _:n .");
  Graph c = parse_turtle("_:m <http://e/p> \"w\" . _:m <http://e/q> _:n .");
  CHECK(isomorphic(a, b));
  CHECK(!isomorphic(a, c));
}

TEST_CASE("superset check") {
  Graph g = parse_file(kFixtures + "/small3.ttl");
  Graph h = g;
  h.insert({Node::iri("http://example.org/c1"),
            Node::iri(std::string(ns::skos) + "prefLabel"),
            Node::literal("Marginalie", "de")});
  CHECK(h.is_superset_of(g));
  CHECK(!g.is_superset_of(h));
  CHECK(h.size() == g.size() + 1);
}

TEST_CASE("format detection") {
  CHECK(detect_format("x.ttl", {}) == Format::turtle);
  CHECK(detect_format("x.rdf", {}) == Format::rdfxml);
  CHECK(detect_format("x.xml", {}) == Format::rdfxml);
  CHECK(detect_format("noext", "<?xml version=\"1.0\"?><rdf:RDF xmlns:rdf=\"x\"/>") ==
        Format::rdfxml);
  CHECK(detect_format("noext", "@prefix ex: <http://e/> .") == Format::turtle);
}

TEST_CASE("empty but valid turtle yields empty graph") {
  Graph g = parse_turtle("# just a comment\n@prefix ex: <http://e/> .\n");
  CHECK(g.empty());
}
