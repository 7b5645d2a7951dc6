#include <doctest.h>

#include <algorithm>
#include <random>

#include "wokie/consensus.hpp"

using namespace wokie::consensus;
using wokie::providers::TranslationCandidate;

namespace {

TranslationCandidate cand(std::string text, std::string provider) {
  TranslationCandidate c;
  c.text = std::move(text);
  c.provider_id = std::move(provider);
  c.source_text = "src";
  c.source_lang = "en";
  return c;
}

const std::vector<std::string> kPriority = {"p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8"};

}  // namespace

TEST_CASE("three of five agreeing candidates pass threshold 0.6") {
  std::vector<TranslationCandidate> cs = {
      cand("Analyse", "p1"), cand("Analyse", "p2"), cand("Analyse", "p3"),
      cand("Auswertung", "p4"), cand("Untersuchung", "p5")};
  ConsensusResult r = score(cs, 0.6, kPriority);
  CHECK(r.best == "Analyse");
  CHECK(r.group_size == 3);
  CHECK(r.total == 5);
  CHECK(r.confidence == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.route == Route::accepted_by_frequency);
}

TEST_CASE("a singleton candidate is accepted with confidence 1") {
  std::vector<TranslationCandidate> cs = {cand("Marginalie", "p3")};
  ConsensusResult r = score(cs, 0.6, kPriority);
  CHECK(r.confidence == 1.0);
  CHECK(r.route == Route::accepted_by_frequency);
  CHECK(r.best_provider == "p3");
}

TEST_CASE("four distinct candidates need refinement at 0.6") {
  std::vector<TranslationCandidate> cs = {
      cand("Randnotiz", "p1"), cand("Marginalglosse", "p2"), cand("Glosse", "p3"),
      cand("Marginalie", "p4")};
  ConsensusResult r = score(cs, 0.6, kPriority);
  CHECK(r.confidence == doctest::Approx(0.25));
  CHECK(r.route == Route::needs_refinement);
  CHECK(r.best == "Randnotiz");  // tie broken by provider priority
}

TEST_CASE("grouping is case and diacritics sensitive but NFC insensitive") {
  std::vector<TranslationCandidate> cs = {
      cand("Café", "p1"),          // precomposed é
      cand("Café", "p2"),         // combining accent, same after NFC
      cand("café", "p3"),         // lowercase differs
  };
  ConsensusResult r = score(cs, 0.5, kPriority);
  CHECK(r.best == "Café");
  CHECK(r.group_size == 2);
}

TEST_CASE("whitespace is trimmed before grouping") {
  std::vector<TranslationCandidate> cs = {cand(" Analyse ", "p2"), cand("Analyse", "p5")};
  ConsensusResult r = score(cs, 0.9, kPriority);
  CHECK(r.group_size == 2);
  CHECK(r.best == "Analyse");
  CHECK(r.best_provider == "p2");
}

TEST_CASE("tie-break prefers provider priority then lexicographic text") {
  // two groups of size 1; p1 beats p2
  std::vector<TranslationCandidate> a = {cand("Zebra", "p1"), cand("Apfel", "p2")};
  CHECK(score(a, 1.0, kPriority).best == "Zebra");
  // both from unknown providers: lexicographic
  std::vector<TranslationCandidate> b = {cand("Zebra", "x"), cand("Apfel", "y")};
  CHECK(score(b, 1.0, kPriority).best == "Apfel");
}

TEST_CASE("empty candidate list throws") {
  std::vector<TranslationCandidate> none;
  CHECK_THROWS_AS(score(none, 0.6, kPriority), EmptyCandidates);
  CHECK_THROWS_AS(fallback_pick(none, kPriority), EmptyCandidates);
}

TEST_CASE("threshold edge cases") {
  std::vector<TranslationCandidate> cs = {cand("a", "p1"), cand("b", "p2"), cand("c", "p3")};
  // t <= 1/total always accepts
  CHECK(score(cs, 1.0 / 3.0, kPriority).route == Route::accepted_by_frequency);
  // t = 1 accepts only unanimity
  CHECK(score(cs, 1.0, kPriority).route == Route::needs_refinement);
  std::vector<TranslationCandidate> same = {cand("a", "p1"), cand("a", "p2")};
  CHECK(score(same, 1.0, kPriority).route == Route::accepted_by_frequency);
}

TEST_CASE("permutation invariance") {
  std::vector<TranslationCandidate> cs = {
      cand("Analyse", "p5"), cand("Analyse", "p2"), cand("Auswertung", "p1"),
      cand("Analyse", "p7"), cand("Untersuchung", "p3")};
  ConsensusResult reference = score(cs, 0.6, kPriority);
  std::mt19937 rng(42);
  for (int i = 0; i < 30; ++i) {
    std::shuffle(cs.begin(), cs.end(), rng);
    ConsensusResult r = score(cs, 0.6, kPriority);
    CHECK(r.best == reference.best);
    CHECK(r.confidence == reference.confidence);
    CHECK(r.group_size == reference.group_size);
    CHECK(r.best_provider == reference.best_provider);
  }
}

TEST_CASE("adding a candidate equal to the winner never decreases confidence") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> count(1, 8), word(0, 3), prov(1, 8);
  const char* words[] = {"alpha", "beta", "gamma", "delta"};
  for (int round = 0; round < 200; ++round) {
    std::vector<TranslationCandidate> cs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      cs.push_back(cand(words[word(rng)], "p" + std::to_string(prov(rng))));
    }
    ConsensusResult before = score(cs, 0.6, kPriority);
    cs.push_back(cand(before.best, "p" + std::to_string(prov(rng))));
    ConsensusResult after = score(cs, 0.6, kPriority);
    CHECK(after.confidence >= before.confidence);
    CHECK(after.best == before.best);
  }
}

TEST_CASE("fallback_pick equals score().best and is always a candidate text") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> count(1, 8), word(0, 4), prov(1, 8);
  const char* words[] = {"alpha", "beta", "gamma", "delta", "epsilon"};
  for (int round = 0; round < 200; ++round) {
    std::vector<TranslationCandidate> cs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      cs.push_back(cand(words[word(rng)], "p" + std::to_string(prov(rng))));
    }
    ConsensusResult scored = score(cs, 0.6, kPriority);
    const std::string picked = fallback_pick(cs, kPriority);
    CHECK(picked == scored.best);
    CHECK(std::any_of(cs.begin(), cs.end(),
                      [&](const TranslationCandidate& c) { return c.text == picked; }));
  }
}
