#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "wokie/consensus.hpp"
#include "wokie/rdf.hpp"
#include "wokie/simeval.hpp"
#include "wokie/text.hpp"

namespace {

std::string random_word(std::mt19937& rng, int length) {
  static const std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyzäöüß";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::u32string s;
  for (int i = 0; i < length; ++i) s.push_back(alphabet[pick(rng)]);
  return wokie::text::encode_utf8(s);
}

void BM_levenshtein(benchmark::State& state) {
  std::mt19937 rng(1);
  const std::string a = random_word(rng, static_cast<int>(state.range(0)));
  const std::string b = random_word(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(wokie::simeval::levenshtein_sim(a, b));
  }
}
BENCHMARK(BM_levenshtein)->Arg(8)->Arg(32)->Arg(128);

void BM_jaro_winkler(benchmark::State& state) {
  std::mt19937 rng(2);
  const std::string a = random_word(rng, static_cast<int>(state.range(0)));
  const std::string b = random_word(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(wokie::simeval::jaro_winkler_sim(a, b));
  }
}
BENCHMARK(BM_jaro_winkler)->Arg(8)->Arg(32)->Arg(128);

void BM_nfc_normalize(benchmark::State& state) {
  std::string s;
  for (int i = 0; i < state.range(0); ++i) s += "Veröffentlichung ";
  for (auto _ : state) {
    benchmark::DoNotOptimize(wokie::text::nfc(s));
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(s.size()));
}
BENCHMARK(BM_nfc_normalize)->Arg(1)->Arg(16);

void BM_consensus_score(benchmark::State& state) {
  std::mt19937 rng(3);
  std::vector<std::string> priority;
  for (int i = 1; i <= 8; ++i) priority.push_back("p" + std::to_string(i));
  std::vector<wokie::providers::TranslationCandidate> candidates;
  std::uniform_int_distribution<int> word(0, 3), prov(1, 8);
  const char* words[] = {"Analyse", "Auswertung", "Untersuchung", "Prüfung"};
  for (int i = 0; i < state.range(0); ++i) {
    wokie::providers::TranslationCandidate c;
    c.text = words[word(rng)];
    c.provider_id = "p" + std::to_string(prov(rng));
    candidates.push_back(c);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(wokie::consensus::score(candidates, 0.6, priority));
  }
}
BENCHMARK(BM_consensus_score)->Arg(5)->Arg(50);

void BM_parse_tadirah(benchmark::State& state) {
  const std::string path = std::string(WOKIE_FIXTURE_DIR) + "/tadirah.ttl";
  wokie::rdf::Graph g = wokie::rdf::parse_file(path);
  const std::string turtle = wokie::rdf::serialize_turtle(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wokie::rdf::parse_turtle(turtle));
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(turtle.size()));
}
BENCHMARK(BM_parse_tadirah);

void BM_serialize_tadirah(benchmark::State& state) {
  const std::string path = std::string(WOKIE_FIXTURE_DIR) + "/tadirah.ttl";
  wokie::rdf::Graph g = wokie::rdf::parse_file(path);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wokie::rdf::serialize_turtle(g));
  }
}
BENCHMARK(BM_serialize_tadirah);

}  // namespace

BENCHMARK_MAIN();
