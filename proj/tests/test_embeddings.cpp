#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "wokie/embeddings.hpp"

using namespace wokie::embeddings;

namespace {

const std::string kBoundary = std::string(kWordBoundary);

EmbeddingModel tiny_model() {
  EmbeddingModel m("de", 3);
  m.add_piece(kBoundary + "archivier", {1.0f, 0.0f, 0.0f});
  m.add_piece(kBoundary + "schreib", {0.0f, 1.0f, 0.0f});
  m.add_piece("ung", {0.0f, 0.0f, 1.0f});
  m.add_piece("en", {0.0f, 0.5f, 0.5f});
  return m;
}

}  // namespace

TEST_CASE("tokenize uses greedy longest match with word boundary") {
  EmbeddingModel m = tiny_model();
  CHECK(m.tokenize("archivieren") ==
        std::vector<std::string>{kBoundary + "archivier", "en"});
  CHECK(m.tokenize("archivierung") ==
        std::vector<std::string>{kBoundary + "archivier", "ung"});
  CHECK(m.tokenize("Schreiben") == std::vector<std::string>{kBoundary + "schreib", "en"});
  CHECK(m.tokenize("zzz").empty());
}

TEST_CASE("embed averages piece vectors over all words") {
  EmbeddingModel m = tiny_model();
  auto r = m.embed("archivierung");
  REQUIRE(!r.zero);
  CHECK(r.vec[0] == doctest::Approx(0.5));
  CHECK(r.vec[1] == doctest::Approx(0.0));
  CHECK(r.vec[2] == doctest::Approx(0.5));

  auto multi = m.embed("archivierung schreiben");
  REQUIRE(!multi.zero);
  // pieces: ▁archivier, ung, ▁schreib, en -> mean of four vectors
  CHECK(multi.vec[0] == doctest::Approx(0.25));
  CHECK(multi.vec[1] == doctest::Approx(0.375));
  CHECK(multi.vec[2] == doctest::Approx(0.375));
}

TEST_CASE("embedding with no known pieces flags a zero vector") {
  EmbeddingModel m = tiny_model();
  auto r = m.embed("xyz");
  CHECK(r.zero);
  bool flag = false;
  CHECK(cosine_sim("xyz", "archivieren", m, &flag) == 0.0);
  CHECK(flag);
}

TEST_CASE("cosine identities") {
  EmbeddingModel m = tiny_model();
  bool flag = true;
  CHECK(cosine_sim("archivieren", "archivieren", m, &flag) == doctest::Approx(1.0));
  CHECK(!flag);
  // scale invariance at the vector level
  std::vector<float> u = {1.0f, 2.0f, 3.0f};
  std::vector<float> v = {0.5f, 1.0f, 1.5f};
  CHECK(cosine(u, v) == doctest::Approx(1.0));
  std::vector<float> w = {3.0f, 6.0f, 9.0f};
  CHECK(cosine(u, w) == doctest::Approx(cosine(u, v)));
}

TEST_CASE("morphological relatives score above unrelated words") {
  EmbeddingModel m = tiny_model();
  const double related = cosine_sim("Archivieren", "Archivierung", m);
  const double unrelated = cosine_sim("Archivieren", "Schreiben", m);
  CHECK(related > unrelated);
}

TEST_CASE("word2vec text loader round trip") {
  const std::string path = "/tmp/wokie_test_vectors.txt";
  {
    std::ofstream out(path);
    out << "3 2\n";
    out << kBoundary + "ha" << " 1.0 0.0\n";
    out << kBoundary + "welt" << " 0.0 1.0\n";
    out << "us 0.5 0.5\n";
  }
  EmbeddingModel m = EmbeddingModel::load(path, std::nullopt, "de");
  CHECK(m.dim() == 2);
  CHECK(m.vocab_size() == 3);
  CHECK(m.language() == "de");
  CHECK(m.tokenize("haus") == std::vector<std::string>{kBoundary + "ha", "us"});
  std::remove(path.c_str());
}

TEST_CASE("word2vec binary loader matches the text loader") {
  const std::string text_path = "/tmp/wokie_test_vectors2.txt";
  const std::string bin_path = "/tmp/wokie_test_vectors2.bin";
  {
    std::ofstream out(text_path);
    out << "2 3\n";
    out << kBoundary + "ab" << " 0.25 -1.5 3.0\n";
    out << "cd 0.125 2.0 -0.5\n";
  }
  {
    std::ofstream out(bin_path, std::ios::binary);
    out << "2 3\n";
    const float v1[3] = {0.25f, -1.5f, 3.0f};
    const float v2[3] = {0.125f, 2.0f, -0.5f};
    out << kBoundary + "ab" << " ";
    out.write(reinterpret_cast<const char*>(v1), sizeof v1);
    out << "\n";
    out << "cd ";
    out.write(reinterpret_cast<const char*>(v2), sizeof v2);
    out << "\n";
  }
  EmbeddingModel text_model = EmbeddingModel::load(text_path, std::nullopt, "de");
  EmbeddingModel bin_model = EmbeddingModel::load(bin_path, std::nullopt, "de");
  CHECK(text_model.vocab_size() == bin_model.vocab_size());
  auto a = text_model.embed("abcd");
  auto b = bin_model.embed("abcd");
  REQUIRE(!a.zero);
  REQUIRE(!b.zero);
  for (std::size_t i = 0; i < a.vec.size(); ++i) {
    CHECK(a.vec[i] == doctest::Approx(b.vec[i]));
  }
  std::remove(text_path.c_str());
  std::remove(bin_path.c_str());
}

TEST_CASE("vocab file restricts the vocabulary") {
  const std::string vectors = "/tmp/wokie_test_vectors3.txt";
  const std::string vocab = "/tmp/wokie_test_vocab3.txt";
  {
    std::ofstream out(vectors);
    out << "2 2\n";
    out << "aa 1.0 0.0\n";
    out << "bb 0.0 1.0\n";
  }
  {
    std::ofstream out(vocab);
    out << "aa\t-2.5\n";
  }
  EmbeddingModel m = EmbeddingModel::load(vectors, vocab, "de");
  CHECK(m.vocab_size() == 1);
  std::remove(vectors.c_str());
  std::remove(vocab.c_str());
}

TEST_CASE("loader rejects malformed files") {
  const std::string path = "/tmp/wokie_test_vectors_bad.txt";
  {
    std::ofstream out(path);
    out << "not a header\n";
  }
  CHECK_THROWS_AS(EmbeddingModel::load(path, std::nullopt, "de"), ModelError);
  CHECK_THROWS_AS(EmbeddingModel::load("/nonexistent/file.txt", std::nullopt, "de"),
                  ModelError);
  std::remove(path.c_str());
}

TEST_CASE("dimension mismatches are rejected") {
  EmbeddingModel m("de", 2);
  m.add_piece("ab", {1.0f, 0.0f});
  CHECK_THROWS_AS(m.add_piece("cd", {1.0f, 0.0f, 0.0f}), ModelError);
}
