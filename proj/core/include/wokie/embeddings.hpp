#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wokie::embeddings {

class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Subword embedding model: a piece vocabulary with one dense vector per
/// piece. Words are lowercased, prefixed with the word-boundary marker and
/// segmented greedily (longest piece first); a word's vector is the mean of
/// its piece vectors.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::string language, int dim) : language_(std::move(language)), dim_(dim) {}

  /// `vectors_path` is a word2vec file (.bin or .txt); `vocab_path` is an
  /// optional piece list ("piece<TAB>score" or one piece per line) that
  /// restricts the vocabulary.
  static EmbeddingModel load(const std::string& vectors_path,
                             const std::optional<std::string>& vocab_path,
                             std::string language);

  void add_piece(const std::string& piece, std::vector<float> vector);

  int dim() const { return dim_; }
  std::size_t vocab_size() const { return vectors_.size(); }
  const std::string& language() const { return language_; }
  bool empty() const { return vectors_.empty(); }

  /// Greedy longest-match segmentation of one word into known pieces.
  std::vector<std::string> tokenize(std::string_view word) const;

  struct EmbedResult {
    std::vector<float> vec;
    bool zero = false;  // no piece mapped to a vector
  };

  /// Multi-word labels are split on whitespace; the embedding is the mean
  /// over all pieces of all words.
  EmbedResult embed(std::string_view label) const;

 private:
  std::string language_;
  int dim_ = 0;
  std::map<std::string, std::vector<float>, std::less<>> vectors_;
  std::size_t max_piece_len_ = 0;  // in code points
};

double cosine(std::span<const float> a, std::span<const float> b);

/// Cosine similarity of two labels under one model; zero embeddings yield 0
/// and set the flag.
double cosine_sim(std::string_view a, std::string_view b, const EmbeddingModel& model,
                  bool* zero_flag = nullptr);

inline constexpr std::string_view kWordBoundary = "▁";  // "▁"

}  // namespace wokie::embeddings
