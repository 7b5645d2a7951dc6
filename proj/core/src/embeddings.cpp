#include "wokie/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "wokie/text.hpp"

namespace wokie::embeddings {

namespace {

std::set<std::string> read_vocab_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open vocabulary file: " + path);
  std::set<std::string> pieces;
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    std::string piece = tab == std::string::npos ? line : line.substr(0, tab);
    piece = text::trim(piece);
    if (!piece.empty()) pieces.insert(piece);
  }
  return pieces;
}

bool looks_binary(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0) return true;
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".txt") == 0) return false;
  std::ifstream in(path, std::ios::binary);
  char buf[256];
  in.read(buf, sizeof buf);
  const std::streamsize n = in.gcount();
  for (std::streamsize i = 0; i < n; ++i) {
    unsigned char c = static_cast<unsigned char>(buf[i]);
    if (c == 0 || (c < 0x09 && c != 0)) return true;
  }
  return false;
}

}  // namespace

EmbeddingModel EmbeddingModel::load(const std::string& vectors_path,
                                    const std::optional<std::string>& vocab_path,
                                    std::string language) {
  std::optional<std::set<std::string>> restrict_to;
  if (vocab_path) restrict_to = read_vocab_file(*vocab_path);

  EmbeddingModel model;
  model.language_ = std::move(language);

  std::ifstream in(vectors_path, std::ios::binary);
  if (!in) throw ModelError("cannot open vector file: " + vectors_path);

  std::size_t count = 0;
  int dim = 0;
  {
    std::string header;
    if (!std::getline(in, header)) throw ModelError("empty vector file: " + vectors_path);
    std::istringstream hs(header);
    if (!(hs >> count >> dim) || dim <= 0) {
      throw ModelError("malformed word2vec header in " + vectors_path);
    }
  }
  model.dim_ = dim;

  const bool binary = looks_binary(vectors_path);
  for (std::size_t i = 0; i < count && in; ++i) {
    std::string piece;
    std::vector<float> vec(static_cast<std::size_t>(dim));
    if (binary) {
      char c;
      while (in.get(c) && c != ' ') {
        if (c != '\n') piece.push_back(c);
      }
      in.read(reinterpret_cast<char*>(vec.data()),
              static_cast<std::streamsize>(sizeof(float) * vec.size()));
      if (!in) break;
    } else {
      if (!(in >> piece)) break;
      for (auto& v : vec) {
        if (!(in >> v)) throw ModelError("truncated vector row in " + vectors_path);
      }
    }
    if (restrict_to && restrict_to->count(piece) == 0) continue;
    model.add_piece(piece, std::move(vec));
  }
  if (model.vectors_.empty()) throw ModelError("no vectors loaded from " + vectors_path);
  return model;
}

void EmbeddingModel::add_piece(const std::string& piece, std::vector<float> vector) {
  if (dim_ == 0) dim_ = static_cast<int>(vector.size());
  if (static_cast<int>(vector.size()) != dim_) {
    throw ModelError("piece '" + piece + "' has dimension " +
                     std::to_string(vector.size()) + ", expected " + std::to_string(dim_));
  }
  max_piece_len_ = std::max(max_piece_len_, text::decode_utf8(piece).size());
  vectors_[piece] = std::move(vector);
}

std::vector<std::string> EmbeddingModel::tokenize(std::string_view word) const {
  // BPEmb convention: lowercase text, "▁" marks word starts.
  std::string lowered = text::casefold(text::nfc(word));
  std::u32string u = text::decode_utf8(std::string(kWordBoundary) + lowered);
  std::vector<std::string> pieces;
  std::size_t pos = 0;
  while (pos < u.size()) {
    const std::size_t max_len = std::min(max_piece_len_, u.size() - pos);
    std::string found;
    for (std::size_t len = max_len; len >= 1; --len) {
      std::string candidate = text::encode_utf8(std::u32string_view(u).substr(pos, len));
      if (vectors_.find(candidate) != vectors_.end()) {
        found = std::move(candidate);
        pos += len;
        break;
      }
    }
    if (found.empty()) {
      ++pos;  // unknown code point: skip
    } else {
      pieces.push_back(std::move(found));
    }
  }
  return pieces;
}

EmbeddingModel::EmbedResult EmbeddingModel::embed(std::string_view label) const {
  EmbedResult out;
  out.vec.assign(static_cast<std::size_t>(std::max(dim_, 0)), 0.0f);
  std::size_t piece_count = 0;

  std::u32string u = text::decode_utf8(label);
  std::u32string word;
  auto flush = [&] {
    if (word.empty()) return;
    for (const auto& piece : tokenize(text::encode_utf8(word))) {
      const auto& vec = vectors_.at(piece);
      for (std::size_t i = 0; i < vec.size(); ++i) out.vec[i] += vec[i];
      ++piece_count;
    }
    word.clear();
  };
  for (char32_t c : u) {
    if (text::is_space(c)) {
      flush();
    } else {
      word.push_back(c);
    }
  }
  flush();

  if (piece_count == 0) {
    out.zero = true;
    return out;
  }
  for (auto& v : out.vec) v /= static_cast<float>(piece_count);
  return out;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double cosine_sim(std::string_view a, std::string_view b, const EmbeddingModel& model,
                  bool* zero_flag) {
  auto ea = model.embed(a);
  auto eb = model.embed(b);
  if (zero_flag != nullptr) *zero_flag = ea.zero || eb.zero;
  if (ea.zero || eb.zero) return 0.0;
  return cosine(ea.vec, eb.vec);
}

}  // namespace wokie::embeddings
