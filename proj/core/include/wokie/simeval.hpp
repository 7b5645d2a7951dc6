#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wokie/embeddings.hpp"
#include "wokie/skos.hpp"

namespace wokie::simeval {

/// Case-insensitive string equality (NFC + casefold). 1 or 0.
int exact_match(std::string_view a, std::string_view b);

/// 1 - d(a,b) / max(|a|,|b|) over Unicode scalar values; both empty -> 1.
double levenshtein_sim(std::string_view a, std::string_view b);

/// Jaro similarity with the Winkler prefix boost (prefix up to 4, p = 0.1).
double jaro_winkler_sim(std::string_view a, std::string_view b);

struct SimilarityScores {
  int exact = 0;
  double levenshtein = 0.0;
  double jaro_winkler = 0.0;
  double cosine = 0.0;      // clamped to [0, 1]
  double cosine_raw = 0.0;  // unclamped
  bool zero_vector = false;
};

struct TermScore {
  std::string iri;
  std::vector<std::string> originals;
  std::string backtranslation;  // empty when untranslated
  bool untranslated = false;
  SimilarityScores scores;
};

struct MeasureSet {
  bool exact = true;
  bool levenshtein = true;
  bool jaro_winkler = true;
  bool cosine = true;

  static MeasureSet all() { return {}; }
};

struct SimilarityReport {
  std::vector<TermScore> terms;
  MeasureSet measures;
  int term_count = 0;
  int untranslated_count = 0;
  double macro_exact = 0.0;
  double macro_levenshtein = 0.0;
  double macro_jaro_winkler = 0.0;
  double macro_cosine = 0.0;
  double translate_seconds = 0.0;
  double per_term_seconds = 0.0;

  std::string to_json() const;  // per-term detail
  std::string to_csv() const;   // aggregates
};

class ModelMissing : public std::runtime_error {
 public:
  explicit ModelMissing(const std::string& lang)
      : std::runtime_error("no embedding model available for language: " + lang) {}
};

using TranslateFn = std::function<skos::Thesaurus(const skos::Thesaurus&)>;

/// Back-translation test: strip `lang` from the thesaurus, run the
/// translator, pair results with the removed originals by concept and score
/// all requested measures. Untranslated concepts score 0 everywhere and are
/// counted separately. Multi-label concepts keep the best score per measure.
SimilarityReport evaluate_backtranslation(const skos::Thesaurus& original,
                                          const std::string& lang,
                                          const skos::LabelProperty& prop,
                                          const TranslateFn& translate,
                                          const embeddings::EmbeddingModel* model = nullptr,
                                          MeasureSet measures = MeasureSet::all());

}  // namespace wokie::simeval
