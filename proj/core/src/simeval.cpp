#include "wokie/simeval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wokie/text.hpp"

namespace wokie::simeval {

using nlohmann::json;

int exact_match(std::string_view a, std::string_view b) {
  return text::casefold(text::nfc(a)) == text::casefold(text::nfc(b)) ? 1 : 0;
}

double levenshtein_sim(std::string_view a, std::string_view b) {
  const std::u32string ua = text::decode_utf8(a);
  const std::u32string ub = text::decode_utf8(b);
  const std::size_t la = ua.size(), lb = ub.size();
  if (la == 0 && lb == 0) return 1.0;
  if (la == 0 || lb == 0) return 0.0;

  std::vector<std::size_t> prev(lb + 1), cur(lb + 1);
  for (std::size_t j = 0; j <= lb; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= la; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= lb; ++j) {
      const std::size_t cost = ua[i - 1] == ub[j - 1] ? 0 : 1;
      cur[j] = std::min({cur[j - 1] + 1, prev[j] + 1, prev[j - 1] + cost});
    }
    std::swap(prev, cur);
  }
  const double distance = static_cast<double>(prev[lb]);
  return 1.0 - distance / static_cast<double>(std::max(la, lb));
}

double jaro_winkler_sim(std::string_view a, std::string_view b) {
  const std::u32string ua = text::decode_utf8(a);
  const std::u32string ub = text::decode_utf8(b);
  const std::size_t la = ua.size(), lb = ub.size();
  if (ua == ub) return 1.0;
  if (la == 0 || lb == 0) return 0.0;

  const std::size_t max_len = std::max(la, lb);
  const std::size_t window = max_len / 2 == 0 ? 0 : max_len / 2 - 1;

  std::vector<bool> a_matched(la, false), b_matched(lb, false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < la; ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(lb, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (b_matched[j] || ua[i] != ub[j]) continue;
      a_matched[i] = true;
      b_matched[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  // Transpositions: matched characters out of order, halved.
  std::size_t half_transpositions = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < la; ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (ua[i] != ub[j]) ++half_transpositions;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions) / 2.0;
  const double jaro = (m / static_cast<double>(la) + m / static_cast<double>(lb) +
                       (m - t) / m) / 3.0;

  std::size_t prefix = 0;
  for (std::size_t i = 0; i < std::min({la, lb, std::size_t{4}}); ++i) {
    if (ua[i] != ub[i]) break;
    ++prefix;
  }
  constexpr double p = 0.1;
  return jaro + static_cast<double>(prefix) * p * (1.0 - jaro);
}

namespace {

SimilarityScores score_pair(const std::vector<std::string>& originals,
                            const std::string& backtranslation, const MeasureSet& measures,
                            const embeddings::EmbeddingModel* model) {
  // Best score per measure across all originals of the concept.
  SimilarityScores best;
  best.cosine_raw = -1.0;
  bool first = true;
  for (const auto& original : originals) {
    SimilarityScores s;
    if (measures.exact) s.exact = exact_match(original, backtranslation);
    if (measures.levenshtein) s.levenshtein = levenshtein_sim(original, backtranslation);
    if (measures.jaro_winkler) s.jaro_winkler = jaro_winkler_sim(original, backtranslation);
    if (measures.cosine && model != nullptr) {
      s.cosine_raw = embeddings::cosine_sim(original, backtranslation, *model, &s.zero_vector);
      s.cosine = std::clamp(s.cosine_raw, 0.0, 1.0);
    }
    if (first) {
      best = s;
      first = false;
    } else {
      best.exact = std::max(best.exact, s.exact);
      best.levenshtein = std::max(best.levenshtein, s.levenshtein);
      best.jaro_winkler = std::max(best.jaro_winkler, s.jaro_winkler);
      if (s.cosine_raw > best.cosine_raw) {
        best.cosine_raw = s.cosine_raw;
        best.cosine = s.cosine;
        best.zero_vector = s.zero_vector;
      }
    }
  }
  return best;
}

}  // namespace

SimilarityReport evaluate_backtranslation(const skos::Thesaurus& original,
                                          const std::string& lang,
                                          const skos::LabelProperty& prop,
                                          const TranslateFn& translate,
                                          const embeddings::EmbeddingModel* model,
                                          MeasureSet measures) {
  if (measures.cosine && (model == nullptr || model->empty())) throw ModelMissing(lang);

  auto [stripped, removed] = skos::strip_language(original, lang, prop);

  const auto t0 = std::chrono::steady_clock::now();
  skos::Thesaurus translated = translate(stripped);
  const double translate_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  SimilarityReport report;
  report.measures = measures;
  report.translate_seconds = translate_seconds;

  for (const auto& [iri, originals] : removed) {
    TermScore ts;
    ts.iri = iri;
    ts.originals = originals;
    std::vector<std::string> back = skos::labels_of(translated, iri, prop, lang);
    if (back.empty()) {
      ts.untranslated = true;
      report.untranslated_count += 1;
    } else {
      ts.backtranslation = back.front();
      ts.scores = score_pair(originals, ts.backtranslation, measures, model);
    }
    report.terms.push_back(std::move(ts));
  }

  report.term_count = static_cast<int>(report.terms.size());
  if (report.term_count > 0) {
    for (const auto& ts : report.terms) {
      report.macro_exact += ts.scores.exact;
      report.macro_levenshtein += ts.scores.levenshtein;
      report.macro_jaro_winkler += ts.scores.jaro_winkler;
      report.macro_cosine += ts.scores.cosine;
    }
    const double n = static_cast<double>(report.term_count);
    report.macro_exact /= n;
    report.macro_levenshtein /= n;
    report.macro_jaro_winkler /= n;
    report.macro_cosine /= n;
    report.per_term_seconds = translate_seconds / n;
  }
  return report;
}

std::string SimilarityReport::to_json() const {
  json j;
  j["term_count"] = term_count;
  j["untranslated_count"] = untranslated_count;
  json macro;
  if (measures.exact) macro["exact"] = macro_exact;
  if (measures.levenshtein) macro["levenshtein"] = macro_levenshtein;
  if (measures.jaro_winkler) macro["jaro_winkler"] = macro_jaro_winkler;
  if (measures.cosine) macro["cosine"] = macro_cosine;
  j["macro_averages"] = std::move(macro);
  j["timings"] = {{"translate_seconds", translate_seconds},
                  {"per_term_seconds", per_term_seconds}};
  json detail = json::array();
  for (const auto& ts : terms) {
    json row;
    row["iri"] = ts.iri;
    row["originals"] = ts.originals;
    row["backtranslation"] = ts.backtranslation;
    row["untranslated"] = ts.untranslated;
    json scores;
    if (measures.exact) scores["exact"] = ts.scores.exact;
    if (measures.levenshtein) scores["levenshtein"] = ts.scores.levenshtein;
    if (measures.jaro_winkler) scores["jaro_winkler"] = ts.scores.jaro_winkler;
    if (measures.cosine) {
      scores["cosine"] = ts.scores.cosine;
      scores["cosine_raw"] = ts.scores.cosine_raw;
      scores["zero_vector"] = ts.scores.zero_vector;
    }
    row["scores"] = std::move(scores);
    detail.push_back(std::move(row));
  }
  j["terms"] = std::move(detail);
  return j.dump(2);
}

std::string SimilarityReport::to_csv() const {
  std::ostringstream out;
  out << "metric,value\n";
  auto emit = [&](const char* name, double v) { out << name << "," << v << "\n"; };
  if (measures.exact) emit("exact", macro_exact);
  if (measures.levenshtein) emit("levenshtein", macro_levenshtein);
  if (measures.jaro_winkler) emit("jaro_winkler", macro_jaro_winkler);
  if (measures.cosine) emit("cosine", macro_cosine);
  out << "terms," << term_count << "\n";
  out << "untranslated," << untranslated_count << "\n";
  out << "translate_seconds," << translate_seconds << "\n";
  return out.str();
}

}  // namespace wokie::simeval
