#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wokie/providers.hpp"

namespace wokie::consensus {

enum class Route { accepted_by_frequency, needs_refinement };

/// Candidates are grouped by exact string equality after trimming and NFC
/// normalization (case- and diacritics-sensitive). Confidence is the winning
/// group size over the candidate count.
struct ConsensusResult {
  std::string best;          // canonical surface form of the winning group
  double confidence = 0.0;   // group_size / total, exactly
  int group_size = 0;
  int total = 0;
  Route route = Route::needs_refinement;
  std::string best_provider;  // highest-priority provider in the group
};

class EmptyCandidates : public std::runtime_error {
 public:
  EmptyCandidates() : std::runtime_error("no translation candidates") {}
};

/// Winner selection: largest group; ties broken by the group holding the
/// candidate from the highest-priority provider, then by lexicographically
/// smallest text. Accepted iff confidence >= threshold.
ConsensusResult score(std::span<const providers::TranslationCandidate> candidates,
                      double threshold, std::span<const std::string> priority);

/// Same winner rule with the threshold ignored; always yields a text.
std::string fallback_pick(std::span<const providers::TranslationCandidate> candidates,
                          std::span<const std::string> priority);

}  // namespace wokie::consensus
