#include "wokie/consensus.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "wokie/text.hpp"

namespace wokie::consensus {

namespace {

struct Group {
  int size = 0;
  std::size_t best_rank = std::numeric_limits<std::size_t>::max();
  std::string best_provider;
};

std::size_t rank_of(const std::string& provider_id, std::span<const std::string> priority) {
  for (std::size_t i = 0; i < priority.size(); ++i) {
    if (priority[i] == provider_id) return i;
  }
  return priority.size();
}

struct Winner {
  std::string text;
  Group group;
  int total = 0;
};

Winner pick_winner(std::span<const providers::TranslationCandidate> candidates,
                   std::span<const std::string> priority) {
  if (candidates.empty()) throw EmptyCandidates();
  std::map<std::string, Group> groups;
  for (const auto& c : candidates) {
    Group& g = groups[text::canonical(c.text)];
    g.size += 1;
    const std::size_t rank = rank_of(c.provider_id, priority);
    if (rank < g.best_rank ||
        (rank == g.best_rank && g.best_provider.empty())) {
      g.best_rank = rank;
      g.best_provider = c.provider_id;
    }
  }
  auto best = groups.begin();
  for (auto it = std::next(groups.begin()); it != groups.end(); ++it) {
    if (it->second.size > best->second.size ||
        (it->second.size == best->second.size &&
         it->second.best_rank < best->second.best_rank)) {
      best = it;
    }
    // equal size and rank: `best` already holds the lexicographically
    // smaller key because std::map iterates in key order
  }
  return {best->first, best->second, static_cast<int>(candidates.size())};
}

}  // namespace

ConsensusResult score(std::span<const providers::TranslationCandidate> candidates,
                      double threshold, std::span<const std::string> priority) {
  Winner w = pick_winner(candidates, priority);
  ConsensusResult result;
  result.best = w.text;
  result.group_size = w.group.size;
  result.total = w.total;
  result.confidence = static_cast<double>(w.group.size) / static_cast<double>(w.total);
  result.route = result.confidence >= threshold ? Route::accepted_by_frequency
                                                : Route::needs_refinement;
  result.best_provider = w.group.best_provider;
  return result;
}

std::string fallback_pick(std::span<const providers::TranslationCandidate> candidates,
                          std::span<const std::string> priority) {
  return pick_winner(candidates, priority).text;
}

}  // namespace wokie::consensus
