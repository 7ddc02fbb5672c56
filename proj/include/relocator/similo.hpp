#pragma once

// Weighted-sum similarity scoring of a target against every candidate of a
// page, and the deterministic ranking shared by all engines.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "relocator/config.hpp"
#include "relocator/model.hpp"
#include "relocator/property.hpp"

namespace relocator {

struct RankedCandidate {
  std::string element_id;
  std::string absolute_xpath;
  double raw_score = 0.0;
  double normalized_score = 0.0;
  // Unweighted similarity per config entry, in config order.
  std::vector<double> breakdown;
};

struct LocalizationResult {
  std::vector<RankedCandidate> ranked;
  std::string chosen;

  // 1-based rank of `element_id`, 0 when absent.
  std::size_t rank_of(std::string_view element_id) const {
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (ranked[i].element_id == element_id) return i + 1;
    return 0;
  }
};

// Scores are compared on the normalized scale quantized to 1e-9, so sums
// that differ only by rounding (e.g. after rescaling every weight) tie.
inline constexpr double kScoreResolution = 1e9;

inline long long score_key(double normalized_score) {
  return std::llround(normalized_score * kScoreResolution);
}

inline double normalized(double raw, double total_weight) {
  return total_weight > 0.0 ? raw / total_weight : 0.0;
}

// Ranking order: higher score, then shorter absolute XPath, then
// lexicographic XPath, then element id.
inline bool ranks_before(const RankedCandidate& a, const RankedCandidate& b) {
  const long long ka = score_key(a.normalized_score);
  const long long kb = score_key(b.normalized_score);
  if (ka != kb) return ka > kb;
  if (a.absolute_xpath.size() != b.absolute_xpath.size())
    return a.absolute_xpath.size() < b.absolute_xpath.size();
  if (a.absolute_xpath != b.absolute_xpath) return a.absolute_xpath < b.absolute_xpath;
  return a.element_id < b.element_id;
}

inline LocalizationResult make_result(std::vector<RankedCandidate> ranked) {
  std::sort(ranked.begin(), ranked.end(), ranks_before);
  LocalizationResult result;
  result.ranked = std::move(ranked);
  if (!result.ranked.empty()) result.chosen = result.ranked.front().element_id;
  return result;
}

// Σ similarity(C.a, T.a) · weight over the config entries.
inline double similo_score(const ElementSnapshot& target, const ElementSnapshot& candidate,
                           const AlgorithmConfig& config, std::vector<double>* breakdown = nullptr) {
  double total = 0.0;
  if (breakdown) breakdown->clear();
  for (const auto& e : config.entries) {
    const double s = property_similarity(e.property, e.function, target, candidate);
    if (breakdown) breakdown->push_back(s);
    total += s * e.weight;
  }
  return total;
}

inline double similo_normalized_score(const ElementSnapshot& target, const ElementSnapshot& candidate,
                                      const AlgorithmConfig& config) {
  return normalized(similo_score(target, candidate, config), config.total_weight());
}

inline RankedCandidate score_candidate(const ElementSnapshot& target, const ElementSnapshot& candidate,
                                       const AlgorithmConfig& config, double total_weight) {
  RankedCandidate rc;
  rc.element_id = candidate.element_id;
  rc.absolute_xpath = candidate.absolute_xpath;
  rc.raw_score = similo_score(target, candidate, config, &rc.breakdown);
  rc.normalized_score = normalized(rc.raw_score, total_weight);
  return rc;
}

// Ranks the given candidates (a subset of a page) against the target.
inline LocalizationResult localize_among(const ElementSnapshot& target,
                                         const std::vector<const ElementSnapshot*>& candidates,
                                         const AlgorithmConfig& config) {
  if (candidates.empty()) throw IntegrityError("no candidates");
  const double total = config.total_weight();
  std::vector<RankedCandidate> ranked;
  ranked.reserve(candidates.size());
  for (const ElementSnapshot* c : candidates) ranked.push_back(score_candidate(target, *c, config, total));
  return make_result(std::move(ranked));
}

inline LocalizationResult localize(const ElementSnapshot& target, const PageSnapshot& page,
                                   const AlgorithmConfig& config) {
  std::vector<const ElementSnapshot*> candidates;
  candidates.reserve(page.elements.size());
  for (const auto& e : page.elements) candidates.push_back(&e);
  return localize_among(target, candidates, config);
}

// The pair is a match when its normalized score strictly exceeds the
// threshold.
inline bool exceeds_threshold(double normalized_score, double threshold) { return normalized_score > threshold; }

inline bool classify_pair(const ElementSnapshot& target, const ElementSnapshot& candidate,
                          const AlgorithmConfig& config, double threshold) {
  if (!config.normalize) throw ConfigError("threshold classification needs a normalized config");
  return exceeds_threshold(similo_normalized_score(target, candidate, config), threshold);
}

}  // namespace relocator
