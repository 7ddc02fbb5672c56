#pragma once

// Two-stage localization: VON pre-selects the top-k overlap groups, Similo
// picks the exact element among their members.

#include <set>

#include "relocator/von.hpp"

namespace relocator {

inline constexpr std::size_t kDefaultPreselectGroups = 10;

struct HybridConfig {
  AlgorithmConfig von_config;     // stage 1, including its VonConfig
  AlgorithmConfig similo_config;  // stage 2
  std::size_t k = kDefaultPreselectGroups;

  void validate() const {
    if (k < 1) throw ConfigError("hybrid k must be >= 1");
    von_config.validate(false);
    similo_config.validate(false);
  }
};

struct HybridResult {
  LocalizationResult result;
  // Element ids handed to stage 2, in stage-1 order.
  std::vector<std::string> preselected;
};

// Element ids of the members of the first k distinct groups in a VON ranking.
inline std::vector<std::string> preselect(const VonRanking& ranking, std::size_t k) {
  std::set<std::vector<std::string>> seen_groups;
  std::set<std::string> seen_members;
  std::vector<std::string> out;
  for (const auto& rc : ranking.result.ranked) {
    if (seen_groups.size() >= k) break;
    const auto& group = ranking.groups.at(rc.element_id);
    if (!seen_groups.insert(group->member_ids()).second) continue;
    for (const auto& m : group->members)
      if (seen_members.insert(m.element_id).second) out.push_back(m.element_id);
  }
  return out;
}

inline HybridResult hybrid_localize_detailed(const OverlapGroup& target_group, const ElementSnapshot& target,
                                             const PageSnapshot& new_page, const HybridConfig& cfg) {
  if (cfg.k < 1) throw ConfigError("hybrid k must be >= 1");
  const VonRanking stage1 = von_localize_detailed(target_group, new_page, cfg.von_config);
  HybridResult out;
  out.preselected = preselect(stage1, cfg.k);

  std::vector<const ElementSnapshot*> subset;
  for (const auto& id : out.preselected) subset.push_back(new_page.find(id));
  LocalizationResult stage2 = localize_among(target, subset, cfg.similo_config);

  const std::set<std::string> chosen_set(out.preselected.begin(), out.preselected.end());
  for (const auto& rc : stage1.result.ranked)
    if (!chosen_set.count(rc.element_id)) stage2.ranked.push_back(rc);
  out.result = std::move(stage2);
  return out;
}

inline LocalizationResult hybrid_localize(const ElementSnapshot& target, const PageSnapshot& old_page,
                                          const PageSnapshot& new_page, const HybridConfig& cfg) {
  const OverlapGroup tg = overlap_group(target.element_id, old_page, cfg.von_config.von);
  return hybrid_localize_detailed(tg, target, new_page, cfg).result;
}

}  // namespace relocator
