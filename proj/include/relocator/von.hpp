#pragma once

// Visually overlapping nodes (VON): groups of elements that render as one
// visual unit, and the max-pair group score.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "relocator/similo.hpp"

namespace relocator {

// Both conditions are required: IoU(R1, R2) >= threshold and the center of
// e2 lies inside R1 (edges inclusive).
inline bool visually_overlaps(const ElementSnapshot& e1, const ElementSnapshot& e2, const VonConfig& cfg) {
  const Rect r1 = e1.rect();
  const Rect r2 = e2.rect();
  if (intersection_over_union(r1, r2) < cfg.iou_threshold) return false;
  return r1.contains(r2.center());
}

// Identical non-null visible text (case-sensitive) and e1's absolute XPath a
// segment prefix of e2's.
inline bool textually_overlaps(const ElementSnapshot& e1, const ElementSnapshot& e2) {
  if (!e1.visible_text || !e2.visible_text) return false;
  if (*e1.visible_text != *e2.visible_text) return false;
  return xpath_is_prefix(e1.absolute_xpath, e2.absolute_xpath);
}

inline bool overlaps(const ElementSnapshot& a, const ElementSnapshot& b, const VonConfig& cfg) {
  if (visually_overlaps(a, b, cfg) || visually_overlaps(b, a, cfg)) return true;
  return cfg.use_textual_overlap && (textually_overlaps(a, b) || textually_overlaps(b, a));
}

struct OverlapGroup {
  std::string anchor_id;
  // Members ordered by absolute XPath; always contains the anchor.
  std::vector<ElementSnapshot> members;

  std::vector<std::string> member_ids() const {
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (const auto& m : members) ids.push_back(m.element_id);
    return ids;
  }

  bool contains(std::string_view element_id) const {
    for (const auto& m : members)
      if (m.element_id == element_id) return true;
    return false;
  }
};

inline void sort_members(std::vector<ElementSnapshot>& members) {
  std::sort(members.begin(), members.end(), [](const ElementSnapshot& a, const ElementSnapshot& b) {
    return a.absolute_xpath != b.absolute_xpath ? a.absolute_xpath < b.absolute_xpath : a.element_id < b.element_id;
  });
}

// Single-hop group: the anchor plus every element overlapping it.
inline std::vector<std::size_t> overlap_member_indices(std::size_t anchor, const PageSnapshot& page,
                                                       const VonConfig& cfg) {
  std::vector<std::size_t> out;
  const ElementSnapshot& a = page.elements[anchor];
  for (std::size_t i = 0; i < page.elements.size(); ++i)
    if (i == anchor || overlaps(a, page.elements[i], cfg)) out.push_back(i);
  return out;
}

inline OverlapGroup overlap_group(std::string_view anchor_id, const PageSnapshot& page, const VonConfig& cfg) {
  const auto anchor = page.index_of(anchor_id);
  if (!anchor) throw IntegrityError("anchor '" + std::string(anchor_id) + "' not in page");
  OverlapGroup g;
  g.anchor_id = std::string(anchor_id);
  for (std::size_t i : overlap_member_indices(*anchor, page, cfg)) g.members.push_back(page.elements[i]);
  sort_members(g.members);
  return g;
}

inline OverlapGroup overlap_group(const ElementSnapshot& anchor, const PageSnapshot& page, const VonConfig& cfg) {
  return overlap_group(anchor.element_id, page, cfg);
}

inline OverlapGroup singleton_group(const ElementSnapshot& e) { return {e.element_id, {e}}; }

// Σ_i max_{t in T-group, c in C-group} similarity(t.a_i, c.a_i) · weight_i
inline double von_similo_score(const OverlapGroup& target_group, const OverlapGroup& candidate_group,
                               const AlgorithmConfig& config, std::vector<double>* breakdown = nullptr) {
  if (target_group.members.empty() || candidate_group.members.empty())
    throw IntegrityError("overlap groups must be non-empty");
  double total = 0.0;
  if (breakdown) breakdown->clear();
  for (const auto& e : config.entries) {
    double best = 0.0;
    for (const auto& t : target_group.members)
      for (const auto& c : candidate_group.members)
        best = std::max(best, property_similarity(e.property, e.function, t, c));
    if (breakdown) breakdown->push_back(best);
    total += best * e.weight;
  }
  return total;
}

struct VonRanking {
  LocalizationResult result;
  // Overlap group of every candidate, keyed by element id.
  std::map<std::string, std::shared_ptr<const OverlapGroup>> groups;
};

// Ranks every element of `new_page` by the score of its overlap group
// against `target_group`. Identical groups are built and scored once.
inline VonRanking von_localize_detailed(const OverlapGroup& target_group, const PageSnapshot& new_page,
                                        const AlgorithmConfig& config) {
  if (new_page.elements.empty()) throw IntegrityError("no candidates");
  const double total_weight = config.total_weight();
  struct Scored {
    std::shared_ptr<const OverlapGroup> group;
    double raw;
    std::vector<double> breakdown;
  };
  std::map<std::vector<std::size_t>, Scored> memo;
  VonRanking out;
  std::vector<RankedCandidate> ranked;
  ranked.reserve(new_page.elements.size());
  for (std::size_t i = 0; i < new_page.elements.size(); ++i) {
    const auto members = overlap_member_indices(i, new_page, config.von);
    auto it = memo.find(members);
    if (it == memo.end()) {
      auto group = std::make_shared<OverlapGroup>();
      group->anchor_id = new_page.elements[i].element_id;
      for (std::size_t m : members) group->members.push_back(new_page.elements[m]);
      sort_members(group->members);
      Scored s{group, 0.0, {}};
      s.raw = von_similo_score(target_group, *group, config, &s.breakdown);
      it = memo.emplace(members, std::move(s)).first;
    }
    const ElementSnapshot& c = new_page.elements[i];
    out.groups[c.element_id] = it->second.group;
    ranked.push_back({c.element_id, c.absolute_xpath, it->second.raw, normalized(it->second.raw, total_weight),
                      it->second.breakdown});
  }
  out.result = make_result(std::move(ranked));
  return out;
}

inline LocalizationResult von_localize(const OverlapGroup& target_group, const PageSnapshot& new_page,
                                       const AlgorithmConfig& config) {
  return von_localize_detailed(target_group, new_page, config).result;
}

inline LocalizationResult von_localize(const ElementSnapshot& target, const PageSnapshot& old_page,
                                       const PageSnapshot& new_page, const AlgorithmConfig& config) {
  return von_localize(overlap_group(target.element_id, old_page, config.von), new_page, config);
}

}  // namespace relocator
