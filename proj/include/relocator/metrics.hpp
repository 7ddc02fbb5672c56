#pragma once

// Benchmark evaluation: per-case localization outcomes, change and locator
// classification, and the aggregated metric table.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relocator/hybrid.hpp"

namespace relocator {

enum class Algorithm { Similo, Von, Hybrid };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Similo: return "similo";
    case Algorithm::Von: return "von";
    case Algorithm::Hybrid: return "hybrid";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "similo") return Algorithm::Similo;
  if (s == "von") return Algorithm::Von;
  if (s == "hybrid") return Algorithm::Hybrid;
  throw UsageError("unknown algorithm '" + std::string(s) + "' (expected similo|von|hybrid)");
}

// An algorithm together with its configuration(s).
struct Localizer {
  Algorithm kind = Algorithm::Similo;
  AlgorithmConfig config;         // Similo config, VON config, or hybrid stage 1
  AlgorithmConfig similo_config;  // hybrid stage 2
  std::size_t k = kDefaultPreselectGroups;

  static Localizer similo(AlgorithmConfig c) { return {Algorithm::Similo, std::move(c), {}, 0}; }
  static Localizer von(AlgorithmConfig c) { return {Algorithm::Von, std::move(c), {}, 0}; }
  static Localizer hybrid(AlgorithmConfig von_cfg, AlgorithmConfig similo_cfg, std::size_t k = kDefaultPreselectGroups) {
    return {Algorithm::Hybrid, std::move(von_cfg), std::move(similo_cfg), k};
  }

  HybridConfig hybrid_config() const { return {config, similo_config, k}; }

  std::string label() const {
    if (kind == Algorithm::Hybrid) return "hybrid(" + config.name + "+" + similo_config.name + ")";
    return std::string(to_string(kind)) + "(" + config.name + ")";
  }

  double match_threshold() const {
    if (config.match_threshold) return *config.match_threshold;
    return kind == Algorithm::Von ? kVonMatchThreshold : kSimiloMatchThreshold;
  }

  LocalizationResult run(const ElementSnapshot& target, const PageSnapshot& old_page,
                         const PageSnapshot& new_page) const {
    switch (kind) {
      case Algorithm::Similo: return localize(target, new_page, config);
      case Algorithm::Von: return von_localize(target, old_page, new_page, config);
      case Algorithm::Hybrid: return hybrid_localize(target, old_page, new_page, hybrid_config());
    }
    throw Error("unreachable");
  }

  LocalizationResult run(const BenchmarkCase& c) const { return run(c.target, *c.old_page, *c.new_page); }
};

// ---------------------------------------------------------------------------
// Classification

inline constexpr std::int64_t kMinorMoveLimit = 10;
inline constexpr std::int64_t kMinorResizeLimit = 5;

inline ChangeClass classify_change(const ElementSnapshot& target, const ElementSnapshot& truth) {
  const bool same_content = target.tag == truth.tag && target.visible_text == truth.visible_text &&
                            target.attributes == truth.attributes;
  const bool same_fields = target.class_attr == truth.class_attr && target.name_attr == truth.name_attr &&
                           target.id_attr == truth.id_attr && target.href == truth.href &&
                           target.alt == truth.alt && target.type_attr == truth.type_attr &&
                           target.aria_label == truth.aria_label;
  const bool same_geometry = target.x == truth.x && target.y == truth.y && target.width == truth.width &&
                             target.height == truth.height;
  if (same_content && same_fields && same_geometry) return ChangeClass::NoChange;
  if (same_content && std::abs(target.x - truth.x) <= kMinorMoveLimit &&
      std::abs(target.y - truth.y) <= kMinorMoveLimit && std::abs(target.width - truth.width) <= kMinorResizeLimit &&
      std::abs(target.height - truth.height) <= kMinorResizeLimit)
    return ChangeClass::MinorChange;
  return ChangeClass::MajorChange;
}

namespace detail {

// A locator works when exactly one element of the page carries the value and
// that element is the ground truth.
template <typename Get>
bool resolves_uniquely(const PageSnapshot& page, const std::string& value, std::string_view truth_id, Get get) {
  const ElementSnapshot* hit = nullptr;
  for (const auto& e : page.elements) {
    const auto v = get(e);
    if (v && *v == value) {
      if (hit) return false;
      hit = &e;
    }
  }
  return hit && hit->element_id == truth_id;
}

}  // namespace detail

// Locators considered: id, absolute XPath and id-XPath, each only when the
// target has it. Some-but-not-all working is reported as AbsXPathBroken.
inline LocatorClass classify_locator(const ElementSnapshot& target, const PageSnapshot& new_page,
                                     std::string_view truth_id) {
  int possessed = 0, working = 0;
  auto check = [&](const std::optional<std::string>& value, auto get) {
    if (!value) return false;
    ++possessed;
    const bool ok = detail::resolves_uniquely(new_page, *value, truth_id, get);
    working += ok ? 1 : 0;
    return ok;
  };
  check(target.id_attr, [](const ElementSnapshot& e) { return e.id_attr; });
  check(target.id_xpath, [](const ElementSnapshot& e) { return e.id_xpath; });
  const bool abs_ok = check(target.absolute_xpath, [](const ElementSnapshot& e) {
    return std::optional<std::string>(e.absolute_xpath);
  });
  if (working == possessed) return LocatorClass::AllLocatorsWork;
  if (working == 0) return LocatorClass::NoLocatorsWork;
  (void)abs_ok;
  return LocatorClass::AbsXPathBroken;
}

// ---------------------------------------------------------------------------
// Fitness table

inline constexpr double kDefaultPartialCredit = 0.25;

struct FitnessTable {
  // score[change][locator], both in enum order.
  std::array<std::array<double, 3>, 3> score{{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}}};
  double partial_credit_factor = kDefaultPartialCredit;

  double at(ChangeClass c, LocatorClass l) const {
    return score[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)];
  }

  void validate() const {
    double max_entry = 0.0;
    for (const auto& row : score)
      for (double v : row) {
        if (!(v >= 0.0)) throw ConfigError("fitness table scores must be non-negative");
        max_entry = std::max(max_entry, v);
      }
    if (at(ChangeClass::MajorChange, LocatorClass::NoLocatorsWork) < max_entry)
      throw ConfigError("fitness table: major/none_work must be the maximum entry");
    if (!(partial_credit_factor >= 0.0 && partial_credit_factor <= 1.0))
      throw ConfigError("fitness table: partial_credit_factor must lie in [0, 1]");
  }
};

// {"partial_credit_factor": 0.25, "scores": {"no": {"all_work": 1, ...}, ...}}
inline FitnessTable parse_fitness_table(const Json& j) {
  FitnessTable t;
  t.partial_credit_factor = j.value("partial_credit_factor", kDefaultPartialCredit);
  if (auto scores = j.find("scores"); scores != j.end()) {
    for (const auto& [change_id, row] : scores->items()) {
      const auto change = change_class_from_string(change_id);
      if (!change) throw ConfigError("fitness table: unknown change class '" + change_id + "'");
      for (const auto& [locator_id, value] : row.items()) {
        const auto locator = locator_class_from_string(locator_id);
        if (!locator) throw ConfigError("fitness table: unknown locator class '" + locator_id + "'");
        t.score[static_cast<std::size_t>(*change)][static_cast<std::size_t>(*locator)] = value.get<double>();
      }
    }
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Metrics

enum class Metric { M1, M2, M3, M4, M5, M6, M7, M8, M9 };

inline constexpr std::array<Metric, 9> kAllMetrics = {Metric::M1, Metric::M2, Metric::M3, Metric::M4, Metric::M5,
                                                      Metric::M6, Metric::M7, Metric::M8, Metric::M9};

inline std::string_view metric_id(Metric m) {
  constexpr std::string_view ids[] = {"m1", "m2", "m3", "m4", "m5", "m6", "m7", "m8", "m9"};
  return ids[static_cast<std::size_t>(m)];
}

inline std::string_view metric_title(Metric m) {
  constexpr std::string_view titles[] = {"Similo",   "VON",        "Overlap",  "Exact",  "LC Exact",
                                         "LC Close", "Vis. Over.", "Top Ten", "Fitness"};
  return titles[static_cast<std::size_t>(m)];
}

// Accepts "m4" or "M4".
inline Metric parse_metric(std::string_view id) {
  for (Metric m : kAllMetrics)
    if (iequals_ascii(metric_id(m), id)) return m;
  throw UsageError("unknown metric '" + std::string(id) + "'");
}

inline constexpr std::size_t kTopTen = 10;

struct MetricOptions {
  FitnessTable fitness;
  std::uint64_t seed = 0;  // negative-pair sampling for M2
};

struct CaseOutcome {
  std::string case_id;
  std::string chosen_id;
  std::size_t truth_rank = 0;
  bool locator_changed = false;  // NoLocatorsWork: the M5/M6 subset
  bool m1 = false;               // exact or direct parent/child
  bool m3 = false;               // truth in visual or textual overlap of chosen
  bool m4 = false;               // exact
  bool m7 = false;               // truth in visual overlap of chosen
  bool m8 = false;               // truth ranked within the top ten
  // M2; absent when the algorithm has no pair score (hybrid).
  std::optional<bool> m2_positive;
  std::optional<bool> m2_negative;  // absent when the page has no non-truth element
  std::string negative_id;
  double fitness_earned = 0.0;
  double fitness_attainable = 0.0;
};

struct MetricValue {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  double earned = 0.0;      // M9 only
  double attainable = 0.0;  // M9 only
  std::optional<double> value;  // nullopt: not applicable (empty subset)
  bool value_only = false;      // M2 and M9 report only the ratio
};

struct MetricReport {
  std::string algorithm;
  std::string benchmark;
  std::uint64_t seed = 0;
  std::map<Metric, MetricValue> per_metric;
  std::vector<CaseOutcome> per_case;
};

// Deterministic per-case negative sample: uniform over non-truth elements.
inline std::optional<std::size_t> sample_negative(const BenchmarkCase& c, std::uint64_t seed, std::size_t case_index) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < c.new_page->elements.size(); ++i)
    if (c.new_page->elements[i].element_id != c.ground_truth_id) pool.push_back(i);
  if (pool.empty()) return std::nullopt;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(case_index)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng)];
}

inline bool m1_similo_match(const std::string& chosen_xpath, const std::string& truth_xpath) {
  const auto rel = xpath_relation(chosen_xpath, truth_xpath);
  return rel != XPathRelation::Other;
}

inline bool overlap_contains(const PageSnapshot& page, const std::string& chosen_id, const std::string& truth_id,
                             double iou_threshold, bool textual) {
  return overlap_group(chosen_id, page, VonConfig{iou_threshold, textual}).contains(truth_id);
}

// Normalized pair score used for threshold classification (M2).
inline std::optional<double> pair_score(const Localizer& loc, const BenchmarkCase& c, const ElementSnapshot& candidate) {
  switch (loc.kind) {
    case Algorithm::Similo: return similo_normalized_score(c.target, candidate, loc.config);
    case Algorithm::Von: {
      const auto tg = overlap_group(c.target.element_id, *c.old_page, loc.config.von);
      const auto cg = overlap_group(candidate.element_id, *c.new_page, loc.config.von);
      return normalized(von_similo_score(tg, cg, loc.config), loc.config.total_weight());
    }
    case Algorithm::Hybrid: return std::nullopt;
  }
  return std::nullopt;
}

inline CaseOutcome score_case(const BenchmarkCase& c, std::size_t case_index, const LocalizationResult& result,
                              const Localizer& loc, const MetricOptions& opts) {
  CaseOutcome o;
  o.case_id = c.case_id;
  o.chosen_id = result.chosen;
  o.truth_rank = result.rank_of(c.ground_truth_id);
  o.locator_changed = c.locator_class == LocatorClass::NoLocatorsWork;
  const ElementSnapshot& truth = c.truth();
  const ElementSnapshot* chosen = c.new_page->find(result.chosen);
  if (!chosen) throw IntegrityError("case " + c.case_id + ": chosen element not on new page");
  const double iou = loc.config.von.iou_threshold;
  o.m4 = result.chosen == c.ground_truth_id;
  o.m1 = m1_similo_match(chosen->absolute_xpath, truth.absolute_xpath);
  o.m7 = overlap_contains(*c.new_page, result.chosen, c.ground_truth_id, iou, false);
  o.m3 = o.m7 || overlap_contains(*c.new_page, result.chosen, c.ground_truth_id, iou, true);
  o.m8 = o.truth_rank >= 1 && o.truth_rank <= kTopTen;

  if (loc.kind != Algorithm::Hybrid) {
    const double threshold = loc.match_threshold();
    o.m2_positive = exceeds_threshold(*pair_score(loc, c, truth), threshold);
    if (const auto neg = sample_negative(c, opts.seed, case_index)) {
      const ElementSnapshot& non_match = c.new_page->elements[*neg];
      o.negative_id = non_match.element_id;
      o.m2_negative = !exceeds_threshold(*pair_score(loc, c, non_match), threshold);
    }
  }

  o.fitness_attainable = opts.fitness.at(c.change_class, c.locator_class);
  if (o.m4)
    o.fitness_earned = o.fitness_attainable;
  else if (o.m3)
    o.fitness_earned = opts.fitness.partial_credit_factor * o.fitness_attainable;
  return o;
}

inline MetricValue ratio_value(std::size_t num, std::size_t den) {
  MetricValue v;
  v.numerator = num;
  v.denominator = den;
  if (den > 0) v.value = static_cast<double>(num) / static_cast<double>(den);
  return v;
}

// Recomputes every metric from per-case outcomes.
inline std::map<Metric, MetricValue> aggregate(const std::vector<CaseOutcome>& cases) {
  std::size_t m1 = 0, m3 = 0, m4 = 0, m5 = 0, m6 = 0, m7 = 0, m8 = 0, lc = 0;
  std::size_t m2_num = 0, m2_den = 0;
  double earned = 0.0, attainable = 0.0;
  for (const auto& o : cases) {
    m1 += o.m1;
    m3 += o.m3;
    m4 += o.m4;
    m7 += o.m7;
    m8 += o.m8;
    if (o.locator_changed) {
      ++lc;
      m5 += o.m4;
      m6 += o.m1;
    }
    for (const auto& flag : {o.m2_positive, o.m2_negative}) {
      if (!flag) continue;
      ++m2_den;
      m2_num += *flag;
    }
    earned += o.fitness_earned;
    attainable += o.fitness_attainable;
  }
  const std::size_t n = cases.size();
  std::map<Metric, MetricValue> out;
  out[Metric::M1] = ratio_value(m1, n);
  out[Metric::M2] = ratio_value(m2_num, m2_den);
  out[Metric::M2].value_only = true;
  out[Metric::M3] = ratio_value(m3, n);
  out[Metric::M4] = ratio_value(m4, n);
  out[Metric::M5] = ratio_value(m5, lc);
  out[Metric::M6] = ratio_value(m6, lc);
  out[Metric::M7] = ratio_value(m7, n);
  out[Metric::M8] = ratio_value(m8, n);
  MetricValue fit;
  fit.earned = earned;
  fit.attainable = attainable;
  fit.value_only = true;
  if (attainable > 0.0) fit.value = earned / attainable;
  out[Metric::M9] = fit;
  return out;
}

inline MetricReport evaluate(const Benchmark& bench, const Localizer& loc, const MetricOptions& opts = {}) {
  if (bench.cases.empty()) throw IntegrityError("benchmark has no cases");
  MetricReport report;
  report.algorithm = loc.label();
  report.benchmark = bench.name;
  report.seed = opts.seed;
  report.per_case.reserve(bench.cases.size());
  for (std::size_t i = 0; i < bench.cases.size(); ++i) {
    const auto& c = bench.cases[i];
    report.per_case.push_back(score_case(c, i, loc.run(c), loc, opts));
  }
  report.per_metric = aggregate(report.per_case);
  return report;
}

}  // namespace relocator
