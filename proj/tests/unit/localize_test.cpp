#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace relocator;
namespace rt = relocator::testing;

namespace {

// a.btn > span > i, nested 1 px apart: one visual unit of three elements.
PageSnapshot nested_button_page(const std::string& date, std::int64_t dx = 0) {
  auto a = rt::bare_element("a", "a", "/html[1]/body[1]/a[1]", {200 + dx, 100, 100, 40});
  a.class_attr = "btn";
  a.href = "/join";
  a.is_button = true;
  auto span = rt::bare_element("span", "span", "/html[1]/body[1]/a[1]/span[1]", {201 + dx, 101, 98, 38}, "Join");
  auto icon = rt::bare_element("i", "i", "/html[1]/body[1]/a[1]/span[1]/i[1]", {202 + dx, 102, 96, 36});
  icon.class_attr = "icon-join";
  auto other = rt::bare_element("h", "h1", "/html[1]/body[1]/h1[1]", {0, 0, 400, 60}, "Welcome");
  auto link = rt::bare_element("l", "a", "/html[1]/body[1]/a[2]", {600, 100, 80, 20}, "Help");
  link.href = "/help";
  return rt::page_of({other, a, span, icon, link}, date);
}

}  // namespace

TEST(Similo, UnchangedPageFindsTarget) {
  const auto page = nested_button_page("2024-01-01");
  for (const auto& target : page.elements) {
    const auto r = localize(target, page, presets::similo_2023());
    EXPECT_EQ(r.chosen, target.element_id);
    EXPECT_EQ(r.ranked.size(), page.elements.size());
  }
}

TEST(Similo, RankingMatchesOracle) {
  const auto bench = rt::small_benchmark(3);
  for (const auto& name : builtin_preset_names()) {
    const auto cfg = load_preset(name);
    for (const auto& c : bench.cases)
      ASSERT_EQ(rt::ranking_ids(localize(c.target, *c.new_page, cfg)),
                rt::oracle::similo_ranking(c.target, *c.new_page, cfg))
          << name << " " << c.case_id;
  }
}

TEST(Similo, TiesBreakOnShorterXPath) {
  auto a = rt::bare_element("x", "div", "/html[1]/body[1]/div[1]/div[1]", {0, 0, 10, 10});
  auto b = rt::bare_element("y", "div", "/html[1]/body[1]/div[2]", {0, 0, 10, 10});
  auto target = rt::bare_element("t", "div", "/html[1]", {0, 0, 10, 10});
  AlgorithmConfig cfg;
  cfg.entries = {presets::entry(Property::Tag, "equality", 1.0)};
  const auto r = localize(target, rt::page_of({a, b}), cfg);
  EXPECT_EQ(r.chosen, "y");
  EXPECT_EQ(r.rank_of("x"), 2u);
}

TEST(Similo, EmptyPageIsAnError) {
  EXPECT_THROW(localize(rt::full_element(), rt::page_of({}), presets::similo_2023()), Error);
}

TEST(Similo, ZeroWeightConfigScoresZero) {
  AlgorithmConfig cfg;
  cfg.entries = {presets::entry(Property::Tag, "equality", 0.0)};
  const auto e = rt::full_element();
  EXPECT_EQ(similo_normalized_score(e, e, cfg), 0.0);
}

TEST(Von, GroupsFollowIouAndCenter) {
  const auto page = nested_button_page("2024-01-01");
  const VonConfig cfg;
  EXPECT_EQ(overlap_group("span", page, cfg).member_ids(), (std::vector<std::string>{"a", "span", "i"}));
  EXPECT_EQ(overlap_group("h", page, cfg).member_ids(), std::vector<std::string>{"h"});
  EXPECT_FALSE(visually_overlaps(page.elements[0], page.elements[1], cfg));
}

TEST(Von, TextualOverlapIsOptIn) {
  auto parent = rt::bare_element("p", "div", "/html[1]/body[1]/div[1]", {0, 0, 300, 300}, "Go");
  auto child = rt::bare_element("c", "span", "/html[1]/body[1]/div[1]/span[1]", {10, 10, 20, 10}, "Go");
  const auto page = rt::page_of({parent, child});
  EXPECT_EQ(overlap_group("c", page, VonConfig{}).members.size(), 1u);
  EXPECT_EQ(overlap_group("c", page, VonConfig{0.85, true}).members.size(), 2u);
}

TEST(Von, SingletonGroupsBridgeToSimilo) {
  const auto bench = rt::small_benchmark(11);
  const auto cfg = presets::von_similo_llm_m3();
  for (const auto& c : bench.cases)
    for (const auto& e : c.new_page->elements)
      ASSERT_NEAR(von_similo_score(singleton_group(c.target), singleton_group(e), cfg), similo_score(c.target, e, cfg),
                  1e-12);
}

TEST(Von, RankingMatchesOracle) {
  const auto bench = rt::small_benchmark(5);
  for (const auto& name : builtin_preset_names()) {
    const auto cfg = load_preset(name);
    for (const auto& c : bench.cases)
      ASSERT_EQ(rt::ranking_ids(von_localize(c.target, *c.old_page, *c.new_page, cfg)),
                rt::oracle::von_ranking(c.target, *c.old_page, *c.new_page, cfg))
          << name << " " << c.case_id;
  }
}

TEST(Von, GroupMembersTieAndHybridResolvesThem) {
  const auto old_page = nested_button_page("2024-01-01");
  const auto new_page = nested_button_page("2024-05-01", 30);
  const auto& target = *old_page.find("span");
  const auto von_cfg = presets::von_similo_llm_m3();

  const auto von = von_localize(target, old_page, new_page, von_cfg);
  std::map<std::string, double> scores;
  for (const auto& rc : von.ranked) scores[rc.element_id] = rc.normalized_score;
  EXPECT_EQ(scores["a"], scores["span"]);
  EXPECT_EQ(scores["span"], scores["i"]);
  EXPECT_EQ(von.chosen, "a");

  const auto hybrid = hybrid_localize(target, old_page, new_page, {von_cfg, presets::similo_llm_m4(), 10});
  EXPECT_EQ(hybrid.chosen, "span");
  for (const char* id : {"a", "i"}) {
    const auto hybrid_for = hybrid_localize(*old_page.find(id), old_page, new_page, {von_cfg, presets::similo_2023(), 10});
    EXPECT_EQ(hybrid_for.chosen, id);
  }
}

TEST(Hybrid, PreselectionKeepsWholeGroupsAndDeduplicates) {
  const auto old_page = nested_button_page("2024-01-01");
  const auto new_page = nested_button_page("2024-05-01");
  const auto& target = *old_page.find("span");
  const auto tg = overlap_group("span", old_page, VonConfig{});
  const HybridConfig cfg{presets::von_similo_llm_m3(), presets::similo_2023(), 1};
  const auto r = hybrid_localize_detailed(tg, target, new_page, cfg);
  std::set<std::string> pre(r.preselected.begin(), r.preselected.end());
  EXPECT_EQ(pre, (std::set<std::string>{"a", "span", "i"}));
  EXPECT_EQ(r.result.ranked.size(), new_page.elements.size());
  std::set<std::string> ids;
  for (const auto& rc : r.result.ranked) ids.insert(rc.element_id);
  EXPECT_EQ(ids.size(), new_page.elements.size());
  EXPECT_EQ(r.result.chosen, "span");
}

TEST(Hybrid, RejectsZeroK) {
  const auto page = nested_button_page("2024-01-01");
  EXPECT_THROW(hybrid_localize(page.elements[0], page, page, {presets::von_similo_llm_m3(), presets::similo_2023(), 0}),
               ConfigError);
}

TEST(Ranking, ScalingWeightsKeepsOrder) {
  const auto bench = rt::small_benchmark(9);
  for (const auto& name : builtin_preset_names()) {
    const auto cfg = load_preset(name);
    for (double f : {0.1, 2.0, 7.5}) {
      const auto scaled = cfg.scaled(f);
      for (const auto& c : bench.cases) {
        ASSERT_EQ(rt::ranking_ids(localize(c.target, *c.new_page, cfg)),
                  rt::ranking_ids(localize(c.target, *c.new_page, scaled)));
        ASSERT_EQ(rt::ranking_ids(von_localize(c.target, *c.old_page, *c.new_page, cfg)),
                  rt::ranking_ids(von_localize(c.target, *c.old_page, *c.new_page, scaled)));
      }
    }
  }
}
