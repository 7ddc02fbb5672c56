#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "test_support.hpp"

using namespace relocator;
namespace rt = relocator::testing;
namespace fs = std::filesystem;

TEST(Presets, BaselineWeightsSumToTwelve) {
  const auto cfg = presets::similo_2023();
  EXPECT_DOUBLE_EQ(cfg.total_weight(), 12.0);
  const auto e = rt::full_element();
  EXPECT_DOUBLE_EQ(similo_score(e, e, cfg), 12.0);
  EXPECT_DOUBLE_EQ(similo_normalized_score(e, e, cfg), 1.0);
}

TEST(Presets, Defaults) {
  EXPECT_EQ(VonConfig{}.iou_threshold, 0.85);
  EXPECT_EQ(kSimiloMatchThreshold, 0.28);
  EXPECT_EQ(kVonMatchThreshold, 0.4);
  EXPECT_EQ(Localizer::similo(presets::similo_2023()).match_threshold(), 0.28);
  EXPECT_EQ(Localizer::von(presets::von_similo_llm_m3()).match_threshold(), 0.4);
}

TEST(Presets, AllBuiltinsValidateAndScoreSelfAsOne) {
  const auto e = rt::full_element();
  for (const auto& name : builtin_preset_names()) {
    const auto cfg = load_preset(name);
    EXPECT_NO_THROW(cfg.validate()) << name;
    EXPECT_EQ(cfg.name, name);
    EXPECT_NEAR(similo_normalized_score(e, e, cfg), 1.0, 1e-12) << name;
  }
  EXPECT_THROW(load_preset("no-such-preset"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  for (const auto& name : builtin_preset_names()) {
    const auto cfg = load_preset(name);
    const auto back = parse_config(Json::parse(config_to_json(cfg).dump()));
    ASSERT_EQ(back.entries.size(), cfg.entries.size());
    for (std::size_t i = 0; i < cfg.entries.size(); ++i) {
      EXPECT_EQ(back.entries[i].property, cfg.entries[i].property);
      EXPECT_EQ(back.entries[i].function, cfg.entries[i].function);
      EXPECT_EQ(back.entries[i].weight, cfg.entries[i].weight);
    }
    EXPECT_EQ(back.von.iou_threshold, cfg.von.iou_threshold);
  }
}

TEST(Config, RejectsInvalid) {
  auto parse = [](const char* text) { return parse_config(Json::parse(text)); };
  EXPECT_THROW(parse(R"({"entries": [{"property": "tag", "function": "area", "weight": 1}]})"), ConfigError);
  EXPECT_THROW(parse(R"({"entries": [{"property": "tag", "function": "equality", "weight": 3.5}]})"), ConfigError);
  EXPECT_THROW(parse(R"({"entries": [{"property": "tag", "function": "equality", "weight": -1}]})"), ConfigError);
  EXPECT_THROW(parse(R"({"entries": [{"property": "colour", "function": "equality", "weight": 1}]})"), ConfigError);
  EXPECT_THROW(parse(R"({"entries": [{"property": "tag", "function": "equality", "weight": 1},
                                     {"property": "tag", "function": "levenshtein", "weight": 1}]})"),
               ConfigError);
  EXPECT_THROW(parse(R"({"entries": [{"property": "location", "function": "exp_decay", "weight": 1}]})"),
               ConfigError);
  EXPECT_THROW(parse(R"({"entries": [], "von": {"iou_threshold": 1.5}})"), ConfigError);
  EXPECT_NO_THROW(parse(R"({"entries": [{"property": "location", "function": "exp_decay", "lambda": 0.02,
                                         "weight": 1}]})"));
}

TEST(Config, EnvironmentDirectoryOverridesBuiltins) {
  const fs::path dir = fs::temp_directory_path() / "relocator-config-test";
  fs::create_directories(dir);
  write_file(dir / "similo-2023.json",
             R"({"entries": [{"property": "tag", "function": "equality", "weight": 2}]})");
  ::setenv("RELOCATOR_CONFIG_DIR", dir.c_str(), 1);
  const auto cfg = load_preset("similo-2023");
  const auto other = load_preset("similo-llm-m4");
  ::unsetenv("RELOCATOR_CONFIG_DIR");
  fs::remove_all(dir);
  EXPECT_EQ(cfg.entries.size(), 1u);
  EXPECT_EQ(cfg.name, "similo-2023");
  EXPECT_GT(other.entries.size(), 1u);
}

TEST(Properties, FunctionApplicability) {
  EXPECT_TRUE(function_applies(Property::Tag, FunctionKind::JaroWinkler));
  EXPECT_FALSE(function_applies(Property::Tag, FunctionKind::AreaRatio));
  EXPECT_TRUE(function_applies(Property::Location, FunctionKind::ExpDecay));
  EXPECT_FALSE(function_applies(Property::IsButton, FunctionKind::Levenshtein));
  EXPECT_TRUE(function_applies(Property::Attributes, FunctionKind::IntersectKeyCompare));
  for (Property p : kAllProperties) EXPECT_EQ(parse_property_id(property_id(p)), p);
}

TEST(Properties, AbsentValuesScoreZero) {
  auto a = rt::full_element();
  auto b = a;
  b.alt.reset();
  EXPECT_EQ(property_similarity(Property::Alt, parse_function_id("equality"), a, b), 0.0);
  a.alt.reset();
  EXPECT_EQ(property_similarity(Property::Alt, parse_function_id("equality"), a, b), 0.0);
}

TEST(Properties, NeighborTextIsOrderInsensitive) {
  auto a = rt::full_element();
  auto b = a;
  b.neighbor_text = {"in", "Log"};
  EXPECT_EQ(property_similarity(Property::NeighborText, parse_function_id("levenshtein"), a, b), 1.0);
}

TEST(Model, IsButtonDerivation) {
  EXPECT_TRUE(compute_is_button("button", std::nullopt, std::nullopt));
  EXPECT_TRUE(compute_is_button("a", std::string("btn-lg"), std::nullopt));
  EXPECT_FALSE(compute_is_button("a", std::string("link"), std::nullopt));
  EXPECT_TRUE(compute_is_button("input", std::nullopt, std::string("Submit")));
  EXPECT_FALSE(compute_is_button("input", std::nullopt, std::string("text")));
  EXPECT_FALSE(compute_is_button("div", std::string("btn"), std::nullopt));
}

TEST(Model, XPathRelations) {
  EXPECT_EQ(xpath_relation("/html[1]/body[1]", "/html[1]/body[1]"), XPathRelation::Same);
  EXPECT_EQ(xpath_relation("/html[1]/body[1]", "/html[1]/body[1]/a[2]"), XPathRelation::DirectParent);
  EXPECT_EQ(xpath_relation("/html[1]/body[1]/a[2]", "/html[1]/body[1]"), XPathRelation::DirectChild);
  EXPECT_EQ(xpath_relation("/html[1]", "/html[1]/body[1]/a[2]"), XPathRelation::Other);
  EXPECT_EQ(xpath_relation("/html[1]/body[1]/a[1]", "/html[1]/body[1]/a[11]"), XPathRelation::Other);
  EXPECT_TRUE(xpath_is_prefix("/html[1]/body[1]", "/html[1]/body[1]/div[1]"));
  EXPECT_FALSE(xpath_is_prefix("/html[1]/body[1]/div[1]", "/html[1]/body[1]/div[10]"));
}
