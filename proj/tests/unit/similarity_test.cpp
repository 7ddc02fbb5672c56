#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace relocator;
namespace rt = relocator::testing;

TEST(Similarity, GoldenValues) {
  EXPECT_EQ(sim::jaccard_chars("kitten", "sitting"), 3.0 / 7.0);
  EXPECT_EQ(sim::word_set("Sign up", "Sign in"), 1.0 / 3.0);
  const double jw = sim::jaro_winkler("kitten", "sitting");
  EXPECT_GE(jw, 0.73);
  EXPECT_LE(jw, 0.76);
  EXPECT_EQ(sim::ratio(100, 200), 0.5);
  EXPECT_DOUBLE_EQ(sim::levenshtein("kitten", "sitting"), 1.0 - 3.0 / 7.0);
}

TEST(Similarity, EqualStringsScoreOne) {
  for (const char* s : {"", "a", "Sign up", "ünïcödé", "/html[1]/body[1]"}) {
    EXPECT_EQ(sim::equality(s, s), 1.0);
    EXPECT_EQ(sim::levenshtein(s, s), 1.0);
    EXPECT_EQ(sim::jaccard_chars(s, s), 1.0);
    EXPECT_EQ(sim::jaro_winkler(s, s), 1.0);
    EXPECT_EQ(sim::word_set(s, s), 1.0);
  }
}

TEST(Similarity, EmptyAgainstNonEmpty) {
  EXPECT_EQ(sim::levenshtein("", "abc"), 0.0);
  EXPECT_EQ(sim::jaccard_chars("", "abc"), 0.0);
  EXPECT_EQ(sim::jaro_winkler("", "abc"), 0.0);
  EXPECT_EQ(sim::word_set("", "abc"), 0.0);
}

TEST(Similarity, CaseHandling) {
  EXPECT_EQ(sim::equality("Login", "login"), 0.0);
  EXPECT_EQ(sim::equality("Login", "login", false), 1.0);
  EXPECT_EQ(sim::word_set("SIGN Up", "sign up"), 1.0);
}

TEST(Similarity, CodePointsNotBytes) {
  EXPECT_DOUBLE_EQ(sim::levenshtein("café", "cafe"), 0.75);
  EXPECT_EQ(sim::jaccard_chars("éé", "é"), 1.0);
}

TEST(Similarity, JaroWinklerMatchesBruteForce) {
  std::mt19937_64 rng(42);
  const std::string alphabet = "abcdeé ";
  auto random_string = [&] {
    std::uniform_int_distribution<int> len(0, 9), pick(0, 6);
    std::string s;
    for (int i = len(rng); i > 0; --i) {
      const int k = pick(rng);
      s += k == 5 ? std::string("é") : std::string(1, alphabet[k == 6 ? 6 : k]);
    }
    return s;
  };
  for (int i = 0; i < 1000; ++i) {
    const std::string a = random_string(), b = random_string();
    ASSERT_NEAR(sim::jaro_winkler(a, b), rt::oracle::jaro_winkler(a, b), 1e-12) << a << " / " << b;
    ASSERT_NEAR(sim::levenshtein(a, b), rt::oracle::levenshtein(a, b), 1e-12) << a << " / " << b;
  }
}

TEST(Similarity, RangeAndSymmetry) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> ch('a', 'f'), len(0, 8);
  for (int i = 0; i < 500; ++i) {
    std::string a, b;
    for (int k = len(rng); k > 0; --k) a += static_cast<char>(ch(rng));
    for (int k = len(rng); k > 0; --k) b += static_cast<char>(ch(rng));
    for (auto f : {sim::levenshtein, sim::jaccard_chars, sim::jaro_winkler, sim::word_set}) {
      const double s = f(a, b);
      ASSERT_GE(s, 0.0);
      ASSERT_LE(s, 1.0);
      ASSERT_DOUBLE_EQ(s, f(b, a));
    }
  }
}

TEST(Similarity, AttributeMaps) {
  const sim::AttributeMap a{{"role", "link"}, {"data-x", "1"}};
  const sim::AttributeMap b{{"role", "link"}, {"data-x", "2"}, {"title", "t"}};
  EXPECT_DOUBLE_EQ(sim::intersect_value_compare(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(sim::intersect_key_compare(a, b), 2.0 / 3.0);
  EXPECT_EQ(sim::intersect_value_compare({}, {}), 1.0);
  EXPECT_EQ(sim::intersect_key_compare(a, {}), 0.0);
}

TEST(Similarity, Geometry) {
  EXPECT_EQ(sim::euclidean_norm({0, 0}, {0, 0}, 2000), 1.0);
  EXPECT_DOUBLE_EQ(sim::euclidean_norm({0, 0}, {300, 400}, 2000), 0.75);
  EXPECT_EQ(sim::euclidean_norm({0, 0}, {3000, 0}, 2000), 0.0);
  EXPECT_DOUBLE_EQ(sim::manhattan({0, 0}, {300, 400}, 2000), 0.65);
  EXPECT_DOUBLE_EQ(sim::exp_decay({0, 0}, {300, 400}, 0.01), std::exp(-5.0));
  EXPECT_EQ(sim::ratio(0, 0), 1.0);
  EXPECT_EQ(sim::ratio(0, 5), 0.0);
  EXPECT_DOUBLE_EQ(sim::area_ratio({0, 0, 10, 10}, {0, 0, 20, 10}), 0.5);
  EXPECT_DOUBLE_EQ(sim::perimeter_ratio({0, 0, 10, 10}, {0, 0, 30, 10}), 0.5);
  EXPECT_DOUBLE_EQ(sim::aspect_ratio_ratio({0, 0, 10, 10}, {0, 0, 20, 10}), 0.5);
  EXPECT_EQ(sim::aspect_ratio_ratio({0, 0, 10, 0}, {0, 0, 10, 0}), 0.0);
}

TEST(Similarity, IntersectionOverUnion) {
  EXPECT_EQ(intersection_over_union({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_EQ(intersection_over_union({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(intersection_over_union({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_EQ(intersection_over_union({0, 0, 0, 0}, {0, 0, 0, 0}), 0.0);
}

TEST(FunctionIds, RoundTrip) {
  for (const auto& n : kFunctionNames) {
    if (n.kind == FunctionKind::ExpDecay) continue;
    const auto f = parse_function_id(n.id);
    EXPECT_EQ(function_id(f), n.id);
  }
  EXPECT_EQ(parse_function_id("exp_decay_small").lambda, kDecaySmall);
  EXPECT_EQ(function_id(SimilarityFunction::decay(kDecayLarge)), "exp_decay_large");
  EXPECT_THROW(parse_function_id("soundex"), ConfigError);
  EXPECT_THROW(parse_function_id("exp_decay"), ConfigError);
}
