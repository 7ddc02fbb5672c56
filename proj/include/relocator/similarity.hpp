#pragma once

// Pairwise property-similarity functions. Every function returns a score in
// [0, 1] and is symmetric in its two arguments.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "relocator/error.hpp"
#include "relocator/model.hpp"

namespace relocator {

// Decodes UTF-8 into code points. Invalid bytes decode to themselves so any
// byte string compares deterministically.
inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    char32_t cp = lead;
    if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    }
    bool ok = i + extra < s.size();
    for (std::size_t k = 1; ok && k <= extra; ++k)
      ok = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    if (extra == 0 || !ok) {
      out.push_back(lead);
      ++i;
      continue;
    }
    for (std::size_t k = 1; k <= extra; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

namespace sim {

inline double equality(std::string_view a, std::string_view b, bool case_sensitive = true) {
  return (case_sensitive ? a == b : iequals_ascii(a, b)) ? 1.0 : 0.0;
}

inline std::size_t levenshtein_distance(const std::u32string& a, const std::u32string& b) {
  if (a.size() < b.size()) return levenshtein_distance(b, a);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

// 1 - lev(a, b) / max(|a|, |b|); two empty strings are identical.
inline double levenshtein(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  const auto ua = decode_utf8(a);
  const auto ub = decode_utf8(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_distance(ua, ub)) / static_cast<double>(longest);
}

template <typename T>
double jaccard_sets(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& v : a) common += b.count(v);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

// Jaccard index over the character sets of the two strings.
inline double jaccard_chars(std::string_view a, std::string_view b) {
  const auto ua = decode_utf8(a);
  const auto ub = decode_utf8(b);
  return jaccard_sets(std::set<char32_t>(ua.begin(), ua.end()), std::set<char32_t>(ub.begin(), ub.end()));
}

inline double jaro(const std::u32string& a, const std::u32string& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const std::size_t longest = std::max(a.size(), b.size());
  const std::size_t window = longest / 2 > 0 ? longest / 2 - 1 : 0;
  std::vector<char> a_matched(a.size(), 0), b_matched(b.size(), 0);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(b.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (!b_matched[j] && a[i] == b[j]) {
        a_matched[i] = b_matched[j] = 1;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;
  std::size_t out_of_order = 0;
  for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++out_of_order;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(out_of_order) / 2.0;
  return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

// Jaro similarity boosted by the common prefix (at most 4, scale 0.1).
inline double jaro_winkler(std::string_view a, std::string_view b) {
  const auto ua = decode_utf8(a);
  const auto ub = decode_utf8(b);
  const double j = jaro(ua, ub);
  std::size_t prefix = 0;
  while (prefix < 4 && prefix < ua.size() && prefix < ub.size() && ua[prefix] == ub[prefix]) ++prefix;
  return j + static_cast<double>(prefix) * 0.1 * (1.0 - j);
}

inline std::set<std::string> lowercase_words(std::string_view s) {
  std::set<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) words.insert(to_lower_ascii(s.substr(i, j - i)));
    i = j;
  }
  return words;
}

// Jaccard over whitespace-separated, lowercased word sets.
inline double word_set(std::string_view a, std::string_view b) {
  return jaccard_sets(lowercase_words(a), lowercase_words(b));
}

using AttributeMap = std::map<std::string, std::string>;

// Keys whose values agree in both maps, over the larger map's size.
inline double intersect_value_compare(const AttributeMap& a, const AttributeMap& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t same = 0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end() && it->second == v) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(std::max(a.size(), b.size()));
}

// Jaccard over key sets.
inline double intersect_key_compare(const AttributeMap& a, const AttributeMap& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& kv : a) common += b.count(kv.first);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

inline double euclidean_distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

inline double manhattan(Point p, Point q, double max_distance) {
  const double d = std::abs(p.x - q.x) + std::abs(p.y - q.y);
  return std::max(0.0, 1.0 - d / max_distance);
}

// Linear falloff of the Euclidean distance, clamped at max_distance.
inline double euclidean_norm(Point p, Point q, double max_distance) {
  return std::max(0.0, 1.0 - euclidean_distance(p, q) / max_distance);
}

inline double exp_decay(Point p, Point q, double lambda) {
  return std::exp(-lambda * euclidean_distance(p, q));
}

// Smaller over larger; 1 when both are zero, 0 when exactly one is.
inline double ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return 1.0;
  if (a == 0.0 || b == 0.0) return 0.0;
  return std::min(a, b) / std::max(a, b);
}

inline double area_ratio(const Rect& a, const Rect& b) {
  return ratio(static_cast<double>(a.area()), static_cast<double>(b.area()));
}

inline double perimeter_ratio(const Rect& a, const Rect& b) {
  return ratio(2.0 * static_cast<double>(a.width + a.height), 2.0 * static_cast<double>(b.width + b.height));
}

// Aspect ratio w/h compared by ratio; zero-height rectangles score 0.
inline double aspect_ratio_ratio(const Rect& a, const Rect& b) {
  if (a.height == 0 || b.height == 0) return 0.0;
  return ratio(static_cast<double>(a.width) / static_cast<double>(a.height),
               static_cast<double>(b.width) / static_cast<double>(b.height));
}

}  // namespace sim

// ---------------------------------------------------------------------------
// Function identifiers

enum class FunctionKind {
  Equality,
  EqualityCaseInsensitive,
  Levenshtein,
  Jaccard,
  JaroWinkler,
  WordSet,
  IntersectValueCompare,
  IntersectKeyCompare,
  EuclideanNorm,
  Manhattan,
  ExpDecay,
  Linear2D,
  AreaRatio,
  PerimeterRatio,
  AspectRatioRatio,
};

inline constexpr double kDefaultMaxDistance = 2000.0;
inline constexpr double kDecaySmall = 0.001;
inline constexpr double kDecayMedium = 0.005;
inline constexpr double kDecayLarge = 0.01;

struct SimilarityFunction {
  FunctionKind kind = FunctionKind::Equality;
  double lambda = 0.0;        // ExpDecay only
  double max_distance = 0.0;  // Manhattan, EuclideanNorm, Linear2D only

  bool operator==(const SimilarityFunction&) const = default;

  static SimilarityFunction of(FunctionKind kind) {
    SimilarityFunction f{kind};
    if (kind == FunctionKind::ExpDecay) f.lambda = kDecayMedium;
    if (kind == FunctionKind::Manhattan || kind == FunctionKind::EuclideanNorm || kind == FunctionKind::Linear2D)
      f.max_distance = kDefaultMaxDistance;
    return f;
  }
  static SimilarityFunction decay(double lambda) { return {FunctionKind::ExpDecay, lambda, 0.0}; }

  void validate() const {
    if (kind == FunctionKind::ExpDecay && !(lambda > 0))
      throw ConfigError("exp_decay requires lambda > 0");
    if ((kind == FunctionKind::Manhattan || kind == FunctionKind::EuclideanNorm ||
         kind == FunctionKind::Linear2D) &&
        !(max_distance > 0))
      throw ConfigError("distance similarity requires max_distance > 0");
  }
};

struct FunctionName {
  std::string_view id;
  FunctionKind kind;
};

inline constexpr FunctionName kFunctionNames[] = {
    {"equality", FunctionKind::Equality},
    {"equality_ci", FunctionKind::EqualityCaseInsensitive},
    {"levenshtein", FunctionKind::Levenshtein},
    {"jaccard", FunctionKind::Jaccard},
    {"jaro_winkler", FunctionKind::JaroWinkler},
    {"word_set", FunctionKind::WordSet},
    {"intersect_value", FunctionKind::IntersectValueCompare},
    {"intersect_key", FunctionKind::IntersectKeyCompare},
    {"euclidean", FunctionKind::EuclideanNorm},
    {"manhattan", FunctionKind::Manhattan},
    {"exp_decay", FunctionKind::ExpDecay},
    {"linear", FunctionKind::Linear2D},
    {"area", FunctionKind::AreaRatio},
    {"perimeter", FunctionKind::PerimeterRatio},
    {"aspect_ratio", FunctionKind::AspectRatioRatio},
};

inline std::string_view function_kind_id(FunctionKind kind) {
  for (const auto& n : kFunctionNames)
    if (n.kind == kind) return n.id;
  return "?";
}

// Stable id; the three standard decay rates get their own names.
inline std::string function_id(const SimilarityFunction& f) {
  if (f.kind == FunctionKind::ExpDecay) {
    if (f.lambda == kDecaySmall) return "exp_decay_small";
    if (f.lambda == kDecayMedium) return "exp_decay_medium";
    if (f.lambda == kDecayLarge) return "exp_decay_large";
  }
  return std::string(function_kind_id(f.kind));
}

// Parses a function id. "exp_decay" needs an explicit lambda; distance
// functions default to kDefaultMaxDistance.
inline SimilarityFunction parse_function_id(std::string_view id, std::optional<double> lambda = std::nullopt,
                                            std::optional<double> max_distance = std::nullopt) {
  SimilarityFunction f;
  if (id == "exp_decay_small") {
    f = SimilarityFunction::decay(kDecaySmall);
  } else if (id == "exp_decay_medium") {
    f = SimilarityFunction::decay(kDecayMedium);
  } else if (id == "exp_decay_large") {
    f = SimilarityFunction::decay(kDecayLarge);
  } else {
    bool found = false;
    for (const auto& n : kFunctionNames) {
      if (n.id == id) {
        f = SimilarityFunction::of(n.kind);
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("unknown similarity function '" + std::string(id) + "'");
    if (f.kind == FunctionKind::ExpDecay) {
      if (!lambda) throw ConfigError("exp_decay requires a lambda");
    }
  }
  if (lambda) {
    if (f.kind != FunctionKind::ExpDecay) throw ConfigError("lambda only applies to exp_decay");
    f.lambda = *lambda;
  }
  if (max_distance) {
    if (f.max_distance == 0.0) throw ConfigError("max_distance does not apply to " + std::string(id));
    f.max_distance = *max_distance;
  }
  f.validate();
  return f;
}

}  // namespace relocator
