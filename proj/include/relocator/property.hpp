#pragma once

// The property vocabulary of an element fingerprint and the dispatch from
// (property, similarity function) to a score.

#include <array>
#include <numeric>
#include <string>
#include <string_view>

#include "relocator/model.hpp"
#include "relocator/similarity.hpp"

namespace relocator {

enum class Property {
  Tag,
  Class,
  Name,
  Id,
  Href,
  Alt,
  Type,
  AriaLabel,
  AbsoluteXPath,
  IdXPath,
  IsButton,
  Location,
  Area,
  Shape,
  VisibleText,
  NeighborText,
  Attributes,
};

inline constexpr std::size_t kPropertyCount = 17;

inline constexpr std::array<Property, kPropertyCount> kAllProperties = {
    Property::Tag,          Property::Class,       Property::Name,         Property::Id,
    Property::Href,         Property::Alt,         Property::Type,         Property::AriaLabel,
    Property::AbsoluteXPath, Property::IdXPath,    Property::IsButton,     Property::Location,
    Property::Area,         Property::Shape,       Property::VisibleText,  Property::NeighborText,
    Property::Attributes,
};

inline constexpr std::array<std::string_view, kPropertyCount> kPropertyIds = {
    "tag",  "class",          "name",     "id",       "href",  "alt",
    "type", "aria_label",     "absolute_xpath", "id_xpath", "is_button", "location",
    "area", "shape",          "visible_text",   "neighbor_text", "attributes",
};

inline std::string_view property_id(Property p) { return kPropertyIds[static_cast<std::size_t>(p)]; }

inline Property parse_property_id(std::string_view id) {
  if (id == "dimension") return Property::Area;
  for (std::size_t i = 0; i < kPropertyCount; ++i)
    if (kPropertyIds[i] == id) return kAllProperties[i];
  throw ConfigError("unknown property '" + std::string(id) + "'");
}

enum class ValueKind { Text, Boolean, Position, Geometry, Map };

inline ValueKind value_kind(Property p) {
  switch (p) {
    case Property::IsButton: return ValueKind::Boolean;
    case Property::Location: return ValueKind::Position;
    case Property::Area:
    case Property::Shape: return ValueKind::Geometry;
    case Property::Attributes: return ValueKind::Map;
    default: return ValueKind::Text;
  }
}

inline bool function_applies(Property p, FunctionKind f) {
  switch (value_kind(p)) {
    case ValueKind::Text:
      return f == FunctionKind::Equality || f == FunctionKind::EqualityCaseInsensitive ||
             f == FunctionKind::Levenshtein || f == FunctionKind::Jaccard ||
             f == FunctionKind::JaroWinkler || f == FunctionKind::WordSet;
    case ValueKind::Boolean:
      return f == FunctionKind::Equality;
    case ValueKind::Position:
      return f == FunctionKind::EuclideanNorm || f == FunctionKind::Manhattan ||
             f == FunctionKind::ExpDecay || f == FunctionKind::Linear2D;
    case ValueKind::Geometry:
      return f == FunctionKind::AreaRatio || f == FunctionKind::PerimeterRatio ||
             f == FunctionKind::AspectRatioRatio;
    case ValueKind::Map:
      return f == FunctionKind::IntersectValueCompare || f == FunctionKind::IntersectKeyCompare;
  }
  return false;
}

// Neighbor words form a set; they compare as one sorted, space-joined string.
inline std::string joined_neighbor_text(const ElementSnapshot& e) {
  std::vector<std::string> words(e.neighbor_text);
  std::sort(words.begin(), words.end());
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Text value of a text property; nullopt when the element lacks it.
inline std::optional<std::string> text_value(Property p, const ElementSnapshot& e) {
  switch (p) {
    case Property::Tag: return e.tag;
    case Property::Class: return e.class_attr;
    case Property::Name: return e.name_attr;
    case Property::Id: return e.id_attr;
    case Property::Href: return e.href;
    case Property::Alt: return e.alt;
    case Property::Type: return e.type_attr;
    case Property::AriaLabel: return e.aria_label;
    case Property::AbsoluteXPath: return e.absolute_xpath;
    case Property::IdXPath: return e.id_xpath;
    case Property::VisibleText: return e.visible_text;
    case Property::NeighborText: return joined_neighbor_text(e);
    default: return std::nullopt;
  }
}

inline double text_similarity(FunctionKind f, std::string_view a, std::string_view b) {
  switch (f) {
    case FunctionKind::Equality: return sim::equality(a, b, true);
    case FunctionKind::EqualityCaseInsensitive: return sim::equality(a, b, false);
    case FunctionKind::Levenshtein: return sim::levenshtein(a, b);
    case FunctionKind::Jaccard: return sim::jaccard_chars(a, b);
    case FunctionKind::JaroWinkler: return sim::jaro_winkler(a, b);
    case FunctionKind::WordSet: return sim::word_set(a, b);
    default: throw ConfigError("function " + std::string(function_kind_id(f)) + " does not apply to text");
  }
}

// similarity(a.p, b.p) under `f`. Absent optional values score 0.
inline double property_similarity(Property p, const SimilarityFunction& f, const ElementSnapshot& a,
                                  const ElementSnapshot& b) {
  switch (value_kind(p)) {
    case ValueKind::Text: {
      const auto va = text_value(p, a);
      const auto vb = text_value(p, b);
      if (!va || !vb) return 0.0;
      return text_similarity(f.kind, *va, *vb);
    }
    case ValueKind::Boolean:
      return a.is_button == b.is_button ? 1.0 : 0.0;
    case ValueKind::Position: {
      const Point pa{static_cast<double>(a.x), static_cast<double>(a.y)};
      const Point pb{static_cast<double>(b.x), static_cast<double>(b.y)};
      switch (f.kind) {
        case FunctionKind::Manhattan: return sim::manhattan(pa, pb, f.max_distance);
        case FunctionKind::ExpDecay: return sim::exp_decay(pa, pb, f.lambda);
        default: return sim::euclidean_norm(pa, pb, f.max_distance);
      }
    }
    case ValueKind::Geometry:
      switch (f.kind) {
        case FunctionKind::PerimeterRatio: return sim::perimeter_ratio(a.rect(), b.rect());
        case FunctionKind::AspectRatioRatio: return sim::aspect_ratio_ratio(a.rect(), b.rect());
        default: return sim::area_ratio(a.rect(), b.rect());
      }
    case ValueKind::Map:
      return f.kind == FunctionKind::IntersectKeyCompare ? sim::intersect_key_compare(a.attributes, b.attributes)
                                                         : sim::intersect_value_compare(a.attributes, b.attributes);
  }
  return 0.0;
}

}  // namespace relocator
