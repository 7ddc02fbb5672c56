#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relocator/error.hpp"

namespace relocator {

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool iequals_ascii(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

struct Point {
  double x = 0;
  double y = 0;
};

// Axis-aligned rectangle in page coordinates.
struct Rect {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;

  std::int64_t area() const { return width * height; }
  Point center() const { return {x + width / 2.0, y + height / 2.0}; }
  bool contains(Point p) const {
    return p.x >= static_cast<double>(x) && p.x <= static_cast<double>(x + width) &&
           p.y >= static_cast<double>(y) && p.y <= static_cast<double>(y + height);
  }
};

inline std::int64_t intersection_area(const Rect& a, const Rect& b) {
  const std::int64_t w = std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x);
  const std::int64_t h = std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y);
  return (w > 0 && h > 0) ? w * h : 0;
}

// Intersection over union; 0 when the union is empty.
inline double intersection_over_union(const Rect& a, const Rect& b) {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// The full property fingerprint of one DOM element at one page version.
struct ElementSnapshot {
  std::string element_id;
  std::string tag;
  std::optional<std::string> class_attr;
  std::optional<std::string> name_attr;
  std::optional<std::string> id_attr;
  std::optional<std::string> href;
  std::optional<std::string> alt;
  std::optional<std::string> type_attr;
  std::optional<std::string> aria_label;
  std::string absolute_xpath;
  std::optional<std::string> id_xpath;
  bool is_button = false;
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::optional<std::string> visible_text;
  std::vector<std::string> neighbor_text;
  std::map<std::string, std::string> attributes;

  Rect rect() const { return {x, y, width, height}; }

  bool operator==(const ElementSnapshot&) const = default;
};

// Button-ness depends on (tag, class, type) only.
inline bool compute_is_button(std::string_view tag, const std::optional<std::string>& class_attr,
                              const std::optional<std::string>& type_attr) {
  if (tag == "button") return true;
  if (tag == "a") return class_attr && class_attr->find("btn") != std::string::npos;
  if (tag == "input" && type_attr) {
    return iequals_ascii(*type_attr, "button") || iequals_ascii(*type_attr, "submit") ||
           iequals_ascii(*type_attr, "reset");
  }
  return false;
}

inline bool compute_is_button(const ElementSnapshot& e) {
  return compute_is_button(e.tag, e.class_attr, e.type_attr);
}

struct Viewport {
  std::int64_t width = 0;
  std::int64_t height = 0;
  bool operator==(const Viewport&) const = default;
};

// All candidate elements of one rendered page version.
struct PageSnapshot {
  std::string site;
  std::string version_date;
  Viewport viewport;
  std::vector<ElementSnapshot> elements;

  const ElementSnapshot* find(std::string_view element_id) const {
    for (const auto& e : elements)
      if (e.element_id == element_id) return &e;
    return nullptr;
  }

  std::optional<std::size_t> index_of(std::string_view element_id) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i].element_id == element_id) return i;
    return std::nullopt;
  }

  bool operator==(const PageSnapshot&) const = default;
};

enum class ChangeClass { NoChange, MinorChange, MajorChange };
enum class LocatorClass { AllLocatorsWork, AbsXPathBroken, NoLocatorsWork };

inline std::string_view to_string(ChangeClass c) {
  switch (c) {
    case ChangeClass::NoChange: return "no";
    case ChangeClass::MinorChange: return "minor";
    case ChangeClass::MajorChange: return "major";
  }
  return "?";
}

inline std::string_view to_string(LocatorClass c) {
  switch (c) {
    case LocatorClass::AllLocatorsWork: return "all_work";
    case LocatorClass::AbsXPathBroken: return "abs_xpath_broken";
    case LocatorClass::NoLocatorsWork: return "none_work";
  }
  return "?";
}

inline std::optional<ChangeClass> change_class_from_string(std::string_view s) {
  if (s == "no") return ChangeClass::NoChange;
  if (s == "minor") return ChangeClass::MinorChange;
  if (s == "major") return ChangeClass::MajorChange;
  return std::nullopt;
}

inline std::optional<LocatorClass> locator_class_from_string(std::string_view s) {
  if (s == "all_work") return LocatorClass::AllLocatorsWork;
  if (s == "abs_xpath_broken") return LocatorClass::AbsXPathBroken;
  if (s == "none_work") return LocatorClass::NoLocatorsWork;
  return std::nullopt;
}

// One (target, candidate page, ground truth) record. Pages are shared between
// the many cases that reference them.
struct BenchmarkCase {
  std::string case_id;
  ElementSnapshot target;
  std::shared_ptr<const PageSnapshot> old_page;
  std::shared_ptr<const PageSnapshot> new_page;
  std::string ground_truth_id;
  ChangeClass change_class = ChangeClass::NoChange;
  LocatorClass locator_class = LocatorClass::AllLocatorsWork;

  const ElementSnapshot& truth() const {
    const ElementSnapshot* e = new_page->find(ground_truth_id);
    if (!e) throw IntegrityError("case " + case_id + ": ground truth " + ground_truth_id + " not in new page");
    return *e;
  }
};

struct NegativePair {
  std::string case_id;
  ElementSnapshot target;
  ElementSnapshot non_match;
};

// ---------------------------------------------------------------------------
// XPath relations

// Splits an absolute positional XPath into its segments. Slashes inside
// predicates ("a[@href='/x']") do not split.
inline std::vector<std::string_view> split_xpath(std::string_view xpath) {
  if (xpath.size() < 2 || xpath.front() != '/')
    throw IntegrityError("malformed absolute xpath '" + std::string(xpath) + "'");
  std::vector<std::string_view> segments;
  std::size_t start = 1;
  int depth = 0;
  for (std::size_t i = 1; i <= xpath.size(); ++i) {
    const bool end = i == xpath.size();
    if (!end && xpath[i] == '[') ++depth;
    if (!end && xpath[i] == ']') --depth;
    if (end || (xpath[i] == '/' && depth == 0)) {
      if (i == start) throw IntegrityError("malformed absolute xpath '" + std::string(xpath) + "'");
      segments.push_back(xpath.substr(start, i - start));
      start = i + 1;
    }
  }
  if (depth != 0) throw IntegrityError("malformed absolute xpath '" + std::string(xpath) + "'");
  return segments;
}

// Segment-boundary prefix: "/a[1]/b[1]" is a prefix of "/a[1]/b[1]/c[1]" but
// "/a[1]/b[1]" is not a prefix of "/a[1]/b[10]".
inline bool xpath_is_prefix(std::string_view parent_xpath, std::string_view child_xpath) {
  split_xpath(parent_xpath);
  split_xpath(child_xpath);
  if (child_xpath.size() < parent_xpath.size()) return false;
  if (child_xpath.substr(0, parent_xpath.size()) != parent_xpath) return false;
  return child_xpath.size() == parent_xpath.size() || child_xpath[parent_xpath.size()] == '/';
}

enum class XPathRelation { Same, DirectParent, DirectChild, Other };

// Relation of `a` to `b`: DirectParent means a is b's parent.
inline XPathRelation xpath_relation(std::string_view a, std::string_view b) {
  const auto sa = split_xpath(a);
  const auto sb = split_xpath(b);
  if (sa == sb) return XPathRelation::Same;
  if (sa.size() + 1 == sb.size() && std::equal(sa.begin(), sa.end(), sb.begin()))
    return XPathRelation::DirectParent;
  if (sb.size() + 1 == sa.size() && std::equal(sb.begin(), sb.end(), sa.begin()))
    return XPathRelation::DirectChild;
  return XPathRelation::Other;
}

}  // namespace relocator
