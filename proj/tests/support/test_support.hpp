#pragma once

// Fixtures and straight-line reference implementations shared by the unit
// tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "relocator/relocator.hpp"

namespace relocator::testing {

// Every optional field set and mirrored in attributes.
inline ElementSnapshot full_element(const std::string& id = "e1", const std::string& xpath = "/html[1]/body[1]/a[1]") {
  ElementSnapshot e;
  e.element_id = id;
  e.tag = "a";
  e.class_attr = "btn btn-primary";
  e.name_attr = "signup";
  e.id_attr = "signup-link";
  e.href = "/signup";
  e.alt = "Sign up";
  e.type_attr = "button";
  e.aria_label = "Create account";
  e.absolute_xpath = xpath;
  e.id_xpath = "//*[@id=\"signup-link\"]";
  e.is_button = compute_is_button(e);
  e.x = 100;
  e.y = 40;
  e.width = 80;
  e.height = 30;
  e.visible_text = "Sign up";
  e.neighbor_text = {"Log", "in"};
  e.attributes = {{"aria-label", "Create account"}, {"alt", "Sign up"},    {"class", "btn btn-primary"},
                  {"data-test", "signup"},         {"href", "/signup"},   {"id", "signup-link"},
                  {"name", "signup"},              {"type", "button"}};
  return e;
}

inline ElementSnapshot bare_element(const std::string& id, const std::string& tag, const std::string& xpath,
                                    Rect r, std::optional<std::string> text = std::nullopt) {
  ElementSnapshot e;
  e.element_id = id;
  e.tag = tag;
  e.absolute_xpath = xpath;
  e.x = r.x;
  e.y = r.y;
  e.width = r.width;
  e.height = r.height;
  e.visible_text = std::move(text);
  e.is_button = compute_is_button(e);
  return e;
}

inline PageSnapshot page_of(std::vector<ElementSnapshot> elements, std::string date = "2024-01-01") {
  PageSnapshot p;
  p.site = "fixture";
  p.version_date = std::move(date);
  p.viewport = {1280, 800};
  p.elements = std::move(elements);
  return p;
}

inline Benchmark small_benchmark(std::uint64_t seed, std::size_t sites = 2, std::size_t versions = 3,
                                 std::size_t elements = 5, const std::string& profile = "standard") {
  GeneratorOptions opts;
  opts.seed = seed;
  opts.sites = sites;
  opts.versions = versions;
  opts.elements_per_site = elements;
  opts.profile = profile_by_name(profile);
  return generate_benchmark(opts);
}

namespace oracle {

// Textbook Jaro: match window floor(max/2)-1, transpositions counted over the
// matched characters in order.
inline double jaro(const std::u32string& s, const std::u32string& t) {
  if (s.empty() && t.empty()) return 1.0;
  if (s.empty() || t.empty()) return 0.0;
  const long window = std::max<long>(0, static_cast<long>(std::max(s.size(), t.size())) / 2 - 1);
  std::vector<bool> sm(s.size(), false), tm(t.size(), false);
  long m = 0;
  for (long i = 0; i < static_cast<long>(s.size()); ++i) {
    for (long j = 0; j < static_cast<long>(t.size()); ++j) {
      if (tm[j] || s[i] != t[j] || std::labs(i - j) > window) continue;
      sm[i] = tm[j] = true;
      ++m;
      break;
    }
  }
  if (m == 0) return 0.0;
  std::u32string a, b;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (sm[i]) a += s[i];
  for (std::size_t j = 0; j < t.size(); ++j)
    if (tm[j]) b += t[j];
  long half = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++half;
  const double md = static_cast<double>(m);
  return (md / s.size() + md / t.size() + (md - half / 2.0) / md) / 3.0;
}

inline double jaro_winkler(const std::string& a, const std::string& b) {
  const auto s = decode_utf8(a), t = decode_utf8(b);
  const double j = jaro(s, t);
  std::size_t l = 0;
  while (l < 4 && l < s.size() && l < t.size() && s[l] == t[l]) ++l;
  return j + l * 0.1 * (1.0 - j);
}

// Full-matrix edit distance normalized by the longer length.
inline double levenshtein(const std::string& a, const std::string& b) {
  const auto s = decode_utf8(a), t = decode_utf8(b);
  if (s.empty() && t.empty()) return 1.0;
  std::vector<std::vector<std::size_t>> d(s.size() + 1, std::vector<std::size_t>(t.size() + 1));
  for (std::size_t i = 0; i <= s.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= t.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i)
    for (std::size_t j = 1; j <= t.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1)});
  return 1.0 - static_cast<double>(d[s.size()][t.size()]) / static_cast<double>(std::max(s.size(), t.size()));
}

struct Ranked {
  std::string id;
  std::string xpath;
  double score;
};

inline bool before(const Ranked& a, const Ranked& b) {
  const long long ka = std::llround(a.score * 1e9), kb = std::llround(b.score * 1e9);
  if (ka != kb) return ka > kb;
  if (a.xpath.size() != b.xpath.size()) return a.xpath.size() < b.xpath.size();
  if (a.xpath != b.xpath) return a.xpath < b.xpath;
  return a.id < b.id;
}

// Selection sort, no std::sort.
inline std::vector<std::string> order(std::vector<Ranked> items) {
  std::vector<std::string> out;
  while (!items.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < items.size(); ++i)
      if (before(items[i], items[best])) best = i;
    out.push_back(items[best].id);
    items.erase(items.begin() + static_cast<long>(best));
  }
  return out;
}

inline double weight_sum(const AlgorithmConfig& cfg) {
  double w = 0;
  for (const auto& e : cfg.entries) w += e.weight;
  return w;
}

inline std::vector<std::string> similo_ranking(const ElementSnapshot& target, const PageSnapshot& page,
                                               const AlgorithmConfig& cfg) {
  std::vector<Ranked> items;
  const double total = weight_sum(cfg);
  for (const auto& c : page.elements) {
    double s = 0;
    for (const auto& e : cfg.entries) s += property_similarity(e.property, e.function, target, c) * e.weight;
    items.push_back({c.element_id, c.absolute_xpath, total > 0 ? s / total : 0.0});
  }
  return order(std::move(items));
}

inline bool inside(double px, double py, const ElementSnapshot& e) {
  return px >= e.x && px <= e.x + e.width && py >= e.y && py <= e.y + e.height;
}

inline bool visual(const ElementSnapshot& a, const ElementSnapshot& b, double threshold) {
  const double ix = std::max(0.0, double(std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x)));
  const double iy = std::max(0.0, double(std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y)));
  const double inter = ix * iy;
  const double uni = double(a.width * a.height + b.width * b.height) - inter;
  if (uni <= 0 || inter / uni < threshold) return false;
  return inside(b.x + b.width / 2.0, b.y + b.height / 2.0, a);
}

inline std::vector<const ElementSnapshot*> group(const ElementSnapshot& anchor, const PageSnapshot& page,
                                                 double threshold) {
  std::vector<const ElementSnapshot*> out;
  for (const auto& e : page.elements)
    if (e.element_id == anchor.element_id || visual(anchor, e, threshold) || visual(e, anchor, threshold))
      out.push_back(&e);
  return out;
}

inline std::vector<std::string> von_ranking(const ElementSnapshot& target, const PageSnapshot& old_page,
                                            const PageSnapshot& new_page, const AlgorithmConfig& cfg) {
  const double th = cfg.von.iou_threshold;
  const auto tg = group(target, old_page, th);
  const double total = weight_sum(cfg);
  std::vector<Ranked> items;
  for (const auto& c : new_page.elements) {
    const auto cg = group(c, new_page, th);
    double s = 0;
    for (const auto& e : cfg.entries) {
      double best = 0;
      for (const auto* t : tg)
        for (const auto* m : cg) best = std::max(best, property_similarity(e.property, e.function, *t, *m));
      s += best * e.weight;
    }
    items.push_back({c.element_id, c.absolute_xpath, total > 0 ? s / total : 0.0});
  }
  return order(std::move(items));
}

}  // namespace oracle

inline std::vector<std::string> ranking_ids(const LocalizationResult& r) {
  std::vector<std::string> ids;
  for (const auto& c : r.ranked) ids.push_back(c.element_id);
  return ids;
}

}  // namespace relocator::testing
