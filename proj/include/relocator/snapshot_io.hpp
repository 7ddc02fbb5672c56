#pragma once

// JSON persistence for page snapshots and benchmarks.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "relocator/model.hpp"

namespace relocator {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// A non-fatal finding about a snapshot, reported by validation.
struct Diagnostic {
  std::string path;
  std::string message;
};

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key, "missing required field");
  return *it;
}

inline std::string require_string(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_string()) throw ParseError(path + "." + key, "expected string");
  return v.get<std::string>();
}

inline std::int64_t require_int(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_number_integer()) throw ParseError(path + "." + key, "expected integer");
  return v.get<std::int64_t>();
}

// Nullable string; a missing key reads as null.
inline std::optional<std::string> nullable_string(const Json& j, const char* key,
                                                  const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(path + "." + key, "expected string or null");
  return it->get<std::string>();
}

inline bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  const int month = std::stoi(s.substr(5, 2));
  const int day = std::stoi(s.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

inline OrderedJson nullable(const std::optional<std::string>& v) {
  return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

}  // namespace detail

// Parses one element object. Tags and attribute keys are lowercased; values
// are kept verbatim. `is_button` is always derived; a conflicting stored
// value is reported through `diagnostics` when given.
inline ElementSnapshot parse_element(const Json& j, const std::string& path,
                                     std::vector<Diagnostic>* diagnostics = nullptr) {
  using namespace detail;
  if (!j.is_object()) throw ParseError(path, "expected object");
  ElementSnapshot e;
  e.element_id = require_string(j, "element_id", path);
  if (e.element_id.empty()) throw ParseError(path + ".element_id", "must be non-empty");
  e.tag = to_lower_ascii(require_string(j, "tag", path));
  e.class_attr = nullable_string(j, "class", path);
  e.name_attr = nullable_string(j, "name", path);
  e.id_attr = nullable_string(j, "id", path);
  e.href = nullable_string(j, "href", path);
  e.alt = nullable_string(j, "alt", path);
  e.type_attr = nullable_string(j, "type", path);
  e.aria_label = nullable_string(j, "aria_label", path);
  e.absolute_xpath = require_string(j, "absolute_xpath", path);
  try {
    split_xpath(e.absolute_xpath);
  } catch (const IntegrityError& err) {
    throw ParseError(path + ".absolute_xpath", err.what());
  }
  e.id_xpath = nullable_string(j, "id_xpath", path);
  e.x = require_int(j, "x", path);
  e.y = require_int(j, "y", path);
  e.width = require_int(j, "width", path);
  e.height = require_int(j, "height", path);
  if (e.width < 0) throw ParseError(path + ".width", "must be non-negative");
  if (e.height < 0) throw ParseError(path + ".height", "must be non-negative");
  e.visible_text = nullable_string(j, "visible_text", path);

  const Json& neighbors = require(j, "neighbor_text", path);
  if (!neighbors.is_array()) throw ParseError(path + ".neighbor_text", "expected array");
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    if (!neighbors[i].is_string())
      throw ParseError(path + ".neighbor_text[" + std::to_string(i) + "]", "expected string");
    e.neighbor_text.push_back(neighbors[i].get<std::string>());
  }

  const Json& attrs = require(j, "attributes", path);
  if (!attrs.is_object()) throw ParseError(path + ".attributes", "expected object");
  for (const auto& [key, value] : attrs.items()) {
    if (!value.is_string()) throw ParseError(path + ".attributes." + key, "expected string");
    e.attributes[to_lower_ascii(key)] = value.get<std::string>();
  }

  e.is_button = compute_is_button(e);

  if (diagnostics) {
    if (auto it = j.find("is_button"); it != j.end() && it->is_boolean() &&
                                       it->get<bool>() != e.is_button) {
      diagnostics->push_back({path + ".is_button", "stored is_button=" +
                                                       std::string(it->get<bool>() ? "true" : "false") +
                                                       " disagrees with derived value for element " +
                                                       e.element_id});
    }
    const std::pair<const char*, const std::optional<std::string>*> mirrored[] = {
        {"id", &e.id_attr},     {"class", &e.class_attr}, {"name", &e.name_attr},
        {"type", &e.type_attr}, {"href", &e.href},        {"alt", &e.alt},
        {"aria-label", &e.aria_label}};
    for (const auto& [key, field] : mirrored) {
      if (!*field) continue;
      auto it = e.attributes.find(key);
      if (it == e.attributes.end() || it->second != **field) {
        diagnostics->push_back({path + ".attributes", "element " + e.element_id + ": field '" +
                                                          key + "' not mirrored in attributes"});
      }
    }
  }
  return e;
}

inline OrderedJson element_to_json(const ElementSnapshot& e) {
  using detail::nullable;
  OrderedJson j;
  j["element_id"] = e.element_id;
  j["tag"] = e.tag;
  j["class"] = nullable(e.class_attr);
  j["name"] = nullable(e.name_attr);
  j["id"] = nullable(e.id_attr);
  j["href"] = nullable(e.href);
  j["alt"] = nullable(e.alt);
  j["type"] = nullable(e.type_attr);
  j["aria_label"] = nullable(e.aria_label);
  j["absolute_xpath"] = e.absolute_xpath;
  j["id_xpath"] = nullable(e.id_xpath);
  j["x"] = e.x;
  j["y"] = e.y;
  j["width"] = e.width;
  j["height"] = e.height;
  j["visible_text"] = nullable(e.visible_text);
  j["neighbor_text"] = e.neighbor_text;
  OrderedJson attrs = OrderedJson::object();
  for (const auto& [k, v] : e.attributes) attrs[k] = v;
  j["attributes"] = std::move(attrs);
  return j;
}

inline PageSnapshot parse_page_snapshot(const Json& j, std::vector<Diagnostic>* diagnostics = nullptr) {
  using namespace detail;
  const std::string root = "$";
  if (!j.is_object()) throw ParseError(root, "expected object");
  PageSnapshot page;
  page.site = require_string(j, "site", root);
  page.version_date = require_string(j, "version_date", root);
  if (!valid_iso_date(page.version_date))
    throw ParseError(root + ".version_date", "expected YYYY-MM-DD");
  const Json& vp = require(j, "viewport", root);
  page.viewport.width = require_int(vp, "width", root + ".viewport");
  page.viewport.height = require_int(vp, "height", root + ".viewport");

  const Json& elements = require(j, "elements", root);
  if (!elements.is_array()) throw ParseError(root + ".elements", "expected array");
  std::map<std::string, std::size_t> ids;
  std::map<std::string, std::string> xpaths;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string path = root + ".elements[" + std::to_string(i) + "]";
    ElementSnapshot e = parse_element(elements[i], path, diagnostics);
    if (auto [it, inserted] = ids.emplace(e.element_id, i); !inserted) {
      throw IntegrityError(path + ": duplicate element_id '" + e.element_id + "' (first at index " +
                           std::to_string(it->second) + ")");
    }
    if (auto [it, inserted] = xpaths.emplace(e.absolute_xpath, e.element_id); !inserted && diagnostics) {
      diagnostics->push_back({path + ".absolute_xpath", "duplicate absolute_xpath '" + e.absolute_xpath +
                                                            "' shared by elements " + it->second +
                                                            " and " + e.element_id});
    }
    page.elements.push_back(std::move(e));
  }
  return page;
}

inline PageSnapshot parse_page_snapshot_text(std::string_view text, std::vector<Diagnostic>* diagnostics = nullptr) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw ParseError("$", std::string("invalid JSON: ") + err.what());
  }
  return parse_page_snapshot(j, diagnostics);
}

inline OrderedJson page_to_json(const PageSnapshot& page) {
  OrderedJson j;
  j["site"] = page.site;
  j["version_date"] = page.version_date;
  j["viewport"] = {{"width", page.viewport.width}, {"height", page.viewport.height}};
  OrderedJson elements = OrderedJson::array();
  for (const auto& e : page.elements) elements.push_back(element_to_json(e));
  j["elements"] = std::move(elements);
  return j;
}

inline std::string serialize_page_snapshot(const PageSnapshot& page, int indent = 1) {
  return page_to_json(page).dump(indent);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

inline PageSnapshot load_page_snapshot(const std::filesystem::path& path,
                                       std::vector<Diagnostic>* diagnostics = nullptr) {
  try {
    return parse_page_snapshot_text(read_file(path), diagnostics);
  } catch (const ParseError& err) {
    throw ParseError(path.string() + ":" + err.path(), err.what());
  }
}

// ---------------------------------------------------------------------------
// Benchmarks

struct Benchmark {
  std::string name;
  std::vector<BenchmarkCase> cases;
};

inline constexpr const char* kBenchmarkFile = "benchmark.json";

// Loads `<dir>/benchmark.json` (or a benchmark file directly). Page references
// are either inline page objects or paths relative to the benchmark file.
inline Benchmark load_benchmark(const std::filesystem::path& location,
                                std::vector<Diagnostic>* diagnostics = nullptr) {
  namespace fs = std::filesystem;
  const fs::path file = fs::is_directory(location) ? location / kBenchmarkFile : location;
  const fs::path base = file.parent_path();
  Json j;
  try {
    j = Json::parse(read_file(file));
  } catch (const Json::parse_error& err) {
    throw ParseError(file.string() + ":$", std::string("invalid JSON: ") + err.what());
  }
  Benchmark bench;
  const Json* cases = &j;
  if (j.is_object()) {
    bench.name = j.value("name", file.stem().string());
    cases = &detail::require(j, "cases", "$");
  }
  if (!cases->is_array()) throw ParseError("$.cases", "expected array");

  std::map<std::string, std::shared_ptr<const PageSnapshot>> page_cache;
  auto resolve = [&](const Json& ref, const std::string& path) -> std::shared_ptr<const PageSnapshot> {
    if (ref.is_string()) {
      const std::string key = ref.get<std::string>();
      auto it = page_cache.find(key);
      if (it != page_cache.end()) return it->second;
      auto page = std::make_shared<const PageSnapshot>(load_page_snapshot(base / key, diagnostics));
      page_cache.emplace(key, page);
      return page;
    }
    if (ref.is_object()) {
      try {
        return std::make_shared<const PageSnapshot>(parse_page_snapshot(ref, diagnostics));
      } catch (const ParseError& err) {
        throw ParseError(path + err.path().substr(1), err.what());
      }
    }
    throw ParseError(path, "expected page path or inline page object");
  };

  std::set<std::string> case_ids;
  for (std::size_t i = 0; i < cases->size(); ++i) {
    const Json& c = (*cases)[i];
    const std::string path = "$.cases[" + std::to_string(i) + "]";
    BenchmarkCase bc;
    bc.case_id = detail::require_string(c, "case_id", path);
    if (!case_ids.insert(bc.case_id).second)
      throw IntegrityError(path + ": duplicate case_id '" + bc.case_id + "'");
    const std::string target_id = detail::require_string(c, "target_id", path);
    bc.old_page = resolve(detail::require(c, "old_page", path), path + ".old_page");
    bc.new_page = resolve(detail::require(c, "new_page", path), path + ".new_page");
    bc.ground_truth_id = detail::require_string(c, "ground_truth_id", path);
    const auto change = change_class_from_string(detail::require_string(c, "change_class", path));
    if (!change) throw ParseError(path + ".change_class", "expected no|minor|major");
    bc.change_class = *change;
    const auto locator = locator_class_from_string(detail::require_string(c, "locator_class", path));
    if (!locator) throw ParseError(path + ".locator_class", "expected all_work|abs_xpath_broken|none_work");
    bc.locator_class = *locator;

    const ElementSnapshot* target = bc.old_page->find(target_id);
    if (!target) throw IntegrityError(path + ": target_id '" + target_id + "' not in old_page");
    if (!bc.new_page->find(bc.ground_truth_id))
      throw IntegrityError(path + ": ground_truth_id '" + bc.ground_truth_id + "' not in new_page");
    bc.target = *target;
    bench.cases.push_back(std::move(bc));
  }
  return bench;
}

// Writes a benchmark as `<dir>/benchmark.json` plus one file per distinct page
// under `<dir>/pages/<site>/<version_date>.json`.
inline void save_benchmark(const Benchmark& bench, const std::filesystem::path& dir) {
  std::map<const PageSnapshot*, std::string> written;
  auto page_ref = [&](const std::shared_ptr<const PageSnapshot>& page) {
    auto it = written.find(page.get());
    if (it != written.end()) return it->second;
    const std::string rel = "pages/" + page->site + "/" + page->version_date + ".json";
    write_file(dir / rel, serialize_page_snapshot(*page) + "\n");
    written.emplace(page.get(), rel);
    return rel;
  };
  OrderedJson cases = OrderedJson::array();
  for (const auto& c : bench.cases) {
    OrderedJson j;
    j["case_id"] = c.case_id;
    j["target_id"] = c.target.element_id;
    j["old_page"] = page_ref(c.old_page);
    j["new_page"] = page_ref(c.new_page);
    j["ground_truth_id"] = c.ground_truth_id;
    j["change_class"] = to_string(c.change_class);
    j["locator_class"] = to_string(c.locator_class);
    cases.push_back(std::move(j));
  }
  OrderedJson root;
  root["name"] = bench.name;
  root["cases"] = std::move(cases);
  write_file(dir / kBenchmarkFile, root.dump(1) + "\n");
}

}  // namespace relocator
