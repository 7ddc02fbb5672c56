#pragma once

// Algorithm configurations (per-property function and weight) and the
// built-in presets.

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "relocator/property.hpp"
#include "relocator/snapshot_io.hpp"

namespace relocator {

inline constexpr double kMaxWeight = 3.0;
inline constexpr double kDefaultIouThreshold = 0.85;
inline constexpr double kSimiloMatchThreshold = 0.28;
inline constexpr double kVonMatchThreshold = 0.4;

struct VonConfig {
  double iou_threshold = kDefaultIouThreshold;
  bool use_textual_overlap = false;

  bool operator==(const VonConfig&) const = default;

  void validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
      throw ConfigError("von.iou_threshold must lie in (0, 1]");
  }
};

struct ConfigEntry {
  Property property;
  SimilarityFunction function;
  double weight = 0.0;

  bool operator==(const ConfigEntry&) const = default;
};

struct AlgorithmConfig {
  std::string name;
  std::vector<ConfigEntry> entries;
  bool normalize = true;
  VonConfig von;
  std::optional<double> match_threshold;

  bool operator==(const AlgorithmConfig&) const = default;

  double total_weight() const {
    double sum = 0.0;
    for (const auto& e : entries) sum += e.weight;
    return sum;
  }

  const ConfigEntry* find(Property p) const {
    for (const auto& e : entries)
      if (e.property == p) return &e;
    return nullptr;
  }

  AlgorithmConfig scaled(double factor) const {
    AlgorithmConfig out = *this;
    for (auto& e : out.entries) e.weight *= factor;
    return out;
  }

  // Weight bounds apply to configs read from files; scaled copies used for
  // invariance checks skip this.
  void validate(bool check_weight_range = true) const {
    std::set<Property> seen;
    for (const auto& e : entries) {
      if (!seen.insert(e.property).second)
        throw ConfigError("property '" + std::string(property_id(e.property)) + "' configured twice");
      if (!function_applies(e.property, e.function.kind))
        throw ConfigError("function '" + function_id(e.function) + "' does not apply to property '" +
                          std::string(property_id(e.property)) + "'");
      e.function.validate();
      if (!(e.weight >= 0.0) || (check_weight_range && e.weight > kMaxWeight))
        throw ConfigError("weight of '" + std::string(property_id(e.property)) + "' outside [0, 3]");
    }
    von.validate();
  }
};

// ---------------------------------------------------------------------------
// JSON

inline AlgorithmConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected object");
  AlgorithmConfig cfg;
  cfg.name = j.value("name", std::string{});
  cfg.normalize = j.value("normalize", true);
  auto entries = j.find("entries");
  if (entries == j.end() || !entries->is_array()) throw ConfigError("config: missing 'entries' array");
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const Json& e = (*entries)[i];
    const std::string where = "config.entries[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("property") || !e.contains("function") || !e.contains("weight"))
      throw ConfigError(where + ": needs property, function and weight");
    std::optional<double> lambda, max_distance;
    if (e.contains("lambda")) lambda = e["lambda"].get<double>();
    if (e.contains("max_distance")) max_distance = e["max_distance"].get<double>();
    ConfigEntry entry;
    entry.property = parse_property_id(e["property"].get<std::string>());
    entry.function = parse_function_id(e["function"].get<std::string>(), lambda, max_distance);
    if (!e["weight"].is_number()) throw ConfigError(where + ": weight must be a number");
    entry.weight = e["weight"].get<double>();
    cfg.entries.push_back(entry);
  }
  if (auto von = j.find("von"); von != j.end()) {
    cfg.von.iou_threshold = von->value("iou_threshold", kDefaultIouThreshold);
    cfg.von.use_textual_overlap = von->value("use_textual_overlap", false);
  }
  if (auto t = j.find("match_threshold"); t != j.end() && !t->is_null()) cfg.match_threshold = t->get<double>();
  cfg.validate();
  return cfg;
}

inline OrderedJson config_to_json(const AlgorithmConfig& cfg) {
  OrderedJson j;
  if (!cfg.name.empty()) j["name"] = cfg.name;
  j["normalize"] = cfg.normalize;
  OrderedJson entries = OrderedJson::array();
  for (const auto& e : cfg.entries) {
    OrderedJson item;
    item["property"] = property_id(e.property);
    const std::string fid = function_id(e.function);
    item["function"] = fid;
    if (e.function.kind == FunctionKind::ExpDecay && fid == "exp_decay") item["lambda"] = e.function.lambda;
    if (e.function.max_distance > 0 && e.function.max_distance != kDefaultMaxDistance)
      item["max_distance"] = e.function.max_distance;
    item["weight"] = e.weight;
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  j["von"] = {{"iou_threshold", cfg.von.iou_threshold}, {"use_textual_overlap", cfg.von.use_textual_overlap}};
  if (cfg.match_threshold) j["match_threshold"] = *cfg.match_threshold;
  return j;
}

inline AlgorithmConfig load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& err) {
    throw ConfigError(path.string() + ": invalid JSON: " + err.what());
  }
  AlgorithmConfig cfg = parse_config(j);
  if (cfg.name.empty()) cfg.name = path.stem().string();
  return cfg;
}

// ---------------------------------------------------------------------------
// Presets

namespace presets {

inline ConfigEntry entry(Property p, std::string_view function, double weight) {
  return {p, parse_function_id(function), weight};
}

// Original Similo properties, functions and weights. Stable properties weigh
// 1.5, the rest 0.5; the weights sum to 12.
inline AlgorithmConfig similo_2023() {
  using P = Property;
  AlgorithmConfig c;
  c.name = "similo-2023";
  c.entries = {
      entry(P::Tag, "equality", 1.5),
      entry(P::Class, "levenshtein", 0.5),
      entry(P::Name, "equality", 1.5),
      entry(P::Id, "equality", 1.5),
      entry(P::Href, "levenshtein", 0.5),
      entry(P::Alt, "levenshtein", 0.5),
      entry(P::AbsoluteXPath, "levenshtein", 0.5),
      entry(P::IdXPath, "levenshtein", 0.5),
      entry(P::IsButton, "equality", 0.5),
      entry(P::Location, "euclidean", 0.5),
      // Scalar "Euclidean distance" on area and w/h is scored as a ratio.
      entry(P::Area, "area", 0.5),
      entry(P::Shape, "aspect_ratio", 0.5),
      entry(P::VisibleText, "levenshtein", 1.5),
      entry(P::NeighborText, "word_set", 1.5),
  };
  return c;
}

// Optimized on the extended benchmark for fitness. "-" rows carry weight 0.
inline AlgorithmConfig similo_ext_m6() {
  using P = Property;
  AlgorithmConfig c;
  c.name = "similo-ext-m6";
  c.entries = {
      entry(P::Tag, "jaccard", 0.80),
      entry(P::Class, "levenshtein", 0.0),  // excluded
      entry(P::Name, "levenshtein", 2.85),
      entry(P::Id, "levenshtein", 0.50),
      entry(P::Href, "equality", 0.95),
      entry(P::Alt, "equality", 1.85),
      entry(P::Type, "equality", 2.75),
      entry(P::AriaLabel, "jaccard", 0.90),
      entry(P::AbsoluteXPath, "jaccard", 0.10),
      entry(P::IdXPath, "levenshtein", 0.45),
      entry(P::IsButton, "equality", 0.0),  // excluded
      entry(P::Location, "exp_decay_medium", 1.20),
      entry(P::Area, "area", 0.35),
      entry(P::VisibleText, "levenshtein", 2.80),
      entry(P::NeighborText, "word_set", 1.45),
      entry(P::Attributes, "intersect_value", 1.80),
  };
  return c;
}

// VON Similo optimized for overlap matches.
inline AlgorithmConfig von_similo_llm_m3() {
  using P = Property;
  AlgorithmConfig c;
  c.name = "von-similo-llm-m3";
  c.entries = {
      entry(P::Tag, "levenshtein", 1.25),
      entry(P::Class, "jaro_winkler", 0.65),
      entry(P::Name, "equality", 1.80),
      entry(P::Id, "jaccard", 2.50),
      entry(P::Href, "levenshtein", 0.80),
      entry(P::Alt, "levenshtein", 0.10),
      entry(P::Type, "equality", 2.85),
      entry(P::AriaLabel, "levenshtein", 2.35),
      entry(P::AbsoluteXPath, "levenshtein", 1.05),
      entry(P::IdXPath, "equality", 0.75),
      entry(P::IsButton, "equality", 2.85),
      entry(P::Location, "exp_decay_small", 2.00),
      entry(P::Area, "area", 0.95),
      entry(P::VisibleText, "levenshtein", 2.50),
      entry(P::NeighborText, "levenshtein", 2.30),
      entry(P::Attributes, "intersect_value", 1.00),
  };
  return c;
}

// Similo optimized for exact matches.
inline AlgorithmConfig similo_llm_m4() {
  using P = Property;
  AlgorithmConfig c;
  c.name = "similo-llm-m4";
  c.entries = {
      entry(P::Tag, "jaro_winkler", 2.35),
      entry(P::Class, "word_set", 1.00),
      entry(P::Name, "equality", 2.90),
      entry(P::Id, "levenshtein", 2.70),
      entry(P::Href, "levenshtein", 0.30),
      entry(P::Alt, "levenshtein", 1.95),
      entry(P::Type, "equality", 1.10),
      entry(P::AriaLabel, "equality", 2.95),
      entry(P::AbsoluteXPath, "equality", 0.50),
      entry(P::IdXPath, "levenshtein", 0.50),
      entry(P::IsButton, "equality", 0.0),  // excluded
      entry(P::Location, "manhattan", 2.00),
      entry(P::Area, "area", 1.30),
      entry(P::VisibleText, "levenshtein", 2.95),
      entry(P::NeighborText, "levenshtein", 1.00),
      entry(P::Attributes, "intersect_value", 2.20),
  };
  return c;
}

// Similo optimized for overlap matches. Its "Linear" location function is
// read as the normalized Euclidean falloff.
inline AlgorithmConfig similo_llm_m3() {
  using P = Property;
  AlgorithmConfig c;
  c.name = "similo-llm-m3";
  c.entries = {
      entry(P::Tag, "levenshtein", 0.80),
      entry(P::Class, "levenshtein", 1.10),
      entry(P::Name, "equality", 1.70),
      entry(P::Id, "levenshtein", 2.85),
      entry(P::Href, "levenshtein", 2.85),
      entry(P::Alt, "levenshtein", 0.60),
      entry(P::Type, "equality", 2.45),
      entry(P::AriaLabel, "equality", 1.40),
      entry(P::AbsoluteXPath, "equality", 0.05),
      entry(P::IdXPath, "levenshtein", 1.25),
      entry(P::IsButton, "equality", 0.10),
      entry(P::Location, "linear", 2.15),
      entry(P::Area, "area", 1.85),
      entry(P::VisibleText, "levenshtein", 2.55),
      entry(P::NeighborText, "word_set", 1.70),
      entry(P::Attributes, "intersect_value", 2.50),
  };
  return c;
}

}  // namespace presets

inline std::vector<std::string> builtin_preset_names() {
  return {"similo-2023", "similo-ext-m6", "von-similo-llm-m3", "similo-llm-m4", "similo-llm-m3"};
}

inline std::optional<AlgorithmConfig> builtin_preset(std::string_view name) {
  if (name == "similo-2023") return presets::similo_2023();
  if (name == "similo-ext-m6") return presets::similo_ext_m6();
  if (name == "von-similo-llm-m3") return presets::von_similo_llm_m3();
  if (name == "similo-llm-m4") return presets::similo_llm_m4();
  if (name == "similo-llm-m3") return presets::similo_llm_m3();
  return std::nullopt;
}

// Resolves a preset by name. `$RELOCATOR_CONFIG_DIR/<name>.json` takes
// precedence over the built-in table.
inline AlgorithmConfig load_preset(std::string_view name) {
  if (const char* dir = std::getenv("RELOCATOR_CONFIG_DIR"); dir && *dir) {
    const auto path = std::filesystem::path(dir) / (std::string(name) + ".json");
    if (std::filesystem::exists(path)) {
      AlgorithmConfig cfg = load_config(path);
      cfg.name = std::string(name);
      return cfg;
    }
  }
  if (auto cfg = builtin_preset(name)) return *cfg;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace relocator
