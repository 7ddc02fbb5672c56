#pragma once

// Rendering of metric reports: aligned text table, CSV, and JSON, plus the
// structural check used on report JSON read back from disk.

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "relocator/metrics.hpp"

namespace relocator {

inline std::string format_metric_cell(const MetricValue& v) {
  if (!v.value) return "n/a";
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2);
  if (v.value_only) {
    ss << *v.value * 100.0 << "%";
  } else {
    ss << v.numerator << " (" << *v.value * 100.0 << "%)";
  }
  return ss.str();
}

// One row per report, one column per selected metric.
inline std::string render_table(const std::vector<MetricReport>& reports, const std::vector<Metric>& metrics) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"algorithm"};
  std::vector<std::string> subheader{""};
  for (Metric m : metrics) {
    std::string id(metric_id(m));
    for (auto& ch : id) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    header.push_back(id);
    subheader.push_back("(" + std::string(metric_title(m)) + ")");
  }
  rows.push_back(header);
  rows.push_back(subheader);
  for (const auto& r : reports) {
    std::vector<std::string> row{r.algorithm};
    for (Metric m : metrics) row.push_back(format_metric_cell(r.per_metric.at(m)));
    rows.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) out << "  ";
      out << (i == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[i])) << rows[r][i];
    }
    out << "\n";
    if (r == 1) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total - 2, '-') << "\n";
    }
  }
  return out.str();
}

inline std::string render_csv(const std::vector<MetricReport>& reports, const std::vector<Metric>& metrics) {
  std::ostringstream out;
  out << "algorithm,benchmark";
  for (Metric m : metrics) out << "," << metric_id(m) << "_numerator," << metric_id(m) << "_denominator," << metric_id(m);
  out << "\n";
  for (const auto& r : reports) {
    out << r.algorithm << "," << r.benchmark;
    for (Metric m : metrics) {
      const auto& v = r.per_metric.at(m);
      out << "," << v.numerator << "," << v.denominator << ",";
      if (v.value) out << std::setprecision(10) << *v.value;
      else out << "n/a";
    }
    out << "\n";
  }
  return out.str();
}

inline OrderedJson metric_value_to_json(Metric m, const MetricValue& v) {
  OrderedJson j;
  if (m == Metric::M9) {
    j["earned"] = v.earned;
    j["attainable"] = v.attainable;
  } else {
    j["numerator"] = v.numerator;
    j["denominator"] = v.denominator;
  }
  j["value"] = v.value ? OrderedJson(*v.value) : OrderedJson(nullptr);
  j["value_only"] = v.value_only;
  return j;
}

inline OrderedJson report_to_json(const MetricReport& r, const std::vector<Metric>& metrics) {
  OrderedJson j;
  j["algorithm"] = r.algorithm;
  j["benchmark"] = r.benchmark;
  j["seed"] = r.seed;
  OrderedJson per_metric = OrderedJson::object();
  for (Metric m : metrics) per_metric[std::string(metric_id(m))] = metric_value_to_json(m, r.per_metric.at(m));
  j["metrics"] = std::move(per_metric);
  OrderedJson cases = OrderedJson::array();
  for (const auto& o : r.per_case) {
    OrderedJson c;
    c["case_id"] = o.case_id;
    c["chosen_id"] = o.chosen_id;
    c["truth_rank"] = o.truth_rank;
    c["locator_changed"] = o.locator_changed;
    c["m1"] = o.m1;
    c["m3"] = o.m3;
    c["m4"] = o.m4;
    c["m7"] = o.m7;
    c["m8"] = o.m8;
    c["m2_positive"] = o.m2_positive ? OrderedJson(*o.m2_positive) : OrderedJson(nullptr);
    c["m2_negative"] = o.m2_negative ? OrderedJson(*o.m2_negative) : OrderedJson(nullptr);
    c["negative_id"] = o.negative_id;
    c["fitness_earned"] = o.fitness_earned;
    c["fitness_attainable"] = o.fitness_attainable;
    cases.push_back(std::move(c));
  }
  j["cases"] = std::move(cases);
  return j;
}

// Reads back the JSON form, checking its structure on the way.
inline MetricReport report_from_json(const Json& j) {
  auto fail = [](const std::string& path, const std::string& what) { throw ParseError(path, what); };
  if (!j.is_object()) fail("$", "expected object");
  MetricReport r;
  r.algorithm = detail::require_string(j, "algorithm", "$");
  r.benchmark = detail::require_string(j, "benchmark", "$");
  const Json& seed = detail::require(j, "seed", "$");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail("$.seed", "expected integer");
  r.seed = seed.get<std::uint64_t>();

  const Json& cases = detail::require(j, "cases", "$");
  if (!cases.is_array()) fail("$.cases", "expected array");
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Json& c = cases[i];
    const std::string path = "$.cases[" + std::to_string(i) + "]";
    CaseOutcome o;
    o.case_id = detail::require_string(c, "case_id", path);
    o.chosen_id = detail::require_string(c, "chosen_id", path);
    const Json& rank = detail::require(c, "truth_rank", path);
    if (!rank.is_number_integer()) fail(path + ".truth_rank", "expected integer");
    o.truth_rank = rank.get<std::size_t>();
    auto flag = [&](const char* key) {
      const Json& v = detail::require(c, key, path);
      if (!v.is_boolean()) fail(path + "." + key, "expected boolean");
      return v.get<bool>();
    };
    auto optional_flag = [&](const char* key) -> std::optional<bool> {
      const Json& v = detail::require(c, key, path);
      if (v.is_null()) return std::nullopt;
      if (!v.is_boolean()) fail(path + "." + key, "expected boolean or null");
      return v.get<bool>();
    };
    o.locator_changed = flag("locator_changed");
    o.m1 = flag("m1");
    o.m3 = flag("m3");
    o.m4 = flag("m4");
    o.m7 = flag("m7");
    o.m8 = flag("m8");
    o.m2_positive = optional_flag("m2_positive");
    o.m2_negative = optional_flag("m2_negative");
    o.negative_id = detail::require_string(c, "negative_id", path);
    auto number = [&](const char* key) {
      const Json& v = detail::require(c, key, path);
      if (!v.is_number()) fail(path + "." + key, "expected number");
      return v.get<double>();
    };
    o.fitness_earned = number("fitness_earned");
    o.fitness_attainable = number("fitness_attainable");
    if (o.fitness_earned > o.fitness_attainable + 1e-12) fail(path, "fitness_earned exceeds attainable");
    r.per_case.push_back(std::move(o));
  }

  const Json& metrics = detail::require(j, "metrics", "$");
  if (!metrics.is_object()) fail("$.metrics", "expected object");
  for (const auto& [id, v] : metrics.items()) {
    const Metric m = parse_metric(id);
    const std::string path = "$.metrics." + id;
    MetricValue mv;
    if (m == Metric::M9) {
      mv.earned = detail::require(v, "earned", path).get<double>();
      mv.attainable = detail::require(v, "attainable", path).get<double>();
    } else {
      mv.numerator = detail::require(v, "numerator", path).get<std::size_t>();
      mv.denominator = detail::require(v, "denominator", path).get<std::size_t>();
      if (mv.numerator > mv.denominator) fail(path, "numerator exceeds denominator");
    }
    const Json& value = detail::require(v, "value", path);
    if (!value.is_null()) {
      if (!value.is_number()) fail(path + ".value", "expected number or null");
      mv.value = value.get<double>();
      if (*mv.value < 0.0 || *mv.value > 1.0) fail(path + ".value", "outside [0, 1]");
    }
    mv.value_only = detail::require(v, "value_only", path).get<bool>();
    r.per_metric[m] = mv;
  }
  return r;
}

// Empty when every reported metric agrees with a recomputation from the
// per-case rows; otherwise one message per disagreement.
inline std::vector<std::string> check_report_consistency(const MetricReport& r) {
  std::vector<std::string> problems;
  const auto recomputed = aggregate(r.per_case);
  for (const auto& [m, v] : r.per_metric) {
    const auto& want = recomputed.at(m);
    const std::string id(metric_id(m));
    if (v.numerator != want.numerator || v.denominator != want.denominator)
      problems.push_back(id + ": counts " + std::to_string(v.numerator) + "/" + std::to_string(v.denominator) +
                         " but cases give " + std::to_string(want.numerator) + "/" + std::to_string(want.denominator));
    if (v.value.has_value() != want.value.has_value() ||
        (v.value && std::abs(*v.value - *want.value) > 1e-9))
      problems.push_back(id + ": value disagrees with per-case rows");
  }
  return problems;
}

}  // namespace relocator
