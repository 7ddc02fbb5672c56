// relocator: command-line front end for element relocalization, benchmark
// evaluation, weight optimization, snapshot validation and locator healing.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "relocator/relocator.hpp"

namespace fs = std::filesystem;
using namespace relocator;

namespace {

struct Globals {
  std::string preset;
  std::string config;
  std::uint64_t seed = 0;
  bool json = false;
  bool quiet = false;
};

AlgorithmConfig resolve_config(const Globals& g, std::string_view fallback) {
  if (!g.config.empty()) return load_config(g.config);
  return load_preset(g.preset.empty() ? fallback : std::string_view(g.preset));
}

struct EngineOptions {
  std::string algorithm = "similo";
  std::string von_preset = "von-similo-llm-m3";
  std::size_t k = kDefaultPreselectGroups;
};

Localizer make_engine(Algorithm kind, const Globals& g, const EngineOptions& e) {
  switch (kind) {
    case Algorithm::Similo: return Localizer::similo(resolve_config(g, "similo-2023"));
    case Algorithm::Von: return Localizer::von(resolve_config(g, "von-similo-llm-m3"));
    case Algorithm::Hybrid: {
      if (e.k < 1) throw UsageError("--k must be >= 1");
      return Localizer::hybrid(load_preset(e.von_preset), resolve_config(g, "similo-llm-m4"), e.k);
    }
  }
  throw Error("unreachable");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Metric> parse_metric_list(const std::string& s) {
  if (s.empty()) return {kAllMetrics.begin(), kAllMetrics.end()};
  std::vector<Metric> out;
  for (const auto& id : split_list(s)) out.push_back(parse_metric(id));
  return out;
}

MetricOptions metric_options(const Globals& g, const std::string& fitness_file) {
  MetricOptions opts;
  opts.seed = g.seed;
  if (!fitness_file.empty()) {
    try {
      opts.fitness = parse_fitness_table(Json::parse(read_file(fitness_file)));
    } catch (const Json::parse_error& err) {
      throw ConfigError(fitness_file + ": invalid JSON: " + err.what());
    }
  }
  return opts;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string benchmark;
  std::string metrics;
  std::string out;
  std::string fitness;
};

int cmd_run(const Globals& g, const EngineOptions& e, const RunArgs& a) {
  const Benchmark bench = load_benchmark(a.benchmark);
  const auto metrics = parse_metric_list(a.metrics);
  const MetricOptions opts = metric_options(g, a.fitness);
  std::vector<MetricReport> reports;
  for (const auto& name : split_list(e.algorithm))
    reports.push_back(evaluate(bench, make_engine(parse_algorithm(name), g, e), opts));
  if (reports.empty()) throw UsageError("--algorithm needs at least one of similo|von|hybrid");

  OrderedJson json;
  if (reports.size() == 1) {
    json = report_to_json(reports.front(), metrics);
  } else {
    json["reports"] = OrderedJson::array();
    for (const auto& r : reports) json["reports"].push_back(report_to_json(r, metrics));
  }
  if (!a.out.empty()) {
    write_file(fs::path(a.out) / "report.json", json.dump(1) + "\n");
    write_file(fs::path(a.out) / "report.csv", render_csv(reports, metrics));
    write_file(fs::path(a.out) / "report.txt", render_table(reports, metrics));
  }
  if (g.json)
    std::cout << json.dump(1) << "\n";
  else if (!g.quiet)
    std::cout << render_table(reports, metrics);
  return 0;
}

// ---------------------------------------------------------------------------

struct HealArgs {
  std::string cache;
  std::string locator;
  std::string page;
  std::string record;
  std::optional<double> warn_below;
};

int cmd_heal(const Globals& g, const EngineOptions& e, const HealArgs& a) {
  const PageSnapshot page = load_page_snapshot(a.page);
  JsonFingerprintCache cache(a.cache);
  const Localizer loc = make_engine(parse_algorithm(e.algorithm), g, e);

  if (!a.record.empty()) {
    cache.put(make_cache_entry(a.locator, page, a.record, loc.config.von));
    cache.save();
    if (g.json)
      std::cout << OrderedJson{{"locator", a.locator}, {"element_id", a.record}, {"version_date", page.version_date}}
                       .dump(1)
                << "\n";
    else if (!g.quiet)
      std::cout << "recorded " << a.locator << " -> " << a.record << "\n";
    return 0;
  }

  const HealResult r = heal(cache, a.locator, page, loc, a.warn_below);
  cache.save();
  if (r.low_score)
    std::cerr << "warning: low similarity " << r.score << " for locator '" << a.locator << "' (threshold "
              << *a.warn_below << ")\n";
  if (g.json) {
    OrderedJson j;
    j["locator"] = a.locator;
    j["element_id"] = r.element_id;
    j["absolute_xpath"] = r.absolute_xpath;
    j["score"] = r.score;
    j["low_score"] = r.low_score;
    j["previous_version_date"] = r.previous_version_date;
    j["version_date"] = r.version_date;
    std::cout << j.dump(1) << "\n";
  } else if (!g.quiet) {
    std::cout << r.element_id << "\t" << r.absolute_xpath << "\t" << r.score << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::string benchmark;
  std::string objective = "m4";
  std::size_t generations = GaParams{}.generations;
  std::size_t population = GaParams{}.population;
  std::size_t rounds = SelectionParams{}.rounds;
  std::size_t phases = OptimizerOptions{}.phases;
  std::size_t folds = 0;
  std::string out;
  std::string trace;
};

int cmd_optimize(const Globals& g, const EngineOptions& e, const OptimizeArgs& a) {
  SearchSpace space;
  space.benchmark = std::make_shared<const Benchmark>(load_benchmark(a.benchmark));
  space.algorithm = parse_algorithm(e.algorithm);
  space.objective = parse_metric(a.objective);
  space.metric_options.seed = g.seed;
  space.k = e.k;
  AlgorithmConfig base;
  if (space.algorithm == Algorithm::Hybrid) {
    space.stage1 = load_preset(e.von_preset);
    base = resolve_config(g, "similo-llm-m4");
  } else {
    base = resolve_config(g, space.algorithm == Algorithm::Von ? "von-similo-llm-m3" : "similo-2023");
  }
  space.von = base.von;
  space.match_threshold = base.match_threshold;

  OptimizerOptions opts;
  opts.seed = g.seed;
  opts.ga.generations = a.generations;
  opts.ga.population = a.population;
  opts.selection.rounds = a.rounds;
  opts.phases = a.phases;
  opts.name = "optimized-" + std::string(to_string(space.algorithm)) + "-" + a.objective;

  OrderedJson summary;
  OptimizationRun run;
  if (a.folds > 0) {
    const CrossValidation cv = cross_validate(space, base, a.folds, opts);
    OrderedJson folds = OrderedJson::array();
    for (const auto& f : cv.folds) {
      folds.push_back({{"holdout_sites", f.holdout_sites},
                       {"train_score", f.train_score},
                       {"holdout_score", f.holdout_score},
                       {"base_holdout_score", f.base_holdout_score}});
      if (!g.quiet && !g.json) {
        std::cout << "fold";
        for (const auto& s : f.holdout_sites) std::cout << " " << s;
        std::cout << ": train " << f.train_score << "  holdout " << f.holdout_score << "  base " << f.base_holdout_score
                  << "\n";
      }
    }
    summary["folds"] = std::move(folds);
    summary["mean_holdout"] = cv.mean_holdout;
    summary["stddev_holdout"] = cv.stddev_holdout;
    if (!g.quiet && !g.json) std::cout << "holdout mean " << cv.mean_holdout << " sd " << cv.stddev_holdout << "\n";
  }
  run = optimize(space, base, opts);

  summary["objective"] = a.objective;
  summary["algorithm"] = to_string(space.algorithm);
  summary["seed"] = g.seed;
  summary["best_fitness"] = run.best_fitness;
  summary["evaluations"] = run.evaluations;
  summary["best_config"] = config_to_json(run.best_config);
  OrderedJson trace = OrderedJson::array();
  for (const auto& t : run.fitness_trace) trace.push_back({t.generation, t.best_fitness});
  summary["fitness_trace"] = std::move(trace);

  const std::string csv = trace_to_csv(run.fitness_trace);
  std::string trace_path = a.trace;
  if (trace_path.empty() && !a.out.empty()) trace_path = (fs::path(a.out).parent_path() / (fs::path(a.out).stem().string() + ".trace.csv")).string();
  if (!a.out.empty()) write_file(a.out, config_to_json(run.best_config).dump(1) + "\n");
  if (!trace_path.empty()) write_file(trace_path, csv);

  if (g.json) {
    std::cout << summary.dump(1) << "\n";
  } else if (!g.quiet) {
    std::cout << a.objective << " " << run.best_fitness << " after " << run.evaluations << " evaluations\n";
    if (trace_path.empty()) std::cout << csv;
    if (a.out.empty()) std::cout << config_to_json(run.best_config).dump(1) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Globals& g, const std::string& path) {
  std::vector<Diagnostic> diagnostics;
  std::string kind = "page";
  try {
    const bool is_benchmark = fs::is_directory(path) || [&] {
      const Json j = Json::parse(read_file(path));
      return j.is_array() || (j.is_object() && j.contains("cases"));
    }();
    if (is_benchmark) {
      kind = "benchmark";
      load_benchmark(path, &diagnostics);
    } else {
      load_page_snapshot(path, &diagnostics);
    }
  } catch (const Json::parse_error& err) {
    throw ParseError(path + ":$", std::string("invalid JSON: ") + err.what());
  }
  if (g.json) {
    OrderedJson j;
    j["path"] = path;
    j["kind"] = kind;
    j["ok"] = diagnostics.empty();
    j["diagnostics"] = OrderedJson::array();
    for (const auto& d : diagnostics) j["diagnostics"].push_back({{"path", d.path}, {"message", d.message}});
    std::cout << j.dump(1) << "\n";
  } else {
    for (const auto& d : diagnostics) std::cout << d.path << ": " << d.message << "\n";
    if (diagnostics.empty() && !g.quiet) std::cout << "ok\n";
  }
  return diagnostics.empty() ? 0 : static_cast<int>(ExitCode::Integrity);
}

// ---------------------------------------------------------------------------

struct BenchGenArgs {
  std::string out;
  std::size_t sites = 2;
  std::size_t versions = 3;
  std::size_t elements = 5;
  std::string profile = "standard";
};

int cmd_bench_gen(const Globals& g, const BenchGenArgs& a) {
  GeneratorOptions opts;
  opts.seed = g.seed;
  opts.sites = a.sites;
  opts.versions = a.versions;
  opts.elements_per_site = a.elements;
  opts.profile = profile_by_name(a.profile);
  const Benchmark bench = generate_benchmark(opts);
  save_benchmark(bench, a.out);
  if (g.json)
    std::cout << OrderedJson{{"out", a.out}, {"name", bench.name}, {"cases", bench.cases.size()}}.dump(1) << "\n";
  else if (!g.quiet)
    std::cout << "wrote " << bench.cases.size() << " cases to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_report(const Globals& g, const std::string& path, const std::string& metric_list, const std::string& format) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& err) {
    throw ParseError(path + ":$", std::string("invalid JSON: ") + err.what());
  }
  std::vector<MetricReport> reports;
  if (j.is_object() && j.contains("reports")) {
    for (const auto& r : j["reports"]) reports.push_back(report_from_json(r));
  } else {
    reports.push_back(report_from_json(j));
  }
  std::vector<std::string> problems;
  for (const auto& r : reports)
    for (const auto& p : check_report_consistency(r)) problems.push_back(r.algorithm + ": " + p);

  std::vector<Metric> metrics;
  if (metric_list.empty()) {
    for (const auto& [m, v] : reports.front().per_metric) metrics.push_back(m);
  } else {
    metrics = parse_metric_list(metric_list);
  }
  for (const auto& r : reports)
    for (Metric m : metrics)
      if (!r.per_metric.count(m)) throw UsageError("report has no metric " + std::string(metric_id(m)));

  const std::string fmt = g.json ? "json" : format;
  if (fmt == "json") {
    OrderedJson out;
    out["consistent"] = problems.empty();
    out["problems"] = problems;
    std::cout << out.dump(1) << "\n";
  } else if (!g.quiet) {
    std::cout << (fmt == "csv" ? render_csv(reports, metrics) : render_table(reports, metrics));
  }
  for (const auto& p : problems) std::cerr << "inconsistent: " << p << "\n";
  return problems.empty() ? 0 : static_cast<int>(ExitCode::Integrity);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Web element relocalization: localize, evaluate, optimize, heal"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--preset", g.preset, "Configuration preset name");
  app.add_option("--config", g.config, "Configuration JSON file (overrides --preset)");
  app.add_option("--seed", g.seed, "Seed for sampling, generation and optimization");
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--quiet", g.quiet, "Suppress console output");

  EngineOptions engine;
  auto add_engine = [&](CLI::App* sub, bool list) {
    sub->add_option("--algorithm", engine.algorithm, list ? "similo|von|hybrid, comma-separated" : "similo|von|hybrid");
    sub->add_option("--von-preset", engine.von_preset, "Hybrid stage-1 preset");
    sub->add_option("--k", engine.k, "Hybrid: overlap groups passed to stage 2");
  };

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evaluate algorithms on a benchmark");
  run_cmd->add_option("--benchmark", run.benchmark, "Benchmark directory or file")->required();
  run_cmd->add_option("--metrics", run.metrics, "Metric columns, e.g. m1,m3,m4");
  run_cmd->add_option("--out", run.out, "Directory for report.json/.csv/.txt");
  run_cmd->add_option("--fitness-table", run.fitness, "Fitness table JSON for m9");
  add_engine(run_cmd, true);

  HealArgs heal_args;
  double warn_below = -1.0;
  auto* heal_cmd = app.add_subcommand("heal", "Re-locate a cached locator on a new page");
  heal_cmd->add_option("--cache", heal_args.cache, "Fingerprint cache file")->required();
  heal_cmd->add_option("--locator", heal_args.locator, "Locator key")->required();
  heal_cmd->add_option("--page", heal_args.page, "New page snapshot")->required();
  heal_cmd->add_option("--record", heal_args.record, "Store this element of the page under the key instead");
  auto* warn_opt = heal_cmd->add_option("--warn-below", warn_below, "Warn when the match score is below this");
  add_engine(heal_cmd, false);

  OptimizeArgs opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Search similarity functions and weights");
  opt_cmd->add_option("--benchmark", opt.benchmark, "Training benchmark")->required();
  opt_cmd->add_option("--objective", opt.objective, "Metric to maximize (m1..m9)");
  opt_cmd->add_option("--generations", opt.generations, "GA generations per weight phase");
  opt_cmd->add_option("--population", opt.population, "GA population size");
  opt_cmd->add_option("--rounds", opt.rounds, "Function-selection rounds");
  opt_cmd->add_option("--phases", opt.phases, "Function/weight cycles");
  opt_cmd->add_option("--folds", opt.folds, "Also run site-level k-fold cross-validation");
  opt_cmd->add_option("--out", opt.out, "Write the best config here");
  opt_cmd->add_option("--trace", opt.trace, "Write the fitness trace CSV here");
  add_engine(opt_cmd, false);

  std::string validate_path;
  auto* val_cmd = app.add_subcommand("validate", "Check a page snapshot or benchmark");
  val_cmd->add_option("path", validate_path, "Snapshot file, benchmark file or directory")->required();

  BenchGenArgs gen;
  auto* gen_cmd = app.add_subcommand("bench-gen", "Generate a synthetic benchmark");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--sites", gen.sites, "Sites");
  gen_cmd->add_option("--versions", gen.versions, "Versions per site");
  gen_cmd->add_option("--elements", gen.elements, "Tracked elements per site");
  gen_cmd->add_option("--profile", gen.profile, "Mutation profile: standard|degrade-tag-text");

  std::string report_path, report_metrics, report_format = "table";
  auto* rep_cmd = app.add_subcommand("report", "Render a saved report and check its counts");
  rep_cmd->add_option("path", report_path, "report.json")->required();
  rep_cmd->add_option("--metrics", report_metrics, "Metric columns");
  rep_cmd->add_option("--format", report_format, "table|csv|json")->check(CLI::IsMember({"table", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }

  try {
    if (*run_cmd) return cmd_run(g, engine, run);
    if (*heal_cmd) {
      if (warn_opt->count()) heal_args.warn_below = warn_below;
      return cmd_heal(g, engine, heal_args);
    }
    if (*opt_cmd) return cmd_optimize(g, engine, opt);
    if (*val_cmd) return cmd_validate(g, validate_path);
    if (*gen_cmd) return cmd_bench_gen(g, gen);
    if (*rep_cmd) return cmd_report(g, report_path, report_metrics, report_format);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Internal);
  }
  return static_cast<int>(ExitCode::Usage);
}
