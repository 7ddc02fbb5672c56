#pragma once

// Search over per-property similarity functions and grid-quantized weights:
// coordinate-wise function selection with brute-force resolution of
// near-ties, a genetic algorithm over weights, and site-level
// cross-validation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "relocator/metrics.hpp"
#include "relocator/random.hpp"

namespace relocator {

class WeightGrid {
 public:
  WeightGrid() : WeightGrid(arithmetic(0.0, kMaxWeight, 0.05)) {}

  // lo, lo + step, ..., up to hi. Values are rounded to 1e-9 so the grid
  // prints cleanly (0.15, not 0.15000000000000002).
  static WeightGrid arithmetic(double lo, double hi, double step) {
    if (!(step > 0.0)) throw ConfigError("weight grid step must be > 0");
    if (!(hi >= lo)) throw ConfigError("weight grid upper bound below lower bound");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
    return WeightGrid(std::move(values));
  }

  static WeightGrid of(std::vector<double> values) { return WeightGrid(std::move(values)); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  // Index of the closest value; the lower one on an exact midpoint.
  std::size_t nearest(double w) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values_.size(); ++i)
      if (std::abs(values_[i] - w) < std::abs(values_[best] - w)) best = i;
    return best;
  }

  bool contains(double w) const { return std::find(values_.begin(), values_.end(), w) != values_.end(); }

 private:
  explicit WeightGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ConfigError("weight grid is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] >= 0.0)) throw ConfigError("weight grid values must be >= 0");
      if (i > 0 && !(values_[i] > values_[i - 1])) throw ConfigError("weight grid must be strictly increasing");
    }
  }

  std::vector<double> values_;
};

struct PropertyChoices {
  Property property;
  std::vector<SimilarityFunction> functions;
};

// Every property with every applicable function; exponential decay at the
// three standard rates.
inline std::vector<PropertyChoices> standard_candidates() {
  std::vector<PropertyChoices> out;
  for (Property p : kAllProperties) {
    PropertyChoices pc{p, {}};
    for (const auto& fn : kFunctionNames) {
      if (!function_applies(p, fn.kind)) continue;
      if (fn.kind == FunctionKind::ExpDecay) {
        if (fn.id != "exp_decay") continue;
        for (double l : {kDecaySmall, kDecayMedium, kDecayLarge}) pc.functions.push_back(SimilarityFunction::decay(l));
      } else if (std::find(pc.functions.begin(), pc.functions.end(), SimilarityFunction::of(fn.kind)) ==
                 pc.functions.end()) {
        pc.functions.push_back(SimilarityFunction::of(fn.kind));
      }
    }
    out.push_back(std::move(pc));
  }
  return out;
}

struct SearchSpace {
  WeightGrid grid;
  std::vector<PropertyChoices> properties = standard_candidates();
  Metric objective = Metric::M4;
  Algorithm algorithm = Algorithm::Similo;
  std::shared_ptr<const Benchmark> benchmark;
  VonConfig von;  // overlap settings of the optimized config (not searched)
  std::optional<double> match_threshold;
  // Hybrid only: the fixed VON stage; the optimized config is stage 2.
  AlgorithmConfig stage1 = presets::von_similo_llm_m3();
  std::size_t k = kDefaultPreselectGroups;
  MetricOptions metric_options;
  // When set, replaces benchmark evaluation as the objective.
  std::function<double(const AlgorithmConfig&)> custom_objective;

  void validate() const {
    if (properties.empty()) throw ConfigError("search space has no properties");
    std::set<Property> seen;
    for (const auto& pc : properties) {
      if (!seen.insert(pc.property).second)
        throw ConfigError("property '" + std::string(property_id(pc.property)) + "' listed twice");
      if (pc.functions.empty())
        throw ConfigError("property '" + std::string(property_id(pc.property)) + "' has no candidate function");
      for (const auto& f : pc.functions) {
        if (!function_applies(pc.property, f.kind))
          throw ConfigError("function '" + function_id(f) + "' does not apply to '" +
                            std::string(property_id(pc.property)) + "'");
        f.validate();
      }
    }
    if (grid.size() > 0xFFFF) throw ConfigError("weight grid too large");
    if (!custom_objective && (!benchmark || benchmark->cases.empty()))
      throw ConfigError("search space needs a non-empty benchmark or a custom objective");
    von.validate();
    if (algorithm == Algorithm::Hybrid) {
      if (k < 1) throw ConfigError("hybrid k must be >= 1");
      stage1.validate(false);
    }
    metric_options.fitness.validate();
  }
};

// One function index and one grid index per search-space property.
struct Genome {
  std::vector<std::uint16_t> functions;
  std::vector<std::uint16_t> weights;

  auto operator<=>(const Genome&) const = default;
  bool operator==(const Genome&) const = default;
};

inline Localizer make_localizer(const SearchSpace& space, const AlgorithmConfig& cfg) {
  switch (space.algorithm) {
    case Algorithm::Similo: return Localizer::similo(cfg);
    case Algorithm::Von: return Localizer::von(cfg);
    case Algorithm::Hybrid: return Localizer::hybrid(space.stage1, cfg, space.k);
  }
  throw Error("unreachable");
}

// Objective measured by running the full evaluation on `bench`.
inline double objective_value(const SearchSpace& space, const Benchmark& bench, const AlgorithmConfig& cfg) {
  const MetricReport r = evaluate(bench, make_localizer(space, cfg), space.metric_options);
  return r.per_metric.at(space.objective).value.value_or(0.0);
}

// Per-case similarity columns for every (property, candidate function),
// computed once. A configuration's scores are then weighted sums over the
// selected columns, and outcomes follow without touching any element.
class FeatureBank {
 public:
  explicit FeatureBank(const SearchSpace& space) : algorithm_(space.algorithm) {
    for (const auto& pc : space.properties) {
      offsets_.push_back(columns_);
      columns_ += pc.functions.size();
    }
    const Benchmark& bench = *space.benchmark;
    cases_.reserve(bench.cases.size());
    for (std::size_t i = 0; i < bench.cases.size(); ++i) cases_.push_back(build(space, bench.cases[i], i));
    threshold_ = Localizer{space.algorithm, AlgorithmConfig{"", {}, true, space.von, space.match_threshold}, {}, 0}
                     .match_threshold();
    fitness_ = space.metric_options.fitness;
  }

  std::size_t column(std::size_t property_index, std::size_t function_index) const {
    return offsets_[property_index] + function_index;
  }

  // Outcomes of the configuration given by `genome` over `grid`; ids are
  // filled only on request.
  std::vector<CaseOutcome> outcomes(const Genome& genome, const WeightGrid& grid, bool with_ids = false) const {
    const std::size_t props = genome.weights.size();
    std::vector<std::size_t> cols(props);
    std::vector<double> w(props);
    double total = 0.0;
    for (std::size_t p = 0; p < props; ++p) {
      cols[p] = column(p, genome.functions[p]);
      w[p] = grid[genome.weights[p]];
      total += w[p];
    }
    std::vector<CaseOutcome> out(cases_.size());
    std::vector<long long> keys;
    std::vector<double> norm;
    for (std::size_t ci = 0; ci < cases_.size(); ++ci) {
      const CaseData& d = cases_[ci];
      keys.assign(d.n, 0);
      norm.assign(d.n, 0.0);
      auto score_of = [&](std::size_t i) {
        const double* row = d.sims.data() + i * columns_;
        double s = 0.0;
        for (std::size_t p = 0; p < props; ++p) s += row[cols[p]] * w[p];
        norm[i] = normalized(s, total);
        keys[i] = score_key(norm[i]);
      };
      auto before = [&](std::size_t a, std::size_t b) {
        return keys[a] != keys[b] ? keys[a] > keys[b] : d.tie_rank[a] < d.tie_rank[b];
      };

      std::size_t chosen = 0, rank = 0;
      if (algorithm_ == Algorithm::Hybrid) {
        for (std::size_t i : d.stage2) score_of(i);
        chosen = d.stage2.front();
        for (std::size_t i : d.stage2)
          if (before(i, chosen)) chosen = i;
        if (d.tail_rank[d.truth] == 0) {
          rank = 1;
          for (std::size_t i : d.stage2)
            if (before(i, d.truth)) ++rank;
        } else {
          rank = d.stage2.size() + d.tail_rank[d.truth];
        }
      } else {
        for (std::size_t i = 0; i < d.n; ++i) score_of(i);
        for (std::size_t i = 1; i < d.n; ++i)
          if (before(i, chosen)) chosen = i;
        rank = 1;
        for (std::size_t i = 0; i < d.n; ++i)
          if (before(i, d.truth)) ++rank;
      }

      CaseOutcome& o = out[ci];
      o.truth_rank = rank;
      o.locator_changed = d.locator_changed;
      o.m4 = chosen == d.truth;
      o.m1 = d.m1[chosen];
      o.m7 = d.m7[chosen];
      o.m3 = d.m3[chosen];
      o.m8 = rank >= 1 && rank <= kTopTen;
      if (algorithm_ != Algorithm::Hybrid) {
        o.m2_positive = exceeds_threshold(norm[d.truth], threshold_);
        if (d.negative) o.m2_negative = !exceeds_threshold(norm[*d.negative], threshold_);
      }
      o.fitness_attainable = d.attainable;
      if (o.m4)
        o.fitness_earned = d.attainable;
      else if (o.m3)
        o.fitness_earned = fitness_.partial_credit_factor * d.attainable;
      if (with_ids) {
        const PageSnapshot& page = *d.source->new_page;
        o.case_id = d.source->case_id;
        o.chosen_id = page.elements[chosen].element_id;
        if (d.negative) o.negative_id = page.elements[*d.negative].element_id;
      }
    }
    return out;
  }

  std::size_t columns() const { return columns_; }

 private:
  struct CaseData {
    const BenchmarkCase* source = nullptr;
    std::size_t n = 0;
    std::vector<double> sims;  // n rows of columns_
    std::vector<std::uint32_t> tie_rank;
    std::vector<std::uint8_t> m1, m3, m7;  // flags of each candidate as the chosen one
    std::size_t truth = 0;
    std::optional<std::size_t> negative;
    std::vector<std::size_t> stage2;      // hybrid pre-selection
    std::vector<std::size_t> tail_rank;   // hybrid: 1-based stage-1 rank among the rest, 0 if pre-selected
    bool locator_changed = false;
    double attainable = 0.0;
  };

  CaseData build(const SearchSpace& space, const BenchmarkCase& c, std::size_t case_index) const {
    const PageSnapshot& page = *c.new_page;
    CaseData d;
    d.source = &c;
    d.n = page.elements.size();
    if (d.n == 0) throw IntegrityError("case " + c.case_id + ": new page has no elements");
    const auto truth = page.index_of(c.ground_truth_id);
    if (!truth) throw IntegrityError("case " + c.case_id + ": ground truth not on new page");
    d.truth = *truth;
    d.locator_changed = c.locator_class == LocatorClass::NoLocatorsWork;
    d.attainable = space.metric_options.fitness.at(c.change_class, c.locator_class);

    std::vector<std::size_t> order(d.n);
    for (std::size_t i = 0; i < d.n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ea = page.elements[a];
      const auto& eb = page.elements[b];
      if (ea.absolute_xpath.size() != eb.absolute_xpath.size())
        return ea.absolute_xpath.size() < eb.absolute_xpath.size();
      if (ea.absolute_xpath != eb.absolute_xpath) return ea.absolute_xpath < eb.absolute_xpath;
      return ea.element_id < eb.element_id;
    });
    d.tie_rank.resize(d.n);
    for (std::size_t r = 0; r < d.n; ++r) d.tie_rank[order[r]] = static_cast<std::uint32_t>(r);

    const VonConfig flag_von = space.algorithm == Algorithm::Hybrid ? space.stage1.von : space.von;
    const VonConfig visual{flag_von.iou_threshold, false};
    const VonConfig visual_or_text{flag_von.iou_threshold, true};
    const std::string& truth_xpath = page.elements[d.truth].absolute_xpath;
    d.m1.resize(d.n);
    d.m3.resize(d.n);
    d.m7.resize(d.n);
    auto has_truth = [&](const std::vector<std::size_t>& members) {
      return std::find(members.begin(), members.end(), d.truth) != members.end();
    };
    for (std::size_t i = 0; i < d.n; ++i) {
      d.m1[i] = m1_similo_match(page.elements[i].absolute_xpath, truth_xpath);
      d.m7[i] = has_truth(overlap_member_indices(i, page, visual));
      d.m3[i] = d.m7[i] || has_truth(overlap_member_indices(i, page, visual_or_text));
    }

    d.sims.assign(d.n * columns_, 0.0);
    if (space.algorithm == Algorithm::Von) {
      const OverlapGroup tg = overlap_group(c.target.element_id, *c.old_page, space.von);
      std::map<std::vector<std::size_t>, std::vector<double>> memo;
      for (std::size_t i = 0; i < d.n; ++i) {
        const auto members = overlap_member_indices(i, page, space.von);
        auto it = memo.find(members);
        if (it == memo.end()) {
          std::vector<double> row(columns_, 0.0);
          fill_columns(space, row.data(), [&](Property p, const SimilarityFunction& f) {
            double best = 0.0;
            for (const auto& t : tg.members)
              for (std::size_t m : members) best = std::max(best, property_similarity(p, f, t, page.elements[m]));
            return best;
          });
          it = memo.emplace(members, std::move(row)).first;
        }
        std::copy(it->second.begin(), it->second.end(), d.sims.begin() + static_cast<std::ptrdiff_t>(i * columns_));
      }
    } else {
      for (std::size_t i = 0; i < d.n; ++i)
        fill_columns(space, d.sims.data() + i * columns_, [&](Property p, const SimilarityFunction& f) {
          return property_similarity(p, f, c.target, page.elements[i]);
        });
    }

    if (space.algorithm == Algorithm::Hybrid) {
      const OverlapGroup tg = overlap_group(c.target.element_id, *c.old_page, space.stage1.von);
      const VonRanking stage1 = von_localize_detailed(tg, page, space.stage1);
      for (const auto& id : preselect(stage1, space.k)) d.stage2.push_back(*page.index_of(id));
      d.tail_rank.assign(d.n, 0);
      std::vector<std::uint8_t> selected(d.n, 0);
      for (std::size_t i : d.stage2) selected[i] = 1;
      std::size_t next = 1;
      for (const auto& rc : stage1.result.ranked) {
        const std::size_t i = *page.index_of(rc.element_id);
        if (!selected[i]) d.tail_rank[i] = next++;
      }
    } else {
      d.negative = sample_negative(c, space.metric_options.seed, case_index);
    }
    return d;
  }

  template <typename Fn>
  void fill_columns(const SearchSpace& space, double* row, Fn&& similarity) const {
    for (std::size_t p = 0; p < space.properties.size(); ++p) {
      const auto& pc = space.properties[p];
      for (std::size_t f = 0; f < pc.functions.size(); ++f) row[offsets_[p] + f] = similarity(pc.property, pc.functions[f]);
    }
  }

  Algorithm algorithm_;
  std::vector<std::size_t> offsets_;
  std::size_t columns_ = 0;
  std::vector<CaseData> cases_;
  double threshold_ = kSimiloMatchThreshold;
  FitnessTable fitness_;
};

// Memoized objective over genomes.
class Fitness {
 public:
  explicit Fitness(SearchSpace space) : space_(std::move(space)) {
    space_.validate();
    if (!space_.custom_objective) bank_.emplace(space_);
  }

  double operator()(const Genome& g) {
    if (auto it = cache_.find(g); it != cache_.end()) return it->second;
    double v = 0.0;
    if (space_.custom_objective) {
      v = space_.custom_objective(config_of(g));
    } else {
      const auto report = aggregate(bank_->outcomes(g, space_.grid));
      v = report.at(space_.objective).value.value_or(0.0);
    }
    cache_.emplace(g, v);
    return v;
  }

  AlgorithmConfig config_of(const Genome& g, std::string name = "optimized") const {
    AlgorithmConfig cfg;
    cfg.name = std::move(name);
    cfg.von = space_.von;
    cfg.match_threshold = space_.match_threshold;
    for (std::size_t p = 0; p < space_.properties.size(); ++p)
      cfg.entries.push_back(
          {space_.properties[p].property, space_.properties[p].functions[g.functions[p]], space_.grid[g.weights[p]]});
    return cfg;
  }

  // Functions outside the candidate list fall back to the first candidate;
  // properties missing from `cfg` get weight 0.
  Genome genome_of(const AlgorithmConfig& cfg) const {
    Genome g;
    for (const auto& pc : space_.properties) {
      std::uint16_t f = 0;
      double w = 0.0;
      if (const ConfigEntry* e = cfg.find(pc.property)) {
        const auto it = std::find(pc.functions.begin(), pc.functions.end(), e->function);
        if (it != pc.functions.end()) f = static_cast<std::uint16_t>(it - pc.functions.begin());
        w = e->weight;
      }
      g.functions.push_back(f);
      g.weights.push_back(static_cast<std::uint16_t>(space_.grid.nearest(w)));
    }
    return g;
  }

  std::vector<CaseOutcome> outcomes(const Genome& g, bool with_ids = true) const {
    if (!bank_) throw ConfigError("custom objectives have no per-case outcomes");
    return bank_->outcomes(g, space_.grid, with_ids);
  }

  const SearchSpace& space() const { return space_; }
  std::size_t evaluations() const { return cache_.size(); }

 private:
  SearchSpace space_;
  std::optional<FeatureBank> bank_;
  std::map<Genome, double> cache_;
};

// ---------------------------------------------------------------------------
// Parameters and results

struct GaParams {
  std::size_t population = 50;
  std::size_t generations = 200;
  double mutation_rate = 0.1;  // per gene
  std::size_t tournament_size = 3;
  std::size_t stagnation_window = 30;
  std::size_t elite = 1;

  void validate() const {
    if (population < 2) throw ConfigError("GA population must be >= 2");
    if (tournament_size < 1) throw ConfigError("tournament size must be >= 1");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigError("mutation rate must lie in [0, 1]");
    if (elite < 1 || elite >= population) throw ConfigError("elite count must lie in [1, population)");
    if (stagnation_window < 1) throw ConfigError("stagnation window must be >= 1");
  }
};

struct SelectionParams {
  std::size_t rounds = 2;
  double tie_epsilon = 0.002;
  std::size_t max_enumeration = 16;
  std::size_t line_search_probes = 16;  // weight levels tried per function
  std::size_t refine_sweeps = 3;
  std::size_t refine_top = 2;  // screened functions judged with refined weights
  std::size_t exhaustive_weight_limit = 4096;
};

struct OptimizerOptions {
  std::uint64_t seed = 0;
  GaParams ga;
  SelectionParams selection;
  std::size_t phases = 2;  // function-selection + weight-search cycles
  std::string name = "optimized";
};

struct TracePoint {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  bool operator==(const TracePoint&) const = default;
};

struct OptimizationRun {
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  GaParams ga;
  AlgorithmConfig best_config;
  double best_fitness = 0.0;
  std::vector<TracePoint> fitness_trace;
  std::optional<double> holdout_score;
  std::size_t evaluations = 0;
};

inline std::string trace_to_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream out;
  out << "generation,best_fitness\n";
  out << std::setprecision(10);
  for (const auto& t : trace) out << t.generation << "," << t.best_fitness << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Search steps

namespace detail {

// Grid indices tried when scoring a function: the whole grid when small,
// otherwise an even subsample plus both ends and the current value.
inline std::vector<std::uint16_t> line_search_levels(std::size_t levels, std::uint16_t current,
                                                     std::size_t max_probes) {
  std::vector<std::uint16_t> out{current};
  const std::size_t stride = levels <= max_probes ? 1 : (levels + max_probes - 1) / max_probes;
  for (std::size_t i = 0; i < levels; i += stride) out.push_back(static_cast<std::uint16_t>(i));
  out.push_back(static_cast<std::uint16_t>(levels - 1));
  std::sort(out.begin() + 1, out.end());
  out.erase(std::unique(out.begin() + 1, out.end()), out.end());
  out.erase(std::remove(out.begin() + 1, out.end(), current), out.end());
  return out;
}

// Best weights for fixed functions: exhaustive when the weight space is
// small, otherwise coordinate ascent one property at a time until a sweep
// brings no improvement.
inline Genome refine_weights(Fitness& fit, Genome g, const SelectionParams& params) {
  const std::size_t levels = fit.space().grid.size();
  double current = fit(g);
  std::size_t space_size = 1;
  for (std::size_t i = 0; i < g.weights.size() && space_size <= params.exhaustive_weight_limit; ++i)
    space_size *= levels;
  if (space_size <= params.exhaustive_weight_limit) {
    Genome t = g;
    std::fill(t.weights.begin(), t.weights.end(), 0);
    while (true) {
      const double v = fit(t);
      if (v > current) {
        current = v;
        g = t;
      }
      std::size_t i = 0;
      while (i < t.weights.size() && ++t.weights[i] == levels) t.weights[i++] = 0;
      if (i == t.weights.size()) break;
    }
    return g;
  }
  for (std::size_t sweep = 0; sweep < params.refine_sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t p = 0; p < g.weights.size(); ++p) {
      for (std::uint16_t w : line_search_levels(levels, g.weights[p], params.line_search_probes)) {
        Genome t = g;
        t.weights[p] = w;
        const double v = fit(t);
        if (v > current) {
          current = v;
          g = std::move(t);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return g;
}

// Coordinate-wise function choice. Every candidate function of a property
// is screened at its best weight on a line search over that property's
// weight, everything else held fixed; the strongest few are then judged
// after refining all weights. Near-ties are finally enumerated jointly.
// A function space within the enumeration budget is searched exhaustively.
inline Genome select_functions(Fitness& fit, Genome g, const SelectionParams& params, SeededRng& rng) {
  const auto& props = fit.space().properties;
  const WeightGrid& grid = fit.space().grid;
  double current = fit(g);

  // Small function spaces are enumerated outright.
  std::size_t combinations = 1;
  for (std::size_t p = 0; p < props.size() && combinations <= params.max_enumeration; ++p)
    combinations *= props[p].functions.size();
  if (combinations <= params.max_enumeration) {
    Genome best = refine_weights(fit, g, params);
    double best_value = fit(best);
    Genome t = g;
    std::fill(t.functions.begin(), t.functions.end(), 0);
    while (true) {
      Genome r = refine_weights(fit, t, params);
      const double v = fit(r);
      if (v > best_value) {
        best_value = v;
        best = std::move(r);
      }
      std::size_t i = 0;
      while (i < t.functions.size() && ++t.functions[i] == props[i].functions.size()) t.functions[i++] = 0;
      if (i == t.functions.size()) break;
    }
    return best;
  }
  struct Choice {
    std::uint16_t function;
    std::uint16_t weight;
    double value;
  };
  // Near-tied functions per property from its latest visit, best first.
  std::vector<std::vector<std::uint16_t>> ties(props.size());
  for (std::size_t round = 0; round < params.rounds; ++round) {
    std::vector<std::size_t> order(props.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t p : order) {
      ties[p].clear();
      std::vector<Choice> screened;
      for (std::uint16_t f = 0; f < props[p].functions.size(); ++f) {
        Choice best{f, g.weights[p], -1.0};
        for (std::uint16_t w : line_search_levels(grid.size(), g.weights[p], params.line_search_probes)) {
          Genome t = g;
          t.functions[p] = f;
          t.weights[p] = w;
          const double v = fit(t);
          if (v > best.value) best = {f, w, v};
        }
        screened.push_back(best);
      }
      std::stable_sort(screened.begin(), screened.end(),
                       [](const Choice& a, const Choice& b) { return a.value > b.value; });
      screened.resize(std::min(screened.size(), std::max<std::size_t>(params.refine_top, 1)));

      std::vector<std::pair<Genome, double>> refined;
      for (const Choice& c : screened) {
        Genome t = g;
        t.functions[p] = c.function;
        t.weights[p] = c.weight;
        t = refine_weights(fit, std::move(t), params);
        const double v = fit(t);
        refined.emplace_back(std::move(t), v);
      }
      std::size_t best = 0;
      for (std::size_t i = 1; i < refined.size(); ++i)
        if (refined[i].second > refined[best].second) best = i;
      if (refined[best].second > current) {
        g = refined[best].first;
        current = refined[best].second;
      }
      // Zero-weight choices are interchangeable; one stands for all.
      bool zero_seen = false;
      for (const auto& [t, v] : refined) {
        if (v < current - params.tie_epsilon) continue;
        if (grid[t.weights[p]] == 0.0) {
          if (zero_seen) continue;
          zero_seen = true;
        }
        if (std::find(ties[p].begin(), ties[p].end(), t.functions[p]) == ties[p].end())
          ties[p].push_back(t.functions[p]);
      }
    }
  }

  std::vector<std::size_t> tied;
  for (std::size_t p = 0; p < props.size(); ++p)
    if (ties[p].size() > 1) tied.push_back(p);
  if (tied.empty()) return g;
  const std::size_t cap = std::max<std::size_t>(params.max_enumeration, 1);
  auto product = [&] {
    std::size_t n = 1;
    for (std::size_t p : tied) n = n > cap ? n : n * ties[p].size();
    return n;
  };
  // Trim the weakest members of the widest sets until enumeration fits.
  while (product() > cap) {
    std::size_t widest = tied.front();
    for (std::size_t p : tied)
      if (ties[p].size() > ties[widest].size()) widest = p;
    ties[widest].pop_back();
  }

  Genome best = g;
  double best_value = current;
  std::vector<std::size_t> digit(tied.size(), 0);
  while (true) {
    Genome t = g;
    for (std::size_t i = 0; i < tied.size(); ++i) t.functions[tied[i]] = ties[tied[i]][digit[i]];
    t = refine_weights(fit, std::move(t), params);
    const double v = fit(t);
    if (v > best_value) {
      best_value = v;
      best = t;
    }
    std::size_t i = 0;
    while (i < tied.size() && ++digit[i] == ties[tied[i]].size()) digit[i++] = 0;
    if (i == tied.size()) break;
  }
  return best;
}

inline Genome run_ga(Fitness& fit, const Genome& start, const GaParams& params, SeededRng& rng,
                     std::vector<TracePoint>& trace) {
  params.validate();
  const WeightGrid& grid = fit.space().grid;
  const std::size_t genes = start.weights.size();
  const std::size_t levels = grid.size();

  std::vector<Genome> population{start};
  auto seeded = [&](const AlgorithmConfig& cfg) {
    Genome g = start;
    g.weights = fit.genome_of(cfg).weights;
    return g;
  };
  population.push_back(seeded(presets::similo_2023()));
  AlgorithmConfig uniform = fit.config_of(start);
  for (auto& e : uniform.entries) e.weight = 1.0;
  population.push_back(seeded(uniform));
  while (population.size() < params.population) {
    Genome g = start;
    for (auto& w : g.weights) w = static_cast<std::uint16_t>(rng.index(levels));
    population.push_back(std::move(g));
  }
  population.resize(params.population);

  std::vector<double> fitness(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = fit(population[i]);
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < population.size(); ++i)
    if (fitness[i] > fitness[best_i]) best_i = i;
  Genome best = population[best_i];
  double best_value = fitness[best_i];
  const std::size_t base_generation = trace.empty() ? 0 : trace.back().generation + 1;
  trace.push_back({base_generation, best_value});

  auto tournament = [&]() -> const Genome& {
    std::size_t winner = rng.index(population.size());
    for (std::size_t t = 1; t < params.tournament_size; ++t) {
      const std::size_t c = rng.index(population.size());
      if (fitness[c] > fitness[winner]) winner = c;
    }
    return population[winner];
  };

  std::size_t stagnant = 0;
  for (std::size_t gen = 1; gen <= params.generations; ++gen) {
    std::vector<std::size_t> order(population.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
    std::vector<Genome> next;
    for (std::size_t e = 0; e < params.elite; ++e) next.push_back(population[order[e]]);
    while (next.size() < params.population) {
      const Genome& a = tournament();
      const Genome& b = tournament();
      Genome child = start;
      for (std::size_t i = 0; i < genes; ++i) {
        child.weights[i] = rng.chance(0.5) ? a.weights[i] : b.weights[i];
        if (levels > 1 && rng.chance(params.mutation_rate)) {
          const bool up = child.weights[i] == 0 || (child.weights[i] + 1u < levels && rng.chance(0.5));
          child.weights[i] = static_cast<std::uint16_t>(up ? child.weights[i] + 1 : child.weights[i] - 1);
        }
      }
      next.push_back(std::move(child));
    }
    population = std::move(next);
    bool improved = false;
    for (std::size_t i = 0; i < population.size(); ++i) {
      fitness[i] = fit(population[i]);
      if (fitness[i] > best_value) {
        best_value = fitness[i];
        best = population[i];
        improved = true;
      }
    }
    trace.push_back({base_generation + gen, best_value});
    stagnant = improved ? 0 : stagnant + 1;
    if (stagnant >= params.stagnation_window) break;
  }

  // Zero every weight whose removal does not lower the objective.
  const auto zero = static_cast<std::uint16_t>(grid.nearest(0.0));
  for (std::size_t i = 0; i < genes; ++i) {
    if (best.weights[i] == zero) continue;
    Genome t = best;
    t.weights[i] = zero;
    const double v = fit(t);
    if (v >= best_value) {
      if (v > best_value) trace.push_back({trace.back().generation + 1, v});
      best = std::move(t);
      best_value = v;
    }
  }
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry points

inline AlgorithmConfig select_similarity_functions(const SearchSpace& space, const AlgorithmConfig& base_config,
                                                   const SelectionParams& params = {}, std::uint64_t seed = 0) {
  Fitness fit(space);
  SeededRng rng(seed);
  const Genome g = detail::select_functions(fit, fit.genome_of(base_config), params, rng);
  return fit.config_of(g, base_config.name);
}

inline OptimizationRun optimize_weights(const SearchSpace& space, const AlgorithmConfig& config_with_functions,
                                        const GaParams& params = {}, std::uint64_t seed = 0) {
  Fitness fit(space);
  SeededRng rng(seed);
  OptimizationRun run;
  run.seed = seed;
  run.ga = params;
  const Genome best = detail::run_ga(fit, fit.genome_of(config_with_functions), params, rng, run.fitness_trace);
  run.best_config = fit.config_of(best, config_with_functions.name.empty() ? "optimized" : config_with_functions.name);
  run.best_fitness = fit(best);
  run.evaluations = fit.evaluations();
  return run;
}

// Alternates function selection and weight search, starting from `base`.
// Stops early once a full cycle brings no improvement.
inline OptimizationRun optimize(const SearchSpace& space, const AlgorithmConfig& base, const OptimizerOptions& opts = {}) {
  opts.ga.validate();
  Fitness fit(space);
  SeededRng rng(opts.seed);
  OptimizationRun run;
  run.seed = opts.seed;
  run.rounds = opts.selection.rounds;
  run.ga = opts.ga;
  Genome g = fit.genome_of(base);
  double value = fit(g);
  for (std::size_t phase = 0; phase < std::max<std::size_t>(opts.phases, 1); ++phase) {
    const double before = value;
    g = detail::select_functions(fit, g, opts.selection, rng);
    value = fit(g);
    run.fitness_trace.push_back(
        {run.fitness_trace.empty() ? 0 : run.fitness_trace.back().generation + 1, value});
    g = detail::run_ga(fit, g, opts.ga, rng, run.fitness_trace);
    value = fit(g);
    if (phase > 0 && !(value > before)) break;
  }
  run.best_config = fit.config_of(g, opts.name);
  run.best_fitness = value;
  run.evaluations = fit.evaluations();
  return run;
}

// ---------------------------------------------------------------------------
// Site-level cross-validation

inline std::string case_site(const BenchmarkCase& c) { return c.old_page->site; }

inline std::vector<std::string> benchmark_sites(const Benchmark& bench) {
  std::set<std::string> sites;
  for (const auto& c : bench.cases) sites.insert(case_site(c));
  return {sites.begin(), sites.end()};
}

inline Benchmark benchmark_subset(const Benchmark& bench, const std::set<std::string>& sites) {
  Benchmark out;
  out.name = bench.name;
  for (const auto& c : bench.cases)
    if (sites.count(case_site(c))) out.cases.push_back(c);
  return out;
}

// Whole sites are assigned to folds after a seeded shuffle.
inline std::vector<std::set<std::string>> site_folds(const Benchmark& bench, std::size_t k, std::uint64_t seed) {
  std::vector<std::string> sites = benchmark_sites(bench);
  if (k < 2 || k > sites.size())
    throw UsageError("folds must lie in [2, " + std::to_string(sites.size()) + "] for this benchmark");
  SeededRng rng(seed);
  rng.shuffle(sites);
  std::vector<std::set<std::string>> folds(k);
  for (std::size_t i = 0; i < sites.size(); ++i) folds[i % k].insert(sites[i]);
  return folds;
}

struct FoldResult {
  std::set<std::string> holdout_sites;
  OptimizationRun run;
  double train_score = 0.0;
  double holdout_score = 0.0;
  double base_holdout_score = 0.0;  // the starting config on the same fold
};

struct CrossValidation {
  std::vector<FoldResult> folds;
  double mean_holdout = 0.0;
  double stddev_holdout = 0.0;
};

inline CrossValidation cross_validate(const SearchSpace& space, const AlgorithmConfig& base, std::size_t k,
                                      const OptimizerOptions& opts = {}) {
  if (!space.benchmark) throw ConfigError("cross-validation needs a benchmark");
  const Benchmark& bench = *space.benchmark;
  CrossValidation cv;
  const auto folds = site_folds(bench, k, opts.seed);
  for (const auto& holdout_sites : folds) {
    std::set<std::string> train_sites;
    for (const auto& s : benchmark_sites(bench))
      if (!holdout_sites.count(s)) train_sites.insert(s);
    SearchSpace train = space;
    train.benchmark = std::make_shared<const Benchmark>(benchmark_subset(bench, train_sites));
    const Benchmark holdout = benchmark_subset(bench, holdout_sites);

    FoldResult fold;
    fold.holdout_sites = holdout_sites;
    fold.run = optimize(train, base, opts);
    fold.train_score = fold.run.best_fitness;
    fold.holdout_score = objective_value(space, holdout, fold.run.best_config);
    fold.base_holdout_score = objective_value(space, holdout, base);
    fold.run.holdout_score = fold.holdout_score;
    cv.folds.push_back(std::move(fold));
  }
  double sum = 0.0;
  for (const auto& f : cv.folds) sum += f.holdout_score;
  cv.mean_holdout = sum / static_cast<double>(cv.folds.size());
  double var = 0.0;
  for (const auto& f : cv.folds) var += (f.holdout_score - cv.mean_holdout) * (f.holdout_score - cv.mean_holdout);
  cv.stddev_holdout = std::sqrt(var / static_cast<double>(cv.folds.size()));
  return cv;
}

}  // namespace relocator
