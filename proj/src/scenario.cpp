#include "fairaudit/scenario.hpp"

#include <random>
#include <unordered_set>

#include "fairaudit/error.hpp"

namespace fairaudit {

namespace {

const Rational kZero(0);
const Rational kOne(1);

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the engine's top 53 bits. Distribution
/// algorithms in the standard library are implementation-defined; this keeps
/// cohorts byte-identical across toolchains.
double uniform_unit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

void validate_scenario(const ScenarioSpec& scenario) {
  if (scenario.name.empty()) throw Error("scenario: name is empty");
  if (scenario.attribute_name.empty()) throw Error("scenario: attribute_name is empty");
  if (scenario.groups.empty()) throw Error("scenario '" + scenario.name + "': groups list is empty");
  if (scenario.base_sensitivity < kZero || scenario.base_sensitivity > kOne) {
    throw Error("scenario '" + scenario.name + "': base_sensitivity " +
                scenario.base_sensitivity.to_string() + " outside [0,1]");
  }
  if (scenario.base_specificity < kZero || scenario.base_specificity > kOne) {
    throw Error("scenario '" + scenario.name + "': base_specificity " +
                scenario.base_specificity.to_string() + " outside [0,1]");
  }

  std::unordered_set<std::string> names;
  for (const GroupSpec& group : scenario.groups) {
    if (group.name.empty()) throw Error("scenario '" + scenario.name + "': group with empty name");
    if (!names.insert(group.name).second) {
      throw Error("scenario '" + scenario.name + "': duplicate group '" + group.name + "'");
    }
    if (group.population < 1) {
      throw Error("group '" + group.name + "': population must be >= 1");
    }
    if (group.prevalence < kZero || group.prevalence > kOne) {
      throw Error("group '" + group.name + "': prevalence " + group.prevalence.to_string() +
                  " outside [0,1]");
    }
    if (group.fnr_ratio < kOne) {
      const Rational eff = group.fnr_ratio > kZero
                               ? scenario.base_sensitivity / group.fnr_ratio
                               : Rational(0);
      throw Error("group '" + group.name + "': fnr_ratio " + group.fnr_ratio.to_string() +
                  " must be >= 1 (effective sensitivity would be " + eff.to_string() + ")");
    }
    if (group.fpr_ratio < kOne) {
      throw Error("group '" + group.name + "': fpr_ratio " + group.fpr_ratio.to_string() +
                  " must be >= 1");
    }
    effective_rates(scenario, group);  // bound check at load, not at run
  }
}

EffectiveRates effective_rates(const ScenarioSpec& scenario, const GroupSpec& group) {
  if (group.fnr_ratio <= kZero) {
    throw Error("group '" + group.name + "': fnr_ratio must be positive");
  }
  if (group.fpr_ratio <= kZero) {
    throw Error("group '" + group.name + "': fpr_ratio must be positive");
  }
  EffectiveRates rates;
  rates.sensitivity = scenario.base_sensitivity / group.fnr_ratio;
  rates.fpr = (kOne - scenario.base_specificity) * group.fpr_ratio;
  if (rates.sensitivity < kZero || rates.sensitivity > kOne) {
    throw Error("group '" + group.name + "': effective sensitivity " +
                rates.sensitivity.to_string() + " outside [0,1]");
  }
  if (rates.fpr < kZero || rates.fpr > kOne) {
    throw Error("group '" + group.name + "': effective FPR " + rates.fpr.to_string() +
                " outside [0,1]");
  }
  return rates;
}

std::vector<ExpectedOutcome> expected_outcomes(const ScenarioSpec& scenario) {
  std::vector<ExpectedOutcome> outcomes;
  outcomes.reserve(scenario.groups.size());
  for (const GroupSpec& group : scenario.groups) {
    ExpectedOutcome o;
    o.group = group.name;
    o.population = group.population;
    o.rates = effective_rates(scenario, group);

    const Rational population(group.population);
    o.cases = population * group.prevalence;
    o.tp = o.cases * o.rates.sensitivity;
    o.fn = o.cases - o.tp;
    o.fp = (population - o.cases) * o.rates.fpr;
    o.tn = population - o.cases - o.fp;

    o.cases_rounded = o.cases.round_half_away_from_zero();
    o.tp_rounded = o.tp.round_half_away_from_zero();
    o.fn_rounded = o.cases_rounded - o.tp_rounded;
    o.fp_rounded = o.fp.round_half_away_from_zero();
    o.tn_rounded = group.population - o.cases_rounded - o.fp_rounded;
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

Dataset generate_cohort(const ScenarioSpec& scenario, std::uint64_t seed) {
  validate_scenario(scenario);

  Dataset dataset;
  dataset.attribute_names = {scenario.attribute_name};
  std::size_t total = 0;
  for (const GroupSpec& group : scenario.groups) {
    total += static_cast<std::size_t>(group.population);
  }
  dataset.records.reserve(total);

  for (std::size_t gi = 0; gi < scenario.groups.size(); ++gi) {
    const GroupSpec& group = scenario.groups[gi];
    const EffectiveRates rates = effective_rates(scenario, group);
    const double prevalence = group.prevalence.to_double();
    const double sensitivity = rates.sensitivity.to_double();
    const double fpr = rates.fpr.to_double();

    // One stream per group so group generation order cannot perturb draws.
    std::mt19937_64 engine(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (gi + 1))));
    for (std::int64_t i = 0; i < group.population; ++i) {
      Record r;
      r.entity_id = group.name + "-" + std::to_string(i + 1);
      r.label = uniform_unit(engine) < prevalence;
      const double hit = uniform_unit(engine);
      const bool predicted = r.label ? hit < sensitivity : hit < fpr;
      r.prediction = predicted;
      r.score = predicted ? 1.0 : 0.0;
      r.attributes.emplace(scenario.attribute_name, group.name);
      dataset.records.push_back(std::move(r));
    }
  }
  return dataset;
}

const std::map<std::string, ScenarioSpec>& builtin_scenarios() {
  static const std::map<std::string, ScenarioSpec> scenarios = [] {
    std::map<std::string, ScenarioSpec> m;

    ScenarioSpec tb;
    tb.name = "tb_visa_au";
    tb.base_sensitivity = Rational(97, 100);
    tb.base_specificity = Rational(96, 100);
    tb.attribute_name = "nationality";
    tb.groups = {
        {"China", 130000, Rational(100, 100000), 1, 1},
        {"India", 110000, Rational(200, 100000), 1, Rational(3, 2)},
        {"UK", 60000, Rational(10, 100000), 1, 1},
        {"US", 50000, Rational(9, 100000), 1, 1},
        {"Vietnam", 40000, Rational(100, 100000), 1, 1},
    };
    tb.notes = {
        "A commonly quoted figure of 16,500 false positives for India is not derivable from "
        "the stated parameters: (110,000 - 220) x 0.04 x 1.5 = 6,586.8. This report shows the "
        "derived value.",
        "The five listed nationalities cover 390,000 of roughly half a million applicants; "
        "the remainder is excluded because no prevalence is stated for it.",
    };
    m.emplace(tb.name, std::move(tb));

    ScenarioSpec lung;
    lung.name = "lung_ca_sg";
    lung.base_sensitivity = Rational(98, 100);
    lung.base_specificity = 1;  // FPR plays no role in this scenario
    lung.attribute_name = "ethnicity";
    lung.groups = {
        {"Chinese", 75900, Rational(2, 100), 1, 1},
        {"Malay", 15000, Rational(2, 100), Rational(16, 10), 1},
        {"Other", 9100, Rational(2, 100), 1, 1},
    };
    lung.notes = {
        "The Other group (9,100 residents at the same 2% prevalence) closes the screened "
        "population at 100,000, so expected cases total 2,000.",
        "Commonly quoted displays of this scenario give 1,487 detected / 31 missed for the "
        "Chinese group; the exact expectation is 1,487.64 / 30.36, which rounds half away "
        "from zero to 1,488 / 30 as reported here.",
    };
    m.emplace(lung.name, std::move(lung));

    return m;
  }();
  return scenarios;
}

}  // namespace fairaudit
