#include <doctest.h>

#include <map>

#include "fairaudit/crosstab.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/scenario.hpp"

using namespace fairaudit;

namespace {

const ScenarioSpec& tb() { return builtin_scenarios().at("tb_visa_au"); }
const ScenarioSpec& lung() { return builtin_scenarios().at("lung_ca_sg"); }

const ExpectedOutcome& outcome_for(const std::vector<ExpectedOutcome>& outcomes,
                                   const std::string& group) {
  for (const ExpectedOutcome& o : outcomes) {
    if (o.group == group) return o;
  }
  REQUIRE(false);
  return outcomes.front();
}

}  // namespace

TEST_CASE("effective rates apply the skew ratios exactly") {
  const ScenarioSpec& scenario = lung();
  const GroupSpec* malay = nullptr;
  for (const GroupSpec& g : scenario.groups) {
    if (g.name == "Malay") malay = &g;
  }
  REQUIRE(malay != nullptr);

  const EffectiveRates rates = effective_rates(scenario, *malay);
  CHECK(rates.sensitivity == Rational(6125, 10000));  // 0.98 / 1.6
  CHECK(rates.sensitivity.to_double() == 0.6125);
  CHECK(rates.fpr == Rational(0));

  // FPR multiplier: base FPR 4% scaled by 1.5 is 6%.
  const ScenarioSpec& visa = tb();
  const GroupSpec* india = nullptr;
  for (const GroupSpec& g : visa.groups) {
    if (g.name == "India") india = &g;
  }
  REQUIRE(india != nullptr);
  const EffectiveRates india_rates = effective_rates(visa, *india);
  CHECK(india_rates.fpr == Rational(6, 100));
  CHECK(india_rates.sensitivity == Rational(97, 100));

  // Identity ratios leave the base rates untouched.
  const GroupSpec& china = visa.groups.front();
  const EffectiveRates china_rates = effective_rates(visa, china);
  CHECK(china_rates.sensitivity == visa.base_sensitivity);
  CHECK(china_rates.fpr == Rational(1) - visa.base_specificity);
}

TEST_CASE("effective rates reject out-of-range adjustments") {
  ScenarioSpec scenario = lung();
  scenario.groups[0].fpr_ratio = Rational(200);
  scenario.base_specificity = Rational(96, 100);
  CHECK_THROWS_WITH_AS(effective_rates(scenario, scenario.groups[0]),
                       doctest::Contains("effective FPR"), Error);
}

TEST_CASE("expected outcomes for the visa screening scenario") {
  const auto outcomes = expected_outcomes(tb());
  REQUIRE(outcomes.size() == 5);

  const ExpectedOutcome& china = outcome_for(outcomes, "China");
  CHECK(china.cases == Rational(130));
  CHECK(china.tp == Rational(1261, 10));  // 126.1
  CHECK(china.fn == Rational(39, 10));
  CHECK(china.fp == Rational(51948, 10));  // 5194.8
  CHECK(china.cases_rounded == 130);
  CHECK(china.tp_rounded == 126);
  CHECK(china.fn_rounded == 4);
  CHECK(china.fp_rounded == 5195);
  CHECK(china.tn_rounded == 130000 - 130 - 5195);

  const ExpectedOutcome& india = outcome_for(outcomes, "India");
  CHECK(india.cases == Rational(220));
  CHECK(india.tp_rounded == 213);
  CHECK(india.fn_rounded == 7);
  CHECK(india.fp == Rational(65868, 10));  // 6586.8 = 109,780 * 0.06
  CHECK(india.fp_rounded == 6587);

  const ExpectedOutcome& uk = outcome_for(outcomes, "UK");
  CHECK(uk.fp == Rational(239976, 100));  // 2399.76
  CHECK(uk.fp_rounded == 2400);

  const ExpectedOutcome& us = outcome_for(outcomes, "US");
  CHECK(us.cases == Rational(9, 2));  // 4.5 expected cases
  CHECK(us.fp_rounded == 2000);
}

TEST_CASE("expected outcomes for the lung screening scenario") {
  const auto outcomes = expected_outcomes(lung());
  REQUIRE(outcomes.size() == 3);

  const ExpectedOutcome& chinese = outcome_for(outcomes, "Chinese");
  CHECK(chinese.cases == Rational(1518));
  CHECK(chinese.tp == Rational(148764, 100));  // 1487.64
  CHECK(chinese.fn == Rational(3036, 100));    // 30.36
  // Round half away from zero lands on 1488/30; the derived FN keeps the
  // rounded flow balanced at 1518.
  CHECK(chinese.tp_rounded == 1488);
  CHECK(chinese.fn_rounded == 30);
  CHECK(chinese.tp_rounded + chinese.fn_rounded == chinese.cases_rounded);

  const ExpectedOutcome& malay = outcome_for(outcomes, "Malay");
  CHECK(malay.cases == Rational(300));
  CHECK(malay.tp == Rational(18375, 100));  // 183.75
  CHECK(malay.fn == Rational(11625, 100));  // 116.25
  CHECK(malay.tp_rounded == 184);
  CHECK(malay.fn_rounded == 116);
  CHECK(malay.fp == Rational(0));

  // All three groups share the 2% prevalence: 2,000 cases over 100,000.
  Rational total_cases(0);
  for (const ExpectedOutcome& o : outcomes) total_cases = total_cases + o.cases;
  CHECK(total_cases == Rational(2000));
}

TEST_CASE("expected outcomes conserve populations exactly") {
  for (const auto& [name, scenario] : builtin_scenarios()) {
    for (const ExpectedOutcome& o : expected_outcomes(scenario)) {
      CHECK(o.tp + o.fn + o.fp + o.tn == Rational(o.population));
      CHECK(o.tp + o.fn == o.cases);
      const std::int64_t rounded_total =
          o.tp_rounded + o.fn_rounded + o.fp_rounded + o.tn_rounded;
      CHECK(rounded_total == o.population);
    }
  }
}

TEST_CASE("expected outcomes recover the planted ratios") {
  // FNR ratio: (1 - sens/r) / (1 - sens) for r = 1.6, sens = 0.98.
  const auto outcomes = expected_outcomes(lung());
  const ExpectedOutcome& chinese = outcome_for(outcomes, "Chinese");
  const ExpectedOutcome& malay = outcome_for(outcomes, "Malay");
  const Rational fnr_chinese = chinese.fn / chinese.cases;
  const Rational fnr_malay = malay.fn / malay.cases;
  CHECK(fnr_malay / fnr_chinese == Rational(19375, 1000));

  const auto visa = expected_outcomes(tb());
  const ExpectedOutcome& china = outcome_for(visa, "China");
  const ExpectedOutcome& india = outcome_for(visa, "India");
  const Rational fpr_china = china.fp / (Rational(china.population) - china.cases);
  const Rational fpr_india = india.fp / (Rational(india.population) - india.cases);
  CHECK(fpr_india / fpr_china == Rational(3, 2));
}

TEST_CASE("disease-free population yields only false positives") {
  ScenarioSpec scenario;
  scenario.name = "clean";
  scenario.attribute_name = "site";
  scenario.base_sensitivity = Rational(97, 100);
  scenario.base_specificity = Rational(96, 100);
  scenario.groups = {{"all", 1000, Rational(0), 1, 1}};
  const auto outcomes = expected_outcomes(scenario);
  CHECK(outcomes[0].cases == Rational(0));
  CHECK(outcomes[0].tp == Rational(0));
  CHECK(outcomes[0].fn == Rational(0));
  CHECK(outcomes[0].fp == Rational(1000) * Rational(4, 100));
}

TEST_CASE("builtin scenarios carry the documented parameters") {
  const auto& scenarios = builtin_scenarios();
  REQUIRE(scenarios.contains("tb_visa_au"));
  REQUIRE(scenarios.contains("lung_ca_sg"));

  std::int64_t visa_total = 0;
  for (const GroupSpec& g : tb().groups) visa_total += g.population;
  CHECK(visa_total == 390000);

  std::int64_t lung_total = 0;
  for (const GroupSpec& g : lung().groups) lung_total += g.population;
  CHECK(lung_total == 100000);
  CHECK(lung().groups[0].name == "Chinese");
  CHECK(Rational(lung().groups[0].population, lung_total) == Rational(759, 1000));

  CHECK_NOTHROW(validate_scenario(tb()));
  CHECK_NOTHROW(validate_scenario(lung()));
}

TEST_CASE("generate_cohort is a pure function of scenario and seed") {
  const ScenarioSpec& scenario = lung();
  const Dataset a = generate_cohort(scenario, 42);
  const Dataset b = generate_cohort(scenario, 42);
  CHECK(a == b);
  const Dataset c = generate_cohort(scenario, 43);
  CHECK(a.records.size() == c.records.size());
  CHECK(a != c);
}

TEST_CASE("generate_cohort realizes each group's population") {
  const Dataset cohort = generate_cohort(lung(), 5);
  REQUIRE(cohort.records.size() == 100000);
  std::map<std::string, int> sizes;
  for (const Record& r : cohort.records) sizes[r.attributes.at("ethnicity")] += 1;
  CHECK(sizes.at("Chinese") == 75900);
  CHECK(sizes.at("Malay") == 15000);
  CHECK(sizes.at("Other") == 9100);
}

TEST_CASE("degenerate certainty pins every record") {
  ScenarioSpec scenario;
  scenario.name = "certain";
  scenario.attribute_name = "site";
  scenario.base_sensitivity = Rational(1);
  scenario.base_specificity = Rational(1);
  scenario.groups = {{"all", 500, Rational(1), 1, 1}};
  const Dataset cohort = generate_cohort(scenario, 9);
  for (const Record& r : cohort.records) {
    CHECK(r.label == true);
    CHECK(r.prediction == true);
  }
}

TEST_CASE("sampled cohort rates converge to the effective rates") {
  const Dataset cohort = generate_cohort(lung(), 1);
  const auto groups = crosstab(cohort, "ethnicity");
  for (const GroupStats& g : groups) {
    if (g.group_value != "Malay") continue;
    REQUIRE(g.metrics.fnr.defined());
    // ~300 cases at FNR 0.3875: the binomial standard error is about 0.028.
    CHECK(g.metrics.fnr.value() == doctest::Approx(0.3875).epsilon(0.15));
  }
}

TEST_CASE("scenario validation rejects malformed specs") {
  ScenarioSpec scenario = lung();
  scenario.groups.clear();
  CHECK_THROWS_WITH_AS(validate_scenario(scenario), doctest::Contains("groups"), Error);

  scenario = lung();
  scenario.groups[1].fnr_ratio = Rational(1, 2);
  CHECK_THROWS_WITH_AS(validate_scenario(scenario), doctest::Contains("1.96"), Error);

  scenario = lung();
  scenario.groups[0].prevalence = Rational(3, 2);
  CHECK_THROWS_AS(validate_scenario(scenario), Error);

  scenario = lung();
  scenario.groups[1].name = scenario.groups[0].name;
  CHECK_THROWS_WITH_AS(validate_scenario(scenario), doctest::Contains("duplicate"), Error);

  scenario = lung();
  scenario.groups[0].population = 0;
  CHECK_THROWS_AS(validate_scenario(scenario), Error);
}
