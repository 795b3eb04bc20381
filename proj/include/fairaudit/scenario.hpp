#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/rational.hpp"

namespace fairaudit {

/// One screened subpopulation. The two ratios express how the screening
/// tool's error rates are skewed for this group relative to the base rates:
/// fnr_ratio divides the sensitivity, fpr_ratio multiplies the false
/// positive rate. Both default to 1 (no skew) and must be >= 1.
struct GroupSpec {
  std::string name;
  std::int64_t population = 0;
  Rational prevalence;        // cases per person, e.g. 1/1000
  Rational fnr_ratio = 1;     // sensitivity divisor
  Rational fpr_ratio = 1;     // FPR multiplier

  bool operator==(const GroupSpec&) const = default;
};

/// Parametric description of a screening scenario: a tool with base
/// sensitivity/specificity applied to a set of groups.
struct ScenarioSpec {
  std::string name;
  Rational base_sensitivity;
  Rational base_specificity;
  std::string attribute_name;  // e.g. "nationality", "ethnicity"
  std::vector<GroupSpec> groups;
  std::vector<std::string> notes;  // carried into reports

  bool operator==(const ScenarioSpec&) const = default;
};

struct EffectiveRates {
  Rational sensitivity;  // base_sensitivity / fnr_ratio
  Rational fpr;          // (1 - base_specificity) * fpr_ratio

  bool operator==(const EffectiveRates&) const = default;
};

/// Expected confusion cells for one group, exact and rounded. Exact values
/// satisfy tp + fn + fp + tn = population. Rounded values use round half
/// away from zero on cases, tp, and fp, with fn and tn derived so the
/// rounded flow balances as well.
struct ExpectedOutcome {
  std::string group;
  std::int64_t population = 0;
  EffectiveRates rates;
  Rational cases;  // population * prevalence
  Rational tp;     // cases * effective sensitivity
  Rational fn;     // cases - tp
  Rational fp;     // (population - cases) * effective fpr
  Rational tn;     // population - cases - fp
  std::int64_t cases_rounded = 0;
  std::int64_t tp_rounded = 0;
  std::int64_t fn_rounded = 0;  // cases_rounded - tp_rounded
  std::int64_t fp_rounded = 0;
  std::int64_t tn_rounded = 0;  // population - cases_rounded - fp_rounded

  bool operator==(const ExpectedOutcome&) const = default;
};

/// Validates scenario invariants: non-empty unique groups, rates in [0, 1],
/// ratios >= 1, and effective rates within [0, 1] for every group. Throws
/// Error naming the offending group and field.
void validate_scenario(const ScenarioSpec& scenario);

/// Applies the group's skew ratios to the scenario's base rates.
/// Throws Error when an adjusted rate leaves [0, 1].
EffectiveRates effective_rates(const ScenarioSpec& scenario, const GroupSpec& group);

/// Deterministic expected-value realization of the scenario, one outcome per
/// group in declaration order.
std::vector<ExpectedOutcome> expected_outcomes(const ScenarioSpec& scenario);

/// Individual-level realization: one record per person, label drawn
/// Bernoulli(prevalence), prediction Bernoulli(effective sensitivity) for
/// positives and Bernoulli(effective FPR) for negatives. Each group draws
/// from its own stream derived from (seed, group index), so output is a pure
/// function of (scenario, seed) and identical byte-for-byte across runs.
Dataset generate_cohort(const ScenarioSpec& scenario, std::uint64_t seed);

/// Scenarios shipped with the engine, keyed by name.
const std::map<std::string, ScenarioSpec>& builtin_scenarios();

}  // namespace fairaudit
