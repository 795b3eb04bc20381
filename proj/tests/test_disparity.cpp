#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fairaudit/disparity.hpp"
#include "fairaudit/error.hpp"
#include "fairaudit/io.hpp"
#include "fairaudit/scenario.hpp"

using namespace fairaudit;

namespace {

GroupStats make_group(std::string attribute, std::string value, ConfusionCounts counts,
                      std::uint64_t pp_total) {
  GroupStats g;
  g.attribute_name = std::move(attribute);
  g.group_value = std::move(value);
  g.counts = counts;
  g.n = counts.total();
  g.metrics = metric_set(counts);
  g.group_share_of_predicted_positives = MetricValue::ratio(counts.predicted_positive(), pp_total);
  return g;
}

std::vector<GroupStats> finalize_table(std::vector<std::pair<std::string, ConfusionCounts>> cells,
                                       const std::string& attribute) {
  std::uint64_t pp_total = 0;
  for (const auto& [value, counts] : cells) pp_total += counts.predicted_positive();
  std::vector<GroupStats> groups;
  for (const auto& [value, counts] : cells) {
    groups.push_back(make_group(attribute, value, counts, pp_total));
  }
  std::sort(groups.begin(), groups.end(), [](const GroupStats& a, const GroupStats& b) {
    return a.n != b.n ? a.n > b.n : a.group_value < b.group_value;
  });
  return groups;
}

Dataset two_identical_subpopulations() {
  Dataset ds;
  ds.attribute_names = {"region"};
  int id = 0;
  for (const std::string region : {"east", "west"}) {
    for (int i = 0; i < 40; ++i) {
      Record r;
      r.entity_id = "e" + std::to_string(id++);
      r.label = i % 4 == 0;
      r.score = (i % 3 == 0) == r.label ? 0.9 : 0.1;
      r.attributes = {{"region", region}};
      ds.records.push_back(std::move(r));
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("select_reference strategies") {
  // Group sizes follow the TB visa scenario populations.
  const auto groups = finalize_table({{"China", {126, 5195, 124675, 4}},
                                      {"India", {213, 6587, 103193, 7}},
                                      {"UK", {6, 2400, 57594, 0}},
                                      {"US", {4, 2000, 47995, 1}},
                                      {"Vietnam", {39, 1598, 38362, 1}}},
                                     "nationality");

  SUBCASE("predominant picks the largest group") {
    const ReferenceInfo ref = select_reference(groups, ReferenceStrategy::predominant());
    CHECK(ref.label == "China");
    CHECK(ref.is_group);
    CHECK(ref.metrics == groups[0].metrics);
    CHECK(ref.n == groups[0].n);
  }

  SUBCASE("pooled over a single group equals that group") {
    const std::vector<GroupStats> one = {groups[0]};
    const ReferenceInfo ref = select_reference(one, ReferenceStrategy::pooled());
    CHECK(ref.label == "pooled");
    CHECK(ref.metrics == groups[0].metrics);
    CHECK_FALSE(ref.is_group);
  }

  SUBCASE("pooled sums counts cell-wise") {
    const ReferenceInfo ref = select_reference(groups, ReferenceStrategy::pooled());
    ConfusionCounts pooled;
    for (const GroupStats& g : groups) pooled += g.counts;
    CHECK(ref.metrics == metric_set(pooled));
    CHECK(ref.n == pooled.total());
  }

  SUBCASE("custom looks up by name") {
    const ReferenceInfo ref = select_reference(groups, ReferenceStrategy::custom("US"));
    CHECK(ref.label == "US");
    CHECK(ref.is_group);
    CHECK(ref.n == 50000);
  }

  SUBCASE("custom group must exist") {
    CHECK_THROWS_WITH_AS(select_reference(groups, ReferenceStrategy::custom("Mars")),
                         doctest::Contains("Mars"), Error);
  }

  SUBCASE("external metrics are taken verbatim") {
    MetricSet external;
    external.fpr = MetricValue::of(0.04);
    const ReferenceInfo ref = select_reference(groups, ReferenceStrategy::external(external));
    CHECK(ref.label == "external");
    CHECK(ref.metrics.fpr == MetricValue::of(0.04));
    CHECK_FALSE(ref.is_group);
    CHECK_FALSE(ref.n.has_value());
  }

  SUBCASE("external benchmark must cover the configured metrics") {
    MetricSet external;
    external.fpr = MetricValue::of(0.04);
    const std::vector<MetricId> needs_fnr = {MetricId::fpr, MetricId::fnr};
    CHECK_THROWS_WITH_AS(
        select_reference(groups, ReferenceStrategy::external(external), needs_fnr),
        doctest::Contains("fnr"), Error);
    const std::vector<MetricId> needs_equal = {MetricId::equal_parity};
    CHECK_THROWS_AS(select_reference(groups, ReferenceStrategy::external(external), needs_equal),
                    Error);
  }

  SUBCASE("empty group list is an error") {
    CHECK_THROWS_AS(select_reference({}, ReferenceStrategy::predominant()), Error);
  }
}

TEST_CASE("disparity ratio") {
  const DisparityMeasure skewed = disparity(MetricValue::of(0.06), MetricValue::of(0.04));
  REQUIRE(skewed.defined());
  CHECK(skewed.value() == doctest::Approx(1.5).epsilon(1e-12));

  for (double x : {0.01, 0.3867, 0.5, 1.0}) {
    const DisparityMeasure identity = disparity(MetricValue::of(x), MetricValue::of(x));
    REQUIRE(identity.defined());
    CHECK(identity.value() == 1.0);
  }

  CHECK_FALSE(disparity(MetricValue::of(0.05), MetricValue::of(0.0)).defined());
  CHECK_FALSE(disparity(MetricValue::undefined(), MetricValue::of(0.5)).defined());
  CHECK_FALSE(disparity(MetricValue::of(0.5), MetricValue::undefined()).defined());

  // A zero group rate over a positive reference is a defined measure of 0.
  const DisparityMeasure zero = disparity(MetricValue::of(0.0), MetricValue::of(0.04));
  REQUIRE(zero.defined());
  CHECK(zero.value() == 0.0);
}

TEST_CASE("parity band boundaries are exact") {
  CHECK(parity_check(DisparityMeasure::of(1.0), 0.8) == Verdict::parity);
  CHECK(parity_check(DisparityMeasure::of(0.8), 0.8) == Verdict::parity);
  CHECK(parity_check(DisparityMeasure::of(1.25), 0.8) == Verdict::parity);  // 1/0.8 inclusive
  CHECK(parity_check(DisparityMeasure::of(0.7999), 0.8) == Verdict::disparity);
  CHECK(parity_check(DisparityMeasure::of(1.2501), 0.8) == Verdict::disparity);

  CHECK(parity_check(DisparityMeasure::of(1.0), 1.0) == Verdict::parity);
  CHECK(parity_check(DisparityMeasure::of(1.0 + 1e-15), 1.0) == Verdict::disparity);
  CHECK(parity_check(DisparityMeasure::of(1.0 - 1e-15), 1.0) == Verdict::disparity);

  CHECK(parity_check(DisparityMeasure::of(0.0), 0.8) == Verdict::disparity);
  CHECK(parity_check(DisparityMeasure::undefined(), 0.8) == Verdict::insufficient_data);

  CHECK_THROWS_AS(parity_check(DisparityMeasure::of(1.0), 0.0), Error);
  CHECK_THROWS_AS(parity_check(DisparityMeasure::of(1.0), 1.5), Error);
  CHECK_THROWS_AS(parity_check(DisparityMeasure::of(1.0), -0.2), Error);
}

TEST_CASE("parity band is reciprocal and monotone in tau") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> log_measure(-4.0, 4.0);
  std::uniform_real_distribution<double> tau_dist(0.01, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double m = std::exp(log_measure(rng));
    const double tau = tau_dist(rng);
    const Verdict v = parity_check(DisparityMeasure::of(m), tau);
    CHECK(parity_check(DisparityMeasure::of(1.0 / m), tau) == v);
    if (v == Verdict::parity) {
      const double smaller = tau * 0.7;
      CHECK(parity_check(DisparityMeasure::of(m), smaller) == Verdict::parity);
    }
  }
}

TEST_CASE("disparity measure is scale invariant") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> rate(0.0001, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double g = rate(rng);
    const double r = rate(rng);
    const double base = disparity(MetricValue::of(g), MetricValue::of(r)).value();
    // Powers of two scale exactly in binary floating point.
    const double scaled =
        disparity(MetricValue::of(g * 0.25), MetricValue::of(r * 0.25)).value();
    CHECK(scaled == base);
  }
}

TEST_CASE("equal parity compares absolute flagged counts") {
  const auto groups = finalize_table(
      {{"A", {70, 30, 900, 0}}, {"B", {35, 15, 950, 0}}}, "country");
  // A flags 100, B flags 50.
  const DisparityMeasure ab = equal_parity_measure(groups[1], groups[0]);
  REQUIRE(ab.defined());
  CHECK(ab.value() == 0.5);

  const DisparityMeasure self = equal_parity_measure(groups[0], groups[0]);
  CHECK(self.value() == 1.0);

  const auto none_flagged = finalize_table({{"A", {0, 0, 10, 0}}}, "country");
  CHECK_FALSE(equal_parity_measure(groups[0], none_flagged[0]).defined());
}

TEST_CASE("proportional parity compares flag rates") {
  const auto groups = finalize_table(
      {{"A", {10, 10, 80, 0}}, {"B", {5, 5, 90, 0}}}, "country");
  // Both flag 20 of 100 and 10 of 100.
  const DisparityMeasure ratio = equal_parity_measure(groups[1], groups[0]);
  REQUIRE(ratio.defined());

  const DisparityMeasure prop = proportional_parity_measure(groups[0], groups[1]);
  REQUIRE(prop.defined());
  CHECK(prop.value() == doctest::Approx(2.0).epsilon(1e-12));

  const DisparityMeasure same = proportional_parity_measure(groups[0], groups[0]);
  CHECK(same.value() == 1.0);

  // Equal flag rates in differently sized groups still measure 1.
  const auto equal_rates = finalize_table(
      {{"big", {20, 20, 160, 0}}, {"small", {10, 10, 80, 0}}}, "country");
  const DisparityMeasure balanced = proportional_parity_measure(equal_rates[1], equal_rates[0]);
  REQUIRE(balanced.defined());
  CHECK(balanced.value() == 1.0);

  const auto zero_ref = finalize_table({{"Z", {0, 0, 50, 0}}}, "country");
  CHECK_FALSE(proportional_parity_measure(groups[0], zero_ref[0]).defined());
}

TEST_CASE("audit of a single-group dataset is all reference rows") {
  Dataset ds;
  ds.attribute_names = {"site"};
  for (int i = 0; i < 50; ++i) {
    Record r;
    r.entity_id = "e" + std::to_string(i);
    r.label = i % 5 == 0;
    r.score = i % 2 ? 0.9 : 0.1;
    r.attributes = {{"site", "only"}};
    ds.records.push_back(std::move(r));
  }
  const AuditReport report = audit(ds, AuditConfig{});
  CHECK(report.overall_verdict == Verdict::parity);
  REQUIRE(report.attributes.size() == 1);
  for (const DisparityRecord& rec : report.attributes[0].records) {
    CHECK(rec.verdict == Verdict::reference);
    if (rec.measure.defined()) CHECK(rec.measure.value() == 1.0);
  }
}

TEST_CASE("audit of two identical subpopulations is parity everywhere") {
  AuditConfig config;
  config.metrics = {MetricId::fpr, MetricId::fdr, MetricId::fnr, MetricId::for_rate,
                    MetricId::equal_parity, MetricId::proportional_parity};
  const AuditReport report = audit(two_identical_subpopulations(), config);
  CHECK(report.overall_verdict == Verdict::parity);
  for (const DisparityRecord& rec : report.attributes[0].records) {
    if (rec.measure.defined()) CHECK(rec.measure.value() == 1.0);
  }
}

TEST_CASE("audit recovers the planted FNR disparity from a generated cohort") {
  const Dataset cohort = generate_cohort(builtin_scenarios().at("lung_ca_sg"), 9);
  AuditConfig config;
  config.reference = ReferenceStrategy::custom("Chinese");
  config.metrics = {MetricId::fnr};
  const AuditReport report = audit(cohort, config);

  CHECK(report.overall_verdict == Verdict::disparity);
  bool saw_malay = false;
  for (const DisparityRecord& rec : report.attributes[0].records) {
    if (rec.group_value != "Malay") continue;
    saw_malay = true;
    REQUIRE(rec.measure.defined());
    // Expected-value ratio: (1 - 0.98/1.6) / (1 - 0.98) = 19.375.
    CHECK(rec.measure.value() == doctest::Approx(19.375).epsilon(0.20));
    CHECK(rec.verdict == Verdict::disparity);
  }
  CHECK(saw_malay);
}

TEST_CASE("reference rows keep verdict reference even with undefined metrics") {
  const auto groups = finalize_table({{"big", {0, 0, 100, 0}}, {"small", {0, 0, 40, 0}}}, "a");
  const std::vector<AttributeTable> tables = {{"a", groups}};
  AuditConfig config;
  config.metrics = {MetricId::fnr};  // no positives anywhere: undefined
  const AuditReport report = audit_tables(tables, config, 140);
  REQUIRE(report.attributes.size() == 1);
  CHECK(report.attributes[0].records[0].verdict == Verdict::reference);
  CHECK(report.attributes[0].records[1].verdict == Verdict::insufficient_data);
  CHECK(report.overall_verdict == Verdict::parity);
}

TEST_CASE("audit validates its configuration") {
  const Dataset ds = two_identical_subpopulations();
  AuditConfig config;
  config.tau = 0.0;
  CHECK_THROWS_AS(audit(ds, config), Error);
  config.tau = 0.8;
  config.metrics = {};
  CHECK_THROWS_AS(audit(ds, config), Error);
  config.metrics = {MetricId::fnr};
  config.threshold = 2.0;
  CHECK_THROWS_AS(audit(ds, config), Error);
  config.threshold = 0.5;
  config.reference = ReferenceStrategy::custom("");
  CHECK_THROWS_AS(audit(ds, config), Error);
}

TEST_CASE("audit errors carry the attribute context") {
  const Dataset ds = two_identical_subpopulations();
  AuditConfig config;
  config.reference = ReferenceStrategy::custom("nowhere");
  CHECK_THROWS_WITH_AS(audit(ds, config), doctest::Contains("region"), Error);
}

TEST_CASE("audit is deterministic modulo the timestamp") {
  const Dataset cohort = generate_cohort(builtin_scenarios().at("lung_ca_sg"), 7);
  AuditConfig config;
  config.reference = ReferenceStrategy::custom("Chinese");

  AuditReport a = audit(cohort, config);
  AuditReport b = audit(cohort, config);
  a.generated_at = "T";
  b.generated_at = "T";
  CHECK(emit_report(a, ReportFormat::json).payload == emit_report(b, ReportFormat::json).payload);
}
