#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairaudit/crosstab.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

enum class ReferenceKind { predominant, pooled_population, external_benchmark, custom };

/// How the reference group is chosen for an attribute:
///   predominant        -> the largest group
///   pooled_population  -> metrics of the cell-wise sum over all groups
///   external_benchmark -> a caller-supplied MetricSet
///   custom             -> a named group
struct ReferenceStrategy {
  ReferenceKind kind = ReferenceKind::predominant;
  std::string custom_group;                  // required iff kind == custom
  std::optional<MetricSet> external_metrics;  // required iff kind == external_benchmark

  static ReferenceStrategy predominant() { return {}; }
  static ReferenceStrategy pooled() { return {ReferenceKind::pooled_population, {}, {}}; }
  static ReferenceStrategy custom(std::string group) {
    return {ReferenceKind::custom, std::move(group), {}};
  }
  static ReferenceStrategy external(MetricSet metrics) {
    return {ReferenceKind::external_benchmark, {}, std::move(metrics)};
  }

  bool operator==(const ReferenceStrategy&) const = default;
};

/// Ratio of a group's metric to the reference group's metric. 1 means no
/// disparity. Undefined when either side is undefined or the reference is
/// zero. A defined 0 occurs only for a zero group metric over a positive
/// reference; the parity band's lower bound fails there, so it reads as
/// disparity rather than missing data.
class DisparityMeasure {
 public:
  DisparityMeasure() = default;  // undefined

  static DisparityMeasure undefined() { return DisparityMeasure(); }
  static DisparityMeasure of(double value) {
    DisparityMeasure m;
    m.value_ = value;
    return m;
  }

  bool defined() const { return value_.has_value(); }
  double value() const { return value_.value(); }

  bool operator==(const DisparityMeasure&) const = default;

 private:
  std::optional<double> value_;
};

enum class Verdict { parity, disparity, insufficient_data, reference };

/// One (metric, group) comparison against the reference.
struct DisparityRecord {
  std::string metric_name;
  std::string attribute_name;
  std::string group_value;
  MetricValue group_metric;
  MetricValue reference_metric;
  DisparityMeasure measure;
  Verdict verdict = Verdict::insufficient_data;

  bool operator==(const DisparityRecord&) const = default;
};

enum class MetricId { fpr, fdr, fnr, for_rate, tpr, ppv, equal_parity, proportional_parity };

std::string_view metric_id_name(MetricId id);
MetricId metric_id_from_name(std::string_view name);

struct AuditConfig {
  double tau = 0.8;  // disparity intolerance, in (0, 1]
  std::vector<MetricId> metrics = {MetricId::fpr, MetricId::fdr, MetricId::fnr,
                                   MetricId::for_rate};
  ReferenceStrategy reference;
  double threshold = 0.5;
  std::uint64_t min_group_size = 30;  // smaller groups are flagged, never censored

  bool operator==(const AuditConfig&) const = default;
};

/// Resolved reference for one attribute table. predicted_positives and n are
/// absent for external benchmarks, which supply rates but no counts.
struct ReferenceInfo {
  std::string label;
  MetricSet metrics;
  MetricValue share_of_predicted_positives;
  std::optional<std::uint64_t> predicted_positives;
  std::optional<std::uint64_t> n;
  bool is_group = false;  // label names a row of the table (predominant/custom)
};

/// Per-attribute slice of an audit report.
struct AttributeAudit {
  std::string attribute;
  std::string reference_label;
  std::vector<GroupStats> groups;
  std::vector<DisparityRecord> records;
};

struct AuditReport {
  AuditConfig config;
  std::uint64_t dataset_size = 0;
  std::string generated_at;  // ISO 8601 UTC
  std::string engine_version;
  std::vector<AttributeAudit> attributes;
  Verdict overall_verdict = Verdict::parity;  // parity iff no record is in disparity
};

/// Resolves the reference for a table of groups. `required_metrics` triggers
/// the external-benchmark completeness check: every configured metric must be
/// answerable from the supplied MetricSet (equal_parity never is, since it
/// compares absolute counts). Throws Error on an unknown custom group or an
/// incomplete external benchmark.
ReferenceInfo select_reference(std::span<const GroupStats> groups,
                               const ReferenceStrategy& strategy,
                               std::span<const MetricId> required_metrics = {});

/// group / reference. Undefined when either side is undefined or the
/// reference is zero; exactly 0 when the group metric is 0 over a positive
/// reference.
DisparityMeasure disparity(MetricValue group_metric, MetricValue reference_metric);

/// Applies the parity band: parity iff tau <= measure <= 1/tau, boundaries
/// inclusive. The upper bound is evaluated as measure * tau <= 1 so that the
/// band is exact at representable boundaries (1/tau itself may not be
/// representable). Throws Error for tau outside (0, 1].
Verdict parity_check(const DisparityMeasure& measure, double tau);

/// PP_group / PP_reference: do groups contribute equal absolute counts of
/// flagged individuals.
DisparityMeasure equal_parity_measure(const GroupStats& group, const GroupStats& reference);

/// (PP_g / n_g) / (PP_ref / n_ref): are groups flagged at equal rates
/// relative to their sizes.
DisparityMeasure proportional_parity_measure(const GroupStats& group,
                                             const GroupStats& reference);

/// Runs the disparity pipeline over pre-computed crosstab tables.
AuditReport audit_tables(const std::vector<AttributeTable>& tables, const AuditConfig& config,
                         std::uint64_t dataset_size);

/// Full pipeline: validate, binarize, crosstab every attribute, compare each
/// group against the reference per configured metric, render verdicts.
/// Deterministic for identical inputs up to the report timestamp.
AuditReport audit(const Dataset& dataset, const AuditConfig& config);

std::string_view verdict_name(Verdict verdict);
Verdict verdict_from_name(std::string_view name);

std::string_view reference_kind_name(ReferenceKind kind);
ReferenceKind reference_kind_from_name(std::string_view name);

}  // namespace fairaudit
