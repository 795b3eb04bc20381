#include "fairaudit/disparity.hpp"

#include <algorithm>
#include <array>
#include <ctime>

#include "fairaudit/error.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

struct MetricIdName {
  MetricId id;
  std::string_view name;
};

constexpr std::array<MetricIdName, 8> kMetricNames = {{
    {MetricId::fpr, "fpr"},
    {MetricId::fdr, "fdr"},
    {MetricId::fnr, "fnr"},
    {MetricId::for_rate, "for"},
    {MetricId::tpr, "tpr"},
    {MetricId::ppv, "ppv"},
    {MetricId::equal_parity, "equal_parity"},
    {MetricId::proportional_parity, "proportional_parity"},
}};

/// The MetricSet entry a metric id compares. equal_parity has none: it
/// compares absolute predicted-positive counts, not a rate.
const MetricValue* metric_set_entry(const MetricSet& metrics, MetricId id) {
  switch (id) {
    case MetricId::fpr: return &metrics.fpr;
    case MetricId::fdr: return &metrics.fdr;
    case MetricId::fnr: return &metrics.fnr;
    case MetricId::for_rate: return &metrics.for_rate;
    case MetricId::tpr: return &metrics.tpr;
    case MetricId::ppv: return &metrics.ppv;
    case MetricId::proportional_parity: return &metrics.predicted_positive_rate;
    case MetricId::equal_parity: return nullptr;
  }
  return nullptr;
}

std::string iso8601_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

void validate_config(const AuditConfig& config) {
  if (!(config.tau > 0.0 && config.tau <= 1.0)) {
    throw Error("tau " + std::to_string(config.tau) + " outside (0,1]");
  }
  if (config.metrics.empty()) throw Error("metric list is empty");
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw Error("threshold " + std::to_string(config.threshold) + " outside [0,1]");
  }
  if (config.reference.kind == ReferenceKind::custom && config.reference.custom_group.empty()) {
    throw Error("custom reference strategy needs a group name");
  }
  if (config.reference.kind == ReferenceKind::external_benchmark &&
      !config.reference.external_metrics.has_value()) {
    throw Error("external_benchmark reference strategy needs a metric set");
  }
}

}  // namespace

std::string_view metric_id_name(MetricId id) {
  for (const auto& entry : kMetricNames) {
    if (entry.id == id) return entry.name;
  }
  return "?";
}

MetricId metric_id_from_name(std::string_view name) {
  for (const auto& entry : kMetricNames) {
    if (entry.name == name) return entry.id;
  }
  throw Error("unknown metric '" + std::string(name) +
              "' (expected one of fpr, fdr, fnr, for, tpr, ppv, equal_parity, proportional_parity)");
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::parity: return "parity";
    case Verdict::disparity: return "disparity";
    case Verdict::insufficient_data: return "insufficient_data";
    case Verdict::reference: return "reference";
  }
  return "?";
}

Verdict verdict_from_name(std::string_view name) {
  if (name == "parity") return Verdict::parity;
  if (name == "disparity") return Verdict::disparity;
  if (name == "insufficient_data") return Verdict::insufficient_data;
  if (name == "reference") return Verdict::reference;
  throw Error("unknown verdict '" + std::string(name) + "'");
}

std::string_view reference_kind_name(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::predominant: return "predominant";
    case ReferenceKind::pooled_population: return "pooled_population";
    case ReferenceKind::external_benchmark: return "external_benchmark";
    case ReferenceKind::custom: return "custom";
  }
  return "?";
}

ReferenceKind reference_kind_from_name(std::string_view name) {
  if (name == "predominant") return ReferenceKind::predominant;
  if (name == "pooled_population") return ReferenceKind::pooled_population;
  if (name == "external_benchmark") return ReferenceKind::external_benchmark;
  if (name == "custom") return ReferenceKind::custom;
  throw Error("unknown reference kind '" + std::string(name) + "'");
}

ReferenceInfo select_reference(std::span<const GroupStats> groups,
                               const ReferenceStrategy& strategy,
                               std::span<const MetricId> required_metrics) {
  if (groups.empty()) throw Error("reference selection over an empty group list");

  ReferenceInfo info;
  switch (strategy.kind) {
    case ReferenceKind::predominant: {
      const GroupStats& g = groups.front();  // crosstab orders by descending n
      info = {g.group_value, g.metrics, g.group_share_of_predicted_positives,
              g.counts.predicted_positive(), g.n, true};
      break;
    }
    case ReferenceKind::pooled_population: {
      ConfusionCounts pooled;
      for (const GroupStats& g : groups) pooled += g.counts;
      info.label = "pooled";
      info.metrics = metric_set(pooled);
      info.share_of_predicted_positives =
          MetricValue::ratio(pooled.predicted_positive(), pooled.predicted_positive());
      info.predicted_positives = pooled.predicted_positive();
      info.n = pooled.total();
      info.is_group = false;
      break;
    }
    case ReferenceKind::external_benchmark: {
      if (!strategy.external_metrics.has_value()) {
        throw Error("external_benchmark reference strategy needs a metric set");
      }
      info.label = "external";
      info.metrics = *strategy.external_metrics;
      info.is_group = false;
      for (MetricId id : required_metrics) {
        const MetricValue* entry = metric_set_entry(info.metrics, id);
        if (entry == nullptr) {
          throw Error("external benchmark cannot answer metric '" +
                      std::string(metric_id_name(id)) +
                      "': it compares absolute counts the benchmark does not carry");
        }
        if (!entry->defined()) {
          throw Error("external benchmark is missing required metric '" +
                      std::string(metric_id_name(id)) + "'");
        }
      }
      break;
    }
    case ReferenceKind::custom: {
      const auto it = std::find_if(groups.begin(), groups.end(), [&](const GroupStats& g) {
        return g.group_value == strategy.custom_group;
      });
      if (it == groups.end()) {
        throw Error("reference group '" + strategy.custom_group + "' not found in attribute '" +
                    groups.front().attribute_name + "'");
      }
      info = {it->group_value, it->metrics, it->group_share_of_predicted_positives,
              it->counts.predicted_positive(), it->n, true};
      break;
    }
  }
  return info;
}

DisparityMeasure disparity(MetricValue group_metric, MetricValue reference_metric) {
  if (!group_metric.defined() || !reference_metric.defined()) return DisparityMeasure::undefined();
  if (reference_metric.value() == 0.0) return DisparityMeasure::undefined();
  return DisparityMeasure::of(group_metric.value() / reference_metric.value());
}

Verdict parity_check(const DisparityMeasure& measure, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error("tau " + std::to_string(tau) + " outside (0,1]");
  }
  if (!measure.defined()) return Verdict::insufficient_data;
  const double m = measure.value();
  // tau <= m <= 1/tau, upper bound as m * tau <= 1 to stay exact at
  // boundaries 1/tau cannot represent.
  return (m >= tau && m * tau <= 1.0) ? Verdict::parity : Verdict::disparity;
}

DisparityMeasure equal_parity_measure(const GroupStats& group, const GroupStats& reference) {
  const std::uint64_t pp_ref = reference.counts.predicted_positive();
  if (pp_ref == 0) return DisparityMeasure::undefined();
  return DisparityMeasure::of(static_cast<double>(group.counts.predicted_positive()) /
                              static_cast<double>(pp_ref));
}

DisparityMeasure proportional_parity_measure(const GroupStats& group,
                                             const GroupStats& reference) {
  if (group.n == 0 || reference.n == 0) return DisparityMeasure::undefined();
  return disparity(group.metrics.predicted_positive_rate,
                   reference.metrics.predicted_positive_rate);
}

namespace {

DisparityRecord compare_group(const GroupStats& group, const ReferenceInfo& ref, MetricId id,
                              double tau) {
  DisparityRecord rec;
  rec.metric_name = metric_id_name(id);
  rec.attribute_name = group.attribute_name;
  rec.group_value = group.group_value;

  if (id == MetricId::equal_parity) {
    rec.group_metric = group.group_share_of_predicted_positives;
    rec.reference_metric = ref.share_of_predicted_positives;
    if (ref.predicted_positives.has_value() && *ref.predicted_positives > 0) {
      rec.measure = DisparityMeasure::of(static_cast<double>(group.counts.predicted_positive()) /
                                         static_cast<double>(*ref.predicted_positives));
    } else {
      rec.measure = DisparityMeasure::undefined();
    }
  } else {
    const MetricValue* group_entry = metric_set_entry(group.metrics, id);
    const MetricValue* ref_entry = metric_set_entry(ref.metrics, id);
    rec.group_metric = *group_entry;
    rec.reference_metric = *ref_entry;
    if (id == MetricId::proportional_parity && group.n == 0) {
      rec.measure = DisparityMeasure::undefined();
    } else {
      rec.measure = disparity(rec.group_metric, rec.reference_metric);
    }
  }

  const bool is_reference_row = ref.is_group && group.group_value == ref.label;
  rec.verdict = is_reference_row ? Verdict::reference : parity_check(rec.measure, tau);
  return rec;
}

}  // namespace

AuditReport audit_tables(const std::vector<AttributeTable>& tables, const AuditConfig& config,
                         std::uint64_t dataset_size) {
  validate_config(config);

  AuditReport report;
  report.config = config;
  report.dataset_size = dataset_size;
  report.generated_at = iso8601_utc_now();
  report.engine_version = std::string(kEngineVersion);
  report.overall_verdict = Verdict::parity;

  for (const AttributeTable& table : tables) {
    AttributeAudit entry;
    entry.attribute = table.attribute;
    entry.groups = table.groups;

    ReferenceInfo ref;
    try {
      ref = select_reference(table.groups, config.reference, config.metrics);
    } catch (const Error& e) {
      throw Error("attribute '" + table.attribute + "': " + e.what());
    }
    entry.reference_label = ref.label;

    for (MetricId id : config.metrics) {
      for (const GroupStats& group : table.groups) {
        DisparityRecord rec = compare_group(group, ref, id, config.tau);
        if (rec.verdict == Verdict::disparity) report.overall_verdict = Verdict::disparity;
        entry.records.push_back(std::move(rec));
      }
    }
    report.attributes.push_back(std::move(entry));
  }
  return report;
}

AuditReport audit(const Dataset& dataset, const AuditConfig& config) {
  validate_config(config);
  validate_dataset(dataset);
  const Dataset binarized = binarize(dataset, config.threshold);
  const std::vector<AttributeTable> tables =
      multi_crosstab(binarized, binarized.attribute_names);
  return audit_tables(tables, config, dataset.records.size());
}

}  // namespace fairaudit
