#include "fairaudit/metrics.hpp"

namespace fairaudit {

ConfusionCounts accumulate_counts(std::span<const PredictionPair> pairs) {
  ConfusionCounts c;
  for (const auto& pair : pairs) {
    if (pair.predicted) {
      pair.actual ? ++c.tp : ++c.fp;
    } else {
      pair.actual ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

MetricValue false_positive_rate(const ConfusionCounts& c) {
  return MetricValue::ratio(c.fp, c.fp + c.tn);
}

MetricValue false_discovery_rate(const ConfusionCounts& c) {
  return MetricValue::ratio(c.fp, c.fp + c.tp);
}

MetricValue false_negative_rate(const ConfusionCounts& c) {
  return MetricValue::ratio(c.fn, c.fn + c.tp);
}

MetricValue false_omission_rate(const ConfusionCounts& c) {
  return MetricValue::ratio(c.fn, c.fn + c.tn);
}

MetricValue true_positive_rate(const ConfusionCounts& c) {
  return MetricValue::ratio(c.tp, c.fn + c.tp);
}

MetricValue true_negative_rate(const ConfusionCounts& c) {
  return MetricValue::ratio(c.tn, c.fp + c.tn);
}

MetricValue positive_predictive_value(const ConfusionCounts& c) {
  return MetricValue::ratio(c.tp, c.fp + c.tp);
}

MetricValue negative_predictive_value(const ConfusionCounts& c) {
  return MetricValue::ratio(c.tn, c.fn + c.tn);
}

MetricSet metric_set(const ConfusionCounts& c) {
  MetricSet m;
  m.fpr = false_positive_rate(c);
  m.fdr = false_discovery_rate(c);
  m.fnr = false_negative_rate(c);
  m.for_rate = false_omission_rate(c);
  m.tpr = true_positive_rate(c);
  m.tnr = true_negative_rate(c);
  m.ppv = positive_predictive_value(c);
  m.npv = negative_predictive_value(c);
  m.predicted_positive_rate = MetricValue::ratio(c.predicted_positive(), c.total());
  m.prevalence = MetricValue::ratio(c.actual_positive(), c.total());
  return m;
}

}  // namespace fairaudit
