#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

namespace fairaudit {

/// The four confusion-matrix cells for one group of binary
/// (predicted, actual) outcomes. Counts are exact integers; rate metrics are
/// derived from them in double precision at the last step.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  std::uint64_t predicted_positive() const { return tp + fp; }
  std::uint64_t predicted_negative() const { return fn + tn; }
  std::uint64_t actual_positive() const { return tp + fn; }
  std::uint64_t actual_negative() const { return fp + tn; }

  ConfusionCounts& operator+=(const ConfusionCounts& other) {
    tp += other.tp;
    fp += other.fp;
    tn += other.tn;
    fn += other.fn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) { return a += b; }

  bool operator==(const ConfusionCounts&) const = default;
};

/// A rate metric in [0, 1], or an explicit undefined state when the metric's
/// denominator is zero. Undefined is a value, not an error: downstream
/// disparity computation must treat it distinctly, never coerce it to 0.
class MetricValue {
 public:
  MetricValue() = default;  // undefined

  static MetricValue undefined() { return MetricValue(); }
  static MetricValue of(double value) {
    MetricValue m;
    m.value_ = value;
    return m;
  }
  /// num/den, undefined when den == 0.
  static MetricValue ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? undefined() : of(static_cast<double>(num) / static_cast<double>(den));
  }

  bool defined() const { return value_.has_value(); }
  double value() const { return value_.value(); }
  double value_or(double fallback) const { return value_.value_or(fallback); }

  bool operator==(const MetricValue&) const = default;

 private:
  std::optional<double> value_;
};

/// All rate metrics derived from one ConfusionCounts. Complement pairs
/// (fpr/tnr, fnr/tpr, fdr/ppv, for/npv) sum to 1 whenever defined.
struct MetricSet {
  MetricValue fpr;       // fp / (fp + tn)
  MetricValue fdr;       // fp / (fp + tp)
  MetricValue fnr;       // fn / (fn + tp)
  MetricValue for_rate;  // fn / (fn + tn)
  MetricValue tpr;
  MetricValue tnr;
  MetricValue ppv;
  MetricValue npv;
  MetricValue predicted_positive_rate;  // (tp + fp) / total, within the group
  MetricValue prevalence;               // (tp + fn) / total

  bool operator==(const MetricSet&) const = default;
};

/// One (predicted, actual) pair. Field order matches the accumulation rule:
/// tp counts (1,1), fp counts (1,0), fn counts (0,1), tn counts (0,0).
struct PredictionPair {
  bool predicted = false;
  bool actual = false;
};

ConfusionCounts accumulate_counts(std::span<const PredictionPair> pairs);

MetricValue false_positive_rate(const ConfusionCounts& c);
MetricValue false_discovery_rate(const ConfusionCounts& c);
MetricValue false_negative_rate(const ConfusionCounts& c);
MetricValue false_omission_rate(const ConfusionCounts& c);
MetricValue true_positive_rate(const ConfusionCounts& c);
MetricValue true_negative_rate(const ConfusionCounts& c);
MetricValue positive_predictive_value(const ConfusionCounts& c);
MetricValue negative_predictive_value(const ConfusionCounts& c);

MetricSet metric_set(const ConfusionCounts& c);

}  // namespace fairaudit
