#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/metrics.hpp"

namespace fairaudit {

/// Group label used for records whose attribute value is the empty string.
/// Such records form their own group rather than being dropped: silently
/// losing them would bias the very counts being audited.
inline constexpr std::string_view kMissingValueLabel = "(missing)";

/// Per-group slice of a crosstab: counts, derived metrics, and the group's
/// share of all predicted positives for the attribute.
struct GroupStats {
  std::string attribute_name;
  std::string group_value;
  std::uint64_t n = 0;
  ConfusionCounts counts;
  MetricSet metrics;
  MetricValue group_share_of_predicted_positives;  // PP_g / PP_total

  bool operator==(const GroupStats&) const = default;
};

struct AttributeTable {
  std::string attribute;
  std::vector<GroupStats> groups;  // ordered by descending n, ties lexicographic

  bool operator==(const AttributeTable&) const = default;
};

/// Sets each record's prediction to score >= threshold. Records that already
/// carry a prediction pass through unchanged. Threshold comparison is
/// inclusive. Throws Error for threshold outside [0, 1].
Dataset binarize(const Dataset& dataset, double threshold);

/// Partitions the dataset by one attribute. Requires binarized predictions
/// on every record. Groups are ordered by descending size so the predominant
/// group is always the head of the list; ties break lexicographically.
std::vector<GroupStats> crosstab(const Dataset& dataset, const std::string& attribute);

/// Independent crosstabs for several attributes, input order preserved,
/// duplicates collapsed. Any unknown attribute aborts the whole call.
std::vector<AttributeTable> multi_crosstab(const Dataset& dataset,
                                           std::span<const std::string> attributes);

}  // namespace fairaudit
