#include "fairaudit/crosstab.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "fairaudit/error.hpp"

namespace fairaudit {

void validate_dataset(const Dataset& dataset) {
  std::unordered_set<std::string_view> seen_ids;
  seen_ids.reserve(dataset.records.size());
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const Record& r = dataset.records[i];
    if (!seen_ids.insert(r.entity_id).second) {
      throw Error("duplicate entity_id '" + r.entity_id + "' at record " + std::to_string(i + 1));
    }
    if (r.score < 0.0 || r.score > 1.0) {
      throw Error("record '" + r.entity_id + "': score " + std::to_string(r.score) +
                  " outside [0,1]");
    }
    if (r.attributes.size() != dataset.attribute_names.size()) {
      throw Error("record '" + r.entity_id + "': attribute set differs from dataset schema");
    }
    for (const auto& name : dataset.attribute_names) {
      if (!r.attributes.contains(name)) {
        throw Error("record '" + r.entity_id + "': missing attribute '" + name + "'");
      }
    }
  }
}

Dataset binarize(const Dataset& dataset, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error("threshold " + std::to_string(threshold) + " outside [0,1]");
  }
  Dataset out = dataset;
  for (Record& r : out.records) {
    if (!r.prediction.has_value()) r.prediction = r.score >= threshold;
  }
  return out;
}

std::vector<GroupStats> crosstab(const Dataset& dataset, const std::string& attribute) {
  if (std::find(dataset.attribute_names.begin(), dataset.attribute_names.end(), attribute) ==
      dataset.attribute_names.end()) {
    throw Error("unknown attribute '" + attribute + "'");
  }

  std::map<std::string, ConfusionCounts> cells;
  for (const Record& r : dataset.records) {
    if (!r.prediction.has_value()) {
      throw Error("attribute '" + attribute + "': record '" + r.entity_id +
                  "' has no prediction; binarize the dataset first");
    }
    const std::string& raw = r.attributes.at(attribute);
    const std::string& value = raw.empty() ? std::string(kMissingValueLabel) : raw;
    ConfusionCounts& c = cells[value];
    if (*r.prediction) {
      r.label ? ++c.tp : ++c.fp;
    } else {
      r.label ? ++c.fn : ++c.tn;
    }
  }

  std::vector<GroupStats> groups;
  groups.reserve(cells.size());
  std::uint64_t pp_total = 0;
  for (const auto& [value, counts] : cells) {
    GroupStats g;
    g.attribute_name = attribute;
    g.group_value = value;
    g.n = counts.total();
    g.counts = counts;
    g.metrics = metric_set(counts);
    pp_total += counts.predicted_positive();
    groups.push_back(std::move(g));
  }
  for (GroupStats& g : groups) {
    g.group_share_of_predicted_positives = MetricValue::ratio(g.counts.predicted_positive(), pp_total);
  }

  // Predominant group first; deterministic tie-break on the group label.
  std::sort(groups.begin(), groups.end(), [](const GroupStats& a, const GroupStats& b) {
    if (a.n != b.n) return a.n > b.n;
    return a.group_value < b.group_value;
  });
  return groups;
}

std::vector<AttributeTable> multi_crosstab(const Dataset& dataset,
                                           std::span<const std::string> attributes) {
  std::vector<AttributeTable> tables;
  std::unordered_set<std::string_view> seen;
  for (const std::string& attribute : attributes) {
    if (!seen.insert(attribute).second) continue;
    tables.push_back({attribute, crosstab(dataset, attribute)});
  }
  return tables;
}

}  // namespace fairaudit
