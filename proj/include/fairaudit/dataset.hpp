#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fairaudit {

/// One audited entity: a prediction score, a ground-truth label, and the
/// demographic attributes the audit partitions by. The prediction is set
/// either by binarize() or directly by the cohort generator.
struct Record {
  std::string entity_id;
  double score = 0.0;  // in [0, 1]; {0, 1} for pre-binarized input
  bool label = false;
  std::optional<bool> prediction;
  std::map<std::string, std::string> attributes;

  bool operator==(const Record&) const = default;
};

struct Dataset {
  std::vector<std::string> attribute_names;
  std::vector<Record> records;

  bool operator==(const Dataset&) const = default;
};

/// Checks dataset invariants: unique entity ids, every record carrying
/// exactly the dataset's attribute-name set, scores in [0, 1].
/// Throws Error naming the first offending record.
void validate_dataset(const Dataset& dataset);

}  // namespace fairaudit
