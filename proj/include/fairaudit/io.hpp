#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/disparity.hpp"
#include "fairaudit/scenario.hpp"

namespace fairaudit {

/// Column mapping for dataset CSV files. An empty attribute_columns list
/// means "all remaining columns are attributes".
struct DatasetSchema {
  std::string id_column = "entity_id";
  std::string score_column = "score";
  std::string label_column = "label_value";
  std::vector<std::string> attribute_columns;  // empty -> all remaining

  bool operator==(const DatasetSchema&) const = default;
};

enum class ReportFormat { json, markdown, csv_tables };

struct ReportDocument {
  ReportFormat format = ReportFormat::markdown;
  std::string payload;
};

ReportFormat report_format_from_name(std::string_view name);

/// Loads a dataset from an RFC 4180 CSV file (UTF-8, comma delimiter, header
/// row required). Labels parse from {0, 1, true, false} case-insensitively;
/// scores must be decimals in [0, 1]. Errors name the row (header is row 1)
/// and column of the offending value.
Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema = {});

/// Writes a dataset as CSV with the schema's column names. load_dataset of
/// the result reproduces the record content exactly.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path,
                   const DatasetSchema& schema = {});
std::string dataset_to_csv(const Dataset& dataset, const DatasetSchema& schema = {});

/// Renders an audit report. json uses stable field ordering with rates as
/// 6-significant-digit decimals plus exact numerator/denominator counts;
/// markdown renders one table per attribute with the reference row marked;
/// csv_tables renders flat disparity records.
ReportDocument emit_report(const AuditReport& report, ReportFormat format);

/// Parses a JSON report produced by emit_report. Lossless at the emitted
/// precision: re-serializing the parsed report reproduces the payload.
AuditReport parse_report_json(const std::string& payload);

/// Scenario JSON: schema_version "1", field names mirroring ScenarioSpec /
/// GroupSpec. Rates accept JSON numbers (read as the decimal they were
/// written as) or strings ("0.98", "49/80").
ScenarioSpec load_scenario(const std::filesystem::path& path);
ScenarioSpec scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioSpec& scenario);

/// External benchmark MetricSet from JSON: an object with any of the keys
/// fpr, fdr, fnr, for, tpr, tnr, ppv, npv, predicted_positive_rate,
/// prevalence mapping to numbers in [0, 1].
MetricSet load_external_metrics(const std::filesystem::path& path);
MetricSet external_metrics_from_json(const std::string& text);

/// Expected-value scenario report (one row per group, exact and rounded
/// flows, scenario notes appended).
ReportDocument emit_expected_report(const ScenarioSpec& scenario,
                                    const std::vector<ExpectedOutcome>& outcomes,
                                    ReportFormat format);

}  // namespace fairaudit
