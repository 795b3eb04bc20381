#include "fairaudit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fairaudit/error.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Formatting helpers

std::string format_sig6(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

double round_sig6(double value) { return std::strtod(format_sig6(value).c_str(), nullptr); }

std::string format_shortest(double value) {
  char buffer[48];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// ---------------------------------------------------------------------------
// RFC 4180 CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows; header is row 1
};

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t row_number = 1;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      table.rows.push_back(std::move(fields));
    }
    fields.clear();
    ++row_number;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw Error("row " + std::to_string(row_number) + ": unexpected quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error("row " + std::to_string(row_number) + ": unterminated quoted field");
  }
  if (!field.empty() || field_was_quoted || !fields.empty()) end_row();
  return table;
}

std::string csv_escape(std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Audit report JSON pieces

ordered_json metric_value_json(const MetricValue& value, std::uint64_t num, std::uint64_t den) {
  ordered_json j;
  j["value"] = value.defined() ? ordered_json(round_sig6(value.value())) : ordered_json(nullptr);
  j["numerator"] = num;
  j["denominator"] = den;
  return j;
}

ordered_json optional_number_json(bool defined, double value) {
  return defined ? ordered_json(round_sig6(value)) : ordered_json(nullptr);
}

ordered_json metric_set_json(const MetricSet& m, const ConfusionCounts& c) {
  ordered_json j;
  j["fpr"] = metric_value_json(m.fpr, c.fp, c.fp + c.tn);
  j["fdr"] = metric_value_json(m.fdr, c.fp, c.fp + c.tp);
  j["fnr"] = metric_value_json(m.fnr, c.fn, c.fn + c.tp);
  j["for"] = metric_value_json(m.for_rate, c.fn, c.fn + c.tn);
  j["tpr"] = metric_value_json(m.tpr, c.tp, c.fn + c.tp);
  j["tnr"] = metric_value_json(m.tnr, c.tn, c.fp + c.tn);
  j["ppv"] = metric_value_json(m.ppv, c.tp, c.fp + c.tp);
  j["npv"] = metric_value_json(m.npv, c.tn, c.fn + c.tn);
  j["predicted_positive_rate"] =
      metric_value_json(m.predicted_positive_rate, c.predicted_positive(), c.total());
  j["prevalence"] = metric_value_json(m.prevalence, c.actual_positive(), c.total());
  return j;
}

ordered_json external_metric_set_json(const MetricSet& m) {
  ordered_json j;
  auto put = [&](const char* key, const MetricValue& v) {
    j[key] = v.defined() ? ordered_json(v.value()) : ordered_json(nullptr);
  };
  put("fpr", m.fpr);
  put("fdr", m.fdr);
  put("fnr", m.fnr);
  put("for", m.for_rate);
  put("tpr", m.tpr);
  put("tnr", m.tnr);
  put("ppv", m.ppv);
  put("npv", m.npv);
  put("predicted_positive_rate", m.predicted_positive_rate);
  put("prevalence", m.prevalence);
  return j;
}

MetricValue metric_value_from_json(const ordered_json& j, const std::string& path) {
  if (j.is_null()) return MetricValue::undefined();
  if (!j.is_number()) throw Error(path + ": expected number or null");
  return MetricValue::of(j.get<double>());
}

MetricSet external_metric_set_from_json(const ordered_json& j, const std::string& path) {
  MetricSet m;
  for (const auto& [key, value] : j.items()) {
    if (key == "schema_version") continue;
    MetricValue* target = nullptr;
    if (key == "fpr") target = &m.fpr;
    else if (key == "fdr") target = &m.fdr;
    else if (key == "fnr") target = &m.fnr;
    else if (key == "for") target = &m.for_rate;
    else if (key == "tpr") target = &m.tpr;
    else if (key == "tnr") target = &m.tnr;
    else if (key == "ppv") target = &m.ppv;
    else if (key == "npv") target = &m.npv;
    else if (key == "predicted_positive_rate") target = &m.predicted_positive_rate;
    else if (key == "prevalence") target = &m.prevalence;
    else throw Error(path + "." + key + ": unknown metric key");
    *target = metric_value_from_json(value, path + "." + key);
    if (target->defined() && (target->value() < 0.0 || target->value() > 1.0)) {
      throw Error(path + "." + key + ": value outside [0,1]");
    }
  }
  return m;
}

ordered_json config_json(const AuditConfig& config) {
  ordered_json j;
  j["tau"] = config.tau;
  j["threshold"] = config.threshold;
  j["min_group_size"] = config.min_group_size;
  ordered_json metrics = ordered_json::array();
  for (MetricId id : config.metrics) metrics.push_back(std::string(metric_id_name(id)));
  j["metrics"] = metrics;
  ordered_json ref;
  ref["kind"] = std::string(reference_kind_name(config.reference.kind));
  if (config.reference.kind == ReferenceKind::custom) {
    ref["group"] = config.reference.custom_group;
  }
  if (config.reference.kind == ReferenceKind::external_benchmark &&
      config.reference.external_metrics.has_value()) {
    ref["metrics"] = external_metric_set_json(*config.reference.external_metrics);
  }
  j["reference"] = ref;
  return j;
}

AuditConfig config_from_json(const ordered_json& j) {
  AuditConfig config;
  config.tau = j.at("tau").get<double>();
  config.threshold = j.at("threshold").get<double>();
  config.min_group_size = j.at("min_group_size").get<std::uint64_t>();
  config.metrics.clear();
  for (const auto& name : j.at("metrics")) {
    config.metrics.push_back(metric_id_from_name(name.get<std::string>()));
  }
  const auto& ref = j.at("reference");
  config.reference.kind = reference_kind_from_name(ref.at("kind").get<std::string>());
  if (config.reference.kind == ReferenceKind::custom) {
    config.reference.custom_group = ref.at("group").get<std::string>();
  }
  if (config.reference.kind == ReferenceKind::external_benchmark) {
    config.reference.external_metrics =
        external_metric_set_from_json(ref.at("metrics"), "config.reference.metrics");
  }
  return config;
}

ordered_json report_json(const AuditReport& report) {
  ordered_json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["report_type"] = "audit";
  j["engine_version"] = report.engine_version;
  j["generated_at"] = report.generated_at;
  j["dataset_size"] = report.dataset_size;
  j["config"] = config_json(report.config);
  j["overall_verdict"] = std::string(verdict_name(report.overall_verdict));

  ordered_json attributes = ordered_json::array();
  for (const AttributeAudit& entry : report.attributes) {
    ordered_json a;
    a["attribute"] = entry.attribute;
    a["reference"] = entry.reference_label;

    ordered_json groups = ordered_json::array();
    std::uint64_t pp_total = 0;
    for (const GroupStats& g : entry.groups) pp_total += g.counts.predicted_positive();
    for (const GroupStats& g : entry.groups) {
      ordered_json gj;
      gj["group"] = g.group_value;
      gj["n"] = g.n;
      gj["small_sample"] = g.n < report.config.min_group_size;
      ordered_json counts;
      counts["tp"] = g.counts.tp;
      counts["fp"] = g.counts.fp;
      counts["tn"] = g.counts.tn;
      counts["fn"] = g.counts.fn;
      gj["counts"] = counts;
      gj["metrics"] = metric_set_json(g.metrics, g.counts);
      gj["share_of_predicted_positives"] = metric_value_json(
          g.group_share_of_predicted_positives, g.counts.predicted_positive(), pp_total);
      groups.push_back(std::move(gj));
    }
    a["groups"] = groups;

    ordered_json records = ordered_json::array();
    for (const DisparityRecord& rec : entry.records) {
      ordered_json rj;
      rj["metric"] = rec.metric_name;
      rj["group"] = rec.group_value;
      rj["group_metric"] = optional_number_json(rec.group_metric.defined(),
                                                rec.group_metric.value_or(0.0));
      rj["reference_metric"] = optional_number_json(rec.reference_metric.defined(),
                                                    rec.reference_metric.value_or(0.0));
      rj["measure"] =
          rec.measure.defined() ? ordered_json(round_sig6(rec.measure.value())) : ordered_json(nullptr);
      rj["verdict"] = std::string(verdict_name(rec.verdict));
      records.push_back(std::move(rj));
    }
    a["disparities"] = records;
    attributes.push_back(std::move(a));
  }
  j["attributes"] = attributes;
  return j;
}

std::string render_markdown(const AuditReport& report) {
  std::ostringstream out;
  out << "# Group fairness audit\n\n";
  out << "- generated: " << report.generated_at << "\n";
  out << "- engine: " << report.engine_version << "\n";
  out << "- dataset size: " << report.dataset_size << "\n";
  out << "- tau: " << format_sig6(report.config.tau) << "\n";
  out << "- threshold: " << format_sig6(report.config.threshold) << "\n";
  out << "- metrics:";
  for (std::size_t i = 0; i < report.config.metrics.size(); ++i) {
    out << (i == 0 ? " " : ", ") << metric_id_name(report.config.metrics[i]);
  }
  out << "\n";
  out << "- reference strategy: " << reference_kind_name(report.config.reference.kind);
  if (report.config.reference.kind == ReferenceKind::custom) {
    out << " (" << report.config.reference.custom_group << ")";
  }
  out << "\n";
  out << "- overall verdict: **" << verdict_name(report.overall_verdict) << "**\n";

  for (const AttributeAudit& entry : report.attributes) {
    out << "\n## Attribute: " << entry.attribute << "\n\n";
    out << "Reference: " << entry.reference_label << "\n\n";
    out << "| group | n | metric | value | disparity | verdict |\n";
    out << "|-------|--:|--------|------:|----------:|---------|\n";

    std::unordered_map<std::string_view, const GroupStats*> by_value;
    for (const GroupStats& g : entry.groups) by_value[g.group_value] = &g;
    for (const DisparityRecord& rec : entry.records) {
      const GroupStats* g = by_value.at(rec.group_value);
      out << "| " << rec.group_value;
      if (rec.verdict == Verdict::reference) out << " (reference)";
      out << " | " << g->n << " | " << rec.metric_name << " | "
          << (rec.group_metric.defined() ? format_sig6(rec.group_metric.value()) : "n/a") << " | "
          << (rec.measure.defined() ? format_sig6(rec.measure.value()) : "n/a") << " | "
          << verdict_name(rec.verdict) << " |\n";
    }

    std::string small;
    for (const GroupStats& g : entry.groups) {
      if (g.n < report.config.min_group_size) {
        if (!small.empty()) small += ", ";
        small += g.group_value;
      }
    }
    out << "\nSmall-sample groups (n < " << report.config.min_group_size
        << "): " << (small.empty() ? "none" : small) << "\n";
  }
  return out.str();
}

std::string render_csv_tables(const AuditReport& report) {
  std::ostringstream out;
  out << "attribute,group,n,metric,group_metric,reference_metric,measure,verdict,small_sample\n";
  for (const AttributeAudit& entry : report.attributes) {
    std::unordered_map<std::string_view, const GroupStats*> by_value;
    for (const GroupStats& g : entry.groups) by_value[g.group_value] = &g;
    for (const DisparityRecord& rec : entry.records) {
      const GroupStats* g = by_value.at(rec.group_value);
      out << csv_escape(entry.attribute) << ',' << csv_escape(rec.group_value) << ',' << g->n
          << ',' << rec.metric_name << ','
          << (rec.group_metric.defined() ? format_sig6(rec.group_metric.value()) : "") << ','
          << (rec.reference_metric.defined() ? format_sig6(rec.reference_metric.value()) : "")
          << ',' << (rec.measure.defined() ? format_sig6(rec.measure.value()) : "") << ','
          << verdict_name(rec.verdict) << ','
          << (g->n < report.config.min_group_size ? "true" : "false") << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Rational <-> JSON

bool rational_round_trips_as_number(const Rational& r) {
  try {
    return Rational::from_double(r.to_double()) == r;
  } catch (const std::exception&) {
    return false;
  }
}

ordered_json rational_json(const Rational& r) {
  if (r.is_integer()) return ordered_json(r.numerator());
  if (rational_round_trips_as_number(r)) return ordered_json(r.to_double());
  return ordered_json(r.to_string());
}

Rational rational_from_json(const ordered_json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return Rational::from_double(j.get<double>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw Error(path + ": " + e.what());
  }
  throw Error(path + ": expected number or rational string, got " + std::string(j.type_name()));
}

ordered_json rational_pair_json(const Rational& r) {
  ordered_json j;
  j["decimal"] = round_sig6(r.to_double());
  j["exact"] = r.to_string();
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset CSV

ReportFormat report_format_from_name(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "csv") return ReportFormat::csv_tables;
  throw Error("unknown format '" + std::string(name) + "' (expected json, markdown, or csv)");
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
  const std::string text = read_file(path);
  if (text.empty()) throw Error(path.string() + ": empty file");

  std::vector<std::string> named = {schema.id_column, schema.score_column, schema.label_column};
  named.insert(named.end(), schema.attribute_columns.begin(), schema.attribute_columns.end());
  std::unordered_set<std::string> distinct(named.begin(), named.end());
  if (distinct.size() != named.size()) throw Error("schema columns must be distinct");

  const CsvTable table = parse_csv(text);
  if (table.header.empty()) throw Error(path.string() + ": empty file");

  std::unordered_map<std::string, std::size_t> column_index;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string& name = table.header[i];
    if (column_index.contains(name) && distinct.contains(name)) {
      throw Error("duplicate column '" + name + "' in header");
    }
    column_index.emplace(name, i);
  }
  auto require_column = [&](const std::string& name) {
    const auto it = column_index.find(name);
    if (it == column_index.end()) throw Error("missing required column '" + name + "'");
    return it->second;
  };
  const std::size_t id_idx = require_column(schema.id_column);
  const std::size_t score_idx = require_column(schema.score_column);
  const std::size_t label_idx = require_column(schema.label_column);

  std::vector<std::pair<std::string, std::size_t>> attribute_columns;
  if (schema.attribute_columns.empty()) {
    std::unordered_set<std::string> seen_attrs;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (i == id_idx || i == score_idx || i == label_idx) continue;
      if (!seen_attrs.insert(table.header[i]).second) {
        throw Error("duplicate column '" + table.header[i] + "' in header");
      }
      attribute_columns.emplace_back(table.header[i], i);
    }
  } else {
    for (const std::string& name : schema.attribute_columns) {
      attribute_columns.emplace_back(name, require_column(name));
    }
  }

  Dataset dataset;
  for (const auto& [name, idx] : attribute_columns) dataset.attribute_names.push_back(name);
  dataset.records.reserve(table.rows.size());

  std::unordered_set<std::string> seen_ids;
  seen_ids.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::vector<std::string>& row = table.rows[r];
    const std::string row_label = "row " + std::to_string(r + 2);  // header is row 1
    if (row.size() != table.header.size()) {
      throw Error(row_label + ": expected " + std::to_string(table.header.size()) +
                  " fields, got " + std::to_string(row.size()));
    }

    Record record;
    record.entity_id = row[id_idx];
    if (record.entity_id.empty()) {
      throw Error(row_label + ", column '" + schema.id_column + "': empty entity id");
    }
    if (!seen_ids.insert(record.entity_id).second) {
      throw Error(row_label + ": duplicate entity_id '" + record.entity_id + "'");
    }

    const std::string& score_text = row[score_idx];
    double score = 0.0;
    const auto [ptr, ec] =
        std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (ec != std::errc{} || ptr != score_text.data() + score_text.size()) {
      throw Error(row_label + ", column '" + schema.score_column + "': cannot parse '" +
                  score_text + "' as a decimal");
    }
    if (score < 0.0 || score > 1.0) {
      throw Error(row_label + ", column '" + schema.score_column + "': value '" + score_text +
                  "' outside [0,1]");
    }
    record.score = score;

    const std::string label_text = ascii_lower(row[label_idx]);
    if (label_text == "1" || label_text == "true") {
      record.label = true;
    } else if (label_text == "0" || label_text == "false") {
      record.label = false;
    } else {
      throw Error(row_label + ", column '" + schema.label_column + "': cannot parse '" +
                  row[label_idx] + "' as a binary label");
    }

    for (const auto& [name, idx] : attribute_columns) {
      record.attributes.emplace(name, row[idx]);
    }
    dataset.records.push_back(std::move(record));
  }
  return dataset;
}

std::string dataset_to_csv(const Dataset& dataset, const DatasetSchema& schema) {
  std::ostringstream out;
  out << csv_escape(schema.id_column) << ',' << csv_escape(schema.score_column) << ','
      << csv_escape(schema.label_column);
  for (const std::string& name : dataset.attribute_names) out << ',' << csv_escape(name);
  out << '\n';
  for (const Record& r : dataset.records) {
    out << csv_escape(r.entity_id) << ',' << format_shortest(r.score) << ','
        << (r.label ? '1' : '0');
    for (const std::string& name : dataset.attribute_names) {
      out << ',' << csv_escape(r.attributes.at(name));
    }
    out << '\n';
  }
  return out.str();
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path,
                   const DatasetSchema& schema) {
  write_file(path, dataset_to_csv(dataset, schema));
}

// ---------------------------------------------------------------------------
// Audit report

ReportDocument emit_report(const AuditReport& report, ReportFormat format) {
  ReportDocument doc;
  doc.format = format;
  switch (format) {
    case ReportFormat::json:
      doc.payload = report_json(report).dump(2) + "\n";
      break;
    case ReportFormat::markdown:
      doc.payload = render_markdown(report);
      break;
    case ReportFormat::csv_tables:
      doc.payload = render_csv_tables(report);
      break;
  }
  return doc;
}

AuditReport parse_report_json(const std::string& payload) {
  ordered_json j;
  try {
    j = ordered_json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("report JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<std::string>() != kSchemaVersion) {
      throw Error("report JSON: unsupported schema_version");
    }
    AuditReport report;
    report.engine_version = j.at("engine_version").get<std::string>();
    report.generated_at = j.at("generated_at").get<std::string>();
    report.dataset_size = j.at("dataset_size").get<std::uint64_t>();
    report.config = config_from_json(j.at("config"));
    report.overall_verdict = verdict_from_name(j.at("overall_verdict").get<std::string>());

    for (const auto& a : j.at("attributes")) {
      AttributeAudit entry;
      entry.attribute = a.at("attribute").get<std::string>();
      entry.reference_label = a.at("reference").get<std::string>();

      std::uint64_t pp_total = 0;
      for (const auto& gj : a.at("groups")) {
        const auto& counts = gj.at("counts");
        GroupStats g;
        g.attribute_name = entry.attribute;
        g.group_value = gj.at("group").get<std::string>();
        g.counts.tp = counts.at("tp").get<std::uint64_t>();
        g.counts.fp = counts.at("fp").get<std::uint64_t>();
        g.counts.tn = counts.at("tn").get<std::uint64_t>();
        g.counts.fn = counts.at("fn").get<std::uint64_t>();
        g.n = gj.at("n").get<std::uint64_t>();
        g.metrics = metric_set(g.counts);
        pp_total += g.counts.predicted_positive();
        entry.groups.push_back(std::move(g));
      }
      for (GroupStats& g : entry.groups) {
        g.group_share_of_predicted_positives =
            MetricValue::ratio(g.counts.predicted_positive(), pp_total);
      }

      for (const auto& rj : a.at("disparities")) {
        DisparityRecord rec;
        rec.metric_name = rj.at("metric").get<std::string>();
        rec.attribute_name = entry.attribute;
        rec.group_value = rj.at("group").get<std::string>();
        rec.group_metric = metric_value_from_json(rj.at("group_metric"), "group_metric");
        rec.reference_metric =
            metric_value_from_json(rj.at("reference_metric"), "reference_metric");
        const auto& measure = rj.at("measure");
        rec.measure = measure.is_null() ? DisparityMeasure::undefined()
                                        : DisparityMeasure::of(measure.get<double>());
        rec.verdict = verdict_from_name(rj.at("verdict").get<std::string>());
        entry.records.push_back(std::move(rec));
      }
      report.attributes.push_back(std::move(entry));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("report JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Scenario JSON

std::string scenario_to_json(const ScenarioSpec& scenario) {
  ordered_json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["name"] = scenario.name;
  j["attribute_name"] = scenario.attribute_name;
  j["base_sensitivity"] = rational_json(scenario.base_sensitivity);
  j["base_specificity"] = rational_json(scenario.base_specificity);
  ordered_json groups = ordered_json::array();
  for (const GroupSpec& g : scenario.groups) {
    ordered_json gj;
    gj["name"] = g.name;
    gj["population"] = g.population;
    gj["prevalence"] = rational_json(g.prevalence);
    gj["fnr_ratio"] = rational_json(g.fnr_ratio);
    gj["fpr_ratio"] = rational_json(g.fpr_ratio);
    groups.push_back(std::move(gj));
  }
  j["groups"] = groups;
  if (!scenario.notes.empty()) j["notes"] = scenario.notes;
  return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("scenario JSON: ") + e.what());
  }

  auto require = [&](const char* key) -> const ordered_json& {
    if (!j.contains(key)) throw Error(std::string("scenario JSON: missing field '") + key + "'");
    return j.at(key);
  };

  ScenarioSpec scenario;
  const auto& version = require("schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion) {
    throw Error("scenario JSON: schema_version must be \"1\"");
  }
  if (!require("name").is_string()) throw Error("scenario JSON: name must be a string");
  scenario.name = j.at("name").get<std::string>();
  if (!require("attribute_name").is_string()) {
    throw Error("scenario JSON: attribute_name must be a string");
  }
  scenario.attribute_name = j.at("attribute_name").get<std::string>();
  scenario.base_sensitivity = rational_from_json(require("base_sensitivity"), "base_sensitivity");
  scenario.base_specificity = rational_from_json(require("base_specificity"), "base_specificity");

  const auto& groups = require("groups");
  if (!groups.is_array() || groups.empty()) {
    throw Error("scenario JSON: groups must be a non-empty array");
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& gj = groups[i];
    const std::string path = "groups[" + std::to_string(i) + "]";
    if (!gj.is_object()) throw Error("scenario JSON: " + path + " must be an object");
    GroupSpec g;
    if (!gj.contains("name") || !gj.at("name").is_string()) {
      throw Error("scenario JSON: " + path + ".name must be a string");
    }
    g.name = gj.at("name").get<std::string>();
    if (!gj.contains("population") || !gj.at("population").is_number_integer()) {
      throw Error("scenario JSON: " + path + ".population must be an integer");
    }
    g.population = gj.at("population").get<std::int64_t>();
    if (!gj.contains("prevalence")) {
      throw Error("scenario JSON: " + path + ".prevalence is required");
    }
    g.prevalence = rational_from_json(gj.at("prevalence"), path + ".prevalence");
    if (gj.contains("fnr_ratio")) g.fnr_ratio = rational_from_json(gj.at("fnr_ratio"), path + ".fnr_ratio");
    if (gj.contains("fpr_ratio")) g.fpr_ratio = rational_from_json(gj.at("fpr_ratio"), path + ".fpr_ratio");
    scenario.groups.push_back(std::move(g));
  }
  if (j.contains("notes")) {
    for (const auto& note : j.at("notes")) scenario.notes.push_back(note.get<std::string>());
  }

  validate_scenario(scenario);
  return scenario;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_file(path));
}

MetricSet external_metrics_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("external metrics JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("external metrics JSON: expected an object");
  return external_metric_set_from_json(j, "external");
}

MetricSet load_external_metrics(const std::filesystem::path& path) {
  return external_metrics_from_json(read_file(path));
}

// ---------------------------------------------------------------------------
// Expected-value scenario report

ReportDocument emit_expected_report(const ScenarioSpec& scenario,
                                    const std::vector<ExpectedOutcome>& outcomes,
                                    ReportFormat format) {
  ReportDocument doc;
  doc.format = format;

  if (format == ReportFormat::json) {
    ordered_json j;
    j["schema_version"] = std::string(kSchemaVersion);
    j["report_type"] = "expected_outcomes";
    j["engine_version"] = std::string(kEngineVersion);
    j["scenario"] = scenario.name;
    j["attribute"] = scenario.attribute_name;
    j["base_sensitivity"] = rational_pair_json(scenario.base_sensitivity);
    j["base_specificity"] = rational_pair_json(scenario.base_specificity);
    ordered_json groups = ordered_json::array();
    for (const ExpectedOutcome& o : outcomes) {
      ordered_json gj;
      gj["name"] = o.group;
      gj["population"] = o.population;
      gj["effective_sensitivity"] = rational_pair_json(o.rates.sensitivity);
      gj["effective_fpr"] = rational_pair_json(o.rates.fpr);
      ordered_json expected;
      expected["cases"] = rational_pair_json(o.cases);
      expected["tp"] = rational_pair_json(o.tp);
      expected["fn"] = rational_pair_json(o.fn);
      expected["fp"] = rational_pair_json(o.fp);
      expected["tn"] = rational_pair_json(o.tn);
      gj["expected"] = expected;
      ordered_json rounded;
      rounded["cases"] = o.cases_rounded;
      rounded["tp"] = o.tp_rounded;
      rounded["fn"] = o.fn_rounded;
      rounded["fp"] = o.fp_rounded;
      rounded["tn"] = o.tn_rounded;
      gj["rounded"] = rounded;
      groups.push_back(std::move(gj));
    }
    j["groups"] = groups;
    j["notes"] = scenario.notes;
    doc.payload = j.dump(2) + "\n";
    return doc;
  }

  if (format == ReportFormat::csv_tables) {
    std::ostringstream out;
    out << "group,population,effective_sensitivity,effective_fpr,"
           "cases,tp,fn,fp,tn,cases_exact,tp_exact,fn_exact,fp_exact,tn_exact\n";
    for (const ExpectedOutcome& o : outcomes) {
      out << csv_escape(o.group) << ',' << o.population << ','
          << o.rates.sensitivity.to_string() << ',' << o.rates.fpr.to_string() << ','
          << o.cases_rounded << ',' << o.tp_rounded << ',' << o.fn_rounded << ','
          << o.fp_rounded << ',' << o.tn_rounded << ',' << o.cases.to_string() << ','
          << o.tp.to_string() << ',' << o.fn.to_string() << ',' << o.fp.to_string() << ','
          << o.tn.to_string() << '\n';
    }
    doc.payload = out.str();
    return doc;
  }

  std::ostringstream out;
  out << "# Scenario: " << scenario.name << "\n\n";
  out << "- attribute: " << scenario.attribute_name << "\n";
  out << "- base sensitivity: " << scenario.base_sensitivity.to_string() << "\n";
  out << "- base specificity: " << scenario.base_specificity.to_string() << "\n";
  out << "- engine: " << kEngineVersion << "\n\n";
  out << "Counts are rounded half away from zero; the exact expectation follows in "
         "parentheses when it differs.\n\n";
  out << "| group | population | eff. sensitivity | eff. FPR | cases | TP | FN | FP | TN |\n";
  out << "|-------|-----------:|-----------------:|---------:|------:|---:|---:|---:|---:|\n";
  auto cell = [](std::int64_t rounded, const Rational& exact) {
    std::string s = std::to_string(rounded);
    if (!exact.is_integer() || exact.numerator() != rounded) {
      s += " (" + exact.to_string() + ")";
    }
    return s;
  };
  for (const ExpectedOutcome& o : outcomes) {
    out << "| " << o.group << " | " << o.population << " | "
        << o.rates.sensitivity.to_string() << " | " << o.rates.fpr.to_string() << " | "
        << cell(o.cases_rounded, o.cases) << " | " << cell(o.tp_rounded, o.tp) << " | "
        << cell(o.fn_rounded, o.fn) << " | " << cell(o.fp_rounded, o.fp) << " | "
        << cell(o.tn_rounded, o.tn) << " |\n";
  }
  if (!scenario.notes.empty()) {
    out << "\nNotes:\n";
    for (const std::string& note : scenario.notes) out << "- " << note << "\n";
  }
  doc.payload = out.str();
  return doc;
}

}  // namespace fairaudit
