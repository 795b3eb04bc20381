#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairaudit/error.hpp"
#include "fairaudit/io.hpp"
#include "fairaudit/scenario.hpp"
#include "fairaudit/version.hpp"

namespace {

using namespace fairaudit;

constexpr int kExitParity = 0;
constexpr int kExitError = 1;
constexpr int kExitDisparity = 2;

void write_output(const std::string& payload, const std::string& destination) {
  if (destination == "-" || destination.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw Error("cannot open file for writing: " + destination);
  out << payload;
  if (!out) throw Error("write failed: " + destination);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<MetricId> parse_metric_list(const std::string& text) {
  std::vector<MetricId> metrics;
  for (const std::string& name : split_list(text)) {
    const MetricId id = metric_id_from_name(name);
    if (std::find(metrics.begin(), metrics.end(), id) == metrics.end()) metrics.push_back(id);
  }
  if (metrics.empty()) throw Error("metric list is empty");
  return metrics;
}

ReferenceStrategy parse_reference(const std::string& text) {
  if (text == "majority") return ReferenceStrategy::predominant();
  if (text == "pooled") return ReferenceStrategy::pooled();
  if (text.rfind("group:", 0) == 0) {
    const std::string name = text.substr(6);
    if (name.empty()) throw Error("reference 'group:' needs a group name");
    return ReferenceStrategy::custom(name);
  }
  if (text.rfind("external:", 0) == 0) {
    const std::string path = text.substr(9);
    if (path.empty()) throw Error("reference 'external:' needs a file path");
    return ReferenceStrategy::external(load_external_metrics(path));
  }
  throw Error("unknown reference '" + text +
              "' (expected majority, pooled, group:<name>, or external:<path>)");
}

ScenarioSpec resolve_scenario(const std::string& name_or_path) {
  const auto& builtins = builtin_scenarios();
  const auto it = builtins.find(name_or_path);
  if (it != builtins.end()) return it->second;
  if (std::filesystem::exists(name_or_path)) return load_scenario(name_or_path);
  throw Error("unknown scenario '" + name_or_path +
              "': not a builtin name and no such file (see 'scenarios' for builtins)");
}

struct AuditFlags {
  std::string tau = "0.8";
  std::string reference = "majority";
  std::string metrics = "fpr,fdr,fnr,for";
  double threshold = 0.5;
  std::string format = "markdown";
  std::string output = "-";
};

AuditConfig build_config(const AuditFlags& flags) {
  AuditConfig config;
  config.tau = std::stod(flags.tau);
  if (!(config.tau > 0.0 && config.tau <= 1.0)) {
    throw Error("tau " + flags.tau + " outside (0,1]");
  }
  config.reference = parse_reference(flags.reference);
  config.metrics = parse_metric_list(flags.metrics);
  config.threshold = flags.threshold;
  return config;
}

int run_audit_on(const Dataset& dataset, const AuditFlags& flags) {
  const AuditConfig config = build_config(flags);
  const AuditReport report = audit(dataset, config);
  const ReportDocument doc = emit_report(report, report_format_from_name(flags.format));
  write_output(doc.payload, flags.output);
  return report.overall_verdict == Verdict::parity ? kExitParity : kExitDisparity;
}

int cmd_audit(const std::string& input, const DatasetSchema& schema, const AuditFlags& flags) {
  return run_audit_on(load_dataset(input, schema), flags);
}

int cmd_simulate(const std::string& scenario_ref, const std::string& mode, std::uint64_t seed,
                 const std::string& out_path, bool chain_audit, const AuditFlags& flags) {
  const ScenarioSpec scenario = resolve_scenario(scenario_ref);
  validate_scenario(scenario);

  if (chain_audit) {
    // Audit always runs on an individual-level cohort.
    AuditFlags audit_flags = flags;
    audit_flags.output = out_path;
    return run_audit_on(generate_cohort(scenario, seed), audit_flags);
  }
  if (mode == "expected") {
    const ReportDocument doc = emit_expected_report(scenario, expected_outcomes(scenario),
                                                    report_format_from_name(flags.format));
    write_output(doc.payload, out_path);
    return kExitParity;
  }
  if (mode == "cohort") {
    const Dataset cohort = generate_cohort(scenario, seed);
    write_output(dataset_to_csv(cohort), out_path);
    return kExitParity;
  }
  throw Error("unknown mode '" + mode + "' (expected expected or cohort)");
}

int cmd_scenarios() {
  for (const auto& [name, scenario] : builtin_scenarios()) {
    std::uint64_t population = 0;
    for (const GroupSpec& g : scenario.groups) population += g.population;
    std::cout << name << " - " << scenario.groups.size() << " groups by "
              << scenario.attribute_name << ", " << population
              << " people, sensitivity " << scenario.base_sensitivity.to_string()
              << ", specificity " << scenario.base_specificity.to_string() << "\n";
  }
  return kExitParity;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairaudit: group fairness audit engine and screening-scenario simulator"};
  app.require_subcommand(1);

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "Audit a prediction dataset for group disparities");
  std::string input;
  DatasetSchema schema;
  std::string attribute_list;
  AuditFlags audit_flags;
  audit_cmd->add_option("--input", input, "Dataset CSV file")->required();
  audit_cmd->add_option("--tau", audit_flags.tau, "Disparity intolerance in (0,1]");
  audit_cmd->add_option("--reference", audit_flags.reference,
                        "majority | pooled | group:<name> | external:<path>");
  audit_cmd->add_option("--metrics", audit_flags.metrics,
                        "Comma list of fpr,fdr,fnr,for,tpr,ppv,equal_parity,proportional_parity");
  audit_cmd->add_option("--threshold", audit_flags.threshold, "Score binarization threshold")
      ->check(CLI::Range(0.0, 1.0));
  audit_cmd->add_option("--format", audit_flags.format, "json | markdown | csv");
  audit_cmd->add_option("--output", audit_flags.output, "Output path, '-' for stdout");
  audit_cmd->add_option("--id-column", schema.id_column, "Entity id column name");
  audit_cmd->add_option("--score-column", schema.score_column, "Score column name");
  audit_cmd->add_option("--label-column", schema.label_column, "Label column name");
  audit_cmd->add_option("--attributes", attribute_list,
                        "Comma list of attribute columns (default: all remaining)");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a screening scenario");
  std::string scenario_ref;
  std::string mode = "expected";
  std::uint64_t seed = 0;
  std::string out_path = "-";
  bool chain_audit = false;
  AuditFlags simulate_flags;
  simulate_cmd->add_option("--scenario", scenario_ref, "Builtin scenario name or JSON file")
      ->required();
  simulate_cmd->add_option("--mode", mode, "expected | cohort");
  simulate_cmd->add_option("--seed", seed, "Cohort generation seed");
  simulate_cmd->add_option("--out", out_path, "Output path, '-' for stdout");
  simulate_cmd->add_flag("--audit", chain_audit, "Generate a cohort and audit it");
  simulate_cmd->add_option("--tau", simulate_flags.tau, "Disparity intolerance for --audit");
  simulate_cmd->add_option("--reference", simulate_flags.reference,
                           "Reference strategy for --audit");
  simulate_cmd->add_option("--metrics", simulate_flags.metrics, "Metric list for --audit");
  simulate_cmd->add_option("--format", simulate_flags.format, "json | markdown | csv");

  // scenarios, version
  auto* scenarios_cmd = app.add_subcommand("scenarios", "List builtin scenarios");
  auto* version_cmd = app.add_subcommand("version", "Print engine version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitError;
  }

  try {
    if (audit_cmd->parsed()) {
      if (!attribute_list.empty()) schema.attribute_columns = split_list(attribute_list);
      return cmd_audit(input, schema, audit_flags);
    }
    if (simulate_cmd->parsed()) {
      return cmd_simulate(scenario_ref, mode, seed, out_path, chain_audit, simulate_flags);
    }
    if (scenarios_cmd->parsed()) return cmd_scenarios();
    if (version_cmd->parsed()) {
      std::cout << "fairaudit " << fairaudit::kEngineVersion << "\n";
      return kExitParity;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
