#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace branchstab {

/// Outcome of one scenario run: the machine-readable report, CSV sample
/// dumps (filename -> contents) and the process exit code to use
/// (0 pass, 1 statistical failure).
struct ScenarioResult {
  nlohmann::ordered_json report;
  std::vector<std::pair<std::string, std::string>> csv_files;
  int exit_code = 0;
};

/// Runs the named scenario from the registry.  Throws
/// std::invalid_argument for unknown scenarios or invalid configs and
/// std::runtime_error for numerical-tolerance failures.  The report bytes
/// depend only on (config, seed), never on the worker count.
ScenarioResult run_scenario(const nlohmann::json& config, int workers);

/// (name, one-line description) for every registered scenario, in stable
/// order.
std::vector<std::pair<std::string, std::string>> list_scenarios();

/// Canonical serialisation used for report files and replay comparison.
std::string report_to_string(const nlohmann::ordered_json& report);

}  // namespace branchstab
