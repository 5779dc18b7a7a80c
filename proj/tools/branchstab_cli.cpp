// Scenario runner: configured, seeded verification experiments with
// machine-readable reports.
//
// Exit codes: 0 pass, 1 statistical failure, 2 configuration error,
// 3 numerical-tolerance error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "branchstab/scenarios.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitStatFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
}

int default_workers() {
  if (const char* env = std::getenv("BRANCHSTAB_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branching-stability scenario runner"};
  std::string config_path, out_dir = ".", replay_path;
  bool list = false;
  bool seed_given = false;
  std::uint64_t seed = 0;
  int workers = default_workers();
  app.add_option("--config", config_path, "scenario config JSON file");
  app.add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    seed_given = true;
  });
  app.add_option("--out", out_dir, "output directory for reports and CSV");
  app.add_option("--workers", workers, "worker thread count")
      ->check(CLI::PositiveNumber);
  app.add_flag("--list", list, "list registered scenarios");
  app.add_option("--replay", replay_path,
                 "rerun a report's embedded config and compare byte-for-byte");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (list) {
      for (const auto& [name, desc] : branchstab::list_scenarios())
        std::cout << name << ": " << desc << "\n";
      return kExitPass;
    }

    if (!replay_path.empty()) {
      const nlohmann::json old = nlohmann::json::parse(read_file(replay_path));
      if (!old.contains("config"))
        throw std::invalid_argument("report has no embedded config");
      const branchstab::ScenarioResult res =
          branchstab::run_scenario(old.at("config"), workers);
      const std::string fresh = branchstab::report_to_string(res.report);
      std::string original = read_file(replay_path);
      if (fresh == original) {
        std::cout << "replay OK: report reproduced byte-for-byte\n";
        return kExitPass;
      }
      std::cerr << "replay MISMATCH: regenerated report differs\n";
      return kExitStatFail;
    }

    if (config_path.empty())
      throw std::invalid_argument("--config (or --list/--replay) is required");
    nlohmann::json config = nlohmann::json::parse(read_file(config_path));
    if (seed_given) config["seed"] = seed;

    const branchstab::ScenarioResult res =
        branchstab::run_scenario(config, workers);
    std::filesystem::create_directories(out_dir);
    const std::string name = config.at("scenario").get<std::string>();
    write_file(std::filesystem::path(out_dir) / (name + "-report.json"),
               branchstab::report_to_string(res.report));
    for (const auto& [file, data] : res.csv_files)
      write_file(std::filesystem::path(out_dir) / (name + "-" + file), data);
    std::cout << branchstab::report_to_string(res.report);
    return res.exit_code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
