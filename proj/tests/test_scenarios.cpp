#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "branchstab/scenarios.hpp"

using namespace branchstab;
using nlohmann::json;

TEST_CASE("scenario registry") {
  const auto list = list_scenarios();
  CHECK(list.size() == 9);
  bool has_cox = false, has_probe = false;
  for (const auto& [name, desc] : list) {
    CHECK_FALSE(desc.empty());
    has_cox = has_cox || name == "cox-coupling";
    has_probe = has_probe || name == "dt-levy-probe";
  }
  CHECK(has_cox);
  CHECK(has_probe);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(run_scenario(json::parse("{}"), 1), std::invalid_argument);
  CHECK_THROWS_AS(run_scenario(json{{"scenario", "no-such-thing"}}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      run_scenario(json{{"scenario", "fstable-rv"}, {"alpha", 1.7}}, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      run_scenario(
          json{{"scenario", "semigroup-validate"}, {"kind", "Mystery"}}, 1),
      std::invalid_argument);
}

TEST_CASE("semigroup validation scenario passes on the closed forms") {
  for (const char* kind : {"PureDeath", "LinearBirthDeath"}) {
    const ScenarioResult r = run_scenario(
        json{{"scenario", "semigroup-validate"}, {"kind", kind}, {"seed", 5}},
        2);
    CHECK(r.exit_code == 0);
    CHECK(r.report.at("pass").get<bool>());
    CHECK(r.report.at("gated").get<bool>());
    CHECK(r.report.at("schema_version").get<int>() == 1);
    CHECK(r.report.at("config").at("scenario").get<std::string>() ==
          "semigroup-validate");
    CHECK(r.report.at("config").at("sg").at("kind").get<std::string>() == kind);
  }
}

TEST_CASE("count stability scenario: pass and corrupted control") {
  json cfg{{"scenario", "fstable-rv"}, {"kind", "PureDeath"}, {"alpha", 0.5},
           {"c", 1.0},   {"N", 30000},          {"seed", 11},
           {"t_grid", json::array({0.5})}};
  const ScenarioResult ok = run_scenario(cfg, 4);
  CHECK(ok.exit_code == 0);
  CHECK(ok.report.at("pass").get<bool>());
  CHECK_FALSE(ok.csv_files.empty());
  CHECK(ok.csv_files[0].second.rfind("# seed=11", 0) == 0);

  cfg["corrupt_alpha"] = 0.2;
  const ScenarioResult bad = run_scenario(cfg, 4);
  CHECK(bad.exit_code == 1);
  CHECK_FALSE(bad.report.at("pass").get<bool>());
}

TEST_CASE("report bytes are independent of the worker count") {
  const json cfg{{"scenario", "fstable-rv"}, {"kind", "LinearBirthDeath"},
                 {"lambda", 1.0},            {"alpha", 0.5},
                 {"N", 20000},               {"seed", 3},
                 {"t_grid", json::array({0.5})}};
  const ScenarioResult a = run_scenario(cfg, 1);
  const ScenarioResult b = run_scenario(cfg, 4);
  CHECK(report_to_string(a.report) == report_to_string(b.report));
  REQUIRE(a.csv_files.size() == b.csv_files.size());
  for (std::size_t i = 0; i < a.csv_files.size(); ++i) {
    CHECK(a.csv_files[i].first == b.csv_files[i].first);
    CHECK(a.csv_files[i].second == b.csv_files[i].second);
  }
}

TEST_CASE("replay: the config echo reruns to identical bytes") {
  const json cfg{{"scenario", "cox-coupling"}, {"N", 20000}, {"seed", 7}};
  const ScenarioResult first = run_scenario(cfg, 2);
  CHECK(first.exit_code == 0);
  // Rerun from the embedded echo, as `--replay` does.
  const json echoed = json::parse(first.report.at("config").dump());
  const ScenarioResult second = run_scenario(echoed, 3);
  CHECK(report_to_string(first.report) == report_to_string(second.report));
}

TEST_CASE("diagnostic probe is never gated") {
  const ScenarioResult r = run_scenario(
      json{{"scenario", "dt-levy-probe"}, {"N", 10000}, {"seed", 9}}, 4);
  CHECK(r.exit_code == 0);
  CHECK_FALSE(r.report.at("gated").get<bool>());
  CHECK(r.report.at("reports").size() == 1);
}
