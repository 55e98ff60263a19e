#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qba/commands.hpp"

using namespace qba;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// The correlator table plus everything after it; identical for a simulate
// run and an analyze pass over its record file.
std::string table_onward(const std::string& report) {
  const auto pos = report.find("key       ");
  REQUIRE(pos != std::string::npos);
  return report.substr(pos);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QBA_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("simulate accepts an honest run and flags the attacked one") {
  RunConfig cfg;
  cfg.rounds = 200000;
  cfg.seed = 1;
  const auto honest = cmd_simulate(cfg);
  CHECK(honest.exit_code == kExitAccept);
  CHECK(contains(honest.report, "VERDICT=ACCEPT"));

  cfg.attack = AttackCase::I;
  const auto attacked = cmd_simulate(cfg);
  CHECK(attacked.exit_code == kExitAbort);
  CHECK(contains(attacked.report, "VERDICT=ABORT"));
  CHECK(contains(attacked.report, "violation: (c,d,X)"));
}

TEST_CASE("simulate rejects an impossible configuration") {
  RunConfig cfg;
  cfg.rounds = 0;
  const auto res = cmd_simulate(cfg);
  CHECK(res.exit_code == kExitConfig);
  CHECK(contains(res.report, "error"));
}

TEST_CASE("simulate is byte-deterministic for a fixed seed") {
  const auto records_path = temp_file("qba_cli_records.jsonl");
  const auto report_path = temp_file("qba_cli_report.txt");
  RunConfig cfg;
  cfg.rounds = 5000;
  cfg.seed = 42;
  cfg.records_path = records_path.string();
  cfg.report_path = report_path.string();

  const auto first = cmd_simulate(cfg);
  const std::string records_first = slurp(records_path);
  const std::string report_first = slurp(report_path);
  const auto second = cmd_simulate(cfg);
  CHECK(first.exit_code == second.exit_code);
  CHECK(first.report == second.report);
  CHECK(slurp(records_path) == records_first);
  CHECK(slurp(report_path) == report_first);
  CHECK(report_first == first.report);
  fs::remove(records_path);
  fs::remove(report_path);
}

TEST_CASE("simulate reports unwritable paths as config errors") {
  RunConfig cfg;
  cfg.rounds = 100;
  cfg.records_path = "/nonexistent-dir/records.jsonl";
  const auto res = cmd_simulate(cfg);
  CHECK(res.exit_code == kExitConfig);
  CHECK(contains(res.report, "error"));
}

TEST_CASE("analyze reproduces the verdict of the run that wrote the file") {
  const auto records_path = temp_file("qba_cli_roundtrip.jsonl");
  RunConfig cfg;
  cfg.rounds = 100000;
  cfg.seed = 7;
  cfg.records_path = records_path.string();
  const auto sim = cmd_simulate(cfg);
  REQUIRE(sim.exit_code == kExitAccept);

  const auto ana = cmd_analyze(records_path.string(), cfg);
  CHECK(ana.exit_code == kExitAccept);
  CHECK(table_onward(ana.report) == table_onward(sim.report));

  // Attacked records abort on re-analysis too.
  RunConfig attack_cfg = cfg;
  attack_cfg.attack = AttackCase::II;
  attack_cfg.policy = AttackBasisPolicy::always_x();
  REQUIRE(cmd_simulate(attack_cfg).exit_code == kExitAbort);
  const auto ana2 = cmd_analyze(records_path.string(), attack_cfg);
  CHECK(ana2.exit_code == kExitAbort);
  CHECK(contains(ana2.report, "violation: (a,b,Z)"));
  fs::remove(records_path);
}

TEST_CASE("analyze reports truncation as insufficient data") {
  const auto records_path = temp_file("qba_cli_truncated.jsonl");
  RunConfig cfg;
  cfg.rounds = 400;  // far below 200 samples per key
  cfg.seed = 3;
  cfg.records_path = records_path.string();
  REQUIRE(cmd_simulate(cfg).exit_code == kExitInsufficient);
  const auto res = cmd_analyze(records_path.string(), cfg);
  CHECK(res.exit_code == kExitInsufficient);
  CHECK(contains(res.report, "VERDICT=INSUFFICIENT"));
  fs::remove(records_path);
}

TEST_CASE("analyze pins parse failures to their line") {
  const auto records_path = temp_file("qba_cli_malformed.jsonl");
  RunConfig cfg;
  cfg.rounds = 300;
  cfg.records_path = records_path.string();
  REQUIRE(cmd_simulate(cfg).exit_code != kExitConfig);
  {
    std::ofstream out(records_path, std::ios::app | std::ios::binary);
    out << "durr\n";
  }
  const auto res = cmd_analyze(records_path.string(), cfg);
  CHECK(res.exit_code == kExitConfig);
  CHECK(contains(res.report, "line 301"));
  fs::remove(records_path);
}

TEST_CASE("table1 re-analysis accepts the reference data") {
  const auto res = cmd_table1();
  CHECK(res.exit_code == kExitAccept);
  CHECK(contains(res.report, "VERDICT=ACCEPT"));
  CHECK(contains(res.report, "0.326 ± 0.024"));
  CHECK(contains(res.report, "max_z=3.079 at (a,c,X)"));
  int rows = 0;
  std::stringstream ss(res.report);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("(", 0) == 0) ++rows;
  }
  CHECK(rows == 12);
}

TEST_CASE("protocol runs end to end") {
  RunConfig cfg;
  cfg.rounds = 100000;
  cfg.seed = 5;
  cfg.order = 1;

  SUBCASE("honest parties agree") {
    const auto res = cmd_protocol(cfg);
    CHECK(res.exit_code == kExitAccept);
    CHECK(contains(res.report, "outcome A: Agree(1)"));
    CHECK(contains(res.report, "outcome B: Agree(1)"));
    CHECK(contains(res.report, "outcome C: Agree(1)"));
  }

  SUBCASE("an equivocating commander is named by both receivers") {
    cfg.traitor = Party::A;
    const auto res = cmd_protocol(cfg);
    CHECK(res.exit_code == kExitTraitor);
    CHECK(contains(res.report, "outcome B: TraitorDetected(A)"));
    CHECK(contains(res.report, "outcome C: TraitorDetected(A)"));
  }

  SUBCASE("a forging receiver is named by the loyal receiver") {
    cfg.traitor = Party::B;
    const auto res = cmd_protocol(cfg);
    CHECK(res.exit_code == kExitTraitor);
    CHECK(contains(res.report, "outcome C: TraitorDetected(B)"));
  }

  SUBCASE("a quantum attack dies at verification") {
    cfg.traitor = Party::B;
    cfg.attack = AttackCase::III;
    cfg.strategy = TraitorStrategy::ForgeWithStolenList;
    const auto res = cmd_protocol(cfg);
    CHECK(res.exit_code == kExitAbort);
    CHECK(contains(res.report, "VERDICT=ABORT"));
    CHECK(contains(res.report, "outcome A: AbortedAtVerification"));
    CHECK(contains(res.report, "outcome C: AbortedAtVerification"));
  }
}

TEST_CASE("protocol rejects inconsistent scenarios") {
  RunConfig cfg;
  cfg.rounds = 1000;

  cfg.attack = AttackCase::II;  // an attack with no traitor configured
  CHECK(cmd_protocol(cfg).exit_code == kExitConfig);

  cfg.attack = AttackCase::I;  // case I belongs to A, not B
  cfg.traitor = Party::B;
  CHECK(cmd_protocol(cfg).exit_code == kExitConfig);

  cfg.attack = AttackCase::None;  // stolen-list forgery needs case III
  cfg.traitor = Party::B;
  cfg.strategy = TraitorStrategy::ForgeWithStolenList;
  CHECK(cmd_protocol(cfg).exit_code == kExitConfig);

  cfg.strategy = TraitorStrategy::EquivocateOrders;  // receiver cannot
  CHECK(cmd_protocol(cfg).exit_code == kExitConfig);
}

TEST_CASE("the binary honors the exit-code contract") {
  CHECK(run_cli("table1") == kExitAccept);
  CHECK(run_cli("simulate --rounds 0") == kExitConfig);
  CHECK(run_cli("nonsense") == kExitConfig);

  const auto records = temp_file("qba_bin_records.jsonl");
  CHECK(run_cli("simulate --rounds 60000 --seed 2 --attack i "
                "--attack-basis x --records " +
                records.string()) == kExitAbort);
  CHECK(run_cli("analyze --records " + records.string()) == kExitAbort);
  fs::remove(records);
}

TEST_CASE("config files feed flags and the command line wins") {
  const auto config_path = temp_file("qba_bin_config.ini");
  const auto report_path = temp_file("qba_bin_report.txt");
  {
    std::ofstream out(config_path);
    out << "rounds=444\n";
    out << "seed=9\n";
    out << "attack=i\n";
  }
  const int code = run_cli("simulate --config " + config_path.string() +
                           " --rounds 555 --report " + report_path.string());
  CHECK(code == kExitInsufficient);  // 555 rounds cannot fill any key
  const std::string report = slurp(report_path);
  CHECK(contains(report, "rounds=555"));
  CHECK(contains(report, "seed=9"));
  CHECK(contains(report, "attack=i"));
  fs::remove(config_path);
  fs::remove(report_path);
}
