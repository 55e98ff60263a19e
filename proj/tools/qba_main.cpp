// qba: simulate the entanglement-backed three-party agreement protocol,
// intercept-resend attacks against it, and the correlator-based defense.
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qba/commands.hpp"

namespace {

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// key=value lines, comments with '#'. Returned in file order.
std::vector<std::pair<std::string, std::string>> load_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    const std::string text = trimmed(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config file: expected key=value, got: " +
                               text);
    }
    entries.emplace_back(trimmed(text.substr(0, eq)),
                         trimmed(text.substr(eq + 1)));
  }
  return entries;
}

// Config file keys are the long flag names. Command-line flags win: a key
// already present in argv is skipped, everything else is appended as if it
// had been typed.
std::vector<std::string> merge_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;
  std::vector<std::string> given;
  for (const auto& arg : args) {
    if (arg.rfind("--", 0) != 0) continue;
    given.push_back(arg.substr(0, arg.find('=')));
  }
  for (const auto& [key, value] : load_config_file(config_path)) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& g : given) present = present || g == flag;
    if (present) continue;
    args.push_back(flag);
    args.push_back(value);
  }
  return args;
}

void add_detector_flags(CLI::App* cmd, qba::RunConfig* cfg) {
  cmd->add_option("--threshold-sigma", cfg->detector.threshold_sigma,
                  "abort when any correlator deviates by more than this many "
                  "standard errors")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--min-samples", cfg->detector.min_samples_per_key,
                  "minimum rounds per correlator key before deciding")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_config_flag(CLI::App* cmd, std::string* config_path) {
  cmd->add_option("--config", *config_path,
                  "key=value file with the same keys as the long flags; "
                  "explicit flags win");
}

void add_simulation_flags(CLI::App* cmd, qba::RunConfig* cfg,
                          std::string* attack, std::string* attack_basis,
                          double* p_z) {
  cmd->add_option("--rounds", cfg->rounds, "number of distribution rounds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--attack", *attack, "intercept-resend attack case")
      ->check(CLI::IsMember({"none", "i", "ii", "iii"}))
      ->capture_default_str();
  cmd->add_option("--attack-basis", *attack_basis,
                  "basis policy of the attacker")
      ->check(CLI::IsMember({"z", "x", "random"}))
      ->capture_default_str();
  cmd->add_option("--p-z", *p_z,
                  "probability of measuring Z under the random policy")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--seed", cfg->seed, "base seed for all random streams")
      ->capture_default_str();
  cmd->add_option("--sample-fraction", cfg->sample_fraction,
                  "fraction of same-basis rounds spot-checked at "
                  "verification")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--records", cfg->records_path,
                  "path of the line-delimited record file to write");
  cmd->add_option("--report", cfg->report_path,
                  "write the report to this path as well as stdout");
  add_detector_flags(cmd, cfg);
}

qba::AttackCase parse_attack(const std::string& s) {
  if (s == "none") return qba::AttackCase::None;
  if (s == "i") return qba::AttackCase::I;
  if (s == "ii") return qba::AttackCase::II;
  return qba::AttackCase::III;
}

qba::AttackBasisPolicy parse_policy(const std::string& basis, double p_z) {
  if (basis == "z") return qba::AttackBasisPolicy::always_z();
  if (basis == "x") return qba::AttackBasisPolicy::always_x();
  return qba::AttackBasisPolicy::random_per_round(p_z);
}

int emit(const qba::CommandResult& result) {
  std::fputs(result.report.c_str(), stdout);
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Quantum-assisted detectable agreement: simulation, attack analysis "
      "and record re-analysis"};
  app.require_subcommand(1);

  qba::RunConfig cfg;
  std::string attack = "none";
  std::string attack_basis = "z";
  double p_z = 0.5;
  std::string traitor = "none";
  std::string strategy;
  std::string config_path;

  auto* simulate = app.add_subcommand(
      "simulate", "run distribution rounds and test the correlators");
  add_simulation_flags(simulate, &cfg, &attack, &attack_basis, &p_z);
  add_config_flag(simulate, &config_path);

  std::string records_in;
  auto* analyze = app.add_subcommand(
      "analyze", "re-analyze a record file against the exact predictions");
  analyze->add_option("--records", records_in, "record file to analyze")
      ->required();
  analyze->add_option("--report", cfg.report_path,
                      "write the report to this path as well as stdout");
  add_detector_flags(analyze, &cfg);
  add_config_flag(analyze, &config_path);

  auto* table1 = app.add_subcommand(
      "table1", "re-analyze the bundled reference correlator dataset");
  add_detector_flags(table1, &cfg);
  add_config_flag(table1, &config_path);

  auto* protocol = app.add_subcommand(
      "protocol", "run distribution, verification and the agreement phase");
  add_simulation_flags(protocol, &cfg, &attack, &attack_basis, &p_z);
  add_config_flag(protocol, &config_path);
  protocol->add_option("--order", cfg.order, "commander's order bit")
      ->check(CLI::Range(0, 1))
      ->capture_default_str();
  protocol->add_option("--traitor", traitor, "which party is the traitor")
      ->check(CLI::IsMember({"none", "a", "b", "c"}))
      ->capture_default_str();
  protocol
      ->add_option("--traitor-strategy", strategy,
                   "equivocate (commander), forge or forge-stolen (receiver)")
      ->check(CLI::IsMember({"equivocate", "forge", "forge-stolen"}));

  try {
    std::vector<std::string> args = merge_config_args(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    reversed.pop_back();  // program name
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qba::kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qba::kExitConfig;
  }

  cfg.attack = parse_attack(attack);
  try {
    cfg.policy = parse_policy(attack_basis, p_z);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qba::kExitConfig;
  }
  if (traitor != "none") {
    cfg.traitor = traitor == "a"   ? qba::Party::A
                  : traitor == "b" ? qba::Party::B
                                   : qba::Party::C;
  }
  if (!strategy.empty()) {
    cfg.strategy = strategy == "equivocate"
                       ? qba::TraitorStrategy::EquivocateOrders
                   : strategy == "forge"
                       ? qba::TraitorStrategy::ForgeReceivedOrder
                       : qba::TraitorStrategy::ForgeWithStolenList;
  }

  if (simulate->parsed()) return emit(qba::cmd_simulate(cfg));
  if (analyze->parsed()) return emit(qba::cmd_analyze(records_in, cfg));
  if (table1->parsed()) return emit(qba::cmd_table1(cfg.detector));
  return emit(qba::cmd_protocol(cfg));
}
