// Command implementations behind the CLI front end. Each command returns an
// exit code plus the full plain-text report; reports end with a
// machine-readable VERDICT=<ACCEPT|ABORT|INSUFFICIENT> trailer and are
// byte-stable for identical configurations.
#pragma once

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "qba/adversary.hpp"
#include "qba/correlators.hpp"
#include "qba/detector.hpp"
#include "qba/protocol.hpp"
#include "qba/record_io.hpp"
#include "qba/types.hpp"

namespace qba {

inline constexpr int kExitAccept = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAbort = 3;
inline constexpr int kExitInsufficient = 4;
inline constexpr int kExitTraitor = 5;

struct RunConfig {
  std::uint64_t rounds = 200000;
  AttackCase attack = AttackCase::None;
  AttackBasisPolicy policy = AttackBasisPolicy::always_z();
  std::uint64_t seed = 1;
  DetectorConfig detector{};
  double sample_fraction = 0.1;
  std::string records_path;
  std::string report_path;

  // protocol command only
  std::optional<Party> traitor;
  std::optional<TraitorStrategy> strategy;
  int order = 1;

  TraitorStrategy resolved_strategy() const {
    if (strategy) return *strategy;
    return traitor == Party::A ? TraitorStrategy::EquivocateOrders
                               : TraitorStrategy::ForgeReceivedOrder;
  }
};

inline void validate(const RunConfig& cfg) {
  if (cfg.rounds == 0) {
    throw std::invalid_argument("config: rounds must be at least 1");
  }
  if (!(cfg.sample_fraction >= 0.0 && cfg.sample_fraction <= 1.0)) {
    throw std::invalid_argument("config: sample-fraction outside [0,1]");
  }
  validate(cfg.detector);
  if (cfg.order != 0 && cfg.order != 1) {
    throw std::invalid_argument("config: order must be 0 or 1");
  }
}

// Consistency rules for protocol scenarios: the quantum attack must belong
// to the configured traitor, and the stolen-list forgery needs the attack
// that actually steals the other receiver's list.
inline void validate_protocol(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.attack != AttackCase::None) {
    if (!cfg.traitor) {
      throw std::invalid_argument(
          "config: a quantum attack requires a traitor");
    }
    const Party required =
        cfg.attack == AttackCase::I ? Party::A : Party::B;
    if (*cfg.traitor != required) {
      throw std::invalid_argument(
          "config: this attack case belongs to a different traitor");
    }
  }
  if (cfg.traitor) {
    const auto strat = cfg.resolved_strategy();
    if ((*cfg.traitor == Party::A) !=
        (strat == TraitorStrategy::EquivocateOrders)) {
      throw std::invalid_argument(
          "config: traitor strategy does not match the traitor's role");
    }
    if (strat == TraitorStrategy::ForgeWithStolenList &&
        cfg.attack != AttackCase::III) {
      throw std::invalid_argument(
          "config: forge-stolen needs the attack that reads the other "
          "receiver's list (case iii)");
    }
  }
}

struct CommandResult {
  int exit_code = 0;
  std::string report;
};

namespace detail {

inline std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

inline std::string scenario_line(const RunConfig& cfg, const char* command) {
  return strf("%s: rounds=%llu attack=%s basis=%s p_z=%.3f seed=%llu\n",
              command, static_cast<unsigned long long>(cfg.rounds),
              attack_case_name(cfg.attack), attack_policy_name(cfg.policy),
              cfg.policy.kind == AttackBasisPolicy::Kind::RandomPerRound
                  ? cfg.policy.p_z
                  : (cfg.policy.kind == AttackBasisPolicy::Kind::AlwaysZ
                         ? 1.0
                         : 0.0),
              static_cast<unsigned long long>(cfg.seed));
}

inline std::string detector_line(const DetectorConfig& cfg) {
  return strf("detector: threshold_sigma=%.3f min_samples=%llu\n",
              cfg.threshold_sigma,
              static_cast<unsigned long long>(cfg.min_samples_per_key));
}

inline std::string estimate_table(std::span<const CorrelatorEstimate> ests,
                                  std::span<const double> predictions) {
  std::string out =
      "key            n    estimate     stderr   predicted        z\n";
  for (std::size_t k = 0; k < ests.size(); ++k) {
    const auto& e = ests[k];
    out += strf("%-9s %8llu  %+.6f  %9.6f  %+.6f  %7.3f\n",
                e.key.label().c_str(), static_cast<unsigned long long>(e.n),
                e.value, e.std_err, predictions[k],
                z_score(e.value, predictions[k], e.std_err));
  }
  return out;
}

inline std::string verdict_block(const Verdict& verdict) {
  std::string out;
  for (const auto& v : verdict.violations) {
    out += strf("violation: %s estimate=%+.6f predicted=%+.6f z=%.3f\n",
                v.key.label().c_str(), v.estimate, v.predicted, v.z);
  }
  for (const auto& key : verdict.insufficient) {
    out += strf("insufficient samples: %s\n", key.label().c_str());
  }
  return out;
}

inline std::string verdict_trailer(Verdict::Kind kind) {
  return std::string("VERDICT=") + verdict_name(kind) + "\n";
}

inline int verdict_exit_code(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::Accept: return kExitAccept;
    case Verdict::Kind::Abort: return kExitAbort;
    case Verdict::Kind::InsufficientData: return kExitInsufficient;
  }
  return kExitConfig;
}

inline bool write_report_file(const std::string& path,
                              const std::string& report, std::string* error) {
  if (path.empty()) return true;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    *error = "cannot open report file for writing: " + path;
    return false;
  }
  out << report;
  out.flush();
  if (!out) {
    *error = "failed writing report file: " + path;
    return false;
  }
  return true;
}

inline std::array<double, 12> honest_predictions(
    std::span<const CorrelatorEstimate> ests) {
  std::array<double, 12> predictions{};
  for (std::size_t k = 0; k < ests.size(); ++k) {
    predictions[k] = theoretical(ests[k].key, Scenario::honest());
  }
  return predictions;
}

}  // namespace detail

// Simulate a distribution run, write the record file, report all 12
// correlator estimates against the honest predictions and the verdict.
inline CommandResult cmd_simulate(const RunConfig& cfg) {
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, std::string("error: ") + e.what() + "\n"};
  }
  std::string report = detail::scenario_line(cfg, "simulate");
  report += detail::detector_line(cfg.detector);
  try {
    const Transcript t =
        run_distribution(cfg.rounds, cfg.attack, cfg.policy, cfg.seed);
    if (!cfg.records_path.empty()) {
      write_record_file(cfg.records_path, t.records);
      report += "records: " + cfg.records_path + "\n";
    }
    const auto estimates = estimate_all(t.records);
    const auto predictions = detail::honest_predictions(estimates);
    const Verdict verdict = decide(estimates, predictions, cfg.detector);
    report += detail::estimate_table(estimates, predictions);
    report += detail::verdict_block(verdict);
    report += detail::verdict_trailer(verdict.kind);
    std::string io_error;
    if (!detail::write_report_file(cfg.report_path, report, &io_error)) {
      return {kExitConfig, report + "error: " + io_error + "\n"};
    }
    return {detail::verdict_exit_code(verdict.kind), report};
  } catch (const NoSamplesError& e) {
    report += std::string("error: ") + e.what() + "\n";
    report += detail::verdict_trailer(Verdict::Kind::InsufficientData);
    return {kExitInsufficient, report};
  } catch (const std::exception& e) {
    return {kExitConfig, report + "error: " + e.what() + "\n"};
  }
}

// Re-analyze a record file against the honest predictions.
inline CommandResult cmd_analyze(const std::string& records_path,
                                 const RunConfig& cfg) {
  try {
    validate(cfg.detector);
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, std::string("error: ") + e.what() + "\n"};
  }
  std::string report = "analyze: records=" + records_path + "\n";
  report += detail::detector_line(cfg.detector);
  try {
    const auto records = read_record_file(records_path);
    if (records.empty()) {
      report += "error: record file holds no rounds\n";
      report += detail::verdict_trailer(Verdict::Kind::InsufficientData);
      return {kExitInsufficient, report};
    }
    const auto estimates = estimate_all(records);
    const auto predictions = detail::honest_predictions(estimates);
    const Verdict verdict = decide(estimates, predictions, cfg.detector);
    report += detail::estimate_table(estimates, predictions);
    report += detail::verdict_block(verdict);
    report += detail::verdict_trailer(verdict.kind);
    std::string io_error;
    if (!detail::write_report_file(cfg.report_path, report, &io_error)) {
      return {kExitConfig, report + "error: " + io_error + "\n"};
    }
    return {detail::verdict_exit_code(verdict.kind), report};
  } catch (const NoSamplesError& e) {
    report += std::string("error: ") + e.what() + "\n";
    report += detail::verdict_trailer(Verdict::Kind::InsufficientData);
    return {kExitInsufficient, report};
  } catch (const RecordParseError& e) {
    return {kExitConfig, report + "error: " + e.what() + "\n"};
  } catch (const std::exception& e) {
    return {kExitConfig, report + "error: " + e.what() + "\n"};
  }
}

// Print the bundled reference dataset, its z-scores against the exact
// predictions, and the verdict at the given detector configuration. Sample
// counts are recovered from the published standard errors.
inline CommandResult cmd_table1(const DetectorConfig& detector = {}) {
  try {
    validate(detector);
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, std::string("error: ") + e.what() + "\n"};
  }
  std::string report = "table1: reference correlator dataset\n";
  report += detail::detector_line(detector);
  std::vector<CorrelatorEstimate> estimates;
  std::vector<double> predictions;
  double max_z = 0.0;
  CorrelatorKey max_key = all_correlator_keys()[0];
  for (const auto& row : table1_reference()) {
    CorrelatorEstimate est;
    est.key = row.key;
    est.value = row.experimental;
    est.std_err = row.experimental_err;
    est.n = static_cast<std::uint64_t>(std::llround(
        (1.0 - row.experimental * row.experimental) /
        (row.experimental_err * row.experimental_err)));
    const double z = z_score(est.value, row.theory, est.std_err);
    if (z > max_z) {
      max_z = z;
      max_key = row.key;
    }
    report += detail::strf("%-9s %g ± %g  theory %s  n=%llu  z=%.3f\n",
                           row.key.label().c_str(), row.experimental,
                           row.experimental_err,
                           row.theory > 0 ? "1/3" : "-2/3",
                           static_cast<unsigned long long>(est.n), z);
    estimates.push_back(est);
    predictions.push_back(row.theory);
  }
  const Verdict verdict = decide(estimates, predictions, detector);
  report += detail::strf("max_z=%.3f at %s\n", max_z, max_key.label().c_str());
  report += detail::verdict_block(verdict);
  report += detail::verdict_trailer(verdict.kind);
  return {detail::verdict_exit_code(verdict.kind), report};
}

// Full protocol scenario: distribution (with the traitor's quantum attack,
// if any), verification, then the agreement phase over the surviving lists.
inline CommandResult cmd_protocol(const RunConfig& cfg) {
  try {
    validate_protocol(cfg);
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, std::string("error: ") + e.what() + "\n"};
  }
  std::string report = detail::scenario_line(cfg, "protocol");
  report += detail::detector_line(cfg.detector);
  report += detail::strf(
      "order=%d traitor=%s strategy=%s sample_fraction=%.3f\n", cfg.order,
      cfg.traitor ? std::string(1, party_name(*cfg.traitor)).c_str() : "none",
      cfg.traitor ? traitor_strategy_name(cfg.resolved_strategy()) : "-",
      cfg.sample_fraction);
  try {
    const Transcript t =
        run_distribution(cfg.rounds, cfg.attack, cfg.policy, cfg.seed);
    const VerificationResult ver =
        verify_step_iii(t, cfg.sample_fraction, cfg.detector);
    report += detail::strf(
        "verification: sampled=%llu structure_violations=%llu\n",
        static_cast<unsigned long long>(ver.consumed.size()),
        static_cast<unsigned long long>(ver.structure_violations.size()));
    report += detail::estimate_table(ver.estimates, ver.predictions);
    report += detail::verdict_block(ver.detector_verdict);

    if (ver.overall != Verdict::Kind::Accept) {
      for (Party p : kAllParties) {
        if (cfg.traitor && *cfg.traitor == p) continue;
        report += detail::strf("outcome %c: %s\n", party_name(p),
                               AgreementOutcome::aborted().label().c_str());
      }
      report += detail::verdict_trailer(ver.overall);
      std::string io_error;
      if (!detail::write_report_file(cfg.report_path, report, &io_error)) {
        return {kExitConfig, report + "error: " + io_error + "\n"};
      }
      return {detail::verdict_exit_code(ver.overall), report};
    }

    const SecretLists lists = derive_lists(t, ver.consumed);
    std::optional<TraitorPlan> plan;
    if (cfg.traitor) {
      plan.emplace();
      plan->who = *cfg.traitor;
      plan->strategy = cfg.resolved_strategy();
      if (plan->strategy == TraitorStrategy::ForgeWithStolenList) {
        const auto inferred =
            infer_secret(t.traitor_records, t.party_bases(), Party::C);
        for (std::size_t i = 0; i < inferred.size(); ++i) {
          if (inferred[i] && *inferred[i] != Trit::Bot) {
            plan->stolen_bits[t.traitor_records[i].round] =
                *inferred[i] == Trit::One ? 1 : 0;
          }
        }
      }
    }
    const std::size_t l_min = default_l_min(lists.size());
    report += detail::strf("lists: length=%llu l_min=%llu\n",
                           static_cast<unsigned long long>(lists.size()),
                           static_cast<unsigned long long>(l_min));
    Pcg32 agreement_rng(cfg.seed, kStreamAgreement);
    const AgreementResult agreement =
        run_agreement(lists, plan, cfg.order, l_min, agreement_rng);
    report += detail::strf("commander sent: B<-(%d,|%llu|) C<-(%d,|%llu|)\n",
                           agreement.sent_to_b.order,
                           static_cast<unsigned long long>(
                               agreement.sent_to_b.positions.size()),
                           agreement.sent_to_c.order,
                           static_cast<unsigned long long>(
                               agreement.sent_to_c.positions.size()));
    bool any_traitor_detected = false;
    for (const auto& [party, outcome] : agreement.outcomes) {
      report += detail::strf("outcome %c: %s\n", party_name(party),
                             outcome.label().c_str());
      if (outcome.kind == AgreementOutcome::Kind::TraitorDetected) {
        any_traitor_detected = true;
      }
    }
    report += detail::verdict_trailer(Verdict::Kind::Accept);
    std::string io_error;
    if (!detail::write_report_file(cfg.report_path, report, &io_error)) {
      return {kExitConfig, report + "error: " + io_error + "\n"};
    }
    return {any_traitor_detected ? kExitTraitor : kExitAccept, report};
  } catch (const InsufficientRoundsError& e) {
    report += std::string("error: ") + e.what() + "\n";
    report += detail::verdict_trailer(Verdict::Kind::InsufficientData);
    return {kExitInsufficient, report};
  } catch (const std::exception& e) {
    return {kExitConfig, report + "error: " + e.what() + "\n"};
  }
}

}  // namespace qba
