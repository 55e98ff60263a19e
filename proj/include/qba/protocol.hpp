// Three-party detectable agreement over lists distributed via the
// four-qubit state. One run has three phases:
//
//   distribution — every round a fresh copy of the state is dealt out (and
//     possibly attacked in flight), each party picks Z or X at random and
//     measures its qubits (A uses one basis for both of hers);
//   verification — a random sample of same-basis rounds is spot-checked
//     against the perfect-correlation structure, and all 12 correlators are
//     tested against the quantum predictions;
//   agreement — the commander sends her order plus the supporting position
//     set, the receivers cross-validate against their own lists and either
//     agree or name the traitor.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qba/adversary.hpp"
#include "qba/correlators.hpp"
#include "qba/detector.hpp"
#include "qba/qengine.hpp"
#include "qba/rng.hpp"
#include "qba/types.hpp"

namespace qba {

struct Transcript {
  std::uint64_t seed = 0;
  AttackCase attack = AttackCase::None;
  AttackBasisPolicy policy = AttackBasisPolicy::always_z();
  std::vector<MeasurementRecord> records;
  std::vector<TraitorRecord> traitor_records;

  // Per-round party bases, indexed by round number.
  std::vector<std::array<Basis, 3>> party_bases() const {
    std::uint64_t max_round = 0;
    for (const auto& rec : records) max_round = std::max(max_round, rec.round);
    std::vector<std::array<Basis, 3>> bases(records.empty() ? 0
                                                            : max_round + 1);
    for (const auto& rec : records) bases[rec.round] = rec.basis;
    return bases;
  }
};

// One round of distribution, derived from (seed, round) alone so rounds can
// be simulated in any order or split across workers. The draw sequence is
// fixed: attack basis (random policy only), attack measurements in qubit
// order, party bases A then B then C, qubit measurements a through d.
inline MeasurementRecord simulate_round(
    std::uint64_t seed, std::uint64_t round, AttackCase attack,
    const AttackBasisPolicy& policy,
    std::optional<TraitorRecord>* traitor_out = nullptr) {
  Pcg32 rng = round_rng(seed, round);
  const auto attacked = apply_attack(make_psi4(), attack, policy, rng, round);
  if (traitor_out != nullptr) *traitor_out = attacked.record;

  MeasurementRecord rec;
  rec.round = round;
  for (Party p : kAllParties) {
    rec.basis[static_cast<std::size_t>(p)] =
        rng.next_double() < 0.5 ? Basis::Z : Basis::X;
  }
  PureState state = attacked.post_state;
  for (Qubit q : kAllQubits) {
    const auto m = measure_qubit(state, q, rec.basis_of_qubit(q),
                                 rng.next_double());
    rec.outcome[static_cast<std::size_t>(q)] =
        static_cast<std::int8_t>(m.outcome);
    state = m.collapsed;
  }
  return rec;
}

inline Transcript run_distribution(std::uint64_t n_rounds, AttackCase attack,
                                   const AttackBasisPolicy& policy,
                                   std::uint64_t seed) {
  if (n_rounds == 0) {
    throw std::invalid_argument("run_distribution: need at least one round");
  }
  Transcript t;
  t.seed = seed;
  t.attack = attack;
  t.policy = policy;
  t.records.reserve(n_rounds);
  for (std::uint64_t r = 0; r < n_rounds; ++r) {
    std::optional<TraitorRecord> traitor;
    t.records.push_back(simulate_round(seed, r, attack, policy, &traitor));
    if (traitor) t.traitor_records.push_back(*traitor);
  }
  return t;
}

// The correlated lists extracted from the all-Z rounds: the commander's
// trits and the two receivers' bits, kept in parallel arrays indexed by the
// position (round number).
struct SecretLists {
  std::vector<std::uint64_t> positions;
  std::vector<Trit> commander_trits;   // from A's pair of outcomes
  std::vector<std::int8_t> bits_b;     // outcome of qubit c
  std::vector<std::int8_t> bits_c;     // outcome of qubit d

  std::size_t size() const { return positions.size(); }
};

inline SecretLists derive_lists(
    const Transcript& transcript,
    const std::vector<std::uint64_t>& consumed = {}) {
  const std::unordered_set<std::uint64_t> skip(consumed.begin(),
                                               consumed.end());
  SecretLists lists;
  for (const auto& rec : transcript.records) {
    if (!rec.all_in(Basis::Z) || skip.count(rec.round) != 0) continue;
    lists.positions.push_back(rec.round);
    lists.commander_trits.push_back(rec.commander_trit());
    lists.bits_b.push_back(static_cast<std::int8_t>(rec.outcome_of(Qubit::C)));
    lists.bits_c.push_back(static_cast<std::int8_t>(rec.outcome_of(Qubit::D)));
  }
  if (lists.positions.empty()) {
    throw InsufficientRoundsError("derive_lists: no all-Z rounds available");
  }
  return lists;
}

// Verification phase result. The overall verdict aborts on either a
// perfect-correlation violation at a sampled position or a correlator
// deviation flagged by the detector; sampled positions are consumed and
// must not be reused by the agreement phase.
struct VerificationResult {
  Verdict::Kind overall = Verdict::Kind::Accept;
  Verdict detector_verdict;
  std::vector<std::uint64_t> structure_violations;  // offending rounds
  std::vector<std::uint64_t> consumed;              // sampled positions
  std::array<CorrelatorEstimate, 12> estimates{};
  std::array<double, 12> predictions{};

  bool accepted() const { return overall == Verdict::Kind::Accept; }
  bool cites(const CorrelatorKey& key) const {
    return detector_verdict.cites(key);
  }
};

inline VerificationResult verify_step_iii(const Transcript& transcript,
                                          double sample_fraction,
                                          const DetectorConfig& cfg) {
  if (transcript.records.empty()) {
    throw std::invalid_argument("verify_step_iii: empty transcript");
  }
  if (!(sample_fraction >= 0.0 && sample_fraction <= 1.0)) {
    throw std::invalid_argument("verify_step_iii: bad sample fraction");
  }
  VerificationResult res;

  // Spot checks: every same-basis round is sampled independently. Both the
  // all-Z and all-X rounds obey the same trit structure on the ideal state,
  // so any sampled violation is proof of tampering.
  Pcg32 sampler(transcript.seed, kStreamVerifySampling);
  for (const auto& rec : transcript.records) {
    if (!rec.all_in(Basis::Z) && !rec.all_in(Basis::X)) continue;
    if (sampler.next_double() >= sample_fraction) continue;
    res.consumed.push_back(rec.round);
    if (!list_structure_ok(rec)) {
      res.structure_violations.push_back(rec.round);
    }
  }

  try {
    res.estimates = estimate_all(transcript.records);
  } catch (const NoSamplesError& e) {
    throw InsufficientRoundsError(e.what());
  }
  std::vector<double> predictions;
  predictions.reserve(res.estimates.size());
  for (std::size_t k = 0; k < res.estimates.size(); ++k) {
    res.predictions[k] = theoretical(res.estimates[k].key, Scenario::honest());
    predictions.push_back(res.predictions[k]);
  }
  res.detector_verdict = decide(res.estimates, predictions, cfg);

  if (!res.structure_violations.empty()) {
    res.overall = Verdict::Kind::Abort;
  } else {
    res.overall = res.detector_verdict.kind;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Agreement phase
// ---------------------------------------------------------------------------

struct AgreementOutcome {
  enum class Kind { Agree, TraitorDetected, AbortedAtVerification };
  Kind kind = Kind::Agree;
  int order = 0;          // set for Agree
  Party accused = Party::A;  // set for TraitorDetected

  static AgreementOutcome agree(int m) {
    return {Kind::Agree, m, Party::A};
  }
  static AgreementOutcome traitor(Party p) {
    return {Kind::TraitorDetected, 0, p};
  }
  static AgreementOutcome aborted() {
    return {Kind::AbortedAtVerification, 0, Party::A};
  }

  bool operator==(const AgreementOutcome&) const = default;

  std::string label() const {
    switch (kind) {
      case Kind::Agree: return "Agree(" + std::to_string(order) + ")";
      case Kind::TraitorDetected:
        return std::string("TraitorDetected(") + party_name(accused) + ")";
      case Kind::AbortedAtVerification: return "AbortedAtVerification";
    }
    return "?";
  }
};

enum class TraitorStrategy {
  // Commander only: send order 0 with its supporting set to B and order 1
  // with its supporting set to C.
  EquivocateOrders,
  // Receiver only: claim A sent the opposite order, back it with a blind
  // guess of l_min positions outside the genuinely received set.
  ForgeReceivedOrder,
  // Receiver only: back the flipped order with positions where the stolen
  // copy of the other receiver's list shows the forged order's bit.
  ForgeWithStolenList,
};

inline const char* traitor_strategy_name(TraitorStrategy s) {
  switch (s) {
    case TraitorStrategy::EquivocateOrders: return "equivocate";
    case TraitorStrategy::ForgeReceivedOrder: return "forge";
    case TraitorStrategy::ForgeWithStolenList: return "forge-stolen";
  }
  return "?";
}

struct TraitorPlan {
  Party who = Party::A;
  TraitorStrategy strategy = TraitorStrategy::EquivocateOrders;
  // position -> bit of the other receiver's list (ForgeWithStolenList).
  std::unordered_map<std::uint64_t, int> stolen_bits;
};

struct CommanderMessage {
  int order = 0;
  std::vector<std::uint64_t> positions;
};

struct AgreementResult {
  // Outcome of every loyal party, in party order.
  std::vector<std::pair<Party, AgreementOutcome>> outcomes;

  // Trace of the message flow, for reports and tests.
  CommanderMessage sent_to_b, sent_to_c;
  bool valid_b = false, valid_c = false;
  int claimed_order_b = 0, claimed_order_c = 0;
  bool cross_check_ran = false;
  bool cross_check_b_passed = false;  // B's check of C's forwarded evidence
  bool cross_check_c_passed = false;  // C's check of B's forwarded evidence

  std::optional<AgreementOutcome> outcome_of(Party p) const {
    for (const auto& [party, outcome] : outcomes) {
      if (party == p) return outcome;
    }
    return std::nullopt;
  }
};

inline std::size_t default_l_min(std::size_t list_length) {
  return std::max<std::size_t>(1, list_length / 6);
}

namespace detail {

struct ReceiverView {
  Party id = Party::B;
  const std::vector<std::int8_t>* own_bits = nullptr;
  CommanderMessage received;
  bool valid = false;
  // What this receiver tells the other one: the order it claims to have
  // received and the supporting position set it forwards.
  CommanderMessage forwarded;
  bool claims_valid = true;
};

inline bool validate_message(const CommanderMessage& msg,
                             const std::unordered_map<std::uint64_t,
                                                      std::size_t>& index_of,
                             const std::vector<std::int8_t>& own_bits,
                             std::size_t l_min) {
  if (msg.positions.size() < l_min) return false;
  for (std::uint64_t k : msg.positions) {
    const auto it = index_of.find(k);
    if (it == index_of.end()) return false;
    if (own_bits[it->second] != msg.order) return false;
  }
  return true;
}

}  // namespace detail

// Agreement phase over verified lists. The commander sends (order, support
// set) to each receiver; receivers validate, exchange what they received,
// and on conflict judge each other's forwarded evidence against their own
// lists: corroborated conflicting evidence convicts the commander, evidence
// that fails the check convicts the forwarder (who then keeps the
// commander's genuine order). At most one party may be a traitor.
inline AgreementResult run_agreement(const SecretLists& lists,
                                     const std::optional<TraitorPlan>& traitor,
                                     int commander_order, std::size_t l_min,
                                     Pcg32& rng) {
  if (commander_order != 0 && commander_order != 1) {
    throw std::invalid_argument("run_agreement: order must be 0 or 1");
  }
  if (traitor) {
    const bool commander_strategy =
        traitor->strategy == TraitorStrategy::EquivocateOrders;
    if ((traitor->who == Party::A) != commander_strategy) {
      throw std::invalid_argument(
          "run_agreement: strategy does not match the traitor's role");
    }
  }

  std::unordered_map<std::uint64_t, std::size_t> index_of;
  index_of.reserve(lists.size());
  for (std::size_t i = 0; i < lists.size(); ++i) {
    index_of.emplace(lists.positions[i], i);
  }
  const auto support_set = [&](int order) {
    CommanderMessage msg;
    msg.order = order;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      if (lists.commander_trits[i] == (order == 0 ? Trit::Zero : Trit::One)) {
        msg.positions.push_back(lists.positions[i]);
      }
    }
    if (msg.positions.size() < l_min) {
      throw InsufficientRoundsError(
          "run_agreement: lists too short to reach l_min support");
    }
    return msg;
  };

  AgreementResult res;
  const bool commander_traitor = traitor && traitor->who == Party::A;
  res.sent_to_b = support_set(commander_order);
  res.sent_to_c = support_set(commander_traitor ? 1 - commander_order
                                                : commander_order);

  detail::ReceiverView b;
  b.id = Party::B;
  b.own_bits = &lists.bits_b;
  b.received = res.sent_to_b;
  detail::ReceiverView c;
  c.id = Party::C;
  c.own_bits = &lists.bits_c;
  c.received = res.sent_to_c;
  for (auto* rv : {&b, &c}) {
    rv->valid = detail::validate_message(rv->received, index_of,
                                         *rv->own_bits, l_min);
    rv->forwarded = rv->received;
    rv->claims_valid = rv->valid;
  }

  // A forging receiver claims the opposite order, backed by a set built
  // from whatever it knows.
  const auto forge = [&](detail::ReceiverView& rv) {
    const int forged_order = 1 - rv.received.order;
    CommanderMessage fake;
    fake.order = forged_order;
    if (traitor->strategy == TraitorStrategy::ForgeWithStolenList) {
      for (std::size_t i = 0; i < lists.size(); ++i) {
        const auto it = traitor->stolen_bits.find(lists.positions[i]);
        if (it != traitor->stolen_bits.end() && it->second == forged_order) {
          fake.positions.push_back(lists.positions[i]);
        }
      }
    } else {
      std::vector<std::uint64_t> available;
      const std::unordered_set<std::uint64_t> received(
          rv.received.positions.begin(), rv.received.positions.end());
      for (std::uint64_t k : lists.positions) {
        if (received.count(k) == 0) available.push_back(k);
      }
      if (available.size() < l_min) {
        throw InsufficientRoundsError(
            "run_agreement: too few positions to forge a support set");
      }
      for (std::size_t i = 0; i < l_min; ++i) {  // partial Fisher-Yates
        const auto span = available.size() - i;
        std::size_t offset =
            static_cast<std::size_t>(rng.next_double() * double(span));
        if (offset >= span) offset = span - 1;  // draw rounded up to 1.0*span
        std::swap(available[i], available[i + offset]);
        fake.positions.push_back(available[i]);
      }
    }
    if (fake.positions.size() < l_min) {
      throw InsufficientRoundsError(
          "run_agreement: stolen list covers too few positions");
    }
    rv.forwarded = fake;
    rv.claims_valid = true;
  };
  if (traitor && traitor->who == Party::B) forge(b);
  if (traitor && traitor->who == Party::C) forge(c);

  res.valid_b = b.valid;
  res.valid_c = c.valid;
  res.claimed_order_b = b.forwarded.order;
  res.claimed_order_c = c.forwarded.order;

  const auto receiver_outcome = [&](const detail::ReceiverView& self,
                                    const detail::ReceiverView& other,
                                    bool* check_passed) -> AgreementOutcome {
    if (!self.valid) return AgreementOutcome::traitor(Party::A);
    if (self.forwarded.order == other.forwarded.order && self.claims_valid &&
        other.claims_valid) {
      return AgreementOutcome::agree(self.received.order);
    }
    res.cross_check_ran = true;
    const bool pass = detail::validate_message(other.forwarded, index_of,
                                               *self.own_bits, l_min);
    *check_passed = pass;
    // Conflicting but corroborated evidence means A equivocated; evidence
    // that fails the holder's own list convicts the forwarder, and the
    // holder keeps the order A genuinely sent.
    return pass ? AgreementOutcome::traitor(Party::A)
                : AgreementOutcome::traitor(other.id);
  };

  if (!commander_traitor) {
    res.outcomes.emplace_back(Party::A,
                              AgreementOutcome::agree(commander_order));
  }
  if (!traitor || traitor->who != Party::B) {
    res.outcomes.emplace_back(Party::B,
                              receiver_outcome(b, c,
                                               &res.cross_check_b_passed));
  }
  if (!traitor || traitor->who != Party::C) {
    res.outcomes.emplace_back(Party::C,
                              receiver_outcome(c, b,
                                               &res.cross_check_c_passed));
  }
  return res;
}

}  // namespace qba
