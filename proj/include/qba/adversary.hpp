// Intercept-resend attacks. A traitor measures the qubits in flight toward
// one party and forwards the collapsed state, keeping a record of what was
// learned. Case I: traitor A intercepts qubit c. Case II: traitor B
// intercepts qubits a and b. Case III: traitor B intercepts qubit d.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qba/qengine.hpp"
#include "qba/rng.hpp"
#include "qba/types.hpp"

namespace qba {

enum class AttackCase : int { None = 0, I = 1, II = 2, III = 3 };

inline std::span<const Qubit> intercepted_qubits(AttackCase c) {
  static constexpr std::array<Qubit, 1> case_i = {Qubit::C};
  static constexpr std::array<Qubit, 2> case_ii = {Qubit::A, Qubit::B};
  static constexpr std::array<Qubit, 1> case_iii = {Qubit::D};
  switch (c) {
    case AttackCase::None: return {};
    case AttackCase::I: return case_i;
    case AttackCase::II: return case_ii;
    case AttackCase::III: return case_iii;
  }
  throw std::invalid_argument("bad attack case");
}

inline const char* attack_case_name(AttackCase c) {
  switch (c) {
    case AttackCase::None: return "none";
    case AttackCase::I: return "i";
    case AttackCase::II: return "ii";
    case AttackCase::III: return "iii";
  }
  return "?";
}

// Which basis the traitor measures in. The fixed policies consume no
// randomness; RandomPerRound draws Z with probability p_z each round.
struct AttackBasisPolicy {
  enum class Kind { AlwaysZ, AlwaysX, RandomPerRound };

  Kind kind = Kind::AlwaysZ;
  double p_z = 1.0;

  static AttackBasisPolicy always_z() { return {Kind::AlwaysZ, 1.0}; }
  static AttackBasisPolicy always_x() { return {Kind::AlwaysX, 0.0}; }
  static AttackBasisPolicy random_per_round(double p_z) {
    if (!(p_z >= 0.0 && p_z <= 1.0)) {
      throw std::invalid_argument("attack policy: p_z outside [0,1]");
    }
    return {Kind::RandomPerRound, p_z};
  }

  Basis draw(Pcg32& rng) const {
    switch (kind) {
      case Kind::AlwaysZ: return Basis::Z;
      case Kind::AlwaysX: return Basis::X;
      case Kind::RandomPerRound:
        return rng.next_double() < p_z ? Basis::Z : Basis::X;
    }
    throw std::logic_error("bad policy kind");
  }
};

inline const char* attack_policy_name(const AttackBasisPolicy& p) {
  switch (p.kind) {
    case AttackBasisPolicy::Kind::AlwaysZ: return "z";
    case AttackBasisPolicy::Kind::AlwaysX: return "x";
    case AttackBasisPolicy::Kind::RandomPerRound: return "random";
  }
  return "?";
}

// What the traitor saw in one round: the basis used and the outcome of each
// intercepted qubit (-1 marks qubits that were not intercepted).
struct TraitorRecord {
  std::uint64_t round = 0;
  Basis basis_used = Basis::Z;
  std::array<std::int8_t, 4> outcomes = {-1, -1, -1, -1};

  bool intercepted(Qubit q) const {
    return outcomes[static_cast<std::size_t>(q)] >= 0;
  }
  int outcome_of(Qubit q) const {
    const int v = outcomes[static_cast<std::size_t>(q)];
    if (v < 0) throw std::invalid_argument("qubit was not intercepted");
    return v;
  }
};

struct AttackResult {
  PureState post_state;
  std::optional<TraitorRecord> record;
};

// Measures each intercepted qubit in the policy basis and forwards the
// collapsed state. Case None passes the state through untouched.
inline AttackResult apply_attack(const PureState& state, AttackCase c,
                                 const AttackBasisPolicy& policy, Pcg32& rng,
                                 std::uint64_t round = 0) {
  if (c == AttackCase::None) return {state, std::nullopt};
  TraitorRecord rec;
  rec.round = round;
  rec.basis_used = policy.draw(rng);
  PureState current = state;
  for (Qubit q : intercepted_qubits(c)) {
    const auto m = measure_qubit(current, q, rec.basis_used,
                                 rng.next_double());
    rec.outcomes[static_cast<std::size_t>(q)] =
        static_cast<std::int8_t>(m.outcome);
    current = m.collapsed;
  }
  return {current, rec};
}

// The party whose transmitted qubits the attack covers entirely; repeated
// measurement in the same basis makes that party's outcomes certain to the
// traitor.
inline std::optional<Party> attack_victim(AttackCase c) {
  switch (c) {
    case AttackCase::None: return std::nullopt;
    case AttackCase::I: return Party::B;
    case AttackCase::II: return Party::A;
    case AttackCase::III: return Party::C;
  }
  return std::nullopt;
}

// Unknown (nullopt) or an inferred symbol: the commander's trit for target
// A, the receiver's list bit (as Trit::Zero/One) for targets B and C.
using InferredSymbol = std::optional<Trit>;

// Reconstructs the target's per-round secret from the traitor's records.
// A round yields a known value only when the attack covered the target's
// qubits and the attack basis matched the basis the target actually used;
// every other round is Unknown.
inline std::vector<InferredSymbol> infer_secret(
    std::span<const TraitorRecord> records,
    const std::vector<std::array<Basis, 3>>& honest_bases, Party target) {
  if (records.size() > honest_bases.size()) {
    throw std::invalid_argument(
        "infer_secret: more traitor records than per-round basis entries");
  }
  std::vector<InferredSymbol> inferred;
  inferred.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.round >= honest_bases.size()) {
      throw std::invalid_argument(
          "infer_secret: record round outside basis metadata");
    }
    const Basis target_basis =
        honest_bases[rec.round][static_cast<std::size_t>(target)];
    bool covered = true;
    for (Qubit q : kAllQubits) {
      if (holder_of(q) == target && !rec.intercepted(q)) covered = false;
    }
    if (!covered || target_basis != rec.basis_used) {
      inferred.push_back(std::nullopt);
      continue;
    }
    switch (target) {
      case Party::A:
        inferred.push_back(
            trit_of(rec.outcome_of(Qubit::A), rec.outcome_of(Qubit::B)));
        break;
      case Party::B:
        inferred.push_back(rec.outcome_of(Qubit::C) == 0 ? Trit::Zero
                                                         : Trit::One);
        break;
      case Party::C:
        inferred.push_back(rec.outcome_of(Qubit::D) == 0 ? Trit::Zero
                                                         : Trit::One);
        break;
    }
  }
  return inferred;
}

}  // namespace qba
