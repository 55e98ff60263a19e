// Pairwise Pauli correlators: empirical estimates with plug-in standard
// errors, exact predictions for the honest and attacked states, and the
// bundled reference dataset of measured values.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qba/adversary.hpp"
#include "qba/qengine.hpp"
#include "qba/types.hpp"

namespace qba {

// Same-axis correlator of one qubit pair; 6 pairs x 2 axes = 12 keys.
struct CorrelatorKey {
  Qubit first = Qubit::A;
  Qubit second = Qubit::B;
  Basis axis = Basis::Z;

  CorrelatorKey() = default;
  CorrelatorKey(Qubit q1, Qubit q2, Basis ax) : axis(ax) {
    if (q1 == q2) {
      throw std::invalid_argument("correlator key: qubits must differ");
    }
    first = q1 < q2 ? q1 : q2;
    second = q1 < q2 ? q2 : q1;
  }

  bool operator==(const CorrelatorKey&) const = default;

  std::string label() const {
    return std::string("(") + qubit_name(first) + "," + qubit_name(second) +
           "," + basis_name(axis) + ")";
  }
};

// Keys in display order: pair-major, X before Z, matching the reference
// table layout.
inline const std::array<CorrelatorKey, 12>& all_correlator_keys() {
  static const std::array<CorrelatorKey, 12> keys = {{
      {Qubit::A, Qubit::B, Basis::X}, {Qubit::A, Qubit::B, Basis::Z},
      {Qubit::A, Qubit::C, Basis::X}, {Qubit::A, Qubit::C, Basis::Z},
      {Qubit::A, Qubit::D, Basis::X}, {Qubit::A, Qubit::D, Basis::Z},
      {Qubit::B, Qubit::C, Basis::X}, {Qubit::B, Qubit::C, Basis::Z},
      {Qubit::B, Qubit::D, Basis::X}, {Qubit::B, Qubit::D, Basis::Z},
      {Qubit::C, Qubit::D, Basis::X}, {Qubit::C, Qubit::D, Basis::Z},
  }};
  return keys;
}

struct CorrelatorEstimate {
  CorrelatorKey key;
  double value = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
};

// Plug-in standard error for a mean of +-1 products.
inline double plug_in_std_err(double value, std::uint64_t n) {
  return std::sqrt(std::max(0.0, 1.0 - value * value) /
                   static_cast<double>(n));
}

// Mean of the product of mapped eigenvalues over the rounds where both
// qubits of the pair were measured along the key's axis.
inline CorrelatorEstimate estimate(std::span<const MeasurementRecord> records,
                                   const CorrelatorKey& key) {
  std::int64_t sum = 0;
  std::uint64_t n = 0;
  for (const auto& rec : records) {
    if (rec.basis_of_qubit(key.first) != key.axis ||
        rec.basis_of_qubit(key.second) != key.axis) {
      continue;
    }
    sum += eigenvalue(rec.outcome_of(key.first)) *
           eigenvalue(rec.outcome_of(key.second));
    ++n;
  }
  if (n == 0) {
    throw NoSamplesError("no samples for correlator key " + key.label());
  }
  CorrelatorEstimate est;
  est.key = key;
  est.n = n;
  est.value = static_cast<double>(sum) / static_cast<double>(n);
  est.std_err = plug_in_std_err(est.value, n);
  return est;
}

// All 12 keys in one pass over the records.
inline std::array<CorrelatorEstimate, 12> estimate_all(
    std::span<const MeasurementRecord> records) {
  const auto& keys = all_correlator_keys();
  std::array<std::int64_t, 12> sums{};
  std::array<std::uint64_t, 12> counts{};
  for (const auto& rec : records) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const auto& key = keys[k];
      if (rec.basis_of_qubit(key.first) != key.axis ||
          rec.basis_of_qubit(key.second) != key.axis) {
        continue;
      }
      sums[k] += eigenvalue(rec.outcome_of(key.first)) *
                 eigenvalue(rec.outcome_of(key.second));
      ++counts[k];
    }
  }
  std::array<CorrelatorEstimate, 12> out;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (counts[k] == 0) {
      throw NoSamplesError("no samples for correlator key " +
                           keys[k].label());
    }
    out[k].key = keys[k];
    out[k].n = counts[k];
    out[k].value =
        static_cast<double>(sums[k]) / static_cast<double>(counts[k]);
    out[k].std_err = plug_in_std_err(out[k].value, counts[k]);
  }
  return out;
}

// A prediction scenario: the pristine state, or the mixed state left behind
// by an intercept-resend attack under some basis policy.
struct Scenario {
  enum class Kind { Honest, Attacked };
  Kind kind = Kind::Honest;
  AttackCase attack = AttackCase::None;
  AttackBasisPolicy policy = AttackBasisPolicy::always_z();

  static Scenario honest() { return {}; }
  static Scenario attacked(AttackCase c, AttackBasisPolicy p) {
    return {Kind::Attacked, c, p};
  }
};

// Exact quantum prediction for one key under a scenario.
inline double theoretical(const CorrelatorKey& key, const Scenario& scenario) {
  const PauliObservable o1{key.first, key.axis};
  const PauliObservable o2{key.second, key.axis};
  const PureState psi = make_psi4();
  if (scenario.kind == Scenario::Kind::Honest ||
      scenario.attack == AttackCase::None) {
    return expectation_pair(psi, o1, o2);
  }
  const auto qubits = intercepted_qubits(scenario.attack);
  Ensemble mixed;
  const auto add_branch = [&](Basis basis, double weight) {
    if (weight <= 0.0) return;
    for (auto& member : project_all(psi, qubits, basis).members) {
      mixed.members.push_back({weight * member.weight, member.state});
    }
  };
  switch (scenario.policy.kind) {
    case AttackBasisPolicy::Kind::AlwaysZ:
      add_branch(Basis::Z, 1.0);
      break;
    case AttackBasisPolicy::Kind::AlwaysX:
      add_branch(Basis::X, 1.0);
      break;
    case AttackBasisPolicy::Kind::RandomPerRound:
      add_branch(Basis::Z, scenario.policy.p_z);
      add_branch(Basis::X, 1.0 - scenario.policy.p_z);
      break;
  }
  return expectation_pair(mixed, o1, o2);
}

// One row of the bundled experimental dataset.
struct ReferenceRow {
  CorrelatorKey key;
  double experimental = 0.0;
  double experimental_err = 0.0;
  double theory = 0.0;
};

// The 12 measured same-axis correlators of the reference dataset, with the
// exact predictions (1/3 for the (a,b) and (c,d) pairs, -2/3 for the cross
// pairs). Values are stored digit for digit as reported.
inline const std::array<ReferenceRow, 12>& table1_reference() {
  static const double third = 1.0 / 3.0;
  static const double cross = -2.0 / 3.0;
  static const std::array<ReferenceRow, 12> rows = {{
      {{Qubit::A, Qubit::B, Basis::X}, 0.262, 0.025, third},
      {{Qubit::A, Qubit::B, Basis::Z}, 0.273, 0.025, third},
      {{Qubit::A, Qubit::C, Basis::X}, -0.602, 0.021, cross},
      {{Qubit::A, Qubit::C, Basis::Z}, -0.631, 0.02, cross},
      {{Qubit::A, Qubit::D, Basis::X}, -0.612, 0.02, cross},
      {{Qubit::A, Qubit::D, Basis::Z}, -0.663, 0.019, cross},
      {{Qubit::B, Qubit::C, Basis::X}, -0.603, 0.021, cross},
      {{Qubit::B, Qubit::C, Basis::Z}, -0.615, 0.02, cross},
      {{Qubit::B, Qubit::D, Basis::X}, -0.61, 0.02, cross},
      {{Qubit::B, Qubit::D, Basis::Z}, -0.621, 0.02, cross},
      {{Qubit::C, Qubit::D, Basis::X}, 0.334, 0.025, third},
      {{Qubit::C, Qubit::D, Basis::Z}, 0.326, 0.024, third},
  }};
  return rows;
}

}  // namespace qba
