// Core domain types shared across the library: qubit labels, measurement
// bases, parties, commander trits and per-round measurement records.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qba {

// The four qubits of one distributed state copy. Party A holds a and b,
// party B holds c, party C holds d.
enum class Qubit : int { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<Qubit, 4> kAllQubits = {Qubit::A, Qubit::B,
                                                    Qubit::C, Qubit::D};

// Basis-state indices run |q_a q_b q_c q_d> with qubit a as the most
// significant bit and qubit d as the least significant bit.
constexpr int bit_index(Qubit q) { return 3 - static_cast<int>(q); }

constexpr int bit_of(std::size_t basis_index, Qubit q) {
  return static_cast<int>((basis_index >> bit_index(q)) & 1u);
}

constexpr char qubit_name(Qubit q) {
  return static_cast<char>('a' + static_cast<int>(q));
}

enum class Basis : int { Z = 0, X = 1 };

constexpr char basis_name(Basis b) { return b == Basis::Z ? 'Z' : 'X'; }

inline Basis basis_from_name(char c) {
  if (c == 'Z' || c == 'z') return Basis::Z;
  if (c == 'X' || c == 'x') return Basis::X;
  throw std::invalid_argument(std::string("unknown basis name: ") + c);
}

// Measurement outcome 0 maps to eigenvalue +1 and outcome 1 to -1, in both
// bases (|0> and |0bar> are the +1 eigenvectors).
constexpr int eigenvalue(int outcome) { return outcome == 0 ? +1 : -1; }

enum class Party : int { A = 0, B = 1, C = 2 };

inline constexpr std::array<Party, 3> kAllParties = {Party::A, Party::B,
                                                     Party::C};

constexpr char party_name(Party p) {
  return static_cast<char>('A' + static_cast<int>(p));
}

constexpr Party holder_of(Qubit q) {
  switch (q) {
    case Qubit::A:
    case Qubit::B:
      return Party::A;
    case Qubit::C:
      return Party::B;
    case Qubit::D:
      return Party::C;
  }
  throw std::invalid_argument("bad qubit");
}

// Commander symbol derived from A's two-qubit outcome in a same-basis round.
// Bot marks the anticorrelated rounds used for liar detection.
enum class Trit : int { Zero = 0, One = 1, Bot = 2 };

constexpr Trit trit_of(int outcome_a, int outcome_b) {
  if (outcome_a == 1 && outcome_b == 1) return Trit::Zero;
  if (outcome_a == 0 && outcome_b == 0) return Trit::One;
  return Trit::Bot;
}

inline std::string trit_name(Trit t) {
  switch (t) {
    case Trit::Zero: return "0";
    case Trit::One: return "1";
    case Trit::Bot: return "bot";
  }
  return "?";
}

// One protocol round: the basis each party chose (A's choice covers both of
// her qubits) and the 0/1 outcome of each qubit.
struct MeasurementRecord {
  std::uint64_t round = 0;
  std::array<Basis, 3> basis{};    // indexed by Party
  std::array<std::int8_t, 4> outcome{};  // indexed by Qubit

  Basis basis_of_party(Party p) const {
    return basis[static_cast<std::size_t>(p)];
  }
  Basis basis_of_qubit(Qubit q) const { return basis_of_party(holder_of(q)); }
  int outcome_of(Qubit q) const {
    return outcome[static_cast<std::size_t>(q)];
  }

  bool all_in(Basis b) const {
    return basis[0] == b && basis[1] == b && basis[2] == b;
  }

  Trit commander_trit() const {
    return trit_of(outcome_of(Qubit::A), outcome_of(Qubit::B));
  }
};

// Correlation structure every same-basis round of the ideal state obeys:
// trit 0 forces both receiver bits to 0, trit 1 forces both to 1, and bot
// rounds carry anticorrelated receiver bits.
inline bool list_structure_ok(const MeasurementRecord& rec) {
  const int c = rec.outcome_of(Qubit::C);
  const int d = rec.outcome_of(Qubit::D);
  switch (rec.commander_trit()) {
    case Trit::Zero: return c == 0 && d == 0;
    case Trit::One: return c == 1 && d == 1;
    case Trit::Bot: return c != d;
  }
  return false;
}

// Error for estimators asked about a key with zero usable rounds.
struct NoSamplesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Error for protocol phases that cannot proceed because too few rounds
// survive (no list rounds, or lists shorter than the validation minimum).
struct InsufficientRoundsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qba
