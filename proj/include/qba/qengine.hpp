// Exact linear algebra for four-qubit pure states: the canonical invariant
// state, projective Z/X measurements, post-measurement ensembles and
// pairwise Pauli expectation values. Everything operates on immutable
// 16-amplitude values and is safe to call concurrently.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "qba/rng.hpp"
#include "qba/types.hpp"

namespace qba {

using Complex = std::complex<double>;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
// Branches below this probability are numerically silent and dropped.
inline constexpr double kBranchEps = 1e-15;

// Four-qubit pure state as 16 complex amplitudes over |q_a q_b q_c q_d>.
class PureState {
 public:
  static constexpr std::size_t kDim = 16;

  PureState() = default;
  explicit PureState(const std::array<Complex, kDim>& amps) : amps_(amps) {}

  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const std::array<Complex, kDim>& amplitudes() const { return amps_; }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  PureState normalized() const {
    const double n2 = norm_sq();
    if (n2 < kBranchEps) {
      throw std::logic_error("cannot normalize a (near-)zero state");
    }
    PureState out = *this;
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : out.amps_) a *= inv;
    return out;
  }

  // <this|other>
  Complex overlap(const PureState& other) const {
    Complex s = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
      s += std::conj(amps_[i]) * other.amps_[i];
    }
    return s;
  }

  // Global phase is ignored throughout; states compare equal when the
  // magnitude of their overlap is 1.
  double overlap_abs(const PureState& other) const {
    return std::abs(overlap(other));
  }

 private:
  std::array<Complex, kDim> amps_{};
};

// The four-qubit total-spin-zero state distributed each round:
// (1/(2*sqrt(3))) (2|0011> - |0101> - |0110> - |1001> - |1010> + 2|1100>).
inline PureState make_psi4() {
  const double c = 1.0 / (2.0 * std::sqrt(3.0));
  std::array<Complex, PureState::kDim> amps{};
  amps[0b0011] = 2.0 * c;
  amps[0b0101] = -c;
  amps[0b0110] = -c;
  amps[0b1001] = -c;
  amps[0b1010] = -c;
  amps[0b1100] = 2.0 * c;
  return PureState(amps);
}

struct Mat2 {
  Complex u00, u01, u10, u11;
};

inline Mat2 mat2_identity() { return {1.0, 0.0, 0.0, 1.0}; }

inline Mat2 mat2_hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return {s, s, s, -s};
}

inline Mat2 pauli_matrix(Basis axis) {
  if (axis == Basis::Z) return {1.0, 0.0, 0.0, -1.0};
  return {0.0, 1.0, 1.0, 0.0};
}

inline bool is_unitary(const Mat2& u, double tol = kUnitaryTol) {
  // u† u == I entrywise.
  const Complex a = std::conj(u.u00) * u.u00 + std::conj(u.u10) * u.u10;
  const Complex b = std::conj(u.u00) * u.u01 + std::conj(u.u10) * u.u11;
  const Complex c = std::conj(u.u01) * u.u00 + std::conj(u.u11) * u.u10;
  const Complex d = std::conj(u.u01) * u.u01 + std::conj(u.u11) * u.u11;
  return std::abs(a - 1.0) <= tol && std::abs(b) <= tol &&
         std::abs(c) <= tol && std::abs(d - 1.0) <= tol;
}

// Haar-style random unitary from four seeded draws.
inline Mat2 random_unitary(Pcg32& rng) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double alpha = two_pi * rng.next_double();
  const double beta = two_pi * rng.next_double();
  const double delta = two_pi * rng.next_double();
  const double theta = std::asin(std::sqrt(rng.next_double()));
  const Complex ga = std::polar(1.0, alpha);
  const Complex gb = std::polar(1.0, beta);
  const Complex gd = std::polar(1.0, delta);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  return {gd * ga * ct, gd * gb * st, -gd * std::conj(gb) * st,
          gd * std::conj(ga) * ct};
}

inline PureState apply_single_qubit(const PureState& state, Qubit q,
                                    const Mat2& u) {
  const std::size_t mask = std::size_t{1} << bit_index(q);
  PureState out;
  for (std::size_t i = 0; i < PureState::kDim; ++i) {
    if (i & mask) continue;
    const Complex a0 = state[i];
    const Complex a1 = state[i | mask];
    out[i] = u.u00 * a0 + u.u01 * a1;
    out[i | mask] = u.u10 * a0 + u.u11 * a1;
  }
  return out;
}

// (u (x) u (x) u (x) u) |state>. u must be unitary within 1e-10.
inline PureState apply_uniform_unitary(const PureState& state,
                                       const Mat2& u) {
  if (!is_unitary(u)) {
    throw std::invalid_argument("apply_uniform_unitary: matrix not unitary");
  }
  PureState out = state;
  for (Qubit q : kAllQubits) out = apply_single_qubit(out, q, u);
  return out;
}

namespace detail {

// Unnormalized projection of one qubit onto the given basis outcome,
// together with its probability weight.
struct Projection {
  PureState component;  // unnormalized
  double prob = 0.0;
};

inline Projection project_outcome(const PureState& state, Qubit q,
                                  Basis basis, int outcome) {
  const PureState work =
      basis == Basis::X ? apply_single_qubit(state, q, mat2_hadamard())
                        : state;
  const std::size_t mask = std::size_t{1} << bit_index(q);
  Projection proj;
  for (std::size_t i = 0; i < PureState::kDim; ++i) {
    const int bit = (i & mask) ? 1 : 0;
    if (bit == outcome) {
      proj.component[i] = work[i];
      proj.prob += std::norm(work[i]);
    }
  }
  if (basis == Basis::X) {
    proj.component = apply_single_qubit(proj.component, q, mat2_hadamard());
  }
  return proj;
}

}  // namespace detail

struct MeasureResult {
  int outcome = 0;
  PureState collapsed;
  double prob = 0.0;
};

// Projective single-qubit measurement. The outcome is chosen by comparing
// the supplied uniform [0,1) draw against the probability of outcome 0;
// branches below kBranchEps cannot be selected.
inline MeasureResult measure_qubit(const PureState& state, Qubit q,
                                   Basis basis, double draw) {
  PureState work = basis == Basis::X
                       ? apply_single_qubit(state, q, mat2_hadamard())
                       : state;
  const std::size_t mask = std::size_t{1} << bit_index(q);
  double p0 = 0.0;
  double p1 = 0.0;
  for (std::size_t i = 0; i < PureState::kDim; ++i) {
    ((i & mask) ? p1 : p0) += std::norm(work[i]);
  }
  if (p0 < kBranchEps && p1 < kBranchEps) {
    throw std::logic_error("measure_qubit: unnormalized input state");
  }
  int outcome;
  if (p0 < kBranchEps) {
    outcome = 1;
  } else if (p1 < kBranchEps) {
    outcome = 0;
  } else {
    outcome = draw < p0 ? 0 : 1;
  }
  const double prob = outcome == 0 ? p0 : p1;
  const double inv = 1.0 / std::sqrt(prob);
  const std::size_t keep = outcome == 0 ? 0 : mask;
  for (std::size_t i = 0; i < PureState::kDim; ++i) {
    work[i] = (i & mask) == keep ? work[i] * inv : Complex{};
  }
  if (basis == Basis::X) {
    work = apply_single_qubit(work, q, mat2_hadamard());
  }
  return {outcome, work, prob};
}

// Weighted list of pure states; represents a post-measurement mixed state.
struct Ensemble {
  struct Member {
    double weight = 0.0;
    PureState state;
  };
  std::vector<Member> members;

  double total_weight() const {
    double s = 0.0;
    for (const auto& m : members) s += m.weight;
    return s;
  }
};

// All outcome branches of projectively measuring the given qubits in one
// basis. Weights are the joint branch probabilities; branches below
// kBranchEps are omitted.
inline Ensemble project_all(const PureState& state,
                            std::span<const Qubit> qubits, Basis basis) {
  if (qubits.empty()) {
    throw std::invalid_argument("project_all: empty qubit list");
  }
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    for (std::size_t j = i + 1; j < qubits.size(); ++j) {
      if (qubits[i] == qubits[j]) {
        throw std::invalid_argument("project_all: duplicate qubit id");
      }
    }
  }
  Ensemble branches;
  branches.members.push_back({1.0, state});
  for (Qubit q : qubits) {
    Ensemble next;
    for (const auto& member : branches.members) {
      for (int outcome : {0, 1}) {
        const auto proj =
            detail::project_outcome(member.state, q, basis, outcome);
        const double weight = member.weight * proj.prob;
        if (weight < kBranchEps) continue;
        next.members.push_back({weight, proj.component.normalized()});
      }
    }
    branches = std::move(next);
  }
  return branches;
}

struct PauliObservable {
  Qubit qubit;
  Basis axis;
};

// <state| sigma (x) sigma |state> for two single-qubit Pauli observables on
// distinct qubits. Exact up to rounding; always in [-1, 1].
inline double expectation_pair(const PureState& state, PauliObservable o1,
                               PauliObservable o2) {
  if (o1.qubit == o2.qubit) {
    throw std::invalid_argument("expectation_pair: observables share a qubit");
  }
  PureState phi = apply_single_qubit(state, o1.qubit, pauli_matrix(o1.axis));
  phi = apply_single_qubit(phi, o2.qubit, pauli_matrix(o2.axis));
  const double e = state.overlap(phi).real();
  return std::clamp(e, -1.0, 1.0);
}

inline double expectation_pair(const Ensemble& ensemble, PauliObservable o1,
                               PauliObservable o2) {
  double s = 0.0;
  for (const auto& m : ensemble.members) {
    s += m.weight * expectation_pair(m.state, o1, o2);
  }
  return std::clamp(s, -1.0, 1.0);
}

}  // namespace qba
