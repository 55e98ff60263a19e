// Test-only oracles, independent of the library's computation paths:
// frozen amplitude tables for the canonical state and its qubit-c collapse
// branches, and a dense 16x16 density-matrix route to pair expectations.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "qba/qengine.hpp"
#include "qba/types.hpp"

namespace oracles {

using qba::Complex;

// (1/(2*sqrt(3))) (2|0011> - |0101> - |0110> - |1001> - |1010> + 2|1100>)
inline std::array<Complex, 16> canonical_amps() {
  const double c = 1.0 / (2.0 * std::sqrt(3.0));
  std::array<Complex, 16> a{};
  a[0b0011] = 2.0 * c;
  a[0b0101] = -c;
  a[0b0110] = -c;
  a[0b1001] = -c;
  a[0b1010] = -c;
  a[0b1100] = 2.0 * c;
  return a;
}

// (1/sqrt(6)) (-|0101> - |1001> + 2|1100>): qubit c collapsed to |0>.
inline std::array<Complex, 16> c0_branch_amps() {
  const double s = 1.0 / std::sqrt(6.0);
  std::array<Complex, 16> a{};
  a[0b0101] = -s;
  a[0b1001] = -s;
  a[0b1100] = 2.0 * s;
  return a;
}

// (1/sqrt(6)) (2|0011> - |0110> - |1010>): qubit c collapsed to |1>.
inline std::array<Complex, 16> c1_branch_amps() {
  const double s = 1.0 / std::sqrt(6.0);
  std::array<Complex, 16> a{};
  a[0b0011] = 2.0 * s;
  a[0b0110] = -s;
  a[0b1010] = -s;
  return a;
}

using Matrix16 = std::array<std::array<Complex, 16>, 16>;

// sigma_axis acting on one qubit of the four-qubit space, as a dense matrix.
inline Matrix16 embedded_pauli(qba::Qubit q, qba::Basis axis) {
  Matrix16 m{};
  const std::size_t mask = std::size_t{1} << qba::bit_index(q);
  for (std::size_t i = 0; i < 16; ++i) {
    if (axis == qba::Basis::Z) {
      m[i][i] = (i & mask) ? -1.0 : 1.0;
    } else {
      m[i][i ^ mask] = 1.0;
    }
  }
  return m;
}

inline Matrix16 multiply(const Matrix16& a, const Matrix16& b) {
  Matrix16 out{};
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t k = 0; k < 16; ++k) {
      if (a[i][k] == Complex{}) continue;
      for (std::size_t j = 0; j < 16; ++j) {
        out[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return out;
}

// Tr(rho * sigma(x)sigma) with rho assembled densely from the ensemble.
inline double density_expectation(const qba::Ensemble& ensemble,
                                  qba::PauliObservable o1,
                                  qba::PauliObservable o2) {
  Matrix16 rho{};
  for (const auto& member : ensemble.members) {
    for (std::size_t i = 0; i < 16; ++i) {
      for (std::size_t j = 0; j < 16; ++j) {
        rho[i][j] += member.weight * member.state[i] *
                     std::conj(member.state[j]);
      }
    }
  }
  const Matrix16 op =
      multiply(embedded_pauli(o1.qubit, o1.axis),
               embedded_pauli(o2.qubit, o2.axis));
  Complex trace{};
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) {
      trace += rho[i][j] * op[j][i];
    }
  }
  return trace.real();
}

inline double density_expectation(const qba::PureState& state,
                                  qba::PauliObservable o1,
                                  qba::PauliObservable o2) {
  qba::Ensemble e;
  e.members.push_back({1.0, state});
  return density_expectation(e, o1, o2);
}

inline qba::PureState state_from(const std::array<Complex, 16>& amps) {
  return qba::PureState(amps);
}

}  // namespace oracles
