// Seeded random streams. Every round of a simulation draws from its own
// PCG32 substream keyed by (seed, round index), so results do not depend on
// how rounds are scheduled across workers.
#pragma once

#include <cstdint>

namespace qba {

// PCG-XSH-RR 64/32 (www.pcg-random.org). Small, fast, and supports
// independent streams through the increment selector.
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) {
    inc_ = (stream << 1u) | 1u;
    state_ = 0u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double next_double() {
    const double a = next_u32() >> 5;   // 27 bits
    const double b = next_u32() >> 6;   // 26 bits
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0);
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

// Stream ids: plain round indices drive the per-round simulation streams;
// auxiliary streams sit far above any realistic round count.
inline constexpr std::uint64_t kStreamVerifySampling = (1ULL << 62) + 1;
inline constexpr std::uint64_t kStreamAgreement = (1ULL << 62) + 2;

inline Pcg32 round_rng(std::uint64_t seed, std::uint64_t round) {
  return Pcg32(seed, round);
}

}  // namespace qba
