#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace pfopt {

/* All randomness in the library flows through this header.  The generator and
 * the variate transforms are written out explicitly (instead of using
 * <random> distributions) because the distributions' stream layout is
 * implementation-defined, and every documented output of the library is
 * required to be bit-reproducible for a given master seed across toolchains.
 */

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/* splitmix64: the canonical seeding sequence for xoshiro-family generators. */
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  return mix64(state);
}

/* Stateless derivation of a child seed from (master, phase, iteration, slot).
 * Distinct inputs give independent-looking streams; equal inputs give equal
 * seeds, which is what makes runs replayable piecewise. */
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t phase,
                                 std::uint64_t iteration = 0,
                                 std::uint64_t slot = 0) {
  std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ (phase + 0xbf58476d1ce4e5b9ull));
  h = mix64(h ^ (iteration + 0x94d049bb133111ebull));
  h = mix64(h ^ (slot + 0x2545f4914f6cdd1dull));
  return h;
}

/* Fixed phase tags for derive_seed.  Values are arbitrary but frozen: changing
 * them changes every documented output. */
enum : std::uint64_t {
  kSeedPhaseInit = 1,       // initial ensemble draw
  kSeedPhaseEstimate = 2,   // moment estimation at the current parameters
  kSeedPhaseObjective = 3,  // objective evaluation at the proposed parameters
  kSeedPhaseResample = 4,   // multinomial resampling
  kSeedPhaseRepeat = 5,     // per-repeat master seed inside a campaign
  kSeedPhaseSource = 6,     // source-sample generation for an experiment
};

/* xoshiro256++ (Blackman & Vigna), seeded via splitmix64. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /* Uniform on [0, 1): 53 random bits scaled by 2^-53. */
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /* Uniform on (0, 1]: safe as a log() argument. */
  double uniform01_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /* Standard normal via Box-Muller.  One variate per call, no cached
   * partner, so the stream position is a pure function of the call count. */
  double normal() {
    const double u1 = uniform01_pos();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace pfopt
