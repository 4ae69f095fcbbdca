#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace tennis {

// All randomness in the project flows through this wrapper so results are
// reproducible bit-for-bit across platforms. The engine is std::mt19937_64
// (fully specified by the standard); distributions are pinned here instead of
// using std::*_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1): top 53 bits of the engine output.
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1], safe as a log() argument.
  double u01_open_low() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Uniform index in [0, n). Maps u01 onto the range; the floor is clamped so
  // u01() == (1 - 2^-53) cannot yield n.
  std::size_t index(std::size_t n) {
    const auto k = static_cast<std::size_t>(u01() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  // Standard normal via the trigonometric Box-Muller transform.
  double normal() {
    const double u1 = u01_open_low();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 step; used to derive independent sub-seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over bytes; used for content hashing and seed derivation from names.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Sub-seed for a (name, stream index) pair, e.g. one optimizer run of one
// player. Documented rule: mix the master seed with the FNV-1a hash of the
// name, then advance by the stream index through SplitMix64.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t stream) {
  return splitmix64(splitmix64(master ^ fnv1a64(name)) + stream);
}

}  // namespace tennis
