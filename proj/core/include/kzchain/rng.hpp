#pragma once

#include <cmath>
#include <cstdint>

namespace kz {

// Counter-based random stream ("smix64ctr", v1).  Output n of stream
// (seed, stream) is a pure function of (seed, stream, n), so realizations
// are stable across platforms and parallel schedules.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive_key(seed, stream)) {}

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return finalize(finalize(seed) ^ finalize(stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
  }

  // Value at an absolute counter position, independent of stream state.
  static std::uint64_t at(std::uint64_t key, std::uint64_t n) {
    return finalize(key + (n + 1) * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t next_u64() { return at(key_, ctr_++); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1].
  double next_double_oc() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two counter values per call.
  double next_gaussian() {
    const double u1 = next_double_oc();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
  }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace kz
