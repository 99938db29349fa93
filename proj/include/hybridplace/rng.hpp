#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hybridplace {

/// Deterministic random stream. Standard-library distributions are
/// implementation-defined, so uniform and normal draws are generated here
/// explicitly; identical seeds give identical sequences on every platform.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : key_(mix(seed)), engine_(key_) {}

  /// Independent child stream, e.g. one per Monte-Carlo trial. Children of
  /// distinct (key, index) pairs never share state.
  RngStream substream(uint64_t index) const {
    RngStream s(0);
    s.key_ = mix(key_ ^ (index + 0x9e3779b97f4a7c15ull));
    s.engine_.seed(s.key_);
    s.has_cached_ = false;
    return s;
  }

  /// Uniform on [0, 1).
  double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (both values used).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  // splitmix64; decorrelates nearby seeds before feeding the engine.
  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  uint64_t key_;
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace hybridplace
