#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace tgr {

/// Deterministic random stream.
///
/// mt19937_64 output is specified bit-exactly by the standard; the helpers
/// below avoid std::uniform_*_distribution, whose mapping from raw bits to
/// values is implementation-defined and would make seeds non-portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Unbiased integer in [0, n), n > 0. Rejection sampling on the raw stream.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x, r;
    do {
      x = next_u64();
      r = x % n;
    } while (x - r > std::uint64_t(0) - n);
    return r;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  bool coin() { return (next_u64() >> 63) != 0; }

  /// Fisher-Yates; stable across platforms, unlike std::shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  /// Draw k distinct values from [0, n) in random order.
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n,
                                                        std::uint64_t k);

  std::string serialize_state() const;
  void restore_state(const std::string& state);

 private:
  std::mt19937_64 gen_;
};

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0);

/// SplitMix64 finalizer; decorrelates related inputs.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for a named substream, so independent components of a run never share
/// a stream position.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return splitmix64(base ^ fnv1a64(tag));
}

}  // namespace tgr
