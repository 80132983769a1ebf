#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace vrszd {

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

// Seed for repeat `repeat` of grid cell `cell`: base xor hash(repeat, cell).
inline Seed derive_seed(Seed base, std::uint64_t repeat, std::uint64_t cell) {
  return Seed{base.value ^ mix64(mix64(repeat) ^ (cell * 0xd1342543de82ef95ULL + 1))};
}

// Independent stream per worker: base xor worker index.
inline Seed worker_seed(Seed base, std::uint64_t worker) {
  return Seed{base.value ^ worker};
}

/// xoshiro256** by Blackman and Vigna, seeded through splitmix64.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(Seed seed) {
    std::uint64_t s = seed.value;
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

/// Platform-independent random stream. The standard library distributions are
/// implementation-defined, so uniform/normal/index sampling is done here.
class RandomStream {
 public:
  explicit RandomStream(Seed seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < threshold);
    return x % n;
  }

  // Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  Xoshiro256& engine() { return engine_; }

 private:
  Xoshiro256 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vrszd
