#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ionfab {

// Seeded generator with a fixed, documented bit stream (docs/rng.md).
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. The engine is seeded with splitmix64(seed ^ splitmix64(stream)) so that
// independent streams can be derived from one user seed. Every derived
// variate is computed here from raw 64-bit words; no std:: distribution is
// used because their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double uniform();
  // Uniform on (0, 1]: (top 53 bits + 1) * 2^-53.
  double uniform_open_zero();
  // Uniform integer on [0, bound) by rejection of the biased tail.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }
  // Trials up to and including the first success, p in (0, 1].
  std::uint64_t geometric(double p);
  // Exponential with the given rate, by inversion.
  double exponential(double rate);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ionfab
