#include "ionfab/rng.hpp"

#include <cmath>
#include <limits>

#include "ionfab/errors.hpp"

namespace ionfab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed ^ splitmix64(stream))) {}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open_zero() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t Rng::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("geometric needs p in (0, 1]");
  if (p == 1.0) return 1;
  const double u = uniform_open_zero();
  const double k = std::floor(std::log(u) / std::log1p(-p));
  if (k >= 9.0e18) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(k) + 1;
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential needs rate > 0");
  return -std::log(uniform_open_zero()) / rate;
}

}  // namespace ionfab
